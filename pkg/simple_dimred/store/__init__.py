"""
Optional SQLAlchemy results store for simple-dimred
"""

from .base import Base, CommonBase, metadata_obj
from .client import ResultStore
from .crud import BaseCrud
from .models import ExperimentRun, ResultCell
from .session import detach_all, detach_object, session_scope
from .types import FloatList, float_list_column

__all__ = [
    "Base",
    "CommonBase",
    "metadata_obj",
    "ResultStore",
    "BaseCrud",
    "ExperimentRun",
    "ResultCell",
    "session_scope",
    "detach_object",
    "detach_all",
    "FloatList",
    "float_list_column",
]
