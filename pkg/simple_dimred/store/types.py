"""
Column types for the results store
"""

import json
from typing import Any, List, Optional, Sequence

from sqlalchemy import Column, Text, TypeDecorator


class FloatList(TypeDecorator):
    """
    A list of floats stored as JSON text.

    Python's float repr round-trips exactly, so stored ROC coordinates reload
    bit-identical on every backend.
    """

    impl = Text
    cache_ok = True

    def process_bind_param(self, value: Optional[Sequence[float]], dialect) -> Optional[str]:
        if value is None:
            return None
        return json.dumps([float(v) for v in value])

    def process_result_value(self, value: Optional[Any], dialect) -> Optional[List[float]]:
        if value is None:
            return None
        if isinstance(value, str):
            return [float(v) for v in json.loads(value)]
        return [float(v) for v in value]


def float_list_column(nullable: bool = True, **kwargs) -> Column:
    """Create a FloatList column"""
    return Column(FloatList(), nullable=nullable, **kwargs)
