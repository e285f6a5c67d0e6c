"""
Declarative base for the results store
"""

from datetime import datetime, timezone

from sqlalchemy import Column, DateTime, Integer, MetaData
from sqlalchemy.orm import declarative_base

# Shared metadata for every store table
metadata_obj = MetaData()

Base = declarative_base(metadata=metadata_obj)


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class CommonBase(Base):
    """
    Abstract base for store tables.

    Provides:
    - id: Primary key
    - created_at: Insertion timestamp (UTC)
    """
    __abstract__ = True

    id = Column(Integer, primary_key=True, autoincrement=True)
    created_at = Column(DateTime(timezone=True), default=_utcnow, nullable=False)

    def __repr__(self):
        return f"<{self.__class__.__name__}(id={self.id})>"
