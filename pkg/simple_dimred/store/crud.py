"""
Generic CRUD operations for store tables
"""

import logging
from typing import Any, Dict, Generic, List, Optional, Type, TypeVar

from sqlalchemy import asc, desc
from sqlalchemy.orm import Query

from .session import detach_all

logger = logging.getLogger(__name__)

ModelType = TypeVar("ModelType")


class BaseCrud(Generic[ModelType]):
    """
    CRUD operations returning detached model instances.

    Usage:
        cells = BaseCrud(ResultCell, store)
        cells.get_multi(filters={"run_id": 3, "method": ["pca", "lda"]}, sort_by="id")
    """

    def __init__(self, model: Type[ModelType], db_client):
        """
        Args:
            model: SQLAlchemy model class
            db_client: Store client providing session_scope and detach_object
        """
        self.model = model
        self.db_client = db_client

    # ===== Query building =====

    def _apply_filters(self, query: Query, filters: Optional[Dict[str, Any]]) -> Query:
        """
        Supports:
        - Equality: {"field": "value"}
        - Null: {"field": None}
        - Lists: {"field": ["a", "b"]}
        - Comparisons: {"field": {">=": value}} with >=, <=, >, <
        """
        if not filters:
            return query
        for name, value in filters.items():
            if not hasattr(self.model, name):
                raise ValueError(f"{self.model.__name__} has no field '{name}'")
            column = getattr(self.model, name)
            if isinstance(value, list):
                query = query.filter(column.in_(value))
            elif value is None:
                query = query.filter(column.is_(None))
            elif isinstance(value, dict):
                for op, operand in value.items():
                    if op == ">=":
                        query = query.filter(column >= operand)
                    elif op == "<=":
                        query = query.filter(column <= operand)
                    elif op == ">":
                        query = query.filter(column > operand)
                    elif op == "<":
                        query = query.filter(column < operand)
                    else:
                        raise ValueError(f"Invalid filter operator '{op}' for field '{name}'. "
                                         f"Supported: '>=', '<=', '>', '<'")
            else:
                query = query.filter(column == value)
        return query

    # ===== Basic CRUD Operations =====

    def create(self, data: Dict[str, Any]) -> ModelType:
        """
        Create a record.

        Args:
            data: Field values (unknown keys are ignored)

        Returns:
            Created instance, detached
        """
        with self.db_client.session_scope() as session:
            clean = {k: v for k, v in data.items() if hasattr(self.model, k)}
            instance = self.model(**clean)
            session.add(instance)
            session.flush()
            session.refresh(instance)
            return self.db_client.detach_object(instance, session)

    def get_by_id(self, record_id: int) -> Optional[ModelType]:
        with self.db_client.session_scope() as session:
            instance = session.query(self.model).filter(self.model.id == record_id).first()
            return self.db_client.detach_object(instance, session) if instance else None

    def get_multi(
        self,
        filters: Optional[Dict[str, Any]] = None,
        sort_by: str = "id",
        sort_desc: bool = False,
        limit: Optional[int] = None,
    ) -> List[ModelType]:
        """
        Query records.

        Args:
            filters: Field filters (see _apply_filters)
            sort_by: Column to order by
            sort_desc: Descending order
            limit: Maximum number of records

        Returns:
            Detached instances
        """
        with self.db_client.session_scope() as session:
            query = self._apply_filters(session.query(self.model), filters)
            column = getattr(self.model, sort_by)
            query = query.order_by(desc(column) if sort_desc else asc(column))
            if limit is not None:
                query = query.limit(limit)
            return detach_all(query.all(), session)

    def count(self, filters: Optional[Dict[str, Any]] = None) -> int:
        with self.db_client.session_scope() as session:
            return self._apply_filters(session.query(self.model), filters).count()

    def delete(self, record_id: int) -> bool:
        with self.db_client.session_scope() as session:
            instance = session.query(self.model).filter(self.model.id == record_id).first()
            if instance is None:
                return False
            session.delete(instance)
            logger.debug(f"Deleted {self.model.__name__} {record_id}")
            return True
