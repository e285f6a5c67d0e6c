"""
Session management for the results store
"""

import logging
from contextlib import contextmanager
from typing import Any, Generator, List, Optional

from sqlalchemy.exc import SQLAlchemyError
from sqlalchemy.orm import Session, make_transient

logger = logging.getLogger(__name__)


@contextmanager
def session_scope(session_factory) -> Generator[Session, None, None]:
    """
    Transactional scope: commits on success, rolls back and re-raises on error.

    Args:
        session_factory: sessionmaker instance

    Yields:
        Session: Database session
    """
    session = session_factory()
    try:
        yield session
        session.commit()
    except Exception as e:
        session.rollback()
        logger.warning(f"Session rollback due to exception: {e}")
        raise
    finally:
        session.close()


def detach_object(obj: Any, session: Optional[Session] = None) -> Any:
    """
    Detach a loaded row so it can be used after its session closes.

    Column attributes must already be loaded.
    """
    if obj is None:
        return obj
    try:
        if session is not None:
            session.expunge(obj)
        else:
            make_transient(obj)
    except (AttributeError, SQLAlchemyError) as e:
        logger.warning(f"Could not detach object {obj}: {e}")
    return obj


def detach_all(objects: List[Any], session: Optional[Session] = None) -> List[Any]:
    return [detach_object(obj, session) for obj in objects]
