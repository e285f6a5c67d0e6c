"""
Results store client

Persists EvalReports so ROC curves and metrics can be re-read without
re-running an experiment.
"""

import json
import logging
from dataclasses import asdict
from typing import Any, Dict, List, Optional

import numpy as np
from sqlalchemy import Engine, create_engine
from sqlalchemy.orm import Session, sessionmaker
from sqlalchemy.pool import StaticPool

from ..exceptions import MissingCell
from ..metrics import RocCurve
from .base import metadata_obj
from .crud import BaseCrud
from .models import ExperimentRun, ResultCell
from .session import detach_object, session_scope

logger = logging.getLogger(__name__)


class ResultStore:
    """
    SQLAlchemy-backed store of experiment runs and their cells.

    Usage:
        with ResultStore("sqlite:///results.db") as store:
            run_id = store.record_report(report, config)
            curve = store.roc_curve(run_id, "12", "lda")
    """

    def __init__(
        self, db_url: str, engine_options: Optional[Dict[str, Any]] = None, create: bool = True
    ):
        """
        Args:
            db_url: Database URL
            engine_options: Extra create_engine options
            create: Create missing tables
        """
        self.db_url = db_url
        self.engine_options = engine_options or {}

        default_options: Dict[str, Any] = {"echo": False, "pool_pre_ping": True}
        if db_url.startswith("sqlite:///:memory:") or db_url == "sqlite://":
            default_options.update({
                "poolclass": StaticPool,
                "connect_args": {"check_same_thread": False},
            })

        self.engine: Engine = create_engine(db_url, **{**default_options, **self.engine_options})
        self.session_factory = sessionmaker(bind=self.engine)
        if create:
            metadata_obj.create_all(self.engine)
        self.runs = BaseCrud(ExperimentRun, self)
        self.cells = BaseCrud(ResultCell, self)
        logger.info(f"ResultStore opened: {self._safe_url()}")

    def _safe_url(self) -> str:
        """Database URL with the password masked"""
        if "://" in self.db_url:
            scheme, rest = self.db_url.split("://", 1)
            if "@" in rest:
                credentials, host_part = rest.split("@", 1)
                if ":" in credentials:
                    user, _ = credentials.split(":", 1)
                    return f"{scheme}://{user}:***@{host_part}"
        return self.db_url

    def session_scope(self):
        return session_scope(self.session_factory)

    def detach_object(self, obj: Any, session: Optional[Session] = None) -> Any:
        return detach_object(obj, session)

    # ===== Reports =====

    def record_report(self, report, config=None) -> int:
        """
        Store every cell of an EvalReport in one transaction.

        Args:
            report: EvalReport
            config: Optional ExperimentConfig, stored as JSON

        Returns:
            Id of the new run
        """
        config_json = json.dumps(asdict(config), sort_keys=True) if config is not None else None
        with self.session_scope() as session:
            run = ExperimentRun(
                seed=int(report.seed),
                labels=json.dumps(list(report.labels)),
                methods=json.dumps(list(report.methods)),
                config_json=config_json,
            )
            session.add(run)
            session.flush()
            for cell in report.ordered_cells():
                session.add(ResultCell(
                    run_id=run.id,
                    label=cell.label,
                    method=cell.method,
                    auc=cell.auc,
                    f1=cell.f1,
                    kappa=cell.kappa,
                    threshold=cell.threshold,
                    cost=cell.cost,
                    cv_f1=cell.cv_f1,
                    n_train=cell.n_train,
                    n_test=cell.n_test,
                    wall_time=cell.wall_time,
                    params_json=json.dumps(cell.params, sort_keys=True),
                    fpr=cell.roc.fpr.tolist(),
                    tpr=cell.roc.tpr.tolist(),
                ))
            run_id = int(run.id)
        logger.info(f"Recorded run {run_id} with {len(report.cells)} cells")
        return run_id

    def latest_run_id(self) -> Optional[int]:
        runs = self.runs.get_multi(sort_by="id", sort_desc=True, limit=1)
        return int(runs[0].id) if runs else None

    def cells_for_run(self, run_id: int) -> List[ResultCell]:
        """Cells of a run in insertion (report) order"""
        return self.cells.get_multi(filters={"run_id": run_id}, sort_by="id")

    def get_cell(self, run_id: int, label: str, method: str) -> ResultCell:
        """
        Raises:
            MissingCell: If the run has no such cell
        """
        found = self.cells.get_multi(filters={"run_id": run_id, "label": label, "method": method})
        if not found:
            raise MissingCell(f"run {run_id} has no cell for label '{label}' and method '{method}'")
        return found[0]

    def roc_curve(self, run_id: int, label: str, method: str) -> RocCurve:
        """Stored ROC curve of a cell (thresholds are not stored)"""
        cell = self.get_cell(run_id, label, method)
        fpr = np.asarray(cell.fpr, dtype=np.float64)
        return RocCurve(
            fpr=fpr,
            tpr=np.asarray(cell.tpr, dtype=np.float64),
            thresholds=np.full(fpr.size, np.nan),
            auc=float(cell.auc),
        )

    def delete_run(self, run_id: int) -> bool:
        with self.session_scope() as session:
            session.query(ResultCell).filter(ResultCell.run_id == run_id).delete()
            deleted = session.query(ExperimentRun).filter(ExperimentRun.id == run_id).delete()
        return bool(deleted)

    def close(self):
        """Dispose the engine"""
        if hasattr(self, "engine"):
            self.engine.dispose()
            logger.info("ResultStore closed")

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.close()

    def __repr__(self):
        return f"<ResultStore(url='{self._safe_url()}')>"
