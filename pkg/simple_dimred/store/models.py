"""
Tables of the results store
"""

from sqlalchemy import Column, Float, ForeignKey, Integer, String, Text, UniqueConstraint

from .base import CommonBase
from .types import float_list_column


class ExperimentRun(CommonBase):
    """One run_experiment invocation"""
    __tablename__ = "experiment_runs"

    seed = Column(Integer, nullable=False)
    labels = Column(Text, nullable=False)
    methods = Column(Text, nullable=False)
    config_json = Column(Text, nullable=True)


class ResultCell(CommonBase):
    """Metrics, chosen parameters and ROC curve of one (label, method) cell"""
    __tablename__ = "result_cells"
    __table_args__ = (UniqueConstraint("run_id", "label", "method", name="uq_result_cell"),)

    run_id = Column(
        Integer, ForeignKey("experiment_runs.id", ondelete="CASCADE"), nullable=False, index=True
    )
    label = Column(String(64), nullable=False)
    method = Column(String(16), nullable=False)
    auc = Column(Float, nullable=False)
    f1 = Column(Float, nullable=False)
    kappa = Column(Float, nullable=False)
    threshold = Column(Float, nullable=False)
    cost = Column(Float, nullable=False)
    cv_f1 = Column(Float, nullable=False)
    n_train = Column(Integer, nullable=False)
    n_test = Column(Integer, nullable=False)
    wall_time = Column(Float, nullable=True)
    params_json = Column(Text, nullable=False, default="{}")
    fpr = float_list_column(nullable=False)
    tpr = float_list_column(nullable=False)

    def __repr__(self):
        return (
            f"<ResultCell(run_id={self.run_id}, label='{self.label}', "
            f"method='{self.method}', auc={self.auc})>"
        )
