"""
Evaluation report types and writers

Files written by `write_report`:

- ``report.csv``: long table (label, method, metric_kind, value)
- ``report.txt``: aligned AUC | F1 | Kappa blocks, one column group per label
- ``roc/<label>_<method>.csv``: (fpr, tpr) points per cell
- ``walltime.csv``: per-cell wall times

Every file is written to a temporary sibling and moved into place with
os.replace. All files except walltime.csv are byte-identical across reruns
of the same config.
"""

import contextlib
import json
import logging
import os
import re
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import pandas as pd

from ..exceptions import MissingCell
from ..metrics import RocCurve

logger = logging.getLogger(__name__)

METRIC_KINDS = ("auc", "f1", "kappa", "threshold", "cost", "cv_f1", "n_train", "n_test")
THRESHOLD_RULE = "F1-optimal threshold on out-of-fold training scores, frozen for test"


@dataclass(frozen=True)
class CellResult:
    """
    Outcome of one (label, method) cell.

    Attributes:
        label: Target label
        method: Reducer name or 'none'
        auc: Test AUC
        f1: Test F1 at the frozen threshold
        kappa: Test Cohen's kappa at the frozen threshold
        threshold: Operating threshold chosen on training data
        cost: Chosen SVM cost
        cv_f1: Mean cross-validated F1 of the chosen setting
        params: Chosen reducer parameters (fixed and tuned)
        roc: Test ROC curve
        n_train: Training samples
        n_test: Test samples
        wall_time: Seconds spent on the cell
        warnings: Recoverable conditions met while fitting
    """
    label: str
    method: str
    auc: float
    f1: float
    kappa: float
    threshold: float
    cost: float
    cv_f1: float
    params: Dict[str, Any]
    roc: RocCurve
    n_train: int
    n_test: int
    wall_time: float = 0.0
    warnings: Tuple[str, ...] = ()

    def metrics(self) -> Dict[str, Union[float, int]]:
        return {kind: getattr(self, kind) for kind in METRIC_KINDS}


@dataclass(frozen=True)
class EvalReport:
    """All cells of one experiment, in (label, method) config order"""
    seed: int
    labels: Tuple[str, ...]
    methods: Tuple[str, ...]
    cells: Dict[Tuple[str, str], CellResult] = field(default_factory=dict)
    meta: Dict[str, Any] = field(default_factory=dict)

    def cell(self, label: str, method: str) -> CellResult:
        """
        Raises:
            MissingCell: If the report has no such cell
        """
        try:
            return self.cells[(label, method)]
        except KeyError:
            raise MissingCell(f"no cell for label '{label}' and method '{method}'") from None

    def ordered_cells(self) -> List[CellResult]:
        return [self.cells[(label, method)] for label in self.labels for method in self.methods
                if (label, method) in self.cells]

    def to_frame(self) -> pd.DataFrame:
        """Long table of every metric and chosen parameter"""
        rows = []
        for cell in self.ordered_cells():
            for kind, value in cell.metrics().items():
                rows.append((cell.label, cell.method, kind, _format_value(value)))
            for name in sorted(cell.params):
                value = _format_value(cell.params[name])
                rows.append((cell.label, cell.method, f"param:{name}", value))
        return pd.DataFrame(rows, columns=["label", "method", "metric_kind", "value"])

    def __repr__(self):
        return (
            f"<EvalReport(labels={list(self.labels)}, methods={list(self.methods)}, "
            f"cells={len(self.cells)})>"
        )


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return json.dumps(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return json.dumps(value, sort_keys=True)


def _safe_name(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", text)


def roc_filename(label: str, method: str) -> str:
    return f"{_safe_name(label)}_{_safe_name(method)}.csv"


# ===== Writers =====

def atomic_write_text(path: Union[str, Path], text: str) -> Path:
    """Write text through a temporary sibling and os.replace"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise
    return path


def _csv_text(frame: pd.DataFrame, float_format: Optional[str] = None) -> str:
    return frame.to_csv(index=False, lineterminator="\n", float_format=float_format)


def roc_text(curve: RocCurve) -> str:
    return _csv_text(curve.to_frame(), float_format="%.17g")


def render_table(report: EvalReport) -> str:
    """
    Human-readable report: one row per method, an AUC | F1 | Kappa column
    group per label.
    """
    columns = {}
    for label in report.labels:
        for kind, title in (("auc", "AUC"), ("f1", "F1"), ("kappa", "Kappa")):
            values = []
            for method in report.methods:
                cell = report.cells.get((label, method))
                values.append("-" if cell is None else f"{getattr(cell, kind):.3f}")
            columns[f"{label} {title}"] = values
    frame = pd.DataFrame(columns, index=list(report.methods))
    frame.index.name = "method"
    lines = [
        f"seed: {report.seed}",
        f"labels: {', '.join(report.labels)}",
        f"threshold rule: {THRESHOLD_RULE}",
        "",
        frame.to_string(),
        "",
    ]
    return "\n".join(lines)


def emit_roc(report: EvalReport, label: str, method: str, path: Union[str, Path]) -> Path:
    """
    Write one cell's ROC curve as an (fpr, tpr) table.

    Raises:
        MissingCell: If the report has no such cell
    """
    cell = report.cell(label, method)
    path = atomic_write_text(path, roc_text(cell.roc))
    logger.info(f"Wrote ROC for {label}/{method} to {path}")
    return path


def write_report(report: EvalReport, out_dir: Union[str, Path]) -> Dict[str, Path]:
    """
    Write every report file under out_dir.

    Returns:
        File kind -> written path
    """
    out_dir = Path(out_dir)
    written = {
        "report.csv": atomic_write_text(out_dir / "report.csv", _csv_text(report.to_frame())),
        "report.txt": atomic_write_text(out_dir / "report.txt", render_table(report)),
    }
    for cell in report.ordered_cells():
        name = roc_filename(cell.label, cell.method)
        written[f"roc/{name}"] = atomic_write_text(out_dir / "roc" / name, roc_text(cell.roc))
    walltime = pd.DataFrame(
        [(c.label, c.method, c.wall_time) for c in report.ordered_cells()],
        columns=["label", "method", "seconds"],
    )
    written["walltime.csv"] = atomic_write_text(out_dir / "walltime.csv", _csv_text(walltime))
    logger.info(f"Wrote report for {len(report.cells)} cells to {out_dir}")
    return written
