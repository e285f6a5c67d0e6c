"""
Timing harness for the reducers

Fits each method on an imbalanced synthetic set (300 positives and 3,000
negatives by default) and reports the median of repeated wall times, the
fitted log-log slope of time against n and the asymptotic cost of the
method as annotation.
"""

import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..exceptions import CellError, DimredError
from .config import ExperimentConfig, derive_seed
from .report import atomic_write_text
from .runner import fit_method

logger = logging.getLogger(__name__)

# (computational, memory); p: #neighbours, t: min(d, n)
COMPLEXITY: Dict[str, Tuple[str, str]] = {
    "pca": ("O(d^3)", "O(d^2)"),
    "kpca": ("O(n^3)", "O(n^2)"),
    "lle": ("O(pn^2)", "O(pn^2)"),
    "lpp": ("O(pn^2)", "O(pn^2)"),
    "lda": ("O(dnt+t^3)", "O(d^2)"),
    "kda": ("O(n^3)", "O(n^2)"),
    "lsda": ("O(pn^2)", "O(pn^2)"),
}


@dataclass(frozen=True)
class TimingRow:
    method: str
    n: int
    d: int
    seconds: float
    runs: Tuple[float, ...] = ()


@dataclass(frozen=True)
class TimingTable:
    """Median fit times per (method, n) plus per-method log-log slopes"""
    rows: Tuple[TimingRow, ...]
    slopes: Dict[str, float] = field(default_factory=dict)

    def seconds(self, method: str, n: int) -> float:
        for row in self.rows:
            if row.method == method and row.n == n:
                return row.seconds
        raise KeyError(f"no timing for {method} at n={n}")

    def to_frame(self) -> pd.DataFrame:
        records = []
        for row in self.rows:
            computational, memory = COMPLEXITY[row.method]
            records.append({
                "method": row.method,
                "n": row.n,
                "d": row.d,
                "median_seconds": row.seconds,
                "loglog_slope": self.slopes.get(row.method, float("nan")),
                "computational": computational,
                "memory": memory,
            })
        return pd.DataFrame(records)


def timing_data(n: int, positives: int, d: int, seed: int = 0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Gaussian features with `positives` shifted samples.

    Returns:
        Tuple (d×n features, binary labels)
    """
    rng = np.random.default_rng(seed)
    labels = np.zeros(n, dtype=np.int64)
    labels[rng.permutation(n)[:positives]] = 1
    x = rng.standard_normal((d, n))
    x[: min(4, d)] += labels.astype(np.float64)
    return x, labels


def time_fit(method: str, x: np.ndarray, y: np.ndarray, repeats: int = 3) -> List[float]:
    """Wall times of `repeats` fits with default parameters"""
    runs = []
    for _ in range(repeats):
        started = time.perf_counter()
        try:
            fit_method(method, x, y, {})
        except DimredError as e:
            raise CellError("timing", method, e) from e
        runs.append(time.perf_counter() - started)
    return runs


def loglog_slope(sizes: Sequence[int], seconds: Sequence[float]) -> float:
    """Least-squares slope of log(time) against log(n)"""
    if len(sizes) < 2:
        return float("nan")
    times = np.maximum(np.asarray(seconds, dtype=np.float64), 1e-9)
    return float(np.polyfit(np.log(np.asarray(sizes, dtype=np.float64)), np.log(times), 1)[0])


def run_timing(config: ExperimentConfig, sizes: Optional[Sequence[int]] = None) -> TimingTable:
    """
    Time every configured method at the headline size and over `sizes`.

    Args:
        config: Experiment config (its timing section is used)
        sizes: Sample counts for the slope fit (default: config sizes)

    Returns:
        TimingTable
    """
    timing = config.timing
    sizes = sorted(set(int(s) for s in (timing.sizes if sizes is None else sizes)))
    all_sizes = sorted(set(sizes) | {timing.n})
    data = {}
    for n in all_sizes:
        positives = max(2, int(round(n * timing.positives / timing.n)))
        data[n] = timing_data(n, positives, timing.d, seed=derive_seed(config.seed, "timing", n))

    rows = []
    slopes = {}
    for method in timing.methods:
        medians = {}
        for n in all_sizes:
            x, y = data[n]
            runs = time_fit(method, x, y, timing.repeats)
            medians[n] = float(np.median(runs))
            rows.append(
                TimingRow(method=method, n=n, d=timing.d, seconds=medians[n], runs=tuple(runs))
            )
            logger.info(f"Timing {method} n={n} d={timing.d}: {medians[n]:.3f}s")
        slopes[method] = loglog_slope(sizes, [medians[n] for n in sizes])
        logger.debug(f"Timing {method}: log-log slope {slopes[method]:.2f}")
    return TimingTable(rows=tuple(rows), slopes=slopes)


def write_timing(table: TimingTable, out_dir: Union[str, Path]) -> Path:
    path = Path(out_dir) / "timing.csv"
    return atomic_write_text(path, table.to_frame().to_csv(index=False, lineterminator="\n"))
