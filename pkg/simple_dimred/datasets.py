"""
Feature matrices, CSV ingestion and synthetic generators for simple-dimred

CSV layout: a header row, feature columns f0..f{d-1}, one au_<id> column per
binary target and a subject column; one row per sample.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .exceptions import DimensionMismatch, NonFinite, ParseError, SchemaMismatch

logger = logging.getLogger(__name__)

FEATURE_PATTERN = re.compile(r"^f(\d+)$")
LABEL_PREFIX = "au_"
SUBJECT_COLUMN = "subject"

# Descriptor geometry the AU features were built with; carried as metadata only
DESCRIPTOR_META = {
    "sift_patch": "12x12",
    "gabor_bank": "eight different orientations and five scales",
    "registration_template": "200x200",
}


@dataclass(frozen=True)
class FeatureMatrix:
    """
    d×n column-sample feature matrix with per-column labels and subject ids.

    Attributes:
        features: d×n float64 array
        labels: Target name -> per-column integer marks (binary for AU targets)
        subjects: Per-column subject ids
        meta: Opaque metadata (descriptor geometry, generator parameters)
        ground_truth: Optional intrinsic coordinates (k×n), e.g. swiss-roll (t, height)
    """
    features: np.ndarray
    labels: Dict[str, np.ndarray] = field(default_factory=dict)
    subjects: Optional[np.ndarray] = None
    meta: Dict[str, Any] = field(default_factory=dict)
    ground_truth: Optional[np.ndarray] = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim != 2:
            raise DimensionMismatch(f"features must be 2-D, got shape {features.shape}")
        if not np.all(np.isfinite(features)):
            raise NonFinite("features contain NaN or infinite entries")
        n = features.shape[1]
        subjects = self.subjects
        if subjects is None:
            subjects = np.array(["s0"] * n, dtype=object)
        subjects = np.asarray(subjects, dtype=object)
        if subjects.shape != (n,):
            raise DimensionMismatch(f"expected {n} subject ids, got {subjects.shape}")
        labels = {}
        for name, values in self.labels.items():
            values = np.asarray(values).astype(np.int64)
            if values.shape != (n,):
                raise DimensionMismatch(f"label '{name}' has shape {values.shape}, expected ({n},)")
            labels[str(name)] = values
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "subjects", subjects)
        object.__setattr__(self, "labels", labels)

    @property
    def d(self) -> int:
        return self.features.shape[0]

    @property
    def n(self) -> int:
        return self.features.shape[1]

    def label(self, name: str) -> np.ndarray:
        """Per-column marks for one target"""
        try:
            return self.labels[name]
        except KeyError:
            raise KeyError(f"No label '{name}'; available: {sorted(self.labels)}") from None

    def select(self, indices: Sequence[int]) -> "FeatureMatrix":
        """Return the sub-matrix of the given columns, order preserved"""
        idx = np.asarray(indices, dtype=np.int64)
        return FeatureMatrix(
            features=self.features[:, idx],
            labels={name: values[idx] for name, values in self.labels.items()},
            subjects=self.subjects[idx],
            meta=dict(self.meta),
            ground_truth=None if self.ground_truth is None else self.ground_truth[:, idx],
        )

    def __repr__(self):
        return f"<FeatureMatrix(d={self.d}, n={self.n}, labels={sorted(self.labels)})>"


def as_features(x) -> np.ndarray:
    """Return the d×n array behind a FeatureMatrix or array-like"""
    if isinstance(x, FeatureMatrix):
        return x.features
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    return arr


# ===== CSV ingestion =====

def load_csv(
    path: Union[str, Path],
    feature_columns: Optional[List[str]] = None,
    label_columns: Optional[List[str]] = None,
    subject_column: str = SUBJECT_COLUMN,
) -> FeatureMatrix:
    """
    Load a feature matrix from CSV.

    Args:
        path: CSV file path
        feature_columns: Feature column names (default: every f<i> column, by index)
        label_columns: Label column names (default: every au_<id> column)
        subject_column: Subject id column

    Returns:
        FeatureMatrix whose column order is the file's row order

    Raises:
        SchemaMismatch: If a schema column is missing
        ParseError: On non-numeric or non-finite values (with 1-based file line)
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.ParserError as e:
        raise ParseError(f"{path}: {e}") from e

    columns = list(frame.columns)
    if feature_columns is None:
        matches = [(int(m.group(1)), c) for c in columns if (m := FEATURE_PATTERN.match(c))]
        feature_columns = [c for _, c in sorted(matches)]
    if label_columns is None:
        label_columns = [c for c in columns if c.startswith(LABEL_PREFIX)]
    wanted = list(feature_columns) + list(label_columns) + [subject_column]
    missing = [c for c in wanted if c not in columns]
    if missing:
        raise SchemaMismatch(f"{path}: missing columns {missing}")
    if not feature_columns:
        raise SchemaMismatch(f"{path}: no feature columns")

    features = _parse_numeric(frame, feature_columns, float)
    labels = {}
    for column in label_columns:
        values = _parse_numeric(frame, [column], float)[:, 0]
        bad = np.flatnonzero((values != 0) & (values != 1))
        if bad.size:
            raise ParseError(f"label '{column}' must be 0 or 1", line=int(bad[0]) + 2)
        name = column[len(LABEL_PREFIX):] if column.startswith(LABEL_PREFIX) else column
        labels[name] = values.astype(np.int64)

    subjects = frame[subject_column].to_numpy(dtype=object)
    empty = np.flatnonzero(subjects == "")
    if empty.size:
        raise ParseError("missing subject id", line=int(empty[0]) + 2)

    logger.info(
        f"Loaded {path.name}: d={len(feature_columns)}, n={len(frame)}, labels={sorted(labels)}"
    )
    return FeatureMatrix(
        features=features.T, labels=labels, subjects=subjects, meta={"source": str(path)}
    )


def _parse_numeric(frame: pd.DataFrame, columns: List[str], dtype) -> np.ndarray:
    block = frame[columns].apply(pd.to_numeric, errors="coerce").to_numpy(dtype=np.float64)
    bad_rows = np.flatnonzero(~np.all(np.isfinite(block), axis=1))
    if bad_rows.size:
        row = int(bad_rows[0])
        col = columns[int(np.flatnonzero(~np.isfinite(block[row]))[0])]
        raise ParseError(
            f"column '{col}' has non-numeric or non-finite value {frame[col].iloc[row]!r}",
            line=row + 2,
        )
    # per-cell float() is correctly rounded, so 17-digit text reloads bit-identically
    exact = frame[columns].to_numpy(dtype=object).astype(np.float64)
    return exact.astype(dtype)


def save_csv(fm: FeatureMatrix, path: Union[str, Path]) -> Path:
    """
    Write a feature matrix in the load_csv layout.

    Floats are written with 17 significant digits so a reload is bit-identical.
    """
    path = Path(path)
    frame = pd.DataFrame(fm.features.T, columns=[f"f{i}" for i in range(fm.d)])
    for name, values in fm.labels.items():
        frame[f"{LABEL_PREFIX}{name}"] = values
    frame[SUBJECT_COLUMN] = fm.subjects
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n", encoding="utf-8")
    return path


# ===== Synthetic generators =====

def _subject_ids(count: int) -> List[str]:
    width = max(2, len(str(count - 1)))
    return [f"s{i:0{width}d}" for i in range(count)]


def gen_clusters(
    d: int,
    n: int,
    classes: int = 2,
    separation: float = 3.0,
    seed: int = 0,
    n_subjects: int = 10,
) -> FeatureMatrix:
    """
    Seeded isotropic Gaussian blobs.

    Class c is centred at separation/√2 · e_c, so every pair of class means is
    `separation` apart. Samples are dealt to classes and subjects round-robin.

    Args:
        d: Feature dimension (≥ classes)
        n: Number of samples
        classes: Number of classes
        separation: Distance between class means (≥ 0)
        seed: Random seed
        n_subjects: Number of synthetic subjects

    Returns:
        FeatureMatrix with a single label 'class' holding ids 0..classes-1
    """
    if separation < 0:
        raise ValueError(f"separation must be >= 0, got {separation}")
    if classes < 1 or classes > d:
        raise ValueError(f"need 1 <= classes <= d, got classes={classes}, d={d}")
    rng = np.random.default_rng(seed)
    ids = np.arange(n) % classes
    means = np.zeros((d, classes))
    means[np.arange(classes), np.arange(classes)] = separation / math.sqrt(2.0)
    features = means[:, ids] + rng.standard_normal((d, n))
    subjects = np.array(_subject_ids(n_subjects), dtype=object)[np.arange(n) % n_subjects]
    return FeatureMatrix(
        features=features,
        labels={"class": ids},
        subjects=subjects,
        meta={"generator": "clusters", "separation": separation, "seed": seed},
    )


def gen_swiss_roll(
    n: int, noise: float = 0.0, seed: int = 0, height: float = 21.0
) -> FeatureMatrix:
    """
    Swiss roll (t·cos t, h, t·sin t) with t ~ U[1.5π, 4.5π], h ~ U[0, height].

    The intrinsic coordinates (t, h) are kept as ground_truth.
    """
    if n < 10:
        raise ValueError(f"swiss roll needs n >= 10, got {n}")
    rng = np.random.default_rng(seed)
    t = 1.5 * np.pi * (1.0 + 2.0 * rng.random(n))
    h = height * rng.random(n)
    features = np.vstack([t * np.cos(t), h, t * np.sin(t)])
    if noise > 0:
        features = features + noise * rng.standard_normal(features.shape)
    return FeatureMatrix(
        features=features,
        labels={"class": (t > np.median(t)).astype(np.int64)},
        subjects=np.array(_subject_ids(10), dtype=object)[np.arange(n) % 10],
        meta={"generator": "swiss_roll", "noise": noise, "seed": seed},
        ground_truth=np.vstack([t, h]),
    )


def _clumped_labels(
    rng: np.random.Generator, frames: int, pos_rate: float, run_length: int
) -> np.ndarray:
    """Binary per-frame marks whose positives come in contiguous runs"""
    positives = int(rng.binomial(frames, pos_rate))
    if positives == 0:
        return np.zeros(frames, dtype=np.int64)
    runs = math.ceil(positives / run_length)
    lengths = np.full(runs, positives // runs)
    lengths[: positives % runs] += 1
    # runs and single negative frames, shuffled as blocks
    blocks = [("pos", int(length)) for length in lengths] + [("neg", 1)] * (frames - positives)
    order = rng.permutation(len(blocks))
    marks = []
    for i in order:
        kind, length = blocks[i]
        marks.extend([1 if kind == "pos" else 0] * length)
    return np.asarray(marks, dtype=np.int64)


def gen_au_like(
    n_subjects: int = 10,
    frames_per_subject: int = 400,
    d: int = 128,
    pos_rate: float = 0.05,
    signal_dims: int = 4,
    noise: float = 0.5,
    seed: int = 0,
    latent_dims: int = 16,
    latent_scale: float = 3.0,
    subject_scale: float = 1.0,
    signal: float = 1.0,
    run_length: int = 20,
    label: str = "12",
) -> FeatureMatrix:
    """
    Class-imbalanced, subject-tagged data shaped like AU appearance features.

    Each frame has latent coordinates z ~ N(0, I) plus a per-subject offset
    (identity nuisance, scale `subject_scale`) plus `signal` on the first
    `signal_dims` latent coordinates when the AU is present. Features are
    latent_scale · Q z + noise · ε with a fixed random orthonormal Q (d×latent).
    Positives come in contiguous runs of up to `run_length` frames.

    Returns:
        FeatureMatrix with one binary label named `label`
    """
    if not 0 < pos_rate < 0.5:
        raise ValueError(f"pos_rate must be in (0, 0.5), got {pos_rate}")
    if signal_dims > d:
        raise ValueError(f"signal_dims ({signal_dims}) must be <= d ({d})")
    latent_dims = min(max(latent_dims, signal_dims), d)
    rng = np.random.default_rng(seed)
    loadings, _ = np.linalg.qr(rng.standard_normal((d, latent_dims)))

    blocks, marks, subjects = [], [], []
    for subject in _subject_ids(n_subjects):
        offset = subject_scale * rng.standard_normal(latent_dims)
        y = _clumped_labels(rng, frames_per_subject, pos_rate, run_length)
        z = rng.standard_normal((latent_dims, frames_per_subject)) + offset[:, None]
        z[:signal_dims] += signal * y[None, :]
        x = latent_scale * (loadings @ z)
        if noise > 0:
            x = x + noise * rng.standard_normal(x.shape)
        blocks.append(x)
        marks.append(y)
        subjects.extend([subject] * frames_per_subject)

    meta = dict(DESCRIPTOR_META)
    meta.update({"generator": "au_like", "seed": seed, "subject_scale": subject_scale})
    return FeatureMatrix(
        features=np.hstack(blocks),
        labels={label: np.concatenate(marks)},
        subjects=np.asarray(subjects, dtype=object),
        meta=meta,
    )
