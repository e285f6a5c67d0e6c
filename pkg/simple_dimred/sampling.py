"""
Subject-wise folds, train/test splits and class-imbalanced downsampling
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .exceptions import DimensionMismatch, NoPositives, SubjectLeakage, TooFewSubjects

logger = logging.getLogger(__name__)

DEFAULT_FOLDS = 5
DEFAULT_KEEP_FRACTION = 0.2
DEFAULT_NEG_PER_POS = 10
DEFAULT_TRAIN_FRACTION = 0.6


@dataclass(frozen=True)
class SampleSelection:
    """Retained sample indices (ascending) plus recorded warnings"""
    indices: np.ndarray
    warnings: Tuple[str, ...] = ()
    positives: int = 0
    negatives: int = 0

    def __len__(self) -> int:
        return int(self.indices.size)


def _subjects(subjects) -> np.ndarray:
    return np.asarray(subjects, dtype=object).ravel()


def _unique_subjects(subjects: np.ndarray) -> np.ndarray:
    return np.array(sorted(set(subjects.tolist()), key=str), dtype=object)


def subject_folds(subjects, folds: int = DEFAULT_FOLDS, seed: int = 0) -> np.ndarray:
    """
    Assign every sample to a fold through its subject.

    Distinct subjects (sorted) are shuffled with the seed and dealt
    round-robin to folds.

    Returns:
        Integer fold id per sample

    Raises:
        TooFewSubjects: If there are fewer distinct subjects than folds
    """
    subjects = _subjects(subjects)
    if folds < 2:
        raise ValueError(f"need at least 2 folds, got {folds}")
    unique = _unique_subjects(subjects)
    if unique.size < folds:
        raise TooFewSubjects(f"{unique.size} distinct subjects for {folds} folds")
    rng = np.random.default_rng(seed)
    shuffled = unique[rng.permutation(unique.size)]
    fold_of = {subject: i % folds for i, subject in enumerate(shuffled.tolist())}
    return np.array([fold_of[s] for s in subjects.tolist()], dtype=np.int64)


def leave_one_subject_out(subjects) -> np.ndarray:
    """One fold per distinct subject, in sorted subject order"""
    subjects = _subjects(subjects)
    unique = _unique_subjects(subjects)
    if unique.size < 2:
        raise TooFewSubjects(f"leave-one-subject-out needs at least 2 subjects, got {unique.size}")
    fold_of = {subject: i for i, subject in enumerate(unique.tolist())}
    return np.array([fold_of[s] for s in subjects.tolist()], dtype=np.int64)


def assert_disjoint(subjects, train_mask, test_mask) -> None:
    """
    Raises:
        SubjectLeakage: If any subject appears on both sides
    """
    subjects = _subjects(subjects)
    train_subjects = set(subjects[np.asarray(train_mask)].tolist())
    shared = train_subjects & set(subjects[np.asarray(test_mask)].tolist())
    if shared:
        raise SubjectLeakage(f"subjects on both sides of a split: {sorted(shared, key=str)}")


def split_subjects(
    subjects,
    train_fraction: float = DEFAULT_TRAIN_FRACTION,
    seed: int = 0,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Seeded train/test split by subject.

    round(train_fraction · #subjects) subjects (at least one on each side)
    go to training.

    Returns:
        Tuple of ascending (train indices, test indices)
    """
    subjects = _subjects(subjects)
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    unique = _unique_subjects(subjects)
    if unique.size < 2:
        raise TooFewSubjects(f"a subject split needs at least 2 subjects, got {unique.size}")
    n_train = min(max(int(round(train_fraction * unique.size)), 1), unique.size - 1)
    rng = np.random.default_rng(seed)
    train_subjects = set(unique[rng.permutation(unique.size)[:n_train]].tolist())
    is_train = np.array([s in train_subjects for s in subjects.tolist()])
    assert_disjoint(subjects, is_train, ~is_train)
    return np.flatnonzero(is_train), np.flatnonzero(~is_train)


def downsample(
    labels,
    subjects,
    keep_fraction: float = DEFAULT_KEEP_FRACTION,
    neg_per_pos: float = DEFAULT_NEG_PER_POS,
    seed: int = 0,
) -> SampleSelection:
    """
    Keep positives within a budget, then seeded negatives at a fixed ratio.

    Positives are kept up to floor(keep_fraction · n) (a seeded subset when
    over budget, at least one); negatives are drawn uniformly without
    replacement to reach neg_per_pos per positive, truncated with a warning
    when there are too few.

    Args:
        labels: Binary labels (> 0 is positive)
        subjects: Per-sample subject ids
        keep_fraction: Budget for positives as a fraction of all samples
        neg_per_pos: Negatives per positive
        seed: Random seed

    Returns:
        SampleSelection with ascending indices

    Raises:
        NoPositives: If no positive is present
    """
    positive = np.asarray(labels).ravel() > 0
    subjects = _subjects(subjects)
    if subjects.size != positive.size:
        raise DimensionMismatch(f"{positive.size} labels but {subjects.size} subject ids")
    if not 0 < keep_fraction <= 1:
        raise ValueError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    if neg_per_pos < 0:
        raise ValueError(f"neg_per_pos must be >= 0, got {neg_per_pos}")
    pos_idx = np.flatnonzero(positive)
    neg_idx = np.flatnonzero(~positive)
    if pos_idx.size == 0:
        raise NoPositives("downsampling needs at least one positive sample")

    rng = np.random.default_rng(seed)
    warnings = []
    budget = max(1, int(math.floor(keep_fraction * positive.size)))
    if pos_idx.size > budget:
        pos_keep = np.sort(rng.choice(pos_idx, size=budget, replace=False))
    else:
        pos_keep = pos_idx
    wanted = int(round(neg_per_pos * pos_keep.size))
    if wanted > neg_idx.size:
        message = f"only {neg_idx.size} negatives available for {wanted} requested; keeping all"
        logger.warning(f"downsample: {message}")
        warnings.append(message)
        neg_keep = neg_idx
    else:
        neg_keep = np.sort(rng.choice(neg_idx, size=wanted, replace=False))
    indices = np.sort(np.concatenate([pos_keep, neg_keep]))
    logger.debug(f"downsample: kept {pos_keep.size} positives and {neg_keep.size} negatives")
    return SampleSelection(
        indices=indices,
        warnings=tuple(warnings),
        positives=int(pos_keep.size),
        negatives=int(neg_keep.size),
    )
