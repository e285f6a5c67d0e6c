"""
Detection metrics for simple-dimred

ROC/AUC, F1 and Cohen's kappa on top of sklearn.metrics, with the
precondition checks (finite scores, both classes present) done up front.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import pandas as pd
from sklearn.metrics import cohen_kappa_score, confusion_matrix, f1_score, roc_auc_score, roc_curve

from .exceptions import DimensionMismatch, SingleClass

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConfusionCounts:
    """Binary confusion matrix"""
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        for name in ("tp", "fp", "tn", "fn"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def precision(self) -> float:
        predicted = self.tp + self.fp
        return self.tp / predicted if predicted else 0.0

    @property
    def recall(self) -> float:
        actual = self.tp + self.fn
        return self.tp / actual if actual else 0.0

    def as_labels(self) -> Tuple[np.ndarray, np.ndarray]:
        """Boolean (actual, predicted) vectors realising these counts"""
        actual = np.repeat([True, False, False, True], [self.tp, self.fp, self.tn, self.fn])
        predicted = np.repeat([True, True, False, False], [self.tp, self.fp, self.tn, self.fn])
        return actual, predicted


@dataclass(frozen=True)
class RocCurve:
    """
    ROC curve from a unique-threshold sweep.

    Attributes:
        fpr: False-positive rates, nondecreasing, from 0 to 1
        tpr: True-positive rates, nondecreasing, from 0 to 1
        thresholds: Score threshold at each point (+inf for the origin)
        auc: Area under the curve
    """
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float

    @property
    def points(self) -> List[Tuple[float, float]]:
        return list(zip(self.fpr.tolist(), self.tpr.tolist()))

    def trapezoid_area(self) -> float:
        """Area of the polyline through the points"""
        return float(np.sum(np.diff(self.fpr) * (self.tpr[1:] + self.tpr[:-1]) / 2.0))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"fpr": self.fpr, "tpr": self.tpr})


def _binary(scores, labels) -> Tuple[np.ndarray, np.ndarray]:
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = np.asarray(labels).ravel()
    if scores.shape != labels.shape:
        raise DimensionMismatch(f"{scores.size} scores but {labels.size} labels")
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores contain NaN or infinite values")
    return scores, labels > 0


def roc_and_auc(scores, labels) -> RocCurve:
    """
    ROC curve and AUC.

    Labels > 0 are positives ({0,1} and {−1,+1} both work). Tied scores form a
    single step, so the area equals the Mann–Whitney statistic with half
    credit for ties. Interior points inside an evenly stepped run are dropped.

    Raises:
        SingleClass: If only one class is present
    """
    scores, positive = _binary(scores, labels)
    n_pos = int(positive.sum())
    if n_pos == 0 or n_pos == positive.size:
        raise SingleClass("ROC needs both positive and negative samples")

    fpr, tpr, thresholds = roc_curve(positive, scores, drop_intermediate=True)
    thresholds = np.asarray(thresholds, dtype=np.float64).copy()
    # older scikit-learn puts max(score) + 1 at the origin
    thresholds[0] = np.inf
    return RocCurve(
        fpr=np.asarray(fpr, dtype=np.float64),
        tpr=np.asarray(tpr, dtype=np.float64),
        thresholds=thresholds,
        auc=float(roc_auc_score(positive, scores)),
    )


def confusion_counts(predictions, labels) -> ConfusionCounts:
    """Confusion counts of boolean (or >0) predictions against binary labels"""
    predicted = np.asarray(predictions).ravel() > 0
    actual = np.asarray(labels).ravel() > 0
    if predicted.shape != actual.shape:
        raise DimensionMismatch(f"{predicted.size} predictions but {actual.size} labels")
    if actual.size == 0:
        return ConfusionCounts()
    tn, fp, fn, tp = confusion_matrix(actual, predicted, labels=[False, True]).ravel()
    return ConfusionCounts(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn))


def f1(c: ConfusionCounts) -> float:
    """2·precision·recall/(precision + recall); 0 when there are no true positives"""
    if c.tp == 0:
        return 0.0
    actual, predicted = c.as_labels()
    return float(f1_score(actual, predicted, zero_division=0))


def cohens_kappa(c: ConfusionCounts) -> float:
    """
    Chance-corrected agreement (p_o − p_e)/(1 − p_e); 0 when p_e = 1.

    Raises:
        ValueError: If the counts are empty
    """
    total = c.total
    if total == 0:
        raise ValueError("kappa needs at least one sample")
    chance = (c.tp + c.fp) * (c.tp + c.fn) + (c.fn + c.tn) * (c.fp + c.tn)
    if chance == total * total:
        return 0.0
    actual, predicted = c.as_labels()
    return float(cohen_kappa_score(actual, predicted, labels=[False, True]))


def f1_at(scores, labels, threshold: float = 0.0) -> float:
    """F1 of the rule score ≥ threshold"""
    scores, positive = _binary(scores, labels)
    return f1(confusion_counts(scores >= threshold, positive))


def best_f1_threshold(scores, labels) -> Tuple[float, float]:
    """
    Threshold maximising F1 for the rule score ≥ threshold.

    Candidates are the distinct scores; ties prefer the higher threshold. The
    returned threshold is the midpoint between the chosen score and the next
    lower distinct score.

    Returns:
        Tuple (threshold, f1 at that threshold)
    """
    scores, positive = _binary(scores, labels)
    if not positive.any():
        raise SingleClass("F1 threshold needs at least one positive sample")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = positive[order]
    ends = np.flatnonzero(np.r_[sorted_scores[1:] != sorted_scores[:-1], True])
    tp = np.cumsum(sorted_pos)[ends]
    predicted = ends + 1
    # F1 = 2tp/(predicted + n_pos); argmax takes the first, i.e. highest, tie
    values = 2.0 * tp / (predicted + int(positive.sum()))
    best = int(np.argmax(values))
    chosen = sorted_scores[ends[best]]
    if best + 1 < ends.size:
        threshold = 0.5 * (chosen + sorted_scores[ends[best + 1]])
    else:
        threshold = chosen
    logger.debug(
        f"best_f1_threshold: threshold={float(threshold):.6g}, f1={float(values[best]):.4f}"
    )
    return float(threshold), float(values[best])
