"""
Tests for ROC/AUC, F1 and Cohen's kappa
"""

import numpy as np
import pytest

from simple_dimred.exceptions import SingleClass
from simple_dimred.metrics import (
    ConfusionCounts,
    best_f1_threshold,
    cohens_kappa,
    confusion_counts,
    f1,
    f1_at,
    roc_and_auc,
)


def _pairwise_auc(scores, labels):
    pos = scores[labels > 0]
    neg = scores[labels <= 0]
    wins = (pos[:, None] > neg[None, :]).sum() + 0.5 * (pos[:, None] == neg[None, :]).sum()
    return wins / (pos.size * neg.size)


class TestRoc:
    """Test roc_and_auc"""

    def test_perfect_ranking(self):
        """Positives above negatives give AUC 1"""
        assert roc_and_auc([0.9, 0.1], [1, 0]).auc == 1.0

    def test_all_ties(self):
        """Constant scores give AUC 0.5"""
        curve = roc_and_auc(np.zeros(10), np.arange(10) % 2)
        assert curve.auc == 0.5
        assert curve.points == [(0.0, 0.0), (1.0, 1.0)]

    def test_pairwise_oracle(self, rng):
        """AUC equals the Mann-Whitney statistic, ties counted half"""
        scores = np.round(rng.standard_normal(50), 1)
        labels = rng.integers(0, 2, 50)
        expected = _pairwise_auc(scores, labels)
        assert roc_and_auc(scores, labels).auc == pytest.approx(expected, abs=1e-12)

    def test_curve_shape(self, rng):
        """Curve runs from (0,0) to (1,1), monotone, area equals auc"""
        scores = rng.standard_normal(80)
        labels = (scores + rng.standard_normal(80) > 0).astype(int)
        curve = roc_and_auc(scores, labels)
        assert curve.points[0] == (0.0, 0.0)
        assert curve.points[-1] == (1.0, 1.0)
        assert np.all(np.diff(curve.fpr) >= 0) and np.all(np.diff(curve.tpr) >= 0)
        assert curve.trapezoid_area() == pytest.approx(curve.auc, abs=1e-12)

    def test_monotone_transform_invariance(self, rng):
        """Strictly increasing transforms leave AUC unchanged"""
        scores = rng.standard_normal(40)
        labels = np.arange(40) % 2
        assert roc_and_auc(np.exp(3 * scores), labels).auc == roc_and_auc(scores, labels).auc

    def test_signed_labels(self):
        """{−1, +1} labels work like {0, 1}"""
        assert roc_and_auc([0.2, 0.8, 0.4], [-1, 1, -1]).auc == 1.0

    def test_single_class(self):
        """One class only raises SingleClass"""
        with pytest.raises(SingleClass):
            roc_and_auc([0.1, 0.2], [1, 1])


class TestCounts:
    """Test F1 and kappa on confusion counts"""

    def test_f1_hand_computed(self):
        """tp=8, fp=2, fn=4 gives 8/11"""
        assert f1(ConfusionCounts(tp=8, fp=2, fn=4)) == pytest.approx(0.72727, abs=1e-5)
        assert f1(ConfusionCounts(tp=8, fp=2, fn=4)) == pytest.approx(16 / 22, rel=1e-12)

    def test_f1_equal_precision_recall(self):
        """precision = recall = 0.5 gives 0.5"""
        assert f1(ConfusionCounts(tp=1, fp=1, fn=1, tn=5)) == 0.5

    def test_f1_no_true_positives(self):
        """tp = 0 gives 0"""
        assert f1(ConfusionCounts(fp=3, fn=2, tn=4)) == 0.0

    def test_kappa_hand_computed(self):
        """tp=40, fn=10, fp=20, tn=30 gives 0.4"""
        counts = ConfusionCounts(tp=40, fn=10, fp=20, tn=30)
        assert cohens_kappa(counts) == pytest.approx(0.4, abs=1e-12)

    def test_kappa_perfect(self):
        """Perfect agreement gives 1"""
        assert cohens_kappa(ConfusionCounts(tp=5, tn=7)) == 1.0

    def test_kappa_chance(self):
        """Counts equal to the marginal product give 0"""
        assert cohens_kappa(ConfusionCounts(tp=25, fp=25, fn=25, tn=25)) == 0.0

    def test_kappa_degenerate(self):
        """p_e = 1 gives 0"""
        assert cohens_kappa(ConfusionCounts(tn=10)) == 0.0

    def test_kappa_empty(self):
        """Empty counts are rejected"""
        with pytest.raises(ValueError):
            cohens_kappa(ConfusionCounts())

    def test_negative_counts(self):
        """Counts must be nonnegative integers"""
        with pytest.raises(ValueError):
            ConfusionCounts(tp=-1)

    def test_confusion_counts(self):
        """Predictions and labels are tallied"""
        counts = confusion_counts([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
        assert (counts.tp, counts.fp, counts.tn, counts.fn) == (2, 1, 1, 1)
        assert counts.precision == pytest.approx(2 / 3)
        assert counts.recall == pytest.approx(2 / 3)


class TestThreshold:
    """Test F1 operating-point selection"""

    def test_best_threshold_separable(self):
        """Separable scores get a threshold between the classes and F1 = 1"""
        threshold, value = best_f1_threshold([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1])
        assert value == 1.0
        assert threshold == pytest.approx(0.5)
        assert f1_at([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1], threshold) == 1.0

    def test_best_threshold_is_optimal(self, rng):
        """No candidate threshold beats the returned one"""
        scores = rng.standard_normal(60)
        labels = (scores + rng.standard_normal(60) > 0.5).astype(int)
        threshold, value = best_f1_threshold(scores, labels)
        assert f1_at(scores, labels, threshold) == pytest.approx(value)
        assert all(f1_at(scores, labels, t) <= value + 1e-12 for t in scores)

    def test_needs_positives(self):
        """No positives raises SingleClass"""
        with pytest.raises(SingleClass):
            best_f1_threshold([0.1, 0.2], [0, 0])


class TestSklearnAgreement:
    """Test the metrics against their closed forms"""

    def test_roc_thresholds_start_at_infinity(self, rng):
        """The origin sits at +inf and thresholds then descend"""
        scores = rng.standard_normal(30)
        curve = roc_and_auc(scores, np.arange(30) % 3 == 0)
        assert curve.thresholds[0] == np.inf
        assert np.all(np.diff(curve.thresholds[1:]) < 0)

    def test_counts_formulas(self, rng):
        """F1 and kappa match the count formulas on random tables"""
        for tp, fp, tn, fn in rng.integers(1, 30, size=(20, 4)):
            c = ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)
            n = c.total
            p_o = (tp + tn) / n
            p_e = ((tp + fp) * (tp + fn) + (fn + tn) * (fp + tn)) / n ** 2
            assert f1(c) == pytest.approx(2 * tp / (2 * tp + fp + fn), rel=1e-12)
            assert cohens_kappa(c) == pytest.approx((p_o - p_e) / (1 - p_e), abs=1e-12)

    def test_empty_confusion_counts(self):
        """No samples give all-zero counts"""
        assert confusion_counts([], []).total == 0
