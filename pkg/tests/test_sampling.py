"""
Tests for subject-wise folds, splits and downsampling
"""

import numpy as np
import pytest

from simple_dimred.exceptions import DimensionMismatch, NoPositives, SubjectLeakage, TooFewSubjects
from simple_dimred.sampling import (
    assert_disjoint,
    downsample,
    leave_one_subject_out,
    split_subjects,
    subject_folds,
)


def _subjects(count, per_subject):
    return np.repeat([f"s{i:02d}" for i in range(count)], per_subject)


class TestFolds:
    """Test subject_folds and leave_one_subject_out"""

    def test_two_subjects_per_fold(self):
        """10 subjects into 5 folds gives 2 subjects per fold"""
        subjects = _subjects(10, 4)
        folds = subject_folds(subjects, 5, seed=1)
        for fold in range(5):
            assert len(set(subjects[folds == fold].tolist())) == 2

    def test_subject_never_spans_folds(self, rng):
        """Every sample of a subject shares one fold"""
        subjects = rng.choice([f"p{i}" for i in range(12)], size=200)
        folds = subject_folds(subjects, 4, seed=9)
        for subject in set(subjects.tolist()):
            assert np.unique(folds[subjects == subject]).size == 1

    def test_deterministic(self):
        """Same seed, same assignment"""
        subjects = _subjects(8, 3)
        first = subject_folds(subjects, 4, seed=3)
        np.testing.assert_array_equal(first, subject_folds(subjects, 4, seed=3))

    def test_too_few_subjects(self):
        """Fewer subjects than folds raises TooFewSubjects"""
        with pytest.raises(TooFewSubjects):
            subject_folds(_subjects(3, 2), 5)

    def test_folds_equal_subjects_is_loso(self):
        """As many folds as subjects puts one subject in each fold"""
        subjects = _subjects(6, 2)
        folds = subject_folds(subjects, 6, seed=0)
        assert all(len(set(subjects[folds == f].tolist())) == 1 for f in range(6))

    def test_leave_one_subject_out(self):
        """One fold per subject in sorted order"""
        folds = leave_one_subject_out(np.array(["b", "a", "b", "c"], dtype=object))
        np.testing.assert_array_equal(folds, [1, 0, 1, 2])


class TestSplit:
    """Test split_subjects and assert_disjoint"""

    def test_split_disjoint(self):
        """Train and test subjects never overlap; 60% of subjects train"""
        subjects = _subjects(10, 5)
        train, test = split_subjects(subjects, 0.6, seed=2)
        assert set(subjects[train].tolist()).isdisjoint(subjects[test].tolist())
        assert len(set(subjects[train].tolist())) == 6
        assert train.size + test.size == subjects.size

    def test_split_keeps_both_sides(self):
        """Extreme fractions still leave one subject per side"""
        train, test = split_subjects(_subjects(3, 2), 0.01, seed=0)
        assert train.size > 0 and test.size > 0

    def test_invalid_fraction(self):
        """train_fraction must be strictly between 0 and 1"""
        with pytest.raises(ValueError):
            split_subjects(_subjects(4, 2), 1.0)

    def test_leakage_detected(self):
        """A shared subject raises SubjectLeakage"""
        subjects = np.array(["a", "a", "b"], dtype=object)
        with pytest.raises(SubjectLeakage):
            assert_disjoint(subjects, np.array([True, False, False]), np.array([False, True, True]))


class TestDownsample:
    """Test downsample"""

    def test_one_to_ten(self):
        """100 positives and 5000 negatives keep 100 + 1000"""
        labels = np.zeros(5100, dtype=int)
        labels[::51] = 1
        selection = downsample(
            labels, _subjects(51, 100), keep_fraction=0.2, neg_per_pos=10, seed=0
        )
        assert selection.positives == 100
        assert selection.negatives == 1000
        assert len(selection) == 1100
        assert labels[selection.indices].sum() == 100
        assert not selection.warnings

    def test_truncation_warning(self):
        """Too few negatives keeps them all with a warning"""
        labels = np.r_[np.ones(10, dtype=int), np.zeros(50, dtype=int)]
        selection = downsample(labels, _subjects(6, 10), keep_fraction=1.0, neg_per_pos=10, seed=0)
        assert selection.negatives == 50
        assert len(selection.warnings) == 1

    def test_positive_budget(self):
        """Positives beyond the budget are subsampled"""
        labels = np.r_[np.ones(50, dtype=int), np.zeros(50, dtype=int)]
        selection = downsample(labels, _subjects(10, 10), keep_fraction=0.2, neg_per_pos=1, seed=0)
        assert selection.positives == 20
        assert selection.negatives == 20

    def test_deterministic(self):
        """Same seed, same indices; indices ascending"""
        labels = (np.arange(500) % 17 == 0).astype(int)
        subjects = _subjects(10, 50)
        a = downsample(labels, subjects, seed=11)
        b = downsample(labels, subjects, seed=11)
        np.testing.assert_array_equal(a.indices, b.indices)
        assert np.all(np.diff(a.indices) > 0)

    def test_no_positives(self):
        """All-negative labels raise NoPositives"""
        with pytest.raises(NoPositives):
            downsample(np.zeros(10), _subjects(2, 5))

    def test_length_mismatch(self):
        """Labels and subjects must align"""
        with pytest.raises(DimensionMismatch):
            downsample(np.ones(4), _subjects(1, 3))
