"""
Tests for feature matrices, CSV ingestion and synthetic generators
"""

import numpy as np
import pytest

from simple_dimred.datasets import (
    FeatureMatrix,
    as_features,
    gen_au_like,
    gen_clusters,
    gen_swiss_roll,
    load_csv,
    save_csv,
)
from simple_dimred.exceptions import DimensionMismatch, NonFinite, ParseError, SchemaMismatch


class TestFeatureMatrix:
    """Test FeatureMatrix validation and helpers"""

    def test_defaults(self):
        """Missing subjects default to a single subject"""
        fm = FeatureMatrix(np.ones((2, 3)))
        assert (fm.d, fm.n) == (2, 3)
        assert list(fm.subjects) == ["s0", "s0", "s0"]

    def test_rejects_non_finite(self):
        """NaN features are rejected"""
        with pytest.raises(NonFinite):
            FeatureMatrix(np.array([[1.0, np.nan]]))

    def test_label_shape(self):
        """Labels must have one entry per column"""
        with pytest.raises(DimensionMismatch):
            FeatureMatrix(np.ones((2, 3)), labels={"12": [0, 1]})

    def test_unknown_label(self, clusters):
        """Asking for a missing label names the available ones"""
        with pytest.raises(KeyError, match="class"):
            clusters.label("12")

    def test_select(self, clusters):
        """select keeps columns, labels and subjects aligned"""
        sub = clusters.select([5, 0, 7])
        np.testing.assert_array_equal(sub.features, clusters.features[:, [5, 0, 7]])
        np.testing.assert_array_equal(sub.label("class"), clusters.label("class")[[5, 0, 7]])
        assert list(sub.subjects) == list(clusters.subjects[[5, 0, 7]])

    def test_as_features(self, clusters):
        """Vectors become 1×n rows; FeatureMatrix unwraps"""
        assert as_features([1.0, 2.0]).shape == (1, 2)
        assert as_features(clusters) is clusters.features


class TestCsv:
    """Test load_csv and save_csv"""

    def test_round_trip_bit_identical(self, tmp_path, rng):
        """Saving then loading reproduces every float exactly"""
        fm = FeatureMatrix(
            rng.standard_normal((4, 25)) * 1e3,
            labels={"12": rng.integers(0, 2, 25)},
            subjects=np.array([f"p{i % 3}" for i in range(25)], dtype=object),
        )
        loaded = load_csv(save_csv(fm, tmp_path / "fm.csv"))
        np.testing.assert_array_equal(loaded.features, fm.features)
        np.testing.assert_array_equal(loaded.label("12"), fm.label("12"))
        assert list(loaded.subjects) == list(fm.subjects)

    def test_two_rows_three_features(self, tmp_path):
        """A 2-row file with d=3 gives a 3×2 matrix; the au_ prefix is stripped"""
        path = tmp_path / "small.csv"
        path.write_text("f0,f1,f2,au_12,subject\n1,2,3,0,a\n4,5,6,1,b\n")
        fm = load_csv(path)
        assert fm.features.shape == (3, 2)
        np.testing.assert_array_equal(fm.features[:, 1], [4.0, 5.0, 6.0])
        assert list(fm.labels) == ["12"]
        np.testing.assert_array_equal(fm.label("12"), [0, 1])

    def test_feature_columns_ordered_by_index(self, tmp_path):
        """f10 sorts after f2"""
        path = tmp_path / "order.csv"
        path.write_text("f10,f2,subject\n1,2,a\n")
        np.testing.assert_array_equal(load_csv(path).features[:, 0], [2.0, 1.0])

    def test_missing_subject_column(self, tmp_path):
        """No subject column raises SchemaMismatch"""
        path = tmp_path / "nosubj.csv"
        path.write_text("f0,f1\n1,2\n")
        with pytest.raises(SchemaMismatch):
            load_csv(path)

    def test_non_numeric_reports_line(self, tmp_path):
        """A bad value raises ParseError carrying its 1-based file line"""
        path = tmp_path / "bad.csv"
        path.write_text("f0,f1,subject\n1,2,a\n3,oops,b\n")
        with pytest.raises(ParseError) as info:
            load_csv(path)
        assert info.value.line == 3

    def test_non_binary_label(self, tmp_path):
        """AU marks must be 0 or 1"""
        path = tmp_path / "label.csv"
        path.write_text("f0,au_4,subject\n1,2,a\n")
        with pytest.raises(ParseError):
            load_csv(path)


class TestGenerators:
    """Test the synthetic generators"""

    def test_clusters_deterministic(self):
        """Same seed, same data"""
        a = gen_clusters(d=4, n=50, seed=8)
        b = gen_clusters(d=4, n=50, seed=8)
        np.testing.assert_array_equal(a.features, b.features)

    def test_clusters_layout(self):
        """Classes and subjects are dealt round-robin"""
        fm = gen_clusters(d=3, n=12, classes=3, n_subjects=4)
        np.testing.assert_array_equal(fm.label("class"), np.arange(12) % 3)
        assert len(set(fm.subjects.tolist())) == 4

    def test_clusters_invalid(self):
        """More classes than dimensions is rejected"""
        with pytest.raises(ValueError):
            gen_clusters(d=2, n=10, classes=3)

    def test_swiss_roll_ground_truth(self):
        """Ground truth holds (t, h) with t in [1.5π, 4.5π]"""
        fm = gen_swiss_roll(100, seed=1)
        t, h = fm.ground_truth
        assert fm.features.shape == (3, 100)
        assert np.all((t >= 1.5 * np.pi) & (t <= 4.5 * np.pi))
        np.testing.assert_allclose(fm.features[0], t * np.cos(t))
        np.testing.assert_allclose(fm.features[1], h)

    def test_au_like_shape(self):
        """Subjects × frames columns, one sparse binary label"""
        fm = gen_au_like(n_subjects=4, frames_per_subject=100, d=20, pos_rate=0.1, seed=5)
        y = fm.label("12")
        assert fm.features.shape == (20, 400)
        assert set(np.unique(y).tolist()) <= {0, 1}
        assert 0 < y.sum() < 200
        assert len(set(fm.subjects.tolist())) == 4
        assert "gabor_bank" in fm.meta

    def test_au_like_deterministic(self):
        """Same seed, same data and labels"""
        a = gen_au_like(n_subjects=3, frames_per_subject=50, d=10, seed=2)
        b = gen_au_like(n_subjects=3, frames_per_subject=50, d=10, seed=2)
        np.testing.assert_array_equal(a.features, b.features)
        np.testing.assert_array_equal(a.label("12"), b.label("12"))

    def test_au_like_invalid_rate(self):
        """pos_rate must lie in (0, 0.5)"""
        with pytest.raises(ValueError):
            gen_au_like(pos_rate=0.6)
