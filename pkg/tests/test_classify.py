"""
Tests for the linear SVM and subject-wise tuning
"""

import numpy as np
import pytest

from simple_dimred.classify import (
    TuningGrid,
    cross_validated_scores,
    decision_scores,
    train_svm,
    tune,
)
from simple_dimred.exceptions import DimensionMismatch, SingleClass, TooFewSubjects
from simple_dimred.methods import fit_lda, transform
from simple_dimred.sampling import subject_folds


def _grid_optimum(x, y, c):
    """Brute-force primal optimum over a (w, b) grid, for 1-D inputs"""
    signs = np.where(y > 0, 1.0, -1.0)
    w = np.arange(-3.0, 3.0, 1e-3)
    best = np.inf
    for b in np.arange(-3.0, 3.0, 1e-2):
        hinge = np.maximum(0.0, 1.0 - signs[None, :] * (w[:, None] * x[0][None, :] + b))
        best = min(best, float(np.min(0.5 * w ** 2 + c * hinge.sum(axis=1))))
    return best


@pytest.fixture
def overlapping(rng):
    """Two overlapping 2-D classes, 40 samples"""
    y = np.arange(40) % 2
    x = rng.standard_normal((2, 40))
    x[0] += 1.5 * y
    return x, y


class TestTrainSvm:
    """Test train_svm"""

    def test_two_point_closed_form(self):
        """x = ±1 gives w = 1, b = 0"""
        model = train_svm(np.array([[1.0, -1.0]]), np.array([1, 0]), c=10.0)
        assert model.weights[0] == pytest.approx(1.0, abs=1e-6)
        assert model.bias == pytest.approx(0.0, abs=1e-6)
        scores = decision_scores(model, np.array([[1.0, -1.0]]))
        assert scores == pytest.approx([1.0, -1.0], abs=1e-6)

    def test_tiny_cost(self, clusters):
        """C → 0 shrinks w to nothing"""
        model = train_svm(clusters.features, clusters.label("class"), c=1e-8)
        assert np.linalg.norm(model.weights) < 1e-3

    def test_matches_grid_oracle(self):
        """Six 1-D points: objective within 1e-4 of a fine grid search"""
        x = np.array([[-2.0, -1.0, -0.2, 0.3, 1.0, 2.5]])
        y = np.array([0, 0, 1, 0, 1, 1])
        model = train_svm(x, y, c=1.0, tol=1e-9)
        oracle = _grid_optimum(x, y, 1.0)
        assert model.objective <= oracle + 1e-4 * max(1.0, oracle)

    def test_gap_certificate(self, overlapping):
        """The recorded duality gap bounds the suboptimality"""
        x, y = overlapping
        model = train_svm(x, y, c=1.0)
        assert 0.0 <= model.gap <= 1e-3 * model.objective
        fine = train_svm(x, y, c=1.0, tol=1e-9, max_iter=100000)
        assert fine.objective >= model.objective - model.gap - 1e-9

    def test_column_permutation(self, clusters, rng):
        """Shuffling the samples does not change the solution"""
        x, y = clusters.features, clusters.label("class")
        order = rng.permutation(x.shape[1])
        a = train_svm(x, y, c=1.0)
        b = train_svm(x[:, order], y[order], c=1.0)
        assert a.objective == pytest.approx(b.objective, rel=1e-8)
        query = rng.standard_normal((x.shape[0], 5))
        np.testing.assert_allclose(decision_scores(a, query), decision_scores(b, query), atol=1e-10)

    def test_label_flip(self, overlapping):
        """Swapping the classes negates the decision function"""
        x, y = overlapping
        a = train_svm(x, y, c=1.0)
        b = train_svm(x, 1 - y, c=1.0)
        assert a.objective == pytest.approx(b.objective, rel=1e-3)
        assert np.corrcoef(decision_scores(a, x), decision_scores(b, x))[0, 1] < -0.99

    def test_single_class(self):
        """One class only raises SingleClass"""
        with pytest.raises(SingleClass):
            train_svm(np.ones((2, 4)), np.ones(4))

    def test_invalid_cost(self, clusters):
        """Non-positive cost is rejected"""
        with pytest.raises(ValueError):
            train_svm(clusters.features, clusters.label("class"), c=0.0)

    def test_score_dimension(self, clusters):
        """Scoring with the wrong dimension is rejected"""
        model = train_svm(clusters.features, clusters.label("class"), c=1.0)
        with pytest.raises(DimensionMismatch):
            decision_scores(model, np.ones((2, 3)))

    def test_affine_scores(self, clusters, rng):
        """Scores are wᵀx + b"""
        model = train_svm(clusters.features, clusters.label("class"), c=1.0)
        query = rng.standard_normal((clusters.d, 7))
        expected = model.weights @ query + model.bias
        np.testing.assert_allclose(decision_scores(model, query), expected, atol=1e-12)


class TestTuningGrid:
    """Test TuningGrid"""

    def test_settings_product(self):
        """DR settings are the product over sorted names"""
        grid = TuningGrid(cost_values=(1.0, 10.0), dr_params={"p": (5, 10), "alpha": (0.1,)})
        assert grid.dr_settings() == [{"alpha": 0.1, "p": 5}, {"alpha": 0.1, "p": 10}]
        assert grid.size == 4

    def test_empty_costs(self):
        """An empty cost grid is rejected"""
        with pytest.raises(ValueError):
            TuningGrid(cost_values=())

    def test_negative_cost(self):
        """Non-positive costs are rejected"""
        with pytest.raises(ValueError):
            TuningGrid(cost_values=(1.0, -1.0))


class TestTune:
    """Test subject-wise tuning"""

    def test_single_setting(self, clusters):
        """A one-point grid returns that point"""
        result = tune(clusters.features, clusters.label("class"), clusters.subjects,
                      TuningGrid(cost_values=(1.0,)), folds=5)
        assert result.cost == 1.0
        assert result.params == {}
        assert len(result.table) == 1
        assert result.f1 > 0.9

    def test_argmax_matches_table(self, clusters):
        """The winner is the best table row, ties to the smaller cost"""
        result = tune(clusters.features, clusters.label("class"), clusters.subjects,
                      TuningGrid(cost_values=(0.01, 1.0, 100.0)), folds=3, seed=4)
        best = max(mean for _, _, mean in result.table)
        winners = [cost for _, cost, mean in result.table if mean == best]
        assert result.f1 == best
        assert result.cost == min(winners)

    def test_reducer_params_tuned(self, clusters):
        """DR settings reach the reducer and the best one is returned"""
        seen = []

        def reducer(x, y, params):
            seen.append(params["scale"])
            return lambda data: data * params["scale"]

        grid = TuningGrid(cost_values=(1.0,), dr_params={"scale": (1.0, 0.0)})
        result = tune(clusters.features, clusters.label("class"), clusters.subjects, grid,
                      folds=3, reducer=reducer)
        assert set(seen) == {0.0, 1.0}
        assert result.params == {"scale": 1.0}

    def test_jobs_invariance(self, clusters):
        """Worker count does not change the result"""
        args = (clusters.features, clusters.label("class"), clusters.subjects,
                TuningGrid(cost_values=(0.1, 1.0)))
        serial = tune(*args, folds=3, seed=2, jobs=1)
        parallel = tune(*args, folds=3, seed=2, jobs=4)
        assert serial.table == parallel.table
        assert (serial.cost, serial.params) == (parallel.cost, parallel.params)

    def test_too_few_subjects(self, clusters):
        """More folds than subjects raises TooFewSubjects"""
        with pytest.raises(TooFewSubjects):
            tune(clusters.features, clusters.label("class"), clusters.subjects, folds=20)

    def test_cross_validated_scores(self, clusters):
        """Out-of-fold scores rank the classes almost perfectly"""
        scores = cross_validated_scores(
            clusters.features, clusters.label("class"), clusters.subjects, {}, 1.0, folds=5
        )
        y = clusters.label("class")
        assert scores.shape == (clusters.n,)
        assert np.mean((scores > 0) == (y > 0)) > 0.95

    def test_infeasible_fold_scores_zero(self, clusters, caplog):
        """A fold whose training part has one positive scores 0 and tuning goes on"""
        fold_ids = subject_folds(clusters.subjects, 3, 0)
        y = np.zeros(clusters.n, dtype=np.int64)
        y[np.flatnonzero(fold_ids == 0)[0]] = 1
        y[np.flatnonzero(fold_ids == 1)[0]] = 1

        def reducer(x, labels, params):
            model = fit_lda(x, labels)
            return lambda data: transform(model, data)

        result = tune(clusters.features, y, clusters.subjects, TuningGrid(cost_values=(1.0,)),
                      reducer=reducer, fold_ids=fold_ids)
        assert len(result.table) == 1
        assert 0.0 <= result.f1 <= 1.0
        assert "TooFewSamples" in caplog.text
