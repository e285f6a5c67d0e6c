"""
Tests for the weighted reduced-rank regression solver
"""

import numpy as np
import pytest

from simple_dimred.exceptions import DimensionMismatch, SingleClass
from simple_dimred.graphs import lle_weights
from simple_dimred.kernels import KernelSpec
from simple_dimred.methods import WkrrrProblem, build_problem, objective, wkrrr_solve
from simple_dimred.methods.manifold import default_lpp_graph
from simple_dimred.methods.wkrrr import class_indicator


def _weighted_optimum(problem: WkrrrProblem) -> float:
    """Best rank-k objective for an identity-input problem via truncated SVD"""
    s = np.linalg.svd(problem.weighted_target(), compute_uv=False)
    return float(np.sum(s[problem.k:] ** 2))


class TestProblem:
    """Test WkrrrProblem validation"""

    def test_rank_bounds(self, rng):
        """k above min(d_d, d_x, n) is infeasible"""
        with pytest.raises(DimensionMismatch):
            WkrrrProblem(rng.standard_normal((3, 10)), np.eye(10), np.eye(3), np.eye(10), k=4)

    def test_column_mismatch(self, rng):
        """Γ and Υ must have the same number of columns"""
        with pytest.raises(DimensionMismatch):
            WkrrrProblem(rng.standard_normal((3, 10)), np.eye(9), np.eye(3), np.eye(10), k=1)

    def test_unknown_method(self, rng):
        """build_problem rejects unknown tags"""
        with pytest.raises(ValueError, match="Unknown method"):
            build_problem("ica", rng.standard_normal((3, 10)), 1)

    def test_indicator_needs_two_classes(self):
        """A single class cannot form an indicator"""
        with pytest.raises(SingleClass):
            class_indicator(np.zeros(5))


class TestSolve:
    """Test wkrrr_solve convergence on each instantiation"""

    def test_pca_matches_svd_optimum(self, rng):
        """Final objective equals the rank-2 SVD optimum"""
        x = rng.standard_normal((8, 20))
        problem = build_problem("pca", x, 2)
        result = wkrrr_solve(problem)
        assert result.objective == pytest.approx(_weighted_optimum(problem), rel=1e-6, abs=1e-9)

    def test_full_rank_reconstructs(self, rng):
        """k = d drives the PCA objective to zero"""
        x = rng.standard_normal((4, 30))
        result = wkrrr_solve(build_problem("pca", x, 4))
        assert result.objective < 1e-10

    @pytest.mark.parametrize("method", ["pca", "kpca", "lle", "lpp", "lda"])
    def test_objective_monotone(self, rng, method):
        """The objective never increases across sweeps"""
        x = rng.standard_normal((4, 40))
        labels = (x[0] > 0).astype(int)
        kwargs = {}
        if method == "kpca":
            kwargs["kernel"] = KernelSpec(sigma=2.0)
        if method == "lle":
            kwargs["lle"] = lle_weights(x, 6)
        if method == "lpp":
            kwargs["graph"] = default_lpp_graph(x, 6)
        if method == "lda":
            kwargs["labels"] = labels
        k = 1 if method in ("lpp", "lda") else 2
        result = wkrrr_solve(build_problem(method, x, k, **kwargs), tol=1e-12, max_iter=50)
        trace = result.objective_trace
        assert np.all(np.diff(trace) <= 1e-12 * max(1.0, trace[0]))

    def test_ridge_recorded(self, rng):
        """A ridge enters the objective and the result"""
        x = rng.standard_normal((3, 20))
        problem = build_problem("lda", x, 1, labels=(x[0] > 0).astype(int))
        result = wkrrr_solve(problem, ridge=0.5)
        assert result.ridge == 0.5
        assert result.objective == pytest.approx(objective(problem, result.a, result.b, 0.5))

    def test_invalid_tolerance(self, rng):
        """tol must be positive"""
        with pytest.raises(ValueError):
            wkrrr_solve(build_problem("pca", rng.standard_normal((3, 10)), 1), tol=0.0)
