"""
Tests for kernels, Gram matrices and centring
"""

import numpy as np
import pytest
from scipy.spatial.distance import pdist

from simple_dimred.exceptions import DimensionMismatch
from simple_dimred.kernels import (
    KernelSpec,
    center_cross_kernel,
    center_gram,
    cross_kernel,
    gram_matrix,
    median_sigma,
)


class TestKernelSpec:
    """Test KernelSpec validation and serialisation"""

    def test_defaults(self):
        """Default is rbf with an unset bandwidth"""
        spec = KernelSpec()
        assert spec.kind == "rbf"
        assert spec.sigma is None

    def test_invalid_kind(self):
        """Unknown kinds are rejected"""
        with pytest.raises(ValueError, match="Unknown kernel kind"):
            KernelSpec(kind="sigmoid")

    def test_invalid_sigma(self):
        """Non-positive bandwidth is rejected"""
        with pytest.raises(ValueError):
            KernelSpec(kind="rbf", sigma=0.0)

    def test_dict_round_trip(self):
        """to_dict/from_dict preserve every field"""
        spec = KernelSpec(kind="polynomial", degree=3, offset=0.5)
        assert KernelSpec.from_dict(spec.to_dict()) == spec

    def test_resolve_fills_sigma(self, rng):
        """resolve() sets the median heuristic"""
        x = rng.standard_normal((3, 40))
        resolved = KernelSpec().resolve(x)
        assert resolved.sigma == pytest.approx(float(np.median(pdist(x.T))))

    def test_median_sigma_degenerate(self):
        """Identical columns fall back to 1.0"""
        assert median_sigma(np.ones((2, 5))) == 1.0


class TestGram:
    """Test Gram and cross-kernel evaluation"""

    def test_rbf_pairwise(self, rng):
        """rbf entries match the closed form"""
        x = rng.standard_normal((3, 7))
        k = gram_matrix(x, KernelSpec(sigma=1.5))
        i, j = 2, 5
        expected = np.exp(-np.sum((x[:, i] - x[:, j]) ** 2) / (2 * 1.5 ** 2))
        assert k[i, j] == pytest.approx(expected, abs=1e-12)
        np.testing.assert_allclose(np.diag(k), 1.0)

    def test_polynomial_elementwise(self, rng):
        """Polynomial kernel equals (xᵀy + c)^degree"""
        x = rng.standard_normal((4, 6))
        k = gram_matrix(x, KernelSpec(kind="polynomial", degree=2, offset=1.0))
        np.testing.assert_allclose(k, (x.T @ x + 1.0) ** 2, atol=1e-12)

    def test_psd(self, rng):
        """rbf Gram has no significantly negative eigenvalue"""
        x = rng.standard_normal((5, 30))
        k = gram_matrix(x, KernelSpec(sigma=2.0))
        assert np.linalg.eigvalsh(k).min() >= -1e-8 * np.trace(k)

    def test_cross_kernel_shape(self, rng):
        """Cross kernel is n_train × n_query"""
        a = rng.standard_normal((3, 10))
        b = rng.standard_normal((3, 4))
        assert cross_kernel(a, b, KernelSpec(kind="linear")).shape == (10, 4)

    def test_cross_kernel_dimension_mismatch(self, rng):
        """Different feature dimensions are rejected"""
        with pytest.raises(DimensionMismatch):
            cross_kernel(
                rng.standard_normal((3, 5)), rng.standard_normal((2, 5)), KernelSpec(kind="linear")
            )


class TestCentering:
    """Test double-centring"""

    def test_formula(self, rng):
        """Matches K − 1K/n − K1/n + 1K1/n²"""
        x = rng.standard_normal((4, 9))
        k = x.T @ x
        n = k.shape[0]
        ones = np.ones((n, n)) / n
        expected = k - ones @ k - k @ ones + ones @ k @ ones
        np.testing.assert_allclose(center_gram(k), expected, atol=1e-10)

    def test_rows_sum_to_zero(self, rng):
        """Every row and column of the centred Gram sums to zero"""
        k = gram_matrix(rng.standard_normal((3, 12)), KernelSpec(sigma=1.0))
        centered = center_gram(k)
        np.testing.assert_allclose(centered.sum(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(centered.sum(axis=1), 0.0, atol=1e-12)

    def test_cross_centering_consistent(self, rng):
        """Centring the training columns as queries reproduces center_gram"""
        x = rng.standard_normal((3, 15))
        spec = KernelSpec(sigma=1.2)
        k = gram_matrix(x, spec)
        kq = cross_kernel(x, x, spec)
        np.testing.assert_allclose(
            center_cross_kernel(kq, k.mean(axis=1), float(k.mean())), center_gram(k), atol=1e-12
        )

    def test_not_square(self):
        """Non-square input is rejected"""
        with pytest.raises(DimensionMismatch):
            center_gram(np.ones((2, 3)))
