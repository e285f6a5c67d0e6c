"""
Dense linear-algebra contracts for simple-dimred

Symmetric and generalized symmetric eigendecompositions, thin SVD and ridge
least-squares solves, all with a deterministic sign convention so that fitted
models are reproducible bit for bit.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as sla
from typing_extensions import TypeAlias

from .exceptions import DimensionMismatch, NonFinite, NonSymmetric, NotPositiveDefinite, Singular

logger = logging.getLogger(__name__)

Matrix: TypeAlias = np.ndarray

SYMMETRY_TOL = 1e-10
# Ridge ladder, in units of trace(b) / dim
RIDGE_LADDER: Tuple[float, ...] = (0.0, 1e-10, 1e-8, 1e-6)
# Cholesky pivots below this (squared, relative to the largest) count as failure
_PIVOT_RATIO = 1e-12


@dataclass(frozen=True)
class EigResult:
    """
    Eigenpairs of a (generalized) symmetric problem.

    Attributes:
        values: Eigenvalues, descending unless produced by sym_eig_smallest
        vectors: One eigenvector per column
        ridge: Absolute ridge added to the right-hand matrix (gen_eig only)
    """
    values: np.ndarray
    vectors: Matrix
    ridge: float = 0.0

    def top(self, k: int) -> "EigResult":
        """Return the first k pairs"""
        return EigResult(self.values[:k].copy(), self.vectors[:, :k].copy(), self.ridge)


def as_matrix(m, name: str = "matrix") -> Matrix:
    """Coerce to a finite 2-D float64 array"""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise DimensionMismatch(f"{name} must be a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFinite(f"{name} contains NaN or infinite entries")
    return arr


def _check_symmetric(m: Matrix, name: str) -> Matrix:
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {m.shape}")
    scale = np.linalg.norm(m)
    if scale > 0 and np.linalg.norm(m - m.T) > SYMMETRY_TOL * scale:
        raise NonSymmetric(f"{name} is not symmetric to relative tolerance {SYMMETRY_TOL}")
    return 0.5 * (m + m.T)


def symmetrize(m: Matrix) -> Matrix:
    """Return (m + mᵀ) / 2"""
    return 0.5 * (m + m.T)


def fix_signs(vectors: Matrix) -> Matrix:
    """
    Flip columns so that each column's largest-magnitude entry is positive.

    Ties are broken by the lowest row index (argmax returns the first hit).
    """
    if vectors.size == 0:
        return vectors
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def sym_eig(m) -> EigResult:
    """
    Full eigendecomposition of a symmetric matrix.

    Args:
        m: Symmetric square matrix

    Returns:
        EigResult with values sorted descending and orthonormal vectors

    Raises:
        NonSymmetric: If m violates the symmetry tolerance
        NonFinite: On NaN/Inf entries
    """
    m = _check_symmetric(as_matrix(m), "m")
    values, vectors = sla.eigh(m)
    values = values[::-1].copy()
    vectors = fix_signs(vectors[:, ::-1])
    return EigResult(values, np.ascontiguousarray(vectors))


def sym_eig_smallest(m, k: int, skip: int = 0) -> EigResult:
    """
    Smallest eigenpairs of a symmetric matrix, ascending.

    Args:
        m: Symmetric square matrix
        k: Number of pairs to return
        skip: Number of smallest pairs to discard first

    Returns:
        EigResult with values sorted ascending
    """
    m = _check_symmetric(as_matrix(m), "m")
    n = m.shape[0]
    if k < 1 or skip < 0 or skip + k > n:
        raise DimensionMismatch(f"cannot take {k} eigenpairs after skipping {skip} of {n}")
    values, vectors = sla.eigh(m, subset_by_index=[skip, skip + k - 1])
    return EigResult(values.copy(), np.ascontiguousarray(fix_signs(vectors)))


def cholesky_ladder(b, ladder: Sequence[float] = RIDGE_LADDER) -> Tuple[Matrix, float]:
    """
    Cholesky-factorise b, escalating a ridge until the factorisation succeeds.

    The ridge climbs through ladder · trace(b) / dim. A factorisation whose
    smallest pivot is negligible against the largest counts as a failure.

    Args:
        b: Symmetric positive (semi)definite matrix
        ladder: Relative ridge values tried in order

    Returns:
        Tuple of (lower Cholesky factor, absolute ridge used)

    Raises:
        NotPositiveDefinite: If every rung fails
    """
    b = _check_symmetric(as_matrix(b, "b"), "b")
    dim = b.shape[0]
    unit = np.trace(b) / dim
    for rung in ladder:
        ridge = float(rung * unit)
        if rung > 0 and ridge <= 0:
            break
        try:
            factor = sla.cholesky(b + ridge * np.eye(dim), lower=True)
        except sla.LinAlgError:
            continue
        pivots = np.diag(factor) ** 2
        if pivots.min() <= _PIVOT_RATIO * pivots.max():
            continue
        if ridge > 0:
            logger.debug(f"Cholesky needed ridge {ridge:.3e} (rung {rung:g})")
        return factor, ridge
    raise NotPositiveDefinite(
        f"matrix is not positive definite even with ridge {ladder[-1]:g}·trace/dim"
    )


def gen_eig(a, b, ladder: Sequence[float] = RIDGE_LADDER) -> EigResult:
    """
    Solve a·v = λ·b·v for symmetric a and symmetric positive-definite b.

    Uses Cholesky whitening of b (with the ridge ladder) and a symmetric
    eigendecomposition of L⁻¹ a L⁻ᵀ.

    Args:
        a: Symmetric matrix
        b: Symmetric positive-definite matrix
        ladder: Relative ridge values tried on b

    Returns:
        EigResult with descending values and b-orthonormal vectors; `ridge`
        holds the absolute ridge that was added to b

    Raises:
        DimensionMismatch: If a and b differ in shape
        NotPositiveDefinite: If b cannot be factorised
    """
    a = _check_symmetric(as_matrix(a, "a"), "a")
    b = as_matrix(b, "b")
    if a.shape != b.shape:
        raise DimensionMismatch(f"a {a.shape} and b {b.shape} must have the same shape")
    factor, ridge = cholesky_ladder(b, ladder)
    half = sla.solve_triangular(factor, a, lower=True)
    whitened = sla.solve_triangular(factor, half.T, lower=True)
    values, vectors = sla.eigh(symmetrize(whitened))
    values = values[::-1].copy()
    vectors = sla.solve_triangular(factor.T, vectors[:, ::-1], lower=False)
    return EigResult(values, np.ascontiguousarray(fix_signs(vectors)), ridge)


def thin_svd(m, k: int) -> Tuple[Matrix, np.ndarray, Matrix]:
    """
    Rank-k thin singular value decomposition.

    Args:
        m: Matrix (rows × cols)
        k: Number of singular triplets, k ≤ min(rows, cols)

    Returns:
        Tuple (U, s, V) with U rows×k, s descending, V cols×k

    Raises:
        DimensionMismatch: If k is out of range
    """
    m = as_matrix(m)
    if k < 1 or k > min(m.shape):
        raise DimensionMismatch(f"rank {k} out of range for shape {m.shape}")
    u, s, vt = sla.svd(m, full_matrices=False, lapack_driver="gesdd")
    u, s, v = u[:, :k], s[:k].copy(), vt[:k].T
    pivots = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[pivots, np.arange(k)])
    signs[signs == 0] = 1.0
    return np.ascontiguousarray(u * signs), s, np.ascontiguousarray(v * signs)


def ridge_solve(a, b, lam: float = 0.0) -> Matrix:
    """
    Minimise ‖a·X − b‖²_F + lam·‖X‖²_F.

    Args:
        a: Design matrix (m × p)
        b: Right-hand side (m × q)
        lam: Non-negative ridge

    Returns:
        X of shape p × q

    Raises:
        Singular: If aᵀa + lam·I is not invertible
    """
    a = as_matrix(a, "a")
    b = as_matrix(b, "b")
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"a has {a.shape[0]} rows but b has {b.shape[0]}")
    if lam < 0:
        raise ValueError(f"lambda must be >= 0, got {lam}")
    normal = a.T @ a
    if lam > 0:
        normal = normal + lam * np.eye(normal.shape[0])
    try:
        factor = sla.cho_factor(normal, lower=True)
    except sla.LinAlgError as e:
        raise Singular(f"normal matrix not invertible at lambda={lam}: {e}") from e
    pivots = np.diag(factor[0]) ** 2
    if pivots.min() <= _PIVOT_RATIO * pivots.max():
        raise Singular(f"normal matrix numerically singular at lambda={lam}")
    return sla.cho_solve(factor, a.T @ b)


def principal_angles(a, b) -> np.ndarray:
    """Canonical angles (radians, descending) between the column spaces of a and b"""
    return sla.subspace_angles(as_matrix(a, "a"), as_matrix(b, "b"))


def psd_sqrt(m) -> Matrix:
    """Symmetric square root of the positive part of a symmetric matrix"""
    m = _check_symmetric(as_matrix(m), "m")
    values, vectors = sla.eigh(m)
    root = np.sqrt(np.clip(values, 0.0, None))
    return symmetrize((vectors * root) @ vectors.T)


def orthonormal_basis(m, tol: Optional[float] = None) -> Matrix:
    """Orthonormal basis for the column space of m"""
    return sla.orth(as_matrix(m), rcond=tol)
