"""
Weighted (kernel) reduced-rank regression

Every method in this package is an instance of

    E(A, B) = ‖W_r (Γ − B Aᵀ Υ) W_c‖²_F

solved here by alternating closed-form least-squares updates of A and B.
`build_problem` produces the per-method instantiation.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from ..exceptions import DimensionMismatch, Diverged, SingleClass, TooFewSamples
from ..graphs import AffinityGraph, LleWeights
from ..kernels import KernelSpec, center_gram, gram_matrix
from ..linalg import (
    Matrix,
    as_matrix,
    fix_signs,
    gen_eig,
    orthonormal_basis,
    psd_sqrt,
    ridge_solve,
    sym_eig,
    thin_svd,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
DEFAULT_MAX_ITER = 500
# relative floor below which kernel eigenvalues are treated as zero
KERNEL_RANK_TOL = 1e-10


@dataclass(frozen=True)
class WkrrrProblem:
    """
    One instantiation of the weighted reduced-rank regression objective.

    Attributes:
        gamma: Target matrix Γ (d_d × n)
        upsilon: Input matrix Υ (d_x × n)
        w_r: Feature weighting (d_d × d_d, invertible)
        w_c: Sample weighting (n × n)
        k: Target rank
        method: Tag of the method this problem instantiates
    """
    gamma: Matrix
    upsilon: Matrix
    w_r: Matrix
    w_c: Matrix
    k: int
    method: str = "custom"

    def __post_init__(self):
        gamma = as_matrix(self.gamma, "gamma")
        upsilon = as_matrix(self.upsilon, "upsilon")
        w_r = as_matrix(self.w_r, "w_r")
        w_c = as_matrix(self.w_c, "w_c")
        n = gamma.shape[1]
        if upsilon.shape[1] != n:
            raise DimensionMismatch(f"gamma has {n} columns but upsilon has {upsilon.shape[1]}")
        if w_c.shape != (n, n):
            raise DimensionMismatch(f"w_c must be {n}x{n}, got {w_c.shape}")
        if w_r.shape != (gamma.shape[0], gamma.shape[0]):
            raise DimensionMismatch(
                f"w_r must be {gamma.shape[0]}x{gamma.shape[0]}, got {w_r.shape}"
            )
        if not 1 <= self.k <= min(gamma.shape[0], upsilon.shape[0], n):
            raise DimensionMismatch(
                f"rank {self.k} infeasible for d_d={gamma.shape[0]}, d_x={upsilon.shape[0]}, n={n}"
            )
        for name, value in (("gamma", gamma), ("upsilon", upsilon), ("w_r", w_r), ("w_c", w_c)):
            object.__setattr__(self, name, value)

    @property
    def n(self) -> int:
        return self.gamma.shape[1]

    def weighted_target(self) -> Matrix:
        """T = W_r Γ W_c"""
        return self.w_r @ self.gamma @ self.w_c

    def weighted_input(self) -> Matrix:
        """R = Υ W_c"""
        return self.upsilon @ self.w_c


@dataclass(frozen=True)
class WkrrrResult:
    """Factors and convergence record of wkrrr_solve"""
    a: Matrix
    b: Matrix
    objective_trace: np.ndarray
    iterations: int
    converged: bool
    ridge: float = 0.0

    @property
    def objective(self) -> float:
        return float(self.objective_trace[-1])


def _augment(target: Matrix, inputs: Matrix, ridge: float):
    # ridge·‖W_r B Aᵀ‖² as extra columns: [T, 0] against [R, √ridge·I]
    if ridge <= 0:
        return target, inputs
    dx = inputs.shape[0]
    target = np.hstack([target, np.zeros((target.shape[0], dx))])
    inputs = np.hstack([inputs, np.sqrt(ridge) * np.eye(dx)])
    return target, inputs


def objective(problem: WkrrrProblem, a: Matrix, b: Matrix, ridge: float = 0.0) -> float:
    """E(A, B), plus ridge·‖W_r B Aᵀ‖²_F when ridge > 0"""
    target, inputs = _augment(problem.weighted_target(), problem.weighted_input(), ridge)
    residual = target - (problem.w_r @ b) @ (a.T @ inputs)
    return float(np.sum(residual ** 2))


def a_step(problem: WkrrrProblem, b: Matrix, ridge: float = 0.0) -> Matrix:
    """
    Minimise E over A for fixed B.

    Returns:
        A of shape d_x × k

    Raises:
        Singular: If W_r B or Υ W_c is rank deficient (use ridge for the latter)
    """
    target, inputs = _augment(problem.weighted_target(), problem.weighted_input(), ridge)
    coded = ridge_solve(problem.w_r @ b, target)
    return ridge_solve(inputs.T, coded.T)


def b_step(problem: WkrrrProblem, a: Matrix, ridge: float = 0.0) -> Matrix:
    """
    Minimise E over B for fixed A.

    Returns:
        B of shape d_d × k
    """
    target, inputs = _augment(problem.weighted_target(), problem.weighted_input(), ridge)
    scores = a.T @ inputs
    weighted_b = ridge_solve(scores.T, target.T).T
    return np.linalg.solve(problem.w_r, weighted_b)


def _initial_b(problem: WkrrrProblem, target: Matrix, init_seed: int) -> Matrix:
    u, s, _ = thin_svd(target, problem.k)
    if s[0] > 0:
        return np.linalg.solve(problem.w_r, u)
    logger.debug(f"Weighted target is zero; seeding B from a Gaussian (seed={init_seed})")
    rng = np.random.default_rng(init_seed)
    return rng.standard_normal((problem.gamma.shape[0], problem.k))


def wkrrr_solve(
    problem: WkrrrProblem,
    init_seed: int = 0,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    ridge: float = 0.0,
) -> WkrrrResult:
    """
    Alternating least squares on the weighted reduced-rank objective.

    B starts from the top-k left singular vectors of W_r Γ W_c (a seeded
    Gaussian when that matrix is zero). Each sweep updates B then A in closed
    form; W_r B is re-orthonormalised in between.

    Args:
        problem: Problem instance
        init_seed: Seed for the degenerate-start fallback
        tol: Stop when the relative objective decrease falls below tol
        max_iter: Sweep limit
        ridge: Tikhonov weight on ‖W_r B Aᵀ‖²_F (needed when Υ W_c is rank deficient)

    Returns:
        WkrrrResult with the objective recorded after every sweep

    Raises:
        Diverged: If the objective increases beyond 1e-12 relative slack
        Singular: From the inner least-squares solves
    """
    if tol <= 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    if ridge < 0:
        raise ValueError(f"ridge must be >= 0, got {ridge}")

    target, _ = _augment(problem.weighted_target(), problem.weighted_input(), ridge)
    b = _initial_b(problem, target, init_seed)
    a = a_step(problem, b, ridge)
    trace: List[float] = [objective(problem, a, b, ridge)]
    slack = 1e-12 * max(1.0, trace[0])
    converged = trace[0] == 0.0
    iterations = 0

    while not converged and iterations < max_iter:
        iterations += 1
        b = b_step(problem, a, ridge)
        # same span, better conditioned A-step
        q, _ = np.linalg.qr(problem.w_r @ b)
        b = np.linalg.solve(problem.w_r, q)
        a = a_step(problem, b, ridge)
        value = objective(problem, a, b, ridge)
        previous = trace[-1]
        trace.append(value)
        logger.debug(f"wkrrr[{problem.method}] sweep {iterations}: E={value:.12g}")
        if value > previous + slack:
            raise Diverged(
                f"objective rose from {previous:.12g} to {value:.12g} at sweep {iterations}"
            )
        if value == 0.0 or (previous - value) <= tol * previous:
            converged = True

    if not converged:
        logger.warning(
            f"wkrrr[{problem.method}] stopped after {max_iter} sweeps without converging"
        )
    return WkrrrResult(
        a=a,
        b=b,
        objective_trace=np.asarray(trace),
        iterations=iterations,
        converged=converged,
        ridge=ridge,
    )


# ===== Per-method instantiations =====

def class_indicator(labels) -> np.ndarray:
    """
    n×c 0/1 indicator G over the sorted distinct labels.

    Raises:
        SingleClass: If fewer than two classes are present
    """
    labels = np.asarray(labels)
    classes, codes = np.unique(labels, return_inverse=True)
    if classes.size < 2:
        raise SingleClass(f"need at least two classes, got {classes.tolist()}")
    indicator = np.zeros((labels.size, classes.size))
    indicator[np.arange(labels.size), codes] = 1.0
    return indicator


def kernel_factor(centered_gram: Matrix) -> Matrix:
    """
    Finite feature factor F (r × n) with Fᵀ F equal to the centred Gram.

    Only eigenvalues above KERNEL_RANK_TOL relative to the largest are kept.
    """
    eig = sym_eig(centered_gram)
    top = eig.values[0] if eig.values.size else 0.0
    keep = eig.values > KERNEL_RANK_TOL * max(top, 0.0)
    if not np.any(keep):
        return np.zeros((1, centered_gram.shape[0]))
    return np.sqrt(eig.values[keep])[:, None] * eig.vectors[:, keep].T


def _centered(data: Matrix) -> Matrix:
    return data - data.mean(axis=1, keepdims=True)


def centered_indicator(labels) -> Tuple[Matrix, np.ndarray]:
    """(centred indicator transposed, c×n; raw indicator, n×c)"""
    indicator = class_indicator(labels)
    return (indicator - indicator.mean(axis=0)).T, indicator


def class_weight(indicator: np.ndarray) -> Matrix:
    """(GᵀG)^−½ for an n×c indicator"""
    counts = indicator.sum(axis=0)
    if np.any(counts < 2):
        raise TooFewSamples(
            f"every class needs at least 2 samples, got counts {counts.astype(int).tolist()}"
        )
    return np.diag(1.0 / np.sqrt(counts))


def build_problem(
    method: str,
    data,
    k: int,
    labels=None,
    graph: Optional[AffinityGraph] = None,
    kernel: Optional[KernelSpec] = None,
    lle: Optional[LleWeights] = None,
    between: Optional[AffinityGraph] = None,
    alpha: float = 0.5,
) -> WkrrrProblem:
    """
    Instantiate the weighted reduced-rank objective for one method.

    | method | Γ          | Υ    | W_r          | W_c                      |
    |--------|------------|------|--------------|--------------------------|
    | pca    | D̄          | I_n  | I            | I_n                      |
    | kpca   | F          | I_n  | I            | I_n                      |
    | lpp    | 1ᵀ         | D̄    | 1            | S^½                      |
    | lle    | I_n − W    | I_n  | I            | I_n                      |
    | lda    | Ḡᵀ         | D̄    | (GᵀG)^−½     | I_n                      |
    | kda    | Ḡᵀ         | F    | (GᵀG)^−½     | I_n                      |
    | lsda   | 1ᵀ         | D̄    | 1            | (αL_b + (1−α)W_w)₊^½     |

    D̄ is the mean-centred data, Ḡᵀ the centred class indicator, F the kernel
    factor with FᵀF = centred Gram.

    Args:
        method: Method tag
        data: FeatureMatrix or d×n array
        k: Target rank
        labels: Class ids (lda, kda, lsda)
        graph: Affinity graph (lpp) or within-class graph (lsda)
        kernel: Kernel (kpca, kda)
        lle: Reconstruction weights (lle)
        between: Between-class graph (lsda)
        alpha: LSDA trade-off

    Returns:
        WkrrrProblem
    """
    x = as_matrix(getattr(data, "features", data), "data")
    n = x.shape[1]
    centered = _centered(x)
    identity_n = np.eye(n)

    if method == "pca":
        return WkrrrProblem(centered, identity_n, np.eye(x.shape[0]), identity_n, k, method)
    if method == "kpca":
        factor = kernel_factor(center_gram(gram_matrix(x, (kernel or KernelSpec()).resolve(x))))
        return WkrrrProblem(factor, identity_n, np.eye(factor.shape[0]), identity_n, k, method)
    if method == "lle":
        if lle is None:
            raise ValueError("lle problem needs reconstruction weights")
        gamma = identity_n - lle.weights.toarray()
        return WkrrrProblem(gamma, identity_n, identity_n, identity_n, k, method)
    if method == "lpp":
        if graph is None:
            raise ValueError("lpp problem needs an affinity graph")
        w_c = np.diag(np.sqrt(graph.degree))
        return WkrrrProblem(np.ones((1, n)), centered, np.eye(1), w_c, k, method)
    if method in ("lda", "kda"):
        if labels is None:
            raise ValueError(f"{method} problem needs labels")
        gamma, indicator = centered_indicator(labels)
        w_r = class_weight(indicator)
        if method == "lda":
            upsilon = centered
        else:
            spec = (kernel or KernelSpec()).resolve(x)
            upsilon = kernel_factor(center_gram(gram_matrix(x, spec)))
        return WkrrrProblem(gamma, upsilon, w_r, identity_n, k, method)
    if method == "lsda":
        if graph is None or between is None:
            raise ValueError("lsda problem needs within and between graphs")
        weighting = alpha * between.laplacian.toarray() + (1.0 - alpha) * graph.toarray()
        return WkrrrProblem(np.ones((1, n)), centered, np.eye(1), psd_sqrt(weighting), k, method)
    raise ValueError(f"Unknown method '{method}'")


def rayleigh_ritz(basis: Matrix, a: Matrix, b: Matrix):
    """
    Best b-orthonormal directions for the pencil (a, b) inside span(basis).

    Returns:
        Tuple (values descending, directions) with directions = basis·V
    """
    q = orthonormal_basis(basis)
    small = gen_eig(q.T @ a @ q, q.T @ b @ q, ladder=(0.0,))
    return small.values, fix_signs(q @ small.vectors)

