"""
Supervised and hybrid methods: LDA, kernel LDA and LSDA

All three fix the retained rank at (#classes − 1).
"""

import logging
from typing import Optional

import numpy as np
from scipy import sparse
from typing_extensions import Literal

from ..exceptions import DimensionMismatch
from ..graphs import DEFAULT_NEIGHBORS, lsda_graphs
from ..kernels import KernelSpec, center_gram, gram_matrix
from ..linalg import EigResult, Matrix, as_matrix, cholesky_ladder, gen_eig, sym_eig
from .base import DrModel, projection_model
from .manifold import graph_scatter
from .wkrrr import (
    DEFAULT_TOL,
    KERNEL_RANK_TOL,
    WkrrrProblem,
    b_step,
    build_problem,
    centered_indicator,
    class_weight,
    rayleigh_ritz,
    wkrrr_solve,
)

logger = logging.getLogger(__name__)

DEFAULT_ALPHA = 0.5
# KDA ridge default, relative to the mean positive eigenvalue of K̄/n
DEFAULT_KDA_RIDGE = 1e-3


def _labelled(d, labels):
    x = as_matrix(getattr(d, "features", d), "features")
    labels = np.asarray(labels).ravel()
    if labels.shape[0] != x.shape[1]:
        raise DimensionMismatch(f"expected {x.shape[1]} labels, got {labels.shape[0]}")
    return x, labels


def lda_matrices(d, labels):
    """
    Between-class and total scatter of centred data.

    Returns:
        Tuple (D̄G(GᵀG)⁻¹GᵀD̄ᵀ, D̄D̄ᵀ)
    """
    x, labels = _labelled(d, labels)
    centered = x - x.mean(axis=1, keepdims=True)
    _, indicator = centered_indicator(labels)
    class_weight(indicator)
    sums = centered @ indicator
    a = (sums / indicator.sum(axis=0)) @ sums.T
    b = centered @ centered.T
    return 0.5 * (a + a.T), 0.5 * (b + b.T)


def fit_lda(
    d,
    labels,
    route: Literal["gep", "ls"] = "gep",
    tol: float = DEFAULT_TOL,
) -> DrModel:
    """
    Linear discriminant analysis.

    The gep route solves the trace ratio with the total scatter on the right;
    the ls route solves the class-balanced regression onto the indicator with
    wkrrr_solve and rotates the recovered span onto b-orthonormal directions.
    Both routes share one ridge from the Cholesky ladder, recorded as a
    SmallSampleSingular warning when nonzero.

    Args:
        d: FeatureMatrix or d×n array
        labels: Per-column class ids
        route: 'gep' or 'ls'
        tol: ALS tolerance for the ls route

    Returns:
        DrModel with a_factor = discriminant directions (d×(c−1)) and
        b_factor = the class-side factor B

    Raises:
        SingleClass: Fewer than two classes
        TooFewSamples: A class with fewer than two samples
    """
    x, labels = _labelled(d, labels)
    a, b = lda_matrices(x, labels)
    classes = np.unique(labels).size
    k = min(classes - 1, x.shape[0])
    problem = build_problem("lda", x, k, labels=labels)

    if route == "gep":
        eig = gen_eig(a, b)
        ridge = eig.ridge
    elif route == "ls":
        _, ridge = cholesky_ladder(b)
        result = wkrrr_solve(problem, tol=tol, ridge=ridge)
        values, directions = rayleigh_ritz(result.a, a, b + ridge * np.eye(b.shape[0]))
        eig = EigResult(values, directions, ridge)
    else:
        raise ValueError(f"Unknown LDA route '{route}'")

    directions = eig.vectors[:, :k]
    params = {"route": route, "classes": int(classes)}
    return projection_model(
        "lda", x, eig, k, np.clip(eig.values, 0.0, None), params,
        b_factor=b_step(problem, directions, ridge),
    )


def kda_factor(centered_gram: Matrix):
    """Positive eigenpairs (U, λ) of a centred Gram above the rank tolerance"""
    eig = sym_eig(centered_gram)
    top = max(float(eig.values[0]), 0.0)
    keep = eig.values > KERNEL_RANK_TOL * top
    return eig.vectors[:, keep], eig.values[keep]


def fit_kda(
    d,
    labels,
    spec: Optional[KernelSpec] = None,
    ridge: Optional[float] = None,
) -> DrModel:
    """
    Kernel discriminant analysis.

    Works in the finite factor F = Λ^½Uᵀ of the centred Gram (K̄ = FᵀF) and
    solves (F G(GᵀG)⁻¹GᵀFᵀ/n) v = λ (FFᵀ/n + ridge·I) v. Coefficients over the
    training samples are α = UΛ^−½V. Scaling both sides by 1/n makes a
    duplicated training set give the same projection at the same ridge.

    Args:
        d: FeatureMatrix or d×n array
        labels: Per-column class ids
        spec: Kernel (default rbf with median bandwidth)
        ridge: Absolute ridge; default 1e-3 · trace(K̄)/(n·rank)

    Returns:
        DrModel with a_factor = α (n×(c−1))
    """
    x, labels = _labelled(d, labels)
    n = x.shape[1]
    spec = (spec or KernelSpec()).resolve(x)
    gram = gram_matrix(x, spec)
    centered = center_gram(gram)
    vectors, values = kda_factor(centered)
    if values.size == 0:
        values = np.zeros(1)
        vectors = np.zeros((n, 1))
    factor = np.sqrt(values)[:, None] * vectors.T

    gamma, indicator = centered_indicator(labels)
    w_r = class_weight(indicator)
    classes = indicator.shape[1]
    k = min(classes - 1, values.size)
    if ridge is None:
        ridge = DEFAULT_KDA_RIDGE * float(values.sum()) / (n * values.size)
        ridge = ridge if ridge > 0 else DEFAULT_KDA_RIDGE

    sums = factor @ indicator
    a = (sums / indicator.sum(axis=0)) @ sums.T / n
    b = np.diag(values) / n + ridge * np.eye(values.size)
    eig = gen_eig(0.5 * (a + a.T), b, ladder=(0.0,))
    directions = eig.vectors[:, :k]
    safe = np.where(values > 0, values, 1.0)
    coefficients = vectors @ (directions / np.sqrt(safe)[:, None])

    problem = WkrrrProblem(gamma, factor, w_r, np.eye(n), k, "kda")
    logger.info(f"Fitted kda ({spec.kind}): n={n}, rank={values.size}, k={k}, ridge={ridge:.3e}")
    return DrModel(
        method="kda",
        k=k,
        a_factor=coefficients,
        b_factor=b_step(problem, directions, ridge * n),
        train_mean=x.mean(axis=1),
        train_embedding=coefficients.T @ centered,
        spectrum=np.clip(eig.values, 0.0, None),
        kernel=spec,
        train_columns=x.copy(),
        kernel_row_means=gram.mean(axis=1),
        kernel_mean=float(gram.mean()),
        ridge=float(ridge),
        params={"kernel": spec.to_dict(), "classes": int(classes), "ridge": float(ridge)},
    )


def lsda_matrices(d, labels, p: int = DEFAULT_NEIGHBORS, alpha: float = DEFAULT_ALPHA):
    """
    LSDA pencil (D̄(αL_b + (1−α)W_w)D̄ᵀ, D̄S_wD̄ᵀ) and its graphs.

    Returns:
        Tuple (a, b, within, between)
    """
    if not 0 <= alpha <= 1:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    x, labels = _labelled(d, labels)
    within, between = lsda_graphs(x, labels, p)
    centered = x - x.mean(axis=1, keepdims=True)
    weighting = alpha * between.laplacian + (1.0 - alpha) * within.weights
    a = graph_scatter(centered, sparse.csr_matrix(weighting))
    b = graph_scatter(centered, sparse.diags(within.degree))
    return a, b, within, between


def fit_lsda(
    d,
    labels,
    p: int = DEFAULT_NEIGHBORS,
    alpha: float = DEFAULT_ALPHA,
) -> DrModel:
    """
    Locally sensitive discriminant analysis.

    Solves D̄(αL_b + (1−α)W_w)D̄ᵀ v = λ D̄S_wD̄ᵀ v with the within/between
    neighbour graphs and keeps the top (#classes − 1) directions.

    Args:
        d: FeatureMatrix or d×n array
        labels: Per-column class ids
        p: Neighbour count for both graphs
        alpha: Weight of the between-class Laplacian

    Returns:
        DrModel with a_factor = projection (d×(c−1))
    """
    x, labels = _labelled(d, labels)
    a, b, within, between = lsda_matrices(x, labels, p, alpha)
    eig = gen_eig(a, b)
    classes = np.unique(labels).size
    k = min(classes - 1, x.shape[0])
    params = {
        "p": int(p),
        "alpha": float(alpha),
        "classes": int(classes),
        "within_edges": within.edge_count,
        "between_edges": between.edge_count,
    }
    return projection_model("lsda", x, eig, k, eig.values.copy(), params)
