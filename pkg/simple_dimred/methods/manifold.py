"""
Graph-based methods: locally linear embedding and locality preserving projections
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.spatial.distance import cdist

from ..exceptions import AllZeroSpectrum, DimensionMismatch, TooFewSamples
from ..graphs import (
    DEFAULT_LLE_REG,
    DEFAULT_NEIGHBORS,
    AffinityGraph,
    count_components,
    heat_affinity,
    knn_graph,
    lle_weights,
    median_edge_sigma,
)
from ..linalg import Matrix, as_matrix, gen_eig, sym_eig, sym_eig_smallest
from .base import DrModel, EnergyPolicy, projection_model, select_k

logger = logging.getLogger(__name__)


def _data(d) -> Matrix:
    return as_matrix(getattr(d, "features", d), "features")


def _lle_matrix(weights) -> Matrix:
    residual = np.eye(weights.shape[0]) - weights.toarray()
    m = residual @ residual.T
    return 0.5 * (m + m.T)


def inverted_energy(values: np.ndarray) -> np.ndarray:
    """
    Energy spectrum for smallest-eigenvector methods: 1/λ on nonzero eigenvalues.

    Eigenvalues at or below 1e-10 of the largest count as zero and carry no
    energy. They keep their position, so the index of the spectrum still
    matches the eigenvector order.
    """
    values = np.asarray(values, dtype=np.float64)
    tol = 1e-10 * max(float(values.max()), 0.0)
    energy = np.zeros_like(values)
    nonzero = values > tol
    energy[nonzero] = 1.0 / values[nonzero]
    return energy


def fit_lle(
    d,
    p: int = DEFAULT_NEIGHBORS,
    reg: float = DEFAULT_LLE_REG,
    k: int = 2,
    policy: Optional[EnergyPolicy] = None,
) -> DrModel:
    """
    Locally linear embedding.

    Builds M = (I − W)(I − W)ᵀ from the reconstruction weights and embeds with
    the eigenvectors of its k smallest eigenvalues orthogonal to the constant
    vector, so Y·1 = 0 and Y·Yᵀ = I.

    Args:
        d: FeatureMatrix or d×n array
        p: Neighbour count
        reg: Local Gram regularisation
        k: Embedding rank (ignored when policy is given)
        policy: Optional energy policy over the inverted spectrum of M

    Returns:
        DrModel whose train_embedding is the k×n embedding; out-of-sample
        transform is unsupported (see extend_lle)
    """
    x = _data(d)
    n = x.shape[1]
    if n < 3:
        raise TooFewSamples(f"LLE needs at least 3 samples, got {n}")
    weights = lle_weights(x, p, reg)
    m = _lle_matrix(weights.weights)
    # lift the constant null vector above the rest of the spectrum
    shift = float(np.trace(m)) + 1.0
    shifted = m + (shift / n) * np.ones((n, n))

    warnings = []
    components = count_components(weights.as_graph())
    if components > 1:
        message = f"DisconnectedGraph: neighbour graph has {components} components"
        logger.warning(f"lle: {message}")
        warnings.append(message)

    if policy is not None:
        full = sym_eig(shifted)
        # drop the lifted constant vector and keep k < n-1
        ascending = full.values[::-1][: n - 2]
        k = select_k(inverted_energy(ascending), policy)
        if policy.mode == "fixed" and policy.fixed_k > k:
            message = f"RankClamped: fixed_k={policy.fixed_k} exceeds the largest LLE rank {k}"
            logger.warning(f"lle: {message}")
            warnings.append(message)
    if not 1 <= k < n - 1:
        raise TooFewSamples(f"LLE rank must satisfy 1 <= k < n-1, got k={k}, n={n}")

    eig = sym_eig_smallest(shifted, k)
    embedding = eig.vectors.T
    spectrum = eig.values
    logger.info(f"Fitted lle: n={n}, p={p}, k={k}, objective={float(spectrum.sum()):.6g}")
    params = {"p": int(p), "reg": float(reg), "weights_objective": weights.objective}
    if policy is not None:
        params["policy"] = policy.to_dict()
    return DrModel(
        method="lle",
        k=k,
        a_factor=np.zeros((x.shape[0], k)),
        b_factor=embedding.T,
        train_mean=x.mean(axis=1),
        train_embedding=embedding,
        spectrum=spectrum,
        spectrum_order="ascending",
        train_columns=x.copy(),
        warnings=tuple(warnings),
        params=params,
    )


def lle_objective(embedding: Matrix, weights) -> float:
    """‖Y(I − W)‖²_F for a k×n embedding"""
    residual = embedding - (weights.T @ embedding.T).T
    return float(np.sum(residual ** 2))


def extend_lle(model: DrModel, x) -> Matrix:
    """
    Neighbour-reconstruction extension of an LLE embedding.

    Each query is reconstructed from its p nearest training samples with the
    same regularised local solve as training, and the weights are applied to
    those samples' embedding coordinates.

    Returns:
        k×m approximate embedding
    """
    if model.method != "lle":
        raise ValueError(f"extend_lle needs an lle model, got '{model.method}'")
    query = _data(x)
    train = model.train_columns
    if query.shape[0] != train.shape[0]:
        raise DimensionMismatch(f"model expects d={train.shape[0]}, got d={query.shape[0]}")
    p = int(model.params["p"])
    reg = float(model.params["reg"]) or DEFAULT_LLE_REG
    dist = cdist(query.T, train.T, "sqeuclidean")
    neighbors = np.argsort(dist, axis=1, kind="stable")[:, :p]
    out = np.empty((model.k, query.shape[1]))
    ones = np.ones(p)
    for i in range(query.shape[1]):
        z = train[:, neighbors[i]] - query[:, [i]]
        gram = z.T @ z
        trace = np.trace(gram)
        gram = gram + (reg * trace / p if trace > 0 else reg) * np.eye(p)
        w = np.linalg.solve(gram, ones)
        out[:, i] = model.train_embedding[:, neighbors[i]] @ (w / w.sum())
    return out


# ===== LPP =====

def default_lpp_graph(
    d, p: int = DEFAULT_NEIGHBORS, sigma: Optional[float] = None
) -> AffinityGraph:
    """k-NN graph with heat weights; sigma defaults to the median edge length"""
    x = _data(d)
    graph = knn_graph(x, p)
    return heat_affinity(x, graph, sigma if sigma is not None else median_edge_sigma(x, graph))


def graph_scatter(centered: Matrix, weights) -> Matrix:
    """D̄·W·D̄ᵀ for a sparse or dense n×n weight matrix"""
    if weights.shape != (centered.shape[1], centered.shape[1]):
        raise DimensionMismatch(f"weights {weights.shape} do not match {centered.shape[1]} samples")
    scatter = centered @ (weights @ centered.T)
    return 0.5 * (scatter + scatter.T)


def lpp_matrices(d, graph: AffinityGraph) -> Tuple[Matrix, Matrix]:
    """(D̄WD̄ᵀ, D̄SD̄ᵀ) for centred data D̄"""
    x = _data(d)
    centered = x - x.mean(axis=1, keepdims=True)
    degree = sparse.diags(graph.degree)
    return graph_scatter(centered, graph.weights), graph_scatter(centered, degree)


def fit_lpp(
    d,
    graph: Optional[AffinityGraph] = None,
    policy: Optional[EnergyPolicy] = None,
    p: int = DEFAULT_NEIGHBORS,
) -> DrModel:
    """
    Locality preserving projections.

    Solves (D̄WD̄ᵀ)b = λ(D̄SD̄ᵀ)b and keeps the largest eigenvalues. A ridge
    from the Cholesky ladder is recorded as a warning.

    Args:
        d: FeatureMatrix or d×n array
        graph: Affinity graph over the samples (default: heat-weighted k-NN)
        policy: Energy policy over the positive part of the spectrum
        p: Neighbour count for the default graph

    Returns:
        DrModel with a_factor = projection (d×k)
    """
    policy = policy or EnergyPolicy()
    x = _data(d)
    if graph is None:
        graph = default_lpp_graph(x, p)
    a, b = lpp_matrices(x, graph)
    eig = gen_eig(a, b)
    spectrum = np.clip(eig.values, 0.0, None)
    if not spectrum.sum() > 0:
        raise AllZeroSpectrum("LPP spectrum has no positive eigenvalue")
    k = select_k(spectrum, policy)
    params = {"policy": policy.to_dict(), "edges": graph.edge_count}
    return projection_model("lpp", x, eig, k, spectrum, params)
