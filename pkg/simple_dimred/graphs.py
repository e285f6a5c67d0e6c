"""
Neighbourhood graphs for simple-dimred

k-NN adjacency, LLE reconstruction weights, heat-kernel affinities and the
within/between-class graphs used by LSDA. Weights are stored as sparse CSR
matrices; samples are columns of the feature matrix.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist

from .exceptions import DimensionMismatch, SingleClass, SingularLocalGram, TooFewSamples
from .linalg import Matrix, as_matrix

logger = logging.getLogger(__name__)

DEFAULT_NEIGHBORS = 12
DEFAULT_LLE_REG = 1e-3


@dataclass(frozen=True)
class AffinityGraph:
    """
    Weighted graph over n samples.

    Attributes:
        weights: Sparse n×n weight matrix W (CSR)
    """
    weights: sparse.csr_matrix

    def __post_init__(self):
        w = sparse.csr_matrix(self.weights, dtype=np.float64)
        if w.shape[0] != w.shape[1]:
            raise DimensionMismatch(f"graph weights must be square, got {w.shape}")
        w.sum_duplicates()
        w.eliminate_zeros()
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return self.weights.shape[0]

    @property
    def degree(self) -> np.ndarray:
        """Row sums s_ii = Σ_j w_ij"""
        return np.asarray(self.weights.sum(axis=1)).ravel()

    @property
    def laplacian(self) -> sparse.csr_matrix:
        """L = S − W"""
        return sparse.csr_matrix(sparse.diags(self.degree) - self.weights)

    @property
    def edge_count(self) -> int:
        return int(self.weights.nnz)

    def edges(self) -> set:
        """Set of (i, j) index pairs with nonzero weight"""
        coo = self.weights.tocoo()
        return set(zip(coo.row.tolist(), coo.col.tolist()))

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        diff = self.weights - self.weights.T
        return diff.nnz == 0 or float(abs(diff).max()) <= tol

    def toarray(self) -> Matrix:
        return self.weights.toarray()

    def __repr__(self):
        return f"<AffinityGraph(n={self.n}, edges={self.edge_count})>"


@dataclass(frozen=True)
class LleWeights:
    """
    LLE reconstruction weights.

    Column i holds the weights that reconstruct sample i from its neighbours,
    so D·W approximates D and every column sums to 1.

    Attributes:
        weights: Sparse n×n matrix with at most p nonzeros per column
        neighbors: n×p neighbour table used for the solves
        objective: ‖D(I − W)‖²_F
        reg: Relative Tikhonov term used
    """
    weights: sparse.csc_matrix
    neighbors: np.ndarray
    objective: float
    reg: float

    def as_graph(self) -> AffinityGraph:
        """Symmetric connectivity pattern of the weights"""
        pattern = abs(self.weights)
        return AffinityGraph(sparse.csr_matrix(pattern + pattern.T))


def _columns(d) -> Matrix:
    return as_matrix(getattr(d, "features", d), "features")


def knn_indices(d, p: int) -> np.ndarray:
    """
    Indices of each sample's p nearest neighbours by Euclidean distance.

    Ties are broken by the lower column index.

    Args:
        d: FeatureMatrix or d×n array
        p: Neighbour count, 1 ≤ p < n

    Returns:
        n×p integer array, row i ordered by increasing distance

    Raises:
        TooFewSamples: If p ≥ n
    """
    data = _columns(d)
    n = data.shape[1]
    if p < 1:
        raise ValueError(f"neighbour count must be >= 1, got {p}")
    if p >= n:
        raise TooFewSamples(f"need more than {p} samples for {p} neighbours, got {n}")
    dist = cdist(data.T, data.T, "sqeuclidean")
    np.fill_diagonal(dist, np.inf)
    return np.argsort(dist, axis=1, kind="stable")[:, :p]


def _adjacency(neighbors: np.ndarray, n: int) -> sparse.csr_matrix:
    rows = np.repeat(np.arange(n), neighbors.shape[1])
    data = np.ones(rows.size)
    return sparse.csr_matrix((data, (rows, neighbors.ravel())), shape=(n, n))


def knn_graph(d, p: int = DEFAULT_NEIGHBORS, mutual: bool = False) -> AffinityGraph:
    """
    Binary k-NN graph.

    Args:
        d: FeatureMatrix or d×n array
        p: Neighbour count
        mutual: Keep only mutual neighbours (intersection) instead of the union

    Returns:
        Symmetric binary AffinityGraph
    """
    neighbors = knn_indices(d, p)
    directed = _adjacency(neighbors, neighbors.shape[0])
    if mutual:
        sym = directed.multiply(directed.T)
    else:
        sym = directed.maximum(directed.T)
    return AffinityGraph(sparse.csr_matrix(sym))


def lle_weights(d, p: int = DEFAULT_NEIGHBORS, reg: float = DEFAULT_LLE_REG) -> LleWeights:
    """
    Locally linear reconstruction weights.

    For each sample the local Gram G = ZᵀZ of its centred neighbours gets
    reg·trace(G)/p added to the diagonal (plain reg when the trace is zero);
    the solution of G·w = 1 is normalised to sum to 1.

    Args:
        d: FeatureMatrix or d×n array
        p: Neighbour count
        reg: Relative Tikhonov regularisation, 0 forbids regularising

    Returns:
        LleWeights

    Raises:
        SingularLocalGram: If reg == 0 and a local Gram is singular
    """
    if reg < 0:
        raise ValueError(f"reg must be >= 0, got {reg}")
    data = _columns(d)
    n = data.shape[1]
    neighbors = knn_indices(data, p)
    values = np.empty((n, p))
    ones = np.ones(p)
    for i in range(n):
        z = data[:, neighbors[i]] - data[:, [i]]
        gram = z.T @ z
        if reg > 0:
            trace = np.trace(gram)
            gram = gram + (reg * trace / p if trace > 0 else reg) * np.eye(p)
        elif np.linalg.matrix_rank(gram) < p:
            raise SingularLocalGram(f"local Gram of sample {i} is singular (rank < {p}) and reg=0")
        w = np.linalg.solve(gram, ones)
        values[i] = w / w.sum()

    cols = np.repeat(np.arange(n), p)
    weights = sparse.csc_matrix((values.ravel(), (neighbors.ravel(), cols)), shape=(n, n))
    residual = data - (weights.T @ data.T).T
    objective = float(np.sum(residual ** 2))
    logger.debug(f"LLE weights: n={n}, p={p}, reg={reg}, objective={objective:.6g}")
    return LleWeights(weights=weights, neighbors=neighbors, objective=objective, reg=reg)


def _edge_distances(
    data: Matrix, graph: AffinityGraph
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    coo = graph.weights.tocoo()
    diff = data[:, coo.row] - data[:, coo.col]
    return coo.row, coo.col, np.sum(diff ** 2, axis=0)


def median_edge_sigma(d, graph: AffinityGraph) -> float:
    """Median Euclidean edge length, 1.0 if the graph has no positive-length edge"""
    _, _, sq = _edge_distances(_columns(d), graph)
    lengths = np.sqrt(sq[sq > 0])
    if lengths.size == 0:
        return 1.0
    return float(np.median(lengths))


def heat_affinity(d, graph: AffinityGraph, sigma: Optional[float] = None) -> AffinityGraph:
    """
    Heat-kernel weights on the edges of a binary graph.

    Args:
        d: FeatureMatrix or d×n array
        graph: Symmetric binary adjacency
        sigma: Bandwidth; None passes the binary weights through

    Returns:
        AffinityGraph with w_ij = exp(−‖d_i − d_j‖²/(2σ²)) on edges
    """
    data = _columns(d)
    if graph.n != data.shape[1]:
        raise DimensionMismatch(f"graph has {graph.n} nodes but data has {data.shape[1]} samples")
    if sigma is None:
        return graph
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    rows, cols, sq = _edge_distances(data, graph)
    weights = np.exp(-sq / (2.0 * sigma ** 2))
    # explicit zeros would be dropped, so keep underflowed edges at the smallest normal
    weights = np.maximum(weights, np.finfo(np.float64).tiny)
    return AffinityGraph(sparse.csr_matrix((weights, (rows, cols)), shape=graph.weights.shape))


def lsda_graphs(d, labels, p: int = DEFAULT_NEIGHBORS) -> Tuple[AffinityGraph, AffinityGraph]:
    """
    Within-class and between-class neighbour graphs.

    Each sample's p-NN edges go to the within graph when the labels agree and
    to the between graph otherwise; both are union-symmetrised.

    Returns:
        Tuple of (within, between) binary graphs with disjoint edge sets

    Raises:
        SingleClass: If all labels are identical
    """
    labels = np.asarray(labels)
    data = _columns(d)
    if labels.shape != (data.shape[1],):
        raise DimensionMismatch(f"expected {data.shape[1]} labels, got {labels.shape}")
    if np.unique(labels).size < 2:
        raise SingleClass("LSDA needs at least two classes")
    neighbors = knn_indices(data, p)
    n = data.shape[1]
    directed = _adjacency(neighbors, n).tocoo()
    same = labels[directed.row] == labels[directed.col]

    def _sym(mask: np.ndarray) -> AffinityGraph:
        m = sparse.csr_matrix(
            (directed.data[mask], (directed.row[mask], directed.col[mask])), shape=(n, n)
        )
        return AffinityGraph(sparse.csr_matrix(m.maximum(m.T)))

    return _sym(same), _sym(~same)


def count_components(graph: AffinityGraph) -> int:
    """Number of connected components of the undirected edge pattern"""
    count, _ = connected_components(abs(graph.weights), directed=False)
    return int(count)
