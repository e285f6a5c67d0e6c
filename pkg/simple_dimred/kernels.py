"""
Kernel functions and Gram matrices for simple-dimred

Houses the nonlinear liftings used by KPCA and KDA: Gram construction,
double centering, cross kernels for out-of-sample mapping and the median
bandwidth heuristic.
"""

import logging
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist, pdist
from typing_extensions import Literal

from .exceptions import DimensionMismatch
from .linalg import Matrix, as_matrix

logger = logging.getLogger(__name__)

KernelKind = Literal["linear", "rbf", "polynomial"]

MEDIAN_SUBSAMPLE = 500


@dataclass(frozen=True)
class KernelSpec:
    """
    Kernel description.

    Attributes:
        kind: One of linear, rbf, polynomial
        sigma: RBF bandwidth; None means "median heuristic at fit time"
        degree: Polynomial degree
        offset: Polynomial offset c in (xᵀy + c)^degree
    """
    kind: KernelKind = "rbf"
    sigma: Optional[float] = None
    degree: int = 2
    offset: float = 1.0

    def __post_init__(self):
        if self.kind not in ("linear", "rbf", "polynomial"):
            raise ValueError(f"Unknown kernel kind '{self.kind}'")
        if self.kind == "rbf" and self.sigma is not None and not self.sigma > 0:
            raise ValueError(f"rbf sigma must be > 0, got {self.sigma}")
        if self.kind == "polynomial" and self.degree < 1:
            raise ValueError(f"polynomial degree must be >= 1, got {self.degree}")

    def resolve(self, x) -> "KernelSpec":
        """Fill in a missing rbf bandwidth from the training data"""
        if self.kind == "rbf" and self.sigma is None:
            return replace(self, sigma=median_sigma(x))
        return self

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "sigma": self.sigma,
            "degree": self.degree,
            "offset": self.offset,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "KernelSpec":
        return cls(
            kind=data.get("kind", "rbf"),
            sigma=data.get("sigma"),
            degree=int(data.get("degree", 2)),
            offset=float(data.get("offset", 1.0)),
        )


def _columns(x) -> Matrix:
    """Accept a FeatureMatrix or a d×n array"""
    return as_matrix(getattr(x, "features", x), "features")


def median_sigma(x, max_samples: int = MEDIAN_SUBSAMPLE) -> float:
    """
    Median of pairwise Euclidean distances between columns.

    Uses an evenly spaced deterministic subsample of at most max_samples columns.
    Falls back to 1.0 when every distance is zero.
    """
    data = _columns(x)
    n = data.shape[1]
    if n < 2:
        return 1.0
    if n > max_samples:
        idx = np.linspace(0, n - 1, max_samples).round().astype(int)
        data = data[:, idx]
    distances = pdist(data.T)
    sigma = float(np.median(distances))
    if sigma <= 0:
        logger.warning("All pairwise distances are zero; using sigma=1.0")
        return 1.0
    return sigma


def _evaluate(a: Matrix, b: Matrix, spec: KernelSpec) -> Matrix:
    if spec.kind == "linear":
        return a.T @ b
    if spec.kind == "polynomial":
        return (a.T @ b + spec.offset) ** spec.degree
    sigma = spec.sigma if spec.sigma is not None else median_sigma(a)
    return np.exp(-cdist(a.T, b.T, "sqeuclidean") / (2.0 * sigma ** 2))


def gram_matrix(x, spec: KernelSpec) -> Matrix:
    """
    Kernel Gram matrix over the columns of x.

    Args:
        x: FeatureMatrix or d×n array
        spec: Kernel specification (an unset rbf sigma uses the median heuristic)

    Returns:
        Symmetric n×n matrix
    """
    data = _columns(x)
    return _evaluate(data, data, spec)


def cross_kernel(train, query, spec: KernelSpec) -> Matrix:
    """
    Kernel evaluations between training and query columns.

    Args:
        train: Training FeatureMatrix or d×n array
        query: Query FeatureMatrix or d×m array
        spec: Kernel specification

    Returns:
        n_train × n_query matrix

    Raises:
        DimensionMismatch: If feature dimensions differ
    """
    a = _columns(train)
    b = _columns(query)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"train has d={a.shape[0]} but query has d={b.shape[0]}")
    if spec.kind == "rbf" and spec.sigma is None:
        spec = spec.resolve(a)
    return _evaluate(a, b, spec)


def center_gram(k) -> Matrix:
    """
    Double-center a Gram matrix: H K H with H = I − 11ᵀ/n.

    Raises:
        DimensionMismatch: If k is not square
    """
    k = as_matrix(k, "k")
    if k.shape[0] != k.shape[1]:
        raise DimensionMismatch(f"Gram matrix must be square, got {k.shape}")
    centered = k - k.mean(axis=0)[None, :] - k.mean(axis=1)[:, None] + k.mean()
    return 0.5 * (centered + centered.T)


def center_cross_kernel(kq, train_row_means: np.ndarray, train_mean: float) -> Matrix:
    """
    Center a train×query cross kernel consistently with center_gram.

    Args:
        kq: n_train × m cross kernel
        train_row_means: Row means of the uncentered training Gram
        train_mean: Grand mean of the uncentered training Gram
    """
    kq = as_matrix(kq, "kq")
    if kq.shape[0] != train_row_means.shape[0]:
        raise DimensionMismatch(
            f"cross kernel has {kq.shape[0]} rows but training Gram has {train_row_means.shape[0]}"
        )
    return kq - kq.mean(axis=0)[None, :] - train_row_means[:, None] + train_mean
