"""
Fitted model container, rank selection and out-of-sample transformation
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np
from typing_extensions import Literal

from ..exceptions import AllZeroSpectrum, DimensionMismatch, OutOfSampleUnsupported
from ..kernels import KernelSpec, center_cross_kernel, cross_kernel
from ..linalg import Matrix, as_matrix

logger = logging.getLogger(__name__)

METHODS = ("pca", "kpca", "lpp", "lle", "lda", "kda", "lsda")
LINEAR_METHODS = ("pca", "lpp", "lda", "lsda")
KERNEL_METHODS = ("kpca", "kda")

MODEL_FORMAT_VERSION = 1

# cumulative-energy comparisons tolerate this much relative rounding
_ENERGY_SLACK = 1e-12


@dataclass(frozen=True)
class EnergyPolicy:
    """
    How many components to keep.

    Attributes:
        mode: 'fraction' keeps the smallest k reaching `fraction` of the
            spectrum's mass, 'fixed' keeps `fixed_k`
        fraction: Energy fraction in (0, 1]
        fixed_k: Component count for fixed mode
    """
    mode: Literal["fraction", "fixed"] = "fraction"
    fraction: float = 0.98
    fixed_k: Optional[int] = None

    def __post_init__(self):
        if self.mode == "fraction":
            if not 0 < self.fraction <= 1:
                raise ValueError(f"fraction must be in (0, 1], got {self.fraction}")
        elif self.mode == "fixed":
            if self.fixed_k is None or self.fixed_k < 1:
                raise ValueError(f"fixed mode needs fixed_k >= 1, got {self.fixed_k}")
        else:
            raise ValueError(f"Unknown energy mode '{self.mode}'")

    @classmethod
    def fixed(cls, k: int) -> "EnergyPolicy":
        return cls(mode="fixed", fixed_k=k)

    @classmethod
    def energy(cls, fraction: float = 0.98) -> "EnergyPolicy":
        return cls(mode="fraction", fraction=fraction)

    def to_dict(self) -> Dict[str, Any]:
        if self.mode == "fixed":
            return {"mode": "fixed", "fixed_k": self.fixed_k}
        return {"mode": "fraction", "fraction": self.fraction}


def select_k(spectrum, policy: EnergyPolicy) -> int:
    """
    Choose the retained rank from a descending nonnegative spectrum.

    Args:
        spectrum: Eigen/singular values, descending
        policy: Energy policy

    Returns:
        k ≥ 1

    Raises:
        AllZeroSpectrum: If the spectrum has no positive mass
    """
    values = np.asarray(spectrum, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("spectrum is empty")
    values = np.clip(values, 0.0, None)
    total = float(values.sum())
    if not total > 0:
        raise AllZeroSpectrum("spectrum has no positive mass")
    if policy.mode == "fixed":
        return int(min(policy.fixed_k, values.size))
    cumulative = np.cumsum(values) / total
    k = int(np.searchsorted(cumulative, policy.fraction * (1.0 - _ENERGY_SLACK), side="left")) + 1
    return min(k, values.size)


@dataclass(frozen=True)
class DrModel:
    """
    An immutable fitted dimensionality-reduction model.

    Linear methods map y = a_factorᵀ(x − train_mean) with a_factor d×k.
    Kernel methods map y = a_factorᵀ·k̃(x) where a_factor holds the n×k
    coefficients α and k̃ is the cross kernel centred against the training Gram.

    Attributes:
        method: One of pca, kpca, lpp, lle, lda, kda, lsda
        k: Retained rank
        a_factor: Input-side map (projection directions or kernel coefficients)
        b_factor: Target-side factor of the least-squares form, or the
            projection itself for methods without a separate target
        train_mean: Column mean of the training features
        train_embedding: k×n coordinates of the training samples
        spectrum: Values used for energy accounting
        spectrum_order: 'descending', or 'ascending' for smallest-eigenvector methods
        kernel: Resolved kernel for kernel methods
        train_columns: Training features retained for kernel methods and LLE
        kernel_row_means: Row means of the uncentred training Gram
        kernel_mean: Grand mean of the uncentred training Gram
        ridge: Absolute ridge added to a right-hand matrix, 0 if none
        warnings: Recoverable conditions met while fitting
        params: Fit parameters (JSON-serialisable, read-only)
    """
    method: str
    k: int
    a_factor: Matrix
    b_factor: Matrix
    train_mean: np.ndarray
    train_embedding: Matrix
    spectrum: np.ndarray
    spectrum_order: str = "descending"
    kernel: Optional[KernelSpec] = None
    train_columns: Optional[Matrix] = None
    kernel_row_means: Optional[np.ndarray] = None
    kernel_mean: float = 0.0
    ridge: float = 0.0
    warnings: Tuple[str, ...] = ()
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"Unknown method '{self.method}'")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        for name in ("a_factor", "b_factor", "train_mean", "train_embedding", "spectrum"):
            arr = np.array(getattr(self, name), dtype=np.float64)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "params", MappingProxyType(dict(self.params)))

    @property
    def d(self) -> int:
        return self.train_mean.shape[0]

    @property
    def supports_transform(self) -> bool:
        return self.method != "lle"

    def __repr__(self):
        return f"<DrModel(method='{self.method}', k={self.k}, d={self.d})>"


def transform(model: DrModel, x) -> Matrix:
    """
    Embed new samples with a fitted model.

    Args:
        model: Fitted model
        x: FeatureMatrix or d×m array

    Returns:
        k×m embedding

    Raises:
        OutOfSampleUnsupported: For LLE models
        DimensionMismatch: If the feature dimension differs from training
    """
    if model.method == "lle":
        raise OutOfSampleUnsupported(
            "LLE embeds its training samples only; "
            "use extend_lle for a neighbour-based approximation"
        )
    data = as_matrix(getattr(x, "features", x), "x")
    if data.shape[0] != model.d:
        raise DimensionMismatch(f"model expects d={model.d}, got d={data.shape[0]}")
    if model.method in KERNEL_METHODS:
        kq = cross_kernel(model.train_columns, data, model.kernel)
        centered = center_cross_kernel(kq, model.kernel_row_means, model.kernel_mean)
        return model.a_factor.T @ centered
    return model.a_factor.T @ (data - model.train_mean[:, None])


# ===== Persistence =====

_ARRAY_FIELDS = ("a_factor", "b_factor", "train_mean", "train_embedding", "spectrum",
                 "train_columns", "kernel_row_means")


def save_model(model: DrModel, path: Union[str, Path]) -> Path:
    """
    Write a model as an .npz document.

    Arrays are stored as raw float64; scalars, the kernel and parameters go
    into a JSON header, so a reload is bit-faithful.
    """
    path = Path(path)
    header = {
        "format": MODEL_FORMAT_VERSION,
        "method": model.method,
        "k": model.k,
        "spectrum_order": model.spectrum_order,
        "kernel": model.kernel.to_dict() if model.kernel is not None else None,
        "kernel_mean": float(model.kernel_mean).hex(),
        "ridge": float(model.ridge).hex(),
        "warnings": list(model.warnings),
        "params": dict(model.params),
    }
    arrays = {
        name: getattr(model, name)
        for name in _ARRAY_FIELDS
        if getattr(model, name) is not None
    }
    with open(path, "wb") as fh:
        np.savez(fh, header=np.array(json.dumps(header, sort_keys=True)), **arrays)
    logger.info(f"Saved {model.method} model (k={model.k}) to {path}")
    return path


def load_model(path: Union[str, Path]) -> DrModel:
    """Read a model written by save_model"""
    path = Path(path)
    with np.load(path, allow_pickle=False) as doc:
        header = json.loads(str(doc["header"]))
        if header.get("format") != MODEL_FORMAT_VERSION:
            raise ValueError(f"{path}: unsupported model format {header.get('format')}")
        arrays = {name: doc[name].copy() for name in _ARRAY_FIELDS if name in doc.files}
    kernel = header.get("kernel")
    return DrModel(
        method=header["method"],
        k=int(header["k"]),
        spectrum_order=header["spectrum_order"],
        kernel=KernelSpec.from_dict(kernel) if kernel is not None else None,
        kernel_mean=float.fromhex(header["kernel_mean"]),
        ridge=float.fromhex(header["ridge"]),
        warnings=tuple(header["warnings"]),
        params=header["params"],
        **arrays,
    )


# ===== Shared fitting helpers =====

def projection_model(
    method: str, x: Matrix, eig, k: int, spectrum, params: dict, b_factor=None
) -> DrModel:
    """Shared tail of the GEP-based linear fitters"""
    mean = x.mean(axis=1)
    directions = eig.vectors[:, :k]
    warnings = []
    if eig.ridge > 0:
        message = f"SmallSampleSingular: ridge {eig.ridge:.3e} added to the right-hand matrix"
        logger.warning(f"{method}: {message}")
        warnings.append(message)
    logger.info(f"Fitted {method}: n={x.shape[1]}, d={x.shape[0]}, k={k}")
    return DrModel(
        method=method,
        k=k,
        a_factor=directions,
        b_factor=directions if b_factor is None else b_factor,
        train_mean=mean,
        train_embedding=directions.T @ (x - mean[:, None]),
        spectrum=spectrum,
        ridge=eig.ridge,
        warnings=tuple(warnings),
        params=params,
    )
