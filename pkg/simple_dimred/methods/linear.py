"""
PCA and kernel PCA
"""

import logging
from typing import Optional

import numpy as np
from scipy import linalg as sla
from typing_extensions import Literal

from ..exceptions import AllZeroSpectrum, DegenerateData, TooFewSamples
from ..kernels import KernelSpec, center_gram, gram_matrix
from ..linalg import as_matrix, fix_signs, orthonormal_basis, sym_eig
from .base import DrModel, EnergyPolicy, select_k
from .wkrrr import DEFAULT_TOL, KERNEL_RANK_TOL, build_problem, wkrrr_solve

logger = logging.getLogger(__name__)


def _data(d):
    x = as_matrix(getattr(d, "features", d), "features")
    if x.shape[1] < 2:
        raise TooFewSamples(f"need at least 2 samples, got {x.shape[1]}")
    return x


def fit_pca(
    d,
    policy: Optional[EnergyPolicy] = None,
    route: Literal["spectral", "als"] = "spectral",
    tol: float = DEFAULT_TOL,
) -> DrModel:
    """
    Principal component analysis.

    The covariance is D̄D̄ᵀ/(n−1) on mean-centred data. The spectral route
    eigendecomposes it; the als route solves the reconstruction objective
    with wkrrr_solve and rotates the recovered subspace onto the principal axes.

    Args:
        d: FeatureMatrix or d×n array
        policy: Energy policy (default: 98% energy)
        route: 'spectral' or 'als'
        tol: ALS tolerance

    Returns:
        DrModel with a_factor = principal directions (d×k)

    Raises:
        DegenerateData: If all columns are identical
    """
    policy = policy or EnergyPolicy()
    x = _data(d)
    n = x.shape[1]
    mean = x.mean(axis=1)
    centered = x - mean[:, None]
    if not np.any(centered):
        raise DegenerateData("all samples are identical")
    covariance = centered @ centered.T / (n - 1)

    if route == "spectral":
        eig = sym_eig(covariance)
        spectrum = np.clip(eig.values, 0.0, None)
        k = select_k(spectrum, policy)
        directions = eig.vectors[:, :k]
        trace = None
    elif route == "als":
        spectrum = sla.svdvals(centered) ** 2 / (n - 1)
        k = select_k(spectrum, policy)
        result = wkrrr_solve(build_problem("pca", centered, k), tol=tol)
        basis = orthonormal_basis(result.b)
        small = sym_eig(basis.T @ covariance @ basis)
        directions = fix_signs(basis @ small.vectors)
        trace = result.objective_trace
    else:
        raise ValueError(f"Unknown PCA route '{route}'")

    embedding = directions.T @ centered
    logger.info(f"Fitted pca ({route}): n={n}, d={x.shape[0]}, k={k}")
    params = {"route": route, "policy": policy.to_dict()}
    if trace is not None:
        params["als_iterations"] = int(trace.size - 1)
    return DrModel(
        method="pca",
        k=k,
        a_factor=directions,
        b_factor=directions,
        train_mean=mean,
        train_embedding=embedding,
        spectrum=spectrum,
        params=params,
    )


def fit_kpca(
    d, spec: Optional[KernelSpec] = None, policy: Optional[EnergyPolicy] = None
) -> DrModel:
    """
    Kernel PCA.

    Eigendecomposes the centred Gram K̄ = UΛUᵀ and keeps coefficients
    α_i = u_i/√λ_i, so feature-space components have unit norm. The training
    embedding is αᵀK̄ = Λ^½ Uᵀ.

    Args:
        d: FeatureMatrix or d×n array
        spec: Kernel (default rbf with median bandwidth)
        policy: Energy policy over the centred-Gram spectrum

    Returns:
        DrModel with a_factor = α (n×k)

    Raises:
        AllZeroSpectrum: If the centred Gram is numerically zero
    """
    policy = policy or EnergyPolicy()
    x = _data(d)
    spec = (spec or KernelSpec()).resolve(x)
    gram = gram_matrix(x, spec)
    centered = center_gram(gram)
    eig = sym_eig(centered)
    spectrum = np.clip(eig.values, 0.0, None)
    if spectrum[0] <= 0 or spectrum[0] <= KERNEL_RANK_TOL * np.abs(gram).max():
        raise AllZeroSpectrum("centred Gram matrix is numerically zero")
    k = select_k(spectrum, policy)
    usable = int(np.sum(spectrum > KERNEL_RANK_TOL * spectrum[0]))
    if k > usable:
        logger.debug(f"kpca: clamping k={k} to {usable} numerically positive eigenvalues")
        k = usable
    coefficients = eig.vectors[:, :k] / np.sqrt(spectrum[:k])
    embedding = coefficients.T @ centered
    logger.info(f"Fitted kpca ({spec.kind}): n={x.shape[1]}, k={k}")
    return DrModel(
        method="kpca",
        k=k,
        a_factor=coefficients,
        b_factor=coefficients,
        train_mean=x.mean(axis=1),
        train_embedding=embedding,
        spectrum=spectrum,
        kernel=spec,
        train_columns=x.copy(),
        kernel_row_means=gram.mean(axis=1),
        kernel_mean=float(gram.mean()),
        params={"kernel": spec.to_dict(), "policy": policy.to_dict()},
    )
