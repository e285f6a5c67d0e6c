"""
Dimensionality-reduction methods for simple-dimred

Seven fitters sharing one immutable model type; each is also expressible as
an instance of the weighted reduced-rank regression in `wkrrr`.
"""

from .base import (
    KERNEL_METHODS,
    LINEAR_METHODS,
    METHODS,
    DrModel,
    EnergyPolicy,
    load_model,
    save_model,
    select_k,
    transform,
)
from .linear import fit_kpca, fit_pca
from .manifold import default_lpp_graph, extend_lle, fit_lle, fit_lpp, lle_objective, lpp_matrices
from .supervised import fit_kda, fit_lda, fit_lsda, lda_matrices, lsda_matrices
from .wkrrr import (
    WkrrrProblem,
    WkrrrResult,
    a_step,
    b_step,
    build_problem,
    objective,
    wkrrr_solve,
)

__all__ = [
    "METHODS",
    "LINEAR_METHODS",
    "KERNEL_METHODS",
    "DrModel",
    "EnergyPolicy",
    "select_k",
    "transform",
    "save_model",
    "load_model",
    "fit_pca",
    "fit_kpca",
    "fit_lle",
    "fit_lpp",
    "fit_lda",
    "fit_kda",
    "fit_lsda",
    "extend_lle",
    "default_lpp_graph",
    "lle_objective",
    "lpp_matrices",
    "lda_matrices",
    "lsda_matrices",
    "WkrrrProblem",
    "WkrrrResult",
    "wkrrr_solve",
    "build_problem",
    "a_step",
    "b_step",
    "objective",
]
