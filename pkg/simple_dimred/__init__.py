"""
Simple Dimred - dimensionality reduction for sparse binary detection

Seven reducers (PCA, KPCA, LLE, LPP, LDA, KDA, LSDA) sharing one weighted
reduced-rank regression form, a linear SVM, detection metrics, subject-wise
sampling and a config-driven benchmark harness.
"""

__version__ = "0.1.0"

# Core imports
from .classify import LinearSvmModel, TuningGrid, TuningResult, decision_scores, train_svm, tune
from .datasets import FeatureMatrix, gen_au_like, gen_clusters, gen_swiss_roll, load_csv, save_csv
from .exceptions import DimredError
from .kernels import KernelSpec
from .methods import (
    DrModel,
    EnergyPolicy,
    fit_kda,
    fit_kpca,
    fit_lda,
    fit_lle,
    fit_lpp,
    fit_lsda,
    fit_pca,
    load_model,
    save_model,
    transform,
    wkrrr_solve,
)
from .metrics import ConfusionCounts, RocCurve, cohens_kappa, f1, roc_and_auc
from .sampling import downsample, split_subjects, subject_folds

__all__ = [
    # Methods
    "DrModel",
    "EnergyPolicy",
    "KernelSpec",
    "fit_pca",
    "fit_kpca",
    "fit_lle",
    "fit_lpp",
    "fit_lda",
    "fit_kda",
    "fit_lsda",
    "transform",
    "save_model",
    "load_model",
    "wkrrr_solve",

    # Classification and evaluation
    "LinearSvmModel",
    "TuningGrid",
    "TuningResult",
    "train_svm",
    "decision_scores",
    "tune",
    "ConfusionCounts",
    "RocCurve",
    "roc_and_auc",
    "f1",
    "cohens_kappa",
    "subject_folds",
    "downsample",
    "split_subjects",

    # Data
    "FeatureMatrix",
    "load_csv",
    "save_csv",
    "gen_clusters",
    "gen_swiss_roll",
    "gen_au_like",

    # Errors
    "DimredError",
]
