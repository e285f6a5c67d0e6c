"""
End-to-end benchmark runner

Per label: downsample, split subjects 60/40, tune reducer + SVM by subject-wise
cross-validated F1 on the training subjects, refit, score the held-out
subjects. Every method of a label shares one sample selection, one split
and one fold assignment.
"""

import logging
import time
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from ..classify import (
    Embedder,
    ReducerFactory,
    TuningGrid,
    cross_validated_scores,
    decision_scores,
    train_svm,
    tune,
)
from ..datasets import FeatureMatrix, gen_au_like, gen_clusters, gen_swiss_roll, load_csv
from ..exceptions import CellError, ConfigError, DimredError
from ..kernels import KernelSpec
from ..methods import (
    DrModel,
    EnergyPolicy,
    default_lpp_graph,
    extend_lle,
    fit_kda,
    fit_kpca,
    fit_lda,
    fit_lle,
    fit_lpp,
    fit_lsda,
    fit_pca,
    transform,
)
from ..metrics import best_f1_threshold, cohens_kappa, confusion_counts, f1, roc_and_auc
from ..sampling import (
    assert_disjoint,
    downsample,
    leave_one_subject_out,
    split_subjects,
    subject_folds,
)
from .config import ExperimentConfig, MethodConfig, derive_seed
from .report import CellResult, EvalReport, write_report

logger = logging.getLogger(__name__)

GENERATOR_FUNCS = {
    "clusters": gen_clusters,
    "au_like": gen_au_like,
    "swiss_roll": gen_swiss_roll,
}


# ===== Dataset =====

def load_dataset(config: ExperimentConfig) -> FeatureMatrix:
    """
    Load or generate the experiment's samples.

    Raises:
        ConfigError: If generator parameters are rejected or a label is absent
    """
    spec = config.dataset
    if spec.source == "file":
        columns = list(spec.feature_columns) if spec.feature_columns else None
        fm = load_csv(spec.path, feature_columns=columns, subject_column=spec.subject_column)
    else:
        generator = GENERATOR_FUNCS[spec.generator]
        try:
            fm = generator(seed=derive_seed(config.seed, "dataset"), **spec.params)
        except TypeError as e:
            raise ConfigError("dataset.params", str(e)) from None
    for i, label in enumerate(config.labels):
        if label not in fm.labels:
            raise ConfigError(
                f"labels[{i}]",
                f"dataset has no label '{label}' (available: {sorted(fm.labels)})",
            )
    return fm


# ===== Reducers =====

def _policy(params: Dict[str, Any]) -> Optional[EnergyPolicy]:
    if "k" in params:
        return EnergyPolicy.fixed(int(params["k"]))
    if "energy" in params:
        return EnergyPolicy.energy(float(params["energy"]))
    return None


def _kernel(params: Dict[str, Any]) -> KernelSpec:
    spec = KernelSpec.from_dict(params.get("kernel") or {})
    if "sigma" in params:
        spec = replace(spec, sigma=params["sigma"])
    return spec


def fit_method(
    method: str, x: np.ndarray, y: np.ndarray, params: Dict[str, Any]
) -> Optional[DrModel]:
    """
    Fit one reducer with benchmark parameters.

    Returns:
        The fitted model, or None for the no-DR control
    """
    if method == "none":
        return None
    if method == "pca":
        return fit_pca(x, policy=_policy(params), route=params.get("route", "spectral"))
    if method == "kpca":
        return fit_kpca(x, spec=_kernel(params), policy=_policy(params))
    if method == "lle":
        return fit_lle(x, p=params.get("p", 12), reg=params.get("reg", 1e-3), k=params.get("k", 2))
    if method == "lpp":
        p = params.get("p", 12)
        graph = None
        if params.get("sigma") is not None:
            graph = default_lpp_graph(x, p, params["sigma"])
        return fit_lpp(x, graph=graph, policy=_policy(params), p=p)
    if method == "lda":
        return fit_lda(x, y, route=params.get("route", "gep"))
    if method == "kda":
        return fit_kda(x, y, spec=_kernel(params), ridge=params.get("ridge"))
    if method == "lsda":
        return fit_lsda(x, y, p=params.get("p", 12), alpha=params.get("alpha", 0.5))
    raise ValueError(f"Unknown method '{method}'")


def embedder(model: Optional[DrModel], train_x: np.ndarray) -> Embedder:
    """
    Map features to the model's embedding.

    LLE embeds its own training columns with the fitted coordinates and other
    samples with the neighbour-reconstruction extension.
    """
    if model is None:
        return lambda data: data
    if model.method == "lle":
        def embed(data: np.ndarray) -> np.ndarray:
            if data.shape == train_x.shape and np.array_equal(data, train_x):
                return np.array(model.train_embedding)
            return extend_lle(model, data)
        return embed
    return lambda data: transform(model, data)


def make_reducer(method: MethodConfig) -> ReducerFactory:
    """Reducer factory merging the method's fixed parameters with a grid setting"""
    def factory(x: np.ndarray, y: np.ndarray, setting: Dict[str, Any]) -> Embedder:
        params = {**method.params, **setting}
        return embedder(fit_method(method.name, x, y, params), x)
    return factory


# ===== Cells =====

def evaluate_cell(
    data: FeatureMatrix,
    label: str,
    method: MethodConfig,
    train_idx: np.ndarray,
    test_idx: np.ndarray,
    fold_ids: np.ndarray,
    config: ExperimentConfig,
) -> CellResult:
    """
    Tune, refit and test one (label, method) cell.

    Raises:
        CellError: Wrapping any module error, annotated with the cell
    """
    started = time.perf_counter()
    seed = derive_seed(config.seed, "cell", label, method.name)
    x = data.features
    y = (data.label(label) > 0).astype(np.int64)
    x_train, y_train, subjects_train = x[:, train_idx], y[train_idx], data.subjects[train_idx]
    x_test, y_test = x[:, test_idx], y[test_idx]
    reducer = make_reducer(method)
    try:
        grid = TuningGrid(cost_values=config.costs, dr_params=dict(method.grid))
        tuned = tune(x_train, y_train, subjects_train, grid, seed=seed, reducer=reducer,
                     jobs=config.jobs, fold_ids=fold_ids)
        held_out = cross_validated_scores(
            x_train, y_train, subjects_train, tuned.params, tuned.cost,
            seed=seed, reducer=reducer, fold_ids=fold_ids,
        )
        threshold, _ = best_f1_threshold(held_out, y_train)

        model = fit_method(method.name, x_train, y_train, {**method.params, **tuned.params})
        embed = embedder(model, x_train)
        svm = train_svm(embed(x_train), y_train, tuned.cost, seed=seed)
        scores = decision_scores(svm, embed(x_test))
        roc = roc_and_auc(scores, y_test)
        counts = confusion_counts(scores >= threshold, y_test)
    except DimredError as e:
        raise CellError(label, method.name, e) from e

    elapsed = time.perf_counter() - started
    result = CellResult(
        label=label,
        method=method.name,
        auc=roc.auc,
        f1=f1(counts),
        kappa=cohens_kappa(counts),
        threshold=float(threshold),
        cost=float(tuned.cost),
        cv_f1=float(tuned.f1),
        params={**method.params, **tuned.params},
        roc=roc,
        n_train=int(train_idx.size),
        n_test=int(test_idx.size),
        wall_time=elapsed,
        warnings=tuple(model.warnings) if model is not None else (),
    )
    logger.info(f"Cell {label}/{method.name}: auc={result.auc:.4f} f1={result.f1:.4f} "
                f"kappa={result.kappa:.4f} C={result.cost} ({elapsed:.2f}s)")
    return result


def prepare_label(fm: FeatureMatrix, label: str, config: ExperimentConfig):
    """
    Shared sampling for every method of a label.

    Returns:
        Tuple (selected data, train indices, test indices, fold ids over the
        training part, sampling warnings)
    """
    selection = downsample(
        fm.label(label), fm.subjects,
        keep_fraction=config.sampling.keep_fraction,
        neg_per_pos=config.sampling.neg_per_pos,
        seed=derive_seed(config.seed, "downsample", label),
    )
    data = fm.select(selection.indices)
    train_idx, test_idx = split_subjects(
        data.subjects, config.sampling.train_fraction, seed=derive_seed(config.seed, "split", label)
    )
    is_train = np.zeros(data.n, dtype=bool)
    is_train[train_idx] = True
    assert_disjoint(data.subjects, is_train, ~is_train)

    train_subjects = data.subjects[train_idx]
    if config.cv.mode == "loso":
        fold_ids = leave_one_subject_out(train_subjects)
    else:
        seed = derive_seed(config.seed, "folds", label)
        fold_ids = subject_folds(train_subjects, config.cv.folds, seed=seed)
    logger.info(f"Label {label}: {selection.positives} positives, {selection.negatives} negatives, "
                f"{train_idx.size} train / {test_idx.size} test samples")
    return data, train_idx, test_idx, fold_ids, selection.warnings


def run_experiment(
    config: ExperimentConfig,
    out: Optional[Union[str, Path]] = None,
    fm: Optional[FeatureMatrix] = None,
) -> EvalReport:
    """
    Run every (label, method) cell of a config.

    Args:
        config: Parsed experiment
        out: Directory to write report files into (nothing written if None)
        fm: Preloaded samples (default: load from the config's dataset)

    Returns:
        EvalReport

    Raises:
        ConfigError: If the dataset does not match the config
        CellError: If a cell fails
    """
    fm = fm if fm is not None else load_dataset(config)
    cells = {}
    warnings: Dict[str, Any] = {}
    for label in config.labels:
        try:
            data, train_idx, test_idx, fold_ids, sample_warnings = prepare_label(fm, label, config)
        except DimredError as e:
            raise CellError(label, "*", e) from e
        if sample_warnings:
            warnings[label] = list(sample_warnings)
        for method in config.methods:
            cells[(label, method.name)] = evaluate_cell(
                data, label, method, train_idx, test_idx, fold_ids, config
            )

    report = EvalReport(
        seed=config.seed,
        labels=tuple(config.labels),
        methods=tuple(config.method_names),
        cells=cells,
        meta={"mode": config.cv.mode, "sampling_warnings": warnings},
    )
    if out is not None:
        write_report(report, out)
    return report
