"""
Linear max-margin classifier and subject-wise hyperparameter tuning

The SVM is trained on its dual with accelerated projected gradient steps;
the projection onto {0 ≤ α ≤ C, yᵀα = 0} is exact, and training stops on a
relative duality-gap certificate.
"""

import itertools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import (
    AllZeroSpectrum,
    DegenerateData,
    DimensionMismatch,
    Diverged,
    NotPositiveDefinite,
    SingleClass,
    Singular,
    SingularLocalGram,
    TooFewSamples,
)
from .metrics import f1_at
from .sampling import DEFAULT_FOLDS, assert_disjoint, subject_folds

logger = logging.getLogger(__name__)

# fit-time failures scored as a zero fold
INFEASIBLE_FOLD_ERRORS = (
    SingleClass,
    TooFewSamples,
    NotPositiveDefinite,
    Singular,
    Diverged,
    SingularLocalGram,
    AllZeroSpectrum,
    DegenerateData,
)

DEFAULT_COSTS: Tuple[float, ...] = (0.01, 0.1, 1.0, 10.0, 100.0)
DEFAULT_SVM_TOL = 1e-5
DEFAULT_SVM_MAX_ITER = 20000
_GAP_CHECK_EVERY = 10

# A reducer factory fits DR on (train features d×n, train labels, params)
# and returns a function mapping d×m features to k×m embeddings
Embedder = Callable[[np.ndarray], np.ndarray]
ReducerFactory = Callable[[np.ndarray, np.ndarray, Dict[str, Any]], Embedder]


@dataclass(frozen=True)
class LinearSvmModel:
    """
    Trained linear SVM.

    Attributes:
        weights: k-vector w
        bias: Offset b
        cost: Hinge-loss weight C
        objective: Primal objective ½‖w‖² + C·Σ hinge at (w, b)
        gap: Final duality gap (upper bound on objective − optimum)
        iterations: Solver iterations used
        seed: Seed recorded for reproducibility bookkeeping
    """
    weights: np.ndarray
    bias: float
    cost: float
    objective: float
    gap: float = 0.0
    iterations: int = 0
    seed: int = 0

    def __repr__(self):
        return (
            f"<LinearSvmModel(k={self.weights.size}, C={self.cost}, "
            f"objective={self.objective:.6g})>"
        )


def _signed(labels) -> np.ndarray:
    return np.where(np.asarray(labels).ravel() > 0, 1.0, -1.0)


def _project(v: np.ndarray, y: np.ndarray, c: float) -> np.ndarray:
    """Euclidean projection onto {0 ≤ α ≤ c, yᵀα = 0}"""
    def balance(mu: float) -> float:
        return float(np.dot(y, np.clip(v - mu * y, 0.0, c)))

    breakpoints = np.unique(np.concatenate([y * v, y * (v - c)]))
    lo, hi = 0, breakpoints.size - 1
    g_lo, g_hi = balance(breakpoints[lo]), balance(breakpoints[hi])
    while hi - lo > 1:
        mid = (lo + hi) // 2
        g_mid = balance(breakpoints[mid])
        if g_mid >= 0:
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    if g_lo == g_hi:
        mu = breakpoints[lo]
    else:
        mu = breakpoints[lo] + g_lo * (breakpoints[hi] - breakpoints[lo]) / (g_lo - g_hi)
    return np.clip(v - mu * y, 0.0, c)


def optimal_bias(margins: np.ndarray, y: np.ndarray) -> float:
    """
    Bias minimising Σ max(0, 1 − y_i(m_i + b)) for fixed margins m = wᵀx.

    Returns the midpoint of the optimal interval.
    """
    breakpoints = y - margins
    pos = np.sort(breakpoints[y > 0])
    neg = np.sort(breakpoints[y < 0])
    candidates = np.unique(breakpoints)
    # slope just right of each candidate
    neg_right = np.searchsorted(neg, candidates, side="right")
    pos_right = np.searchsorted(pos, candidates, side="right")
    right = neg_right - (pos.size - pos_right)
    first = int(np.argmax(right >= 0))
    if right[first] > 0 or first + 1 >= candidates.size:
        return float(candidates[first])
    return float(0.5 * (candidates[first] + candidates[first + 1]))


def svm_objective(x, labels, weights, bias: float, cost: float) -> float:
    """½‖w‖² + C·Σ max(0, 1 − y(wᵀx + b))"""
    x = np.asarray(x, dtype=np.float64)
    y = _signed(labels)
    margins = np.asarray(weights) @ x + bias
    return float(0.5 * np.dot(weights, weights) + cost * np.sum(np.maximum(0.0, 1.0 - y * margins)))


def train_svm(
    x,
    y,
    c: float = 1.0,
    seed: int = 0,
    tol: float = DEFAULT_SVM_TOL,
    max_iter: int = DEFAULT_SVM_MAX_ITER,
) -> LinearSvmModel:
    """
    Train a linear SVM on column samples.

    Samples are first put in a canonical order so the result does not depend
    on the input column order.

    Args:
        x: k×n embedding
        y: Labels (> 0 positive, otherwise negative)
        c: Cost C > 0
        seed: Recorded on the model; the solver itself is deterministic
        tol: Relative duality-gap target
        max_iter: Iteration cap

    Returns:
        LinearSvmModel

    Raises:
        SingleClass: If only one class is present
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    signs = _signed(y)
    if signs.size != x.shape[1]:
        raise DimensionMismatch(f"{x.shape[1]} samples but {signs.size} labels")
    if not c > 0:
        raise ValueError(f"cost must be > 0, got {c}")
    if np.all(signs > 0) or np.all(signs < 0):
        raise SingleClass("SVM training needs both classes")

    order = np.lexsort([signs] + [x[r] for r in range(x.shape[0] - 1, -1, -1)])
    x, signs = x[:, order], signs[order]
    z = x * signs
    n = signs.size
    lipschitz = float(np.linalg.norm(z, 2) ** 2)

    alpha = np.zeros(n)
    if lipschitz == 0.0:
        weights = np.zeros(x.shape[0])
        bias = optimal_bias(np.zeros(n), signs)
        value = svm_objective(x, signs, weights, bias, c)
        return LinearSvmModel(weights, bias, float(c), value, 0.0, 0, seed)

    beta = alpha.copy()
    momentum = 1.0
    gap = np.inf
    iterations = 0
    weights, bias, primal = np.zeros(x.shape[0]), 0.0, np.inf
    for iterations in range(1, max_iter + 1):
        gradient = z.T @ (z @ beta) - 1.0
        updated = _project(beta - gradient / lipschitz, signs, c)
        if np.dot(beta - updated, updated - alpha) > 0:
            momentum = 1.0
        next_momentum = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * momentum ** 2))
        beta = updated + ((momentum - 1.0) / next_momentum) * (updated - alpha)
        alpha, momentum = updated, next_momentum

        if iterations % _GAP_CHECK_EVERY == 0 or iterations == max_iter:
            weights = z @ alpha
            bias = optimal_bias(weights @ x, signs)
            primal = svm_objective(x, signs, weights, bias, c)
            dual = float(alpha.sum() - 0.5 * np.dot(weights, weights))
            gap = primal - dual
            if gap <= tol * max(abs(primal), 1e-12):
                break

    if gap > tol * max(abs(primal), 1e-12):
        logger.warning(f"SVM (C={c}) stopped at gap {gap:.3e} after {iterations} iterations")
    logger.debug(f"SVM C={c}: objective={primal:.8g}, gap={gap:.2e}, iterations={iterations}")
    return LinearSvmModel(
        weights=weights,
        bias=float(bias),
        cost=float(c),
        objective=float(primal),
        gap=float(max(gap, 0.0)),
        iterations=iterations,
        seed=int(seed),
    )


def decision_scores(model: LinearSvmModel, x) -> np.ndarray:
    """
    wᵀx + b per column.

    Raises:
        DimensionMismatch: If x has the wrong number of rows
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x.reshape(1, -1)
    if x.shape[0] != model.weights.size:
        raise DimensionMismatch(f"model expects k={model.weights.size}, got {x.shape[0]}")
    return model.weights @ x + model.bias


# ===== Tuning =====

@dataclass(frozen=True)
class TuningGrid:
    """
    Hyperparameter grid.

    Attributes:
        cost_values: SVM costs, tried in the given order
        dr_params: DR parameter name -> candidate values; settings are the
            product over names in sorted order
    """
    cost_values: Tuple[float, ...] = DEFAULT_COSTS
    dr_params: Dict[str, Tuple[Any, ...]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.cost_values:
            raise ValueError("cost grid is empty")
        if any(not c > 0 for c in self.cost_values):
            raise ValueError(f"costs must be > 0, got {list(self.cost_values)}")
        for name, values in self.dr_params.items():
            if len(values) == 0:
                raise ValueError(f"grid for '{name}' is empty")

    def dr_settings(self) -> List[Dict[str, Any]]:
        names = sorted(self.dr_params)
        combos = itertools.product(*(self.dr_params[n] for n in names))
        return [dict(zip(names, combo)) for combo in combos]

    @property
    def size(self) -> int:
        return len(self.dr_settings()) * len(self.cost_values)


@dataclass(frozen=True)
class TuningResult:
    """Winning setting plus the mean F1 of every setting in grid order"""
    params: Dict[str, Any]
    cost: float
    f1: float
    table: Tuple[Tuple[Dict[str, Any], float, float], ...]


def _identity(x: np.ndarray, y: np.ndarray, params: Dict[str, Any]) -> Embedder:
    return lambda data: data


def _fold_scores(
    x: np.ndarray,
    y: np.ndarray,
    train: np.ndarray,
    val: np.ndarray,
    params: Dict[str, Any],
    costs: Sequence[float],
    reducer: ReducerFactory,
    seed: int,
) -> List[float]:
    """Validation F1 for each cost with DR fitted on the training part"""
    try:
        embed = reducer(x[:, train], y[train], params)
        train_emb = embed(x[:, train])
        val_emb = embed(x[:, val])
        out = []
        for cost in costs:
            model = train_svm(train_emb, y[train], cost, seed=seed)
            out.append(f1_at(decision_scores(model, val_emb), y[val], 0.0))
        return out
    except INFEASIBLE_FOLD_ERRORS as e:
        logger.warning(f"tune: fold with params {params} scored 0 ({type(e).__name__}: {e})")
        return [0.0] * len(costs)


def _fold_ids(subjects, folds: int, seed: int, fold_ids: Optional[np.ndarray]) -> np.ndarray:
    if fold_ids is not None:
        return np.asarray(fold_ids, dtype=np.int64)
    return subject_folds(subjects, folds, seed)


def tune(
    x,
    y,
    subjects,
    grid: Optional[TuningGrid] = None,
    folds: int = DEFAULT_FOLDS,
    seed: int = 0,
    reducer: Optional[ReducerFactory] = None,
    jobs: int = 1,
    fold_ids: Optional[np.ndarray] = None,
) -> TuningResult:
    """
    Pick DR parameters and SVM cost by subject-wise cross-validated F1.

    Each (DR setting, fold) refits the reducer on the fold's training part.
    F1 uses threshold 0 and counts zero predicted positives as 0. Ties go to
    the smaller C, then to the lexicographically smaller parameter set, then
    to the first occurrence.

    Args:
        x: d×n features
        y: Binary labels
        subjects: Per-sample subject ids
        grid: Tuning grid (default: the five-cost grid, no DR parameters)
        folds: Number of subject folds
        seed: Fold shuffling seed
        reducer: DR factory (default: identity)
        jobs: Worker threads; results do not depend on it
        fold_ids: Precomputed fold assignment (overrides folds/seed)

    Returns:
        TuningResult

    Raises:
        TooFewSubjects: If there are fewer subjects than folds
        SubjectLeakage: If a fold shares a subject across its sides
    """
    grid = grid or TuningGrid()
    reducer = reducer or _identity
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y).ravel()
    subjects = np.asarray(subjects, dtype=object).ravel()
    assignment = _fold_ids(subjects, folds, seed, fold_ids)
    fold_values = np.unique(assignment)

    splits = []
    for fold in fold_values.tolist():
        val = assignment == fold
        assert_disjoint(subjects, ~val, val)
        splits.append((np.flatnonzero(~val), np.flatnonzero(val)))

    settings = grid.dr_settings()
    costs = list(grid.cost_values)
    tasks = [(s, f) for s in range(len(settings)) for f in range(len(splits))]

    def run(task):
        s, f = task
        train, val = splits[f]
        return _fold_scores(x, y, train, val, settings[s], costs, reducer, seed)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = [run(task) for task in tasks]

    table = []
    for s, params in enumerate(settings):
        per_fold = np.array([results[s * len(splits) + f] for f in range(len(splits))])
        for ci, cost in enumerate(costs):
            mean = float(sum(per_fold[:, ci].tolist()) / len(splits))
            table.append((params, float(cost), mean))
            logger.debug(f"tune: params={params} C={cost} mean F1={mean:.6f}")

    best = None
    best_key = None
    for params, cost, mean in table:
        key = (-mean, cost, sorted((k, repr(v)) for k, v in params.items()))
        if best_key is None or key < best_key:
            best, best_key = (params, cost, mean), key
    return TuningResult(params=dict(best[0]), cost=best[1], f1=best[2], table=tuple(table))


def cross_validated_scores(
    x,
    y,
    subjects,
    params: Dict[str, Any],
    cost: float,
    folds: int = DEFAULT_FOLDS,
    seed: int = 0,
    reducer: Optional[ReducerFactory] = None,
    fold_ids: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Out-of-fold decision scores for one setting.

    Every sample is scored by a model (DR + SVM) trained without its subject.
    """
    reducer = reducer or _identity
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y).ravel()
    subjects = np.asarray(subjects, dtype=object).ravel()
    assignment = _fold_ids(subjects, folds, seed, fold_ids)
    scores = np.zeros(y.size)
    for fold in np.unique(assignment).tolist():
        val = assignment == fold
        assert_disjoint(subjects, ~val, val)
        train = np.flatnonzero(~val)
        embed = reducer(x[:, train], y[train], params)
        model = train_svm(embed(x[:, train]), y[train], cost, seed=seed)
        scores[val] = decision_scores(model, embed(x[:, val]))
    return scores
