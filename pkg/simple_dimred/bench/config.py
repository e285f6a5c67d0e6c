"""
Experiment configuration for the benchmark runner

An experiment is one JSON document (see `config_schema()` or
`simple-dimred --print-schema`). It is parsed into frozen dataclasses;
every validation failure raises ConfigError carrying the dotted path of the
offending field, e.g. ``methods[2].params.alpha``.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from ..classify import DEFAULT_COSTS
from ..exceptions import ConfigError
from ..kernels import KernelSpec
from ..methods import METHODS
from ..sampling import (
    DEFAULT_FOLDS,
    DEFAULT_KEEP_FRACTION,
    DEFAULT_NEG_PER_POS,
    DEFAULT_TRAIN_FRACTION,
)

logger = logging.getLogger(__name__)

# Method names accepted in a config: the seven reducers plus the no-DR control
BENCH_METHODS: Tuple[str, ...] = METHODS + ("none",)
GENERATORS = ("clusters", "au_like", "swiss_roll")
MODES = ("split", "loso")

# Parameters each method accepts, fixed or as a tuning grid
METHOD_PARAMS: Dict[str, Tuple[str, ...]] = {
    "none": (),
    "pca": ("energy", "k", "route"),
    "kpca": ("energy", "k", "kernel", "sigma"),
    "lle": ("p", "reg", "k"),
    "lpp": ("p", "sigma", "energy", "k"),
    "lda": ("route",),
    "kda": ("kernel", "sigma", "ridge"),
    "lsda": ("p", "alpha"),
}

DEFAULT_TIMING_SIZES = (500, 1000, 2000, 4000)


def derive_seed(seed: int, *parts: Any) -> int:
    """Stable 32-bit seed for a sub-task, independent of execution order"""
    text = "|".join([str(seed)] + [str(p) for p in parts])
    return int.from_bytes(hashlib.sha256(text.encode("utf-8")).digest()[:4], "big")


# ===== Config sections =====

@dataclass(frozen=True)
class DatasetConfig:
    """
    Where samples come from.

    Attributes:
        source: 'file' or 'generator'
        path: CSV path for file sources
        generator: Generator name for generator sources
        params: Generator keyword arguments (seed is supplied by the runner)
        feature_columns: Optional explicit feature columns for file sources
        subject_column: Subject id column for file sources
    """
    source: str = "generator"
    path: Optional[str] = None
    generator: str = "au_like"
    params: Dict[str, Any] = field(default_factory=dict)
    feature_columns: Optional[Tuple[str, ...]] = None
    subject_column: str = "subject"


@dataclass(frozen=True)
class MethodConfig:
    """One reducer under test with its fixed parameters and tuning grid"""
    name: str
    params: Dict[str, Any] = field(default_factory=dict)
    grid: Dict[str, Tuple[Any, ...]] = field(default_factory=dict)


@dataclass(frozen=True)
class SamplingConfig:
    keep_fraction: float = DEFAULT_KEEP_FRACTION
    neg_per_pos: float = DEFAULT_NEG_PER_POS
    train_fraction: float = DEFAULT_TRAIN_FRACTION


@dataclass(frozen=True)
class CvConfig:
    """Tuning protocol: 'split' uses subject folds, 'loso' one fold per subject"""
    folds: int = DEFAULT_FOLDS
    mode: str = "split"


@dataclass(frozen=True)
class TimingConfig:
    n: int = 3300
    positives: int = 300
    d: int = 128
    repeats: int = 3
    sizes: Tuple[int, ...] = DEFAULT_TIMING_SIZES
    methods: Tuple[str, ...] = METHODS


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Parsed experiment document.

    Attributes:
        seed: Root seed; every random choice downstream derives from it
        dataset: Sample source
        labels: Target labels to evaluate, in report order
        methods: Reducers to compare, in report order
        sampling: Downsampling and train/test split parameters
        cv: Tuning protocol
        costs: SVM cost grid
        output: Output directory
        jobs: Worker threads for grid cells
        timing: Timing harness parameters
    """
    seed: int
    dataset: DatasetConfig
    labels: Tuple[str, ...]
    methods: Tuple[MethodConfig, ...]
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    cv: CvConfig = field(default_factory=CvConfig)
    costs: Tuple[float, ...] = DEFAULT_COSTS
    output: str = "results"
    jobs: int = 1
    timing: TimingConfig = field(default_factory=TimingConfig)

    @property
    def method_names(self) -> List[str]:
        return [m.name for m in self.methods]

    def with_overrides(self, seed: Optional[int] = None, output: Optional[str] = None,
                       jobs: Optional[int] = None) -> "ExperimentConfig":
        """Apply command-line overrides"""
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = int(seed)
        if output is not None:
            changes["output"] = str(output)
        if jobs is not None:
            if jobs < 1:
                raise ConfigError("jobs", f"must be >= 1, got {jobs}")
            changes["jobs"] = int(jobs)
        return replace(self, **changes) if changes else self


# ===== Field validation helpers =====

def _require_mapping(value: Any, path: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ConfigError(path, f"expected an object, got {type(value).__name__}")
    return value


def _reject_unknown(data: Mapping[str, Any], allowed, path: str) -> None:
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        prefix = f"{path}." if path else ""
        raise ConfigError(f"{prefix}{unknown[0]}", f"unknown field (allowed: {sorted(allowed)})")


def _int(value: Any, path: str, minimum: Optional[int] = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        raise ConfigError(path, f"must be >= {minimum}, got {value}")
    return value


def _float(value: Any, path: str, low: Optional[float] = None, high: Optional[float] = None,
           low_open: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    value = float(value)
    if low is not None and (value < low or (low_open and value == low)):
        raise ConfigError(path, f"must be {'>' if low_open else '>='} {low}, got {value}")
    if high is not None and value > high:
        raise ConfigError(path, f"must be <= {high}, got {value}")
    return value


def _str(value: Any, path: str, choices: Optional[Tuple[str, ...]] = None) -> str:
    if not isinstance(value, str):
        raise ConfigError(path, f"expected a string, got {value!r}")
    if choices is not None and value not in choices:
        raise ConfigError(path, f"must be one of {list(choices)}, got '{value}'")
    return value


def _list(value: Any, path: str, nonempty: bool = True) -> list:
    if not isinstance(value, list):
        raise ConfigError(path, f"expected a list, got {type(value).__name__}")
    if nonempty and not value:
        raise ConfigError(path, "must not be empty")
    return value


def _method_param(method: str, name: str, value: Any, path: str) -> Any:
    """Validate one method parameter value"""
    if name in ("p", "k"):
        return _int(value, path, minimum=1)
    if name == "energy":
        return _float(value, path, low=0.0, high=1.0, low_open=True)
    if name == "alpha":
        return _float(value, path, low=0.0, high=1.0)
    if name in ("reg", "ridge"):
        return _float(value, path, low=0.0)
    if name == "sigma":
        if value is None:
            return None
        return _float(value, path, low=0.0, low_open=True)
    if name == "route":
        routes = ("spectral", "als") if method == "pca" else ("gep", "ls")
        return _str(value, path, routes)
    if name == "kernel":
        data = _require_mapping(value, path)
        _reject_unknown(data, ("kind", "sigma", "degree", "offset"), path)
        try:
            return KernelSpec.from_dict(dict(data)).to_dict()
        except ValueError as e:
            raise ConfigError(path, str(e)) from None
    raise ConfigError(path, f"unknown parameter for '{method}'")


def _unknown_param(method: str, allowed) -> str:
    return f"unknown parameter for '{method}' (allowed: {list(allowed)})"


# ===== Section parsers =====

DATASET_FIELDS = ("source", "path", "generator", "params", "feature_columns", "subject_column")


def _parse_dataset(data: Any, path: str = "dataset") -> DatasetConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, DATASET_FIELDS, path)
    source = _str(data.get("source", "generator"), f"{path}.source", ("file", "generator"))
    params = dict(_require_mapping(data.get("params", {}), f"{path}.params"))
    if "seed" in params:
        raise ConfigError(f"{path}.params.seed", "generator seed derives from the root seed")
    if source == "file":
        file_path = _str(data.get("path"), f"{path}.path") if "path" in data else None
        if not file_path:
            raise ConfigError(f"{path}.path", "required for file sources")
        columns = data.get("feature_columns")
        if columns is not None:
            columns = tuple(_str(c, f"{path}.feature_columns[{i}]")
                            for i, c in enumerate(_list(columns, f"{path}.feature_columns")))
        return DatasetConfig(
            source="file",
            path=file_path,
            feature_columns=columns,
            subject_column=_str(data.get("subject_column", "subject"), f"{path}.subject_column"),
        )
    generator = _str(data.get("generator", "au_like"), f"{path}.generator", GENERATORS)
    return DatasetConfig(source="generator", generator=generator, params=params)


def _parse_method(data: Any, path: str) -> MethodConfig:
    if isinstance(data, str):
        data = {"name": data}
    data = _require_mapping(data, path)
    _reject_unknown(data, ("name", "params", "grid"), path)
    name = _str(data.get("name"), f"{path}.name", BENCH_METHODS)
    allowed = METHOD_PARAMS[name]
    params = {}
    raw = _require_mapping(data.get("params", {}), f"{path}.params")
    for key in sorted(raw):
        if key not in allowed:
            raise ConfigError(f"{path}.params.{key}", _unknown_param(name, allowed))
        params[key] = _method_param(name, key, raw[key], f"{path}.params.{key}")
    if "energy" in params and "k" in params:
        raise ConfigError(f"{path}.params", "give either 'energy' or 'k', not both")
    grid = {}
    raw_grid = _require_mapping(data.get("grid", {}), f"{path}.grid")
    for key in sorted(raw_grid):
        if key not in allowed:
            raise ConfigError(f"{path}.grid.{key}", _unknown_param(name, allowed))
        values = _list(raw_grid[key], f"{path}.grid.{key}")
        grid[key] = tuple(
            _method_param(name, key, v, f"{path}.grid.{key}[{i}]") for i, v in enumerate(values)
        )
    return MethodConfig(name=name, params=params, grid=grid)


def _parse_sampling(data: Any, path: str = "sampling") -> SamplingConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, ("keep_fraction", "neg_per_pos", "train_fraction"), path)
    train_fraction = data.get("train_fraction", DEFAULT_TRAIN_FRACTION)
    if _float(train_fraction, f"{path}.train_fraction") >= 1.0:
        raise ConfigError(f"{path}.train_fraction", f"must be < 1, got {train_fraction}")
    return SamplingConfig(
        keep_fraction=_float(
            data.get("keep_fraction", DEFAULT_KEEP_FRACTION),
            f"{path}.keep_fraction",
            low=0.0,
            high=1.0,
            low_open=True,
        ),
        neg_per_pos=_float(
            data.get("neg_per_pos", DEFAULT_NEG_PER_POS), f"{path}.neg_per_pos", low=0.0
        ),
        train_fraction=_float(
            train_fraction, f"{path}.train_fraction", low=0.0, high=1.0, low_open=True
        ),
    )


def _parse_cv(data: Any, path: str = "cv") -> CvConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, ("folds", "mode"), path)
    return CvConfig(
        folds=_int(data.get("folds", DEFAULT_FOLDS), f"{path}.folds", minimum=2),
        mode=_str(data.get("mode", "split"), f"{path}.mode", MODES),
    )


def _parse_timing(data: Any, path: str = "timing") -> TimingConfig:
    data = _require_mapping(data, path)
    _reject_unknown(data, ("n", "positives", "d", "repeats", "sizes", "methods"), path)
    n = _int(data.get("n", 3300), f"{path}.n", minimum=20)
    positives = _int(data.get("positives", 300), f"{path}.positives", minimum=2)
    if positives >= n:
        raise ConfigError(f"{path}.positives", f"must be < n ({n}), got {positives}")
    sizes = data.get("sizes", list(DEFAULT_TIMING_SIZES))
    sizes = tuple(
        _int(s, f"{path}.sizes[{i}]", minimum=20)
        for i, s in enumerate(_list(sizes, f"{path}.sizes"))
    )
    methods = data.get("methods", list(METHODS))
    methods = tuple(
        _str(m, f"{path}.methods[{i}]", METHODS)
        for i, m in enumerate(_list(methods, f"{path}.methods"))
    )
    return TimingConfig(
        n=n,
        positives=positives,
        d=_int(data.get("d", 128), f"{path}.d", minimum=1),
        repeats=_int(data.get("repeats", 3), f"{path}.repeats", minimum=1),
        sizes=sizes,
        methods=methods,
    )


TOP_LEVEL_FIELDS = (
    "seed",
    "dataset",
    "labels",
    "methods",
    "sampling",
    "cv",
    "costs",
    "output",
    "jobs",
    "timing",
)


def parse_config(data: Any) -> ExperimentConfig:
    """
    Validate a decoded JSON document.

    Raises:
        ConfigError: With the dotted path of the first invalid field
    """
    data = _require_mapping(data, "")
    _reject_unknown(data, TOP_LEVEL_FIELDS, "")
    if "seed" not in data:
        raise ConfigError("seed", "required")
    seed = _int(data["seed"], "seed", minimum=0)
    if "dataset" not in data:
        raise ConfigError("dataset", "required")
    dataset = _parse_dataset(data["dataset"])

    labels = tuple(
        _str(v, f"labels[{i}]") for i, v in enumerate(_list(data.get("labels"), "labels"))
    )
    if len(set(labels)) != len(labels):
        raise ConfigError("labels", "duplicate label")
    methods = tuple(
        _parse_method(m, f"methods[{i}]")
        for i, m in enumerate(_list(data.get("methods"), "methods"))
    )
    names = [m.name for m in methods]
    for i, name in enumerate(names):
        if name in names[:i]:
            raise ConfigError(f"methods[{i}].name", f"duplicate method '{name}'")

    costs = data.get("costs", list(DEFAULT_COSTS))
    costs = tuple(
        _float(c, f"costs[{i}]", low=0.0, low_open=True)
        for i, c in enumerate(_list(costs, "costs"))
    )
    return ExperimentConfig(
        seed=seed,
        dataset=dataset,
        labels=labels,
        methods=methods,
        sampling=_parse_sampling(data.get("sampling", {})),
        cv=_parse_cv(data.get("cv", {})),
        costs=costs,
        output=_str(data.get("output", "results"), "output"),
        jobs=_int(data.get("jobs", 1), "jobs", minimum=1),
        timing=_parse_timing(data.get("timing", {})),
    )


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Read and validate an experiment document.

    Raises:
        ConfigError: If the file is missing, is not JSON or fails validation
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("", f"cannot read config {path}: {e}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("", f"{path} is not valid JSON (line {e.lineno}): {e.msg}") from None
    config = parse_config(data)
    logger.info(
        f"Loaded config {path}: labels={list(config.labels)}, methods={config.method_names}"
    )
    return config


def config_schema() -> Dict[str, Any]:
    """JSON schema of the experiment document"""
    number = {"type": "number"}
    param_props = {
        "energy": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "k": {"type": "integer", "minimum": 1},
        "p": {"type": "integer", "minimum": 1},
        "reg": {"type": "number", "minimum": 0},
        "ridge": {"type": "number", "minimum": 0},
        "alpha": {"type": "number", "minimum": 0, "maximum": 1},
        "sigma": {"type": ["number", "null"], "exclusiveMinimum": 0},
        "route": {"type": "string", "enum": ["spectral", "als", "gep", "ls"]},
        "kernel": {
            "type": "object",
            "properties": {
                "kind": {"type": "string", "enum": ["linear", "rbf", "polynomial"]},
                "sigma": {"type": ["number", "null"]},
                "degree": {"type": "integer", "minimum": 1},
                "offset": number,
            },
            "additionalProperties": False,
        },
    }
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "title": "simple-dimred experiment",
        "type": "object",
        "required": ["seed", "dataset", "labels", "methods"],
        "additionalProperties": False,
        "properties": {
            "seed": {"type": "integer", "minimum": 0},
            "dataset": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "source": {"type": "string", "enum": ["file", "generator"]},
                    "path": {"type": "string"},
                    "generator": {"type": "string", "enum": list(GENERATORS)},
                    "params": {"type": "object"},
                    "feature_columns": {"type": "array", "items": {"type": "string"}},
                    "subject_column": {"type": "string"},
                },
            },
            "labels": {"type": "array", "items": {"type": "string"}, "minItems": 1},
            "methods": {
                "type": "array",
                "minItems": 1,
                "items": {
                    "oneOf": [
                        {"type": "string", "enum": list(BENCH_METHODS)},
                        {
                            "type": "object",
                            "required": ["name"],
                            "additionalProperties": False,
                            "properties": {
                                "name": {"type": "string", "enum": list(BENCH_METHODS)},
                                "params": {"type": "object", "properties": param_props},
                                "grid": {
                                    "type": "object",
                                    "additionalProperties": {"type": "array", "minItems": 1},
                                },
                            },
                        },
                    ]
                },
            },
            "sampling": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "keep_fraction": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                    "neg_per_pos": {"type": "number", "minimum": 0},
                    "train_fraction": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                },
            },
            "cv": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "folds": {"type": "integer", "minimum": 2},
                    "mode": {"type": "string", "enum": list(MODES)},
                },
            },
            "costs": {
                "type": "array",
                "items": {"type": "number", "exclusiveMinimum": 0},
                "minItems": 1,
            },
            "output": {"type": "string"},
            "jobs": {"type": "integer", "minimum": 1},
            "timing": {
                "type": "object",
                "additionalProperties": False,
                "properties": {
                    "n": {"type": "integer", "minimum": 20},
                    "positives": {"type": "integer", "minimum": 2},
                    "d": {"type": "integer", "minimum": 1},
                    "repeats": {"type": "integer", "minimum": 1},
                    "sizes": {"type": "array", "items": {"type": "integer", "minimum": 20}},
                    "methods": {
                        "type": "array",
                        "items": {"type": "string", "enum": list(METHODS)},
                    },
                },
            },
        },
    }
