"""
Tests for experiment configs, the benchmark runner, report writers and timing
"""

import copy
import json

import numpy as np
import pytest

from simple_dimred.bench import (
    derive_seed,
    emit_roc,
    load_config,
    loglog_slope,
    parse_config,
    run_experiment,
    run_timing,
    write_report,
)
from simple_dimred.bench.config import config_schema
from simple_dimred.exceptions import ConfigError, MissingCell


def _config_error_path(doc):
    with pytest.raises(ConfigError) as info:
        parse_config(doc)
    return info.value.path


class TestConfig:
    """Test parse_config and load_config"""

    def test_parses_defaults(self, experiment_doc):
        """Omitted sections take their defaults"""
        doc = {k: experiment_doc[k] for k in ("seed", "dataset", "labels", "methods")}
        config = parse_config(doc)
        assert config.sampling.neg_per_pos == 10.0
        assert config.cv.folds == 5
        assert config.jobs == 1
        assert config.method_names == ["none"]

    def test_method_objects(self, experiment_doc):
        """Methods may carry fixed params and a grid"""
        lsda = {"name": "lsda", "params": {"p": 8}, "grid": {"alpha": [0.2, 0.8]}}
        experiment_doc["methods"] = ["pca", lsda]
        config = parse_config(experiment_doc)
        assert config.methods[1].params == {"p": 8}
        assert config.methods[1].grid == {"alpha": (0.2, 0.8)}

    def test_missing_seed(self, experiment_doc):
        del experiment_doc["seed"]
        assert _config_error_path(experiment_doc) == "seed"

    def test_unknown_top_level_field(self, experiment_doc):
        experiment_doc["bogus"] = 1
        assert _config_error_path(experiment_doc) == "bogus"

    def test_unknown_method_param(self, experiment_doc):
        """The error path points into the offending method"""
        experiment_doc["methods"] = ["none", {"name": "pca", "params": {"x": 1}}]
        assert _config_error_path(experiment_doc) == "methods[1].params.x"

    def test_duplicate_method(self, experiment_doc):
        experiment_doc["methods"] = ["pca", "pca"]
        assert _config_error_path(experiment_doc) == "methods[1].name"

    def test_generator_seed_rejected(self, experiment_doc):
        """Dataset seeds derive from the root seed"""
        experiment_doc["dataset"]["params"]["seed"] = 3
        assert _config_error_path(experiment_doc) == "dataset.params.seed"

    def test_energy_and_k(self, experiment_doc):
        experiment_doc["methods"] = [{"name": "pca", "params": {"energy": 0.9, "k": 2}}]
        assert _config_error_path(experiment_doc) == "methods[0].params"

    def test_train_fraction_below_one(self, experiment_doc):
        experiment_doc["sampling"]["train_fraction"] = 1.0
        assert _config_error_path(experiment_doc) == "sampling.train_fraction"

    def test_bad_grid_value(self, experiment_doc):
        experiment_doc["methods"] = [{"name": "lsda", "grid": {"alpha": [0.5, 2.0]}}]
        assert _config_error_path(experiment_doc) == "methods[0].grid.alpha[1]"

    def test_load_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_overrides(self, experiment_doc):
        config = parse_config(experiment_doc).with_overrides(seed=11, jobs=2)
        assert (config.seed, config.jobs) == (11, 2)
        with pytest.raises(ConfigError):
            config.with_overrides(jobs=0)

    def test_schema(self):
        schema = config_schema()
        assert schema["required"] == ["seed", "dataset", "labels", "methods"]
        json.dumps(schema)


class TestDeriveSeed:
    """Test derive_seed"""

    def test_stable_and_distinct(self):
        assert derive_seed(7, "cell", "12", "lda") == derive_seed(7, "cell", "12", "lda")
        assert derive_seed(7, "cell", "12", "lda") != derive_seed(7, "cell", "12", "pca")
        assert 0 <= derive_seed(0) < 2 ** 32


class TestRunner:
    """Test run_experiment end to end on small separable data"""

    def test_separable_auc(self, experiment_doc):
        """Well-separated clusters are detected almost perfectly"""
        report = run_experiment(parse_config(experiment_doc))
        cell = report.cell("class", "none")
        assert cell.auc > 0.99
        assert cell.f1 > 0.9
        assert cell.cost == 1.0
        assert cell.n_train + cell.n_test == 300

    def test_missing_cell(self, experiment_doc):
        report = run_experiment(parse_config(experiment_doc))
        with pytest.raises(MissingCell):
            report.cell("class", "lda")

    def test_unknown_label(self, experiment_doc):
        """A label absent from the dataset is a config error"""
        experiment_doc["labels"] = ["12"]
        with pytest.raises(ConfigError):
            run_experiment(parse_config(experiment_doc))

    def test_reruns_byte_identical(self, experiment_doc, tmp_path):
        """Same config, identical report files"""
        config = parse_config(experiment_doc)
        first = write_report(run_experiment(config), tmp_path / "a")
        second = write_report(run_experiment(config), tmp_path / "b")
        for name in ("report.csv", "report.txt", "roc/class_none.csv"):
            assert first[name].read_bytes() == second[name].read_bytes()

    def test_jobs_invariance(self, experiment_doc):
        """Worker count does not change the report"""
        experiment_doc["costs"] = [0.1, 1.0, 10.0]
        config = parse_config(experiment_doc)
        serial = run_experiment(config)
        parallel = run_experiment(config.with_overrides(jobs=3))
        assert serial.to_frame().equals(parallel.to_frame())

    @pytest.mark.slow
    def test_reducers_run(self, experiment_doc):
        """Every linear reducer produces a usable cell"""
        experiment_doc["methods"] = ["none", "pca", "lda", {"name": "lpp", "params": {"p": 8}}]
        report = run_experiment(parse_config(experiment_doc))
        for method in ("none", "pca", "lda", "lpp"):
            assert report.cell("class", method).auc > 0.95


class TestReport:
    """Test report writers"""

    def test_write_report_files(self, experiment_doc, tmp_path):
        """report.csv, report.txt, walltime.csv and one ROC per cell"""
        written = write_report(run_experiment(parse_config(experiment_doc)), tmp_path)
        assert set(written) == {"report.csv", "report.txt", "roc/class_none.csv", "walltime.csv"}
        header = (tmp_path / "report.csv").read_text().splitlines()[0]
        assert header == "label,method,metric_kind,value"
        assert "threshold rule" in (tmp_path / "report.txt").read_text()
        assert not list(tmp_path.glob(".*.tmp"))

    def test_emit_roc(self, experiment_doc, tmp_path):
        report = run_experiment(parse_config(experiment_doc))
        path = emit_roc(report, "class", "none", tmp_path / "roc.csv")
        lines = path.read_text().splitlines()
        assert lines[0] == "fpr,tpr"
        assert lines[1] == "0,0"
        with pytest.raises(MissingCell):
            emit_roc(report, "class", "kda", tmp_path / "missing.csv")


class TestTiming:
    """Test the timing harness"""

    def test_loglog_slope(self):
        """Quadratic timings give slope 2"""
        assert loglog_slope([100, 200, 400], [1.0, 4.0, 16.0]) == pytest.approx(2.0)
        assert np.isnan(loglog_slope([100], [1.0]))

    @pytest.mark.slow
    def test_run_timing_small(self, experiment_doc):
        """Rows for every (method, size) and a finite slope per method"""
        doc = copy.deepcopy(experiment_doc)
        doc["timing"] = {"n": 60, "positives": 6, "d": 4, "repeats": 1, "sizes": [40, 60],
                         "methods": ["pca", "lda"]}
        table = run_timing(parse_config(doc))
        assert len(table.rows) == 4
        assert table.seconds("lda", 40) >= 0.0
        assert set(table.slopes) == {"pca", "lda"}
        assert all(np.isfinite(s) for s in table.slopes.values())
        assert list(table.to_frame().columns)[-2:] == ["computational", "memory"]
