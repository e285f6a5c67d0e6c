"""
Test configuration and fixtures for simple-dimred tests
"""

import numpy as np
import pytest

from simple_dimred.datasets import gen_clusters
from simple_dimred.store import ResultStore


# Fixtures
@pytest.fixture
def rng():
    """Seeded generator so every test draws the same numbers"""
    return np.random.default_rng(1234)


@pytest.fixture
def clusters():
    """Two well-separated classes, d=6, n=120, 15 subjects"""
    return gen_clusters(d=6, n=120, classes=2, separation=6.0, seed=3, n_subjects=15)


@pytest.fixture
def anisotropic(rng):
    """d=6, n=80 data with a clearly separated spectrum"""
    scales = np.array([10.0, 6.0, 3.0, 0.5, 0.2, 0.1])
    return scales[:, None] * rng.standard_normal((6, 80))


@pytest.fixture
def store():
    """Results store on an in-memory SQLite database"""
    client = ResultStore("sqlite:///:memory:")

    yield client

    # Cleanup
    client.close()


@pytest.fixture
def experiment_doc(tmp_path):
    """Small, fast experiment on separable clusters with the no-DR control"""
    return {
        "seed": 7,
        "dataset": {
            "source": "generator",
            "generator": "clusters",
            "params": {"d": 5, "n": 300, "separation": 8.0, "n_subjects": 15},
        },
        "labels": ["class"],
        "methods": ["none"],
        "sampling": {"keep_fraction": 0.5, "neg_per_pos": 1.0, "train_fraction": 0.6},
        "cv": {"folds": 3},
        "costs": [1.0],
        "output": str(tmp_path / "results"),
    }
