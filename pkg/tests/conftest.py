from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from mixavg.data_io import Dataset, load_csv

DATA = Path(__file__).parent / "data"

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def iris():
    return load_csv(DATA / "iris.csv", "Species")


@pytest.fixture
def two_blobs():
    rng = np.random.default_rng(3)
    X = np.vstack([rng.normal(0, 1, (60, 2)), rng.normal([8, 0], 1, (60, 2))])
    return Dataset(X, ("a", "b"), np.array(["l"] * 60 + ["r"] * 60, dtype=object))
