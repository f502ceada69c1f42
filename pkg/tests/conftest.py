import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from conformal_ts import bench


def _jobs() -> int:
    env = os.environ.get("CONFORMAL_TS_JOBS")
    if env:
        return int(env)
    return min(os.cpu_count() or 1, 4)


@pytest.fixture(scope="session")
def grid_config() -> bench.ExperimentConfig:
    return bench.default_config(replicates=50)


@pytest.fixture(scope="session")
def grid_records(grid_config):
    return bench.run_experiment(grid_config, jobs=_jobs())


@pytest.fixture(scope="session")
def grid_cells(grid_config, grid_records):
    return bench.aggregate(grid_records, replicates=grid_config.replicates)
