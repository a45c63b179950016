import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from spinvault import RadialGrid, canonical_scenario

# oracles.py lives next to the tests, not in the package
sys.path.insert(0, str(Path(__file__).parent))

# deterministic, CI-friendly: property failures must reproduce byte-for-byte
settings.register_profile("ci", deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("ci")


@pytest.fixture(scope="session")
def canonical():
    return canonical_scenario()


@pytest.fixture(scope="session")
def grid200(canonical):
    return RadialGrid(radius=canonical.cell.radius, n_points=200)


@pytest.fixture(scope="session")
def grid64(canonical):
    return RadialGrid(radius=canonical.cell.radius, n_points=64)
