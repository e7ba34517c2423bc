"""Shared fixtures.

The delta-barrier propagations take tens of seconds each, so every run
is session-scoped and shared between the module tests and the
acceptance gate.
"""
import numpy as np
import pytest

from ditsim import winter_model as wm


@pytest.fixture(scope="session")
def winter_infinite():
    return wm.run(wm.WinterConfig())


@pytest.fixture(scope="session")
def winter_finite():
    return wm.run(wm.WinterConfig(wall="finite"))


@pytest.fixture(scope="session")
def winter_refined():
    return wm.run(wm.WinterConfig().refined(2))


@pytest.fixture(scope="session")
def winter_u500():
    return wm.run(wm.WinterConfig(U=500.0))


@pytest.fixture(scope="session")
def winter_u2000():
    return wm.run(wm.WinterConfig(U=2000.0))


@pytest.fixture(scope="session")
def fig1_grid():
    return np.arange(100.0, 1200.0 + 0.1, 0.2)
