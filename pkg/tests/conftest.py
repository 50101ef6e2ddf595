"""Shared fixtures for the PySWIPT test suite."""

import numpy as np
import pytest

from pyswipt import create_scenario, create_downlink_channels, create_uplink_channels


@pytest.fixture
def rng():
    """Seeded generator so random tests are reproducible."""
    return np.random.default_rng(12345)


@pytest.fixture
def su_dl_variable():
    """Single-user downlink variable-rate scenario with two sub-channels."""
    return create_scenario("single", "downlink", "variable", K=2, p_t=2.0, p_c=0.5)


@pytest.fixture
def su_ul_variable():
    """Uplink scenario of the power-tone plus water-filling example."""
    return create_scenario("single", "uplink", "variable", K=2, p_t=2.0, p_c=0.5)


@pytest.fixture
def mu_dl_variable():
    return create_scenario("multi", "downlink", "variable", K=2, p_t=2.0, p_c=0.5)


@pytest.fixture
def mu_ul_variable():
    return create_scenario("multi", "uplink", "variable", K=2, p_t=2.0, p_c=0.5)


@pytest.fixture
def equal_downlink():
    """Two equal unit downlink gains."""
    return create_downlink_channels(h=[1.0, 1.0])


@pytest.fixture
def uplink_example():
    """g' = [0.5, 1], g = [1, 0.5]."""
    return create_uplink_channels(g_prime=[0.5, 1.0], g_up=[1.0, 0.5])
