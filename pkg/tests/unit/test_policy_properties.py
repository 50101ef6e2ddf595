"""Property-based checks of the optimal policies over every scenario type."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pyswipt import (
    create_policy,
    create_scenario,
    create_downlink_channels,
    create_uplink_channels,
)
from pyswipt.validation import constraint_violations

pytestmark = pytest.mark.unit

SCENARIO_TYPES = [
    (user, direction, rate)
    for user in ("single", "multi")
    for direction in ("downlink", "uplink")
    for rate in ("variable", "fixed")
]

gain = st.floats(min_value=0.1, max_value=10.0, allow_nan=False)


@st.composite
def instances(draw, user, direction, rate):
    K = draw(st.integers(min_value=1, max_value=4))
    p_t = draw(st.floats(min_value=0.5, max_value=20.0))
    theta = draw(st.floats(min_value=0.5, max_value=20.0))
    if direction == "downlink":
        h = np.array(draw(st.lists(gain, min_size=K, max_size=K)))
        ch = create_downlink_channels(h=h)
        power_gain = float(h.max())
    else:
        g_prime = np.array(draw(st.lists(gain, min_size=K, max_size=K)))
        g_up = np.array(draw(st.lists(gain, min_size=K, max_size=K)))
        ch = create_uplink_channels(g_prime, g_up)
        power_gain = float(g_prime.max())
    p_c = draw(st.floats(min_value=0.0, max_value=1.2)) * p_t * power_gain
    scenario = create_scenario(user, direction, rate, K=K, p_t=p_t, p_c=p_c, theta=theta)
    return scenario, ch


@pytest.mark.parametrize("user,direction,rate", SCENARIO_TYPES)
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_allocations_respect_constraints(user, direction, rate, data):
    scenario, ch = data.draw(instances(user, direction, rate))
    policy = create_policy(scenario)
    alloc, report = policy.evaluate(ch)
    assert np.all(alloc.downlink_powers >= 0)
    assert constraint_violations(alloc, ch, scenario) == []
    if alloc.beta is not None:
        assert np.all((alloc.betas() >= 0) & (alloc.betas() <= 1))
    assert report.spectral_efficiency >= 0
    assert np.all(np.asarray(report.per_stream) >= 0)


# policies that are exactly optimal, so their throughput cannot grow with p_c
MONOTONE = [
    ("single", "uplink", "variable", {}),
    ("multi", "downlink", "variable", {"bound_choice": "exact"}),
] + [(user, direction, "fixed", {}) for user in ("single", "multi") for direction in ("downlink", "uplink")]


@pytest.mark.parametrize("user,direction,rate,options", MONOTONE)
@settings(max_examples=25, deadline=None)
@given(data=st.data(), raise_by=st.floats(min_value=0.0, max_value=5.0))
def test_throughput_non_increasing_in_circuit_power(user, direction, rate, options, data, raise_by):
    scenario, ch = data.draw(instances(user, direction, rate))
    higher = scenario.replace(p_c=scenario.p_c + raise_by)
    low = create_policy(scenario, **options).evaluate(ch)[1].sum_throughput
    high = create_policy(higher, **options).evaluate(ch)[1].sum_throughput
    assert high <= low + 1e-7 * max(1.0, low)


@pytest.mark.parametrize("user,direction,rate", SCENARIO_TYPES)
@settings(max_examples=30, deadline=None)
@given(data=st.data())
def test_optimal_never_below_equal_power(user, direction, rate, data):
    scenario, ch = data.draw(instances(user, direction, rate))
    optimal = create_policy(scenario).evaluate(ch)[1].sum_throughput
    equal = create_policy(scenario, "equal_power").evaluate(ch)[1].sum_throughput
    assert optimal >= equal - 1e-9 * max(1.0, equal)


def budget_options(direction, rate):
    # the lower bound is not monotone in p_t once evaluated exactly
    if (direction, rate) == ("downlink", "variable"):
        return {"bound_choice": "exact"}
    return {}


@pytest.mark.parametrize("user,direction,rate", SCENARIO_TYPES)
@settings(max_examples=25, deadline=None)
@given(data=st.data(), scale=st.floats(min_value=1.0, max_value=10.0))
def test_spectral_efficiency_non_decreasing_in_budget(user, direction, rate, data, scale):
    scenario, ch = data.draw(instances(user, direction, rate))
    options = budget_options(direction, rate)
    low = create_policy(scenario, **options).spectral_efficiency(ch)
    high = create_policy(scenario.replace(p_t=scenario.p_t * scale), **options).spectral_efficiency(ch)
    # the single-user downlink search over beta converges to its own tolerance
    tol = 1e-5 if (user, direction, rate) == ("single", "downlink", "variable") else 1e-7
    assert high >= low - tol * max(1.0, low)
