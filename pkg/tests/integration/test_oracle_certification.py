"""Certification of every policy against the brute-force oracle."""

import pytest

from pyswipt import create_scenario
from pyswipt.validation import verify, random_batch, oracle_scenarios, compare_scheduling

pytestmark = pytest.mark.integration

INSTANCES = 50


def failures(reports):
    return [(r.instance, r.gap, r.violations) for r in reports if not r.passed]


@pytest.mark.parametrize("template", [s for s in oracle_scenarios(K=3) if s.is_fixed_rate],
                         ids=lambda s: s.label)
def test_fixed_rate_policies_match_enumeration(template):
    reports = verify(random_batch(template, INSTANCES, seed=11))
    assert len(reports) == INSTANCES
    assert failures(reports) == []
    assert all(r.policy_streams == r.oracle_streams for r in reports)


@pytest.mark.slow
@pytest.mark.parametrize("user", ["single", "multi"])
def test_exact_downlink_policies_within_half_percent(user):
    template = create_scenario(user, "downlink", "variable", K=3, p_t=10.0)
    reports = verify(random_batch(template, INSTANCES, seed=12), tolerance=5e-3,
                     resolution=0.002, beta_resolution=0.005, bound_choice="exact")
    assert failures(reports) == []


@pytest.mark.slow
@pytest.mark.parametrize("user", ["single", "multi"])
def test_lower_bound_policies_never_beat_the_oracle(user):
    template = create_scenario(user, "downlink", "variable", K=3, p_t=10.0)
    reports = verify(random_batch(template, INSTANCES, seed=13), tolerance=1.0,
                     resolution=0.002, beta_resolution=0.005, bound_choice="lower")
    assert all(not r.violations for r in reports)
    # the grid sits below the true optimum by well under one percent
    assert all(r.policy_objective <= r.oracle_objective * 1.01 + 1e-9 for r in reports)


def test_single_user_uplink_within_half_percent():
    template = create_scenario("single", "uplink", "variable", K=3, p_t=10.0)
    reports = verify(random_batch(template, INSTANCES, seed=14), tolerance=5e-3)
    assert failures(reports) == []


@pytest.mark.slow
def test_sequential_scheduling_close_to_exhaustive():
    gap = compare_scheduling(trials=1000, master_seed=0)
    assert gap.trials == 1000
    assert gap.mean_gap <= 0.02
    assert gap.max_gap <= 0.10
