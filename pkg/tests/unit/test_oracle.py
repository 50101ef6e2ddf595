"""Tests for the brute-force oracle and verification helpers."""

import numpy as np
import pytest

from pyswipt import (
    Allocation,
    OracleSizeError,
    ValidationError,
    create_scenario,
    create_downlink_channels,
    create_uplink_channels,
    grid_search_allocation,
)
from pyswipt.validation import (
    OracleInstance,
    simplex_grid,
    harvest_split,
    random_batch,
    oracle_scenarios,
    constraint_violations,
    verify,
    compare_scheduling,
    reports_frame,
    policy_options_for,
)
from pyswipt.policies.su_downlink import beta_star

pytestmark = pytest.mark.unit


class TestSimplexGrid:

    @pytest.mark.parametrize("K,steps,rows", [(1, 5, 1), (2, 4, 5), (3, 4, 15)])
    def test_row_count_and_sums(self, K, steps, rows):
        grid = simplex_grid(K, steps)
        assert grid.shape == (rows, K)
        np.testing.assert_allclose(grid.sum(axis=1), 1.0)
        assert np.all(grid >= 0)

    def test_contains_vertices(self):
        grid = simplex_grid(3, 2)
        for vertex in np.eye(3):
            assert any(np.allclose(row, vertex) for row in grid)


def test_harvest_split_matches_closed_form():
    p = create_scenario("single", "downlink", "fixed", K=3, p_t=10.0, p_c=0.7, theta=2.0)
    for k in (1, 2, 3):
        assert harvest_split(p, k) == pytest.approx(beta_star(p, k), abs=1e-10)
    assert harvest_split(p.replace(p_c=0.0), 2) == 1.0


class TestGridSearch:

    def test_waterfilling_instance(self):
        p = create_scenario("single", "uplink", "variable", K=2, p_t=1.0, p_c=0.0)
        ch = create_uplink_channels([1.0, 1.0], [2.0, 1.0])
        solution = grid_search_allocation(p, ch)
        assert solution.objective == pytest.approx(np.log2(2.5) + np.log2(1.25), abs=1e-6)
        np.testing.assert_allclose(solution.allocation.uplink_powers, [0.75, 0.25], atol=1e-9)

    def test_multi_user_downlink_reference(self, mu_dl_variable, equal_downlink):
        solution = grid_search_allocation(mu_dl_variable, equal_downlink, resolution=0.01)
        # equal split: each mobile receives 1 and keeps 0.5 for its circuit
        assert solution.objective == pytest.approx(2 * np.log2(1 + 0.5 / 0.55), abs=1e-9)
        np.testing.assert_allclose(solution.allocation.downlink_powers, [1.0, 1.0])
        np.testing.assert_allclose(solution.allocation.beta, [0.5, 0.5])

    def test_fixed_rate_is_exact(self):
        p = create_scenario("multi", "uplink", "fixed", K=2, p_t=2.0, p_c=0.5, theta=1.0)
        solution = grid_search_allocation(p, create_uplink_channels([1.0, 0.5], [1.0, 1.0]))
        assert solution.objective == pytest.approx(1.0)
        assert solution.allocation.diagnostics.stream_count == 1

    def test_infeasible_instance(self):
        p = create_scenario("single", "downlink", "variable", K=2, p_t=1.0, p_c=5.0)
        solution = grid_search_allocation(p, create_downlink_channels(h=[1.0, 1.0]), resolution=0.1)
        assert solution.objective == 0.0
        assert not solution.allocation.feasible

    def test_size_limits(self):
        p = create_scenario("single", "downlink", "variable", K=4)
        with pytest.raises(OracleSizeError):
            grid_search_allocation(p, create_downlink_channels(h=np.ones(4)))
        fixed = create_scenario("single", "uplink", "fixed", K=21, theta=1.0)
        with pytest.raises(OracleSizeError):
            grid_search_allocation(fixed, create_uplink_channels(np.ones(21), np.ones(21)))

    def test_bad_resolution(self, su_ul_variable, uplink_example):
        with pytest.raises(ValidationError):
            grid_search_allocation(su_ul_variable, uplink_example, resolution=0.0)

    def test_channel_size_mismatch(self, su_ul_variable):
        with pytest.raises(ValidationError):
            grid_search_allocation(su_ul_variable, create_uplink_channels([1.0], [1.0]))


class TestInstances:

    def test_all_scenario_types(self):
        labels = {p.label for p in oracle_scenarios()}
        assert len(labels) == 8

    def test_batch_is_reproducible(self):
        template = oracle_scenarios()[0]
        a = random_batch(template, 3, seed=4)
        b = random_batch(template, 3, seed=4)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(x.channels.h, y.channels.h)
            assert x.scenario.p_c == y.scenario.p_c
        assert a[2].instance == f"{template.label}-2"

    def test_gains_in_range(self):
        for template in oracle_scenarios():
            for item in random_batch(template, 5, seed=1):
                gains = (item.channels.h if template.is_downlink
                         else np.concatenate(item.channels.uplink_gains()))
                assert np.all((gains >= 0.1) & (gains <= 10.0))


class TestVerify:

    def test_fixed_rate_instances_pass(self):
        reports = []
        for template in oracle_scenarios(K=3):
            if template.is_fixed_rate:
                reports.extend(verify(random_batch(template, 5, seed=2)))
        assert len(reports) == 20
        assert all(r.passed for r in reports), [r for r in reports if not r.passed]

    def test_single_user_uplink_passes(self):
        template = create_scenario("single", "uplink", "variable", K=2, p_t=10.0)
        reports = verify(random_batch(template, 5, seed=3), resolution=0.005)
        assert all(r.passed for r in reports)

    def test_multi_user_downlink_exact_passes(self):
        template = create_scenario("multi", "downlink", "variable", K=2, p_t=10.0)
        reports = verify(random_batch(template, 5, seed=6), resolution=0.001, bound_choice="exact")
        assert all(r.passed for r in reports), [r for r in reports if not r.passed]

    def test_violations_fail_the_instance(self, mocker, su_ul_variable, uplink_example):
        policy = mocker.Mock()
        policy.solve.return_value = Allocation(downlink_powers=[0.0, 3.0], uplink_powers=[0.0, 0.0])
        mocker.patch("pyswipt.validation.oracle.create_policy", return_value=policy)
        item = OracleInstance("bad", su_ul_variable, uplink_example)
        [report] = verify([item], resolution=0.05)
        assert not report.passed
        assert any("p_t" in v for v in report.violations)

    def test_constraint_violations(self, su_ul_variable, uplink_example):
        good = Allocation(downlink_powers=[0.0, 2.0], uplink_powers=[1.0, 0.5])
        assert constraint_violations(good, uplink_example, su_ul_variable) == []
        greedy = Allocation(downlink_powers=[0.0, 2.0], uplink_powers=[1.0, 1.0])
        assert constraint_violations(greedy, uplink_example, su_ul_variable)

    def test_reports_frame_columns(self):
        template = create_scenario("multi", "downlink", "fixed", K=2, theta=10.0)
        frame = reports_frame(verify(random_batch(template, 2, seed=0)))
        assert list(frame.columns) == ["instance", "scenario", "oracle_objective",
                                       "policy_objective", "gap", "passed", "violations"]
        assert len(frame) == 2


def test_compare_scheduling_small():
    gap = compare_scheduling(trials=10, master_seed=1)
    assert gap.trials == 10
    assert np.all(gap.gaps >= -1e-9)
    assert 0.0 <= gap.mean_gap <= gap.max_gap + 1e-12


def test_compare_scheduling_rejects_other_scenarios(su_dl_variable):
    with pytest.raises(ValidationError):
        compare_scheduling(trials=1, scenario=su_dl_variable)


def test_policy_options_per_scenario():
    options = {"bound_choice": "upper"}
    su = create_scenario("single", "downlink", "variable")
    mu = create_scenario("multi", "downlink", "variable")
    ul = create_scenario("single", "uplink", "variable")
    assert policy_options_for(su, options) == options
    assert policy_options_for(mu, options) == {}
    assert policy_options_for(mu, {"bound_choice": "exact"}) == {"bound_choice": "exact"}
    assert policy_options_for(ul, {"bound_choice": "exact"}) == {}
