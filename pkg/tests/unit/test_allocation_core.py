"""Tests for water-filling, dual water-filling and greedy channel inversion."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pyswipt import (
    waterfill,
    dual_waterfill_circuit,
    greedy_inversion,
    ValidationError,
    InfeasibleError,
)
from pyswipt.allocation.core import (
    waterfill_nonnegative,
    kkt_residual,
    descending_order,
    ascending_order,
    unpermute,
)

pytestmark = pytest.mark.unit

gain_lists = st.lists(st.floats(min_value=0.05, max_value=20.0), min_size=1, max_size=8)
budgets = st.floats(min_value=0.0, max_value=50.0)


class TestWaterfill:

    def test_two_channel_example(self):
        result = waterfill([2.0, 1.0], 1.0)
        np.testing.assert_allclose(result.powers, [0.75, 0.25])
        assert result.water_level == pytest.approx(1.25)
        assert result.active_set == (0, 1)

    def test_weak_channel_dropped(self):
        result = waterfill([10.0, 0.1], 1.0)
        np.testing.assert_allclose(result.powers, [1.0, 0.0])
        assert result.active_set == (0,)
        assert result.water_level == pytest.approx(1.1)

    def test_zero_budget(self):
        result = waterfill([2.0, 4.0], 0.0)
        assert result.total == 0.0
        assert result.water_level == pytest.approx(0.25)
        assert result.active_set == ()

    def test_equal_gains_equal_powers(self):
        result = waterfill([3.0, 3.0, 3.0], 1.5)
        np.testing.assert_allclose(result.powers, [0.5, 0.5, 0.5])

    @pytest.mark.parametrize("gains", [[], [1.0, 0.0], [1.0, -2.0], [np.nan]])
    def test_invalid_gains(self, gains):
        with pytest.raises(ValidationError):
            waterfill(gains, 1.0)

    def test_invalid_budget(self):
        with pytest.raises(ValidationError):
            waterfill([1.0], -1.0)
        with pytest.raises(ValidationError):
            waterfill([1.0], float("inf"))

    def test_nonnegative_variant_skips_zero_gains(self):
        result = waterfill_nonnegative([0.0, 2.0, 1.0], 1.0)
        np.testing.assert_allclose(result.powers, [0.0, 0.75, 0.25])
        assert result.active_set == (1, 2)
        empty = waterfill_nonnegative([0.0, 0.0], 1.0)
        assert empty.total == 0.0

    @given(gain_lists, budgets)
    @settings(max_examples=200, deadline=None)
    def test_kkt_structure(self, gains, budget):
        g = np.array(gains)
        result = waterfill(g, budget)
        assert result.total == pytest.approx(budget, abs=1e-9 * max(1.0, budget))
        assert np.all(result.powers >= 0)
        if budget > 0:
            eta = result.water_level
            active = result.powers > 0
            np.testing.assert_allclose(result.powers[active], eta - 1.0 / g[active], atol=1e-9 * eta)
            # inactive channels sit above the water level
            assert np.all(1.0 / g[~active] >= eta - 1e-9 * eta)


class TestDualWaterfill:

    def test_slack_harvest_reduces_to_waterfilling(self):
        h = np.array([2.0, 1.0])
        result = dual_waterfill_circuit(h, p_t=1.0, p_c=0.1, beta=0.5, snr_weight=1.0)
        np.testing.assert_allclose(result.powers, [0.75, 0.25])
        lam, mu = result.multipliers
        assert mu == 0.0
        assert lam == pytest.approx(1.0 / 1.25)
        assert result.feasible

    def test_binding_harvest_constraint(self):
        h = np.array([3.0, 1.0])
        p_t, p_c, beta = 4.0, 5.5, 0.5
        result = dual_waterfill_circuit(h, p_t, p_c, beta)
        assert result.feasible
        assert result.total == pytest.approx(p_t, rel=1e-9)
        harvested = (1.0 - beta) * float(np.dot(result.powers, h))
        assert harvested == pytest.approx(p_c, rel=1e-6)
        lam, mu = result.multipliers
        assert mu > 0
        assert kkt_residual(result, h, p_c, beta) < 1e-6

    def test_binding_constraint_shifts_power_to_strong_channel(self):
        h = np.array([3.0, 1.0])
        free = dual_waterfill_circuit(h, 4.0, 0.0, 0.5)
        bound = dual_waterfill_circuit(h, 4.0, 5.5, 0.5)
        assert bound.powers[0] > free.powers[0]

    def test_infeasible_returns_sentinel(self):
        result = dual_waterfill_circuit([1.0, 2.0], p_t=1.0, p_c=5.0, beta=0.5)
        assert not result.feasible
        assert result.total == 0.0
        assert result.multipliers is None

    def test_infeasible_can_raise(self):
        with pytest.raises(InfeasibleError) as info:
            dual_waterfill_circuit([1.0], p_t=1.0, p_c=5.0, beta=0.5, raise_on_infeasible=True)
        assert info.value.required == 5.0
        assert info.value.available == pytest.approx(0.5)

    def test_limit_puts_everything_on_strongest(self):
        result = dual_waterfill_circuit([1.0, 2.0], p_t=1.0, p_c=1.0, beta=0.5)
        np.testing.assert_allclose(result.powers, [0.0, 1.0])

    def test_zero_weight_maximises_harvest(self):
        result = dual_waterfill_circuit([1.0, 2.0], p_t=1.0, p_c=0.0, beta=0.0)
        np.testing.assert_allclose(result.powers, [0.0, 1.0])

    def test_beta_out_of_range(self):
        with pytest.raises(ValidationError):
            dual_waterfill_circuit([1.0], 1.0, 0.0, beta=1.2)

    @given(
        st.lists(st.floats(min_value=0.1, max_value=10.0), min_size=2, max_size=5),
        st.floats(min_value=0.1, max_value=0.9),
        st.floats(min_value=0.0, max_value=0.99),
    )
    @settings(max_examples=100, deadline=None)
    def test_constraints_hold(self, gains, beta, fraction):
        h = np.array(gains)
        p_t = 5.0
        p_c = fraction * (1.0 - beta) * p_t * float(np.max(h))
        result = dual_waterfill_circuit(h, p_t, p_c, beta)
        assert result.feasible
        assert np.all(result.powers >= 0)
        assert result.total == pytest.approx(p_t, rel=1e-9)
        harvested = (1.0 - beta) * float(np.dot(result.powers, h))
        assert harvested >= p_c * (1.0 - 1e-6) - 1e-9


class TestGreedyInversion:

    def test_prefix_count(self):
        result = greedy_inversion([0.5, 1.0, 2.0], 1.5)
        assert result.count == 2
        np.testing.assert_allclose(result.powers, [0.5, 1.0, 0.0])

    def test_nothing_affordable(self):
        result = greedy_inversion([2.0, 3.0], 1.0)
        assert result.count == 0
        assert not np.any(result.powers)

    def test_infinite_costs_never_served(self):
        result = greedy_inversion([1.0, np.inf], 100.0)
        assert result.count == 1

    def test_zero_costs_rejected(self):
        with pytest.raises(ValidationError) as info:
            greedy_inversion([0.0, 0.0, 0.0], 0.0)
        assert info.value.expected == "> 0"

    def test_unsorted_rejected(self):
        with pytest.raises(ValidationError) as info:
            greedy_inversion([2.0, 1.0], 5.0)
        assert info.value.expected == "ascending order"

    def test_negative_or_nan_rejected(self):
        with pytest.raises(ValidationError):
            greedy_inversion([-1.0, 1.0], 5.0)
        with pytest.raises(ValidationError):
            greedy_inversion([np.nan], 5.0)

    @given(st.lists(st.floats(min_value=1e-6, max_value=10.0), min_size=1, max_size=10), budgets)
    @settings(max_examples=200, deadline=None)
    def test_prefix_is_longest_affordable(self, costs, budget):
        sorted_costs = np.sort(np.array(costs))
        result = greedy_inversion(sorted_costs, budget)
        prefix = np.concatenate([[0.0], np.cumsum(sorted_costs)])
        assert prefix[result.count] <= budget
        if result.count < sorted_costs.size:
            assert prefix[result.count + 1] > budget

    @given(st.lists(st.floats(min_value=1e-6, max_value=10.0), min_size=1, max_size=10), budgets)
    @settings(max_examples=200, deadline=None)
    def test_served_exactly_on_prefix(self, costs, budget):
        result = greedy_inversion(np.sort(np.array(costs)), budget)
        served = result.powers > 0
        assert served.tolist() == [i < result.count for i in range(len(costs))]


def test_sort_helpers_are_stable():
    assert descending_order([1.0, 3.0, 3.0]).tolist() == [1, 2, 0]
    assert ascending_order([2.0, 1.0, 1.0]).tolist() == [1, 2, 0]
    order = descending_order([1.0, 3.0, 2.0])
    np.testing.assert_array_equal(unpermute(np.array([3.0, 2.0, 1.0]), order), [1.0, 3.0, 2.0])
