"""Tests for scenario, channel and allocation types and unit conversions."""

import numpy as np
import pytest

from pyswipt import (
    ScenarioParams,
    ChannelRealization,
    Allocation,
    SolveDiagnostics,
    UserMode,
    RateMode,
    ValidationError,
    create_scenario,
    create_downlink_channels,
    create_uplink_channels,
)
from pyswipt.utils.types import make_report, zero_allocation
from pyswipt.utils.units import (
    db_to_linear,
    linear_to_db,
    dbm_to_watts,
    watts_to_dbm,
    wavelength_from_frequency,
    normalize_circuit_power,
)

pytestmark = pytest.mark.unit


class TestScenarioParams:

    def test_defaults(self):
        p = ScenarioParams()
        assert p.is_single_user and p.is_downlink and not p.is_fixed_rate
        assert p.label == "su-dl-variable"

    def test_factory_accepts_strings(self):
        p = create_scenario("multi", "uplink", "fixed", theta=10.0, K=3)
        assert p.user_mode is UserMode.MULTI
        assert p.rate_mode is RateMode.FIXED
        assert p.label == "mu-ul-fixed"
        assert p.fixed_rate == pytest.approx(np.log2(11.0))

    def test_factory_rejects_unknown_mode(self):
        with pytest.raises(ValueError):
            create_scenario("triple")

    @pytest.mark.parametrize("field,value", [
        ("p_t", 0.0),
        ("p_c", -1.0),
        ("K", 0),
        ("sigma_a2", -0.1),
    ])
    def test_invalid_fields(self, field, value):
        with pytest.raises(ValidationError) as info:
            ScenarioParams(**{field: value})
        assert info.value.field_name.startswith(field.split("_")[0])

    def test_noise_shares_must_sum_to_one(self):
        with pytest.raises(ValidationError) as info:
            ScenarioParams(sigma_a2=0.5, sigma_b2=0.1)
        assert info.value.expected == "sigma_a2 + sigma_b2 = 1"

    def test_fixed_rate_needs_positive_theta(self):
        with pytest.raises(ValidationError):
            create_scenario(rate_mode="fixed", theta=0.0)
        # variable rates ignore theta
        assert create_scenario(theta=0.0).theta == 0.0

    def test_replace_revalidates(self):
        p = ScenarioParams()
        assert p.replace(p_c=3.0).p_c == 3.0
        with pytest.raises(ValidationError):
            p.replace(p_c=-3.0)


class TestChannelRealization:

    def test_combined_gain_is_sum_of_components(self):
        ch = create_downlink_channels(h_dot=[1.0, 2.0], h_ddot=[0.5, 0.25])
        np.testing.assert_array_equal(ch.h, [1.5, 2.25])
        assert ch.K == 2
        assert ch.has_downlink and not ch.has_uplink

    def test_h_alone_gets_zero_second_component(self):
        ch = create_downlink_channels(h=[3.0])
        np.testing.assert_array_equal(ch.h_dot, [3.0])
        np.testing.assert_array_equal(ch.h_ddot, [0.0])

    def test_inconsistent_h_rejected(self):
        with pytest.raises(ValidationError):
            ChannelRealization(h=[2.0], h_dot=[1.0], h_ddot=[0.5])

    @pytest.mark.parametrize("gains", [[], [-1.0], [np.nan], [np.inf]])
    def test_invalid_gains_rejected(self, gains):
        with pytest.raises(ValidationError):
            create_downlink_channels(h=gains)

    def test_uplink_needs_both_gains(self):
        with pytest.raises(ValidationError):
            ChannelRealization(g_prime=np.array([1.0]))
        with pytest.raises(ValidationError):
            create_uplink_channels([1.0, 2.0], [1.0])

    def test_missing_direction_raises(self):
        up = create_uplink_channels([1.0], [2.0])
        with pytest.raises(ValidationError):
            up.downlink_gains()
        with pytest.raises(ValidationError):
            create_downlink_channels(h=[1.0]).uplink_gains()

    def test_scaled(self):
        ch = create_downlink_channels(h_dot=[1.0], h_ddot=[2.0]).scaled(2.0)
        np.testing.assert_allclose(ch.h, [6.0])
        up = create_uplink_channels([1.0], [3.0]).scaled(2.0)
        np.testing.assert_allclose(up.uplink_gains()[1], [6.0])

    def test_nonpositive_noise_variance(self):
        with pytest.raises(ValidationError):
            create_downlink_channels(h=[1.0], noise_variance=0.0)


class TestAllocation:

    def test_negative_powers_rejected(self):
        with pytest.raises(ValidationError):
            Allocation(downlink_powers=[1.0, -0.1])

    def test_beta_range(self):
        with pytest.raises(ValidationError):
            Allocation(downlink_powers=[1.0], beta=1.5)
        alloc = Allocation(downlink_powers=[1.0, 0.0], beta=0.4)
        np.testing.assert_array_equal(alloc.betas(), [0.4, 0.4])

    def test_uplink_length_must_match(self):
        with pytest.raises(ValidationError):
            Allocation(downlink_powers=[1.0, 0.0], uplink_powers=[1.0])

    def test_active_uses_uplink_powers(self):
        alloc = Allocation(downlink_powers=[2.0, 0.0], uplink_powers=[0.0, 1.0])
        assert alloc.active.tolist() == [1]
        assert alloc.total_power == 2.0

    def test_permutation_must_be_bijection(self):
        with pytest.raises(ValidationError):
            SolveDiagnostics(permutation=(0, 0, 1))
        assert SolveDiagnostics(permutation=[2, 0, 1]).permutation == (2, 0, 1)

    def test_zero_allocation(self):
        alloc = zero_allocation(3, uplink=True)
        assert not alloc.feasible
        assert alloc.total_power == 0.0
        assert alloc.diagnostics.stream_count == 0
        np.testing.assert_array_equal(alloc.uplink_powers, np.zeros(3))

    def test_make_report(self):
        report = make_report([1.0, 0.5, 0.0], K=3)
        assert report.sum_throughput == pytest.approx(1.5)
        assert report.spectral_efficiency == pytest.approx(0.5)
        assert report.K == 3


class TestUnits:

    def test_db_conversions(self):
        assert db_to_linear(30.0) == pytest.approx(1000.0)
        assert linear_to_db(100.0) == pytest.approx(20.0)
        assert linear_to_db(0.0) == float("-inf")
        np.testing.assert_allclose(db_to_linear(np.array([0.0, 10.0])), [1.0, 10.0])

    def test_dbm_conversions(self):
        assert dbm_to_watts(-30.0) == pytest.approx(1e-6)
        assert dbm_to_watts(0.0) == pytest.approx(1e-3)
        assert watts_to_dbm(1.0) == pytest.approx(30.0)

    def test_wavelength(self):
        assert wavelength_from_frequency(5.8e9) == pytest.approx(0.0517241, rel=1e-5)
        with pytest.raises(ValueError):
            wavelength_from_frequency(0.0)

    def test_normalize_circuit_power(self):
        assert normalize_circuit_power(1e-3, 1e-6) == pytest.approx(1000.0)
        with pytest.raises(ValueError):
            normalize_circuit_power(1e-3, 0.0)
