"""Tests for the propagation model and channel draws."""

import numpy as np
import pytest

from pyswipt import (
    ChannelModel,
    ChannelError,
    LinkGeometry,
    ValidationError,
    FadingSample,
    create_scenario,
    create_geometry_table,
    draw_realization,
    link_gain,
    sample_fading,
)
from pyswipt.channels.channel_model import (
    sample_fading_array,
    default_geometry_table,
    trial_seed,
    MU_DISTANCES,
)
from pyswipt.utils.types import UserMode

pytestmark = pytest.mark.unit

WAVELENGTH = 0.0517241


def test_fading_statistics(rng):
    z = sample_fading_array(rng, 200_000)
    assert np.mean(z.real) == pytest.approx(1.0, abs=5e-3)
    assert np.mean(z.imag) == pytest.approx(0.0, abs=5e-3)
    assert np.var(z) == pytest.approx(0.2, rel=2e-2)
    assert np.mean(np.abs(z) ** 2) == pytest.approx(1.2, rel=1e-2)


def test_sample_fading_is_deterministic():
    a = sample_fading(np.random.default_rng(7))
    b = sample_fading(np.random.default_rng(7))
    assert isinstance(a, FadingSample)
    assert a == b
    assert a.power == pytest.approx(abs(a.z) ** 2)


def test_link_gain_reference_value():
    geom = LinkGeometry(WAVELENGTH, aperture_tx=1.0, aperture_rx=0.1, distance=100.0)
    assert link_gain(geom, 1.0 + 0j) == pytest.approx(3.738e-3, rel=1e-3)
    assert link_gain(geom, FadingSample(1j)) == pytest.approx(3.738e-3, rel=1e-3)


def test_link_gain_inverse_square():
    near = LinkGeometry(WAVELENGTH, 1.0, 0.05, 50.0)
    far = LinkGeometry(WAVELENGTH, 1.0, 0.05, 100.0)
    assert link_gain(near, 1.0) / link_gain(far, 1.0) == pytest.approx(4.0)


def test_link_gain_array_input():
    geom = LinkGeometry(WAVELENGTH, 1.0, 0.05, 100.0)
    gains = link_gain(geom, np.array([1.0, 2.0]))
    assert gains.shape == (2,)
    assert gains[1] == pytest.approx(4.0 * gains[0])


def test_link_gain_rejects_non_geometry():
    with pytest.raises(ValidationError):
        link_gain((WAVELENGTH, 1.0, 0.05, 100.0), 1.0)


@pytest.mark.parametrize("field", ["wavelength", "aperture_tx", "aperture_rx", "distance"])
def test_link_geometry_validation(field):
    values = {"wavelength": WAVELENGTH, "aperture_tx": 1.0, "aperture_rx": 0.05, "distance": 10.0}
    values[field] = 0.0
    with pytest.raises(ValidationError) as info:
        LinkGeometry(**values)
    assert info.value.field_name == field


def test_geometry_table_validation():
    with pytest.raises(ValidationError):
        create_geometry_table(distances=[])
    with pytest.raises(ValidationError):
        create_geometry_table(distances=[10.0, -1.0])
    with pytest.raises(ValidationError):
        create_geometry_table(distances=[10.0], carrier_hz=0.0)


def test_geometry_scaling():
    table = create_geometry_table(distances=[100.0, 200.0]).scaled(4.0)
    assert table.distances == (25.0, 50.0)
    with pytest.raises(ValidationError):
        table.scaled(0.0)


def test_downlink_draw_shapes_and_normalisation():
    scenario = create_scenario("single", "downlink", "variable", K=5)
    table = default_geometry_table(UserMode.SINGLE)
    ch = draw_realization(scenario, table, 3, noise_variance=1e-6)
    assert ch.K == 5
    np.testing.assert_array_equal(ch.h, ch.h_dot + ch.h_ddot)
    # same distance on every sub-channel, so gains differ only through fading
    deterministic = table.downlink_link(0).deterministic_gain / 1e-6
    assert np.all(ch.h_dot / deterministic < 20.0)
    assert ch.noise_variance_used == 1e-6


def test_uplink_draw_leaves_uplink_gain_unnormalised():
    scenario = create_scenario("multi", "uplink", "variable", K=5)
    table = default_geometry_table(UserMode.MULTI)
    a = draw_realization(scenario, table, 11, noise_variance=1e-6)
    b = draw_realization(scenario, table, 11, noise_variance=1e-3)
    np.testing.assert_allclose(a.g_prime, b.g_prime * 1e3)
    np.testing.assert_array_equal(a.g_up, b.g_up)


def test_multi_user_distances_order_gains():
    scenario = create_scenario("multi", "downlink", "variable", K=5)
    table = create_geometry_table(distances=MU_DISTANCES)
    means = np.mean([draw_realization(scenario, table, s).h for s in range(400)], axis=0)
    assert np.all(np.diff(means) < 0)


def test_same_seed_same_draw():
    scenario = create_scenario("single", "downlink", "variable")
    table = default_geometry_table(UserMode.SINGLE)
    a = draw_realization(scenario, table, trial_seed(5, 2))
    b = draw_realization(scenario, table, trial_seed(5, 2))
    c = draw_realization(scenario, table, trial_seed(5, 3))
    np.testing.assert_array_equal(a.h, b.h)
    assert not np.array_equal(a.h, c.h)


def test_table_length_mismatch():
    scenario = create_scenario("multi", "downlink", "variable", K=3)
    with pytest.raises(ChannelError) as info:
        ChannelModel(scenario, create_geometry_table(distances=[10.0, 20.0]))
    assert info.value.expected_length == 3
    assert info.value.actual_length == 2


def test_draw_rejects_bad_noise():
    scenario = create_scenario()
    with pytest.raises(ValidationError):
        draw_realization(scenario, default_geometry_table(UserMode.SINGLE), 0, noise_variance=0.0)


def test_channel_model_iterates_trials():
    model = ChannelModel(create_scenario("single", "uplink", "fixed", theta=5.0, K=2))
    draws = list(model.iter_realizations(master_seed=1, trials=3))
    assert len(draws) == 3
    np.testing.assert_array_equal(draws[1].g_prime, model.draw(trial_seed(1, 1)).g_prime)
    assert model.noise_variance == pytest.approx(1e-6)
