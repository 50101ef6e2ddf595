"""Self-consistency of the fixed-rate closed forms over random parameter draws."""

import numpy as np
import pytest

from pyswipt import (
    create_scenario,
    create_downlink_channels,
    solve_su_dl_fixed,
    solve_mu_dl_fixed,
    beta_star,
)
from pyswipt.policies.base_policy import snr_after_split

pytestmark = pytest.mark.integration

DRAWS = 1000


def random_fixed_scenario(rng, user, K):
    sigma_a2 = float(rng.uniform(0.05, 0.95))
    return create_scenario(
        user, "downlink", "fixed", K=K,
        p_t=float(10.0 ** rng.uniform(-1.0, 2.0)),
        p_c=float(10.0 ** rng.uniform(-3.0, 2.0)),
        theta=float(10.0 ** rng.uniform(-1.0, 2.0)),
        sigma_a2=sigma_a2,
        sigma_b2=1.0 - sigma_a2,
    )


def close(value, target):
    return abs(value - target) <= 1e-9 * max(1.0, abs(target))


def test_single_user_split_and_powers():
    rng = np.random.default_rng(2024)
    for _ in range(DRAWS):
        K = int(rng.integers(1, 6))
        p = random_fixed_scenario(rng, "single", K)
        for k in range(1, K + 1):
            assert 0.0 <= beta_star(p, k) <= 1.0
        h = 10.0 ** rng.uniform(-1.0, 1.0, size=K)
        ch = create_downlink_channels(h=h)
        alloc = solve_su_dl_fixed(ch, p)
        served = alloc.downlink_powers > 0
        if not served.any():
            continue
        snr = snr_after_split(alloc.downlink_powers, h, alloc.betas(), p)
        assert all(close(v, p.theta) for v in snr[served])
        harvested = (1.0 - alloc.beta) * float(np.dot(alloc.downlink_powers, h))
        assert close(harvested, p.p_c)
        assert alloc.total_power <= p.p_t * (1 + 1e-12)


def test_multi_user_served_mobiles():
    rng = np.random.default_rng(2025)
    for _ in range(DRAWS):
        K = int(rng.integers(1, 6))
        p = random_fixed_scenario(rng, "multi", K)
        h = 10.0 ** rng.uniform(-1.0, 1.0, size=K)
        ch = create_downlink_channels(h=h)
        alloc = solve_mu_dl_fixed(ch, p)
        served = alloc.downlink_powers > 0
        if not served.any():
            continue
        betas = alloc.betas()
        snr = snr_after_split(alloc.downlink_powers, h, betas, p)
        harvested = (1.0 - betas) * alloc.downlink_powers * h
        for n in np.flatnonzero(served):
            assert close(snr[n], p.theta)
            assert close(harvested[n], p.p_c)
