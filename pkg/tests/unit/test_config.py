"""Tests for JSON configuration files."""

import json

import numpy as np
import pytest

from pyswipt import ConfigError
from pyswipt.config import (
    SCHEMA_VERSION,
    DEFAULT_P_C_DBM,
    default_config,
    dump_config,
    load_config,
    parse_config,
)

pytestmark = pytest.mark.unit


def document(**blocks):
    data = {"schema_version": SCHEMA_VERSION}
    data.update(blocks)
    return data


class TestDefaults:

    def test_single_user_downlink(self):
        cfg = default_config()
        p = cfg.scenario_params()
        assert p.p_t == 10.0
        assert p.theta == pytest.approx(1000.0)
        assert cfg.geometry.distances == (100.0,)
        assert cfg.scenario.p_c_dbm == DEFAULT_P_C_DBM
        assert DEFAULT_P_C_DBM[0] == -30.0 and DEFAULT_P_C_DBM[-1] == 20.0

    def test_multi_user_uplink(self):
        cfg = default_config("multi", "uplink", "fixed")
        p = cfg.scenario_params()
        assert p.p_t == 20.0
        assert p.theta == pytest.approx(10 ** 0.7)
        assert cfg.geometry.distances == (50.0, 80.0, 100.0, 150.0, 200.0)

    def test_sim_config(self):
        sim = default_config().sim_config()
        assert sim.trials == 200
        assert sim.noise_variance == pytest.approx(1e-6)
        assert sim.bound_choice.value == "exact"
        assert default_config().sim.bound_choice == "exact"
        np.testing.assert_allclose(sim.p_c_noise_units()[0], 1.0)


class TestParsing:

    def test_explicit_values(self):
        cfg = parse_config(document(
            scenario={"p_t_w": 5.0, "theta_db": 10.0, "K": 3, "p_c_dbm": [0, 10]},
            sim={"trials": 7, "seed": 3, "policies": ["optimal", "tdipt"]},
            output={"format": "svg", "path": "out.svg"},
        ))
        assert cfg.scenario_params(p_c=2.0).p_c == 2.0
        assert cfg.scenario_params().theta == pytest.approx(10.0)
        assert cfg.scenario.p_c_dbm == (0.0, 10.0)
        assert cfg.sim.policies == ("optimal", "tdipt")
        assert cfg.output.format == "svg"

    def test_round_trip(self):
        cfg = default_config("multi", "downlink", "variable").with_overrides(sim={"seed": 9})
        again = parse_config(json.loads(dump_config(cfg)))
        assert again == cfg
        assert dump_config(again) == dump_config(cfg)

    def test_overrides_ignore_none(self):
        cfg = default_config().with_overrides(sim={"seed": None, "trials": 3})
        assert cfg.sim.seed == 0
        assert cfg.sim.trials == 3

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(document(sim={"trials": 11})), encoding="utf-8")
        assert load_config(path).sim.trials == 11


class TestErrors:

    @pytest.mark.parametrize("data", [
        {},
        {"schema_version": 2},
        document(extra={}),
        document(scenario={"unknown": 1}),
        document(scenario=[]),
        document(scenario={"p_c_dbm": 3.0}),
        document(scenario={"user_mode": "broadcast"}),
        document(scenario={"sigma_a2": 0.8, "sigma_b2": 0.1}),
        document(scenario={"user_mode": "multi", "K": 3}),
        document(sim={"trials": 0}),
        document(sim={"policies": ["magic"]}),
        document(sim={"bound_choice": "middle"}),
        document(output={"format": "png"}),
    ])
    def test_invalid_documents(self, data):
        with pytest.raises(ConfigError):
            parse_config(data)

    def test_error_carries_path(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(document(sim={"trials": -1})), encoding="utf-8")
        with pytest.raises(ConfigError) as info:
            load_config(path)
        assert info.value.path == str(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")

    def test_multi_user_with_own_distances(self):
        cfg = parse_config(document(
            scenario={"user_mode": "multi", "K": 2},
            geometry={"distances": [40.0, 60.0]},
        ))
        assert cfg.sim_config().geometry.distances == (40.0, 60.0)
