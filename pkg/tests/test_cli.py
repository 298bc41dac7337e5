import csv
import json
import math
import os

import numpy as np
import pytest

from cocofilter.cli import (
    cmd_compensator,
    cmd_price,
    cmd_simulate,
    cmd_survive,
    config_from_mapping,
    default_config_mapping,
    load_config,
    main,
)
from cocofilter.errors import ConfigError


@pytest.fixture()
def small_config(tmp_path):
    mapping = {
        "schedule": {
            "update_times": [0.0, 1.0],
            "observation_times": [
                [round(0.1 * k, 10) for k in range(11)],
                [1.0],
            ],
        },
        "rho_sweep": [0.25, 0.75],
        "scenarios": 2,
        "oracle": {"n_paths": 20_000, "dt_fine": 2e-3, "seed": 99},
        "output_dir": str(tmp_path / "out"),
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(mapping))
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestConfig:
    def test_defaults_valid(self):
        cfg = config_from_mapping({})
        assert cfg.model.S0 == 100.0
        assert cfg.rho_sweep == (0.01, 0.25, 0.5, 0.75, 0.99)

    def test_unknown_top_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown config"):
            config_from_mapping({"modell": {}})

    def test_unknown_oracle_key_rejected(self):
        with pytest.raises(ConfigError, match="unknown oracle"):
            config_from_mapping({"oracle": {"paths": 5}})

    def test_rho_sweep_range_enforced(self):
        with pytest.raises(ConfigError, match="rho_sweep"):
            config_from_mapping({"rho_sweep": [0.5, 1.0]})

    def test_manifest_unwrapping(self, tmp_path):
        manifest = {
            "command": "simulate",
            "config": default_config_mapping(),
            "outputs": {},
        }
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps(manifest))
        cfg = load_config(str(path))
        assert cfg.model.S0 == 100.0

    def test_default_drifts_align(self):
        # the demonstration config makes both drifts coincide
        from cocofilter.measures import Measure, drifts_under

        cfg = config_from_mapping({})
        d = drifts_under(Measure.P_STAR, cfg.model)
        assert d.mu_U == pytest.approx(d.mu_S, abs=1e-15)


class TestSimulate:
    def test_writes_scenarios_and_manifest(self, small_config, tmp_path):
        cfg = load_config(small_config)
        assert cmd_simulate(cfg, cfg.output_dir) == 0
        names = sorted(os.listdir(cfg.output_dir))
        assert "scenario_01_stock.csv" in names
        assert "scenario_02_fundamental.csv" in names
        assert "manifest.json" in names
        assert "plot_scenarios.py" in names
        rows = read_rows(os.path.join(cfg.output_dir, "scenario_01_stock.csv"))
        assert len(rows) == 11
        barrier = {r["barrier_stock"] for r in rows}
        assert barrier == {f"{35.0:.12f}"}

    def test_rerun_is_byte_identical(self, small_config):
        cfg = load_config(small_config)
        cmd_simulate(cfg, cfg.output_dir)
        first = {}
        for name in os.listdir(cfg.output_dir):
            with open(os.path.join(cfg.output_dir, name), "rb") as fh:
                first[name] = fh.read()
        cmd_simulate(cfg, cfg.output_dir)
        for name, blob in first.items():
            with open(os.path.join(cfg.output_dir, name), "rb") as fh:
                assert fh.read() == blob, name


class TestSurvive:
    def test_survival_table(self, small_config):
        cfg = load_config(small_config)
        assert cmd_survive(cfg, cfg.output_dir) == 0
        rows = read_rows(os.path.join(cfg.output_dir, "survival.csv"))
        assert len(rows) == 2 * 2 * 11  # scenarios x rhos x observation times
        for r in rows:
            assert 0.0 <= float(r["p_survive_star"]) <= 1.0
            assert 0.0 <= float(r["p_convert_S"]) <= 1.0
        # the t = 0 rows must agree with the unconditional closed form
        from cocofilter.hitting import survival_closed_form
        from cocofilter.measures import Measure, drifts_under

        for r in rows:
            if float(r["t"]) == 0.0:
                p = cfg.model.with_rho(float(r["rho"]))
                d = drifts_under(Measure.P_STAR, p)
                ref = survival_closed_form(
                    p.U0, p.c_bar, d.mu_U, p.sigma, p.T
                )
                assert float(r["p_survive_star"]) == pytest.approx(ref, abs=1e-9)


class TestPrice:
    def test_price_rows_decompose(self, small_config):
        cfg = load_config(small_config)
        assert cmd_price(cfg, cfg.output_dir) == 0
        rows = read_rows(os.path.join(cfg.output_dir, "prices.csv"))
        assert len(rows) == 2 * 2 * 11
        for r in rows:
            pi = float(r["pi"])
            legs = float(r["bond_leg"]) + float(r["equity_leg"])
            # derived column reproduces to the printed quantum
            assert pi == pytest.approx(legs, abs=2e-12)
            assert pi >= 0.0


class TestCompensator:
    def test_fam_columns(self, small_config):
        cfg = load_config(small_config)
        assert cmd_compensator(cfg, cfg.output_dir) == 0
        rows = read_rows(os.path.join(cfg.output_dir, "compensator.csv"))
        by_scenario = {}
        for r in rows:
            by_scenario.setdefault(r["scenario"], []).append(r)
        assert len(by_scenario) == 2
        for series in by_scenario.values():
            F = np.array([float(r["F"]) for r in series])
            A = np.array([float(r["A"]) for r in series])
            M = np.array([float(r["M"]) for r in series])
            # identity holds to the printed quantum (12 decimals per value)
            assert np.max(np.abs(F - A - M)) < 2e-12
            assert np.min(np.diff(A)) > -1e-10


class TestMainEntry:
    def test_exit_code_for_bad_config(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"nope": 1}')
        assert main(["simulate", "--config", str(bad), "--out", str(tmp_path)]) == 2

    def test_rho_override(self, small_config, tmp_path):
        out = str(tmp_path / "rho_override")
        code = main(
            ["simulate", "--config", small_config, "--out", out, "--rho", "0.5"]
        )
        assert code == 0
        rows = read_rows(os.path.join(out, "scenario_01_fundamental.csv"))
        assert "u_rho_0.500" in rows[0]
        assert "u_rho_0.250" not in rows[0]

    def test_manifest_round_trip_bytes(self, small_config, tmp_path):
        out1 = str(tmp_path / "a")
        out2 = str(tmp_path / "b")
        assert main(["survive", "--config", small_config, "--out", out1]) == 0
        manifest = os.path.join(out1, "manifest.json")
        assert main(["survive", "--config", manifest, "--out", out2]) == 0
        with open(os.path.join(out1, "survival.csv"), "rb") as fh:
            first = fh.read()
        with open(os.path.join(out2, "survival.csv"), "rb") as fh:
            assert fh.read() == first

    def test_csv_round_trip_recompute(self, small_config, tmp_path):
        # reload survival output and recompute one row end to end
        out = str(tmp_path / "rt")
        assert main(["survive", "--config", small_config, "--out", out]) == 0
        rows = read_rows(os.path.join(out, "survival.csv"))
        row = rows[17]
        cfg = load_config(small_config)
        from cocofilter.cli import scenario_stock_paths, _observations
        from cocofilter.filtering import run_filter
        from cocofilter.measures import Measure, drifts_under
        from cocofilter.pricing import survival_report

        times, paths = scenario_stock_paths(cfg)
        scen = int(row["scenario"]) - 1
        rho = float(row["rho"])
        p = cfg.model.with_rho(rho)
        obs = _observations(times, paths[scen])
        k = int(round(float(row["t"]) / 0.1))
        posts_T = run_filter(p, drifts_under(Measure.P_STAR, p), obs)
        posts_S = run_filter(p, drifts_under(Measure.P_S, p), obs)
        rep = survival_report(posts_T[k], posts_S[k], p, cfg.model.T)
        assert f"{rep.p_survive_star:.12f}" == row["p_survive_star"]
        assert f"{rep.p_convert_S:.12f}" == row["p_convert_S"]
