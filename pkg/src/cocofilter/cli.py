"""Command-line front end.

Subcommands: ``simulate``, ``survive``, ``price``, ``compensator``,
``validate``.  Each command resolves a run configuration (built-in defaults,
a JSON config file, or a previously written manifest), runs its pipeline,
and writes RFC-4180 CSV artifacts plus a ``manifest.json`` that suffices to
reproduce every output byte for byte.

Exit codes: 0 ok, 2 config error, 3 numeric failure (posterior collapse or
oracle starvation), 4 invariant violation.
"""
from __future__ import annotations

import argparse
import hashlib
import io
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, backend
from .errors import (
    ConfigError,
    DomainError,
    InvariantViolationError,
    OracleStarvationError,
    PosteriorCollapseError,
)
from .filtering import run_filter
from .hitting import survival_closed_form
from .measures import Measure, drifts_under, rn_weights_from_terminal
from .model import (
    ModelParams,
    ObservationRecord,
    UpdateSchedule,
    model_params_from_mapping,
    schedule_from_mapping,
)
from .oracle import (
    first_passage_probability,
    product_formula_quadrature,
    simulate_terminal,
    simulate_update_scenarios,
    survival_oracle,
)
from .pricing import (
    UpdateScenario,
    check_compensator_monotone,
    compensator_path,
    price,
    survival_report,
)

_TAG_STOCK = 101
_TAG_TRAJ = 102

_TIME_FMT = "%.9f"
_PROB_FMT = "%.12f"
_VALUE_FMT = "%.12f"


# --- configuration ----------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    """Resolved run configuration (1:1 with the config file keys)."""

    model: ModelParams
    schedule: UpdateSchedule
    rho_sweep: tuple[float, ...]
    scenarios: int | str
    oracle_n_paths: int
    oracle_dt_fine: float
    seed: int
    output_dir: str

    def to_mapping(self) -> dict:
        return {
            "model": {
                "r": self.model.r,
                "sigma": self.model.sigma,
                "rho": self.model.rho,
                "a": self.model.a,
                "kappa": self.model.kappa,
                "L": self.model.L,
                "N": self.model.N,
                "Cr": self.model.Cr,
                "c_bar": self.model.c_bar,
                "c_under": self.model.c_under,
                "T": self.model.T,
                "S0": self.model.S0,
                "U0": self.model.U0,
            },
            "schedule": {
                "update_times": list(self.schedule.update_times),
                "observation_times": [
                    list(b) for b in self.schedule.observation_times
                ],
            },
            "rho_sweep": list(self.rho_sweep),
            "scenarios": self.scenarios,
            "oracle": {
                "n_paths": self.oracle_n_paths,
                "dt_fine": self.oracle_dt_fine,
                "seed": self.seed,
            },
            "output_dir": self.output_dir,
        }


def default_config_mapping() -> dict:
    """Built-in demonstration configuration.

    Barrier-shape parameter chosen so the fundamental drift matches the
    log-stock drift under the risk-neutral measure.
    """
    r, sigma = 0.03, 0.49
    a = 0.5 + (r - 0.5 * sigma**2) / sigma**2
    obs = [round(t, 10) for t in np.linspace(0.0, 1.0, 51)]
    return {
        "model": {
            "r": r,
            "sigma": sigma,
            "rho": 0.5,
            "a": a,
            "kappa": 0.0,
            "L": 35.0,
            "N": 100.0,
            "Cr": 100.0 / 35.0,
            "c_bar": math.log(35.0),
            "c_under": math.log(20.0),
            "T": 1.0,
            "S0": 100.0,
            "U0": math.log(100.0),
        },
        "schedule": {
            "update_times": [0.0, 1.0],
            "observation_times": [obs, [1.0]],
        },
        "rho_sweep": [0.01, 0.25, 0.5, 0.75, 0.99],
        "scenarios": 4,
        "oracle": {"n_paths": 100_000, "dt_fine": 1e-3, "seed": 20160301},
        "output_dir": "cocofilter-out",
    }


_TOP_KEYS = ("model", "schedule", "rho_sweep", "scenarios", "oracle", "output_dir")
_ORACLE_KEYS = ("n_paths", "dt_fine", "seed")


def config_from_mapping(mapping: dict) -> RunConfig:
    unknown = sorted(set(mapping) - set(_TOP_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    base = default_config_mapping()
    merged = {**base, **mapping}
    model = model_params_from_mapping(merged["model"])
    schedule = schedule_from_mapping(merged["schedule"])
    sweep = tuple(float(x) for x in merged["rho_sweep"])
    for rho in sweep:
        if not -1.0 < rho < 1.0:
            raise ConfigError(f"rho_sweep value {rho} outside (-1, 1)")
    oracle_map = merged["oracle"]
    unknown = sorted(set(oracle_map) - set(_ORACLE_KEYS))
    if unknown:
        raise ConfigError(f"unknown oracle keys: {', '.join(unknown)}")
    oracle_merged = {**base["oracle"], **oracle_map}
    scenarios = merged["scenarios"]
    if not isinstance(scenarios, (int, str)):
        raise ConfigError("scenarios must be a count or a stock-path CSV path")
    if isinstance(scenarios, int) and scenarios < 1:
        raise ConfigError("scenario count must be positive")
    n_paths = int(oracle_merged["n_paths"])
    dt_fine = float(oracle_merged["dt_fine"])
    seed = int(oracle_merged["seed"])
    if n_paths < 1 or dt_fine <= 0 or seed < 0:
        raise ConfigError("oracle block needs n_paths >= 1, dt_fine > 0, seed >= 0")
    return RunConfig(
        model=model,
        schedule=schedule,
        rho_sweep=sweep,
        scenarios=scenarios,
        oracle_n_paths=n_paths,
        oracle_dt_fine=dt_fine,
        seed=seed,
        output_dir=str(merged["output_dir"]),
    )


def load_config(path: str | None) -> RunConfig:
    """Load a config file or a manifest; fall back to built-in defaults."""
    if path is None:
        return config_from_mapping({})
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    if "config" in data and "command" in data:
        data = data["config"]  # manifest reuse
    return config_from_mapping(data)


# --- output helpers ---------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


class OutputSet:
    """Collects command outputs, writes them atomically, records hashes."""

    def __init__(self, out_dir: str):
        self.out_dir = out_dir
        self.hashes: dict[str, str] = {}
        try:
            os.makedirs(out_dir, exist_ok=True)
        except OSError as exc:
            raise ConfigError(f"output directory {out_dir!r} not writable: {exc}")

    def write(self, name: str, text: str) -> None:
        _atomic_write(os.path.join(self.out_dir, name), text)
        self.hashes[name] = _sha256_text(text)

    def write_manifest(self, command: str, cfg: RunConfig) -> None:
        manifest = {
            "command": command,
            "version": __version__,
            "backend": backend.backend_name(),
            "numpy": np.__version__,
            "config": cfg.to_mapping(),
            "outputs": dict(sorted(self.hashes.items())),
        }
        _atomic_write(
            os.path.join(self.out_dir, "manifest.json"),
            json.dumps(manifest, sort_keys=True, indent=2) + "\n",
        )


# --- scenario machinery -----------------------------------------------------


def _rng(seed: int, tag: int, *extra: int) -> np.random.Generator:
    ss = np.random.SeedSequence((int(seed), int(tag), *map(int, extra)))
    return np.random.Generator(np.random.SFC64(ss))


def scenario_stock_paths(cfg: RunConfig) -> tuple[np.ndarray, list[np.ndarray]]:
    """Observation times and one stock path per scenario.

    Integer ``scenarios`` simulates risk-neutral paths on the first-period
    observation grid; a string loads a wide CSV (column ``t`` then one
    column per scenario).
    """
    if isinstance(cfg.scenarios, str):
        return _load_scenario_file(cfg.scenarios)
    times = np.asarray(cfg.schedule.observation_times[0])
    drifts = drifts_under(Measure.P_STAR, cfg.model)
    paths = []
    for i in range(cfg.scenarios):
        rng = _rng(cfg.seed, _TAG_STOCK, i)
        dts = np.diff(times)
        z = rng.standard_normal(dts.size)
        increments = drifts.mu_S * dts + cfg.model.sigma * np.sqrt(dts) * z
        log_s = math.log(cfg.model.S0) + np.concatenate(
            ([0.0], np.cumsum(increments))
        )
        paths.append(np.exp(log_s))
    return times, paths


def _load_scenario_file(path: str) -> tuple[np.ndarray, list[np.ndarray]]:
    try:
        with open(path) as fh:
            rows = [line.strip() for line in fh if line.strip()]
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc
    header = rows[0].split(",")
    if header[0] != "t" or len(header) < 2:
        raise ConfigError("scenario file must have columns: t, <one per scenario>")
    data = np.array([[float(x) for x in row.split(",")] for row in rows[1:]])
    times = data[:, 0]
    if np.any(np.diff(times) <= 0) or times[0] != 0.0:
        raise ConfigError("scenario times must start at 0 and increase strictly")
    if np.any(data[:, 1:] <= 0):
        raise ConfigError("scenario stock prices must be positive")
    return times, [data[:, 1 + i] for i in range(data.shape[1] - 1)]


def conditional_fundamental_path(
    cfg: RunConfig, times: np.ndarray, stock: np.ndarray, rho: float,
    scenario_index: int, rho_index: int,
) -> np.ndarray:
    """One conditional draw of the fundamental path given a stock scenario."""
    p = cfg.model.with_rho(rho)
    drifts = drifts_under(Measure.P_STAR, p)
    dts = np.diff(times)
    dys = np.diff(np.log(stock))
    rng = _rng(cfg.seed, _TAG_TRAJ, scenario_index, rho_index)
    z = rng.standard_normal(dts.size)
    incr = (
        rho * dys
        + (drifts.mu_U - rho * drifts.mu_S) * dts
        + p.sigma * math.sqrt(1.0 - rho**2) * np.sqrt(dts) * z
    )
    return p.U0 + np.concatenate(([0.0], np.cumsum(incr)))


def _observations(times: np.ndarray, stock: np.ndarray) -> list[ObservationRecord]:
    return [ObservationRecord(float(t), float(s)) for t, s in zip(times, stock)]


# --- commands ---------------------------------------------------------------


def cmd_simulate(cfg: RunConfig, out_dir: str) -> int:
    times, paths = scenario_stock_paths(cfg)
    out = OutputSet(out_dir)
    barrier_stock = math.exp(cfg.model.c_bar)
    for i, stock in enumerate(paths, start=1):
        buf = io.StringIO()
        buf.write("t,stock,barrier_stock\r\n")
        for t, s in zip(times, stock):
            buf.write(
                f"{t:.9f},{s:.12f},{barrier_stock:.12f}\r\n"
            )
        out.write(f"scenario_{i:02d}_stock.csv", buf.getvalue())

        buf = io.StringIO()
        cols = [f"u_rho_{rho:.3f}" for rho in cfg.rho_sweep]
        buf.write("t," + ",".join(cols) + ",barrier\r\n")
        trajectories = [
            conditional_fundamental_path(cfg, times, stock, rho, i - 1, k)
            for k, rho in enumerate(cfg.rho_sweep)
        ]
        for row_idx, t in enumerate(times):
            vals = ",".join(f"{traj[row_idx]:.12f}" for traj in trajectories)
            buf.write(f"{t:.9f},{vals},{cfg.model.c_bar:.12f}\r\n")
        out.write(f"scenario_{i:02d}_fundamental.csv", buf.getvalue())
    out.write("plot_scenarios.py", _plot_script(len(paths)))
    out.write_manifest("simulate", cfg)
    return 0


def cmd_survive(cfg: RunConfig, out_dir: str, validate: bool = False) -> int:
    times, paths = scenario_stock_paths(cfg)
    out = OutputSet(out_dir)
    horizon = cfg.model.T
    buf = io.StringIO()
    header = "scenario,rho,t,p_survive_star,p_convert_S"
    if validate:
        header += ",oracle_p,oracle_stderr"
    buf.write(header + "\r\n")
    n_check = max(1, (len(times) - 1) // 4)
    violations: list[str] = []
    for i, stock in enumerate(paths, start=1):
        obs = _observations(times, stock)
        for rho in cfg.rho_sweep:
            p = cfg.model.with_rho(rho)
            posts_star = run_filter(p, drifts_under(Measure.P_STAR, p), obs)
            posts_share = run_filter(p, drifts_under(Measure.P_S, p), obs)
            for k, (pt, ps) in enumerate(zip(posts_star, posts_share)):
                rep = survival_report(pt, ps, p, horizon)
                line = (
                    f"{i},{rho:.6f},{rep.t:.9f},"
                    f"{rep.p_survive_star:.12f},{rep.p_convert_S:.12f}"
                )
                if validate:
                    if k > 0 and (k % n_check == 0 or k == len(posts_star) - 1):
                        est = survival_oracle(
                            p, drifts_under(Measure.P_STAR, p), obs[: k + 1],
                            float(times[k]), horizon, cfg.oracle_n_paths,
                            cfg.oracle_dt_fine, cfg.seed + 7 * k + i,
                        )
                        line += f",{est.value:.12f},{est.stderr:.12f}"
                        if abs(est.value - rep.p_survive_star) > 3.0 * max(
                            est.stderr, 1e-12
                        ):
                            violations.append(
                                f"scenario {i} rho {rho} t {times[k]:.4f}: "
                                f"analytic {rep.p_survive_star:.6f} vs oracle "
                                f"{est.value:.6f} +- {est.stderr:.6f}"
                            )
                    else:
                        line += ",,"
                buf.write(line + "\r\n")
    out.write("survival.csv", buf.getvalue())
    out.write_manifest("survive", cfg)
    if violations:
        raise InvariantViolationError(
            "analytic survival outside oracle bands:\n" + "\n".join(violations)
        )
    return 0


def cmd_price(cfg: RunConfig, out_dir: str) -> int:
    times, paths = scenario_stock_paths(cfg)
    out = OutputSet(out_dir)
    buf = io.StringIO()
    buf.write("scenario,rho,t,stock,pi,bond_leg,equity_leg\r\n")
    for i, stock in enumerate(paths, start=1):
        obs = _observations(times, stock)
        for rho in cfg.rho_sweep:
            p = cfg.model.with_rho(rho)
            posts_star = run_filter(p, drifts_under(Measure.P_STAR, p), obs)
            posts_share = run_filter(p, drifts_under(Measure.P_S, p), obs)
            for k, (pt, ps) in enumerate(zip(posts_star, posts_share)):
                quote = price(pt, ps, p, float(times[k]), float(stock[k]))
                buf.write(
                    f"{i},{rho:.6f},{quote.t:.9f},{stock[k]:.12f},"
                    f"{quote.pi:.12f},{quote.bond_leg:.12f},"
                    f"{quote.equity_leg:.12f}\r\n"
                )
    out.write("prices.csv", buf.getvalue())
    out.write_manifest("price", cfg)
    return 0


def cmd_compensator(cfg: RunConfig, out_dir: str) -> int:
    p = cfg.model
    n_scen = cfg.scenarios if isinstance(cfg.scenarios, int) else 32
    update_times = (0.0, p.T, 2.0 * p.T)
    drifts = drifts_under(Measure.P_STAR, p)
    u_vals, crossed = simulate_update_scenarios(
        p, drifts, update_times, n_scen, cfg.oracle_dt_fine, cfg.seed
    )
    out = OutputSet(out_dir)
    buf = io.StringIO()
    buf.write("scenario,t,F,A,M\r\n")
    violations = []
    for i in range(n_scen):
        scen = UpdateScenario(
            update_times=update_times,
            u_at_updates=tuple(float(x) for x in u_vals[i]),
            crossed_in_period=tuple(bool(x) for x in crossed[i]),
        )
        cp = compensator_path(scen, p, grid_step=1e-3)
        try:
            check_compensator_monotone(cp)
        except InvariantViolationError as exc:
            violations.append(f"scenario {i + 1}: {exc}")
        for t, f, a, m in zip(cp.times, cp.F_values, cp.A_values, cp.M_values):
            buf.write(f"{i + 1},{t:.9f},{f:.12f},{a:.12f},{m:.12f}\r\n")
    out.write("compensator.csv", buf.getvalue())
    out.write_manifest("compensator", cfg)
    if violations:
        raise InvariantViolationError(
            "compensator monotonicity violated:\n" + "\n".join(violations)
        )
    return 0


def cmd_validate(cfg: RunConfig, out_dir: str) -> int:
    p = cfg.model
    checks: list[tuple[str, float, float, float, bool]] = []

    rng = _rng(cfg.seed, 900)
    for _ in range(4):
        mu = rng.uniform(-0.2, 0.1)
        sigma = rng.uniform(0.3, 0.6)
        horizon = rng.uniform(0.1, 0.4)
        # start the barrier 0.4 to 2 noise widths away: non-degenerate odds
        gap = rng.uniform(0.4, 2.0) * sigma * math.sqrt(horizon)
        analytic = float(1.0 - survival_closed_form(gap, 0.0, mu, sigma, horizon))
        n_mc = min(cfg.oracle_n_paths, 200_000)
        est = first_passage_probability(
            gap, 0.0, mu, sigma, horizon, n_mc,
            cfg.oracle_dt_fine, int(rng.integers(1 << 31)),
        )
        # null-variance floor keeps the band meaningful at zero counts
        se = max(est.stderr, math.sqrt(analytic * (1.0 - analytic) / n_mc))
        band = 3.0 * max(se, 1e-12)
        checks.append(
            ("first_passage_mc", est.value, analytic, band,
             abs(est.value - analytic) <= band)
        )

    d_star = drifts_under(Measure.P_STAR, p)
    d_fwd = drifts_under(Measure.P_T, p)
    checks.append(
        ("forward_measure_drifts", d_fwd.mu_U, d_star.mu_U, 0.0,
         d_fwd.mu_S == d_star.mu_S and d_fwd.mu_U == d_star.mu_U)
    )

    n_rn = min(cfg.oracle_n_paths, 200_000)
    sample = simulate_terminal(p, d_star, p.T, n_rn, cfg.oracle_dt_fine, cfg.seed + 1)
    weights = rn_weights_from_terminal(sample.log_s_T, p, p.T)
    se_w = float(weights.std(ddof=1) / math.sqrt(n_rn))
    checks.append(
        ("rn_weight_martingale", float(weights.mean()), 1.0, 3.0 * se_w,
         abs(float(weights.mean()) - 1.0) <= 3.0 * se_w)
    )

    lhs = weights * (~sample.crossed)
    lhs_mean = float(lhs.mean())
    lhs_se = float(lhs.std(ddof=1) / math.sqrt(n_rn))
    sample_s = simulate_terminal(
        p, drifts_under(Measure.P_S, p), p.T, n_rn, cfg.oracle_dt_fine,
        cfg.seed + 2,
    )
    rhs_mean = float((~sample_s.crossed).mean())
    rhs_se = math.sqrt(max(rhs_mean * (1 - rhs_mean), 0.0) / n_rn)
    band = 3.0 * math.hypot(lhs_se, rhs_se)
    checks.append(
        ("measure_change_survival", lhs_mean, rhs_mean, band,
         abs(lhs_mean - rhs_mean) <= band)
    )

    times, paths = scenario_stock_paths(cfg)
    obs = _observations(times[:3], paths[0][:3])
    posts = run_filter(p, d_star, obs)
    quad = product_formula_quadrature(p, d_star, obs)
    sm = posts[-1].survival_mass
    rel = abs(sm - quad) / max(quad, 1e-300)
    checks.append(("filter_vs_quadrature_k2", sm, quad, 1e-3, rel <= 1e-3))

    out = OutputSet(out_dir)
    buf = io.StringIO()
    buf.write("check,value,reference,band,status\r\n")
    failed = []
    for name, value, ref, band, ok in checks:
        status = "pass" if ok else "FAIL"
        buf.write(f"{name},{value:.12f},{ref:.12f},{band:.12f},{status}\r\n")
        print(f"{status:4s}  {name:28s} value={value:.8f} ref={ref:.8f} band={band:.2e}")
        if not ok:
            failed.append(name)
    out.write("validation.csv", buf.getvalue())
    out.write_manifest("validate", cfg)
    if failed:
        raise InvariantViolationError(f"validation failed: {', '.join(failed)}")
    return 0


def _plot_script(n_scenarios: int) -> str:
    return f'''"""Plot the CSV artifacts written next to this script."""
import csv
import pathlib

import matplotlib.pyplot as plt

HERE = pathlib.Path(__file__).parent
N_SCENARIOS = {n_scenarios}


def read_csv(name):
    with open(HERE / name, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return rows


fig, axes = plt.subplots(1, 2, figsize=(12, 4))
for i in range(1, N_SCENARIOS + 1):
    rows = read_csv(f"scenario_{{i:02d}}_stock.csv")
    t = [float(r["t"]) for r in rows]
    s = [float(r["stock"]) for r in rows]
    axes[0].plot(t, s, label=f"scenario {{i}}")
    if i == 1:
        axes[0].plot(
            t, [float(r["barrier_stock"]) for r in rows], "k--", label="barrier"
        )
rows = read_csv("scenario_01_fundamental.csv")
t = [float(r["t"]) for r in rows]
for key in rows[0]:
    if key.startswith("u_rho_"):
        axes[1].plot(t, [float(r[key]) for r in rows], label=key)
axes[1].plot(t, [float(r["barrier"]) for r in rows], "k--", label="barrier")
axes[0].set_title("stock scenarios")
axes[1].set_title("conditional fundamental paths (scenario 1)")
for ax in axes:
    ax.legend(fontsize=7)
    ax.set_xlabel("t (years)")
fig.tight_layout()
fig.savefig(HERE / "scenarios.png", dpi=120)
print("wrote", HERE / "scenarios.png")
'''


# --- entry point ------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cocofilter",
        description="CoCo pricing under short-term uncertainty",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, hint in [
        ("simulate", "write stock scenarios and conditional fundamental paths"),
        ("survive", "write conditional survival time series per scenario and rho"),
        ("price", "write price quotes with leg decomposition"),
        ("compensator", "write F/A/M paths over two update periods"),
        ("validate", "run the oracle validation battery"),
    ]:
        sp = sub.add_parser(name, help=hint)
        sp.add_argument("--config", help="JSON config or manifest path")
        sp.add_argument("--out", help="output directory (overrides config)")
        sp.add_argument("--seed", type=int, help="override the oracle seed")
        sp.add_argument(
            "--rho", help="comma-separated correlations overriding the sweep"
        )
        if name == "survive":
            sp.add_argument(
                "--validate", action="store_true",
                help="add companion oracle estimates and enforce their bands",
            )
    return parser


def _resolve(args: argparse.Namespace) -> tuple[RunConfig, str]:
    cfg = load_config(args.config)
    mapping = cfg.to_mapping()
    if args.seed is not None:
        mapping["oracle"]["seed"] = int(args.seed)
    if args.rho:
        try:
            mapping["rho_sweep"] = [float(x) for x in args.rho.split(",") if x]
        except ValueError as exc:
            raise ConfigError(f"bad --rho list: {args.rho!r}") from exc
    if args.out:
        mapping["output_dir"] = args.out
    cfg = config_from_mapping(mapping)
    return cfg, cfg.output_dir


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg, out_dir = _resolve(args)
        if args.command == "simulate":
            return cmd_simulate(cfg, out_dir)
        if args.command == "survive":
            return cmd_survive(cfg, out_dir, validate=args.validate)
        if args.command == "price":
            return cmd_price(cfg, out_dir)
        if args.command == "compensator":
            return cmd_compensator(cfg, out_dir)
        if args.command == "validate":
            return cmd_validate(cfg, out_dir)
        raise ConfigError(f"unknown command {args.command!r}")
    except (ConfigError, DomainError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (PosteriorCollapseError, OracleStarvationError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    except InvariantViolationError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
