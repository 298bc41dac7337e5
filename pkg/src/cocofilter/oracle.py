"""Brute-force Monte Carlo verification engine.

Simulates correlated (log S, U) paths with bridge-corrected barrier
detection and produces conditional histograms, survival estimates and
price estimates against which the analytic modules are validated.

Reproducibility contract
------------------------
Paths are processed in fixed-size chunks.  Chunk ``c`` of a run draws its
noise from ``SeedSequence((seed, stream_tag, c))``, with a fixed draw
order per slab (normals, then independent normals where applicable, then
exponentials), so results are bit-identical for a given seed regardless
of how chunks are scheduled, and independent streams never overlap across
operations.  Within a step, barrier crossing between grid nodes is decided
by comparing a pre-drawn Exp(1) variate ``E`` against
``2 (u-c)(u'-c) / (sigma^2 dt)``; the event has exactly the Brownian-bridge
hit probability, which makes every crossing estimate unbiased in the step
size.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import backend
from .errors import DomainError, OracleStarvationError
from .measures import MeasureDrifts
from .model import ModelParams, ObservationRecord

CHUNK = 4096
SLAB = 256

# stream tags keep sub-seeded generators disjoint across operations
_TAG_FP = 1
_TAG_PAIR = 2
_TAG_COND = 3
_TAG_CONT = 4
_TAG_BUNDLE = 5
_TAG_SCENARIO = 6
_TAG_PRICE = 7

_STARVATION_RATE = 1e-5
_STARVATION_FLOOR = 200_000

_MAX_BUNDLE_NODES = 1 << 26  # path-matrix cap; larger runs use streaming APIs


def _chunk_rng(seed: int, tag: int, chunk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence((int(seed), int(tag), int(chunk_index)))
    return np.random.Generator(np.random.SFC64(ss))


def _chunk_sizes(n_paths: int) -> list[int]:
    sizes = [CHUNK] * (n_paths // CHUNK)
    if n_paths % CHUNK:
        sizes.append(n_paths % CHUNK)
    return sizes


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo probability estimate with its binomial standard error."""

    value: float
    stderr: float
    n: int


@dataclass(frozen=True)
class PathBundle:
    """Ensemble of correlated (log S, U) paths with crossing flags."""

    n_paths: int
    step: float
    log_s: np.ndarray
    u: np.ndarray
    crossed: np.ndarray
    seed: int


@dataclass(frozen=True)
class TerminalSample:
    """Terminal values and crossing flags of a streamed pair simulation."""

    log_s_T: np.ndarray
    u_T: np.ndarray
    crossed: np.ndarray
    horizon: float
    seed: int


@dataclass(frozen=True)
class ConditionalHistogram:
    """Histogram of accepted conditional fundamental values."""

    edges: np.ndarray
    counts: np.ndarray
    n_accepted: int
    halfwidths: np.ndarray  # 3-sigma binomial half-widths, density units

    @property
    def densities(self) -> np.ndarray:
        widths = np.diff(self.edges)
        return self.counts / (self.n_accepted * widths)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])


def _binomial_stderr(k: float, n: int) -> float:
    p = k / n
    return math.sqrt(max(p * (1.0 - p), 0.0) / n)


def first_passage_probability(
    u0: float,
    c: float,
    mu: float,
    sigma: float,
    horizon: float,
    n_paths: int,
    dt_fine: float,
    seed: int,
    bridge_correction: bool = True,
) -> MCEstimate:
    """Bridge-corrected Monte Carlo estimate of P(first passage <= horizon).

    With the correction enabled the estimate is unbiased for every step
    size; disabling it reduces detection to the discrete skeleton, which
    understates crossings.
    """
    if n_paths < 1:
        raise DomainError("n_paths must be at least 1")
    if not 0 < dt_fine <= horizon:
        raise DomainError("need 0 < dt_fine <= horizon")
    if u0 <= c:
        return MCEstimate(1.0, 0.0, n_paths)
    kern = backend.kernels()
    n_steps = max(1, int(round(horizon / dt_fine)))
    dt = horizon / n_steps
    mu_dt = mu * dt
    sq_dt = sigma * math.sqrt(dt)
    half_var = 0.5 * sigma * sigma * dt if bridge_correction else 0.0
    crossed_total = 0
    for ci, m in enumerate(_chunk_sizes(n_paths)):
        rng = _chunk_rng(seed, _TAG_FP, ci)
        u = np.full(m, float(u0))
        n_alive = m
        pos = 0
        while pos < n_steps and n_alive:
            k = min(SLAB, n_steps - pos)
            normals = rng.standard_normal((n_alive, k))
            exps = rng.standard_exponential((n_alive, k))
            alive = np.empty(n_alive, dtype=np.bool_)
            kern.fp_slab(u, c, mu_dt, sq_dt, half_var, normals, exps, alive)
            u = u[alive]
            n_alive = u.shape[0]
            pos += k
        crossed_total += m - n_alive
    p = crossed_total / n_paths
    return MCEstimate(p, _binomial_stderr(crossed_total, n_paths), n_paths)


def _survive_starts(
    starts: np.ndarray,
    c: float,
    mu: float,
    sigma: float,
    horizon: float,
    dt_fine: float,
    seed: int,
    tag: int,
) -> np.ndarray:
    """Survival flags for paths continued from given start values."""
    kern = backend.kernels()
    n_steps = max(1, int(round(horizon / dt_fine)))
    dt = horizon / n_steps
    mu_dt = mu * dt
    sq_dt = sigma * math.sqrt(dt)
    half_var = 0.5 * sigma * sigma * dt
    n = starts.shape[0]
    survived = np.zeros(n, dtype=np.bool_)
    offset = 0
    for ci, m in enumerate(_chunk_sizes(n)):
        rng = _chunk_rng(seed, tag, ci)
        u = starts[offset : offset + m].astype(float, copy=True)
        idx = np.arange(m)
        pos = 0
        while pos < n_steps and idx.size:
            k = min(SLAB, n_steps - pos)
            normals = rng.standard_normal((idx.size, k))
            exps = rng.standard_exponential((idx.size, k))
            alive = np.empty(idx.size, dtype=np.bool_)
            kern.fp_slab(u, c, mu_dt, sq_dt, half_var, normals, exps, alive)
            u = u[alive]
            idx = idx[alive]
            pos += k
        survived[offset + idx] = True
        offset += m
    return survived


def simulate_terminal(
    p: ModelParams,
    drifts: MeasureDrifts,
    horizon: float,
    n_paths: int,
    dt_fine: float,
    seed: int,
) -> TerminalSample:
    """Streamed pair simulation keeping terminal values and crossing flags.

    Use this instead of :func:`simulate_bundle` when full path matrices
    would not fit in memory (Radon-Nikodym weight batches, large survival
    estimates).
    """
    if n_paths < 1:
        raise DomainError("n_paths must be at least 1")
    if not 0 < dt_fine <= horizon:
        raise DomainError("need 0 < dt_fine <= horizon")
    kern = backend.kernels()
    n_steps = max(1, int(round(horizon / dt_fine)))
    dt = horizon / n_steps
    mu_s_dt = drifts.mu_S * dt
    mu_u_dt = drifts.mu_U * dt
    sq_dt = p.sigma * math.sqrt(dt)
    rho_c = math.sqrt(max(0.0, 1.0 - p.rho * p.rho))
    half_var = 0.5 * p.sigma * p.sigma * dt
    ls0 = math.log(p.S0)
    log_s_T = np.empty(n_paths)
    u_T = np.empty(n_paths)
    crossed = np.empty(n_paths, dtype=np.bool_)
    offset = 0
    for ci, m in enumerate(_chunk_sizes(n_paths)):
        rng = _chunk_rng(seed, _TAG_PAIR, ci)
        ls = np.full(m, ls0)
        u = np.full(m, float(p.U0))
        cr = np.zeros(m, dtype=np.bool_)
        pos = 0
        while pos < n_steps:
            k = min(SLAB, n_steps - pos)
            n_s = rng.standard_normal((m, k))
            n_z = rng.standard_normal((m, k))
            exps = rng.standard_exponential((m, k))
            kern.pair_slab(
                ls, u, cr, p.c_bar, mu_s_dt, mu_u_dt, sq_dt, p.rho, rho_c,
                half_var, n_s, n_z, exps,
            )
            pos += k
        log_s_T[offset : offset + m] = ls
        u_T[offset : offset + m] = u
        crossed[offset : offset + m] = cr
        offset += m
    return TerminalSample(log_s_T, u_T, crossed, horizon, seed)


def simulate_bundle(
    p: ModelParams,
    drifts: MeasureDrifts,
    horizon: float,
    n_paths: int,
    dt_fine: float,
    seed: int,
) -> PathBundle:
    """Simulate and store full correlated (log S, U) paths.

    Gaussian stepping is exact in distribution (both components are
    arithmetic Brownian motions in log space); per-step crossing is decided
    by the bridge draw.  Requires ``dt_fine <= horizon / 1000`` and bounded
    total storage; use :func:`simulate_terminal` for larger runs.
    """
    if n_paths < 1:
        raise DomainError("n_paths must be at least 1")
    if dt_fine > 1e-3 * horizon:
        raise DomainError(
            f"dt_fine={dt_fine} too coarse; need dt_fine <= 1e-3 * horizon"
        )
    n_steps = max(1, int(round(horizon / dt_fine)))
    if n_paths * (n_steps + 1) > _MAX_BUNDLE_NODES:
        raise DomainError(
            "path storage exceeds the bundle cap; use simulate_terminal"
        )
    kern = backend.kernels()
    dt = horizon / n_steps
    mu_s_dt = drifts.mu_S * dt
    mu_u_dt = drifts.mu_U * dt
    sq_dt = p.sigma * math.sqrt(dt)
    rho_c = math.sqrt(max(0.0, 1.0 - p.rho * p.rho))
    half_var = 0.5 * p.sigma * p.sigma * dt
    log_s = np.empty((n_paths, n_steps + 1))
    u = np.empty((n_paths, n_steps + 1))
    crossed = np.empty(n_paths, dtype=np.bool_)
    offset = 0
    for ci, m in enumerate(_chunk_sizes(n_paths)):
        rng = _chunk_rng(seed, _TAG_BUNDLE, ci)
        n_s = rng.standard_normal((m, n_steps))
        n_z = rng.standard_normal((m, n_steps))
        exps = rng.standard_exponential((m, n_steps))
        kern.pair_paths(
            math.log(p.S0), float(p.U0), p.c_bar, mu_s_dt, mu_u_dt, sq_dt,
            p.rho, rho_c, half_var, n_s, n_z, exps,
            log_s[offset : offset + m], u[offset : offset + m],
            crossed[offset : offset + m],
        )
        offset += m
    return PathBundle(n_paths, dt, log_s, u, crossed, seed)


def _observation_increments(
    obs: list[ObservationRecord] | tuple[ObservationRecord, ...],
    p: ModelParams,
    drifts: MeasureDrifts,
    dt_fine: float,
):
    """Fine-grid layout and implied W* targets for an observation series."""
    if len(obs) < 2:
        raise DomainError("need at least two observations (anchor and one step)")
    times = np.array([o.time for o in obs])
    prices = np.array([o.stock_price for o in obs])
    dts = np.diff(times)
    if np.any(dts <= 0):
        raise DomainError("observation times must be strictly increasing")
    sub_count = np.rint(dts / dt_fine).astype(np.int64)
    if np.any(sub_count < 1) or np.any(
        np.abs(sub_count * dt_fine - dts) > 1e-9 * np.maximum(dts, 1.0)
    ):
        raise DomainError("observation times must lie on the fine grid")
    sub_start = np.concatenate(([0], np.cumsum(sub_count)[:-1])).astype(np.int64)
    d_log_s = np.diff(np.log(prices))
    w_target = (d_log_s - drifts.mu_S * dts) / p.sigma
    return sub_start, sub_count, w_target, int(sub_count.sum())


def conditional_sample(
    p: ModelParams,
    drifts: MeasureDrifts,
    obs,
    t: float,
    n_paths: int,
    dt_fine: float,
    seed: int,
    min_accepted: int | None = None,
) -> tuple[np.ndarray, int]:
    """Accepted draws of U_t given survival and the observed stock series.

    Fixes the observed coarse stock increments, simulates the stock-noise
    bridge and the independent component on the fine grid, reconstructs U
    conditionally and rejects bridge-corrected barrier crossers.  Returns
    ``(accepted values of U_t, total paths simulated)``.  With
    ``min_accepted`` set, chunks are added until that many acceptances
    accumulate.  Raises :class:`OracleStarvationError` when the acceptance
    rate falls below 1e-5.
    """
    if abs(obs[-1].time - t) > 1e-9:
        raise DomainError(f"t={t} must equal the last observation time")
    if p.rho in (-1.0, 1.0):
        raise DomainError("conditional oracle needs |rho| < 1")
    kern = backend.kernels()
    sub_start, sub_count, w_target, n_fine = _observation_increments(
        obs, p, drifts, dt_fine
    )
    duration = obs[-1].time - obs[0].time
    dt = duration / n_fine
    sqrt_dt = math.sqrt(dt)
    mu_u_dt = drifts.mu_U * dt
    sig_rho = p.sigma * p.rho
    sig_rc_sqdt = p.sigma * math.sqrt(1.0 - p.rho * p.rho) * sqrt_dt
    half_var = 0.5 * p.sigma * p.sigma * dt
    u0 = float(p.U0)
    cond_chunk = max(256, min(CHUNK, (1 << 22) // max(n_fine, 1)))

    accepted: list[np.ndarray] = []
    n_acc = 0
    n_sim = 0
    ci = 0
    while True:
        if min_accepted is None:
            if n_sim >= n_paths:
                break
            m = min(cond_chunk, n_paths - n_sim)
        else:
            if n_acc >= min_accepted:
                break
            m = cond_chunk
        rng = _chunk_rng(seed, _TAG_COND, ci)
        n_w = rng.standard_normal((m, n_fine))
        n_z = rng.standard_normal((m, n_fine))
        exps = rng.standard_exponential((m, n_fine))
        u_out = np.empty(m)
        alive = np.empty(m, dtype=np.bool_)
        kern.conditional_period(
            u0, p.c_bar, mu_u_dt, sig_rho, sig_rc_sqdt, half_var, sqrt_dt,
            sub_start, sub_count, w_target, n_w, n_z, exps, u_out, alive,
        )
        accepted.append(u_out[alive])
        n_acc += int(alive.sum())
        n_sim += m
        ci += 1
        if n_sim >= _STARVATION_FLOOR and n_acc < _STARVATION_RATE * n_sim:
            raise OracleStarvationError(
                f"conditional acceptance rate {n_acc / n_sim:.2e} below "
                f"{_STARVATION_RATE}; increase n_paths or check observations"
            )
    return np.concatenate(accepted) if accepted else np.empty(0), n_sim


def conditional_posterior_oracle(
    p: ModelParams,
    drifts: MeasureDrifts,
    obs,
    t: float,
    n_paths: int,
    dt_fine: float,
    seed: int,
    bins: int = 128,
    min_accepted: int | None = None,
) -> ConditionalHistogram:
    """Histogram of U_t over accepted conditional paths."""
    u_acc, _ = conditional_sample(
        p, drifts, obs, t, n_paths, dt_fine, seed, min_accepted=min_accepted
    )
    if u_acc.size == 0:
        raise OracleStarvationError("no accepted paths to histogram")
    hi = float(u_acc.max())
    span = max(hi - p.c_bar, 1e-12)
    edges = np.linspace(p.c_bar, hi + 1e-3 * span, bins + 1)
    counts, edges = np.histogram(u_acc, bins=edges)
    n_acc = int(u_acc.size)
    widths = np.diff(edges)
    phat = counts / n_acc
    halfwidths = 3.0 * np.sqrt(phat * (1.0 - phat) / n_acc) / widths
    return ConditionalHistogram(edges, counts, n_acc, halfwidths)


def product_formula_quadrature(
    p: ModelParams,
    drifts: MeasureDrifts,
    obs,
    n_nodes: int = 160,
) -> float:
    """Survival probability by direct tensor quadrature of the joint density.

    Integrates the product of pinned-bridge no-hit factors and Gaussian
    increment kernels over the latent fundamental values at the observation
    times (Gauss-Legendre per dimension, full tensor).  Independent of the
    filter's trapezoid recursion; practical for up to three steps.
    """
    if p.rho in (-1.0, 1.0):
        raise DomainError("quadrature needs |rho| < 1")
    times = np.array([o.time for o in obs])
    prices = np.array([o.stock_price for o in obs])
    k = times.size - 1
    if k < 1:
        raise DomainError("need at least one observation step")
    if k > 3:
        raise DomainError("tensor quadrature supported for at most three steps")
    dts = np.diff(times)
    dys = np.diff(np.log(prices))
    var_h = p.sigma**2 * (1.0 - p.rho**2) * dts
    mean_h = p.rho * dys + (drifts.mu_U - p.rho * drifts.mu_S) * dts
    gammas = 2.0 / (p.sigma**2 * dts)

    x, w = np.polynomial.legendre.leggauss(n_nodes)
    lo = p.c_bar
    hi = float(p.U0 + np.abs(mean_h).sum() + 8.5 * p.sigma * math.sqrt(times[-1] - times[0]))
    nodes = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    wts = 0.5 * (hi - lo) * w

    def gauss(d, j):
        return np.exp(-((d - mean_h[j]) ** 2) / (2.0 * var_h[j])) / math.sqrt(
            2.0 * math.pi * var_h[j]
        )

    def bridge(a, b, j):
        return np.where((a > 0) & (b > 0), -np.expm1(-gammas[j] * a * b), 0.0)

    # build the full k-dimensional integrand on the tensor grid, then sum
    integrand = np.ones(1)
    u_axes = []
    for j in range(k):
        ax = [1] * k
        ax[j] = n_nodes
        u_axes.append(nodes.reshape(ax))
    prev = float(p.U0)
    for j in range(k):
        u_prev = prev if j == 0 else u_axes[j - 1]
        u_cur = u_axes[j]
        factor = bridge(
            np.asarray(u_prev) - p.c_bar, u_cur - p.c_bar, j
        ) * gauss(u_cur - u_prev, j)
        integrand = integrand * factor
    total = integrand
    for j in range(k):
        ax = [1] * k
        ax[j] = n_nodes
        total = total * wts.reshape(ax)
    return float(total.sum())


def simulate_update_scenarios(
    p: ModelParams,
    drifts: MeasureDrifts,
    update_times,
    n_scenarios: int,
    dt_fine: float,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Fundamental values at update times with per-period crossing flags.

    Returns ``(u_values, crossed)`` with shapes ``(n, m)`` and ``(n, m-1)``;
    U keeps evolving after a crossing so later update values stay defined.
    """
    updates = np.asarray(update_times, dtype=float)
    if updates.ndim != 1 or updates.size < 2 or np.any(np.diff(updates) <= 0):
        raise DomainError("need at least two strictly increasing update times")
    if n_scenarios < 1:
        raise DomainError("n_scenarios must be at least 1")
    kern = backend.kernels()
    m_periods = updates.size - 1
    u_values = np.empty((n_scenarios, updates.size))
    crossed = np.empty((n_scenarios, m_periods), dtype=np.bool_)
    u_values[:, 0] = p.U0
    offset = 0
    for ci, m in enumerate(_chunk_sizes(n_scenarios)):
        rng = _chunk_rng(seed, _TAG_SCENARIO, ci)
        u = np.full(m, float(p.U0))
        for j in range(m_periods):
            duration = updates[j + 1] - updates[j]
            n_steps = max(1, int(round(duration / dt_fine)))
            dt = duration / n_steps
            mu_dt = drifts.mu_U * dt
            sq_dt = p.sigma * math.sqrt(dt)
            half_var = 0.5 * p.sigma * p.sigma * dt
            cr = np.zeros(m, dtype=np.bool_)
            pos = 0
            while pos < n_steps:
                k = min(SLAB, n_steps - pos)
                normals = rng.standard_normal((m, k))
                exps = rng.standard_exponential((m, k))
                kern.fp_terminal_slab(
                    u, cr, p.c_bar, mu_dt, sq_dt, half_var, normals, exps
                )
                pos += k
            u_values[offset : offset + m, j + 1] = u
            crossed[offset : offset + m, j] = cr
        offset += m
    return u_values, crossed


@dataclass(frozen=True)
class PriceOracleEstimate:
    """Monte Carlo price with the estimates feeding each leg."""

    pi: float
    stderr: float
    p_survive_T: float
    p_convert_S: float
    n_accepted: int


def rn_price_oracle(
    p: ModelParams,
    obs,
    t: float,
    n_paths: int,
    dt_fine: float,
    seed: int,
    min_accepted: int | None = None,
) -> PriceOracleEstimate:
    """Price estimate by conditional simulation plus Radon-Nikodym weighting.

    Accepted conditional draws of U_t are continued jointly with log S to
    maturity under the risk-neutral dynamics.  The bond leg uses the plain
    survival fraction; the equity leg reweights conversion indicators by
    ``exp(sigma dW* - sigma^2 (T - t) / 2)``, the share-measure density over
    the remaining horizon.
    """
    from .measures import Measure, drifts_under  # local to avoid cycle

    drifts = drifts_under(Measure.P_STAR, p)
    u_acc, _ = conditional_sample(
        p, drifts, obs, t, n_paths, dt_fine, seed, min_accepted=min_accepted
    )
    n_acc = u_acc.size
    if n_acc == 0:
        raise OracleStarvationError("no accepted paths for the price oracle")
    s_t = float(obs[-1].stock_price)
    horizon = p.T - t
    if horizon <= 1e-12:
        raise DomainError("price oracle needs a positive remaining horizon")
    kern = backend.kernels()
    n_steps = max(1, int(round(horizon / dt_fine)))
    dt = horizon / n_steps
    mu_s_dt = drifts.mu_S * dt
    mu_u_dt = drifts.mu_U * dt
    sq_dt = p.sigma * math.sqrt(dt)
    rho_c = math.sqrt(max(0.0, 1.0 - p.rho * p.rho))
    half_var = 0.5 * p.sigma * p.sigma * dt
    survived = np.empty(n_acc, dtype=np.bool_)
    log_s_T = np.empty(n_acc)
    offset = 0
    for ci, m in enumerate(_chunk_sizes(n_acc)):
        rng = _chunk_rng(seed, _TAG_PRICE, ci)
        ls = np.full(m, math.log(s_t))
        u = u_acc[offset : offset + m].astype(float, copy=True)
        cr = np.zeros(m, dtype=np.bool_)
        pos = 0
        while pos < n_steps:
            k = min(SLAB, n_steps - pos)
            n_s = rng.standard_normal((m, k))
            n_z = rng.standard_normal((m, k))
            exps = rng.standard_exponential((m, k))
            kern.pair_slab(
                ls, u, cr, p.c_bar, mu_s_dt, mu_u_dt, sq_dt, p.rho, rho_c,
                half_var, n_s, n_z, exps,
            )
            pos += k
        survived[offset : offset + m] = ~cr
        log_s_T[offset : offset + m] = ls
        offset += m
    dw = (log_s_T - math.log(s_t) - drifts.mu_S * horizon) / p.sigma
    z = np.exp(p.sigma * dw - 0.5 * p.sigma**2 * horizon)
    x = survived.astype(float)
    y = z * x
    bond_scale = p.N * math.exp(-p.r * horizon)
    equity_scale = p.Cr * s_t * math.exp(-p.kappa * horizon)
    p_T_hat = float(x.mean())
    p_S_surv_hat = float(y.mean())
    pi_hat = bond_scale * p_T_hat + equity_scale * (1.0 - p_S_surv_hat)
    cov = np.cov(np.vstack([x, y]), ddof=1) if n_acc > 1 else np.zeros((2, 2))
    var_pi = (
        bond_scale**2 * cov[0, 0]
        + equity_scale**2 * cov[1, 1]
        - 2.0 * bond_scale * equity_scale * cov[0, 1]
    ) / n_acc
    return PriceOracleEstimate(
        pi=pi_hat,
        stderr=math.sqrt(max(var_pi, 0.0)),
        p_survive_T=p_T_hat,
        p_convert_S=1.0 - p_S_surv_hat,
        n_accepted=n_acc,
    )


def survival_oracle(
    p: ModelParams,
    drifts: MeasureDrifts,
    obs,
    t: float,
    horizon: float,
    n_paths: int,
    dt_fine: float,
    seed: int,
    min_accepted: int | None = None,
) -> MCEstimate:
    """Estimate of P(tau > horizon | survival and observations up to t).

    Continues each accepted conditional path from ``t`` to ``horizon``
    under the unconditional fundamental dynamics of the same measure.
    """
    if horizon < t - 1e-12:
        raise DomainError("horizon must not precede the conditioning time")
    u_acc, _ = conditional_sample(
        p, drifts, obs, t, n_paths, dt_fine, seed, min_accepted=min_accepted
    )
    n_acc = u_acc.size
    if n_acc == 0:
        raise OracleStarvationError("no accepted paths to continue")
    if horizon - t <= 1e-12:
        return MCEstimate(1.0, 0.0, n_acc)
    survived = _survive_starts(
        u_acc, p.c_bar, drifts.mu_U, p.sigma, horizon - t, dt_fine, seed,
        _TAG_CONT,
    )
    k = int(survived.sum())
    return MCEstimate(k / n_acc, _binomial_stderr(k, n_acc), n_acc)
