"""Conditional survival, CoCo price, and the compensator decomposition.

The price on the pre-conversion event is

    pi(t) = N B(t,T) P^T(tau > T | G_t)
          + C_r S_t exp(-kappa (T - t)) P^(S)(tau <= T | G_t)

with ``B(t,T) = exp(-r (T-t))``.  Each conditional probability integrates
the closed-form barrier survival against the filter posterior built under
the corresponding measure's drifts (the observation likelihood factors
cancel identically between the two filter runs).
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InvariantViolationError, MeasureMismatchError
from .filtering import PosteriorDensity, posterior_step, reset_at_update
from .hitting import survival_closed_form
from .measures import Measure, drifts_under, equivalent_tags
from .model import ModelParams, ObservationRecord


@dataclass(frozen=True)
class SurvivalReport:
    """Conditional survival probabilities under each measure at one time."""

    t: float
    horizon: float
    p_survive_star: float
    p_survive_T: float
    p_convert_S: float

    def __post_init__(self) -> None:
        for name in ("p_survive_star", "p_survive_T", "p_convert_S"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name}={v} outside [0, 1]")


@dataclass(frozen=True)
class PriceQuote:
    """CoCo price with its bond/equity leg decomposition."""

    t: float
    pi: float
    bond_leg: float
    equity_leg: float

    def __post_init__(self) -> None:
        if self.pi < 0 or self.bond_leg < 0 or self.equity_leg < 0:
            raise DomainError("price legs must be nonnegative")


@dataclass(frozen=True)
class CompensatorPath:
    """Doob-Meyer split F = M + A of the conditional conversion probability."""

    times: np.ndarray
    F_values: np.ndarray
    A_values: np.ndarray
    M_values: np.ndarray


def conditional_survival(
    post: PosteriorDensity,
    measure_tag: Measure,
    p: ModelParams,
    horizon: float,
) -> float:
    """P(tau > horizon | G_t) for a posterior anchored at t.

    Trapezoid integral of the closed-form survival against the posterior;
    the posterior must have been built under the same measure's drifts.
    """
    if post.measure is not None and not equivalent_tags(post.measure, measure_tag):
        raise MeasureMismatchError(
            f"posterior built under {post.measure} queried under {measure_tag}"
        )
    dt = horizon - post.anchor_time
    if dt < -1e-12:
        raise DomainError("horizon precedes the posterior anchor")
    if dt <= 1e-14:
        return 1.0
    drifts = drifts_under(measure_tag, p)
    surv = survival_closed_form(post.grid, p.c_bar, drifts.mu_U, p.sigma, dt)
    val = post.expectation(np.asarray(surv))
    return min(max(val, 0.0), 1.0)


def survival_report(
    post_T: PosteriorDensity,
    post_S: PosteriorDensity,
    p: ModelParams,
    horizon: float | None = None,
) -> SurvivalReport:
    """Bundle the conditional probabilities of both pricing measures."""
    if abs(post_T.anchor_time - post_S.anchor_time) > 1e-9:
        raise DomainError("posteriors must share the anchor time")
    hz = p.T if horizon is None else horizon
    p_star = conditional_survival(post_T, Measure.P_STAR, p, hz)
    p_fwd = conditional_survival(post_T, Measure.P_T, p, hz)
    p_conv = 1.0 - conditional_survival(post_S, Measure.P_S, p, hz)
    return SurvivalReport(
        t=post_T.anchor_time,
        horizon=hz,
        p_survive_star=p_star,
        p_survive_T=p_fwd,
        p_convert_S=p_conv,
    )


def price(
    post_T: PosteriorDensity,
    post_S: PosteriorDensity,
    p: ModelParams,
    t: float,
    s_t: float,
) -> PriceQuote:
    """CoCo price quote on the pre-conversion event.

    ``post_T`` must carry P*/P^T drifts and ``post_S`` the share-measure
    drifts; both anchored at ``t`` on the same observation history.
    ``s_t`` is the stock price at valuation.
    """
    if s_t <= 0:
        raise DomainError("valuation stock price must be positive")
    if abs(post_T.anchor_time - t) > 1e-9 or abs(post_S.anchor_time - t) > 1e-9:
        raise DomainError("posteriors must be anchored at the valuation time")
    if post_S.measure is not None and not equivalent_tags(post_S.measure, Measure.P_S):
        raise MeasureMismatchError("equity-leg posterior must carry P^(S) drifts")
    ttm = p.T - t
    if ttm < 0:
        raise DomainError("valuation after maturity")
    p_surv_T = conditional_survival(post_T, Measure.P_T, p, p.T)
    p_conv_S = 1.0 - conditional_survival(post_S, Measure.P_S, p, p.T)
    bond = p.N * math.exp(-p.r * ttm) * p_surv_T
    equity = p.Cr * s_t * math.exp(-p.kappa * ttm) * p_conv_S
    return PriceQuote(t=t, pi=bond + equity, bond_leg=bond, equity_leg=equity)


# --- compensator ------------------------------------------------------------


@dataclass(frozen=True)
class UpdateScenario:
    """A realized information scenario spanning one or more update periods.

    ``u_at_updates[j]`` is the fundamental value revealed at ``T_j``;
    ``crossed_in_period[j]`` records whether the barrier was hit inside
    ``(T_j, T_{j+1}]`` (revealed at ``T_{j+1}``).  Optional per-period stock
    observations refine the survival probability between updates.
    """

    update_times: tuple[float, ...]
    u_at_updates: tuple[float, ...]
    crossed_in_period: tuple[bool, ...]
    observations: tuple[tuple[ObservationRecord, ...], ...] | None = None

    def __post_init__(self) -> None:
        m = len(self.update_times)
        if m < 2:
            raise DomainError("scenario must span at least two update times")
        if len(self.u_at_updates) != m:
            raise DomainError("need one fundamental value per update time")
        if len(self.crossed_in_period) != m - 1:
            raise DomainError("need one crossing flag per period")
        if self.observations is not None and len(self.observations) != m - 1:
            raise DomainError("need one observation block per period")


def _period_survival_curve(
    rel_times: np.ndarray,
    u_start: float,
    p: ModelParams,
    mu_u: float,
    obs: tuple[ObservationRecord, ...] | None,
    period_start: float,
) -> np.ndarray:
    """P(tau > period_start + s | info) for relative offsets ``s`` >= 0."""
    out = np.ones_like(rel_times)
    if u_start <= p.c_bar:
        # crossing certain immediately (revealed at the period end)
        return np.where(rel_times > 0, 0.0, 1.0)
    if obs is None or len(obs) < 2:
        pos = rel_times > 1e-14
        if np.any(pos):
            out[pos] = survival_closed_form(
                u_start, p.c_bar, mu_u, p.sigma, rel_times[pos]
            )
        return out
    # interior observations: chain the filter, closed form between records
    drifts = drifts_under(Measure.P_STAR, p)
    post = reset_at_update(
        u_start, obs[0].time, p,
        period_length=obs[-1].time - obs[0].time, measure=drifts.measure_tag,
    )
    posts = [post]
    for prev, cur in zip(obs, obs[1:]):
        posts.append(posterior_step(posts[-1], (prev, cur), p, drifts))
    obs_rel = np.array([o.time - period_start for o in obs])
    for i, s in enumerate(rel_times):
        if s <= 1e-14:
            continue
        k = int(np.searchsorted(obs_rel, s + 1e-12) - 1)
        k = max(k, 0)
        pk = posts[k]
        base = pk.survival_mass
        gap = s - obs_rel[k]
        if gap > 1e-14:
            surv = survival_closed_form(pk.grid, p.c_bar, drifts.mu_U, p.sigma, gap)
            base *= pk.expectation(np.asarray(surv))
        out[i] = min(base, 1.0)
    return out


def compensator_path(
    scenario: UpdateScenario,
    p: ModelParams,
    *,
    grid_step: float = 1e-3,
) -> CompensatorPath:
    """F, A and M paths along one scenario.

    ``F(t) = P*(tau <= t | market information)``; the compensator subtracts
    the jumps of F at update times, which by construction leaves A
    continuous across updates, and M collects exactly those jumps.
    """
    updates = np.asarray(scenario.update_times)
    horizon = updates[-1]
    times = np.unique(
        np.concatenate([np.arange(0.0, horizon + grid_step / 2, grid_step), updates])
    )
    mu_u = drifts_under(Measure.P_STAR, p).mu_U
    F = np.empty_like(times)
    revealed_crossed = False
    for j in range(len(updates) - 1):
        t0, t1 = updates[j], updates[j + 1]
        sel = (times >= t0) & (times < t1) if j < len(updates) - 2 else (
            (times >= t0) & (times <= t1)
        )
        rel = times[sel] - t0
        if revealed_crossed:
            F[sel] = 1.0
        else:
            obs = scenario.observations[j] if scenario.observations else None
            surv = _period_survival_curve(
                rel, scenario.u_at_updates[j], p, mu_u, obs, t0
            )
            F[sel] = 1.0 - surv
            # at the period's right endpoint the update reveals the truth
            if j == len(updates) - 2:
                at_end = sel & (times == t1)
                if np.any(at_end):
                    F[at_end] = 1.0 if (
                        revealed_crossed or scenario.crossed_in_period[j]
                    ) else 0.0
        if scenario.crossed_in_period[j]:
            revealed_crossed = True
    # jumps at update times T_1.. (left limit taken along the grid)
    jump_at = {}
    for t_j in updates[1:]:
        idx = int(np.searchsorted(times, t_j))
        jump_at[t_j] = F[idx] - F[idx - 1]
    jumps_cum = np.zeros_like(times)
    for t_j, dF in jump_at.items():
        jumps_cum[times >= t_j - 1e-15] += dF
    A = F - jumps_cum
    M = F - A
    return CompensatorPath(times=times, F_values=F, A_values=A, M_values=M)


def check_compensator_monotone(cp: CompensatorPath, tol: float = 1e-10) -> None:
    """Raise when the compensator decreases anywhere beyond ``tol``."""
    drops = np.diff(cp.A_values)
    worst = float(drops.min()) if drops.size else 0.0
    if worst < -tol:
        raise InvariantViolationError(
            f"compensator decreases by {-worst:.3e} (tolerance {tol})"
        )


# --- CSV export -------------------------------------------------------------


def survival_series_to_csv(rows: Sequence[SurvivalReport]) -> str:
    """SurvivalReport series as CSV text (t, p_survive_star, p_convert_S)."""
    buf = io.StringIO()
    buf.write("t,p_survive_star,p_convert_S\r\n")
    for r in rows:
        buf.write(f"{r.t:.9f},{r.p_survive_star:.12f},{r.p_convert_S:.12f}\r\n")
    return buf.getvalue()


def compensator_to_csv(cp: CompensatorPath) -> str:
    """CompensatorPath as CSV text (t, F, A, M)."""
    buf = io.StringIO()
    buf.write("t,F,A,M\r\n")
    for t, f, a, m in zip(cp.times, cp.F_values, cp.A_values, cp.M_values):
        buf.write(f"{t:.9f},{f:.12f},{a:.12f},{m:.12f}\r\n")
    return buf.getvalue()
