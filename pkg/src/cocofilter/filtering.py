"""Grid-based Bayes filter for the partially observed fundamental process.

Between full-information updates the conditional law of U_t given survival
and the observed stock series is maintained as a density on a uniform grid
anchored at the conversion barrier.  Each observation triggers one Bayes
step: the prior is propagated through the product of the pinned-bridge
no-hit factor and the Gaussian transition kernel of the conditioned
increment, then renormalized; the running normalization constants
accumulate into the survival mass P(tau > t | observations).

The stock-increment likelihood factor (a Gaussian in the observed increment
only) cancels in the Bayes ratio and is never evaluated.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import backend
from .errors import (
    ConversionTriggeredError,
    DegenerateKernelError,
    DomainError,
    MeasureMismatchError,
    PosteriorCollapseError,
)
from .measures import Measure, MeasureDrifts, equivalent_tags
from .model import ModelParams, ObservationRecord

DEFAULT_GRID_POINTS = 2048
DEFAULT_SPAN_SIGMAS = 8.0

_NORMALIZATION_TOL = 1e-10
_COLLAPSE_FLOOR = 1e-300
_TOP_MASS_LIMIT = 1e-8
_BAND_SIGMAS = 8.5  # Gaussian LUT support; tails below exp(-36) are dropped


@dataclass(frozen=True)
class PosteriorDensity:
    """Discretized conditional density of U_t given survival and observations.

    ``weights`` are density values on ``grid``; their trapezoid integral is
    1.  ``survival_mass`` is P(tau > anchor_time | observations) accumulated
    since the last full-information update.
    """

    grid: np.ndarray
    weights: np.ndarray
    anchor_time: float
    survival_mass: float
    barrier: float
    measure: Measure | None = None

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "weights", weights)
        if grid.ndim != 1 or grid.size < 3 or grid.shape != weights.shape:
            raise DomainError("grid and weights must be matching 1-D arrays")
        if np.any(np.diff(grid) <= 0):
            raise DomainError("grid must be strictly increasing")
        if abs(grid[0] - self.barrier) > 1e-12:
            raise DomainError("grid lower edge must sit on the barrier")
        if np.any(weights < 0):
            raise DomainError("density values must be nonnegative")
        total = np.trapezoid(weights, grid)
        if abs(total - 1.0) > _NORMALIZATION_TOL:
            raise DomainError(f"density must integrate to 1, got {total!r}")
        if not 0.0 < self.survival_mass <= 1.0 + 1e-12:
            raise DomainError(
                f"survival mass must lie in (0, 1], got {self.survival_mass}"
            )
        grid.setflags(write=False)
        weights.setflags(write=False)

    @property
    def spacing(self) -> float:
        return float(self.grid[1] - self.grid[0])

    def integral(self) -> float:
        return float(np.trapezoid(self.weights, self.grid))

    def mean(self) -> float:
        return float(np.trapezoid(self.grid * self.weights, self.grid))

    def std(self) -> float:
        m = self.mean()
        var = float(np.trapezoid((self.grid - m) ** 2 * self.weights, self.grid))
        return math.sqrt(max(var, 0.0))

    def expectation(self, values: np.ndarray) -> float:
        """Trapezoid integral of ``values`` (sampled on the grid) against self."""
        return float(np.trapezoid(values * self.weights, self.grid))


@dataclass(frozen=True)
class TransitionKernelInputs:
    """Observed increment and step data feeding one Bayes step."""

    d_log_s: float
    dt: float
    drifts: MeasureDrifts

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise DomainError(f"dt must be positive, got {self.dt}")


def kernel_h(z, k: TransitionKernelInputs, p: ModelParams):
    """Gaussian density of the conditioned fundamental increment.

    Mean ``(mu_U - rho mu_S) dt``, variance ``sigma^2 (1 - rho^2) dt``.
    Degenerates to a point mass at ``|rho| = 1``.
    """
    if abs(p.rho) >= 1.0:
        raise DegenerateKernelError(
            "kernel has no density at |rho| = 1; use the degenerate limit path"
        )
    mean = (k.drifts.mu_U - p.rho * k.drifts.mu_S) * k.dt
    var = p.sigma**2 * (1.0 - p.rho**2) * k.dt
    z = np.asarray(z, dtype=float)
    out = np.exp(-((z - mean) ** 2) / (2.0 * var)) / math.sqrt(2.0 * math.pi * var)
    if out.ndim == 0:
        return float(out)
    return out


def _trapezoid_weights(n: int, du: float) -> np.ndarray:
    w = np.full(n, du)
    w[0] = 0.5 * du
    w[-1] = 0.5 * du
    return w


def reset_at_update(
    u_observed: float,
    t: float,
    p: ModelParams,
    *,
    period_length: float | None = None,
    grid_points: int = DEFAULT_GRID_POINTS,
    span_sigmas: float = DEFAULT_SPAN_SIGMAS,
    measure: Measure | None = None,
) -> PosteriorDensity:
    """Point-mass posterior at a full-information update.

    The grid spans ``[c_bar, u_observed + span_sigmas * sigma * sqrt(period)]``
    with the anchor placed exactly on a node, so that quadrature against the
    spike reproduces point evaluation.  Survival mass resets to 1.
    """
    if u_observed <= p.c_bar:
        raise ConversionTriggeredError(
            f"u={u_observed} at or below the conversion barrier {p.c_bar}"
        )
    if grid_points < 16:
        raise DomainError("grid needs at least 16 points")
    period = period_length if period_length is not None else p.T - t
    if not period > 0:
        raise DomainError(f"update period must be positive, got {period}")
    span_up = span_sigmas * p.sigma * math.sqrt(period)
    gap = u_observed - p.c_bar
    du0 = (gap + span_up) / (grid_points - 1)
    if gap >= 0.5 * du0:
        # snap the grid so the anchor sits exactly on a node
        n_anchor = max(1, int(round(gap / du0)))
        du = gap / n_anchor
    else:
        # anchor hugs the barrier: keep the nominal spacing and accept a
        # sub-cell displacement of the spike
        n_anchor = 1
        du = du0
    n_up = max(1, int(math.ceil(span_up / du)))
    grid = p.c_bar + du * np.arange(n_anchor + n_up + 1)
    weights = np.zeros_like(grid)
    weights[n_anchor] = 1.0 / du
    return PosteriorDensity(
        grid=grid,
        weights=weights,
        anchor_time=t,
        survival_mass=1.0,
        barrier=p.c_bar,
        measure=measure,
    )


def _extend_grid(prior: PosteriorDensity, extra_points: int) -> PosteriorDensity:
    du = prior.spacing
    n = prior.grid.size
    grid = prior.grid[0] + du * np.arange(n + extra_points)
    weights = np.concatenate([prior.weights, np.zeros(extra_points)])
    # re-measure the trapezoid integral on the extended grid; padding with
    # zeros only touches the old top node's half-weight
    total = np.trapezoid(weights, grid)
    return PosteriorDensity(
        grid=grid,
        weights=weights / total,
        anchor_time=prior.anchor_time,
        survival_mass=prior.survival_mass,
        barrier=prior.barrier,
        measure=prior.measure,
    )


def _top_mass(grid: np.ndarray, weights: np.ndarray, cells: int = 4) -> float:
    return float(np.trapezoid(weights[-(cells + 1) :], grid[-(cells + 1) :]))


def _support_top(post: PosteriorDensity) -> float:
    """Highest grid point carrying non-negligible density."""
    tiny = post.weights.max() * 1e-12
    idx = np.nonzero(post.weights > tiny)[0]
    if idx.size == 0:
        return float(post.grid[-1])
    return float(post.grid[idx[-1]])


def _degenerate_step(
    prior: PosteriorDensity,
    shift: float,
    p: ModelParams,
    drifts: MeasureDrifts,
    new_time: float,
) -> PosteriorDensity:
    """|rho| = 1 limit: deterministic translation plus survival indicator."""
    grid = prior.grid
    moved = np.interp(grid, grid + shift, prior.weights, left=0.0, right=0.0)
    moved = np.where(grid > p.c_bar, moved, 0.0)
    norm = np.trapezoid(moved, grid)
    if norm <= _COLLAPSE_FLOOR:
        raise PosteriorCollapseError(
            "deterministic translation pushed all mass through the barrier"
        )
    return PosteriorDensity(
        grid=grid,
        weights=moved / norm,
        anchor_time=new_time,
        survival_mass=prior.survival_mass * min(norm, 1.0),
        barrier=prior.barrier,
        measure=drifts.measure_tag,
    )


def posterior_step(
    prior: PosteriorDensity,
    obs_pair: tuple[ObservationRecord, ObservationRecord],
    p: ModelParams,
    drifts: MeasureDrifts,
) -> PosteriorDensity:
    """One Bayes update of the posterior across a single observation step.

    ``new(v) propto integral prior(u) * bridge_no_hit(u, v) * h(v - u - rho d_log_s) du``

    computed by trapezoid quadrature on the grid; the normalization constant
    multiplies the survival mass before the density is renormalized.  The
    grid is extended and the step redone whenever mass builds up near the
    top edge.
    """
    prev, cur = obs_pair
    dt = cur.time - prev.time
    if dt <= 0:
        raise DomainError("observation pair must be strictly ordered in time")
    if abs(prev.time - prior.anchor_time) > 1e-9:
        raise DomainError(
            f"prior anchored at {prior.anchor_time} but step starts at {prev.time}"
        )
    if prior.measure is not None and not equivalent_tags(
        prior.measure, drifts.measure_tag
    ):
        raise MeasureMismatchError(
            f"prior built under {prior.measure} cannot be advanced under "
            f"{drifts.measure_tag}"
        )
    d_log_s = math.log(cur.stock_price / prev.stock_price)

    if abs(p.rho) >= 1.0:
        shift = p.rho * d_log_s + (drifts.mu_U - p.rho * drifts.mu_S) * dt
        return _degenerate_step(prior, shift, p, drifts, cur.time)

    shift = p.rho * d_log_s + (drifts.mu_U - p.rho * drifts.mu_S) * dt
    var = p.sigma**2 * (1.0 - p.rho**2) * dt
    gamma = 2.0 / (p.sigma**2 * dt)
    kern = backend.kernels()

    work = prior
    width = _BAND_SIGMAS * math.sqrt(var)
    # pre-extend when the shift carries the support past the top edge
    reach = _support_top(prior) + max(shift, 0.0) + width
    if reach > prior.grid[-1]:
        extra = int(math.ceil((reach - prior.grid[-1]) / prior.spacing)) + 8
        work = _extend_grid(prior, extra)
    for _ in range(4):
        grid = work.grid
        du = work.spacing
        n = grid.size
        d_lo = max(-(n - 1), int(math.floor((shift - width) / du)))
        d_hi = min(n - 1, int(math.ceil((shift + width) / du)))
        offsets = du * np.arange(d_lo, d_hi + 1)
        glut = np.exp(-((offsets - shift) ** 2) / (2.0 * var)) / math.sqrt(
            2.0 * math.pi * var
        )
        wp = _trapezoid_weights(n, du) * work.weights
        gap = grid - work.barrier
        unnorm = kern.filter_step(wp, gap, glut, d_lo, gamma)
        top = _top_mass(grid, unnorm)
        norm = float(np.trapezoid(unnorm, grid))
        if norm <= _COLLAPSE_FLOOR:
            raise PosteriorCollapseError(
                "posterior normalization vanished: observations are "
                "numerically incompatible with survival"
            )
        if top <= _TOP_MASS_LIMIT * norm:
            break
        work = _extend_grid(work, max(8, n // 4))
    else:
        raise DomainError("posterior support outgrew the grid despite expansion")

    survival_mass = work.survival_mass * min(norm, 1.0)
    return PosteriorDensity(
        grid=work.grid,
        weights=unnorm / norm,
        anchor_time=cur.time,
        survival_mass=survival_mass,
        barrier=work.barrier,
        measure=drifts.measure_tag,
    )


def run_filter(
    p: ModelParams,
    drifts: MeasureDrifts,
    observations: Sequence[ObservationRecord],
    *,
    u0: float | None = None,
    period_length: float | None = None,
    grid_points: int = DEFAULT_GRID_POINTS,
    span_sigmas: float = DEFAULT_SPAN_SIGMAS,
) -> list[PosteriorDensity]:
    """Filter a full observation series starting from a fresh update.

    Returns one posterior per observation record; the first entry is the
    point-mass reset at the anchor.
    """
    if not observations:
        raise DomainError("empty observation series")
    anchor = observations[0]
    start = p.U0 if u0 is None else u0
    period = (
        period_length
        if period_length is not None
        else p.T - anchor.time
    )
    posts = [
        reset_at_update(
            start, anchor.time, p,
            period_length=period, grid_points=grid_points,
            span_sigmas=span_sigmas, measure=drifts.measure_tag,
        )
    ]
    for prev, cur in zip(observations, observations[1:]):
        posts.append(posterior_step(posts[-1], (prev, cur), p, drifts))
    return posts


# --- CSV export -------------------------------------------------------------


def posterior_to_csv(post: PosteriorDensity) -> str:
    """Posterior snapshot as CSV text: metadata comment, then (u, density)."""
    buf = io.StringIO()
    meas = post.measure.value if post.measure is not None else ""
    buf.write(
        f"# anchor_time={post.anchor_time!r},survival_mass={post.survival_mass!r},"
        f"barrier={post.barrier!r},measure={meas}\r\n"
    )
    buf.write("u,density\r\n")
    for u, w in zip(post.grid, post.weights):
        buf.write(f"{u:.12f},{w:.12f}\r\n")
    return buf.getvalue()


def write_posterior_csv(post: PosteriorDensity, path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(posterior_to_csv(post))
