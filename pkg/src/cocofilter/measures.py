"""Drifts of (log S, U) under the pricing measures and Radon-Nikodym weights.

With a constant interest rate the T-forward measure coincides with the
risk-neutral measure, so ``P_T`` carries the same drifts as ``P_STAR`` and a
unit path weight.  The share measure ``P_S`` tilts the stock drift up by
``sigma^2`` and the fundamental drift by ``rho sigma^2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .model import ModelParams


class Measure(enum.Enum):
    P_STAR = "P*"
    P_T = "P^T"
    P_S = "P^(S)"


@dataclass(frozen=True)
class MeasureDrifts:
    """Per-year drift pair of (log S, U) under one measure."""

    measure_tag: Measure
    mu_S: float
    mu_U: float


def drifts_under(measure_tag: Measure, p: ModelParams) -> MeasureDrifts:
    """Drift pair for the requested measure.

    ``P_STAR`` and ``P_T`` return identical values in the constant-rate base
    case; ``P_S`` adds ``sigma^2`` to the stock drift and ``rho sigma^2`` to
    the fundamental drift.
    """
    var = p.sigma**2
    if measure_tag in (Measure.P_STAR, Measure.P_T):
        return MeasureDrifts(measure_tag, p.r - 0.5 * var, (p.a - 0.5) * var)
    if measure_tag is Measure.P_S:
        return MeasureDrifts(
            measure_tag, p.r + 0.5 * var, (p.a - 0.5 + p.rho) * var
        )
    raise DomainError(f"unknown measure tag {measure_tag!r}")


def equivalent_tags(tag_a: Measure, tag_b: Measure) -> bool:
    """True when two tags induce the same dynamics (P* and P^T coincide)."""
    star = {Measure.P_STAR, Measure.P_T}
    if tag_a in star and tag_b in star:
        return True
    return tag_a is tag_b


def brownian_terminal_from_path(stock_path: np.ndarray, p: ModelParams, horizon: float) -> float:
    """Recover W*_T from the terminal stock value of a discrete path."""
    s0 = float(stock_path[0])
    sT = float(stock_path[-1])
    return (math.log(sT / s0) - (p.r - 0.5 * p.sigma**2) * horizon) / p.sigma


def rn_weight(measure_tag: Measure, stock_path: np.ndarray, p: ModelParams) -> float:
    """Radon-Nikodym path weight d(measure)/dP* evaluated on one stock path.

    ``stock_path`` holds share prices on a uniform grid over [0, T].  For
    ``P_T`` the weight is identically 1 (zero bond volatility); for ``P_S``
    it is ``exp(sigma W*_T - sigma^2 T / 2)`` with the Brownian terminal value
    recovered from the terminal log-stock value.
    """
    path = np.asarray(stock_path, dtype=float)
    if path.ndim != 1 or path.size < 2:
        raise DomainError("stock path must be a 1-D array with at least two points")
    if not np.all(path > 0):
        raise DomainError("stock path values must be positive")
    if measure_tag is Measure.P_T:
        return 1.0
    if measure_tag is Measure.P_S:
        w_T = brownian_terminal_from_path(path, p, p.T)
        return math.exp(p.sigma * w_T - 0.5 * p.sigma**2 * p.T)
    raise DomainError(f"rn_weight defined for P_T and P_S only, got {measure_tag!r}")


def rn_weights_from_terminal(log_s_T: np.ndarray, p: ModelParams, horizon: float) -> np.ndarray:
    """Vectorized ``P_S`` weights from terminal log-stock values.

    Matches :func:`rn_weight` applied path by path; used for large Monte
    Carlo batches where full paths are not stored.
    """
    log_s_T = np.asarray(log_s_T, dtype=float)
    w_T = (log_s_T - math.log(p.S0) - (p.r - 0.5 * p.sigma**2) * horizon) / p.sigma
    return np.exp(p.sigma * w_T - 0.5 * p.sigma**2 * horizon)
