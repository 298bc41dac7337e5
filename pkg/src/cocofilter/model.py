"""Model constants and the observation/update timeline.

All quantities are annualized: times in years, rates per year, volatility
per square-root year.  Every type here is immutable after construction and
safe to share across threads.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DomainError

_TIME_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Scalar constants of the short-term-uncertainty model.

    Attributes
    ----------
    r : risk-free rate.
    sigma : volatility of both log-stock and the fundamental process.
    rho : correlation between the stock noise and the fundamental noise.
    a : barrier-shape parameter (steepens the benchmark barrier).
    kappa : dividend-like rate entering the barrier and the equity leg.
    L : covenant level of the benchmark barrier at maturity.
    N : bond face value.
    Cr : conversion ratio (shares per bond upon trigger).
    c_bar : conversion barrier for the fundamental process (log scale).
    c_under : default barrier, strictly below ``c_bar``.
    T : maturity in years.
    S0 : initial share price.
    U0 : initial fundamental value, strictly above ``c_bar``.
    allow_degenerate_rho : permit ``rho = 1`` for degenerate-limit tests only.
    """

    r: float
    sigma: float
    rho: float
    a: float
    kappa: float
    L: float
    N: float
    Cr: float
    c_bar: float
    c_under: float
    T: float
    S0: float
    U0: float
    allow_degenerate_rho: bool = False

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if not self.T > 0:
            raise DomainError(f"T must be positive, got {self.T}")
        if not self.S0 > 0:
            raise DomainError(f"S0 must be positive, got {self.S0}")
        if self.N < 0 or self.Cr < 0 or self.L < 0:
            raise DomainError("N, Cr and L must be nonnegative")
        if not self.c_under < self.c_bar:
            raise DomainError(
                f"barrier ordering violated: c_under={self.c_under} must lie "
                f"below c_bar={self.c_bar}"
            )
        if self.allow_degenerate_rho:
            if not -1.0 <= self.rho <= 1.0:
                raise DomainError(f"rho must lie in [-1, 1], got {self.rho}")
        elif not -1.0 <= self.rho < 1.0:
            raise DomainError(
                f"rho must lie in [-1, 1); rho=1 is reserved for the "
                f"degenerate-limit test mode (got {self.rho})"
            )
        if not self.U0 > self.c_bar:
            raise DomainError(
                f"contract already triggered: U0={self.U0} <= c_bar={self.c_bar}"
            )

    def with_rho(self, rho: float) -> "ModelParams":
        """Copy of the parameter set with a different correlation."""
        return replace(self, rho=rho)


@dataclass(frozen=True)
class ObservationRecord:
    """A timestamped stock-price observation."""

    time: float
    stock_price: float

    def __post_init__(self) -> None:
        if not self.stock_price > 0:
            raise DomainError(f"stock price must be positive, got {self.stock_price}")
        if self.time < 0:
            raise DomainError(f"observation time must be nonnegative, got {self.time}")


def _check_strictly_increasing(values: Sequence[float], label: str) -> None:
    for prev, cur in zip(values, values[1:]):
        if cur - prev <= _TIME_TOL:
            raise DomainError(
                f"{label} must be strictly increasing (tolerance {_TIME_TOL}); "
                f"found {prev} followed by {cur}"
            )


@dataclass(frozen=True)
class UpdateSchedule:
    """Full-information update times T_j and per-period observation times.

    ``observation_times[j]`` lists the stock-observation times inside
    ``[T_j, T_{j+1}]`` and must start exactly at ``T_j``.
    """

    update_times: tuple[float, ...]
    observation_times: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if not self.update_times:
            raise DomainError("schedule needs at least one update time")
        if self.update_times[0] != 0.0:
            raise DomainError(f"T_0 must be 0, got {self.update_times[0]}")
        _check_strictly_increasing(self.update_times, "update times")
        if len(self.observation_times) != len(self.update_times):
            raise DomainError(
                "need one observation-time block per update period "
                f"({len(self.update_times)} updates, "
                f"{len(self.observation_times)} blocks)"
            )
        for j, block in enumerate(self.observation_times):
            if not block:
                raise DomainError(f"observation block {j} is empty")
            if block[0] != self.update_times[j]:
                raise DomainError(
                    f"first observation of period {j} must equal T_{j}="
                    f"{self.update_times[j]}, got {block[0]}"
                )
            _check_strictly_increasing(block, f"observation times of period {j}")
            if j + 1 < len(self.update_times):
                if block[-1] > self.update_times[j + 1] + _TIME_TOL:
                    raise DomainError(
                        f"observations of period {j} overrun T_{j + 1}"
                    )

    @classmethod
    def single_period(cls, horizon: float, n_observations: int) -> "UpdateSchedule":
        """Uniform observation grid on [0, horizon] with one update at 0."""
        obs = tuple(np.linspace(0.0, horizon, n_observations + 1).tolist())
        return cls(update_times=(0.0,), observation_times=(obs,))


def floor_of(t: float, schedule: UpdateSchedule) -> float:
    """Last update time not later than ``t`` (the operator written as a floor).

    Raises :class:`DomainError` for negative ``t``.
    """
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    times = schedule.update_times
    idx = int(np.searchsorted(times, t, side="right")) - 1
    return times[max(idx, 0)]


def barrier_level(t: float, p: ModelParams) -> float:
    """Benchmark barrier at time ``t``.

    Constant-rate base case: ``L * exp(-r (T - t)) * exp((kappa + a sigma^2) (T - t))``.
    Equals ``L`` at maturity for every parameter set.
    """
    if t < 0 or t > p.T:
        raise DomainError(f"t={t} outside [0, T={p.T}]")
    ttm = p.T - t
    return p.L * math.exp((-p.r + p.kappa + p.a * p.sigma**2) * ttm)


# --- configuration mapping ------------------------------------------------

_MODEL_KEYS = tuple(
    f.name for f in fields(ModelParams) if f.name != "allow_degenerate_rho"
)
_SCHEDULE_KEYS = ("update_times", "observation_times")


def _reject_unknown(mapping: Mapping, allowed: Iterable[str], where: str) -> None:
    unknown = sorted(set(mapping) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {where} keys: {', '.join(unknown)}")


def model_params_from_mapping(mapping: Mapping) -> ModelParams:
    """Build :class:`ModelParams` from a config mapping, rejecting unknown keys."""
    _reject_unknown(mapping, _MODEL_KEYS, "model")
    missing = sorted(set(_MODEL_KEYS) - set(mapping))
    if missing:
        raise ConfigError(f"missing model keys: {', '.join(missing)}")
    try:
        return ModelParams(**{k: float(mapping[k]) for k in _MODEL_KEYS})
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc


def schedule_from_mapping(mapping: Mapping) -> UpdateSchedule:
    """Build :class:`UpdateSchedule` from a config mapping, rejecting unknown keys."""
    _reject_unknown(mapping, _SCHEDULE_KEYS, "schedule")
    missing = sorted(set(_SCHEDULE_KEYS) - set(mapping))
    if missing:
        raise ConfigError(f"missing schedule keys: {', '.join(missing)}")
    updates = tuple(float(t) for t in mapping["update_times"])
    blocks = tuple(
        tuple(float(t) for t in block) for block in mapping["observation_times"]
    )
    try:
        return UpdateSchedule(update_times=updates, observation_times=blocks)
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
