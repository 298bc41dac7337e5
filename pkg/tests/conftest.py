import math

import numpy as np
import pytest

from cocofilter.measures import Measure, drifts_under
from cocofilter.model import ModelParams, ObservationRecord


@pytest.fixture(scope="session")
def params():
    """Demonstration parameter set used throughout the suite."""
    return ModelParams(
        r=0.03,
        sigma=0.49,
        rho=0.5,
        a=0.5,
        kappa=0.0,
        L=35.0,
        N=100.0,
        Cr=100.0 / 35.0,
        c_bar=math.log(35.0),
        c_under=math.log(20.0),
        T=1.0,
        S0=100.0,
        U0=math.log(100.0),
    )


@pytest.fixture(scope="session")
def near_barrier_params(params):
    """Same constants with the barrier pulled close to the start value."""
    return ModelParams(
        r=params.r,
        sigma=params.sigma,
        rho=params.rho,
        a=params.a,
        kappa=params.kappa,
        L=params.L,
        N=params.N,
        Cr=params.Cr,
        c_bar=math.log(90.0),
        c_under=math.log(20.0),
        T=params.T,
        S0=params.S0,
        U0=math.log(100.0),
    )


def make_observations(p: ModelParams, n_steps: int, dt: float, seed: int):
    """Simulated risk-neutral stock observations on a uniform grid."""
    drifts = drifts_under(Measure.P_STAR, p)
    rng = np.random.default_rng(seed)
    times = np.round(np.arange(n_steps + 1) * dt, 12)
    prices = [p.S0]
    for step_dt in np.diff(times):
        z = rng.standard_normal()
        prices.append(
            prices[-1]
            * math.exp(drifts.mu_S * step_dt + p.sigma * math.sqrt(step_dt) * z)
        )
    return [
        ObservationRecord(float(t), float(s)) for t, s in zip(times, prices)
    ]


@pytest.fixture(scope="session")
def observations(params):
    return make_observations(params, n_steps=10, dt=0.01, seed=3)
