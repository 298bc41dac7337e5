import math

import numpy as np
import pytest

from cocofilter.errors import (
    ConversionTriggeredError,
    DegenerateKernelError,
    DomainError,
    MeasureMismatchError,
    PosteriorCollapseError,
)
from cocofilter.filtering import (
    PosteriorDensity,
    TransitionKernelInputs,
    kernel_h,
    posterior_step,
    posterior_to_csv,
    reset_at_update,
    run_filter,
)
from cocofilter.hitting import bridge_no_hit
from cocofilter.measures import Measure, drifts_under
from cocofilter.model import ModelParams, ObservationRecord
from cocofilter.oracle import product_formula_quadrature

from conftest import make_observations


def spike_and_step(p, drifts, d_log_s, dt, grid_points=2048):
    """One posterior step from a fresh update, returning (prior, posterior)."""
    prior = reset_at_update(
        p.U0, 0.0, p, grid_points=grid_points, measure=drifts.measure_tag
    )
    obs = (
        ObservationRecord(0.0, p.S0),
        ObservationRecord(dt, p.S0 * math.exp(d_log_s)),
    )
    return prior, posterior_step(prior, obs, p, drifts)


class TestKernelH:
    def test_peak_value(self, params):
        d = drifts_under(Measure.P_STAR, params)
        k = TransitionKernelInputs(d_log_s=0.01, dt=0.02, drifts=d)
        mode = (d.mu_U - params.rho * d.mu_S) * k.dt
        peak = kernel_h(mode, k, params)
        expected = 1.0 / (
            params.sigma
            * math.sqrt(1 - params.rho**2)
            * math.sqrt(2 * math.pi * k.dt)
        )
        assert peak == pytest.approx(expected, rel=1e-14)

    def test_normalization(self, params):
        d = drifts_under(Measure.P_STAR, params)
        k = TransitionKernelInputs(d_log_s=0.01, dt=0.02, drifts=d)
        sd = params.sigma * math.sqrt((1 - params.rho**2) * k.dt)
        mean = (d.mu_U - params.rho * d.mu_S) * k.dt
        z = np.linspace(mean - 8 * sd, mean + 8 * sd, 20001)
        total = np.trapezoid(kernel_h(z, k, params), z)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_zero_correlation_reduces_to_plain_increment_density(self, params):
        p = params.with_rho(0.0)
        d = drifts_under(Measure.P_STAR, p)
        k = TransitionKernelInputs(d_log_s=0.3, dt=0.05, drifts=d)
        z = np.linspace(-0.5, 0.5, 101)
        sd = p.sigma * math.sqrt(k.dt)
        expected = np.exp(-((z - d.mu_U * k.dt) ** 2) / (2 * sd**2)) / (
            sd * math.sqrt(2 * math.pi)
        )
        assert np.allclose(kernel_h(z, k, p), expected, rtol=1e-12)

    def test_degenerate_correlation_rejected(self, params):
        p = ModelParams(
            **{**params.__dict__, "rho": 1.0, "allow_degenerate_rho": True}
        )
        d = drifts_under(Measure.P_STAR, p)
        with pytest.raises(DegenerateKernelError):
            kernel_h(0.0, TransitionKernelInputs(0.0, 0.01, d), p)


class TestResetAtUpdate:
    def test_initial_spike(self, params):
        post = reset_at_update(params.U0, 0.0, params)
        assert post.survival_mass == 1.0
        assert post.integral() == pytest.approx(1.0, abs=1e-12)
        assert post.mean() == pytest.approx(params.U0, abs=1e-9)
        # anchor sits exactly on a node
        k = int(np.argmax(post.weights))
        assert post.grid[k] == pytest.approx(params.U0, abs=1e-14)

    def test_spike_adjacent_to_barrier(self, params):
        post = reset_at_update(params.c_bar + 1e-9, 0.0, params)
        assert post.integral() == pytest.approx(1.0, abs=1e-10)

    def test_triggered_value_rejected(self, params):
        with pytest.raises(ConversionTriggeredError):
            reset_at_update(params.c_bar, 0.0, params)

    def test_grid_lower_edge_on_barrier(self, params):
        post = reset_at_update(params.U0, 0.0, params)
        assert post.grid[0] == params.c_bar


class TestPosteriorStep:
    def test_zero_correlation_matches_conditioned_transition(self, near_barrier_params):
        # with rho = 0 the observation is uninformative and the posterior is
        # the bridge-conditioned Gaussian transition density, renormalized
        p = near_barrier_params.with_rho(0.0)
        d = drifts_under(Measure.P_STAR, p)
        dt = 0.02
        prior, post = spike_and_step(p, d, d_log_s=0.17, dt=dt)
        grid = post.grid
        sd = p.sigma * math.sqrt(dt)
        gauss = np.exp(-((grid - p.U0 - d.mu_U * dt) ** 2) / (2 * sd**2)) / (
            sd * math.sqrt(2 * math.pi)
        )
        expected = bridge_no_hit(p.U0, grid, p.c_bar, p.sigma, dt) * gauss
        expected /= np.trapezoid(expected, grid)
        assert np.max(np.abs(post.weights - expected)) < 1e-6 * expected.max()

    def test_density_vanishes_on_barrier(self, near_barrier_params, params):
        for p in (near_barrier_params, params):
            d = drifts_under(Measure.P_STAR, p)
            _, post = spike_and_step(p, d, d_log_s=-0.01, dt=0.01)
            assert post.weights[0] == 0.0

    def test_survival_mass_nonincreasing(self, near_barrier_params):
        p = near_barrier_params
        d = drifts_under(Measure.P_STAR, p)
        obs = make_observations(p, n_steps=8, dt=0.01, seed=14)
        posts = run_filter(p, d, obs)
        masses = [q.survival_mass for q in posts]
        assert all(b <= a + 1e-15 for a, b in zip(masses, masses[1:]))
        assert masses[-1] < 1.0

    def test_high_correlation_shrinks_posterior_width(self, params):
        p = params.with_rho(0.99)
        d = drifts_under(Measure.P_STAR, p)
        dt = 0.01
        _, post = spike_and_step(p, d, d_log_s=0.02, dt=dt)
        bound = math.sqrt(1 - 0.99**2) * p.sigma * math.sqrt(dt) * 1.1
        assert post.std() <= bound

    def test_small_dt_translation_recovery(self, params):
        # dt -> 0: one step moves the spike by rho d_log_s plus drift and
        # its width collapses; resolved on a locally refined grid
        p = params.with_rho(0.6)
        d = drifts_under(Measure.P_STAR, p)
        dt, dls = 1e-6, 2e-4
        prior = reset_at_update(
            p.U0, 0.0, p, period_length=4e-5, grid_points=4096,
            measure=d.measure_tag,
        )
        obs = (
            ObservationRecord(0.0, p.S0),
            ObservationRecord(dt, p.S0 * math.exp(dls)),
        )
        post = posterior_step(prior, obs, p, d)
        target = p.U0 + p.rho * dls + (d.mu_U - p.rho * d.mu_S) * dt
        assert post.mean() == pytest.approx(target, abs=2 * post.spacing)
        assert post.std() < 4 * p.sigma * math.sqrt(dt)

    def test_chapman_kolmogorov_at_zero_correlation(self, near_barrier_params):
        # two dt steps equal one 2dt step when observations carry no
        # information; quadrature tolerance in sup norm
        p = near_barrier_params.with_rho(0.0)
        d = drifts_under(Measure.P_STAR, p)
        dt = 0.02
        obs = [
            ObservationRecord(0.0, p.S0),
            ObservationRecord(dt, p.S0 * 1.01),
            ObservationRecord(2 * dt, p.S0 * 0.99),
        ]
        prior = reset_at_update(p.U0, 0.0, p, measure=d.measure_tag)
        two = posterior_step(
            posterior_step(prior, (obs[0], obs[1]), p, d), (obs[1], obs[2]), p, d
        )
        one = posterior_step(
            prior, (obs[0], ObservationRecord(2 * dt, p.S0)), p, d
        )
        joined = np.interp(two.grid, one.grid, one.weights)
        assert np.max(np.abs(two.weights - joined)) < 1e-4
        assert two.survival_mass == pytest.approx(one.survival_mass, rel=1e-6)

    def test_normalization_invariant_along_run(self, params, observations):
        d = drifts_under(Measure.P_STAR, params)
        for post in run_filter(params, d, observations):
            assert post.integral() == pytest.approx(1.0, abs=1e-10)

    def test_measure_mismatch_rejected(self, params, observations):
        d_star = drifts_under(Measure.P_STAR, params)
        d_share = drifts_under(Measure.P_S, params)
        prior = reset_at_update(params.U0, 0.0, params, measure=Measure.P_S)
        with pytest.raises(MeasureMismatchError):
            posterior_step(prior, (observations[0], observations[1]), params, d_star)
        prior2 = reset_at_update(params.U0, 0.0, params, measure=Measure.P_T)
        posterior_step(prior2, (observations[0], observations[1]), params, d_star)
        with pytest.raises(MeasureMismatchError):
            posterior_step(prior2, (observations[0], observations[1]), params, d_share)

    def test_collapse_on_impossible_observation(self, near_barrier_params):
        # a catastrophic stock drop at high correlation pushes all
        # conditional mass through the barrier
        p = near_barrier_params.with_rho(0.99)
        d = drifts_under(Measure.P_STAR, p)
        with pytest.raises(PosteriorCollapseError):
            spike_and_step(p, d, d_log_s=-8.0, dt=0.005)

    def test_anchor_time_mismatch_rejected(self, params, observations):
        d = drifts_under(Measure.P_STAR, params)
        prior = reset_at_update(params.U0, 0.0, params)
        with pytest.raises(DomainError):
            posterior_step(prior, (observations[1], observations[2]), params, d)

    def test_grid_expansion_keeps_mass(self, params):
        # huge upward shock pushes mass toward the top edge; the grid must
        # grow instead of truncating
        p = params.with_rho(0.9)
        d = drifts_under(Measure.P_STAR, p)
        prior = reset_at_update(
            p.U0, 0.0, p, period_length=0.01, grid_points=512,
            measure=d.measure_tag,
        )
        obs = (
            ObservationRecord(0.0, p.S0),
            ObservationRecord(0.01, p.S0 * math.exp(1.0)),
        )
        post = posterior_step(prior, obs, p, d)
        assert post.grid[-1] > prior.grid[-1]
        assert post.integral() == pytest.approx(1.0, abs=1e-10)
        assert post.mean() > p.U0 + 0.5


class TestDegenerateLimit:
    def test_translation_step(self, params):
        p = ModelParams(
            **{**params.__dict__, "rho": 1.0, "allow_degenerate_rho": True}
        )
        d = drifts_under(Measure.P_STAR, p)
        dt, dls = 0.01, -0.04
        prior = reset_at_update(p.U0, 0.0, p, measure=d.measure_tag)
        obs = (
            ObservationRecord(0.0, p.S0),
            ObservationRecord(dt, p.S0 * math.exp(dls)),
        )
        post = posterior_step(prior, obs, p, d)
        shift = p.rho * dls + (d.mu_U - p.rho * d.mu_S) * dt
        assert post.mean() == pytest.approx(p.U0 + shift, abs=2 * post.spacing)


class TestSurvivalMassVsQuadrature:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_against_tensor_quadrature(self, near_barrier_params, k):
        p = near_barrier_params
        d = drifts_under(Measure.P_STAR, p)
        obs = make_observations(p, n_steps=k, dt=0.02, seed=21)
        posts = run_filter(p, d, obs)
        quad = product_formula_quadrature(p, d, obs)
        assert posts[-1].survival_mass == pytest.approx(quad, rel=1e-3)


class TestCsvExport:
    def test_round_trip(self, params, observations):
        d = drifts_under(Measure.P_STAR, params)
        post = run_filter(params, d, observations[:3])[-1]
        text = posterior_to_csv(post)
        lines = text.split("\r\n")
        assert lines[0].startswith("# anchor_time=")
        assert "survival_mass=" in lines[0]
        assert lines[1] == "u,density"
        data = np.array(
            [[float(x) for x in line.split(",")] for line in lines[2:] if line]
        )
        assert data.shape[0] == post.grid.size
        assert np.allclose(data[:, 0], post.grid, atol=1e-12)
        assert np.allclose(data[:, 1], post.weights, atol=1e-12)


class TestPosteriorValidation:
    def test_rejects_negative_density(self, params):
        grid = np.linspace(params.c_bar, params.c_bar + 1, 16)
        w = np.full(16, 1.0)
        w[3] = -0.5
        with pytest.raises(DomainError):
            PosteriorDensity(grid, w, 0.0, 1.0, params.c_bar)

    def test_rejects_unnormalized(self, params):
        grid = np.linspace(params.c_bar, params.c_bar + 1, 16)
        w = np.full(16, 3.0)
        with pytest.raises(DomainError):
            PosteriorDensity(grid, w, 0.0, 1.0, params.c_bar)
