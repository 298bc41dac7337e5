"""Pure-NumPy kernel implementations (fallback backend).

Signature-compatible with ``cocofilter._kernels_numba``.  Each kernel
consumes pre-generated noise arrays indexed ``[path, step]`` and performs
the same per-path arithmetic, vectorized across paths.  Barrier crossing
within a step is decided by comparing a pre-drawn Exp(1) variate against
``2 (u-c)(u'-c) / (sigma^2 dt)``, which realizes the Brownian-bridge hit
probability ``exp(-2 (u-c)(u'-c) / (sigma^2 dt))`` without evaluating an
exponential in the hot loop.
"""
from __future__ import annotations

import numpy as np


def fp_slab(u, c, mu_dt, sq_dt, half_var, normals, exps, alive_out):
    """Advance first-passage paths through one slab of steps.

    ``u`` holds current values for currently-alive paths and is updated in
    place; paths that cross keep the value from just before the crossing
    step.  ``alive_out`` receives the per-path survival flag for the slab.
    ``half_var = sigma^2 dt / 2``.
    """
    m, k = normals.shape
    alive = np.ones(m, dtype=np.bool_)
    ui = u.copy()
    for j in range(k):
        un = ui + mu_dt + sq_dt * normals[:, j]
        hit = (un <= c) | (exps[:, j] * half_var > (ui - c) * (un - c))
        alive &= ~hit
        ui = np.where(alive, un, ui)
    u[:] = ui
    alive_out[:] = alive


def fp_terminal_slab(u, crossed, c, mu_dt, sq_dt, half_var, normals, exps):
    """Like :func:`fp_slab` but paths keep evolving after a crossing.

    ``crossed`` flags accumulate; ``u`` always holds the terminal value.
    """
    m, k = normals.shape
    ui = u
    cr = crossed
    for j in range(k):
        un = ui + mu_dt + sq_dt * normals[:, j]
        hit = (un <= c) | (ui <= c) | (exps[:, j] * half_var > (ui - c) * (un - c))
        cr |= hit
        ui = un
    u[:] = ui
    crossed[:] = cr


def pair_slab(
    ls, u, crossed, c, mu_s_dt, mu_u_dt, sq_dt, rho, rho_c, half_var,
    n_s, n_z, exps,
):
    """Advance correlated (log S, U) paths through one slab of steps.

    The fundamental noise is ``rho * n_s + sqrt(1-rho^2) * n_z`` per the
    correlation decomposition; crossing is monitored on U with the bridge
    draw and both components keep evolving after a crossing.
    """
    m, k = n_s.shape
    for j in range(k):
        dwu = rho * n_s[:, j] + rho_c * n_z[:, j]
        un = u + mu_u_dt + sq_dt * dwu
        hit = (un <= c) | (u <= c) | (exps[:, j] * half_var > (u - c) * (un - c))
        crossed |= hit
        ls += mu_s_dt + sq_dt * n_s[:, j]
        u[:] = un


def pair_paths(
    ls0, u0, c, mu_s_dt, mu_u_dt, sq_dt, rho, rho_c, half_var,
    n_s, n_z, exps, ls_out, u_out, crossed,
):
    """Full-path variant of :func:`pair_slab` storing every node."""
    m, k = n_s.shape
    ls_out[:, 0] = ls0
    u_out[:, 0] = u0
    ls = np.full(m, ls0, dtype=float)
    u = np.full(m, u0, dtype=float)
    cr = np.zeros(m, dtype=np.bool_)
    for j in range(k):
        dwu = rho * n_s[:, j] + rho_c * n_z[:, j]
        un = u + mu_u_dt + sq_dt * dwu
        hit = (un <= c) | (u <= c) | (exps[:, j] * half_var > (u - c) * (un - c))
        cr |= hit
        ls = ls + (mu_s_dt + sq_dt * n_s[:, j])
        u = un
        ls_out[:, j + 1] = ls
        u_out[:, j + 1] = u
    crossed[:] = cr


def conditional_period(
    u0, c, mu_u_dt, sig_rho, sig_rc_sqdt, half_var, sqrt_dt,
    sub_start, sub_count, w_target, n_w, n_z, exps, u_out, alive_out,
):
    """Simulate U conditionally on observed coarse stock increments.

    Coarse observation step ``jc`` covers fine steps
    ``[sub_start[jc], sub_start[jc] + sub_count[jc])``.  The stock-noise
    fine increments are conditioned to sum to ``w_target[jc]`` (a Brownian
    bridge on the raw draws ``n_w``); the independent component ``n_z`` is
    free.  Paths whose U touches the barrier are flagged dead.
    """
    m = n_w.shape[0]
    ui = np.full(m, u0, dtype=float)
    alive = np.ones(m, dtype=np.bool_)
    for jc in range(sub_start.shape[0]):
        s0 = int(sub_start[jc])
        n_sub = int(sub_count[jc])
        block = n_w[:, s0 : s0 + n_sub]
        sw = block.sum(axis=1)
        adj = (sqrt_dt * sw - w_target[jc]) / n_sub
        for s in range(s0, s0 + n_sub):
            bw = sqrt_dt * n_w[:, s] - adj
            un = ui + mu_u_dt + sig_rho * bw + sig_rc_sqdt * n_z[:, s]
            hit = (un <= c) | (exps[:, s] * half_var > (ui - c) * (un - c))
            alive &= ~hit
            ui = np.where(alive, un, ui)
    u_out[:] = ui
    alive_out[:] = alive


def filter_step(wp, gap, glut, d_lo, gamma):
    """Banded dense application of the one-step filter kernel.

    ``new[j] = sum_i wp[i] * (1 - exp(-gamma gap[i] gap[j])) * glut[j - i - d_lo]``

    ``wp`` is the trapezoid-weighted prior, ``gap`` the grid offsets above
    the barrier, ``glut`` the Gaussian factor tabulated by index offset
    ``d = j - i`` on the uniform grid (zero outside the band, which covers
    every numerically nonzero entry of the dense kernel).
    """
    m = wp.shape[0]
    out = np.zeros(m)
    for idx in range(glut.shape[0]):
        g = glut[idx]
        if g == 0.0:
            continue
        d = d_lo + idx
        j0 = max(0, d)
        j1 = min(m, m + d)
        if j0 >= j1:
            continue
        jj = slice(j0, j1)
        ii = slice(j0 - d, j1 - d)
        out[jj] += wp[ii] * (-np.expm1(-gamma * gap[ii] * gap[jj])) * g
    out[gap <= 0.0] = 0.0
    return out
