"""Numba-compiled kernel implementations (default backend).

Signature-compatible with ``cocofilter._kernels_numpy``; see that module
for the shared semantics.  Loops are per path with early exit where a
crossing ends the path's work; since the noise arrays are pre-generated
and indexed positionally, early exit does not change which draws a path
consumes, so both backends produce the same output.
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit


@njit(cache=True)
def fp_slab(u, c, mu_dt, sq_dt, half_var, normals, exps, alive_out):
    m, k = normals.shape
    for i in range(m):
        ui = u[i]
        alive = True
        for j in range(k):
            un = ui + mu_dt + sq_dt * normals[i, j]
            if un <= c or exps[i, j] * half_var > (ui - c) * (un - c):
                alive = False
                break
            ui = un
        u[i] = ui
        alive_out[i] = alive


@njit(cache=True)
def fp_terminal_slab(u, crossed, c, mu_dt, sq_dt, half_var, normals, exps):
    m, k = normals.shape
    for i in range(m):
        ui = u[i]
        cr = crossed[i]
        for j in range(k):
            un = ui + mu_dt + sq_dt * normals[i, j]
            if not cr:
                if un <= c or ui <= c or exps[i, j] * half_var > (ui - c) * (un - c):
                    cr = True
            ui = un
        u[i] = ui
        crossed[i] = cr


@njit(cache=True)
def pair_slab(
    ls, u, crossed, c, mu_s_dt, mu_u_dt, sq_dt, rho, rho_c, half_var,
    n_s, n_z, exps,
):
    m, k = n_s.shape
    for i in range(m):
        lsi = ls[i]
        ui = u[i]
        cr = crossed[i]
        for j in range(k):
            dwu = rho * n_s[i, j] + rho_c * n_z[i, j]
            un = ui + mu_u_dt + sq_dt * dwu
            if not cr:
                if un <= c or ui <= c or exps[i, j] * half_var > (ui - c) * (un - c):
                    cr = True
            lsi += mu_s_dt + sq_dt * n_s[i, j]
            ui = un
        ls[i] = lsi
        u[i] = ui
        crossed[i] = cr


@njit(cache=True)
def pair_paths(
    ls0, u0, c, mu_s_dt, mu_u_dt, sq_dt, rho, rho_c, half_var,
    n_s, n_z, exps, ls_out, u_out, crossed,
):
    m, k = n_s.shape
    for i in range(m):
        lsi = ls0
        ui = u0
        cr = False
        ls_out[i, 0] = lsi
        u_out[i, 0] = ui
        for j in range(k):
            dwu = rho * n_s[i, j] + rho_c * n_z[i, j]
            un = ui + mu_u_dt + sq_dt * dwu
            if not cr:
                if un <= c or ui <= c or exps[i, j] * half_var > (ui - c) * (un - c):
                    cr = True
            lsi = lsi + (mu_s_dt + sq_dt * n_s[i, j])
            ui = un
            ls_out[i, j + 1] = lsi
            u_out[i, j + 1] = ui
        crossed[i] = cr


@njit(cache=True)
def conditional_period(
    u0, c, mu_u_dt, sig_rho, sig_rc_sqdt, half_var, sqrt_dt,
    sub_start, sub_count, w_target, n_w, n_z, exps, u_out, alive_out,
):
    m = n_w.shape[0]
    n_coarse = sub_start.shape[0]
    for i in range(m):
        ui = u0
        alive = True
        for jc in range(n_coarse):
            if not alive:
                break
            s0 = sub_start[jc]
            n_sub = sub_count[jc]
            sw = 0.0
            for s in range(s0, s0 + n_sub):
                sw += n_w[i, s]
            adj = (sqrt_dt * sw - w_target[jc]) / n_sub
            for s in range(s0, s0 + n_sub):
                bw = sqrt_dt * n_w[i, s] - adj
                un = ui + mu_u_dt + sig_rho * bw + sig_rc_sqdt * n_z[i, s]
                if un <= c or exps[i, s] * half_var > (ui - c) * (un - c):
                    alive = False
                    break
                ui = un
        u_out[i] = ui
        alive_out[i] = alive


@njit(cache=True)
def filter_step(wp, gap, glut, d_lo, gamma):
    m = wp.shape[0]
    n_band = glut.shape[0]
    out = np.zeros(m)
    d_hi = d_lo + n_band - 1
    for j in range(m):
        gj = gap[j]
        if gj <= 0.0:
            continue
        i_lo = j - d_hi
        if i_lo < 0:
            i_lo = 0
        i_hi = j - d_lo
        if i_hi > m - 1:
            i_hi = m - 1
        acc = 0.0
        for i in range(i_lo, i_hi + 1):
            w = wp[i]
            if w == 0.0:
                continue
            g = glut[j - i - d_lo]
            if g == 0.0:
                continue
            acc += w * (-math.expm1(-gamma * gap[i] * gj)) * g
        out[j] = acc
    return out
