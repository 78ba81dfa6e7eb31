"""Compiled inner loops for orbit iteration and Lyapunov accumulation.

The kernels consume pre-generated uniform draws (three per step: atom
selection, w, d) and advance a projective unit vector (x1, x2) in C^2,
accumulating streaming statistics.  Matrices are built per step from the
closed-form exponential of the atom generators; models realized exactly
(polymers) pass precomputed per-atom matrices instead.

Status codes returned by every kernel: 0 = ok, 1 = orbit escaped the
closed disc beyond tolerance.
"""

from __future__ import annotations

import cmath

import numpy as np
from numba import njit

ESCAPE_TOL = 1e-9
_SERIES_MUSQ = 1e-8  # |mu|^2 threshold matching the 1e-4 series switch


@njit(cache=True, nogil=True, inline="always")
def _pick_atom(u0, cum_w):
    k = 0
    while k < cum_w.shape[0] - 1 and u0 >= cum_w[k]:
        k += 1
    return k


@njit(cache=True, nogil=True, inline="always")
def _draw_matrix(
    u0, u1, u2, cum_w, phase, gen0, genw, gend,
    exact_mode, tmats, w_lo, w_span, d_lo, d_span,
):
    k = _pick_atom(u0, cum_w)
    if exact_mode:
        return tmats[k, 0, 0], tmats[k, 0, 1], tmats[k, 1, 0], tmats[k, 1, 1]
    w = w_lo + u1 * w_span
    d = d_lo + u2 * d_span
    c1 = gen0[k, 0] + w * genw[k, 0] + d * gend[k, 0]
    c2 = gen0[k, 1] + w * genw[k, 1] + d * gend[k, 1]
    c3 = gen0[k, 2] + w * genw[k, 2] + d * gend[k, 2]
    a11 = 1j * c3
    a12 = c1 + 1j * c2
    a21 = c1 - 1j * c2
    musq = c1 * c1 + c2 * c2 - c3 * c3
    if abs(musq) < _SERIES_MUSQ:
        ch = 1.0 + musq * (0.5 + musq / 24.0)
        shc = 1.0 + musq * (1.0 / 6.0 + musq / 120.0)
    else:
        mu = cmath.sqrt(musq)
        ch = cmath.cosh(mu)
        shc = cmath.sinh(mu) / mu
    ph = phase[k]
    return (
        ph * (ch + shc * a11),
        ph * (shc * a12),
        (shc * a21) / ph,
        (ch - shc * a11) / ph,
    )


@njit(cache=True, nogil=True, inline="always")
def _g_derivs(gid, s):
    """g(s), g'(s), g''(s) for the built-in family (ids as in gfamily)."""
    if gid <= 6:
        m = gid
        g = s**m
        dg = m * s ** (m - 1) if m >= 1 else 0.0
        d2g = m * (m - 1) * s ** (m - 2) if m >= 2 else 0.0
        return g, dg, d2g
    if gid == 7:
        q = 1.0 / (1.0 + s)
        return np.log1p(s), q, -q * q
    if gid == 8:
        q = 1.0 / (1.0 + s)
        return q, -q * q, 2.0 * q * q * q
    # smooth step 6s^5 - 15s^4 + 10s^3
    g = ((6.0 * s - 15.0) * s + 10.0) * s * s * s
    dg = 30.0 * s * s * (s - 1.0) * (s - 1.0)
    d2g = 60.0 * s * (2.0 * s - 1.0) * (s - 1.0)
    return g, dg, d2g


@njit(cache=True, nogil=True)
def orbit_chunk(
    u, state, cum_w, phase, gen0, genw, gend, exact_mode, tmats,
    w_lo, w_span, d_lo, d_span, start_accum, check_escape,
    hist, obs_j, obs_g, sums, obs_sums,
):
    """Advance the orbit through one chunk of draws, accumulating stats.

    sums layout: [log_norm_sum, s_sum, s2_sum, max_s, count];
    obs_sums rows: [moment_re, moment_im, balance_lhs, balance_rhs].
    """
    x1 = state[0]
    x2 = state[1]
    nbins = hist.shape[0]
    n_obs = obs_j.shape[0]
    log_sum = 0.0
    s_sum = 0.0
    s2_sum = 0.0
    max_s = sums[3]
    count = 0.0
    for i in range(u.shape[0]):
        t11, t12, t21, t22 = _draw_matrix(
            u[i, 0], u[i, 1], u[i, 2], cum_w, phase, gen0, genw, gend,
            exact_mode, tmats, w_lo, w_span, d_lo, d_span,
        )
        y1 = t11 * x1 + t12 * x2
        y2 = t21 * x1 + t22 * x2
        nrm2 = y1.real * y1.real + y1.imag * y1.imag + y2.real * y2.real + y2.imag * y2.imag
        inv = 1.0 / np.sqrt(nrm2)
        x1 = y1 * inv
        x2 = y2 * inv
        if i < start_accum:
            continue
        q1 = x1.real * x1.real + x1.imag * x1.imag
        q2 = x2.real * x2.real + x2.imag * x2.imag
        s = q1 / q2 if q2 > 0.0 else np.inf
        if check_escape and s > 1.0 + ESCAPE_TOL:
            state[0] = x1
            state[1] = x2
            return 1
        log_sum += 0.5 * np.log(nrm2)
        s_sum += s
        s2_sum += s * s
        if s > max_s:
            max_s = s
        sf = s * nbins
        if sf >= nbins or not (sf >= 0.0):  # clip overflow, inf, nan
            idx = nbins - 1
        else:
            idx = int(sf)
        hist[idx] += 1
        count += 1.0
        if n_obs > 0:
            z = x1 / x2
            for m in range(n_obs):
                g, dg, d2g = _g_derivs(obs_g[m], s)
                zj = z ** obs_j[m]
                obs_sums[m, 0] += zj.real * g
                obs_sums[m, 1] += zj.imag * g
                obs_sums[m, 2] += s * dg
                obs_sums[m, 3] += (1.0 - s) * (1.0 - s) * (dg + s * d2g)
    state[0] = x1
    state[1] = x2
    sums[0] += log_sum
    sums[1] += s_sum
    sums[2] += s2_sum
    sums[3] = max_s
    sums[4] += count
    return 0


@njit(cache=True, nogil=True)
def trajectory_chunk(
    u, state, cum_w, phase, gen0, genw, gend, exact_mode, tmats,
    w_lo, w_span, d_lo, d_span, check_escape, out_z,
):
    """Advance the orbit, recording the chart value after every step."""
    x1 = state[0]
    x2 = state[1]
    for i in range(u.shape[0]):
        t11, t12, t21, t22 = _draw_matrix(
            u[i, 0], u[i, 1], u[i, 2], cum_w, phase, gen0, genw, gend,
            exact_mode, tmats, w_lo, w_span, d_lo, d_span,
        )
        y1 = t11 * x1 + t12 * x2
        y2 = t21 * x1 + t22 * x2
        nrm2 = y1.real * y1.real + y1.imag * y1.imag + y2.real * y2.real + y2.imag * y2.imag
        inv = 1.0 / np.sqrt(nrm2)
        x1 = y1 * inv
        x2 = y2 * inv
        q2 = x2.real * x2.real + x2.imag * x2.imag
        if q2 > 0.0:
            z = x1 / x2
        else:
            z = complex(np.inf, 0.0)
        out_z[i] = z
        if check_escape:
            q1 = x1.real * x1.real + x1.imag * x1.imag
            if q1 / q2 > 1.0 + ESCAPE_TOL:
                state[0] = x1
                state[1] = x2
                return 1
    state[0] = x1
    state[1] = x2
    return 0


@njit(cache=True, nogil=True)
def furstenberg_chunk(
    u, state, cum_w, phase, gen0, genw, gend, exact_mode, tmats,
    w_lo, w_span, d_lo, d_span, start_accum, check_escape,
    node_w, node_t, sums,
):
    """Orbit average of the atom/quadrature expectation of log ||T x||.

    sums layout: [expectation_sum, count].  The chain itself advances
    with the same random draws as `orbit_chunk`.
    """
    x1 = state[0]
    x2 = state[1]
    n_nodes = node_w.shape[0]
    acc = 0.0
    count = 0.0
    for i in range(u.shape[0]):
        if i >= start_accum:
            inner = 0.0
            for j in range(n_nodes):
                y1 = node_t[j, 0, 0] * x1 + node_t[j, 0, 1] * x2
                y2 = node_t[j, 1, 0] * x1 + node_t[j, 1, 1] * x2
                nrm2 = (
                    y1.real * y1.real + y1.imag * y1.imag
                    + y2.real * y2.real + y2.imag * y2.imag
                )
                inner += node_w[j] * 0.5 * np.log(nrm2)
            acc += inner
            count += 1.0
        t11, t12, t21, t22 = _draw_matrix(
            u[i, 0], u[i, 1], u[i, 2], cum_w, phase, gen0, genw, gend,
            exact_mode, tmats, w_lo, w_span, d_lo, d_span,
        )
        y1 = t11 * x1 + t12 * x2
        y2 = t21 * x1 + t22 * x2
        nrm2 = y1.real * y1.real + y1.imag * y1.imag + y2.real * y2.real + y2.imag * y2.imag
        inv = 1.0 / np.sqrt(nrm2)
        x1 = y1 * inv
        x2 = y2 * inv
        if check_escape:
            q1 = x1.real * x1.real + x1.imag * x1.imag
            q2 = x2.real * x2.real + x2.imag * x2.imag
            if q2 == 0.0 or q1 / q2 > 1.0 + ESCAPE_TOL:
                state[0] = x1
                state[1] = x2
                return 1
    state[0] = x1
    state[1] = x2
    sums[0] += acc
    sums[1] += count
    return 0
