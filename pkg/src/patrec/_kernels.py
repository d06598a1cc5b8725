"""Hot inner loops for the Green's-function sums, jitted with numba.

The free-space kernel only ever needs H_0^(1)(u) = J0(u) + i Y0(u) at huge
numbers of arguments u = omega_k |x - y| / c0. Above U_LO the pair is read
from a dense uniform table via Catmull-Rom interpolation (absolute error
~1e-9 at the 0.02 pitch used here); below U_LO, where Y0 bends into its
logarithmic singularity, a short power series is evaluated directly. The
table is built once per band from :mod:`patrec.specfun`, which stays the
single source of truth for the series coefficients.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from numba import njit

from . import specfun

U_LO = 2.0  # below this, series; above, table interpolation
TABLE_DU = 0.01

_J0C = specfun._J0_C.copy()
_Y0C = specfun._Y0_C.copy()
_EG = specfun._EULER_GAMMA


@lru_cache(maxsize=8)
def _cached_table(n_entries: int) -> tuple[np.ndarray, np.ndarray]:
    u = np.arange(n_entries) * TABLE_DU
    u[0] = 1e-30  # placeholder; entries below U_LO are never read
    return specfun.bessel_j(0, u), specfun.bessel_y(0, u)


def hankel0_table(u_max: float) -> tuple[np.ndarray, np.ndarray, float]:
    """(J0 table, Y0 table, du) covering [0, u_max] plus interpolation margin."""
    n = int(np.ceil(max(u_max, U_LO) / TABLE_DU)) + 8
    j0t, y0t = _cached_table(n)
    return j0t, y0t, TABLE_DU


@njit(cache=True, inline="always")
def _j0_small(u):
    z = 0.25 * u * u
    acc = 0.0
    for i in range(len(_J0C) - 1, -1, -1):
        acc = (acc + _J0C[i]) * (-z)
    return 1.0 + acc


@njit(cache=True, inline="always")
def _y0_small(u):
    z = 0.25 * u * u
    acc = 0.0
    for i in range(len(_Y0C) - 1, -1, -1):
        acc = (acc + _Y0C[i]) * (-z)
    s = -acc
    return 0.6366197723675814 * ((np.log(0.5 * u) + _EG) * _j0_small(u) + s)


@njit(cache=True, inline="always")
def _h0_lookup(u, j0t, y0t, du):
    """(J0(u), Y0(u)) via table or series; u must be positive.

    Indices are clamped to the table, so callers that overshoot u_max by a
    few entries degrade gracefully instead of reading out of bounds.
    """
    if u < U_LO:
        return _j0_small(u), _y0_small(u)
    s = u / du
    i = int(s)
    if i > j0t.shape[0] - 3:
        i = j0t.shape[0] - 3
    t = s - i
    t2 = t * t
    t3 = t2 * t
    w0 = 0.5 * (-t3 + 2.0 * t2 - t)
    w1 = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0)
    w2 = 0.5 * (-3.0 * t3 + 4.0 * t2 + t)
    w3 = 0.5 * (t3 - t2)
    j = w0 * j0t[i - 1] + w1 * j0t[i] + w2 * j0t[i + 1] + w3 * j0t[i + 2]
    y = w0 * y0t[i - 1] + w1 * y0t[i] + w2 * y0t[i + 1] + w3 * y0t[i + 2]
    return j, y


@njit(cache=True)
def bp_accumulate(out, dists, scale, cre, cim, j0t, y0t, du):
    """out[p] += sum_k J0(k scale r_p) cre[k] - Y0(k scale r_p) cim[k].

    `scale` is d_omega/c0; bin k = 0 carries no weight (cre[0] = cim[0] = 0
    by construction upstream) and is skipped.
    """
    n_bins = cre.shape[0]
    for p in range(out.shape[0]):
        r = dists[p]
        beta = scale * r
        u = 0.0
        acc = 0.0
        for k in range(1, n_bins):
            u += beta
            j, y = _h0_lookup(u, j0t, y0t, du)
            acc += j * cre[k] - y * cim[k]
        out[p] += acc


@njit(cache=True)
def forward_accumulate(spec_re, spec_im, amps, dists, scale, j0t, y0t, du):
    """spec[k] += sum_p amps[p] H0(k scale r_p), accumulated per source pixel."""
    n_bins = spec_re.shape[0]
    for p in range(amps.shape[0]):
        a = amps[p]
        beta = scale * dists[p]
        u = 0.0
        for k in range(1, n_bins):
            u += beta
            j, y = _h0_lookup(u, j0t, y0t, du)
            spec_re[k] += a * j
            spec_im[k] += a * y
    return spec_re, spec_im


@njit(cache=True)
def synthesize_series(values, d_omega, weights, times):
    """Band-limited time synthesis g(t) = d_omega/(2 pi) sum_k w_k Re[g_k e^{-i w_k t}].

    `values` is one sensor's half-spectrum (complex128). Exact at the DFT
    sample times; used to resample signals onto arbitrary solver time axes.
    """
    n_bins = values.shape[0]
    out = np.empty(times.shape[0])
    for j in range(times.shape[0]):
        t = times[j]
        dc, ds = np.cos(d_omega * t), -np.sin(d_omega * t)
        pr, pi = 1.0, 0.0
        acc = weights[0] * values[0].real
        for k in range(1, n_bins):
            prn = pr * dc - pi * ds
            pi = pr * ds + pi * dc
            pr = prn
            acc += weights[k] * (values[k].real * pr - values[k].imag * pi)
        out[j] = acc * (d_omega / (2.0 * np.pi))
    return out


@njit(cache=True)
def interp_radial(profile, r0, dr, dists, out):
    """Catmull-Rom sample of a radial profile at per-pixel distances."""
    n = profile.shape[0]
    for p in range(dists.shape[0]):
        s = (dists[p] - r0) / dr
        i = int(s)
        if i < 1:
            i = 1
        elif i > n - 3:
            i = n - 3
        t = s - i
        t2 = t * t
        t3 = t2 * t
        w0 = 0.5 * (-t3 + 2.0 * t2 - t)
        w1 = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0)
        w2 = 0.5 * (-3.0 * t3 + 4.0 * t2 + t)
        w3 = 0.5 * (t3 - t2)
        out[p] += (
            w0 * profile[i - 1] + w1 * profile[i] + w2 * profile[i + 1] + w3 * profile[i + 2]
        )
    return out
