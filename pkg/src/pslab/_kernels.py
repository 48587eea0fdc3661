"""Compiled inner loops for the phase-search estimators.

Decisions use a lookup table over the bounding odd-integer lattice: a
received sample is rounded per axis to the nearest odd coordinate (ties to the
lower coordinate), and if that lattice site is not a constellation point the
decision falls back to a brute-force search. With points in lexicographic
(re, im) order this reproduces the lowest-index tie-break of the brute-force
decision rule.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit


def lattice_table(points: np.ndarray):
    """Return ``(K, lut)`` for points on the odd-integer lattice, else None.

    ``lut[ix + K, iy + K]`` is the index of point ``(2 ix + 1) + j (2 iy + 1)``
    or -1 when that site is not in the constellation.
    """
    re, im = points.real, points.imag
    if not (np.all(np.mod(re, 2) == 1) and np.all(np.mod(im, 2) == 1)):
        return None
    K = int((max(np.abs(re).max(), np.abs(im).max()) + 1) // 2)
    lut = np.full((2 * K, 2 * K), -1, dtype=np.int64)
    ix = ((re - 1) // 2).astype(np.int64) + K
    iy = ((im - 1) // 2).astype(np.int64) + K
    lut[ix, iy] = np.arange(points.size)
    return K, lut


@njit(cache=True, nogil=True, inline="always")
def _site(y, K):
    # nearest odd coordinate 2i+1, ties to the lower one, clipped to the grid
    return min(max(math.ceil(y * 0.5 - 1.0), -K), K - 1)


@njit(cache=True, nogil=True, inline="always")
def _decision_index(yr, yi, K, lut, pr, pi):
    m = lut[_site(yr, K) + K, _site(yi, K) + K]
    if m >= 0:
        return m
    best = np.inf
    bm = 0
    for k in range(pr.size):
        dr = yr - pr[k]
        di = yi - pi[k]
        d = dr * dr + di * di
        if d < best:
            best = d
            bm = k
    return bm


@njit(cache=True, nogil=True, inline="always")
def _decision_sqdist(yr, yi, K, lut, pr, pi):
    m = lut[_site(yr, K) + K, _site(yi, K) + K]
    if m >= 0:
        dr = yr - pr[m]
        di = yi - pi[m]
        return dr * dr + di * di
    best = np.inf
    for k in range(pr.size):
        dr = yr - pr[k]
        di = yi - pi[k]
        d = dr * dr + di * di
        if d < best:
            best = d
    return best


@njit(cache=True, nogil=True)
def decide_indices(rr, ri, K, lut, pr, pi):
    out = np.empty(rr.size, dtype=np.int64)
    for i in range(rr.size):
        out[i] = _decision_index(rr[i], ri[i], K, lut, pr, pi)
    return out


@njit(cache=True, nogil=True)
def bps_block_argmin(rr, ri, cg, sg, n, K, lut, pr, pi):
    """Blind cost minimum over the grid for each non-overlapping block."""
    nb = rr.size // n
    nphase = cg.size
    idx = np.empty(nb, dtype=np.int64)
    jmin = np.empty(nb)
    for k in range(nb):
        best = np.inf
        bb = 0
        for b in range(nphase):
            c = cg[b]
            s = sg[b]
            J = 0.0
            for i in range(k * n, (k + 1) * n):
                yr = rr[i] * c + ri[i] * s
                yi = ri[i] * c - rr[i] * s
                J += _decision_sqdist(yr, yi, K, lut, pr, pi)
            if J < best:
                best = J
                bb = b
        idx[k] = bb
        jmin[k] = best
    return idx, jmin


@njit(cache=True, nogil=True)
def bps_symbol_distances(rr, ri, cg, sg, K, lut, pr, pi):
    """Per-symbol blind cost terms, shape (symbols, phases)."""
    L = rr.size
    nphase = cg.size
    out = np.empty((L, nphase))
    for i in range(L):
        for b in range(nphase):
            yr = rr[i] * cg[b] + ri[i] * sg[b]
            yi = ri[i] * cg[b] - rr[i] * sg[b]
            out[i, b] = _decision_sqdist(yr, yi, K, lut, pr, pi)
    return out


@njit(cache=True, nogil=True)
def rows_argmin(cost):
    """First-minimum column and its value for each row."""
    n, nphase = cost.shape
    idx = np.empty(n, dtype=np.int64)
    jmin = np.empty(n)
    for k in range(n):
        best = np.inf
        bb = 0
        for b in range(nphase):
            if cost[k, b] < best:
                best = cost[k, b]
                bb = b
        idx[k] = bb
        jmin[k] = best
    return idx, jmin


@njit(cache=True, nogil=True)
def sps_argmin(cr, ci, energy, cg, sg):
    """Supervised cost minimum from window sufficient statistics.

    For a window with ``C = sum r_i conj(s_i)`` and ``E = sum |r_i|^2 + |s_i|^2``
    the supervised cost at phase ``t`` is ``E - 2 Re(exp(-j t) C)``.
    """
    n = cr.size
    nphase = cg.size
    idx = np.empty(n, dtype=np.int64)
    jmin = np.empty(n)
    for k in range(n):
        best = np.inf
        bb = 0
        for b in range(nphase):
            J = energy[k] - 2.0 * (cg[b] * cr[k] + sg[b] * ci[k])
            if J < best:
                best = J
                bb = b
        idx[k] = bb
        jmin[k] = best
    return idx, jmin
