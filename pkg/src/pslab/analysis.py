"""Closed-form predictions, capacity computations and Monte Carlo estimators.

The supervised-phase-search MSE approximations follow from a small-angle
expansion of the cost around the true phase: for a single symbol the error
variance is ``sigma_n^2 E{1/|s|^2}``, and for long windows it tends to
``1 / (2 N SNR)`` regardless of the constellation. Mutual information of the
discrete-input AWGN channel is evaluated by 2-D Gauss-Hermite quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.polynomial.hermite import hermgauss
from scipy.optimize import brentq
from scipy.special import logsumexp

from .constellation import Constellation, moments, sample_symbols
from .rng import as_generator

__all__ = [
    "Estimate",
    "MetricSample",
    "mse_sps_n1",
    "mse_sps_large_n",
    "lambda_max_residual",
    "solve_lambda_max",
    "lambda_max_brute_force",
    "mi_awgn",
    "mi_awgn_mc",
    "golden_section_max",
    "solve_lambda_optimum",
    "estimate_mi_from_samples",
    "information_density",
    "estimate_mse",
    "wrap_quarter",
    "analytic_table",
    "capacity_table",
]

LOG2E = 1.0 / math.log(2.0)


class Estimate(NamedTuple):
    value: float
    stderr: float


@dataclass
class MetricSample:
    """One point of a sweep: an MSE (rad^2) or MI (bits/symbol) value."""

    axis: dict
    value: float
    stderr: float
    meta: dict = field(default_factory=dict)


def _check_nonzero(const: Constellation):
    if np.any(const.points == 0):
        raise ValueError("constellation has a zero-amplitude point; E{1/|s|^2} is singular")


def mse_sps_n1(const: Constellation, snr_linear: float) -> float:
    """Single-symbol SPS phase MSE, ``sigma_n^2 * sum_m P_m / |s_m|^2``.

    ``sigma_n^2 = P_s / (2 SNR)`` is the per-dimension noise variance, with
    ``P_s`` taken under the priors.
    """
    _check_nonzero(const)
    if snr_linear <= 0:
        raise ValueError("snr_linear must be > 0")
    m = moments(const)
    return m.p_s / (2.0 * snr_linear) * m.inv_m2


def mse_sps_large_n(n_large: int, snr_linear: float) -> float:
    """Long-window SPS phase MSE ``1 / (2 N SNR)``."""
    if n_large < 1:
        raise ValueError("n_large must be >= 1")
    return 1.0 / (2.0 * n_large * snr_linear)


def lambda_max_residual(const: Constellation, lam: float, form: str = "direct") -> float:
    """Stationarity residual of the single-symbol MSE with respect to lambda.

    The priors of ``const`` are rebuilt for ``lam`` before the moments are
    taken. ``form="direct"`` returns
    ``(E|s|^4 - 2 E^2|s|^2) E|1/s|^2 + E|s|^2``; ``form="kurtosis"`` returns
    ``K_s + E|s|^2 / E|1/s|^2``. The two differ by the positive factor
    ``E|1/s|^2`` when ``E{s^2} = 0``, so they share signs and roots. The
    derivative of the MSE in lambda is ``-residual / (2 SNR)``: negative
    residual means the MSE is still rising.
    """
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    _check_nonzero(const)
    m = moments(const.with_lambda(lam))
    if form == "direct":
        return (m.m4 - 2.0 * m.p_s**2) * m.inv_m2 + m.p_s
    if form == "kurtosis":
        return m.kurtosis + m.p_s / m.inv_m2
    raise ValueError(f"unknown residual form {form!r}")


def solve_lambda_max(const: Constellation, bracket=(0.0, 1.0), xtol: float = 1e-6,
                     scan_points: int = 201) -> float | None:
    """Lambda maximizing the single-symbol SPS MSE, or None if there is none.

    The bracket is scanned for the first rising-to-falling transition of the
    MSE (residual going from negative to positive); that sub-interval is then
    refined with Brent's method to ``xtol``. Constant-modulus constellations,
    whose residual vanishes identically, return None.
    """
    lo, hi = bracket
    grid = np.linspace(lo, hi, scan_points)
    res = np.array([lambda_max_residual(const, x) for x in grid])
    scale = moments(const).p_s
    res[np.abs(res) <= 1e-9 * scale] = 0.0
    for a, b, ra, rb in zip(grid[:-1], grid[1:], res[:-1], res[1:]):
        if ra < 0 < rb:
            return float(brentq(lambda x: lambda_max_residual(const, x), a, b, xtol=xtol))
        if ra < 0 and rb == 0:
            return float(b)
    return None


def lambda_max_brute_force(const: Constellation, lambdas) -> float:
    """Grid argmax of the single-symbol SPS MSE (SNR only scales it)."""
    vals = [mse_sps_n1(const.with_lambda(x), 1.0) for x in lambdas]
    return float(np.asarray(lambdas)[int(np.argmax(vals))])


def _quarter_symmetric(const: Constellation) -> bool:
    pts = const.points
    order = np.lexsort((pts.imag, pts.real))
    rot = pts * 1j
    rorder = np.lexsort((rot.imag, rot.real))
    return np.allclose(pts[order], rot[rorder]) and np.allclose(const.priors[order], const.priors[rorder])


def _product_factors(const: Constellation):
    # (axis values, axis priors) if the input is a product of two identical
    # real PAM distributions on a full grid, else None
    re, im = np.unique(const.points.real), np.unique(const.points.imag)
    if re.size * im.size != const.order or not np.array_equal(re, im):
        return None
    grid = np.reshape(const.priors, (re.size, im.size))  # points are lexicographic
    marg = grid.sum(axis=1)
    if not np.allclose(grid, np.outer(marg, marg), rtol=1e-10, atol=1e-15):
        return None
    return re, marg


def _mi_pam(values, priors, var, order):
    x, w = hermgauss(order)
    z = math.sqrt(2.0 * var) * x
    with np.errstate(divide="ignore"):
        logp = np.log(priors)
    total = 0.0
    for m in np.flatnonzero(priors > 0):
        d = values[m] - values
        expo = logp[None, :] - ((d[None, :] + z[:, None]) ** 2 - z[:, None] ** 2) / (2.0 * var)
        total += priors[m] * float(w @ logsumexp(expo, axis=1)) / math.sqrt(math.pi)
    return -total * LOG2E


def mi_awgn(const: Constellation, snr_linear: float, order: int = 32, separable: bool = True) -> float:
    """Mutual information (bits/symbol) of the discrete-input complex AWGN channel.

    Noise has total variance ``P_s / SNR``. The expectation over the noise is
    a Gauss-Hermite rule with ``order`` nodes per axis. Square QAM with
    Maxwell-Boltzmann priors is a product of two independent PAM inputs, so
    by default its MI is computed as twice a 1-D integral. Otherwise a tensor
    2-D rule is used; for constellations invariant under a quarter turn only
    one quadrant of transmitted points is integrated.
    """
    if snr_linear <= 0:
        raise ValueError("snr_linear must be > 0")
    if order < 20:
        raise ValueError("quadrature order must be >= 20")
    n0 = const.signal_power / snr_linear
    factors = _product_factors(const) if separable else None
    if factors is not None:
        return float(2.0 * _mi_pam(factors[0], factors[1], n0 / 2.0, order))

    x, w = hermgauss(order)
    z = (math.sqrt(n0) * (x[:, None] + 1j * x[None, :])).ravel()
    wz = (w[:, None] * w[None, :]).ravel() / np.pi
    zz = np.abs(z) ** 2
    pts, pri = const.points, const.priors
    with np.errstate(divide="ignore"):
        logp = np.log(pri)

    if _quarter_symmetric(const):
        sel = np.flatnonzero((pts.real > 0) & (pts.imag > 0))
        weight = 4.0
    else:
        sel = np.arange(pts.size)
        weight = 1.0
    total = 0.0
    for m in sel:
        if pri[m] == 0:
            continue
        d = pts[m] - pts
        expo = logp[None, :] - (np.abs(d[None, :] + z[:, None]) ** 2 - zz[:, None]) / n0
        total += weight * pri[m] * float(wz @ logsumexp(expo, axis=1))
    return float(-total * LOG2E)


def mi_awgn_mc(const: Constellation, snr_linear: float, count: int = 100_000, seed=None) -> Estimate:
    """Monte Carlo MI of the discrete-input AWGN channel with the true noise variance."""
    rng = as_generator(seed)
    s = sample_symbols(const, count, rng)
    n0 = const.signal_power / snr_linear
    y = s + math.sqrt(n0 / 2) * (rng.standard_normal(count) + 1j * rng.standard_normal(count))
    dens = information_density(s, y, const, n0)
    return Estimate(float(dens.mean()), float(dens.std(ddof=1) / math.sqrt(count)))


def golden_section_max(f, lo: float, hi: float, tol: float = 1e-4) -> float:
    """Maximizer of a unimodal ``f`` on ``[lo, hi]`` to interval width ``tol``."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    return (a + b) / 2.0


def solve_lambda_optimum(const: Constellation, snr_linear: float, lam_hi: float = 0.2,
                         tol: float = 1e-4, scan_points: int = 21, order: int = 32) -> float:
    """Shaping parameter maximizing :func:`mi_awgn` at ``snr_linear``.

    A coarse scan over ``[0, lam_hi]`` checks unimodality and brackets the
    peak; golden-section search then refines it. A non-unimodal scan returns
    the scan argmax.
    """
    def mi(lam):
        return mi_awgn(const.with_lambda(lam), snr_linear, order)

    grid = np.linspace(0.0, lam_hi, scan_points)
    vals = np.array([mi(x) for x in grid])
    k = int(np.argmax(vals))
    diffs = np.diff(vals)
    unimodal = np.all(diffs[:k] >= 0) and np.all(diffs[k:] <= 0)
    if not unimodal:
        return float(grid[k])
    lo = grid[max(k - 1, 0)]
    hi = grid[min(k + 1, scan_points - 1)]
    return float(golden_section_max(mi, lo, hi, tol))


def information_density(transmitted, received, const: Constellation, n0: float,
                        chunk: int = 1 << 14) -> np.ndarray:
    """Per-symbol ``log2 q(y|x) / sum_m P_m q(y|s_m)`` for a circular Gaussian q.

    ``n0`` is the total complex variance of the auxiliary channel.
    """
    x = np.asarray(transmitted, dtype=complex).ravel()
    y = np.asarray(received, dtype=complex).ravel()
    with np.errstate(divide="ignore"):
        logp = np.log(const.priors)
    out = np.empty(y.size)
    for lo in range(0, y.size, chunk):
        yy, xx = y[lo:lo + chunk], x[lo:lo + chunk]
        num = -np.abs(yy - xx) ** 2 / n0
        den = logsumexp(logp[None, :] - np.abs(yy[:, None] - const.points[None, :]) ** 2 / n0, axis=1)
        out[lo:lo + chunk] = (num - den) * LOG2E
    return out


def estimate_mi_from_samples(transmitted, recovered, const: Constellation) -> Estimate:
    """Mismatched-decoding MI lower bound from transmitted/recovered pairs.

    The auxiliary channel is memoryless circular Gaussian with total variance
    ``mean |recovered - transmitted|^2`` fitted to the data. The estimate is
    the sample mean of the information density, clipped below at zero; the
    standard error treats the per-symbol terms as independent.
    """
    x = np.asarray(transmitted, dtype=complex).ravel()
    y = np.asarray(recovered, dtype=complex).ravel()
    if x.size == 0:
        raise ValueError("empty input")
    if x.size != y.size:
        raise ValueError(f"transmitted ({x.size}) and recovered ({y.size}) lengths differ")
    n0 = max(float(np.mean(np.abs(y - x) ** 2)), 1e-30 * const.signal_power)
    dens = information_density(x, y, const, n0)
    stderr = float(dens.std(ddof=1) / math.sqrt(dens.size)) if dens.size > 1 else float("nan")
    return Estimate(max(float(dens.mean()), 0.0), stderr)


def wrap_quarter(d):
    """Wrap angles to the pi/2 ambiguity sector ``(-pi/4, pi/4]``."""
    d = np.asarray(d, dtype=float)
    return d - (np.pi / 2) * np.ceil((d - np.pi / 4) / (np.pi / 2))


def estimate_mse(estimates, truth) -> Estimate:
    """Mean squared phase error with sector-wrapped differences.

    ``truth`` is a scalar phase or one true phase per estimate.
    """
    est = np.asarray(estimates, dtype=float).ravel()
    if est.size < 2:
        raise ValueError("need at least 2 estimates")
    err2 = wrap_quarter(np.asarray(truth, dtype=float) - est) ** 2
    return Estimate(float(err2.mean()), float(err2.std(ddof=1) / math.sqrt(err2.size)))


def analytic_table(const: Constellation, lambdas, snr_linear: float, n_large: int = 100):
    """Rows of ``lambda, mse_single_symbol, mse_long_window, residual_lambda_max`` for a lambda sweep.

    ``mse_single_symbol`` is the single-symbol MSE, ``mse_long_window`` the long-window MSE
    for ``n_large`` and ``residual_lambda_max`` the lambda stationarity residual.
    """
    rows = []
    for lam in lambdas:
        c = const.with_lambda(lam)
        rows.append({
            "lambda": float(lam),
            "mse_single_symbol": mse_sps_n1(c, snr_linear),
            "mse_long_window": mse_sps_large_n(n_large, snr_linear),
            "residual_lambda_max": lambda_max_residual(const, lam),
        })
    return rows


def capacity_table(const: Constellation, snr_db_values, lam_hi: float = 0.2):
    """Rows of ``snr_db, lambda_opt, mi_uniform, mi_shaped``."""
    rows = []
    for snr_db in snr_db_values:
        snr = 10.0 ** (snr_db / 10.0)
        lam = solve_lambda_optimum(const, snr, lam_hi)
        rows.append({
            "snr_db": float(snr_db),
            "lambda_opt": lam,
            "mi_uniform": mi_awgn(const.with_lambda(0.0), snr),
            "mi_shaped": mi_awgn(const.with_lambda(lam), snr),
        })
    return rows

