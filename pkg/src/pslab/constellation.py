"""QAM constellations with Maxwell-Boltzmann priors.

Geometry is fixed on the odd-integer lattice (coordinates ``±(2i+1)`` per
axis); shaping only changes the prior probabilities. Points are always stored
in lexicographic ``(re, im)`` order, which is what "lowest index" means for
every tie-break in the package.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rng import as_generator

__all__ = [
    "Constellation",
    "Moments",
    "build_square_qam",
    "build_cross_qam_32",
    "build_constellation",
    "mb_priors",
    "moments",
    "sample_symbols",
    "prior_entropy",
]

SQUARE_ORDERS = (4, 16, 64, 256, 1024)


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Constellation:
    """Constellation points plus per-point prior probabilities.

    Attributes
    ----------
    points : ndarray of complex
        Symbol coordinates, lexicographically sorted by (re, im).
    priors : ndarray of float
        One probability per point.
    lam : float
        Maxwell-Boltzmann shaping parameter the priors were built from.
    family : str
        ``"square"`` or ``"cross32"``; used to name the modulation in outputs.
    """

    points: np.ndarray
    priors: np.ndarray
    lam: float = 0.0
    family: str = "square"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=complex)
        pr = np.asarray(self.priors, dtype=float)
        if pts.ndim != 1 or pts.size == 0:
            raise ValueError("points must be a non-empty 1-D sequence")
        if pr.shape != pts.shape:
            raise ValueError(f"got {pr.size} priors for {pts.size} points")
        if np.any(pr < 0) or np.any(pr > 1) or abs(pr.sum() - 1.0) > 1e-12:
            raise ValueError("priors must lie in [0, 1] and sum to 1")
        if np.unique(pts).size != pts.size:
            raise ValueError("constellation points must be distinct")
        if self.lam < 0:
            raise ValueError(f"shaping parameter must be >= 0, got {self.lam}")
        order = np.lexsort((pts.imag, pts.real))
        object.__setattr__(self, "points", _frozen(pts[order], complex))
        object.__setattr__(self, "priors", _frozen(pr[order], float))

    @property
    def order(self) -> int:
        return self.points.size

    @property
    def name(self) -> str:
        return f"{self.order}-QAM" if self.family == "square" else "32-QAM-cross"

    @property
    def energy(self) -> np.ndarray:
        return np.abs(self.points) ** 2

    @property
    def signal_power(self) -> float:
        """Mean symbol energy ``E{|s|^2}`` under the priors."""
        return float(np.dot(self.priors, self.energy))

    def with_lambda(self, lam: float) -> "Constellation":
        """Same geometry, Maxwell-Boltzmann priors for ``lam``."""
        return Constellation(self.points, mb_priors(self.points, lam), float(lam), self.family)


@dataclass(frozen=True)
class Moments:
    p_s: float
    m4: float
    inv_m2: float
    sq_mean: complex
    kurtosis: float


def _odd_axis(side: int) -> np.ndarray:
    half = side // 2
    return np.concatenate([-(2 * np.arange(half)[::-1] + 1), 2 * np.arange(half) + 1]).astype(float)


def _grid(side: int) -> np.ndarray:
    ax = _odd_axis(side)
    re, im = np.meshgrid(ax, ax, indexing="ij")
    return (re + 1j * im).ravel()


def mb_priors(points, lam: float) -> np.ndarray:
    """Maxwell-Boltzmann priors ``P_m ∝ exp(-lam |s_m|^2)``.

    Parameters
    ----------
    points : array_like of complex
        Constellation coordinates.
    lam : float
        Shaping parameter, ``lam >= 0``. ``lam = 0`` gives uniform priors.

    Returns
    -------
    ndarray
        Normalized probabilities, same order as ``points``.
    """
    if lam < 0:
        raise ValueError(f"shaping parameter must be >= 0, got {lam}")
    e = np.abs(np.asarray(points, dtype=complex)) ** 2
    if e.size == 0:
        raise ValueError("points must be non-empty")
    # shift by the minimum energy so the largest weight is exactly 1
    w = np.exp(-lam * (e - e.min()))
    return w / w.sum()


def build_square_qam(order: int, lam: float = 0.0) -> Constellation:
    """Square M-QAM on the grid ``{±(2i+1) ± j(2k+1)}``."""
    if order not in SQUARE_ORDERS:
        raise ValueError(
            f"unsupported square QAM order {order}; expected one of {SQUARE_ORDERS}"
        )
    pts = _grid(int(round(np.sqrt(order))))
    return Constellation(pts, mb_priors(pts, lam), float(lam), "square")


def build_cross_qam_32(lam: float = 0.0) -> Constellation:
    """Cross 32-QAM: the 32 lowest-energy points of the 64-QAM grid.

    This is the 6x6 grid ``{±1, ±3, ±5}^2`` without its four ``(±5, ±5)``
    corners. The energy boundary is unambiguous (34 kept, 50 dropped).
    """
    grid = _grid(8)
    pts = grid[np.argsort(np.abs(grid) ** 2, kind="stable")[:32]]
    return Constellation(pts, mb_priors(pts, lam), float(lam), "cross32")


def build_constellation(family: str = "square", order: int = 64, lam: float = 0.0) -> Constellation:
    """Build a constellation from its config description."""
    if family == "square":
        return build_square_qam(int(order), lam)
    if family in ("cross32", "cross"):
        if int(order) != 32:
            raise ValueError(f"cross family only supports order 32, got {order}")
        return build_cross_qam_32(lam)
    raise ValueError(f"unknown constellation family {family!r}; use 'square' or 'cross32'")


def moments(const: Constellation) -> Moments:
    """Moments of the symbol distribution consumed by the MSE formulas.

    ``inv_m2`` is ``E{1/|s|^2}``; a point at the origin makes it infinite.
    """
    p, s = const.priors, const.points
    e = np.abs(s) ** 2
    p_s = float(p @ e)
    m4 = float(p @ e**2)
    with np.errstate(divide="ignore"):
        inv_m2 = float(p @ (1.0 / e))
    sq_mean = complex(p @ s**2)
    kurt = m4 - 2.0 * p_s**2 - abs(sq_mean) ** 2
    return Moments(p_s, m4, inv_m2, sq_mean, kurt)


def prior_entropy(const: Constellation) -> float:
    """Entropy of the priors in bits."""
    p = const.priors[const.priors > 0]
    return float(-(p @ np.log2(p)))


def sample_symbols(const: Constellation, count: int, seed=None) -> np.ndarray:
    """Draw ``count`` i.i.d. symbols from the constellation priors.

    Sampling is inverse-CDF on uniform draws, so two constellations with the
    same geometry sampled from the same seed give coupled sequences.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = as_generator(seed)
    u = rng.random(count)
    cdf = np.cumsum(const.priors)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, u, side="right")
    return const.points[np.minimum(idx, const.order - 1)]
