"""AWGN plus phase-noise channel.

The noise power is set from the constellation's prior-based signal power, so
a given SNR stays exact whatever the shaping: ``2 sigma_n^2 = P_s / SNR``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constellation import Constellation
from .rng import as_generator

__all__ = [
    "PhaseTrajectory",
    "ChannelParams",
    "make_constant_trajectory",
    "make_wiener_trajectory",
    "wiener_increment_variance",
    "transmit",
]


@dataclass(frozen=True)
class PhaseTrajectory:
    """Per-symbol carrier phase.

    ``linewidth`` is the combined transmitter + local-oscillator linewidth in
    Hz (zero for a constant trajectory).
    """

    values: np.ndarray
    kind: str = "constant"
    linewidth: float = 0.0
    symbol_rate: float = 0.0

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class ChannelParams:
    snr_db: float

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def noise_variance(self, signal_power: float) -> float:
        """Total complex noise variance ``2 sigma_n^2``."""
        return signal_power / self.snr_linear


def make_constant_trajectory(theta: float, count: int) -> PhaseTrajectory:
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    values = np.full(count, float(theta))
    values.setflags(write=False)
    return PhaseTrajectory(values, "constant")


def wiener_increment_variance(linewidth: float, symbol_rate: float) -> float:
    """Per-symbol phase increment variance ``2 pi dnu / R_s`` in rad^2."""
    return 2.0 * np.pi * linewidth / symbol_rate


def make_wiener_trajectory(count: int, linewidth: float, symbol_rate: float, seed=None) -> PhaseTrajectory:
    """Wiener (random-walk) laser phase starting at zero.

    Parameters
    ----------
    count : int
        Number of symbols.
    linewidth : float
        Combined laser linewidth in Hz.
    symbol_rate : float
        Symbol rate in Baud.
    seed : int, SeedSequence or Generator, optional
        Source of the Gaussian increments.
    """
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if linewidth < 0:
        raise ValueError(f"linewidth must be >= 0, got {linewidth}")
    if symbol_rate <= 0:
        raise ValueError(f"symbol_rate must be > 0, got {symbol_rate}")
    rng = as_generator(seed)
    sigma = np.sqrt(wiener_increment_variance(linewidth, symbol_rate))
    steps = rng.standard_normal(count - 1) * sigma
    values = np.concatenate(([0.0], np.cumsum(steps)))
    values.setflags(write=False)
    return PhaseTrajectory(values, "wiener", float(linewidth), float(symbol_rate))


def transmit(symbols, trajectory: PhaseTrajectory, params: ChannelParams,
             constellation: Constellation, seed=None) -> np.ndarray:
    """Rotate by the trajectory and add circular complex Gaussian noise.

    ``r_i = s_i exp(j theta_i) + n_i`` with ``E|n_i|^2 = P_s / SNR`` and
    ``P_s`` taken from the constellation priors, not from ``symbols``.
    ``params=None`` gives the noiseless channel.
    """
    s = np.asarray(symbols, dtype=complex)
    theta = np.asarray(trajectory.values if isinstance(trajectory, PhaseTrajectory) else trajectory, dtype=float)
    if s.shape != theta.shape:
        raise ValueError(f"symbols ({s.size}) and trajectory ({theta.size}) lengths differ")
    r = s * np.exp(1j * theta)
    if params is None:
        return r
    sigma = np.sqrt(params.noise_variance(constellation.signal_power) / 2.0)
    rng = as_generator(seed)
    noise = rng.standard_normal((2, s.size))
    return r + sigma * (noise[0] + 1j * noise[1])
