"""Closed-form spectral dynamics of the bare (k+1)-site clock chain.

The chain Hamiltonian has zero diagonal and unit hopping. Its eigenpairs are

    lambda_j = 2 cos(pi (j+1) / (k+2))
    <m|phi_j> = sqrt(2 / (k+2)) sin(pi (m+1)(j+1) / (k+2))

for m, j = 0..k, and every propagator element is a finite spectral sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from feynclock.numerics import SymTridiag


def _check_k(k: int) -> int:
    if int(k) != k or k < 1:
        raise ValueError(f"gate count k must be an integer >= 1, got {k!r}")
    return int(k)


def build_clock_matrix(k: int) -> SymTridiag:
    k = _check_k(k)
    return SymTridiag(np.zeros(k + 1), np.ones(k))


@dataclass(frozen=True)
class ClockSpectrum:
    k: int
    eigenvalues: np.ndarray
    overlap_table: np.ndarray  # [m, j] = <m|phi_j>

    @property
    def sites(self) -> int:
        return self.k + 1


@lru_cache(maxsize=64)
def clock_eigensystem(k: int) -> ClockSpectrum:
    k = _check_k(k)
    idx = np.arange(k + 1)
    theta = np.pi * (idx + 1) / (k + 2)
    lam = 2.0 * np.cos(theta)
    table = np.sqrt(2.0 / (k + 2)) * np.sin(np.outer(idx + 1, idx + 1) * np.pi / (k + 2))
    lam.setflags(write=False)
    table.setflags(write=False)
    return ClockSpectrum(k, lam, table)


def _end_weights(k: int) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and <k|phi_j><phi_j|0> for the end-to-end amplitude."""
    idx = np.arange(k + 1)
    theta = np.pi * (idx + 1) / (k + 2)
    sign = np.where(idx % 2 == 0, 1.0, -1.0)
    return 2.0 * np.cos(theta), (2.0 / (k + 2)) * np.sin(theta) ** 2 * sign


def amplitude(k: int, i: int, j: int, t: float) -> complex:
    """Clock propagator element a_ij(t) = (exp(-i H_clock t))_ij."""
    spec = clock_eigensystem(k)
    for name, site in (("i", i), ("j", j)):
        if not 0 <= site <= spec.k:
            raise ValueError(f"site {name}={site} outside 0..{spec.k}")
    w = spec.overlap_table[i] * spec.overlap_table[j]
    return complex(np.dot(np.exp(-1j * spec.eigenvalues * t), w))


def amplitude_matrix(k: int, t: float) -> np.ndarray:
    """All a_ij(t) at once, shape (k+1, k+1)."""
    spec = clock_eigensystem(k)
    v = spec.overlap_table
    return (v * np.exp(-1j * spec.eigenvalues * t)) @ v.T


def end_amplitudes(k: int, times) -> np.ndarray:
    """a_k0(t) on an array of times, O(k) per time point."""
    k = _check_k(k)
    lam, w = _end_weights(k)
    t = np.asarray(times, dtype=float)
    flat = t.reshape(-1)
    out = np.empty(flat.size, dtype=complex)
    # chunk so the phase table stays a few MB
    step = max(1, 2_000_000 // (k + 1))
    for start in range(0, flat.size, step):
        chunk = flat[start : start + step]
        out[start : start + step] = np.exp(-1j * np.outer(chunk, lam)) @ w
    return out.reshape(t.shape)


def success_probability(k: int, t: float) -> float:
    """P_k(t) = |a_k0(t)|^2, the chance the clock has reached site k."""
    if t < 0:
        raise ValueError(f"time must be non-negative, got {t}")
    return float(abs(end_amplitudes(k, t)) ** 2)


def probabilities(k: int, times) -> np.ndarray:
    return np.abs(end_amplitudes(k, times)) ** 2


@dataclass(frozen=True)
class AmplitudeSeries:
    k: int
    times: np.ndarray
    amplitudes: np.ndarray
    probabilities: np.ndarray


def probability_series(k: int, t_grid) -> AmplitudeSeries:
    t = np.asarray(t_grid, dtype=float).reshape(-1)
    if t.size == 0:
        raise ValueError("time grid is empty")
    if t.size > 1 and np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly ascending")
    amps = end_amplitudes(k, t)
    return AmplitudeSeries(int(k), t, amps, np.abs(amps) ** 2)
