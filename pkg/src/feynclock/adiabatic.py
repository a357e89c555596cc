"""Spectral gap of the interpolating adiabatic clock Hamiltonian H_clock(s)."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from feynclock import constants as C
from feynclock.numerics import (
    FitResult,
    SymTridiag,
    fit_power_law,
    tridiag_eigenvalues_batch,
)


def _diagonals(k: int, s) -> tuple[np.ndarray, np.ndarray]:
    s = np.atleast_1d(np.asarray(s, dtype=float))
    d = np.ones((s.size, k + 1))
    d[:, 0] = s / 2.0
    d[:, -1] = 1.0 - s / 2.0
    e = np.repeat(-s[:, None] / 2.0, k, axis=1)
    return d, e


def build_adiabatic_clock(k: int, s: float) -> SymTridiag:
    if int(k) != k or k < 1:
        raise ValueError(f"gate count k must be an integer >= 1, got {k!r}")
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s}")
    d, e = _diagonals(k, s)
    return SymTridiag(d[0], e[0])


def gaps(k: int, s_values) -> np.ndarray:
    d, e = _diagonals(k, s_values)
    lam = tridiag_eigenvalues_batch(d, e, 2)
    return np.abs(lam[:, 1] - lam[:, 0])


@dataclass(frozen=True)
class GapScan:
    k: int
    s_grid: np.ndarray
    gap: np.ndarray
    s_min: float
    gap_min: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "gap"])
        for s, g in zip(self.s_grid, self.gap):
            w.writerow([repr(float(s)), repr(float(g))])
        return buf.getvalue()


def gap_scan(
    k: int,
    grid_size: int = C.GAP_GRID,
    rounds: int = C.GAP_REFINE_ROUNDS,
    refine_points: int = C.GAP_REFINE_POINTS,
) -> GapScan:
    """Gap over a uniform s-grid, then zoomed sub-grids around the minimum.

    Each refinement round resamples the bracket between the neighbours of the
    current best point, so the bracket shrinks by ~refine_points/2 per round.
    """
    if grid_size < 16:
        raise ValueError(f"grid_size must be >= 16, got {grid_size}")
    s = np.linspace(0.0, 1.0, grid_size)
    g = gaps(k, s)
    i = int(np.argmin(g))
    lo, hi = s[max(i - 1, 0)], s[min(i + 1, grid_size - 1)]
    best_s, best_g = float(s[i]), float(g[i])
    for _ in range(rounds):
        sub = np.linspace(lo, hi, refine_points)
        gs = gaps(k, sub)
        j = int(np.argmin(gs))
        if gs[j] < best_g:
            best_s, best_g = float(sub[j]), float(gs[j])
        lo, hi = sub[max(j - 1, 0)], sub[min(j + 1, refine_points - 1)]
    return GapScan(int(k), s, g, best_s, best_g)


@dataclass(frozen=True)
class GapScalingFit:
    fit: FitResult
    runtime_exponent: float  # Delta^-2 adiabatic criterion
    runtime_exponent_cubic: float  # Delta^-3 variant
    scans: tuple

    def to_dict(self) -> dict:
        return {
            "gap_fit": self.fit.to_dict(),
            "runtime_exponent": self.runtime_exponent,
            "runtime_exponent_gap_cubed": self.runtime_exponent_cubic,
            "dooley_coefficient": C.DOOLEY_COEFF,
            "coefficient_ratio": self.fit.coefficient / C.DOOLEY_COEFF,
        }


def _check_span(ks) -> None:
    if len(ks) < 5:
        raise ValueError(f"gap fit needs at least 5 k values, got {len(ks)}")
    if max(ks) < 10 * min(ks):
        raise ValueError(f"k values must span at least a decade, got {min(ks)}..{max(ks)}")


def fit_gap_scaling_from_scans(scans) -> GapScalingFit:
    ks = [sc.k for sc in scans]
    _check_span(ks)
    fit = fit_power_law(ks, [sc.gap_min for sc in scans])
    return GapScalingFit(fit, -2.0 * fit.exponent, -3.0 * fit.exponent, tuple(scans))


def fit_gap_scaling(k_values, grid_size: int = C.GAP_GRID) -> GapScalingFit:
    ks = sorted(int(k) for k in k_values)
    _check_span(ks)
    return fit_gap_scaling_from_scans([gap_scan(k, grid_size) for k in ks])


def summary_csv(scans) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "s_min", "gap_min"])
    for sc in scans:
        w.writerow([sc.k, repr(sc.s_min), repr(sc.gap_min)])
    return buf.getvalue()
