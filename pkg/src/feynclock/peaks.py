"""First/second maxima of P_k(t), k sweeps and the scaling-law fits."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from feynclock import constants as C
from feynclock.clock import probabilities
from feynclock.numerics import FitResult, fit_affine, fit_power_law

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class PeakSearchError(RuntimeError):
    """No local maximum was found where one was expected."""

    def __init__(self, message: str, k: int | None = None):
        super().__init__(message)
        self.k = k


def coarse_step(k: int) -> float:
    return max(C.COARSE_STEP_FACTOR * (k + 2) ** (1.0 / 3.0), C.COARSE_STEP_MIN)


def search_window(k: int) -> tuple[float, float]:
    if k < C.SMALL_K:
        return 0.0, 2.0 * (k + 2)
    return C.WINDOW_LO * (k + 2), C.WINDOW_HI * (k + 2)


def _grid(lo: float, hi: float, h: float) -> np.ndarray:
    n = int(math.floor((hi - lo) / h)) + 1
    return lo + h * np.arange(n)


def first_grid_maximum(p: np.ndarray, floor: float) -> int | None:
    """Index of the first strict interior maximum above ``floor``.

    A run of near-equal maxima (within TIE_TOL) resolves to its earliest point.
    """
    floor = max(floor, C.PEAK_ABS_FLOOR)
    inner = (p[1:-1] > p[:-2]) & (p[1:-1] > p[2:]) & (p[1:-1] > floor)
    hits = np.flatnonzero(inner)
    if hits.size == 0:
        return None
    return int(hits[0]) + 1


def golden_section_max(f, a: float, b: float, tol: float) -> float:
    """Maximiser of a unimodal ``f`` on [a, b] to bracket width ``tol``."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    return c if fc >= fd else d


def _refine(k: int, ts: np.ndarray, ps: np.ndarray, i: int) -> tuple[float, float]:
    def f(t):
        return float(probabilities(k, t))

    tol = C.REFINE_REL_TOL * (k + 2)
    t = golden_section_max(f, float(ts[i - 1]), float(ts[i + 1]), tol)
    p = f(t)
    # never hand back something worse than the grid point itself
    if p < ps[i]:
        return float(ts[i]), float(ps[i])
    return t, p


def find_first_maximum(k: int) -> tuple[float, float]:
    if int(k) != k or k < 2:
        raise ValueError(f"peak search needs k >= 2, got {k!r}")
    lo, hi = search_window(k)
    ts = _grid(lo, hi, coarse_step(k))
    ps = probabilities(k, ts)
    i = first_grid_maximum(ps, C.PEAK_NOISE_FLOOR * float(ps.max()))
    if i is None:
        raise PeakSearchError(f"k={k}: no local maximum of P_k in [{lo:.4g}, {hi:.4g}]", k)
    return _refine(k, ts, ps, i)


def find_second_maximum(k: int, tau1: float, p1: float | None = None) -> tuple[float, float]:
    if p1 is None:
        p1 = float(probabilities(k, tau1))
    h = max(C.SECOND_STEP_FACTOR * (k + 2) ** (1.0 / 3.0), C.COARSE_STEP_MIN)
    # oscillation spacing is ~0.9 k^(1/3); the constant covers small k
    span = 8.0 * (k + 2) ** (1.0 / 3.0) + 4.0
    ts = _grid(tau1, tau1 + span, h)
    ps = probabilities(k, ts)
    # the scan starts on a maximum; skip the descent before looking
    i = first_grid_maximum(ps, C.PEAK_NOISE_FLOOR * p1)
    if i is None:
        raise PeakSearchError(f"k={k}: no second maximum within {span:.4g} after tau1", k)
    return _refine(k, ts, ps, i)


@dataclass(frozen=True)
class PeakReport:
    k: int
    tau1: float
    p1: float
    tau2: float
    p2: float
    delta_tau: float

    def check(self) -> None:
        if not 0 < self.tau1 < self.tau2:
            raise ValueError(f"k={self.k}: expected 0 < tau1 < tau2")
        if self.p2 > self.p1 + C.TIE_TOL:
            raise ValueError(f"k={self.k}: second maximum exceeds the first")
        if not (0 < self.p2 and self.p1 <= 1 + 1e-12):
            raise ValueError(f"k={self.k}: peak probabilities out of range")


def peak_report(k: int) -> PeakReport:
    tau1, p1 = find_first_maximum(k)
    tau2, p2 = find_second_maximum(k, tau1, p1)
    rep = PeakReport(int(k), tau1, p1, tau2, p2, tau2 - tau1)
    rep.check()
    return rep


@dataclass(frozen=True)
class SweepTable:
    rows: tuple
    meta: dict = field(default_factory=dict)

    @property
    def ks(self) -> np.ndarray:
        return np.array([r.k for r in self.rows], dtype=float)

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "tau1", "p1", "tau2", "p2", "delta_tau"])
        for r in self.rows:
            w.writerow([r.k] + [repr(float(getattr(r, c))) for c in ("tau1", "p1", "tau2", "p2", "delta_tau")])
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {"meta": self.meta, "rows": [asdict(r) for r in self.rows]}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        reader = csv.DictReader(io.StringIO(text))
        rows = []
        for rec in reader:
            rows.append(
                PeakReport(
                    int(rec["k"]),
                    *(float(rec[c]) for c in ("tau1", "p1", "tau2", "p2", "delta_tau")),
                )
            )
        return cls(tuple(rows))

    @classmethod
    def from_json(cls, text: str) -> "SweepTable":
        doc = json.loads(text)
        return cls(tuple(PeakReport(**r) for r in doc["rows"]), doc.get("meta", {}))


def sweep_meta() -> dict:
    return {
        "coarse_step": f"max({C.COARSE_STEP_FACTOR}*(k+2)^(1/3), {C.COARSE_STEP_MIN})",
        "second_step": f"{C.SECOND_STEP_FACTOR}*(k+2)^(1/3)",
        "refine_tol": f"{C.REFINE_REL_TOL}*(k+2)",
        "noise_floor": C.PEAK_NOISE_FLOOR,
    }


def _safe_report(k: int):
    try:
        return peak_report(k)
    except (PeakSearchError, ValueError) as exc:
        return exc


def sweep(k_values, jobs: int = 1) -> SweepTable:
    ks = [int(k) for k in k_values]
    if any(b <= a for a, b in zip(ks, ks[1:])):
        raise ValueError("k values must be strictly ascending")
    if any(k < 2 for k in ks):
        raise ValueError("every k must be >= 2")
    if jobs > 1 and len(ks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_safe_report, ks))
    else:
        results = [_safe_report(k) for k in ks]
    failed = [(k, r) for k, r in zip(ks, results) if isinstance(r, Exception)]
    if failed:
        k, exc = failed[0]
        raise PeakSearchError(
            f"peak search failed for k={[k for k, _ in failed]}: {exc}", k
        ) from exc
    return SweepTable(tuple(results), sweep_meta())


def log_spaced_ks(lo: int, hi: int, count: int) -> list[int]:
    """``count`` log-spaced integers in [lo, hi], rounded and deduplicated."""
    if lo < 1 or hi < lo or count < 1:
        raise ValueError(f"bad log range {lo}:{hi}:{count}")
    vals = np.rint(np.logspace(math.log10(lo), math.log10(hi), count)).astype(int)
    return sorted(set(int(v) for v in vals))


def _need_rows(table: SweepTable, minimum: int = 5) -> None:
    if len(table.rows) < minimum:
        raise ValueError(f"scaling fit needs at least {minimum} rows, got {len(table.rows)}")


def fit_tau_scaling(table: SweepTable) -> FitResult:
    _need_rows(table)
    return fit_affine(table.ks, table.column("tau1"))


def fit_probability_scaling(table: SweepTable) -> FitResult:
    _need_rows(table)
    return fit_power_law(table.ks, table.column("p1"))


def fit_gap_spacing_scaling(table: SweepTable) -> FitResult:
    _need_rows(table)
    return fit_power_law(table.ks, table.column("delta_tau"))


@dataclass(frozen=True)
class RuntimeEstimate:
    k: int
    repeats: int
    total_time: float


def runtime_estimate(report: PeakReport) -> RuntimeEstimate:
    # guard against 1/p landing a hair above an integer through round-off
    repeats = max(1, math.ceil(1.0 / report.p1 - 1e-9))
    return RuntimeEstimate(report.k, repeats, report.tau1 * repeats)


def fit_runtime_scaling(table: SweepTable) -> FitResult:
    _need_rows(table)
    est = [runtime_estimate(r) for r in table.rows]
    return fit_power_law([e.k for e in est], [e.total_time for e in est])
