"""Dense and tridiagonal numeric kernels shared by the rest of the package."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from feynclock.constants import HERMITIAN_TOL, UNITARY_TOL


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a 2-D complex array, rejecting anything else."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        return False
    return unitarity_residual(a) <= tol


def unitarity_residual(m) -> float:
    """Max-norm of M^dagger M - I."""
    a = as_matrix(m)
    return float(np.max(np.abs(a.conj().T @ a - np.eye(a.shape[1]))))


def _check_hermitian(h: np.ndarray, tol: float) -> None:
    if h.shape[0] != h.shape[1]:
        raise ValueError(f"matrix must be square, got shape {h.shape}")
    dev = np.max(np.abs(h - h.conj().T)) if h.size else 0.0
    if dev > tol:
        raise ValueError(f"matrix is not Hermitian (max deviation {dev:.3e})")


def matrix_exponential(h, t: float) -> np.ndarray:
    """Propagator exp(-i H t) of a Hermitian matrix via eigendecomposition."""
    h = as_matrix(h)
    _check_hermitian(h, HERMITIAN_TOL)
    if h.shape[0] == 0:
        return h.copy()
    # symmetrise so eigh sees exactly Hermitian input
    w, v = np.linalg.eigh(0.5 * (h + h.conj().T))
    return (v * np.exp(-1j * w * t)) @ v.conj().T


def expm_taylor(a, order: int = 18) -> np.ndarray:
    """exp(A) by scaling and squaring with a truncated Taylor series.

    Generic (no Hermitian assumption); kept as an independent cross-check of
    :func:`matrix_exponential`.
    """
    a = as_matrix(a)
    norm = np.linalg.norm(a, 1) if a.size else 0.0
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    b = a / 2.0**squarings
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for n in range(1, order + 1):
        term = term @ b / n
        out = out + term
    for _ in range(squarings):
        out = out @ out
    return out


@dataclass(frozen=True)
class SymTridiag:
    """Real symmetric tridiagonal matrix stored as its two diagonals."""

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.diag, dtype=float).reshape(-1)
        e = np.asarray(self.offdiag, dtype=float).reshape(-1)
        if d.size == 0:
            raise ValueError("tridiagonal matrix must have at least one row")
        if e.size != d.size - 1:
            raise ValueError(
                f"offdiag length {e.size} does not match diag length {d.size}"
            )
        d.setflags(write=False)
        e.setflags(write=False)
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def size(self) -> int:
        return self.diag.size

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        y = self.diag * x
        y[:-1] += self.offdiag * x[1:]
        y[1:] += self.offdiag * x[:-1]
        return y


def _gershgorin(d: np.ndarray, e: np.ndarray) -> tuple[float, float]:
    r = np.zeros_like(d)
    r[:-1] += np.abs(e)
    r[1:] += np.abs(e)
    return float(np.min(d - r)), float(np.max(d + r))


def sturm_count(d, e2, x: float) -> int:
    """Number of eigenvalues strictly below ``x``.

    ``e2`` holds the squared off-diagonal. Plain-float loop: for the sizes used
    here this beats per-element numpy dispatch by a wide margin.
    """
    count = 0
    q = 1.0
    tiny = 1e-300
    prev = 0.0
    for i in range(len(d)):
        q = d[i] - x - (prev / q if i else 0.0)
        if q == 0.0:
            q = -tiny
        if q < 0.0:
            count += 1
        if i < len(e2):
            prev = e2[i]
    return count


def _sturm_count_batch(d: np.ndarray, e2: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Vectorised Sturm count; ``d`` (M, N), ``e2`` (M, N-1), ``x`` (M, L)."""
    tiny = 1e-300
    q = d[:, :1] - x
    q = np.where(q == 0.0, -tiny, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, d.shape[1]):
        q = d[:, i : i + 1] - x - e2[:, i - 1 : i] / q
        q = np.where(q == 0.0, -tiny, q)
        count += q < 0
    return count


def tridiag_eigenvalues(m: SymTridiag, lowest: int) -> np.ndarray:
    """The ``lowest`` smallest eigenvalues of ``m``, ascending, by Sturm bisection."""
    n = m.size
    if lowest < 0 or lowest > n:
        raise ValueError(f"lowest must lie in [0, {n}], got {lowest}")
    if lowest == 0:
        return np.empty(0)
    d = m.diag.tolist()
    e2 = (m.offdiag**2).tolist()
    lo0, hi0 = _gershgorin(m.diag, m.offdiag)
    scale = max(abs(lo0), abs(hi0), 1.0)
    out = np.empty(lowest)
    lo_prev = lo0
    for idx in range(lowest):
        lo, hi = lo_prev, hi0
        # invariant: count(lo) <= idx < count(hi)
        while hi - lo > 2.0 * np.finfo(float).eps * max(scale, abs(lo), abs(hi)):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if sturm_count(d, e2, mid) > idx:
                hi = mid
            else:
                lo = mid
        out[idx] = 0.5 * (lo + hi)
        lo_prev = lo
    return out


def tridiag_eigenvalues_batch(diags, offdiags, lowest: int) -> np.ndarray:
    """Smallest eigenvalues for a stack of same-size tridiagonal matrices.

    Returns an array of shape (M, lowest). Same bisection as
    :func:`tridiag_eigenvalues`, vectorised across matrices and indices.
    """
    d = np.atleast_2d(np.asarray(diags, dtype=float))
    e = np.atleast_2d(np.asarray(offdiags, dtype=float))
    mcount, n = d.shape
    if n == 0:
        raise ValueError("tridiagonal matrix must have at least one row")
    if e.shape != (mcount, n - 1):
        raise ValueError(f"offdiag shape {e.shape} incompatible with diag {d.shape}")
    if lowest < 0 or lowest > n:
        raise ValueError(f"lowest must lie in [0, {n}], got {lowest}")
    if lowest == 0:
        return np.empty((mcount, 0))
    e2 = e**2
    r = np.zeros_like(d)
    r[:, :-1] += np.abs(e)
    r[:, 1:] += np.abs(e)
    lo = np.repeat((d - r).min(axis=1, keepdims=True), lowest, axis=1)
    hi = np.repeat((d + r).max(axis=1, keepdims=True), lowest, axis=1)
    target = np.arange(lowest)[None, :]
    scale = np.maximum(np.maximum(np.abs(lo), np.abs(hi)), 1.0)
    eps = np.finfo(float).eps
    for _ in range(200):
        if np.all(hi - lo <= 2.0 * eps * scale):
            break
        mid = 0.5 * (lo + hi)
        above = _sturm_count_batch(d, e2, mid) > target
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
    return 0.5 * (lo + hi)


def _cos_cubic_zero(n: int) -> float:
    return (6.0 * math.pi * (n + 0.5)) ** (1.0 / 3.0)


def _cos_cubic_piece(a: float, b: float, panels: int, order: int) -> float:
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = 0.5 * (hi - lo) * nodes + 0.5 * (hi + lo)
        total += 0.5 * (hi - lo) * float(np.dot(weights, np.cos(x**3 / 6.0)))
    return total


def oscillatory_integral_cos_cubic(
    upper_mode: str = "full", panels: int = 4, order: int = 20
) -> float:
    """Integral of cos(x**3 / 6) over [0, inf).

    The range is split at the zeros x_n = (6 pi (n + 1/2))**(1/3) of the
    integrand and each piece is integrated with composite Gauss-Legendre
    (``panels`` sub-panels of ``order`` nodes). With ``upper_mode="full"`` the
    alternating series of pieces is summed with repeated averaging of the
    partial sums; ``upper_mode="first_zero"`` stops at the first zero.
    """
    if upper_mode not in ("full", "first_zero"):
        raise ValueError(f"unknown upper_mode {upper_mode!r}")
    head = _cos_cubic_piece(0.0, _cos_cubic_zero(0), panels, order)
    if upper_mode == "first_zero":
        return head
    terms = [
        _cos_cubic_piece(_cos_cubic_zero(n), _cos_cubic_zero(n + 1), panels, order)
        for n in range(60)
    ]
    partial = head + np.cumsum(terms)
    s = partial[-40:]
    while s.size > 1:
        s = 0.5 * (s[1:] + s[:-1])
    return float(s[0])


def cos_cubic_integral_closed_form() -> float:
    """Gamma(4/3) * 6**(1/3) * cos(pi/6)."""
    return math.gamma(4.0 / 3.0) * 6.0 ** (1.0 / 3.0) * math.cos(math.pi / 6.0)


def first_zero_tail_bound() -> float:
    """Bound on |full - truncated-at-first-zero|.

    Past the first zero the pieces alternate in sign with shrinking magnitude,
    so the tail is no larger than the first of them.
    """
    return abs(_cos_cubic_piece(_cos_cubic_zero(0), _cos_cubic_zero(1), 8, 20))


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit.

    For power laws ``y = coefficient * x**exponent`` and ``intercept`` is the
    log-space intercept. For affine fits ``y = coefficient * x + intercept``
    and ``exponent`` is 1.
    """

    kind: str
    exponent: float
    coefficient: float
    intercept: float
    r_squared: float
    residual_max: float
    n_points: int

    @property
    def slope(self) -> float:
        return self.exponent if self.kind == "power" else self.coefficient

    def predict(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "power":
            return self.coefficient * x**self.exponent
        return self.coefficient * x + self.intercept

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "exponent": self.exponent,
            "coefficient": self.coefficient,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "residual_max": self.residual_max,
            "n_points": self.n_points,
        }


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float, float]:
    design = np.column_stack([x, np.ones_like(x)])
    (slope, icpt), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - (slope * x + icpt)
    ss_res = float(resid @ resid)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return float(slope), float(icpt), min(max(r2, 0.0), 1.0), float(np.max(np.abs(resid)))


def _validate(xs, ys) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=float).reshape(-1)
    y = np.asarray(ys, dtype=float).reshape(-1)
    if x.size != y.size:
        raise ValueError(f"xs and ys differ in length ({x.size} vs {y.size})")
    if x.size < 3:
        raise ValueError(f"need at least 3 points to fit, got {x.size}")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValueError("fit data must be finite")
    return x, y


def fit_affine(xs, ys) -> FitResult:
    x, y = _validate(xs, ys)
    slope, icpt, r2, rmax = _line_fit(x, y)
    return FitResult("affine", 1.0, slope, icpt, r2, rmax, x.size)


def fit_power_law(xs, ys) -> FitResult:
    """Ordinary least squares on (log x, log y)."""
    x, y = _validate(xs, ys)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("power-law fit requires strictly positive data")
    slope, icpt, r2, rmax = _line_fit(np.log(x), np.log(y))
    return FitResult("power", slope, math.exp(icpt), icpt, r2, rmax, x.size)
