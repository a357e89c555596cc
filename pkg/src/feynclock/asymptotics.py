"""Large-k approximations of the peak probability and the peak spacing.

Three routes to P_k near its first maximum are compared here: the exact
spectral sum, the Taylor-truncated double-cosine sum evaluated at
t = (k+1)/2, and the Riemann-integral limit of that sum, which reduces to the
constant int_0^inf cos(x^3/6) dx.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from feynclock.clock import success_probability
from feynclock.numerics import oscillatory_integral_cos_cubic
from feynclock.peaks import peak_report

# coefficients quoted for comparison only; neither is asserted
QUOTED_ANALYTIC_COEFF = 5.14
QUOTED_NUMERIC_COEFF = 6.76
QUOTED_SPACING_COEFF = 1.115


def pk_tau_cosine_sum(k: int) -> float:
    """Double-cosine approximation to P_k at t = (k+1)/2 (even k only)."""
    if int(k) != k or k < 4:
        raise ValueError(f"cosine-sum approximation needs k >= 4, got {k!r}")
    if k % 2:
        raise ValueError(f"cosine-sum approximation is derived for even k only, got {k}")
    p = np.arange(0, k // 2 + 1, dtype=float)
    outer = np.cos(np.pi * (2 * p - 1) / (2 * (k + 1))) ** 2
    cubic = np.cos(np.pi**3 / (6.0 * (k + 1) ** 2) * (p - 0.5) ** 3)
    amp = 4.0 / (k + 1) * float(np.sum(outer * cubic))
    return amp * amp


def cos_cubic_constant() -> float:
    return oscillatory_integral_cos_cubic()


def integral_amplitude_coefficient() -> float:
    """4 I / pi, so that |a_k0| ~ (4 I / pi) (k+1)^(-1/3)."""
    return 4.0 * cos_cubic_constant() / math.pi


def integral_probability_coefficient() -> float:
    return integral_amplitude_coefficient() ** 2


def pk_tau_integral_approx(k: int) -> float:
    if k < 4:
        raise ValueError(f"integral approximation needs k >= 4, got {k!r}")
    return integral_probability_coefficient() * (k + 1) ** (-2.0 / 3.0)


def second_maximum_prediction(k: int) -> tuple[float, float]:
    """Predicted relative offset delta and time gap between the first two maxima."""
    if k < 4:
        raise ValueError(f"second-maximum prediction needs k >= 4, got {k!r}")
    delta = 0.5 * (3.0 * math.pi) ** (2.0 / 3.0) * (k + 1) ** (-2.0 / 3.0)
    return delta, delta * (k + 2) / 2.0


@dataclass(frozen=True)
class AsymptoticReport:
    k: int
    tau_half: float
    p_exact_at_half: float
    p_tau_sum: float | None
    p_tau_integral: float
    p_tau_numeric: float
    tau_numeric: float
    coefficient_estimate: float
    delta_predicted: float
    delta_numeric: float

    def to_dict(self) -> dict:
        return asdict(self)


def asymptotic_report(k: int) -> AsymptoticReport:
    rep = peak_report(k)
    half = (k + 1) / 2.0
    _, dtau = second_maximum_prediction(k)
    return AsymptoticReport(
        k=int(k),
        tau_half=half,
        p_exact_at_half=success_probability(k, half),
        p_tau_sum=pk_tau_cosine_sum(k) if k % 2 == 0 else None,
        p_tau_integral=pk_tau_integral_approx(k),
        p_tau_numeric=rep.p1,
        tau_numeric=rep.tau1,
        coefficient_estimate=rep.p1 * k ** (2.0 / 3.0),
        delta_predicted=dtau,
        delta_numeric=rep.delta_tau,
    )


def coefficient_summary() -> dict:
    """Side-by-side k^(-2/3) coefficients of the peak probability."""
    return {
        "integral_coefficient": integral_probability_coefficient(),
        "cos_cubic_integral": cos_cubic_constant(),
        "quoted_analytic_coefficient": QUOTED_ANALYTIC_COEFF,
        "quoted_numeric_coefficient": QUOTED_NUMERIC_COEFF,
    }


def reports_to_json(reports, extra: dict | None = None) -> str:
    doc = {"summary": coefficient_summary(), "rows": [r.to_dict() for r in reports]}
    if extra:
        doc["meta"] = extra
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
