"""Static SVG figures for the CLI reports.

SVG output is made byte-reproducible by fixing matplotlib's hash salt and
dropping the creation date from the metadata.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "svg.hashsalt": "feynclock",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": "feynclock"})
    plt.close(fig)


def plot_curve(times, probs, path, k: int, fit_label: str | None = None) -> None:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.plot(times, probs, lw=1.0, color="C0", label=f"k = {k}")
        ax.set_xlabel("t")
        ax.set_ylabel("P_k(t)")
        ax.set_title(fit_label or "completion probability")
        ax.legend(loc="upper right")
        _save(fig, path)


def plot_scaling(xs, ys, path, *, xlabel: str, ylabel: str, fit=None, loglog: bool = True) -> None:
    """Scatter of a sweep column with the fitted law overlaid when given."""
    xs = np.asarray(xs, dtype=float)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        ax.plot(xs, ys, "o", ms=4, color="C0", label="measured")
        if fit is not None:
            xf = np.geomspace(xs.min(), xs.max(), 200) if loglog else np.linspace(xs.min(), xs.max(), 200)
            if fit.kind == "power":
                lab = f"{fit.coefficient:.3g} k^{fit.exponent:.3f}"
            else:
                lab = f"{fit.coefficient:.3f} k + {fit.intercept:.3f}"
            ax.plot(xf, fit.predict(xf), "-", lw=1.2, color="C3", label=f"fit: {lab}")
        if loglog:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend(loc="best")
        _save(fig, path)


def plot_gap(scans, path) -> None:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 4.5))
        for i, sc in enumerate(scans):
            ax.semilogy(sc.s_grid, sc.gap, lw=1.0, color=f"C{i % 10}", label=f"k = {sc.k}")
            ax.plot([sc.s_min], [sc.gap_min], "x", color=f"C{i % 10}")
        ax.set_xlabel("s")
        ax.set_ylabel("gap")
        ax.legend(loc="lower left")
        _save(fig, path)
