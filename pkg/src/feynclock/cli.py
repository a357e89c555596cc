"""Command-line front end.

Every command resolves its settings as flag > ``--config`` JSON > default and
writes that effective configuration next to its outputs, so a run can be
repeated from the recorded file alone.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from feynclock import __version__

DEFAULTS = {
    "pk-curve": {"k": 9999, "t_min": 4900.0, "t_max": 5100.0, "points": 2001,
                 "out": "pk_curve.csv", "svg": False},
    "sweep": {"k": None, "k_log": "100:10000:20", "out": "sweep.csv", "jobs": 1, "svg": False},
    "fit": {"sweep_file": None, "law": "tau", "out": None, "svg": False},
    "gap": {"k": "50,100,200,400,800", "grid_size": 257, "out": "gap", "jobs": 1, "svg": False},
    "asymptotics": {"k": None, "k_log": "100:10000:10", "out": "asymptotics.json", "jobs": 1},
    "verify": {"level": "quick", "gates": None, "seed": 0, "out": None},
}


class UsageError(Exception):
    pass


def parse_k_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        vals = [int(v) for v in text]
    else:
        try:
            vals = [int(v) for v in str(text).split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"bad k list {text!r}") from exc
    if not vals:
        raise UsageError("empty k list")
    return sorted(set(vals))


def parse_k_log(text: str) -> list[int]:
    """``lo:hi:count`` -> deduplicated log-spaced integers."""
    from feynclock.peaks import log_spaced_ks

    parts = str(text).split(":")
    if len(parts) != 3:
        raise UsageError(f"--k-log expects lo:hi:count, got {text!r}")
    try:
        lo, hi, count = (int(p) for p in parts)
        return log_spaced_ks(lo, hi, count)
    except ValueError as exc:
        raise UsageError(f"bad --k-log spec {text!r}: {exc}") from exc


def _resolve(command: str, args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS[command])
    if args.config:
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        loaded = loaded.get(command, loaded)
        unknown = set(loaded) - set(cfg) - {"seed", "command"}
        if unknown:
            raise UsageError(f"unknown config keys for {command}: {sorted(unknown)}")
        cfg.update({k: v for k, v in loaded.items() if k != "command"})
    for key in list(cfg) + ["seed"]:
        val = getattr(args, key, None)
        if val is not None and val is not False:
            cfg[key] = val
    cfg.setdefault("seed", 0)
    cfg["command"] = command
    return cfg


def _ks(cfg) -> list[int]:
    if cfg.get("k") not in (None, ""):
        return parse_k_list(cfg["k"])
    return parse_k_log(cfg["k_log"])


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _meta_dump(cfg: dict, **extra) -> str:
    return json.dumps({"config": cfg, "version": __version__, **extra}, indent=2, sort_keys=True) + "\n"


def _sidecar(path: Path) -> Path:
    return path.with_name(path.name + ".meta.json")


# -- commands ----------------------------------------------------------------


def cmd_pk_curve(cfg) -> int:
    from feynclock.clock import probability_series
    from feynclock.plotting import plot_curve

    k, points = int(cfg["k"]), int(cfg["points"])
    t_min, t_max = float(cfg["t_min"]), float(cfg["t_max"])
    if k < 1 or points < 2 or not 0 <= t_min < t_max:
        raise UsageError("pk-curve needs k >= 1, points >= 2 and 0 <= t_min < t_max")
    series = probability_series(k, np.linspace(t_min, t_max, points))
    out = Path(cfg["out"])
    lines = ["t,P"] + [f"{t!r},{p!r}" for t, p in zip(series.times.tolist(), series.probabilities.tolist())]
    _write(out, "\n".join(lines) + "\n")
    i = int(np.argmax(series.probabilities))
    _write(_sidecar(out), _meta_dump(cfg, grid_max={"t": float(series.times[i]), "P": float(series.probabilities[i])}))
    if cfg["svg"]:
        plot_curve(series.times, series.probabilities, out.with_suffix(".svg"), k)
    return 0


FIGURES = {
    "tau": ("tau1", "optimal time tau_1", False),
    "prob": ("p1", "P_k(tau)", True),
    "spacing": ("delta_tau", "tau_2 - tau_1", True),
}


def _law_fit(table, law: str):
    from feynclock import peaks

    fns = {"tau": peaks.fit_tau_scaling, "prob": peaks.fit_probability_scaling,
           "spacing": peaks.fit_gap_spacing_scaling, "runtime": peaks.fit_runtime_scaling}
    if law not in fns:
        raise UsageError(f"unknown law {law!r}; choose from {sorted(fns)}")
    return fns[law](table)


def _law_plot(table, law, fit, path) -> None:
    from feynclock.peaks import runtime_estimate
    from feynclock.plotting import plot_scaling

    if law == "runtime":
        ys = [runtime_estimate(r).total_time for r in table.rows]
        plot_scaling(table.ks, ys, path, xlabel="k", ylabel="tau_1 ceil(1/P)", fit=fit)
        return
    col, label, loglog = FIGURES[law]
    plot_scaling(table.ks, table.column(col), path, xlabel="k", ylabel=label, fit=fit, loglog=loglog)


def cmd_sweep(cfg) -> int:
    from feynclock.peaks import PeakSearchError, SweepTable, peak_report, sweep

    ks = _ks(cfg)
    out = Path(cfg["out"])
    try:
        table = sweep(ks, jobs=int(cfg["jobs"]))
        failed = []
    except PeakSearchError:
        # rerun per item so every failure is listed and the rest still land on disk
        rows, failed = [], []
        for k in ks:
            try:
                rows.append(peak_report(k))
            except Exception as exc:  # noqa: BLE001
                failed.append(k)
                print(f"sweep: k={k}: {exc}", file=sys.stderr)
        table = SweepTable(tuple(rows))
    meta = dict(table.meta, config=cfg, version=__version__, failed=failed)
    table = SweepTable(table.rows, meta)
    _write(out, table.to_csv())
    _write(out.with_suffix(".json"), table.to_json())
    if cfg["svg"] and len(table.rows) >= 5:
        for law in ("tau", "prob", "spacing", "runtime"):
            _law_plot(table, law, _law_fit(table, law), out.with_name(f"{out.stem}_{law}.svg"))
    return 1 if failed else 0


def _load_table(path: str):
    from feynclock.peaks import SweepTable

    p = Path(path)
    text = p.read_text()
    return SweepTable.from_json(text) if p.suffix == ".json" else SweepTable.from_csv(text)


def cmd_fit(cfg) -> int:
    if not cfg["sweep_file"]:
        raise UsageError("fit needs --sweep-file")
    table = _load_table(cfg["sweep_file"])
    try:
        fit = _law_fit(table, cfg["law"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    doc = json.dumps({"law": cfg["law"], "fit": fit.to_dict(), "config": cfg}, indent=2, sort_keys=True) + "\n"
    if cfg["out"]:
        out = Path(cfg["out"])
        _write(out, doc)
        if cfg["svg"]:
            _law_plot(table, cfg["law"], fit, out.with_suffix(".svg"))
    else:
        sys.stdout.write(doc)
    return 0


def _gap_job(args):
    from feynclock.adiabatic import gap_scan

    k, grid = args
    return gap_scan(k, grid)


def cmd_gap(cfg) -> int:
    from feynclock import adiabatic
    from feynclock.plotting import plot_gap

    ks = parse_k_list(cfg["k"])
    grid = int(cfg["grid_size"])
    if grid < 16 or ks[0] < 1:
        raise UsageError("gap needs grid_size >= 16 and k >= 1")
    jobs = [(k, grid) for k in ks]
    if int(cfg["jobs"]) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=int(cfg["jobs"])) as pool:
            scans = list(pool.map(_gap_job, jobs))
    else:
        scans = [_gap_job(j) for j in jobs]
    outdir = Path(cfg["out"])
    for sc in scans:
        _write(outdir / f"gap_k{sc.k}.csv", sc.to_csv())
    _write(outdir / "gap_summary.csv", adiabatic.summary_csv(scans))
    summary = {
        "config": cfg,
        "version": __version__,
        "rows": [{"k": sc.k, "s_min": sc.s_min, "gap_min": sc.gap_min,
                  "gap_min_k2": sc.gap_min * sc.k**2} for sc in scans],
    }
    try:
        summary["fit"] = adiabatic.fit_gap_scaling_from_scans(scans).to_dict()
    except ValueError as exc:
        summary["fit"] = None
        summary["fit_skipped"] = str(exc)
    _write(outdir / "gap_summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    if cfg["svg"]:
        plot_gap(scans, outdir / "gap.svg")
    return 0


def _asym_job(k):
    from feynclock.asymptotics import asymptotic_report

    try:
        return asymptotic_report(k)
    except Exception as exc:  # noqa: BLE001
        return f"k={k}: {exc}"


def cmd_asymptotics(cfg) -> int:
    from feynclock.asymptotics import reports_to_json

    ks = _ks(cfg)
    if ks[0] < 4:
        raise UsageError("asymptotics needs every k >= 4")
    if int(cfg["jobs"]) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=int(cfg["jobs"])) as pool:
            results = list(pool.map(_asym_job, ks))
    else:
        results = [_asym_job(k) for k in ks]
    errors = [r for r in results if isinstance(r, str)]
    for e in errors:
        print(f"asymptotics: {e}", file=sys.stderr)
    reports = [r for r in results if not isinstance(r, str)]
    _write(Path(cfg["out"]), reports_to_json(reports, {"config": cfg, "version": __version__, "failed": errors}))
    return 1 if errors else 0


def cmd_verify(cfg) -> int:
    from feynclock.gates import GateSchemaError, load_sequence
    from feynclock.verify import run_verification

    seq = None
    if cfg["gates"]:
        try:
            seq = load_sequence(cfg["gates"])
        except (GateSchemaError, ValueError) as exc:
            print(f"verify: gate file {cfg['gates']}: {exc}", file=sys.stderr)
            return 1
    report = run_verification(cfg["level"], int(cfg["seed"]), seq)
    for s in report["suites"]:
        status = "PASS" if s["passed"] else "FAIL"
        print(f"{status} {s['suite']:<14} max_residual={s['max_residual']:.3e} tol={s['tol']:.0e}")
    if cfg["out"]:
        report["config"] = cfg
        _write(Path(cfg["out"]), json.dumps(report, indent=2, sort_keys=True) + "\n")
    failed = [s["suite"] for s in report["suites"] if not s["passed"]]
    if failed:
        print(f"verify: failed suites: {', '.join(failed)}", file=sys.stderr)
    return 0 if report["passed"] else 1


COMMANDS = {
    "pk-curve": cmd_pk_curve,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "gap": cmd_gap,
    "asymptotics": cmd_asymptotics,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (directory for gap)")
    common.add_argument("--config", help="JSON file of settings; flags take precedence")
    common.add_argument("--jobs", type=int, help="worker processes")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("--svg", action="store_true", default=None, help="also write SVG figures")

    parser = argparse.ArgumentParser(prog="feynclock", description="Feynman clock-model experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pk-curve", parents=[common], help="P_k(t) on a time grid")
    p.add_argument("--k", type=int)
    p.add_argument("--t-min", type=float)
    p.add_argument("--t-max", type=float)
    p.add_argument("--points", type=int)

    for name, helptext in (("sweep", "first/second maxima over k"), ("asymptotics", "analytic vs numeric peaks")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--k", help="comma-separated k values")
        p.add_argument("--k-log", help="lo:hi:count log-spaced k values")

    p = sub.add_parser("fit", parents=[common], help="fit a scaling law to a sweep file")
    p.add_argument("--sweep-file")
    p.add_argument("--law", choices=["tau", "prob", "spacing", "runtime"])

    p = sub.add_parser("gap", parents=[common], help="adiabatic clock gap scans")
    p.add_argument("--k", help="comma-separated k values")
    p.add_argument("--grid-size", type=int)

    p = sub.add_parser("verify", parents=[common], help="oracle and structure checks")
    p.add_argument("--level", choices=["quick", "full"])
    p.add_argument("--gates", help="gate-sequence JSON file to check as well")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve(args.command, args)
        return COMMANDS[args.command](cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"{parser.prog} {args.command}: I/O error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
