"""Command-line front end.

    resona1d <command> --config <path|preset> [--method M] [--out DIR] [--grid N] [--k K]

Commands write CSV or JSON into ``--out`` together with PNG figures and a
``manifest.json`` naming the config hash. Exit codes: 0 success, 1 solver
failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, plotting
from .config import RunConfig, parse_config, preset_names
from .errors import ConfigError, Resona1dError
from .perturbation import m_first_order, f1_block, gap_size_estimate, measured_splitting
from .spectrum import METHODS

COMMANDS = ("static-bands", "bands", "exact", "compare", "gaps", "perturbation", "bench")
CSV_HEADER = ("alpha", "band", "re_omega", "im_omega", "method")

log = logging.getLogger("resona1d")


class SolverFailure(Exception):
    """Raised inside a command when results are incomplete."""


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def bands_csv(bands) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for alpha, spec in zip(bands.grid, bands.spectra):
        if spec is None:
            continue
        for j, om in enumerate(spec.omega):
            w.writerow((fmt(alpha), j, fmt(om.real), fmt(om.imag), bands.method))
    return buf.getvalue()


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path: Path, payload: dict):
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default) + "\n")


def _k_gaps_payload(gaps):
    return [{"alpha_min": g.alpha_min, "alpha_max": g.alpha_max, "max_im": g.max_im,
             "paired": g.paired, "re_min": g.re_min, "re_max": g.re_max} for g in gaps]


def _band_gaps_payload(gaps):
    return [{"omega_min": g.omega_min, "omega_max": g.omega_max, "wraps": g.wraps} for g in gaps]


def _check(bands):
    if bands.failures:
        for i, msg in sorted(bands.failures.items()):
            print(f"alpha={bands.grid[i]:.6g}: {msg}", file=sys.stderr)
        raise SolverFailure(f"{len(bands.failures)} grid points failed ({bands.method})")


# ---------------------------------------------------------------- commands


def cmd_sweep(config: RunConfig, out: Path, method: str, stem: str, plots: bool):
    bands = analysis.band_sweep(config, method)
    csv_path = out / f"{stem}.csv"
    csv_path.write_text(bands_csv(bands))
    files = [csv_path.name]
    if plots:
        png = out / f"{stem}.png"
        plotting.band_figure(bands, png, analysis.detect_k_gaps(bands, config.tolerances.k_gap),
                             title=f"{config.name or 'config'} ({method})")
        files.append(png.name)
    _check(bands)
    return files


def cmd_gaps(config: RunConfig, out: Path, method: str, plots: bool):
    bands = analysis.band_sweep(config, method)
    k_gaps = analysis.detect_k_gaps(bands, config.tolerances.k_gap)
    band_gaps = analysis.detect_band_gaps(bands)
    rec = analysis.reciprocity_report(bands, config.tolerances.k_gap)
    payload = {
        "config_hash": config.config_hash,
        "method": method,
        "gaps": _band_gaps_payload(band_gaps),
        "k_gaps": _k_gaps_payload(k_gaps),
        "reciprocity": {
            "deviation": rec.deviation,
            "left_k_gap_length": rec.left_k_gap_length,
            "right_k_gap_length": rec.right_k_gap_length,
            "k_gap_asymmetry": rec.asymmetry,
            "table": rec.table,
        },
        "degenerate_points": [{"alpha": a, "omega": [w.real, w.imag]}
                              for a, w in analysis.degenerate_points(bands, config.tolerances.degeneracy)],
    }
    if method == "floquet":
        payload["max_det_error"] = analysis.max_det_error(bands)
    write_json(out / "gaps.json", payload)
    files = ["gaps.json"]
    if plots:
        plotting.band_figure(bands, out / "gaps.png", k_gaps, band_gaps, title=f"{config.name} gaps")
        files.append("gaps.png")
    _check(bands)
    return files


def cmd_compare(config: RunConfig, out: Path, plots: bool):
    exact = analysis.band_sweep(config, "exact")
    cap = analysis.band_sweep(config, "floquet")
    _check(exact)
    _check(cap)
    comp = analysis.compare_bands(exact, cap)
    write_json(out / "compare.json", {
        "config_hash": config.config_hash,
        "err_abs": comp.err_abs,
        "truncation_K": config.truncation_K,
        "alpha": list(exact.grid),
        "err_per_alpha": list(comp.per_alpha),
        "max_residual": comp.max_residual,
    })
    files = ["compare.json"]
    if plots:
        plotting.error_figure(comp, out / "compare.png")
        files.append("compare.png")
    return files


def cmd_perturbation(config: RunConfig, out: Path):
    """First-order splitting at the static crossings found on the grid."""
    points, failures = [], []
    for cross in analysis.static_crossings(config):
        alpha, cluster = cross["alpha"], cross["pair"]
        try:
            ex = m_first_order(alpha, config.chain, config.material, config.modulation)
            blk = f1_block(ex, cluster, config.tolerances.degeneracy)
        except Resona1dError as exc:
            failures.append({"alpha": alpha, "indices": list(cluster),
                             "error": f"{type(exc).__name__}: {exc}"})
            continue
        row = {
            "alpha": alpha,
            "omega_0": float(ex.folded_frequencies[cluster[0]]),
            "multiplicity": len(cluster),
            "indices": list(cluster),
            "folding_numbers": [int(m) for m in ex.aligned_folding_numbers(cluster)],
            "f1_block": [[[z.real, z.imag] for z in r] for r in blk.block],
            "first_order_shifts": [[z.real, z.imag] for z in ex.epsilon * blk.quasifrequency_shifts],
        }
        if len(cluster) == 2:
            row["gap_estimate"] = gap_size_estimate(ex, cluster)
            if ex.epsilon > 0:
                row["measured_splitting"] = measured_splitting(
                    alpha, config.chain, config.material, config.modulation, row["omega_0"])
        points.append(row)
    write_json(out / "perturbation.json", {
        "config_hash": config.config_hash,
        "epsilon": float(config.modulation.eps_kappa.max()),
        "degenerate_points": points,
        "failures": failures,
    })
    if failures and not points:
        raise SolverFailure("no degenerate point could be analysed")
    return ["perturbation.json"]


def cmd_bench(config: RunConfig, out: Path, plots: bool):
    rows = analysis.runtime_table(config)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("axis", "value", "n", "K", "exact_s", "capacitance_s"))
    for r in rows:
        w.writerow((r["axis"], r["value"], r["n"], r["K"], fmt(r["exact_s"]), fmt(r["capacitance_s"])))
    (out / "bench.csv").write_text(buf.getvalue())
    for r in rows:
        print(f"{r['axis']}={r['value']:>2}  exact {r['exact_s']:9.4f} s  capacitance {r['capacitance_s']:9.4f} s")
    files = ["bench.csv"]
    if plots:
        plotting.runtime_figure(rows, out / "bench.png")
        files.append("bench.png")
    return files


def run_command(command: str, config: RunConfig, out: Path, method: str | None = None,
                plots: bool = True) -> list:
    """Run one command and return the written file names."""
    out.mkdir(parents=True, exist_ok=True)
    method = method or config.method
    if command == "static-bands":
        files = cmd_sweep(config, out, "static", "static-bands", plots)
    elif command == "bands":
        files = cmd_sweep(config, out, method, f"bands-{method}", plots)
    elif command == "exact":
        files = cmd_sweep(config, out, "exact", "exact", plots)
    elif command == "gaps":
        files = cmd_gaps(config, out, method if method != "exact" else "floquet", plots)
    elif command == "compare":
        files = cmd_compare(config, out, plots)
    elif command == "perturbation":
        files = cmd_perturbation(config, out)
    elif command == "bench":
        files = cmd_bench(config, out, plots)
    else:
        raise ValueError(f"unknown command {command!r}")
    write_json(out / "manifest.json", {"command": command, "config_hash": config.config_hash,
                                       "config": config.raw, "files": files})
    return files


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="resona1d", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", required=True,
                   help=f"JSON config path or preset name ({', '.join(preset_names())})")
    p.add_argument("--method", choices=METHODS, help="solver route for bands and gaps")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--grid", type=int, help="number of alpha points (odd)")
    p.add_argument("--k", type=int, help="Fourier truncation K of the exact route")
    p.add_argument("--no-plots", action="store_true", help="skip PNG figures")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = parse_config(args.config)
        changes = {}
        if args.grid is not None:
            changes["alpha_grid"] = args.grid
        if args.k is not None:
            changes["truncation_K"] = args.k
        if args.method is not None:
            changes["method"] = args.method
        if changes:
            config = config.replace(**changes)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        files = run_command(args.command, config, Path(args.out), args.method, not args.no_plots)
    except (SolverFailure, Resona1dError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 1
    for f in files:
        print(Path(args.out) / f)
    return 0


if __name__ == "__main__":
    sys.exit(main())
