"""Command line interface.

Exit codes: 0 when the requested suites pass, 1 when a suite fails or a
decomposition breaks down irrecoverably, 2 for usage errors.  Usage errors
are detected before any output file is created.
"""

import argparse
import json
import math
import os
import sys
from dataclasses import replace

import numpy as np

from .ensembles import DEFAULT_CACHE, FAMILIES, EnsembleSpec, sample_matrix
from .errors import DecompositionError, ParameterError
from .experiments import (ExperimentConfig, FAIL, run_circular_law,
                          run_distance_subspace, run_operator_norm,
                          run_small_sv_counts, run_smallest_sv,
                          run_stieltjes_concentration, run_tail_suite,
                          trial_seed)
from .measures import from_points
from .reporting import (CSV_SCHEMAS, RunManifest, config_flat,
                        potentials_payload, report_payload, table_path,
                        write_json, write_manifest, write_table)
from .spectral import ShiftSpec, eigenvalues
from . import figures

_CONFIG_KEYS = ("ensemble", "n", "p", "z", "trials", "seed", "n_list",
                "gamma", "alpha", "delta", "rho_comp", "k_grid")

_DEFAULTS = {
    "ensemble": "ginibre", "n": 128, "p": 2.0, "z": [0.0, 0.0],
    "trials": 8, "seed": 0, "n_list": None,
    "gamma": 0.5, "alpha": 0.05, "delta": 0.1, "rho_comp": 0.1,
    "k_grid": [0.25, 0.5, 0.75],
}


def _parse_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ParameterError(f"expected a number (got {text!r})")


def _parse_z(value) -> complex:
    if isinstance(value, str):
        parts = [p for p in value.split(",") if p != ""]
        if len(parts) not in (1, 2):
            raise ParameterError(f"z must be 're' or 're,im' (got {value!r})")
        return complex(_parse_float(parts[0]),
                       _parse_float(parts[1]) if len(parts) == 2 else 0.0)
    if isinstance(value, (int, float)):
        return complex(value)
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    raise ParameterError(f"z must be a number or [re, im] (got {value!r})")


def _parse_numbers(value, kind, name):
    if isinstance(value, str):
        value = [p for p in value.split(",") if p != ""]
    if not isinstance(value, (list, tuple)) or not value:
        raise ParameterError(f"{name} must be a nonempty list (got {value!r})")
    try:
        return [kind(v) for v in value]
    except (TypeError, ValueError):
        raise ParameterError(f"{name} holds a non-numeric entry: {value!r}")


def _check_p(value) -> float:
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return math.inf
        value = _parse_float(value)
    p = float(value)
    if math.isnan(p) or p < 1.0:
        raise ParameterError(f"invalid p: log-concavity requires p >= 1 (got {p})")
    return p


def build_config(values: dict) -> ExperimentConfig:
    """ExperimentConfig from a flat key/value mapping (defaults filled in)."""
    merged = dict(_DEFAULTS)
    merged.update({k: v for k, v in values.items() if v is not None})
    z = _parse_z(merged["z"])
    ensemble = EnsembleSpec(family=str(merged["ensemble"]),
                            n=int(merged["n"]),
                            p=_check_p(merged["p"]),
                            seed=0)
    n_list = merged["n_list"]
    if n_list is not None:
        n_list = tuple(_parse_numbers(n_list, int, "n_list"))
    return ExperimentConfig(
        ensemble=ensemble,
        shift=ShiftSpec(z=z),
        trials=int(merged["trials"]),
        n_list=n_list or (),
        gamma=float(merged["gamma"]),
        alpha=float(merged["alpha"]),
        delta=float(merged["delta"]),
        rho_comp=float(merged["rho_comp"]),
        k_grid=tuple(_parse_numbers(merged["k_grid"], float, "k_grid")),
        master_seed=int(merged["seed"]),
    )


def parse_config(path) -> ExperimentConfig:
    """Read a flat JSON config file; unknown keys are rejected by name."""
    return build_config(_load_config_dict(path))


def emit_config(config: ExperimentConfig) -> dict:
    """Flat dict that reparses to the same config (round-trip form)."""
    return config_flat(config)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmlab",
        description="log-concave matrix ensembles and their spectral checks")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "sample": "draw matrices and dump their entries",
        "spectrum": "eigenvalues of sampled matrices, with a scatter",
        "circlaw": "eigenvalue cloud against the uniform disc law",
        "singvals": "operator norm, smallest and intermediate singular values",
        "subspace": "row-to-subspace distance profile",
        "concentration": "Cauchy transform concentration across sizes",
        "tails": "entry tail, small-ball, and domination checks",
        "report": "run every suite and write a combined report",
    }
    for name, help_text in commands.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", default=None,
                        help="JSON file of flat config keys")
        sp.add_argument("--ensemble", choices=FAMILIES, default=None)
        sp.add_argument("--n", type=int, default=None)
        sp.add_argument("--n-list", dest="n_list", default=None,
                        help="comma separated sizes, e.g. 128,256,512")
        sp.add_argument("--p", default=None,
                        help="ball exponent, a number >= 1 or 'inf'")
        sp.add_argument("--z", default=None, help="shift point 're' or 're,im'")
        sp.add_argument("--trials", type=int, default=None)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--gamma", type=float, default=None)
        sp.add_argument("--alpha", type=float, default=None)
        sp.add_argument("--delta", type=float, default=None)
        sp.add_argument("--k-grid", dest="k_grid", default=None,
                        help="comma separated fractions in (0, 1)")
        sp.add_argument("--out", default="rmlab_out")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--plot", choices=("none", "svg"), default="svg")
    return parser


def _load_config_dict(path) -> dict:
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"config {path} is not valid JSON: {exc}")
    if not isinstance(raw, dict):
        raise ParameterError("config must be a JSON object of flat keys")
    unknown = sorted(set(raw) - set(_CONFIG_KEYS))
    if unknown:
        raise ParameterError(
            f"unknown config key(s) {', '.join(unknown)}; "
            f"expected a subset of {', '.join(_CONFIG_KEYS)}")
    return raw


def _config_from_args(args) -> ExperimentConfig:
    values = _load_config_dict(args.config) if args.config is not None else {}
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    return build_config(values)


class _Writer:
    """Collects output paths for the manifest as files are written."""

    def __init__(self, outdir: str, fmt: str, plot: str):
        self.outdir = outdir
        self.fmt = fmt
        self.plot = plot
        self.outputs = []
        os.makedirs(outdir, exist_ok=True)

    def path(self, name: str) -> str:
        self.outputs.append(name)
        return os.path.join(self.outdir, name)

    def table(self, stem: str, columns, rows, int_columns):
        name = f"{stem}.{'csv' if self.fmt == 'csv' else 'json'}"
        write_table(os.path.join(self.outdir, name), columns, rows,
                    int_columns=int_columns, fmt=self.fmt)
        self.outputs.append(name)

    def want_plots(self) -> bool:
        return self.plot == "svg"


def _finish(args, writer: _Writer, config: ExperimentConfig) -> None:
    if DEFAULT_CACHE.entries():
        # persist the isotropy scales used by this run next to its outputs
        DEFAULT_CACHE.save(writer.path("calibration.json"))
    manifest = RunManifest(
        command="rmlab " + args.command,
        config=emit_config(config),
        outputs=list(writer.outputs),
        master_seed=config.master_seed,
        outdir=writer.outdir)
    write_manifest(os.path.join(writer.outdir, "manifest.json"), manifest)


def _exit_code(*reports) -> int:
    return 1 if any(r.verdict == FAIL for r in reports) else 0


def _cmd_sample(args, config, writer) -> int:
    rows = []
    n = config.ensemble.n
    ii, jj = np.indices((n, n))
    for t in range(config.trials):
        spec = replace(config.ensemble,
                       seed=trial_seed(config.master_seed, n, t))
        A = sample_matrix(spec)
        rows.append(np.column_stack([
            np.full(n * n, t, dtype=float), ii.ravel(), jj.ravel(), A.ravel()]))
    writer.table("samples", CSV_SCHEMAS["samples"], np.vstack(rows),
                 int_columns=("trial", "i", "j"))
    print(f"[sample] wrote {config.trials} draws of size {n}")
    return 0


def _cmd_spectrum(args, config, writer) -> int:
    n = config.ensemble.n
    rows, pooled = [], []
    for t in range(config.trials):
        spec = replace(config.ensemble,
                       seed=trial_seed(config.master_seed, n, t))
        eigs = eigenvalues(sample_matrix(spec)).eigenvalues
        rows.append(np.column_stack([
            np.full(n, t, dtype=float), np.arange(n, dtype=float),
            eigs.real, eigs.imag]))
        pooled.append(eigs / math.sqrt(n))
    writer.table("eigenvalues", CSV_SCHEMAS["eigenvalues"], np.vstack(rows),
                 int_columns=("trial", "index"))
    if writer.want_plots():
        cloud = from_points(np.concatenate(pooled), "complex_plane")
        figures.emit_scatter_svg(cloud, writer.path("scatter.svg"))
    print(f"[spectrum] wrote eigenvalues for {config.trials} draws of size {n}")
    return 0


def _cmd_circlaw(args, config, writer) -> int:
    report = run_circular_law(config)
    write_json(writer.path("report.json"), report_payload(report))
    write_json(writer.path("potentials.json"), potentials_payload(report))
    n_big = config.n_list[-1]
    eig_key = f"eigenvalues_n{n_big}"
    if eig_key in report.arrays:
        writer.table("eigenvalues", CSV_SCHEMAS["eigenvalues"],
                     report.arrays[eig_key], int_columns=("trial", "index"))
    if writer.want_plots():
        pooled = report.arrays.get(f"pooled_eigenvalues_n{n_big}")
        if pooled is not None:
            cloud = from_points(pooled, "complex_plane")
            figures.emit_scatter_svg(cloud, writer.path("scatter.svg"))
        grid_cdf = report.arrays.get(f"radial_cdf_n{n_big}")
        if grid_cdf is not None:
            figures.radial_cdf_figure(grid_cdf[:, 0], grid_cdf[:, 1],
                                      writer.path("radial_cdf.svg"))
    print(f"[circlaw] verdict: {report.verdict}")
    return _exit_code(report)


def _cmd_singvals(args, config, writer) -> int:
    smallest = run_smallest_sv(config)
    counts = run_small_sv_counts(config)
    opnorm = run_operator_norm(config)
    combined_verdict = FAIL if any(
        r.verdict == FAIL for r in (smallest, counts, opnorm)) else smallest.verdict
    n_big = config.n_list[-1]
    scans = smallest.arrays.get(f"scan_n{n_big}")
    hist = None
    if scans is not None and scans.size:
        counts_arr, edges = np.histogram(scans, bins=20)
        hist = {"bin_edges": edges.tolist(), "counts": counts_arr.tolist()}
    write_json(writer.path("report.json"), {
        "name": "singular_value_bounds",
        "config": emit_config(config),
        "suites": [report_payload(r) for r in (smallest, counts, opnorm)],
        "smallest_scan_histogram": hist,
        "verdict": combined_verdict,
    })
    key = f"singulars_n{n_big}"
    if key in smallest.arrays:
        writer.table("singulars", CSV_SCHEMAS["singulars"],
                     smallest.arrays[key], int_columns=("trial", "index"))
    if writer.want_plots():
        if scans is not None and scans.size:
            figures.histogram_figure(
                scans, writer.path("smallest_scan_hist.svg"),
                xlabel="sqrt(n) * smallest singular value (unnormalized shift)")
    for r in (smallest, counts, opnorm):
        print(f"[singvals] {r.name}: {r.verdict}")
    return _exit_code(smallest, counts, opnorm)


def _cmd_subspace(args, config, writer) -> int:
    report = run_distance_subspace(config)
    write_json(writer.path("report.json"), report_payload(report))
    n_big = config.n_list[-1]
    key = f"distances_n{n_big}"
    if key in report.arrays:
        writer.table("distances", CSV_SCHEMAS["distances"],
                     report.arrays[key], int_columns=("trial", "k"))
    if writer.want_plots():
        ratios_by_k = {}
        for rec in report.records:
            if "error" in rec or rec["n"] != n_big:
                continue
            for d in rec["distances"]:
                ratios_by_k.setdefault(d["k"], []).append(d["ratio"])
        if ratios_by_k:
            figures.ratio_figure(ratios_by_k, writer.path("distance_ratios.svg"))
    print(f"[subspace] verdict: {report.verdict}")
    return _exit_code(report)


def _cmd_concentration(args, config, writer) -> int:
    report = run_stieltjes_concentration(config)
    write_json(writer.path("report.json"), report_payload(report))
    if writer.want_plots():
        pairs = [(n, entry["std"]) for n, entry in report.summary["sizes"].items()
                 if "std" in entry]
        if pairs:
            pairs.sort()
            figures.decay_figure([p[0] for p in pairs], [p[1] for p in pairs],
                                 writer.path("concentration_decay.svg"))
    print(f"[concentration] verdict: {report.verdict}")
    return _exit_code(report)


def _cmd_tails(args, config, writer) -> int:
    report = run_tail_suite(config)
    write_json(writer.path("report.json"), report_payload(report))
    if writer.want_plots():
        table = report.arrays.get("laplace_survival")
        slope_rec = next(r for r in report.records if r["check"] == "laplace_slope")
        if table is not None and table.size:
            figures.tail_figure(table[:, 0], table[:, 1], slope_rec["slope"],
                                slope_rec["intercept"], writer.path("tail_fit.svg"))
    print(f"[tails] verdict: {report.verdict}")
    return _exit_code(report)


def _cmd_report(args, config, writer) -> int:
    reports = {
        "circular_law": run_circular_law(config),
        "smallest_singular_value": run_smallest_sv(config),
        "small_sv_counts": run_small_sv_counts(config),
        "operator_norm": run_operator_norm(config),
        "distance_subspace": run_distance_subspace(config),
        "stieltjes_concentration": run_stieltjes_concentration(config),
        "tail_suite": run_tail_suite(config),
    }
    for name, report in reports.items():
        write_json(writer.path(f"report_{name}.json"), report_payload(report))
        print(f"[report] {name}: {report.verdict}")
    circ = reports["circular_law"]
    n_big = config.n_list[-1]
    if f"eigenvalues_n{n_big}" in circ.arrays:
        writer.table("eigenvalues", CSV_SCHEMAS["eigenvalues"],
                     circ.arrays[f"eigenvalues_n{n_big}"],
                     int_columns=("trial", "index"))
    write_json(writer.path("potentials.json"), potentials_payload(circ))
    key = f"singulars_n{n_big}"
    if key in reports["smallest_singular_value"].arrays:
        writer.table("singulars", CSV_SCHEMAS["singulars"],
                     reports["smallest_singular_value"].arrays[key],
                     int_columns=("trial", "index"))
    if f"distances_n{n_big}" in reports["distance_subspace"].arrays:
        writer.table("distances", CSV_SCHEMAS["distances"],
                     reports["distance_subspace"].arrays[f"distances_n{n_big}"],
                     int_columns=("trial", "k"))
    if writer.want_plots():
        pooled = circ.arrays.get(f"pooled_eigenvalues_n{n_big}")
        if pooled is not None:
            figures.emit_scatter_svg(from_points(pooled, "complex_plane"),
                                     writer.path("scatter.svg"))
        grid_cdf = circ.arrays.get(f"radial_cdf_n{n_big}")
        if grid_cdf is not None:
            figures.radial_cdf_figure(grid_cdf[:, 0], grid_cdf[:, 1],
                                      writer.path("radial_cdf.svg"))
        conc = reports["stieltjes_concentration"]
        pairs = sorted((n, e["std"]) for n, e in conc.summary["sizes"].items()
                       if "std" in e)
        if pairs:
            figures.decay_figure([p[0] for p in pairs], [p[1] for p in pairs],
                                 writer.path("concentration_decay.svg"))
    index = {name: report.verdict for name, report in reports.items()}
    overall = FAIL if any(r.verdict == FAIL for r in reports.values()) else "pass"
    index["overall"] = overall
    write_json(writer.path("index.json"), index)
    print(f"[report] overall: {overall}")
    return _exit_code(*reports.values())


_COMMANDS = {
    "sample": _cmd_sample,
    "spectrum": _cmd_spectrum,
    "circlaw": _cmd_circlaw,
    "singvals": _cmd_singvals,
    "subspace": _cmd_subspace,
    "concentration": _cmd_concentration,
    "tails": _cmd_tails,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return 0 if code == 0 else 2
    try:
        config = _config_from_args(args)
    except (ParameterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    writer = _Writer(args.out, args.format, args.plot)
    try:
        code = _COMMANDS[args.command](args, config, writer)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DecompositionError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    _finish(args, writer, config)
    return code


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
