"""Deterministic serialization of configs, reports, and tables.

Everything except the run manifest is written without timestamps or other
environment-dependent content, so reruns with the same seeds produce byte
identical files.  Floats are rendered with ``repr``, the shortest exact
round-trip form.
"""

import datetime
import json
import os
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .errors import ParameterError

CSV_SCHEMAS = {
    "samples": ("trial", "i", "j", "value"),
    "eigenvalues": ("trial", "index", "re", "im"),
    "singulars": ("trial", "index", "value"),
    "distances": ("trial", "k", "distance"),
    "measure": ("index", "re", "im", "weight"),
}


def jsonable(obj):
    """Recursively reduce an object to JSON-ready python primitives."""
    if obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, payload) -> None:
    """Canonical JSON: sorted keys, two-space indent, trailing newline."""
    with open(path, "w") as fh:
        json.dump(jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _cell(value, as_int: bool) -> str:
    if as_int:
        return str(int(value))
    return repr(float(value))


def write_table(path, columns, rows, int_columns=(), fmt: str = "csv") -> None:
    """Write a table as CSV, or as a columns/rows JSON document.

    ``int_columns`` names columns rendered as integers; everything else is a
    float in shortest round-trip form.
    """
    flags = [c in int_columns for c in columns]
    if fmt == "csv":
        lines = [",".join(columns)]
        for row in rows:
            lines.append(",".join(_cell(v, f) for v, f in zip(row, flags)))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    elif fmt == "json":
        payload = {
            "columns": list(columns),
            "rows": [[int(v) if f else float(v) for v, f in zip(row, flags)]
                     for row in rows],
        }
        write_json(path, payload)
    else:
        raise ParameterError(f"unknown table format {fmt!r}")


def table_path(directory, stem: str, fmt: str) -> str:
    return os.path.join(directory, f"{stem}.{'csv' if fmt == 'csv' else 'json'}")


def write_measure(path, measure, fmt: str = "csv") -> None:
    """Atom table of an empirical measure: index, re, im, weight."""
    positions = np.asarray(measure.positions, dtype=complex)
    rows = [(i, z.real, z.imag, w)
            for i, (z, w) in enumerate(zip(positions, measure.weights))]
    write_table(path, CSV_SCHEMAS["measure"], rows, int_columns=("index",), fmt=fmt)


def config_flat(config) -> dict:
    """Flat key/value form of an ExperimentConfig, mirroring the CLI flags."""
    return {
        "ensemble": config.ensemble.family,
        "n": config.ensemble.n,
        "p": config.ensemble.p,
        "z": [config.shift.z.real, config.shift.z.imag],
        "trials": config.trials,
        "seed": config.master_seed,
        "n_list": list(config.n_list),
        "gamma": config.gamma,
        "alpha": config.alpha,
        "delta": config.delta,
        "rho_comp": config.rho_comp,
        "k_grid": list(config.k_grid),
    }


def report_payload(report) -> dict:
    """JSON document for one suite report: name, config echo, records,
    summary, verdict."""
    return {
        "name": report.name,
        "config": config_flat(report.config),
        "records": jsonable(report.records),
        "summary": jsonable(report.summary),
        "violations": int(report.violations),
        "excluded": int(report.excluded),
        "verdict": report.verdict,
    }


def write_report(path, report) -> None:
    write_json(path, report_payload(report))


def potentials_payload(report) -> list:
    """Potential comparisons of a circular-law report, one row per (n, z)."""
    rows = []
    for n, entry in report.summary["sizes"].items():
        for pot in entry.get("potentials", ()):
            rows.append({
                "z_re": pot["z_re"], "z_im": pot["z_im"],
                "U_n": pot["U_n_mean"], "U_theory": pot["U_theory"],
                "mean_log_singulars": pot["mean_log_mean"],
                "n": int(n),
                "ensemble": report.config.ensemble.family,
                "seed": report.config.master_seed,
            })
    return rows


@dataclass(eq=False)
class RunManifest:
    """Provenance of one CLI run.  The only artifact with a timestamp."""

    command: str
    config: dict
    outputs: list
    master_seed: int
    outdir: str = ""
    package_version: str = __version__
    created_at: str = field(
        default_factory=lambda: datetime.datetime.now(
            datetime.timezone.utc).isoformat())


def write_manifest(path, manifest: RunManifest) -> None:
    write_json(path, {
        "command": manifest.command,
        "config": manifest.config,
        "outputs": sorted(manifest.outputs),
        "master_seed": manifest.master_seed,
        "outdir": manifest.outdir,
        "package_version": manifest.package_version,
        "created_at": manifest.created_at,
    })
