"""CSV report emission, run manifests, and output-directory locking."""

from __future__ import annotations

import hashlib
import json
import os
import time
from pathlib import Path

from .integrate import DIAGNOSTICS_SCHEMA


def fmt_value(x) -> str:
    """Serialize one CSV cell; floats use 17 significant digits (f64 exact)."""
    if x is None:
        return "none"
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_report_csv(rows, schema, path):
    """Write homogeneous rows under a header, newline-terminated with \\n."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(schema)]
    ncol = len(schema)
    for row in rows:
        cells = list(row)
        if len(cells) != ncol:
            raise ValueError(f"row has {len(cells)} cells, schema has {ncol}")
        lines.append(",".join(fmt_value(c) for c in cells))
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def read_report_csv(path):
    """Read back a report written by write_report_csv (header, string cells)."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    header = tuple(lines[0].split(","))
    return header, [tuple(line.split(",")) for line in lines[1:]]


def config_hash(config: dict) -> str:
    """Content hash of a fully-defaulted config document."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha1(blob).hexdigest()


def write_manifest(path, config: dict, seed: int, extra: dict | None = None):
    """Manifest carrying the echoed config, seed, and its content hash.

    The timestamp lives only here, so report CSVs stay byte-identical
    across reruns of one config.
    """
    doc = {
        "config": config,
        "seed": seed,
        "config_hash": config_hash(config),
        "created": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
    }
    if extra:
        doc.update(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


class OutDirLock:
    """Single-writer lock: parallel runs must target distinct out_dirs."""

    def __init__(self, out_dir):
        self.path = Path(out_dir) / ".lock"

    def __enter__(self):
        self.path.parent.mkdir(parents=True, exist_ok=True)
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise OSError(
                f"output directory {self.path.parent} is locked by another run "
                f"(remove {self.path} if stale)"
            )
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        return self

    def __exit__(self, *exc):
        try:
            self.path.unlink()
        except FileNotFoundError:
            pass
        return False


def write_experiment_outputs(report, out_root, config_echo: dict, seed: int):
    """Write <out>/<kind>/report.csv, criteria.csv, per-run CSVs, manifest."""
    base = Path(out_root) / report.kind
    write_report_csv(report.rows, report.schema, base / "report.csv")
    write_report_csv(
        [(c.name, c.passed, c.detail) for c in report.criteria],
        ("criterion", "passed", "detail"),
        base / "criteria.csv",
    )
    for label, rows in report.run_diagnostics.items():
        write_report_csv(
            [
                (r.t, r.hs_norm, r.l2_energy, r.kinetic_energy_alpha, r.linf_grad, r.dt_used)
                for r in rows
            ],
            DIAGNOSTICS_SCHEMA,
            base / "runs" / f"{label}.csv",
        )
    for name, (schema, rows) in report.extra_tables.items():
        write_report_csv(rows, schema, base / f"{name}.csv")
    write_manifest(
        base / "manifest.json",
        config_echo,
        seed,
        extra={"passed": report.passed, "notes": report.notes},
    )
    return base
