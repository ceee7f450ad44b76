"""Command-line surface.

Subcommands: simulate, uniform-time, zero-alpha, bona-smith,
verify-lemmas, inspect.  Exit codes: 0 success, 2 blow-up detected,
3 invalid config, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import InvalidConfigError, load_config_file
from .experiments import RUNNERS, ExperimentError
from .integrate import DIAGNOSTICS_SCHEMA, integrate
from .reports import (
    OutDirLock,
    write_experiment_outputs,
    write_manifest,
    write_report_csv,
)
from .snapshot import SnapshotError, read_snapshot, write_snapshot
from .spectral import sobolev_norm

EXIT_OK = 0
EXIT_BLOWUP = 2
EXIT_CONFIG = 3
EXIT_IO = 4

_SUBCOMMAND_KIND = {
    "simulate": "simulate",
    "uniform-time": "uniform_time",
    "zero-alpha": "zero_alpha",
    "bona-smith": "bona_smith",
    "verify-lemmas": "lemma_suite",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epalpha",
        description="Pseudospectral EP_alpha simulator and verification lab",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMAND_KIND:
        p = sub.add_parser(name, help=f"run the {name} entry point")
        p.add_argument("--config", required=True, help="JSON config path")
        p.add_argument("--out", default=None, help="output directory (overrides config)")
        p.add_argument("--seed", type=int, default=None, help="seed override")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
    p = sub.add_parser("inspect", help="print a snapshot header and its H^s norm")
    p.add_argument("snapshot", help="EPF1 snapshot path")
    p.add_argument("--s", type=float, default=0.0, help="Sobolev index for the printed norm")
    p.add_argument("--quiet", action="store_true")
    return parser


def _say(quiet: bool, *msg):
    if not quiet:
        print(*msg)


def _run_simulate(cfg, quiet: bool) -> int:
    u0 = cfg.initial_data.build(cfg.grid, cfg.params.s, cfg.seed)
    result = integrate(u0, cfg.params, "ep_alpha")
    base = Path(cfg.out_dir) / "simulate"
    with OutDirLock(cfg.out_dir):
        write_report_csv(
            [
                (r.t, r.hs_norm, r.l2_energy, r.kinetic_energy_alpha, r.linf_grad, r.dt_used)
                for r in result.rows
            ],
            DIAGNOSTICS_SCHEMA,
            base / "diagnostics.csv",
        )
        write_snapshot(result.final.u, result.final.t, result.final.alpha, base / "final.epf1")
        write_manifest(
            base / "manifest.json",
            cfg.echo,
            cfg.seed,
            extra={"blown_up": result.blown_up, "blowup_time": result.blowup_time},
        )
    if result.blown_up:
        print(
            f"blow-up detected at t={result.blowup_time:.6g}; "
            f"last state written to {base / 'final.epf1'}",
            file=sys.stderr,
        )
        return EXIT_BLOWUP
    _say(quiet, f"simulate: reached t={result.final.t:g}; outputs in {base}")
    return EXIT_OK


def _run_experiment(kind: str, cfg, quiet: bool) -> int:
    report = RUNNERS[kind](cfg.experiment_spec())
    with OutDirLock(cfg.out_dir):
        base = write_experiment_outputs(report, cfg.out_dir, cfg.echo, cfg.seed)
    for c in report.criteria:
        _say(quiet, f"[{kind}] {'PASS' if c.passed else 'FAIL'} {c.name}: {c.detail}")
    for note in report.notes:
        _say(quiet, f"[{kind}] note: {note}")
    _say(quiet, f"[{kind}] {'PASS' if report.passed else 'FAIL'} overall; report in {base}")
    return EXIT_OK


def _run_inspect(args) -> int:
    field, t, alpha = read_snapshot(args.snapshot)
    g = field.grid
    print(f"magic=EPF1 version=1 d={g.d} n={g.n} length={g.length!r}")
    print(f"time={t!r} alpha={alpha!r}")
    print(f"hs_norm(s={args.s:g}) = {sobolev_norm(field, args.s)!r}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "inspect":
            return _run_inspect(args)
        try:
            cfg = load_config_file(args.config, seed_override=args.seed, out_override=args.out)
        except OSError as err:
            print(f"error: cannot read config: {err}", file=sys.stderr)
            return EXIT_IO
        kind = _SUBCOMMAND_KIND[args.command]
        if kind != cfg.experiment:
            print(
                f"error: config names experiment {cfg.experiment!r} "
                f"but the {args.command} subcommand was invoked",
                file=sys.stderr,
            )
            return EXIT_CONFIG
        if kind == "simulate":
            return _run_simulate(cfg, args.quiet)
        return _run_experiment(kind, cfg, args.quiet)
    except InvalidConfigError as err:
        print(f"error: invalid config: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except ExperimentError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_BLOWUP
    except SnapshotError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
