"""Command-line front end.

Four subcommands: run one configured experiment, run the acceptance
battery, scan a resonance phase, and sweep lifespans against data
size.  Exit status follows the verdict so shell pipelines can gate on
it.  Output locations honor KGLAB_OUT and worker counts KGLAB_WORKERS
unless the config overrides them.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .config import load_config
from .experiments import acceptance_battery, pinned_config, run_experiment
from .reports import write_report
from .resonance import phase_bound_scan

__all__ = ["main"]


def _cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    report = run_experiment(cfg)
    csv_path, json_path = write_report(report, cfg.out_dir())
    print(report.summary())
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0 if report.verdict in ("pass", "report-only") else 1


def _cmd_acceptance(args) -> int:
    ok = acceptance_battery(fast=args.fast)
    print("acceptance: " + ("all criteria pass" if ok else "FAILURES above"))
    return 0 if ok else 1


def _parse_signs(raw: str) -> tuple:
    pair = raw.strip()
    if len(pair) != 2 or any(c not in "+-" for c in pair):
        raise argparse.ArgumentTypeError("signs must be two of +/-, e.g. ++ or +-")
    return tuple(1 if c == "+" else -1 for c in pair)


def _cmd_scan_phase(args) -> int:
    mu, nu = args.signs
    out = phase_bound_scan(args.dim, mu, nu, radius=args.radius, step=args.step)
    for key in ("d", "mu", "nu", "radius", "step", "n_pairs",
                "min_abs_phase", "c_phi", "c_grad", "floor_violations"):
        print(f"{key} = {out[key]}")
    return 0 if out["floor_violations"] == 0 else 1


def _cmd_sweep_lifespan(args) -> int:
    eps = tuple(float(piece) for piece in args.eps.split(",") if piece.strip())
    if not eps:
        print("empty eps list", file=sys.stderr)
        return 2
    base = pinned_config("lifespan-sweep")
    cfg = dataclasses.replace(base, dim=args.dim, eps=eps)
    report = run_experiment(cfg)
    print(report.summary())
    for row in report.rows:
        print(f"  eps={row['eps']:g} lifespan={row['lifespan']:g} ({row['verdict']})")
    return 0 if report.verdict == "pass" else 1


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="kglab",
        description="Desk-scale measurements for a quasilinear Klein-Gordon model.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("config", help="path to a key = value experiment file")
    p_run.set_defaults(fn=_cmd_run)

    p_acc = sub.add_parser("acceptance", help="run the acceptance battery")
    group = p_acc.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true", default=True,
                       help="every criterion (default)")
    group.add_argument("--fast", action="store_true",
                       help="skip the long nonlinear sweeps")
    p_acc.set_defaults(fn=_cmd_acceptance)

    p_scan = sub.add_parser("scan-phase", help="scan one bilinear phase")
    p_scan.add_argument("--signs", type=_parse_signs, required=True,
                        help="sign pair, e.g. ++ or -+")
    p_scan.add_argument("--radius", type=float, default=8.0)
    p_scan.add_argument("--step", type=float, default=0.25)
    p_scan.add_argument("--dim", type=int, default=1, choices=(1, 2, 3))
    p_scan.set_defaults(fn=_cmd_scan_phase)

    p_sweep = sub.add_parser("sweep-lifespan", help="lifespan against data size")
    p_sweep.add_argument("--eps", required=True,
                         help="comma-separated data sizes, e.g. 0.4,0.3,0.2")
    p_sweep.add_argument("--dim", type=int, default=1, choices=(1, 2, 3))
    p_sweep.set_defaults(fn=_cmd_sweep_lifespan)

    args = parser.parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
