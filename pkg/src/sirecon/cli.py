"""Batch front end: run / sweep / verify.

Exit codes: 0 success (run converged, all checks pass), 1 usage or config
error, 2 run did not converge, 3 failed verification checks.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .checks import run_all
from .config import ConfigError, parse_config


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="sirecon",
                     description="Reconstruction from nonuniform average samples "
                                 "in shift-invariant spaces")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="reconstruct one seeded experiment")
    run.add_argument("-c", "--config", required=True)
    run.add_argument("--out", default=None, help="output directory override")
    run.add_argument("--seed", type=int, default=None, help="seed override")

    sweep = sub.add_parser("sweep", help="cartesian parameter sweep")
    sweep.add_argument("-c", "--config", required=True)
    sweep.add_argument("--gamma", type=float, nargs="+", required=True)
    sweep.add_argument("--a", type=float, nargs="+", required=True)
    sweep.add_argument("--p", type=float, nargs="+", default=None)
    sweep.add_argument("--q", type=float, nargs="+", default=None)
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("--out", default=None)
    sweep.add_argument("--seed", type=int, default=None)

    verify = sub.add_parser("verify", help="run every invariant suite")
    verify.add_argument("-c", "--config", required=True)
    verify.add_argument("--inject-fault", default=None, choices=["bupu"],
                        help="test hook: corrupt a component before checking")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1

    try:
        cfg = parse_config(args.config)
    except ConfigError as exc:
        print(exc, file=sys.stderr)
        return 1

    if args.command == "run":
        from .runner import run_experiment
        outdir = Path(args.out) if args.out else Path(cfg.output)
        code, doc = run_experiment(cfg, outdir, seed=args.seed)
        print(f"status={doc['status']} iterations={doc['iterations_run']} "
              f"alpha_fit={doc['alpha_fit']:.4g} out={outdir}")
        return code

    if args.command == "sweep":
        from .runner import run_sweep
        if not args.gamma or not args.a:
            print("usage error: sweep axes must be nonempty", file=sys.stderr)
            return 1
        ps = args.p if args.p else [cfg.exponents.p]
        qs = args.q if args.q else [cfg.exponents.q]
        outdir = Path(args.out) if args.out else Path(cfg.output) / "sweep"
        seed_cfg = cfg if args.seed is None else replace(cfg, seed=args.seed)
        code, rows = run_sweep(seed_cfg, args.gamma, args.a, ps, qs, outdir,
                               workers=args.workers)
        done = sum(1 for r in rows if r["converged"])
        print(f"sweep: {len(rows)} combinations, {done} converged, out={outdir}")
        return code

    # verify
    results = run_all(cfg, inject_fault=args.inject_fault, stream=sys.stdout)
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    if failed:
        print("failed: " + ", ".join(r.name for r in failed))
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
