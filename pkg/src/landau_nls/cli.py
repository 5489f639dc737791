"""Command-line entry point: ``landau-nls <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys

from . import experiments as ex
from .solvers import NumericalAbort

log = logging.getLogger("landau_nls")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ABORT = 3
EXIT_THRESHOLD = 4

COMMANDS = {
    "check-basis": lambda cfg, a: ex.check_basis(cfg),
    "simulate-full": lambda cfg, a: ex.simulate(cfg, "full", a.eps),
    "simulate-averaged": lambda cfg, a: ex.simulate(cfg, "averaged"),
    "convergence-sweep": lambda cfg, a: ex.convergence_sweep(cfg),
    "level-invariance": lambda cfg, a: ex.level_invariance(cfg),
    "lll-compare": lambda cfg, a: ex.lll_compare(cfg),
    "conservation-audit": lambda cfg, a: ex.conservation_audit(cfg),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON file mirroring ExperimentConfig")
    common.add_argument("--scenario", choices=ex.SCENARIOS,
                        help="preset to start from (default: standard, or the file's value)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides out_dir)")
    common.add_argument("--threads", type=int, metavar="N",
                        help="worker processes for independent trajectories")
    common.add_argument("--seed", type=int, metavar="S", help="seed for random fields")
    common.add_argument("--T", type=float, dest="T", metavar="T", help="final time")
    common.add_argument("--audit", action="store_true",
                        help="exit with status 4 when an acceptance threshold fails")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="landau-nls",
        description="Confined NLS in a strong magnetic field and its averaged limit.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, parents=[common])
        if name == "simulate-full":
            p.add_argument("--eps", type=float, help="epsilon (default: first of eps_list)")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = ex.load_config(args.config, args.scenario, out_dir=args.out,
                             threads=args.threads, seed=args.seed, T=args.T)
        if args.command == "simulate-full" and args.eps is not None and not 0 < args.eps <= 1:
            raise ex.ConfigError("--eps must lie in (0, 1]")
        report = COMMANDS[args.command](cfg, args)
    except ex.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalAbort as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_ABORT

    out = report.write(cfg.out_dir)
    log.info("wrote %s", out)
    for key, ok in report.checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {key}")
    if args.command == "convergence-sweep":
        s = report.summary
        print(f"slope {s.get('slope')} ({s.get('slope_status')})")
        if any("abort" in p for p in s.get("per_eps", [])):
            return EXIT_ABORT
    if args.audit and not report.passed:
        return EXIT_THRESHOLD
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
