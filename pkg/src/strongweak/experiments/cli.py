"""Command-line entry point: ``strongweak <subcommand> --config FILE [options]``."""
from __future__ import annotations

import argparse
import logging
import sys

from ..errors import StrongWeakError
from .config import ExperimentKind, load_config
from .output import write_outputs
from .runners import run

log = logging.getLogger("strongweak")

_SUBCOMMANDS = {k.value: k for k in ExperimentKind}


def _r_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(t) for t in text.replace(",", " ").split())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad r list {text!r}") from exc


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="strongweak", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="experiment configuration file")
        p.add_argument("--seed", type=_u64, help="override the configured seed")
        p.add_argument("--out", help="output directory (default: output_dir from the config)")
        p.add_argument("--threads", type=int, help="worker threads for replications")
        p.add_argument("--reps", type=int, help="override the number of replications")
        p.add_argument("--r", type=_r_list, help="override r values, e.g. '10,20,40'")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config)
        kind = _SUBCOMMANDS[args.command]
        if cfg.experiment is not kind:
            log.info("running config of type %s as %s", cfg.experiment.value, kind.value)
        cfg = cfg.with_overrides(experiment=kind, seed=args.seed, threads=args.threads,
                                 replications=args.reps, r_values=args.r)
        result = run(cfg)
        out = write_outputs(result, args.out or cfg.output_dir)
    except (StrongWeakError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    log.info("wrote %s in %.1f s", out, result.timing.get("wall_seconds", 0.0))
    return 0


if __name__ == "__main__":
    sys.exit(main())
