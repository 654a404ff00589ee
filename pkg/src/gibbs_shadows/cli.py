"""Command-line entry point.

    gibbs-shadows <subcommand> --config <path> [--seed <u64>] [--out <dir>]
                  [--threads <k>]

Subcommands: tpq-sweep, shadow-compare, purity-scan, tpq-ensemble, qbm-train.
Exit codes: 0 success, 2 config error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .config import ConfigError, load_config
from .experiments import run_to_dir
from .qbm import TrainingDiverged

log = logging.getLogger("gibbs_shadows")

_SUBCOMMANDS = {
    "tpq-sweep": "tpq-degree-sweep",
    "shadow-compare": "shadow-compare",
    "purity-scan": "purity-scan",
    "tpq-ensemble": "tpq-ensemble",
    "qbm-train": "qbm-train",
}

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gibbs-shadows", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _SUBCOMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a key = value config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default="results", help="output directory")
        p.add_argument("--threads", type=int, default=1, help="worker threads over grid cells")
    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    expected = _SUBCOMMANDS[args.command]
    try:
        cfg = load_config(args.config)
        if cfg["experiment"] != expected:
            raise ConfigError(
                f"config declares experiment {cfg['experiment']!r} but the "
                f"{args.command} subcommand expects {expected!r}"
            )
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    seed = args.seed if args.seed is not None else cfg["seed"]
    try:
        written = run_to_dir(cfg, seed, args.out, threads=args.threads)
    except (TrainingDiverged, FloatingPointError, OverflowError, np.linalg.LinAlgError) as exc:
        log.error("numerical failure: %s", exc)
        return EXIT_NUMERICAL
    for path in written:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
