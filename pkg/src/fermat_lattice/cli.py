"""Command line entry point: ``fermat-lattice compute`` and ``fermat-lattice verify``."""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .linear_cycles import DEFAULT_MAX_CYCLES, ResourceCapExceeded
from .pipeline import (
    DEFAULT_MAX_MU,
    DEFAULT_MEMORY_BUDGET,
    FORMATS,
    TARGETS,
    RunConfig,
    VerificationResult,
    render,
    run,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_REFUSED = 2
EXIT_USAGE = 64


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, required=True, help="even dimension of the variety")
    p.add_argument("--d", type=int, required=True, help="degree")
    p.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
    p.add_argument("--cache", type=Path, default=None, help="cache directory (default: $FERMAT_LATTICE_CACHE)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for matrix assembly")
    p.add_argument("--max-cycles", type=int, default=DEFAULT_MAX_CYCLES)
    p.add_argument("--max-mu", type=int, default=DEFAULT_MAX_MU)
    p.add_argument("--memory-budget", type=int, default=DEFAULT_MEMORY_BUDGET, help="bytes")
    p.add_argument("-q", "--quiet", action="store_true", help="no progress on stderr")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fermat-lattice", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    compute = sub.add_parser("compute", help="compute one lattice report")
    _common(compute)
    compute.add_argument("--target", choices=TARGETS, required=True)
    ver = sub.add_parser("verify", help="compare linear and Hodge primitive lattices")
    _common(ver)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.quiet else logging.INFO,
        format="[%(name)s] %(message)s",
        stream=sys.stderr,
    )
    target = "verify" if args.command == "verify" else args.target
    try:
        cfg = RunConfig(args.n, args.d, target=target, cache_dir=args.cache, jobs=args.jobs,
                        max_cycles=args.max_cycles, max_mu=args.max_mu,
                        memory_budget=args.memory_budget, fmt=args.fmt)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        result = run(cfg)
    except ResourceCapExceeded as exc:
        print("refused: %s" % exc, file=sys.stderr)
        return EXIT_REFUSED
    print(render(result, cfg.fmt))
    if isinstance(result, VerificationResult) and not result.lists_equal:
        return EXIT_MISMATCH
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
