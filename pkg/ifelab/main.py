"""
Command-line entry point.

    python -m ifelab check    --config scenario.json [--tmax T] [--samples N] ...
    python -m ifelab search   --config scenario.json
    python -m ifelab evolve   --config scenario.json --out runs/
    python -m ifelab generate two_qubit_xy --params '{"omega_a": 1.0, ...}' --out gen/

Exit codes: 0 all requested assertions hold, 1 a verdict assertion failed,
2 input, capacity or I/O error.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from config.settings import LOG_LEVEL, WORKERS
from ifelab import __version__
from ifelab.cli.cli_commands import cmd_check, cmd_evolve, cmd_generate, cmd_search
from ifelab.cli.cli_config import apply_overrides, load_config
from ifelab.cli.cli_report import Report, render_text, write_report
from ifelab.core.errors import IfeLabError

logger = logging.getLogger("ifelab")

EXIT_OK, EXIT_VERDICT, EXIT_INPUT = 0, 1, 2


def _scenario_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", required=True, help="scenario JSON file")
    parent.add_argument("--tmax", type=float, help="grid end time (overrides the scenario)")
    parent.add_argument("--samples", type=int, help="number of grid samples, ≥ 2")
    parent.add_argument("--tol", type=float, help="verdict tolerance")
    parent.add_argument("--kmax", type=int, help="highest trace power / recipe order")
    parent.add_argument("--seed", type=int, help="seed for random draws")
    return parent


def _output_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--out", type=Path, help="directory for report.json and generated files")
    parent.add_argument("--format", choices=["json", "text"], default="json", help="stdout format")
    parent.add_argument("--workers", type=int, default=WORKERS, help="worker threads")
    parent.add_argument("--verbose", action="store_true", help="debug logging")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ifelab", description="IFE / GIFE / DFS checks for bipartite Hamiltonians.")
    parser.add_argument("--version", action="version", version=f"ifelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    scenario, output = _scenario_flags(), _output_flags()

    sub.add_parser("check", parents=[scenario, output], help="IFE and GIFE verdicts per state")
    sub.add_parser("search", parents=[scenario, output], help="maximal GIFE supports in the eigenbasis")
    sub.add_parser("evolve", parents=[scenario, output], help="write functional and Schmidt trajectories")
    generate = sub.add_parser("generate", parents=[output], help="write a family Hamiltonian and metadata")
    generate.add_argument("family", help="family name, e.g. two_qubit_xy")
    generate.add_argument("--params", default="{}", help="JSON object of family parameters")
    return parser


def _run(args: argparse.Namespace) -> Report:
    out: Optional[Path] = args.out
    if args.command == "generate":
        params = json.loads(args.params)
        if not isinstance(params, dict):
            raise ValueError("--params must be a JSON object")
        return cmd_generate(args.family, params, out or Path("."))

    config = apply_overrides(load_config(args.config), t_max=args.tmax, samples=args.samples,
                             tolerance=args.tol, k_max=args.kmax, seed=args.seed)
    if args.command == "check":
        return cmd_check(config, workers=args.workers)
    if args.command == "search":
        return cmd_search(config, workers=args.workers)
    return cmd_evolve(config, out or Path("."), workers=args.workers)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else LOG_LEVEL,
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        stream=sys.stderr,
    )
    try:
        report = _run(args)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            write_report(report, args.out)
    # pydantic ValidationError and JSONDecodeError are ValueErrors
    except (IfeLabError, ValueError, OSError) as e:
        logger.error(f"[CLI] {type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT

    print(report.model_dump_json(indent=2) if args.format == "json" else render_text(report))
    return EXIT_OK if report.ok else EXIT_VERDICT


if __name__ == "__main__":
    raise SystemExit(main())
