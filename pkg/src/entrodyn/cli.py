"""Command-line front end.

    entrodyn run <scenario.json>
    entrodyn validate <scenario.json>
    entrodyn demo <name>          (bundled cookbook scenario; ``demo --list``)
    entrodyn version

Exit codes: 0 success, 2 invalid scenario, 3 pipeline or I/O failure.
"""
from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .kernels import BACKEND
from .runner import PipelineError, report, run_scenario
from .scenario import ScenarioError, parse_scenario

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 2, 3


def cookbook_dir() -> Path:
    return Path(str(resources.files("entrodyn") / "cookbook"))


def cookbook() -> dict[str, Path]:
    return {p.stem: p for p in sorted(cookbook_dir().glob("*.json"))}


def _load(path):
    try:
        return parse_scenario(path), None
    except ScenarioError as exc:
        print(f"invalid scenario {path}: field '{exc.field}': {exc}", file=sys.stderr)
        return None, EXIT_INVALID
    except OSError as exc:
        print(f"cannot read scenario {path}: {exc}", file=sys.stderr)
        return None, EXIT_RUNTIME


def _run(path) -> int:
    scenario, code = _load(path)
    if scenario is None:
        return code
    try:
        result = run_scenario(scenario)
    except (PipelineError, OSError) as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    sys.stdout.write(report(result))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entrodyn", description="Entropy of classical and quantum replicator games")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("scenario")
    p = sub.add_parser("validate", help="check a scenario file without running it")
    p.add_argument("scenario")
    p = sub.add_parser("demo", help="run a bundled cookbook scenario")
    p.add_argument("name", nargs="?")
    p.add_argument("--list", action="store_true", help="list the bundled scenarios")
    sub.add_parser("version", help="print the version")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "version":
        print(f"entrodyn {__version__} (kernels: {BACKEND})")
        return EXIT_OK
    if args.command == "validate":
        scenario, code = _load(args.scenario)
        if scenario is None:
            return code
        print(f"ok: {scenario.kind} scenario '{scenario.name}'")
        return EXIT_OK
    if args.command == "run":
        return _run(args.scenario)
    book = cookbook()
    if args.list or not args.name:
        print("\n".join(book))
        return EXIT_OK
    if args.name not in book:
        print(f"unknown demo {args.name!r}; available: {', '.join(book)}", file=sys.stderr)
        return EXIT_INVALID
    return _run(book[args.name])


if __name__ == "__main__":
    sys.exit(main())
