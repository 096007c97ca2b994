"""Command-line interface: validate, compile, simulate, serve, export-stdlib."""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from .community import CommunityState, load_community, snapshot
from .compiler import compile_policy, render_source
from .engine import trace_to_ldjson
from .errors import AgoraError
from .policy import load_policy, validate_policy
from .registry import Registry, load_library
from .scenario import load_scenario, run_scenario
from .stdlib import stdlib_json, stdlib_registry

LIBRARY_ENV = "PIKA_LIBRARY"  # overrides the built-in library path


def _load_registry(library_arg: Optional[str]) -> Registry:
    path = library_arg or os.environ.get(LIBRARY_ENV)
    if path:
        return load_library(Path(path).read_text(encoding="utf-8"))
    return stdlib_registry()


def _load_snapshot(community_arg: Optional[str]):
    if community_arg is None:
        return None
    return snapshot(load_community(Path(community_arg).read_text(encoding="utf-8")))


def _cmd_validate(args) -> int:
    registry = _load_registry(args.library)
    doc = load_policy(Path(args.policy).read_text(encoding="utf-8"))
    report = validate_policy(doc, registry, _load_snapshot(args.community))
    for diag in report.diagnostics:
        print(f"{diag.path}: {diag.code}: {diag.message}")
    if report.ok:
        print(f"{doc.id}: ok")
        return 0
    return 1


def _cmd_compile(args) -> int:
    registry = _load_registry(args.library)
    doc = load_policy(Path(args.policy).read_text(encoding="utf-8"))
    rendered = render_source(doc, registry, _load_snapshot(args.community))
    sys.stdout.write(rendered.text)
    return 0


def _cmd_simulate(args) -> int:
    registry = _load_registry(args.library)
    script = load_scenario(Path(args.scenario).read_text(encoding="utf-8"))
    validation_community = snapshot(script.initial)
    policies = []
    for path in args.policy:
        doc = load_policy(Path(path).read_text(encoding="utf-8"))
        policies.append(compile_policy(doc, registry, validation_community))
    trace, _final = run_scenario(script, policies, registry, seed=args.seed)
    sys.stdout.write(trace_to_ldjson(trace))
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    registry = _load_registry(args.library)
    community = CommunityState()
    if args.community:
        community = load_community(Path(args.community).read_text(encoding="utf-8"))
    serve(host=args.host, port=args.port, registry=registry, community=community,
          seed=args.seed)
    return 0


def _cmd_export_stdlib(args) -> int:
    text = stdlib_json()
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agora",
        description="Author, validate, compile, and simulate governance policies.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a policy document")
    p.add_argument("policy")
    p.add_argument("--library", help="library JSON path (default: built-in)")
    p.add_argument("--community", help="community JSON for entity existence checks")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("compile", help="print the rendered source of a policy")
    p.add_argument("policy")
    p.add_argument("--library")
    p.add_argument("--community")
    p.set_defaults(func=_cmd_compile)

    p = sub.add_parser("simulate", help="run a scenario script against policies")
    p.add_argument("--scenario", required=True)
    p.add_argument("--policy", action="append", default=[],
                   help="policy JSON path (repeatable)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the scenario seed")
    p.add_argument("--library")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--library")
    p.add_argument("--community")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("export-stdlib", help="print the built-in library as JSON")
    p.add_argument("-o", "--output")
    p.set_defaults(func=_cmd_export_stdlib)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except AgoraError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
