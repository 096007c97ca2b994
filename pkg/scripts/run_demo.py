#!/usr/bin/env python3
"""Run the three bundled governance scenarios and print their effect traces."""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from agora import (  # noqa: E402
    compile_policy,
    load_policy,
    load_scenario,
    run_scenario,
    snapshot,
    stdlib_registry,
    trace_to_ldjson,
)

RUNS = [
    ("jury approval for renaming #general", "policy_jury_rename",
     "scenario_jury_rename"),
    ("channel membership: unanimous yes", "policy_channel_membership",
     "scenario_membership_pass"),
    ("channel membership: one no", "policy_channel_membership",
     "scenario_membership_fail"),
    ("ranked election of a community admin", "policy_admin_election",
     "scenario_admin_election"),
]


def main() -> int:
    registry = stdlib_registry()
    fixtures = ROOT / "fixtures"
    for title, policy_name, scenario_name in RUNS:
        doc = load_policy((fixtures / f"{policy_name}.json").read_text())
        script = load_scenario((fixtures / f"{scenario_name}.json").read_text())
        executable = compile_policy(doc, registry, snapshot(script.initial))
        trace, final = run_scenario(script, [executable], registry)
        print(f"=== {title} ===")
        print(trace_to_ldjson(trace), end="")
        print(f"--- final clock: {final.clock} ms, messages: {len(final.messages)}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
