"""Scenario scripts: deterministic replayable runs against the engine.

A script carries a seed, an initial community, and time-ordered steps (action
events, votes by ordinal proposal reference, explicit clock ticks). Running it
yields the effect trace and the final community state, and is a pure function
of (script, policies, library version).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Union

from .community import CommunityState
from .compiler import ExecutablePolicy
from .engine import ActionEvent, Engine
from .errors import ParseError, ScriptOrderViolation, UnresolvedProposalRef
from .procedures import BallotContent, ballot_content_from_json
from .registry import Registry


@dataclass
class VoteStep:
    proposal_ref: str  # ordinal reference: first-opened proposal is "p1"
    voter: str
    ballot: BallotContent


@dataclass
class TickStep:
    pass


@dataclass
class Step:
    at: int
    do: Union[ActionEvent, VoteStep, TickStep]


@dataclass
class ScenarioScript:
    seed: int
    initial: CommunityState
    steps: list[Step] = field(default_factory=list)

    @classmethod
    def from_json(cls, doc: dict) -> "ScenarioScript":
        if not isinstance(doc, dict):
            raise ParseError("scenario must be an object")
        unknown = set(doc) - {"seed", "initial", "steps"}
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)}", "scenario")
        initial = CommunityState.from_json(doc.get("initial", {}))
        steps: list[Step] = []
        event_seq = 0
        for i, raw in enumerate(doc.get("steps", [])):
            path = f"steps[{i}]"
            if not isinstance(raw, dict) or "at" not in raw:
                raise ParseError("step needs an `at` timestamp", path)
            at = int(raw["at"])
            kinds = [k for k in ("action", "vote", "tick") if k in raw]
            if len(kinds) != 1:
                raise ParseError("step must have exactly one of action/vote/tick", path)
            if kinds[0] == "action":
                event_seq += 1
                do: Union[ActionEvent, VoteStep, TickStep] = ActionEvent.from_json(
                    raw["action"], default_id=f"e{event_seq}", default_at=at)
            elif kinds[0] == "vote":
                rv = raw["vote"]
                do = VoteStep(proposal_ref=str(rv["proposal"]), voter=str(rv["voter"]),
                              ballot=ballot_content_from_json(rv["ballot"]))
            else:
                do = TickStep()
            steps.append(Step(at=at, do=do))
        for prev, cur in zip(steps, steps[1:]):
            if cur.at < prev.at:
                raise ScriptOrderViolation(
                    f"steps must be sorted by time; {cur.at} follows {prev.at}")
        return cls(seed=int(doc.get("seed", 0)), initial=initial, steps=steps)


def load_scenario(text: str) -> ScenarioScript:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return ScenarioScript.from_json(doc)


def run_scenario(script: ScenarioScript, policies: list[ExecutablePolicy],
                 registry: Registry,
                 seed: Optional[int] = None) -> tuple[list[dict], CommunityState]:
    """Feed the script to a fresh engine; returns (trace records, final state)."""
    community = script.initial.clone()
    engine = Engine(registry=registry, community=community, policies=policies,
                    seed=script.seed if seed is None else seed)
    opened: list[str] = []

    def refresh_opened() -> None:
        for pid in engine.proposals:
            if pid not in opened:
                opened.append(pid)

    for step in script.steps:
        if isinstance(step.do, ActionEvent):
            event = step.do
            if event.at != step.at:
                event = ActionEvent(event_id=event.event_id, kind=event.kind,
                                    fields=event.fields, at=step.at)
            engine.submit_event(event)
            refresh_opened()
        elif isinstance(step.do, VoteStep):
            ref = step.do.proposal_ref
            if not (ref.startswith("p") and ref[1:].isdigit()):
                raise UnresolvedProposalRef(f"bad proposal reference {ref!r}")
            if int(ref[1:]) > len(opened):
                raise UnresolvedProposalRef(
                    f"{ref} refers to a proposal that has not opened yet")
            engine.cast_vote(ref, step.do.voter, step.do.ballot, at=step.at)
        else:
            engine.tick(step.at)
            refresh_opened()
    return engine.trace, community
