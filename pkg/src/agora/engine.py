"""Event-driven runtime: matching, proposal lifecycle, voting, effect dispatch.

The engine holds governed actions instead of applying them, opens a proposal
per match, collects ballots, re-evaluates the decorated procedure chain, and
dispatches executions on close. All mutation flows through one command path
(submit_event / cast_vote / tick); effects apply to the community synchronously
in emission order, and the trace of effect records is the unit of evidence.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .community import CommunityState
from .compiler import ExecutablePolicy, resolve_value
from .entities import scalar_shape_ok
from .errors import (
    BallotFormMismatch,
    ClockRegression,
    DuplicateEvent,
    IneligibleVoter,
    MalformedFields,
    NoBallots,
    NotFound,
    ParseError,
    ProposalClosed as ProposalClosedError,
    UnknownActionKind,
    UnknownProposal,
)
from .policy import ReferenceToken
from .procedures import (
    Ballot,
    BallotContent,
    CheckResult,
    PENDING,
    YesNo,
    ballot_content_from_json,
)
from .registry import ComponentKind, Registry
from .rng import derive_stream
from .stdlib import HookContext, apply_base_action, apply_execution

OPEN = "Open"
PASSED = "Passed"
FAILED = "Failed"

THUMBS = {"\N{THUMBS UP SIGN}": True, "\N{THUMBS DOWN SIGN}": False}


@dataclass(frozen=True)
class ActionEvent:
    event_id: str
    kind: str
    fields: dict[str, Any]
    at: int = 0

    @classmethod
    def from_json(cls, doc: dict, default_id: str = "", default_at: int = 0) -> "ActionEvent":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise ParseError("action event needs a kind", "event")
        return cls(
            event_id=str(doc.get("event_id", default_id)),
            kind=str(doc["kind"]),
            fields=dict(doc.get("fields", {})),
            at=int(doc.get("at", default_at)),
        )

    def to_json(self) -> dict:
        return {"event_id": self.event_id, "kind": self.kind,
                "fields": self.fields, "at": self.at}


# --- effects -----------------------------------------------------------------

@dataclass(frozen=True)
class ExecutionRequest:
    execution: str
    settings: dict[str, Any]
    proposal: Optional[str] = None

    def to_record(self) -> dict:
        payload = {"execution": self.execution, "settings": self.settings}
        if self.proposal:
            payload["proposal"] = self.proposal
        return {"kind": "execution", "payload": payload}


@dataclass(frozen=True)
class ProposalOpened:
    proposal: str
    policy: str
    event: str

    def to_record(self) -> dict:
        return {"kind": "proposal_opened",
                "payload": {"proposal": self.proposal, "policy": self.policy,
                            "event": self.event}}


@dataclass(frozen=True)
class ProposalClosed:
    proposal: str
    status: str

    def to_record(self) -> dict:
        return {"kind": "proposal_closed",
                "payload": {"proposal": self.proposal, "status": self.status}}


@dataclass(frozen=True)
class ActionPassedThrough:
    """The platform applies an action: ungoverned, or approved by its proposal."""

    event: str
    kind: str
    proposal: Optional[str] = None

    def to_record(self) -> dict:
        payload: dict[str, Any] = {"event": self.event, "kind": self.kind}
        if self.proposal:
            payload["proposal"] = self.proposal
        return {"kind": "action_applied", "payload": payload}


EngineEffect = Union[ExecutionRequest, ProposalOpened, ProposalClosed, ActionPassedThrough]


def trace_to_ldjson(records: list[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True, separators=(",", ":"),
                              ensure_ascii=False) + "\n" for r in records)


# --- proposals -----------------------------------------------------------------

@dataclass
class Proposal:
    proposal_id: str
    policy_id: str
    governed_event: ActionEvent
    opened_at: int
    eligible: list[str]
    settings: dict[str, Any]                       # resolved procedure settings
    status: str = OPEN
    ballots: dict[str, Ballot] = field(default_factory=dict)
    slots: dict[ReferenceToken, Any] = field(default_factory=dict)
    announcement_message: Optional[str] = None     # reaction-vote target
    hook_state: dict[str, dict] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "proposal_id": self.proposal_id,
            "policy_id": self.policy_id,
            "event": self.governed_event.event_id,
            "opened_at": self.opened_at,
            "status": self.status,
            "eligible": list(self.eligible),
            "voted": sorted(self.ballots),
            "slots": {str(t): v for t, v in sorted(self.slots.items(),
                                                   key=lambda kv: str(kv[0]))},
        }


def evaluate_chain(executable: ExecutablePolicy, proposal: Proposal,
                   community: CommunityState, now: int, final: bool = False):
    """Walk the decorated chain: outermost guard first, base procedure last.

    Guards may only force Pending; in final mode (forced close) they are
    bypassed and the base procedure must decide on the ballots cast.
    """
    if not final:
        for link in executable.decorators:
            if link.hooks.guard is None:
                continue
            ctx = _hook_context(link, proposal, community, now)
            if link.hooks.guard(ctx):
                return CheckResult(PENDING, detail={"decided_by": link.name})
    result = executable.procedure.behavior.check(
        proposal.ballots, proposal.settings, proposal.eligible, final)
    result.detail.setdefault("decided_by", executable.procedure.name)
    return result


def _hook_context(link, proposal: Proposal, community: CommunityState,
                  now: int) -> HookContext:
    def setting(name: str):
        return resolve_value(link.settings[name], proposal.slots, community)

    return HookContext(proposal=proposal, community=community, now=now,
                       setting=setting,
                       state=proposal.hook_state.setdefault(link.name, {}))


class Engine:
    """Single-writer state machine over one community and a policy list.

    Policies are consulted in creation order; the first enabled match governs
    an event (others are ignored for that event). One run-level seed feeds a
    per-proposal splitmix stream keyed by the proposal ordinal.
    """

    def __init__(self, registry: Registry, community: CommunityState,
                 policies: list[ExecutablePolicy], seed: int = 0):
        self.registry = registry
        self.community = community
        self.policies = list(policies)
        self.seed = seed
        self.now = community.clock
        self.proposals: dict[str, Proposal] = {}
        self.trace: list[dict] = []
        self._executables: dict[str, ExecutablePolicy] = {p.policy_id: p for p in policies}
        self._ordinal = 0
        self._seq = 0
        self._seen_events: set[str] = set()
        self._lock = threading.Lock()

    def add_policy(self, executable: ExecutablePolicy) -> None:
        """Install or replace a policy; takes effect for subsequent events."""
        with self._lock:
            self.policies = [p for p in self.policies
                             if p.policy_id != executable.policy_id]
            self.policies.append(executable)
            self._executables[executable.policy_id] = executable

    # --- internals ---

    def _emit(self, out: list[EngineEffect], effect: EngineEffect) -> dict:
        """Record the effect and apply it to the community, in emission order."""
        out.append(effect)
        self._seq += 1
        record = {"seq": self._seq, "at": self.now}
        record.update(effect.to_record())
        self.trace.append(record)
        if isinstance(effect, ExecutionRequest):
            return apply_execution(effect.execution, effect.settings, self.community)
        return {}

    def _apply_event(self, out: list[EngineEffect], event: ActionEvent,
                     proposal_id: Optional[str] = None) -> None:
        self._emit(out, ActionPassedThrough(event=event.event_id, kind=event.kind,
                                            proposal=proposal_id))
        apply_base_action(event.kind, event.fields, self.community, self.registry)

    def _advance(self, at: int) -> None:
        self.now = max(self.now, at)
        self.community.clock = self.now

    def _check_event(self, event: ActionEvent) -> None:
        if event.event_id in self._seen_events:
            raise DuplicateEvent(f"event {event.event_id!r} was already submitted")
        try:
            desc = self.registry.lookup(ComponentKind.BASE_ACTION, event.kind)
        except NotFound:
            raise UnknownActionKind(f"no base action {event.kind!r}") from None
        declared = {v.name: v.entity for v in desc.variables}
        if set(event.fields) != set(declared):
            raise MalformedFields(
                f"{event.kind} expects fields {sorted(declared)}, "
                f"got {sorted(event.fields)}")
        for name, value in event.fields.items():
            if not scalar_shape_ok(declared[name], value):
                raise MalformedFields(
                    f"field {name!r} does not fit entity {declared[name].value}")

    # --- commands ---

    def submit_event(self, event: ActionEvent) -> list[EngineEffect]:
        """Match an incoming action; hold and govern it, or pass it through."""
        with self._lock:
            self._check_event(event)
            self._seen_events.add(event.event_id)
            self._advance(event.at)
            out: list[EngineEffect] = []
            for executable in self.policies:
                if not executable.enabled:
                    continue
                match = executable.match(event.kind, event.fields, self.community)
                if match.matched:
                    self._open_proposal(out, executable, event, match.exports)
                    return out
            # ungoverned: the platform applies the action immediately
            self._apply_event(out, event)
            self._reaction_adapter(out, event)
            return out

    def _open_proposal(self, out: list[EngineEffect], executable: ExecutablePolicy,
                       event: ActionEvent, exports: dict[str, Any]) -> None:
        self._ordinal += 1
        pid = f"p{self._ordinal}"
        slots: dict[ReferenceToken, Any] = {}
        for name, value in event.fields.items():
            slots[ReferenceToken("action", name)] = value
        for name, value in exports.items():
            slots[ReferenceToken("action", name)] = value

        settings = {name: resolve_value(cv, slots, self.community)
                    for name, cv in executable.procedure.settings.items()}
        for name, value in settings.items():
            slots[ReferenceToken("procedure", name)] = value

        rng = derive_stream(self.seed, self._ordinal)
        opening = executable.procedure.behavior.open(self.community, settings, rng)
        proposal = Proposal(
            proposal_id=pid,
            policy_id=executable.policy_id,
            governed_event=event,
            opened_at=self.now,
            eligible=list(opening.eligible),
            settings=settings,
            slots=slots,
        )
        for name, value in opening.outputs.items():
            slots[ReferenceToken("procedure", name)] = value
        self.proposals[pid] = proposal

        self._emit(out, ProposalOpened(proposal=pid, policy=executable.policy_id,
                                       event=event.event_id))
        for execution, xsettings in opening.announcements:
            info = self._emit(out, ExecutionRequest(execution=execution,
                                                    settings=xsettings, proposal=pid))
            if proposal.announcement_message is None and "message" in info:
                proposal.announcement_message = info["message"]
        for link in executable.start_hooks:
            ctx = _hook_context(link, proposal, self.community, self.now)
            for execution, xsettings in link.hooks.start(ctx):
                self._emit(out, ExecutionRequest(execution=execution,
                                                 settings=xsettings, proposal=pid))
        # immediate pass: single-voter or degenerate procedures may close at once
        self._evaluate_and_close(out, proposal)

    def cast_vote(self, proposal_id: str, voter: str, content: BallotContent,
                  at: Optional[int] = None) -> list[EngineEffect]:
        """Record (or replace) a ballot and re-evaluate the decorated chain."""
        with self._lock:
            proposal = self.proposals.get(proposal_id)
            if proposal is None:
                raise UnknownProposal(f"no proposal {proposal_id!r}")
            if proposal.status != OPEN:
                raise ProposalClosedError(
                    f"proposal {proposal_id} is {proposal.status}")
            if voter not in proposal.eligible:
                raise IneligibleVoter(f"{voter!r} is not eligible on {proposal_id}")
            executable = self._executables[proposal.policy_id]
            executable.procedure.behavior.validate_ballot(
                content, voter, proposal.eligible, proposal.settings)
            if at is not None:
                self._advance(at)
            proposal.ballots[voter] = Ballot(voter=voter, content=content,
                                             cast_at=self.now)
            out: list[EngineEffect] = []
            for link in executable.vote_hooks:
                ctx = _hook_context(link, proposal, self.community, self.now)
                for execution, xsettings in link.hooks.vote(ctx):
                    self._emit(out, ExecutionRequest(execution=execution,
                                                     settings=xsettings,
                                                     proposal=proposal.proposal_id))
            self._evaluate_and_close(out, proposal)
            return out

    def tick(self, now: int) -> list[EngineEffect]:
        """Advance the clock: run tick hooks, close expired votes, re-check."""
        with self._lock:
            if now < self.now:
                raise ClockRegression(f"tick {now} is before engine time {self.now}")
            self._advance(now)
            out: list[EngineEffect] = []
            for pid in sorted(self.proposals, key=lambda p: int(p[1:])):
                proposal = self.proposals[pid]
                if proposal.status != OPEN:
                    continue
                executable = self._executables[proposal.policy_id]
                force_close = False
                for link in executable.tick_hooks:
                    ctx = _hook_context(link, proposal, self.community, self.now)
                    result = link.hooks.tick(ctx)
                    for execution, xsettings in result.requests:
                        self._emit(out, ExecutionRequest(execution=execution,
                                                         settings=xsettings,
                                                         proposal=pid))
                    force_close = force_close or result.close
                if proposal.status == OPEN:
                    self._evaluate_and_close(out, proposal, final=force_close)
            return out

    def evaluate(self, proposal: Union[str, Proposal]) -> str:
        """Pure status of the decorated chain right now; emits nothing."""
        if isinstance(proposal, str):
            if proposal not in self.proposals:
                raise UnknownProposal(f"no proposal {proposal!r}")
            proposal = self.proposals[proposal]
        executable = self._executables[proposal.policy_id]
        return evaluate_chain(executable, proposal, self.community, self.now).status

    # --- lifecycle ---

    def _evaluate_and_close(self, out: list[EngineEffect], proposal: Proposal,
                            final: bool = False) -> None:
        executable = self._executables[proposal.policy_id]
        try:
            result = evaluate_chain(executable, proposal, self.community,
                                    self.now, final)
        except NoBallots:
            result = CheckResult(FAILED)
        if result.status == PENDING:
            return
        proposal.status = result.status  # Open -> Passed | Failed, exactly once
        for name, value in result.outputs.items():
            proposal.slots[ReferenceToken("procedure", name)] = value
        self._emit(out, ProposalClosed(proposal=proposal.proposal_id,
                                       status=proposal.status))
        if proposal.status == PASSED:
            self._apply_event(out, proposal.governed_event, proposal.proposal_id)
            program = executable.pass_program
        else:
            program = executable.fail_program
        for call in program:
            settings = {name: resolve_value(cv, proposal.slots, self.community)
                        for name, cv in call.settings.items()}
            self._emit(out, ExecutionRequest(execution=call.execution,
                                             settings=settings,
                                             proposal=proposal.proposal_id))

    # --- emoji votes ---

    def _reaction_adapter(self, out: list[EngineEffect], event: ActionEvent) -> None:
        """Map thumb reactions on a proposal's announcement message to ballots."""
        if event.kind != "AddReaction":
            return
        value = THUMBS.get(event.fields.get("emoji"))
        if value is None:
            return
        target = event.fields.get("message_ref")
        voter = event.fields.get("initiator")
        for pid in sorted(self.proposals, key=lambda p: int(p[1:])):
            proposal = self.proposals[pid]
            if proposal.status != OPEN or proposal.announcement_message != target:
                continue
            if voter not in proposal.eligible:
                return
            executable = self._executables[proposal.policy_id]
            try:
                executable.procedure.behavior.validate_ballot(
                    YesNo(value), voter, proposal.eligible, proposal.settings)
            except BallotFormMismatch:
                return
            proposal.ballots[voter] = Ballot(voter=voter, content=YesNo(value),
                                             cast_at=self.now)
            self._evaluate_and_close(out, proposal)
            return


def ballot_from_json(raw: dict) -> BallotContent:
    return ballot_content_from_json(raw)
