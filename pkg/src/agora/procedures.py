"""Decision procedures: ballots, pure check functions, and behavior objects.

Each base procedure exposes the same surface: a ballot form, an eligibility
rule, an announcement emitted when a proposal opens, and a pure check over the
ballots cast so far. Checks are called in two modes: asynchronous (may return
PENDING) and final (forced close at duration expiry, must decide).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Optional, Sequence, Union

from .community import CommunityState
from .errors import (
    BallotFormMismatch,
    BallotNotTotalOrder,
    BudgetExceeded,
    EmptyPool,
    JuryTooLarge,
    NoBallots,
    SelfDelegation,
    UnknownChannel,
)
from .rng import SplitMix64, shuffled

PENDING = "Pending"
PASSED = "Passed"
FAILED = "Failed"


@dataclass(frozen=True)
class YesNo:
    value: bool


@dataclass(frozen=True)
class Ranking:
    ranking: tuple[str, ...]


@dataclass(frozen=True)
class Quadratic:
    magnitude: int  # signed; cost is magnitude squared


@dataclass(frozen=True)
class Delegate:
    target: str


BallotContent = Union[YesNo, Ranking, Quadratic, Delegate]


@dataclass(frozen=True)
class Ballot:
    voter: str
    content: BallotContent
    cast_at: int = 0


def ballot_content_from_json(raw: dict) -> BallotContent:
    kind = raw.get("type")
    if kind == "yesno":
        return YesNo(bool(raw["value"]))
    if kind == "ranking":
        return Ranking(tuple(raw["ranking"]))
    if kind == "quadratic":
        return Quadratic(int(raw["magnitude"]))
    if kind == "delegate":
        return Delegate(str(raw["target"]))
    raise BallotFormMismatch(f"unknown ballot type {kind!r}")


def ballot_content_to_json(content: BallotContent) -> dict:
    if isinstance(content, YesNo):
        return {"type": "yesno", "value": content.value}
    if isinstance(content, Ranking):
        return {"type": "ranking", "ranking": list(content.ranking)}
    if isinstance(content, Quadratic):
        return {"type": "quadratic", "magnitude": content.magnitude}
    return {"type": "delegate", "target": content.target}


@dataclass
class CheckResult:
    status: str
    outputs: dict[str, Any] = field(default_factory=dict)
    detail: dict[str, Any] = field(default_factory=dict)  # extra evidence, not slot-bound

    @property
    def decided(self) -> bool:
        return self.status != PENDING


# --- check functions ---------------------------------------------------------

def _yes_no_counts(ballots: Iterable[Ballot]) -> tuple[int, int]:
    yes = no = 0
    for b in ballots:
        if isinstance(b.content, YesNo):
            if b.content.value:
                yes += 1
            else:
                no += 1
    return yes, no


def majority_bound(threshold: float, eligible_count: int) -> int:
    """ceil(threshold * eligible), computed on the decimal the author wrote."""
    return math.ceil(Fraction(str(threshold)) * eligible_count)


def majority_check(ballots: Iterable[Ballot], threshold: float, eligible_count: int,
                   final: bool = False) -> CheckResult:
    """Threshold vote: pass at ceil(t*eligible) yes votes, fail once unreachable."""
    ballots = list(ballots)
    yes, no = _yes_no_counts(ballots)
    bound = majority_bound(threshold, eligible_count)
    outputs = {"yes_votes": yes, "no_votes": no}
    if yes >= bound:
        return CheckResult(PASSED, outputs)
    if final:
        return CheckResult(FAILED, outputs)
    outstanding = eligible_count - len(ballots)
    if yes + outstanding < bound:
        return CheckResult(FAILED, outputs)
    return CheckResult(PENDING, outputs)


def jury_open(pool: Sequence[str], no_of_jurors: int, rng: SplitMix64) -> list[str]:
    """Sample jurors without replacement: Fisher-Yates over the id-sorted pool."""
    if not pool:
        raise EmptyPool("jury pool is empty")
    if not 1 <= no_of_jurors <= len(pool):
        raise JuryTooLarge(f"cannot seat {no_of_jurors} jurors from a pool of {len(pool)}")
    return shuffled(sorted(pool), rng)[:no_of_jurors]


def jury_check(ballots: Iterable[Ballot], threshold_count: int, juror_count: int,
               final: bool = False) -> CheckResult:
    """Absolute-count jury: pass at `threshold_count` yes votes among jurors."""
    ballots = list(ballots)
    yes, no = _yes_no_counts(ballots)
    outputs = {"yes_votes": yes, "no_votes": no}
    if yes >= threshold_count:
        return CheckResult(PASSED, outputs)
    if final:
        return CheckResult(FAILED, outputs)
    outstanding = juror_count - len(ballots)
    if yes + outstanding < threshold_count:
        return CheckResult(FAILED, outputs)
    return CheckResult(PENDING, outputs)


def dictator_check(ballots: Iterable[Ballot], dictator: str,
                   final: bool = False) -> CheckResult:
    """Pending until the dictator votes; then their choice decides."""
    for b in ballots:
        if b.voter == dictator and isinstance(b.content, YesNo):
            return CheckResult(PASSED if b.content.value else FAILED)
    return CheckResult(FAILED if final else PENDING)


def ranked_check(ballots: Iterable[Ballot], candidates: Sequence[str],
                 eligible_count: int, final: bool = False) -> CheckResult:
    """Instant runoff over full rankings.

    Resolves once every eligible voter has cast a ballot, or at forced close
    with at least one ballot. Each round the candidate with the fewest
    first-choice ballots is eliminated (ties break to the smallest candidate
    id); a candidate wins on a strict majority of active ballots or by being
    the last one standing.
    """
    ballots = list(ballots)
    if not final and len(ballots) < eligible_count:
        return CheckResult(PENDING)
    rankings = [b.content.ranking for b in ballots if isinstance(b.content, Ranking)]
    if not rankings:
        raise NoBallots("ranked vote closed with no ballots")
    active = sorted(candidates)
    rounds = 0
    while True:
        rounds += 1
        tally = {c: 0 for c in active}
        counted = 0
        for ranking in rankings:
            for choice in ranking:
                if choice in tally:
                    tally[choice] += 1
                    counted += 1
                    break
        leader = max(active, key=lambda c: (tally[c], ))
        if tally[leader] * 2 > counted or len(active) == 1:
            winner = leader if tally[leader] * 2 > counted else active[0]
            return CheckResult(PASSED, {"winner": winner, "rounds": rounds},
                               detail={"tally": tally})
        fewest = min(tally.values())
        eliminated = min(c for c in active if tally[c] == fewest)
        active.remove(eliminated)


def validate_ranking(content: Ranking, candidates: Sequence[str]) -> None:
    if sorted(content.ranking) != sorted(candidates):
        raise BallotNotTotalOrder(
            f"ballot must rank every candidate exactly once; got {list(content.ranking)}")


def quadratic_check(ballots: Iterable[Ballot], budget: float, eligible_count: int,
                    final: bool = False) -> CheckResult:
    """Quadratic vote: cost is magnitude squared; passes on strictly positive net."""
    ballots = list(ballots)
    if not final and len(ballots) < eligible_count:
        return CheckResult(PENDING)
    net = 0
    credits: dict[str, int] = {}
    for b in ballots:
        if isinstance(b.content, Quadratic):
            net += b.content.magnitude
            credits[b.voter] = b.content.magnitude ** 2
    status = PASSED if net > 0 else FAILED
    return CheckResult(status, {"net_support": net}, detail={"credits_spent": credits})


def validate_quadratic(content: Quadratic, budget: float) -> None:
    if content.magnitude ** 2 > budget:
        raise BudgetExceeded(
            f"magnitude {content.magnitude} costs {content.magnitude ** 2} credits, "
            f"budget is {budget}")


def liquid_check(ballots: dict[str, BallotContent], eligible: Sequence[str],
                 final: bool = False) -> CheckResult:
    """Liquid democracy: transitive delegation, weight 1 per eligible voter.

    Delegation cycles and chains ending in an abstainer contribute to
    discarded weight; passes when yes outweighs no at close.
    """
    if not final and len(ballots) < len(eligible):
        return CheckResult(PENDING)
    resolved: dict[str, Optional[bool]] = {}  # voter -> yes/no, None = discarded

    def terminal_choice(voter: str) -> Optional[bool]:
        path = []
        seen = set()
        current = voter
        while True:
            if current in resolved:
                choice = resolved[current]
                break
            if current in seen:
                choice = None  # delegation cycle
                break
            seen.add(current)
            path.append(current)
            content = ballots.get(current)
            if content is None:
                choice = None  # chain ends in an abstainer
                break
            if isinstance(content, YesNo):
                choice = content.value
                break
            current = content.target
        for p in path:
            resolved[p] = choice
        return choice

    yes_w = no_w = discarded = 0
    for voter in eligible:
        choice = terminal_choice(voter)
        if choice is None:
            discarded += 1
        elif choice:
            yes_w += 1
        else:
            no_w += 1
    status = PASSED if yes_w > no_w else FAILED
    return CheckResult(status, {"yes_weight": yes_w, "no_weight": no_w,
                                "discarded_weight": discarded})


def validate_delegate(content: Delegate, voter: str, eligible: Sequence[str]) -> None:
    if content.target == voter:
        raise SelfDelegation(f"{voter} cannot delegate to themselves")
    if content.target not in eligible:
        raise BallotFormMismatch(
            f"delegation target {content.target!r} is not an eligible voter")


# --- behavior objects --------------------------------------------------------

@dataclass
class ProcedureOpening:
    eligible: list[str]
    outputs: dict[str, Any] = field(default_factory=dict)       # slots known at open
    announcements: list[tuple[str, dict]] = field(default_factory=list)  # (execution, settings)


def _resolve_pool(community: CommunityState, settings: dict) -> list[str]:
    """Eligibility pool: explicit voter list, else the vote channel's members."""
    voters = settings.get("eligible_voters")
    if voters:
        return list(voters)
    channel_id = settings.get("vote_channel")
    channel = community.channels.get(channel_id)
    if channel is None:
        raise UnknownChannel(f"no channel {channel_id!r}")
    return sorted(channel.members)


def _names(community: CommunityState, user_ids: Iterable[str]) -> str:
    return ", ".join(community.display_user(u) for u in user_ids)


class ProcedureBehavior:
    """Base class; subclasses implement one decision mechanism each."""

    name = ""
    ballot_forms: tuple[type, ...] = (YesNo,)

    def eligibility(self, community: CommunityState, settings: dict,
                    rng: SplitMix64) -> list[str]:
        return _resolve_pool(community, settings)

    def open(self, community: CommunityState, settings: dict,
             rng: SplitMix64) -> ProcedureOpening:
        eligible = self.eligibility(community, settings, rng)
        return ProcedureOpening(eligible=eligible,
                                announcements=self.announcements(community, settings, eligible))

    def announcements(self, community: CommunityState, settings: dict,
                      eligible: list[str]) -> list[tuple[str, dict]]:
        return [("PostMessage", {
            "channel": settings["vote_channel"],
            "text": f"A vote has started: {self.name}. Please vote yes or no.",
        })]

    def validate_ballot(self, content: BallotContent, voter: str,
                        eligible: list[str], settings: dict) -> None:
        if not isinstance(content, self.ballot_forms):
            forms = "/".join(t.__name__ for t in self.ballot_forms)
            raise BallotFormMismatch(f"{self.name} takes {forms} ballots")

    def check(self, ballots: dict[str, Ballot], settings: dict,
              eligible: list[str], final: bool = False) -> CheckResult:
        raise NotImplementedError


class MajorityBehavior(ProcedureBehavior):
    name = "Majority"

    def check(self, ballots, settings, eligible, final=False):
        return majority_check(ballots.values(), settings["threshold"], len(eligible), final)


class ConsensusBehavior(ProcedureBehavior):
    """Majority at threshold 1.0; any single no fails the vote immediately."""

    name = "Consensus"

    def check(self, ballots, settings, eligible, final=False):
        return majority_check(ballots.values(), 1.0, len(eligible), final)


class JuryBehavior(ProcedureBehavior):
    name = "Jury"

    def eligibility(self, community, settings, rng):
        pool = _resolve_pool(community, settings)
        return jury_open(pool, int(settings["no_of_jurors"]), rng)

    def open(self, community, settings, rng):
        jurors = self.eligibility(community, settings, rng)
        return ProcedureOpening(
            eligible=jurors,
            outputs={"jurors": jurors},
            announcements=[("PostMessage", {
                "channel": settings["vote_channel"],
                "text": f"A jury of {int(settings['no_of_jurors'])} has been convened: "
                        f"{_names(community, jurors)}. Please vote yes or no.",
            })],
        )

    def check(self, ballots, settings, eligible, final=False):
        return jury_check(ballots.values(), int(settings["threshold"]), len(eligible), final)


class DictatorBehavior(ProcedureBehavior):
    name = "BenevolentDictator"

    def eligibility(self, community, settings, rng):
        return [settings["dictator"]]

    def announcements(self, community, settings, eligible):
        return [("DirectMessage", {
            "user": settings["dictator"],
            "text": "A proposal awaits your decision. Vote yes or no.",
        })]

    def check(self, ballots, settings, eligible, final=False):
        return dictator_check(ballots.values(), settings["dictator"], final)


class RankedBehavior(ProcedureBehavior):
    name = "RankedVoting"
    ballot_forms = (Ranking,)

    def announcements(self, community, settings, eligible):
        return [("PostMessage", {
            "channel": settings["vote_channel"],
            "text": f"A ranked vote has started. Candidates: "
                    f"{_names(community, settings['candidates'])}. Rank every candidate.",
        })]

    def validate_ballot(self, content, voter, eligible, settings):
        super().validate_ballot(content, voter, eligible, settings)
        validate_ranking(content, settings["candidates"])

    def check(self, ballots, settings, eligible, final=False):
        return ranked_check(ballots.values(), settings["candidates"], len(eligible), final)


class QuadraticBehavior(ProcedureBehavior):
    name = "QuadraticVoting"
    ballot_forms = (Quadratic,)

    def announcements(self, community, settings, eligible):
        return [("PostMessage", {
            "channel": settings["vote_channel"],
            "text": f"A quadratic vote has started. Each voter has "
                    f"{settings['budget']} credits; a vote of magnitude v costs v*v.",
        })]

    def validate_ballot(self, content, voter, eligible, settings):
        super().validate_ballot(content, voter, eligible, settings)
        validate_quadratic(content, settings["budget"])

    def check(self, ballots, settings, eligible, final=False):
        return quadratic_check(ballots.values(), settings["budget"], len(eligible), final)


class LiquidBehavior(ProcedureBehavior):
    name = "LiquidDemocracy"
    ballot_forms = (YesNo, Delegate)

    def announcements(self, community, settings, eligible):
        return [("PostMessage", {
            "channel": settings["vote_channel"],
            "text": "A liquid-democracy vote has started. Vote yes or no, "
                    "or delegate your vote to another eligible voter.",
        })]

    def validate_ballot(self, content, voter, eligible, settings):
        super().validate_ballot(content, voter, eligible, settings)
        if isinstance(content, Delegate):
            validate_delegate(content, voter, eligible)

    def check(self, ballots, settings, eligible, final=False):
        contents = {voter: b.content for voter, b in ballots.items()}
        return liquid_check(contents, eligible, final)


PROCEDURE_BEHAVIORS: dict[str, ProcedureBehavior] = {
    "procedure.majority": MajorityBehavior(),
    "procedure.consensus": ConsensusBehavior(),
    "procedure.jury": JuryBehavior(),
    "procedure.dictator": DictatorBehavior(),
    "procedure.ranked": RankedBehavior(),
    "procedure.quadratic": QuadraticBehavior(),
    "procedure.liquid": LiquidBehavior(),
}
