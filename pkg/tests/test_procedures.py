import itertools

import hypothesis.strategies as st
import pytest
from hypothesis import given, settings

from agora.errors import (
    BallotFormMismatch,
    BallotNotTotalOrder,
    BudgetExceeded,
    EmptyPool,
    JuryTooLarge,
    NoBallots,
    SelfDelegation,
)
from agora.procedures import (
    Ballot,
    Delegate,
    FAILED,
    PASSED,
    PENDING,
    Quadratic,
    Ranking,
    YesNo,
    dictator_check,
    jury_check,
    jury_open,
    liquid_check,
    majority_check,
    quadratic_check,
    ranked_check,
    validate_delegate,
    validate_quadratic,
    validate_ranking,
)
from agora.rng import derive_stream

from oracles import irv, liquid_weights, splitmix_jury

USERS = ["u1", "u2", "u3", "u4", "u5"]


def yn(voter, value):
    return Ballot(voter=voter, content=YesNo(value))


def yes_no_ballots(yes, no):
    out = [yn(f"y{i}", True) for i in range(yes)]
    out += [yn(f"n{i}", False) for i in range(no)]
    return out


# --- majority / consensus -----------------------------------------------------

def test_majority_passes_at_bound():
    result = majority_check(yes_no_ballots(3, 1), 0.6, 5)
    assert result.status == PASSED
    assert result.outputs == {"yes_votes": 3, "no_votes": 1}


def test_majority_fails_when_unreachable():
    assert majority_check(yes_no_ballots(2, 3), 0.6, 5).status == FAILED


def test_majority_pending_until_decided():
    assert majority_check(yes_no_ballots(2, 1), 0.6, 5).status == PENDING


def test_threshold_one_behaves_as_consensus():
    assert majority_check(yes_no_ballots(0, 1), 1.0, 5).status == FAILED
    assert majority_check(yes_no_ballots(4, 0), 1.0, 5).status == PENDING
    assert majority_check(yes_no_ballots(5, 0), 1.0, 5).status == PASSED


def test_majority_final_decides():
    assert majority_check(yes_no_ballots(2, 1), 0.6, 5, final=True).status == FAILED
    assert majority_check(yes_no_ballots(3, 0), 0.6, 5, final=True).status == PASSED


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8),
       st.sampled_from([0.1, 0.25, 0.5, 0.6, 0.75, 0.9, 1.0]),
       st.sampled_from([0.1, 0.25, 0.5, 0.6, 0.75, 0.9, 1.0]),
       st.booleans())
def test_raising_threshold_never_rescues_failed(yes, no, outstanding, t1, t2, final):
    low, high = min(t1, t2), max(t1, t2)
    eligible = yes + no + outstanding
    if eligible == 0:
        return
    ballots = yes_no_ballots(yes, no)
    at_low = majority_check(ballots, low, eligible, final).status
    at_high = majority_check(ballots, high, eligible, final).status
    if at_low == FAILED:
        assert at_high != PASSED
    # passing is monotone the other way: a pass at high implies a pass at low
    if at_high == PASSED:
        assert at_low == PASSED


# --- jury -----------------------------------------------------------------------

def test_jury_whole_pool():
    rng = derive_stream(1, 1)
    jurors = jury_open(USERS, 5, rng)
    assert sorted(jurors) == USERS


def test_jury_too_large():
    with pytest.raises(JuryTooLarge):
        jury_open(USERS, 6, derive_stream(1, 1))


def test_jury_empty_pool():
    with pytest.raises(EmptyPool):
        jury_open([], 1, derive_stream(1, 1))


def test_jury_seeded_draw_matches_independent_oracle():
    expected = splitmix_jury(42, 1, USERS, 3)
    assert expected == ["u5", "u4", "u1"]  # frozen from the oracle
    assert jury_open(USERS, 3, derive_stream(42, 1)) == expected

    named = ["alice", "bob", "carol", "dave", "erin"]
    expected = splitmix_jury(42, 1, named, 3)
    assert expected == ["erin", "dave", "alice"]  # the demo community's jury
    assert jury_open(named, 3, derive_stream(42, 1)) == expected


def test_jury_check_threshold_count():
    assert jury_check(yes_no_ballots(2, 0), 2, 3).status == PASSED
    assert jury_check(yes_no_ballots(1, 2), 2, 3).status == FAILED
    assert jury_check(yes_no_ballots(1, 1), 2, 3).status == PENDING
    assert jury_check(yes_no_ballots(1, 1), 2, 3, final=True).status == FAILED


def test_jury_pair_frequencies_uniform():
    # 10,000 seeded draws of 2 from 5: each of the 10 pairs near 1/10
    counts = {frozenset(p): 0 for p in itertools.combinations(USERS, 2)}
    for ordinal in range(10_000):
        pair = jury_open(USERS, 2, derive_stream(1234, ordinal))
        counts[frozenset(pair)] += 1
    for pair, count in counts.items():
        assert 850 <= count <= 1150, (sorted(pair), count)


# --- dictator ---------------------------------------------------------------------

def test_dictator_decides():
    assert dictator_check([yn("boss", True)], "boss").status == PASSED
    assert dictator_check([yn("boss", False)], "boss").status == FAILED


def test_dictator_ignores_others():
    assert dictator_check([yn("peon", True)], "boss").status == PENDING
    assert dictator_check([], "boss", final=True).status == FAILED


# --- ranked -------------------------------------------------------------------------

def rank(voter, *order):
    return Ballot(voter=voter, content=Ranking(tuple(order)))


def test_ranked_transfer_example():
    candidates = ["a", "b", "c"]
    ballots = [rank("v1", "a", "b", "c"), rank("v2", "a", "b", "c"),
               rank("v3", "b", "a", "c"), rank("v4", "b", "a", "c"),
               rank("v5", "c", "b", "a")]
    expected = irv(candidates, [b.content.ranking for b in ballots])
    assert expected == ("b", 2)  # frozen from the oracle: c eliminated, transfers to b
    result = ranked_check(ballots, candidates, eligible_count=5)
    assert result.status == PASSED
    assert (result.outputs["winner"], result.outputs["rounds"]) == expected


def test_ranked_single_candidate():
    result = ranked_check([rank("v1", "a")], ["a"], eligible_count=1)
    assert result.outputs == {"winner": "a", "rounds": 1}


def test_ranked_unanimous():
    ballots = [rank(f"v{i}", "a", "b") for i in range(4)]
    result = ranked_check(ballots, ["a", "b"], eligible_count=4)
    assert result.outputs["winner"] == "a"
    assert result.outputs["rounds"] == 1


def test_ranked_waits_for_all_ballots():
    ballots = [rank("v1", "a", "b")]
    assert ranked_check(ballots, ["a", "b"], eligible_count=2).status == PENDING
    assert ranked_check(ballots, ["a", "b"], eligible_count=2,
                        final=True).outputs["winner"] == "a"


def test_ranked_no_ballots_at_forced_close():
    with pytest.raises(NoBallots):
        ranked_check([], ["a", "b"], eligible_count=2, final=True)


def test_ranking_must_be_total_order():
    with pytest.raises(BallotNotTotalOrder):
        validate_ranking(Ranking(("a",)), ["a", "b"])
    with pytest.raises(BallotNotTotalOrder):
        validate_ranking(Ranking(("a", "a", "b")), ["a", "b"])
    validate_ranking(Ranking(("b", "a")), ["a", "b"])


@st.composite
def irv_instances(draw):
    n_candidates = draw(st.integers(1, 4))
    candidates = [f"c{i}" for i in range(n_candidates)]
    n_ballots = draw(st.integers(1, 6))
    rankings = [tuple(draw(st.permutations(candidates))) for _ in range(n_ballots)]
    return candidates, rankings


@settings(max_examples=250, deadline=None)
@given(irv_instances())
def test_ranked_matches_exhaustive_oracle(instance):
    candidates, rankings = instance
    ballots = [Ballot(voter=f"v{i}", content=Ranking(r))
               for i, r in enumerate(rankings)]
    result = ranked_check(ballots, candidates, eligible_count=len(ballots))
    winner, rounds = irv(candidates, rankings)
    assert result.outputs["winner"] == winner
    assert result.outputs["rounds"] == rounds


# --- quadratic -------------------------------------------------------------------------

def quad(voter, magnitude):
    return Ballot(voter=voter, content=Quadratic(magnitude))


def test_quadratic_cost_within_budget():
    validate_quadratic(Quadratic(3), 16)  # cost 9, accepted
    with pytest.raises(BudgetExceeded):
        validate_quadratic(Quadratic(5), 16)  # cost 25
    with pytest.raises(BudgetExceeded):
        validate_quadratic(Quadratic(-5), 16)


def test_quadratic_net_support():
    ballots = [quad("a", 3), quad("b", -2), quad("c", 1)]
    result = quadratic_check(ballots, 16, eligible_count=3)
    assert result.status == PASSED
    assert result.outputs["net_support"] == 2
    assert result.detail["credits_spent"] == {"a": 9, "b": 4, "c": 1}


def test_quadratic_zero_or_negative_net_fails():
    assert quadratic_check([quad("a", 2), quad("b", -2)], 16, 2).status == FAILED
    assert quadratic_check([quad("a", -1)], 16, 1).status == FAILED


def test_quadratic_waits_for_all():
    assert quadratic_check([quad("a", 1)], 16, eligible_count=2).status == PENDING
    assert quadratic_check([quad("a", 1)], 16, eligible_count=2,
                           final=True).status == PASSED


@settings(max_examples=200, deadline=None)
@given(st.integers(-6, 6), st.integers(0, 36))
def test_quadratic_cost_soundness(magnitude, budget):
    content = Quadratic(magnitude)
    if magnitude ** 2 <= budget:
        validate_quadratic(content, budget)
        result = quadratic_check([Ballot(voter="v", content=content)], budget, 1)
        assert result.detail["credits_spent"]["v"] == magnitude ** 2
    else:
        with pytest.raises(BudgetExceeded):
            validate_quadratic(content, budget)


# --- liquid ----------------------------------------------------------------------------

def test_liquid_transitive_chain():
    ballots = {"a": YesNo(True), "b": Delegate("a"), "c": Delegate("b")}
    result = liquid_check(ballots, ["a", "b", "c"])
    assert result.outputs == {"yes_weight": 3, "no_weight": 0, "discarded_weight": 0}
    assert result.status == PASSED


def test_liquid_cycle_discards():
    ballots = {"a": Delegate("b"), "b": Delegate("a"), "c": YesNo(False)}
    result = liquid_check(ballots, ["a", "b", "c"])
    assert result.outputs == {"yes_weight": 0, "no_weight": 1, "discarded_weight": 2}
    assert result.status == FAILED


def test_liquid_abstainer_sink():
    ballots = {"a": Delegate("b")}
    result = liquid_check(ballots, ["a", "b"], final=True)
    assert result.outputs == {"yes_weight": 0, "no_weight": 0, "discarded_weight": 2}
    assert result.status == FAILED


def test_liquid_waits_for_all_unless_final():
    assert liquid_check({"a": YesNo(True)}, ["a", "b"]).status == PENDING


def test_liquid_ballot_validation():
    with pytest.raises(SelfDelegation):
        validate_delegate(Delegate("a"), "a", ["a", "b"])
    with pytest.raises(BallotFormMismatch):
        validate_delegate(Delegate("zoe"), "a", ["a", "b"])
    validate_delegate(Delegate("b"), "a", ["a", "b"])


@st.composite
def delegation_graphs(draw):
    n = draw(st.integers(1, 12))
    eligible = [f"v{i}" for i in range(n)]
    ballots = {}
    for voter in eligible:
        choice = draw(st.integers(0, 3))
        if choice == 0:
            continue  # abstain
        if choice == 1:
            ballots[voter] = YesNo(draw(st.booleans()))
        else:
            others = [u for u in eligible if u != voter]
            if not others:
                ballots[voter] = YesNo(True)
            else:
                ballots[voter] = Delegate(draw(st.sampled_from(others)))
    return eligible, ballots


@settings(max_examples=250, deadline=None)
@given(delegation_graphs())
def test_liquid_weight_conservation_vs_oracle(graph):
    eligible, ballots = graph
    result = liquid_check(ballots, eligible, final=True)
    out = result.outputs
    assert out["yes_weight"] + out["no_weight"] + out["discarded_weight"] == len(eligible)
    oracle_ballots = {
        voter: (content.value if isinstance(content, YesNo) else content.target)
        for voter, content in ballots.items()
    }
    assert (out["yes_weight"], out["no_weight"], out["discarded_weight"]) == \
        liquid_weights(oracle_ballots, eligible)
