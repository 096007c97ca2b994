import pytest

from agora import ComponentKind
from agora.errors import UnknownChannel, UnknownDecorator, UnknownRole, UnknownUser
from agora.procedures import Ballot, YesNo
from agora.stdlib import (
    FILTER_BEHAVIORS,
    HookContext,
    apply_execution,
    decorator_hooks,
    filter_command_with_user_list,
    filter_text_starts_with,
)

H = 3_600_000  # one hour in ms


# --- command-with-user-list filter ---------------------------------------------

def test_command_with_user_list_matches(community):
    users = filter_command_with_user_list("%voteadmin alice, bob, carol",
                                          "%voteadmin", community)
    assert users == ["alice", "bob", "carol"]


def test_command_with_unknown_member_rejected(community):
    assert filter_command_with_user_list("%voteadmin alice, zoe",
                                         "%voteadmin", community) is None


def test_command_plain_text_rejected(community):
    assert filter_command_with_user_list("hello world", "%voteadmin", community) is None


def test_command_requires_whitespace_and_users(community):
    assert filter_command_with_user_list("%voteadmin", "%voteadmin", community) is None
    assert filter_command_with_user_list("%voteadminalice", "%voteadmin", community) is None


def test_command_duplicates_rejected(community):
    assert filter_command_with_user_list("%voteadmin alice, Alice",
                                         "%voteadmin", community) is None


def test_command_case_insensitive_resolution(community):
    users = filter_command_with_user_list("%voteadmin ALICE, Bob",
                                          "%voteadmin", community)
    assert users == ["alice", "bob"]


# --- text starts-with filter ------------------------------------------------------

def test_starts_with_first_token():
    assert filter_text_starts_with("!mods please help", "!mods")
    assert filter_text_starts_with("!modsplus extra", "!mods")  # prefix of first token
    assert not filter_text_starts_with("please !mods", "!mods")


def test_starts_with_empty_text_never_matches():
    assert not filter_text_starts_with("", "!mods")
    assert not filter_text_starts_with("   ", "")


def test_starts_with_empty_word_matches_all():
    assert filter_text_starts_with("anything", "")


# --- filter behaviors are pure predicates over one field ----------------------------

def test_filters_are_pure(community):
    behavior = FILTER_BEHAVIORS["filter.user_has_role"]
    first = behavior("bob", {"role": "base_user"}, community)
    second = behavior("bob", {"role": "base_user"}, community)
    assert first == second
    assert first.matched


def test_stdlib_descriptor_audit(registry):
    for desc in registry.by_kind(ComponentKind.FILTER):
        assert desc.applies_to is not None  # exactly one field entity per filter
        assert desc.behavior in FILTER_BEHAVIORS
    for desc in registry.components.values():
        names = [s.name for s in desc.settings] + [v.name for v in desc.variables]
        assert len(names) == len(set(names))


# --- decorator hooks --------------------------------------------------------------

class FakeProposal:
    def __init__(self, opened_at=0, eligible=(), ballots=()):
        self.opened_at = opened_at
        self.eligible = list(eligible)
        self.ballots = {v: Ballot(voter=v, content=YesNo(True)) for v in ballots}


def ctx(proposal, now, settings, community=None, state=None):
    return HookContext(proposal=proposal, community=community, now=now,
                       setting=lambda name: settings[name],
                       state=state if state is not None else {})


def test_duration_guards_until_expiry():
    hooks = decorator_hooks("Duration", {})
    proposal = FakeProposal(opened_at=0)
    assert hooks.guard(ctx(proposal, now=71 * H, settings={"duration": 72 * H}))
    assert not hooks.guard(ctx(proposal, now=72 * H, settings={"duration": 72 * H}))
    assert hooks.tick(ctx(proposal, now=72 * H, settings={"duration": 72 * H})).close
    assert not hooks.tick(ctx(proposal, now=1, settings={"duration": 72 * H})).close


def test_notify_non_voters_fires_once():
    hooks = decorator_hooks("NotifyNonVoters", {})
    proposal = FakeProposal(opened_at=0, eligible=["a", "b", "c", "d", "e"],
                            ballots=["a", "b"])
    state = {}
    settings = {"at_offset": 24 * H, "message": "please vote"}
    early = hooks.tick(ctx(proposal, now=23 * H, settings=settings, state=state))
    assert early.requests == []
    due = hooks.tick(ctx(proposal, now=25 * H, settings=settings, state=state))
    assert [(name, s["user"]) for name, s in due.requests] == [
        ("DirectMessage", "c"), ("DirectMessage", "d"), ("DirectMessage", "e")]
    again = hooks.tick(ctx(proposal, now=26 * H, settings=settings, state=state))
    assert again.requests == []


def test_require_all_votes_guard():
    hooks = decorator_hooks("RequireAllVotes", {})
    partial = FakeProposal(eligible=["a", "b"], ballots=["a"])
    complete = FakeProposal(eligible=["a", "b"], ballots=["a", "b"])
    assert hooks.guard(ctx(partial, now=0, settings={}))
    assert not hooks.guard(ctx(complete, now=0, settings={}))


def test_delay_checks_guard():
    hooks = decorator_hooks("DelayChecks", {})
    proposal = FakeProposal(opened_at=100)
    assert hooks.guard(ctx(proposal, now=150, settings={"delay": 100}))
    assert not hooks.guard(ctx(proposal, now=200, settings={"delay": 100}))


def test_announce_start_hook():
    hooks = decorator_hooks("AnnounceStart", {})
    requests = hooks.start(ctx(FakeProposal(), now=0,
                               settings={"channel": "general", "message": "vote!"}))
    assert requests == [("PostMessage", {"channel": "general", "text": "vote!"})]


def test_unknown_decorator():
    with pytest.raises(UnknownDecorator):
        decorator_hooks("NoSuchDecorator", {})


# --- executions -------------------------------------------------------------------

def test_post_message_execution(community):
    info = apply_execution("PostMessage", {"channel": "general",
                                           "text": "Jury of 3: 2 yes"}, community)
    msg = community.messages[-1]
    assert info == {"message": msg.id}
    assert msg.channel == "general" and msg.text == "Jury of 3: 2 yes"


def test_grant_role_execution(community):
    apply_execution("GrantRole", {"user": "bob", "role": "admin"}, community)
    assert "admin" in community.users["bob"].roles
    # idempotent on re-grant
    apply_execution("GrantRole", {"user": "bob", "role": "admin"}, community)
    assert "admin" in community.users["bob"].roles


def test_invite_idempotent(community):
    before = set(community.channels["product"].members)
    assert "alice" in before
    apply_execution("InviteToChannel", {"channel": "product", "user": "alice"},
                    community)
    assert community.channels["product"].members == before


def test_remove_and_revoke(community):
    apply_execution("RemoveFromChannel", {"channel": "product", "user": "carol"},
                    community)
    assert "carol" not in community.channels["product"].members
    apply_execution("RevokeRole", {"user": "erin", "role": "moderator"}, community)
    assert "moderator" not in community.users["erin"].roles


def test_direct_message_execution(community):
    apply_execution("DirectMessage", {"user": "dave", "text": "hi"}, community)
    assert community.messages[-1].channel == "@dave"


def test_edit_document_execution(community):
    apply_execution("EditDocument", {"document": "rules", "text": "new rules"},
                    community)
    assert community.documents["rules"] == "new rules"


def test_mention_users_execution(community):
    apply_execution("MentionUsers", {"channel": "general", "users": ["alice", "bob"]},
                    community)
    assert community.messages[-1].text == "@alice @bob"


def test_execution_errors(community):
    with pytest.raises(UnknownChannel):
        apply_execution("PostMessage", {"channel": "nope", "text": "x"}, community)
    with pytest.raises(UnknownUser):
        apply_execution("DirectMessage", {"user": "zoe", "text": "x"}, community)
    with pytest.raises(UnknownRole):
        apply_execution("GrantRole", {"user": "bob", "role": "emperor"}, community)
