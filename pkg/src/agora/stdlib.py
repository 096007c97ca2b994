"""The shipped component library: base actions, filters, decorators, executions.

Descriptors here are data; each binds to a built-in behavior by name. Filter
behaviors are pure predicates over one action field; executions and base-action
appliers are the only code that mutates a community.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .community import CommunityState
from .entities import Entity, ValueType
from .errors import (
    UnknownChannel,
    UnknownDecorator,
    UnknownDocument,
    UnknownRole,
    UnknownUser,
)
from .procedures import PROCEDURE_BEHAVIORS
from .registry import (
    ComponentDescriptor,
    ComponentKind,
    Registry,
    SettingSpec,
    VariableSpec,
    serialize_library,
)

STDLIB_VERSION = 1


# --- filter behaviors ---------------------------------------------------------

@dataclass(frozen=True)
class FilterMatch:
    matched: bool
    exports: dict[str, Any] = field(default_factory=dict)


NO_MATCH = FilterMatch(False)


def filter_text_starts_with(text: str, word: str) -> bool:
    """Prefix match on the first whitespace-delimited token, case-sensitive.

    Text without a first token never matches; an empty word matches any text
    that has one.
    """
    tokens = text.split()
    if not tokens:
        return False
    return tokens[0].startswith(word)


def filter_command_with_user_list(text: str, command: str,
                                  community: CommunityState) -> Optional[list[str]]:
    """Match `command` followed by a comma-separated list of community users.

    Display names resolve case-insensitively and must name distinct members;
    returns the resolved user ids in listed order, or None on no-match.
    """
    if not text.startswith(command):
        return None
    rest = text[len(command):]
    if not rest or not rest[0].isspace():
        return None
    names = [part.strip() for part in rest.strip().split(",")]
    if not names or any(not n for n in names):
        return None
    by_display: dict[str, str] = {}
    ambiguous: set[str] = set()
    for uid, user in community.users.items():
        key = user.display_name.lower()
        if key in by_display:
            ambiguous.add(key)
        by_display[key] = uid
    users = []
    for name in names:
        key = name.lower()
        if key not in by_display or key in ambiguous:
            return None
        users.append(by_display[key])
    if len(set(users)) != len(users):
        return None
    return users


def _f_user_has_role(value, settings, community):
    user = community.users.get(value)
    return FilterMatch(user is not None and settings["role"] in user.roles)


def _f_user_is(value, settings, community):
    return FilterMatch(value == settings["user"])


def _f_user_not_in(value, settings, community):
    return FilterMatch(value not in settings["list"])


def _f_channel_is(value, settings, community):
    return FilterMatch(value == settings["channel"])


def _f_channel_name_starts_with(value, settings, community):
    channel = community.channels.get(value)
    return FilterMatch(channel is not None and channel.name.startswith(settings["prefix"]))


def _f_text_starts_with(value, settings, community):
    return FilterMatch(filter_text_starts_with(value, settings["word"]))


def _f_text_contains(value, settings, community):
    return FilterMatch(settings["word"] in value)


def _f_text_command_with_user_list(value, settings, community):
    users = filter_command_with_user_list(value, settings["command"], community)
    if users is None:
        return NO_MATCH
    return FilterMatch(True, {"users": users})


def _f_text_length_at_least(value, settings, community):
    return FilterMatch(len(value) >= settings["n"])


def _f_timestamp_after(value, settings, community):
    return FilterMatch(value > settings["t"])


def _f_timestamp_before(value, settings, community):
    return FilterMatch(value < settings["t"])


def _f_starts_with_plain(value, settings, community):
    return FilterMatch(value.startswith(settings["prefix"]))


def _f_emoji_is(value, settings, community):
    return FilterMatch(value == settings["emoji"])


def _f_role_is(value, settings, community):
    return FilterMatch(value == settings["role"])


def _f_document_is(value, settings, community):
    return FilterMatch(value == settings["document"])


FILTER_BEHAVIORS: dict[str, Callable[[Any, dict, CommunityState], FilterMatch]] = {
    "filter.user_has_role": _f_user_has_role,
    "filter.user_is": _f_user_is,
    "filter.user_not_in": _f_user_not_in,
    "filter.channel_is": _f_channel_is,
    "filter.channel_name_starts_with": _f_channel_name_starts_with,
    "filter.text_starts_with": _f_text_starts_with,
    "filter.text_contains": _f_text_contains,
    "filter.text_command_with_user_list": _f_text_command_with_user_list,
    "filter.text_length_at_least": _f_text_length_at_least,
    "filter.timestamp_after": _f_timestamp_after,
    "filter.timestamp_before": _f_timestamp_before,
    "filter.new_name_starts_with": _f_starts_with_plain,
    "filter.emoji_is": _f_emoji_is,
    "filter.role_is": _f_role_is,
    "filter.document_is": _f_document_is,
}


# --- decorator behaviors --------------------------------------------------------

@dataclass
class HookContext:
    """What a decorator hook may see: the proposal, the clock, its settings."""

    proposal: Any
    community: CommunityState
    now: int
    setting: Callable[[str], Any]  # resolved value (templates render against live slots)
    state: dict                    # per-proposal scratch, survives across ticks


@dataclass
class TickResult:
    requests: list[tuple[str, dict]] = field(default_factory=list)
    close: bool = False  # force a final evaluation now


@dataclass
class DecoratorHooks:
    guard: Optional[Callable[[HookContext], bool]] = None  # True forces Pending
    start: Optional[Callable[[HookContext], list[tuple[str, dict]]]] = None
    vote: Optional[Callable[[HookContext], list[tuple[str, dict]]]] = None
    tick: Optional[Callable[[HookContext], TickResult]] = None


def _duration_hooks() -> DecoratorHooks:
    def guard(ctx):
        return ctx.now < ctx.proposal.opened_at + ctx.setting("duration")

    def tick(ctx):
        if ctx.now >= ctx.proposal.opened_at + ctx.setting("duration"):
            return TickResult(close=True)
        return TickResult()

    return DecoratorHooks(guard=guard, tick=tick)


def _notify_non_voters_hooks() -> DecoratorHooks:
    def tick(ctx):
        if ctx.state.get("fired"):
            return TickResult()
        if ctx.now < ctx.proposal.opened_at + ctx.setting("at_offset"):
            return TickResult()
        ctx.state["fired"] = True  # reminders go out once, at the offset
        message = ctx.setting("message")
        silent = [u for u in ctx.proposal.eligible if u not in ctx.proposal.ballots]
        return TickResult(requests=[("DirectMessage", {"user": u, "text": message})
                                    for u in sorted(silent)])

    return DecoratorHooks(tick=tick)


def _require_all_votes_hooks() -> DecoratorHooks:
    def guard(ctx):
        return len(ctx.proposal.ballots) < len(ctx.proposal.eligible)

    return DecoratorHooks(guard=guard)


def _delay_checks_hooks() -> DecoratorHooks:
    def guard(ctx):
        return ctx.now < ctx.proposal.opened_at + ctx.setting("delay")

    return DecoratorHooks(guard=guard)


def _announce_start_hooks() -> DecoratorHooks:
    def start(ctx):
        return [("PostMessage", {"channel": ctx.setting("channel"),
                                 "text": ctx.setting("message")})]

    return DecoratorHooks(start=start)


DECORATOR_BEHAVIORS: dict[str, Callable[[], DecoratorHooks]] = {
    "decorator.duration": _duration_hooks,
    "decorator.notify_non_voters": _notify_non_voters_hooks,
    "decorator.require_all_votes": _require_all_votes_hooks,
    "decorator.delay_checks": _delay_checks_hooks,
    "decorator.announce_start": _announce_start_hooks,
}

_DECORATOR_NAME_TO_BEHAVIOR = {
    "Duration": "decorator.duration",
    "NotifyNonVoters": "decorator.notify_non_voters",
    "RequireAllVotes": "decorator.require_all_votes",
    "DelayChecks": "decorator.delay_checks",
    "AnnounceStart": "decorator.announce_start",
}


def decorator_hooks(name: str, settings: dict) -> DecoratorHooks:
    """Hooks for a stdlib decorator by component name, with plain-value settings."""
    behavior = _DECORATOR_NAME_TO_BEHAVIOR.get(name)
    if behavior is None:
        raise UnknownDecorator(f"no decorator {name!r}")
    return DECORATOR_BEHAVIORS[behavior]()


# --- executions -----------------------------------------------------------------

def _require_channel(community: CommunityState, channel: str):
    if channel not in community.channels:
        raise UnknownChannel(f"no channel {channel!r}")
    return community.channels[channel]


def _require_user(community: CommunityState, user: str):
    if user not in community.users:
        raise UnknownUser(f"no user {user!r}")
    return community.users[user]


def _x_post_message(settings, community):
    _require_channel(community, settings["channel"])
    msg = community.post_message(settings["channel"], "system", settings["text"])
    return {"message": msg.id}


def _x_direct_message(settings, community):
    _require_user(community, settings["user"])
    # DMs live in the message log under the receiver's address, not a channel id
    msg = community.post_message(f"@{settings['user']}", "system", settings["text"])
    return {"message": msg.id}


def _x_rename_channel(settings, community):
    channel = _require_channel(community, settings["channel"])
    channel.name = settings["new_name"]
    return {}


def _x_invite_to_channel(settings, community):
    channel = _require_channel(community, settings["channel"])
    _require_user(community, settings["user"])
    channel.members.add(settings["user"])  # re-inviting a member is a no-op
    return {}


def _x_remove_from_channel(settings, community):
    channel = _require_channel(community, settings["channel"])
    _require_user(community, settings["user"])
    channel.members.discard(settings["user"])
    return {}


def _x_grant_role(settings, community):
    user = _require_user(community, settings["user"])
    if settings["role"] not in community.roles:
        raise UnknownRole(f"no role {settings['role']!r}")
    user.roles.add(settings["role"])
    return {}


def _x_revoke_role(settings, community):
    user = _require_user(community, settings["user"])
    if settings["role"] not in community.roles:
        raise UnknownRole(f"no role {settings['role']!r}")
    user.roles.discard(settings["role"])
    return {}


def _x_edit_document(settings, community):
    if settings["document"] not in community.documents:
        raise UnknownDocument(f"no document {settings['document']!r}")
    community.documents[settings["document"]] = settings["text"]
    return {}


def _x_mention_users(settings, community):
    _require_channel(community, settings["channel"])
    mentions = " ".join("@" + community.display_user(u) for u in settings["users"])
    msg = community.post_message(settings["channel"], "system", mentions)
    return {"message": msg.id}


EXECUTION_BEHAVIORS: dict[str, Callable[[dict, CommunityState], dict]] = {
    "execution.post_message": _x_post_message,
    "execution.direct_message": _x_direct_message,
    "execution.rename_channel": _x_rename_channel,
    "execution.invite_to_channel": _x_invite_to_channel,
    "execution.remove_from_channel": _x_remove_from_channel,
    "execution.grant_role": _x_grant_role,
    "execution.revoke_role": _x_revoke_role,
    "execution.edit_document": _x_edit_document,
    "execution.mention_users": _x_mention_users,
}

_EXECUTION_NAME_TO_BEHAVIOR = {
    "PostMessage": "execution.post_message",
    "DirectMessage": "execution.direct_message",
    "RenameChannel": "execution.rename_channel",
    "InviteToChannel": "execution.invite_to_channel",
    "RemoveFromChannel": "execution.remove_from_channel",
    "GrantRole": "execution.grant_role",
    "RevokeRole": "execution.revoke_role",
    "EditDocument": "execution.edit_document",
    "MentionUsers": "execution.mention_users",
}


def apply_execution(name: str, settings: dict, community: CommunityState) -> dict:
    """Apply one fully-substituted execution to the community; returns emit info."""
    behavior = _EXECUTION_NAME_TO_BEHAVIOR.get(name)
    if behavior is None:
        raise UnknownUser(f"no execution {name!r}")  # pragma: no cover - compile links first
    return EXECUTION_BEHAVIORS[behavior](settings, community)


# --- base action appliers ---------------------------------------------------------

def _a_rename_channel(fields, community):
    channel = _require_channel(community, fields["channel"])
    channel.name = fields["new_name"]


def _a_post_message(fields, community):
    _require_channel(community, fields["channel"])
    community.post_message(fields["channel"], fields["initiator"], fields["text"])


def _a_invite_to_channel(fields, community):
    channel = _require_channel(community, fields["channel"])
    _require_user(community, fields["invitee"])
    channel.members.add(fields["invitee"])


def _a_create_channel(fields, community):
    seq = len(community.channels) + 1
    cid = f"c{seq}"
    while cid in community.channels:
        seq += 1
        cid = f"c{seq}"
    from .community import Channel
    community.channels[cid] = Channel(name=fields["name"], members={fields["initiator"]})


def _a_add_reaction(fields, community):
    for msg in community.messages:
        if msg.id == fields["message_ref"]:
            msg.reactions.setdefault(fields["emoji"], set()).add(fields["initiator"])
            return
    raise UnknownDocument(f"no message {fields['message_ref']!r}")


def _a_join_community(fields, community):
    from .community import User
    if fields["user"] not in community.users:
        community.users[fields["user"]] = User(display_name=fields["user"])


def _a_grant_role(fields, community):
    user = _require_user(community, fields["user"])
    if fields["role"] not in community.roles:
        raise UnknownRole(f"no role {fields['role']!r}")
    user.roles.add(fields["role"])


def _a_edit_document(fields, community):
    if fields["document"] not in community.documents:
        raise UnknownDocument(f"no document {fields['document']!r}")
    community.documents[fields["document"]] = fields["new_text"]


ACTION_BEHAVIORS: dict[str, Callable[[dict, CommunityState], None]] = {
    "action.rename_channel": _a_rename_channel,
    "action.post_message": _a_post_message,
    "action.invite_to_channel": _a_invite_to_channel,
    "action.create_channel": _a_create_channel,
    "action.add_reaction": _a_add_reaction,
    "action.join_community": _a_join_community,
    "action.grant_role": _a_grant_role,
    "action.edit_document": _a_edit_document,
}


def apply_base_action(kind: str, fields: dict, community: CommunityState,
                      registry: Registry) -> None:
    """Apply a (pass-through or vote-approved) platform action to the community."""
    desc = registry.lookup(ComponentKind.BASE_ACTION, kind)
    ACTION_BEHAVIORS[desc.behavior](fields, community)


def behavior_names() -> frozenset[str]:
    return frozenset(FILTER_BEHAVIORS) | frozenset(PROCEDURE_BEHAVIORS) \
        | frozenset(DECORATOR_BEHAVIORS) | frozenset(EXECUTION_BEHAVIORS) \
        | frozenset(ACTION_BEHAVIORS)


# --- descriptors -------------------------------------------------------------------

def _s(name, label, entity, value_type=ValueType.SCALAR, required=True, **kw):
    return SettingSpec(name=name, label=label, entity=entity, value_type=value_type,
                       required=required, **kw)


def _v(name, label, entity, value_type=ValueType.SCALAR):
    return VariableSpec(name=name, label=label, entity=entity, value_type=value_type)


def _base_action(name, label, description, behavior, variables, source_view):
    return ComponentDescriptor(kind=ComponentKind.BASE_ACTION, name=name, label=label,
                               description=description, behavior=behavior,
                               variables=tuple(variables), source_view=source_view)


def _filter(name, label, description, behavior, applies_to, settings,
            variables=(), source_view=""):
    return ComponentDescriptor(kind=ComponentKind.FILTER, name=name, label=label,
                               description=description, behavior=behavior,
                               applies_to=applies_to, settings=tuple(settings),
                               variables=tuple(variables), source_view=source_view)


_VOTE_SETTINGS = [
    _s("vote_channel", "the channel where the vote takes place", Entity.CHANNEL),
    _s("eligible_voters", "who may vote (defaults to the vote channel's members)",
       Entity.USER_LIST, required=False),
]


def _descriptors() -> list[ComponentDescriptor]:
    out: list[ComponentDescriptor] = []

    out += [
        _base_action(
            "RenameChannel", "a channel is renamed",
            "Someone renames a channel in the community.",
            "action.rename_channel",
            [_v("initiator", "the user who renamed the channel", Entity.COMMUNITY_USER),
             _v("channel", "the channel where the message was renamed", Entity.CHANNEL),
             _v("new_name", "the new channel name", Entity.TEXT)],
            "# event fields: initiator, channel, new_name",
        ),
        _base_action(
            "PostMessage", "a message is posted",
            "Someone posts a message in a channel.",
            "action.post_message",
            [_v("initiator", "the user who posted the message", Entity.COMMUNITY_USER),
             _v("channel", "the channel where the message was posted", Entity.CHANNEL),
             _v("text", "the text of the message", Entity.TEXT)],
            "# event fields: initiator, channel, text",
        ),
        _base_action(
            "InviteToChannel", "a user is invited to a channel",
            "Someone invites another member into a channel.",
            "action.invite_to_channel",
            [_v("initiator", "the user who sent the invitation", Entity.COMMUNITY_USER),
             _v("channel", "the channel the invitation is for", Entity.CHANNEL),
             _v("invitee", "the user who was invited", Entity.COMMUNITY_USER)],
            "# event fields: initiator, channel, invitee",
        ),
        _base_action(
            "CreateChannel", "a channel is created",
            "Someone creates a new channel.",
            "action.create_channel",
            [_v("initiator", "the user who created the channel", Entity.COMMUNITY_USER),
             _v("name", "the name of the new channel", Entity.TEXT)],
            "# event fields: initiator, name",
        ),
        _base_action(
            "AddReaction", "an emoji reaction is added",
            "Someone reacts to a message with an emoji.",
            "action.add_reaction",
            [_v("initiator", "the user who reacted", Entity.COMMUNITY_USER),
             _v("channel", "the channel of the message", Entity.CHANNEL),
             _v("message_ref", "the id of the message reacted to", Entity.TEXT),
             _v("emoji", "the emoji used", Entity.TEXT)],
            "# event fields: initiator, channel, message_ref, emoji",
        ),
        _base_action(
            "JoinCommunity", "a user joins the community",
            "A new member joins the community.",
            "action.join_community",
            [_v("user", "the user who joined", Entity.COMMUNITY_USER)],
            "# event fields: user",
        ),
        _base_action(
            "GrantRole", "a role is granted",
            "Someone grants a role to a member.",
            "action.grant_role",
            [_v("initiator", "the user granting the role", Entity.COMMUNITY_USER),
             _v("user", "the user receiving the role", Entity.COMMUNITY_USER),
             _v("role", "the role granted", Entity.COMMUNITY_ROLE)],
            "# event fields: initiator, user, role",
        ),
        _base_action(
            "EditDocument", "a community document is edited",
            "Someone edits a community document.",
            "action.edit_document",
            [_v("initiator", "the user editing the document", Entity.COMMUNITY_USER),
             _v("document", "the document edited", Entity.DOCUMENT),
             _v("new_text", "the new document text", Entity.TEXT)],
            "# event fields: initiator, document, new_text",
        ),
    ]

    out += [
        _filter("User.HasRole", "user has a given role",
                "Only users holding the specified role.",
                "filter.user_has_role", Entity.COMMUNITY_USER,
                [_s("role", "the required role", Entity.COMMUNITY_ROLE)],
                source_view="match = {role} in roles_of(value)"),
        _filter("User.Is", "user is a specific member",
                "Only the specified user.",
                "filter.user_is", Entity.COMMUNITY_USER,
                [_s("user", "the required user", Entity.COMMUNITY_USER)],
                source_view="match = value == {user}"),
        _filter("User.NotIn", "user is not in a list",
                "Only users outside the specified list.",
                "filter.user_not_in", Entity.COMMUNITY_USER,
                [_s("list", "the excluded users", Entity.USER_LIST)],
                source_view="match = value not in {list}"),
        _filter("Channel.Is", "channel is a specific channel",
                "Only the specified channel.",
                "filter.channel_is", Entity.CHANNEL,
                [_s("channel", "the required channel", Entity.CHANNEL)],
                source_view="match = value == {channel}"),
        _filter("Channel.NameStartsWith", "channel name starts with a prefix",
                "Only channels whose display name starts with the prefix.",
                "filter.channel_name_starts_with", Entity.CHANNEL,
                [_s("prefix", "the required prefix", Entity.TEXT)],
                source_view="match = name_of(value).startswith({prefix})"),
        _filter("Text.StartsWith", "text starts with a word",
                "Only texts whose first word starts with the specified word.",
                "filter.text_starts_with", Entity.TEXT,
                [_s("word", "the required first word", Entity.TEXT)],
                source_view="match = first_token(value).startswith({word})"),
        _filter("Text.Contains", "text contains a word",
                "Only texts containing the specified word.",
                "filter.text_contains", Entity.TEXT,
                [_s("word", "the required substring", Entity.TEXT)],
                source_view="match = {word} in value"),
        _filter("Text.CommandWithUserList", "text is a command followed by users",
                "Only texts that begin with a command and are followed by a "
                "comma-separated list of community users.",
                "filter.text_command_with_user_list", Entity.TEXT,
                [_s("command", "the command word", Entity.TEXT)],
                variables=[_v("users", "the users listed in the message",
                              Entity.USER_LIST)],
                source_view="users = parse_user_list(value, command={command})\n"
                            "match = users is not None"),
        _filter("Text.LengthAtLeast", "text has a minimum length",
                "Only texts at least this many characters long.",
                "filter.text_length_at_least", Entity.TEXT,
                [_s("n", "the minimum length", Entity.NUMBER)],
                source_view="match = len(value) >= {n}"),
        _filter("Timestamp.After", "timestamp is after a moment",
                "Only timestamps strictly after the given one.",
                "filter.timestamp_after", Entity.TIMESTAMP,
                [_s("t", "the earliest timestamp", Entity.TIMESTAMP)],
                source_view="match = value > {t}"),
        _filter("Timestamp.Before", "timestamp is before a moment",
                "Only timestamps strictly before the given one.",
                "filter.timestamp_before", Entity.TIMESTAMP,
                [_s("t", "the latest timestamp", Entity.TIMESTAMP)],
                source_view="match = value < {t}"),
        _filter("NewName.StartsWith", "new name starts with a prefix",
                "Only new names starting with the specified prefix.",
                "filter.new_name_starts_with", Entity.TEXT,
                [_s("prefix", "the required prefix", Entity.TEXT)],
                source_view="match = value.startswith({prefix})"),
        _filter("Emoji.Is", "emoji is a specific one",
                "Only the specified emoji.",
                "filter.emoji_is", Entity.TEXT,
                [_s("emoji", "the required emoji", Entity.TEXT)],
                source_view="match = value == {emoji}"),
        _filter("Role.Is", "role is a specific one",
                "Only the specified role.",
                "filter.role_is", Entity.COMMUNITY_ROLE,
                [_s("role", "the required role", Entity.COMMUNITY_ROLE)],
                source_view="match = value == {role}"),
        _filter("Document.Is", "document is a specific one",
                "Only the specified document.",
                "filter.document_is", Entity.DOCUMENT,
                [_s("document", "the required document", Entity.DOCUMENT)],
                source_view="match = value == {document}"),
    ]

    out += [
        ComponentDescriptor(
            kind=ComponentKind.BASE_PROCEDURE, name="Majority",
            label="majority vote",
            description="Passes once yes votes reach the threshold share of "
                        "eligible voters; fails once that is unreachable.",
            behavior="procedure.majority",
            settings=tuple([_s("threshold", "the required share of yes votes",
                               Entity.NUMBER)] + _VOTE_SETTINGS),
            variables=(_v("yes_votes", "the number of final yes votes", Entity.NUMBER),
                       _v("no_votes", "the number of final no votes", Entity.NUMBER)),
            source_view="bound = ceil({threshold} * len(eligible))\n"
                        "if yes_votes(ballots) >= bound: return PASSED\n"
                        "if yes_votes(ballots) + uncast(eligible, ballots) < bound: "
                        "return FAILED\nreturn PENDING",
        ),
        ComponentDescriptor(
            kind=ComponentKind.BASE_PROCEDURE, name="Consensus",
            label="consensus vote",
            description="Every eligible voter must agree; a single no fails the vote.",
            behavior="procedure.consensus",
            settings=tuple(_VOTE_SETTINGS),
            variables=(_v("yes_votes", "the number of final yes votes", Entity.NUMBER),
                       _v("no_votes", "the number of final no votes", Entity.NUMBER)),
            source_view="if yes_votes(ballots) == len(eligible): return PASSED\n"
                        "if no_votes(ballots) > 0: return FAILED\nreturn PENDING",
        ),
        ComponentDescriptor(
            kind=ComponentKind.BASE_PROCEDURE, name="Jury",
            label="jury vote",
            description="A random jury is sampled from the pool; passes at the "
                        "required count of affirmative votes.",
            behavior="procedure.jury",
            settings=tuple([_s("no_of_jurors", "the number of jurors", Entity.NUMBER),
                            _s("threshold", "the required count of yes votes",
                               Entity.NUMBER)] + _VOTE_SETTINGS),
            variables=(_v("jurors", "the selected jurors", Entity.USER_LIST),
                       _v("yes_votes", "the number of final yes votes", Entity.NUMBER),
                       _v("no_votes", "the number of final no votes", Entity.NUMBER)),
            source_view="jurors = sample(pool, k={no_of_jurors}, rng=proposal_rng)\n"
                        "announce({vote_channel}, jurors)\n"
                        "if yes_votes(ballots) >= {threshold}: return PASSED\n"
                        "if yes_votes(ballots) + uncast(jurors, ballots) < {threshold}: "
                        "return FAILED\nreturn PENDING",
        ),
        ComponentDescriptor(
            kind=ComponentKind.BASE_PROCEDURE, name="BenevolentDictator",
            label="benevolent dictator",
            description="One designated member decides alone.",
            behavior="procedure.dictator",
            settings=(_s("dictator", "the deciding member", Entity.COMMUNITY_USER),),
            source_view="if voted({dictator}): return PASSED if yes else FAILED\n"
                        "return PENDING",
        ),
        ComponentDescriptor(
            kind=ComponentKind.BASE_PROCEDURE, name="RankedVoting",
            label="ranked vote",
            description="Voters rank every candidate; the winner emerges by "
                        "instant runoff.",
            behavior="procedure.ranked",
            settings=tuple([_s("candidates", "the candidates to rank",
                               Entity.USER_LIST)] + _VOTE_SETTINGS),
            variables=(_v("winner", "the winning candidate", Entity.COMMUNITY_USER),
                       _v("rounds", "the number of runoff rounds", Entity.NUMBER)),
            source_view="while no candidate holds a strict majority:\n"
                        "    eliminate fewest-first-choice candidate "
                        "(ties: smallest id)\n"
                        "winner, rounds = last tally over {candidates}",
        ),
        ComponentDescriptor(
            kind=ComponentKind.BASE_PROCEDURE, name="QuadraticVoting",
            label="quadratic vote",
            description="Votes carry a signed magnitude that costs its square in "
                        "credits; passes on positive net support.",
            behavior="procedure.quadratic",
            settings=tuple([_s("budget", "credits available to each voter",
                               Entity.NUMBER)] + _VOTE_SETTINGS),
            variables=(_v("net_support", "the signed sum of all votes", Entity.NUMBER),),
            source_view="require magnitude**2 <= {budget} per ballot\n"
                        "net = sum(signed magnitudes)\n"
                        "return PASSED if net > 0 else FAILED",
        ),
        ComponentDescriptor(
            kind=ComponentKind.BASE_PROCEDURE, name="LiquidDemocracy",
            label="liquid democracy",
            description="Voters vote directly or delegate transitively; weight "
                        "flows to the terminal voter's choice.",
            behavior="procedure.liquid",
            settings=tuple(_VOTE_SETTINGS),
            variables=(_v("yes_weight", "the final yes weight", Entity.NUMBER),
                       _v("no_weight", "the final no weight", Entity.NUMBER),
                       _v("discarded_weight", "weight lost to cycles and abstainers",
                          Entity.NUMBER)),
            source_view="resolve transitive delegations (cycles discard weight)\n"
                        "return PASSED if yes_weight > no_weight else FAILED",
        ),
    ]

    out += [
        ComponentDescriptor(
            kind=ComponentKind.DECORATOR, name="Duration",
            label="fixed voting window",
            description="Keeps the vote open for a fixed duration, then closes it "
                        "with a final check.",
            behavior="decorator.duration",
            settings=(_s("duration", "voting window in milliseconds", Entity.NUMBER),),
            source_view="if now < opened_at + {duration}: return PENDING",
        ),
        ComponentDescriptor(
            kind=ComponentKind.DECORATOR, name="NotifyNonVoters",
            label="remind people who have not voted",
            description="Direct-messages eligible voters who have not voted yet, "
                        "once, at the given offset after the vote starts.",
            behavior="decorator.notify_non_voters",
            settings=(_s("message", "the reminder text", Entity.TEXT,
                         required=True, default="You have not voted yet. "
                         "Please cast your vote.", has_default=True),
                      _s("at_offset", "when to remind, in ms after the start",
                         Entity.NUMBER)),
            source_view="at opened_at + {at_offset}: dm(eligible - voted, {message})",
        ),
        ComponentDescriptor(
            kind=ComponentKind.DECORATOR, name="RequireAllVotes",
            label="require every eligible voter to vote",
            description="Holds the result until every eligible voter has cast a "
                        "ballot.",
            behavior="decorator.require_all_votes",
            source_view="if len(ballots) < len(eligible): return PENDING",
        ),
        ComponentDescriptor(
            kind=ComponentKind.DECORATOR, name="DelayChecks",
            label="delay result checks",
            description="Suppresses any result before the given delay has passed.",
            behavior="decorator.delay_checks",
            settings=(_s("delay", "delay in milliseconds", Entity.NUMBER),),
            source_view="if now < opened_at + {delay}: return PENDING",
        ),
        ComponentDescriptor(
            kind=ComponentKind.DECORATOR, name="AnnounceStart",
            label="announce the procedure start",
            description="Posts a message to a channel when the procedure starts.",
            behavior="decorator.announce_start",
            settings=(_s("channel", "where to announce", Entity.CHANNEL),
                      _s("message", "the announcement text", Entity.TEXT)),
            source_view="on start: post_message(channel={channel}, text={message})",
        ),
    ]

    def execution(name, label, description, behavior, settings, source_view):
        return ComponentDescriptor(kind=ComponentKind.EXECUTION, name=name, label=label,
                                   description=description, behavior=behavior,
                                   settings=tuple(settings), source_view=source_view)

    out += [
        execution("PostMessage", "post a message",
                  "Posts a message to a channel.", "execution.post_message",
                  [_s("channel", "the channel to post in", Entity.CHANNEL),
                   _s("text", "the message text", Entity.TEXT)],
                  "post_message(channel={channel}, text={text})"),
        execution("DirectMessage", "send a direct message",
                  "Sends a direct message to a user.", "execution.direct_message",
                  [_s("user", "the user to message", Entity.COMMUNITY_USER),
                   _s("text", "the message text", Entity.TEXT)],
                  "direct_message(user={user}, text={text})"),
        execution("RenameChannel", "rename a channel",
                  "Renames a channel.", "execution.rename_channel",
                  [_s("channel", "the channel to rename", Entity.CHANNEL),
                   _s("new_name", "the new name", Entity.TEXT)],
                  "rename_channel(channel={channel}, new_name={new_name})"),
        execution("InviteToChannel", "invite a user to a channel",
                  "Adds a user to a channel (no-op if already a member).",
                  "execution.invite_to_channel",
                  [_s("channel", "the channel", Entity.CHANNEL),
                   _s("user", "the user to invite", Entity.COMMUNITY_USER)],
                  "invite_to_channel(channel={channel}, user={user})"),
        execution("RemoveFromChannel", "remove a user from a channel",
                  "Removes a user from a channel (no-op if not a member).",
                  "execution.remove_from_channel",
                  [_s("channel", "the channel", Entity.CHANNEL),
                   _s("user", "the user to remove", Entity.COMMUNITY_USER)],
                  "remove_from_channel(channel={channel}, user={user})"),
        execution("GrantRole", "grant a role",
                  "Grants a role to a user (no-op if already held).",
                  "execution.grant_role",
                  [_s("user", "the user", Entity.COMMUNITY_USER),
                   _s("role", "the role to grant", Entity.COMMUNITY_ROLE)],
                  "grant_role(user={user}, role={role})"),
        execution("RevokeRole", "revoke a role",
                  "Revokes a role from a user (no-op if not held).",
                  "execution.revoke_role",
                  [_s("user", "the user", Entity.COMMUNITY_USER),
                   _s("role", "the role to revoke", Entity.COMMUNITY_ROLE)],
                  "revoke_role(user={user}, role={role})"),
        execution("EditDocument", "edit a community document",
                  "Replaces the text of a community document.",
                  "execution.edit_document",
                  [_s("document", "the document", Entity.DOCUMENT),
                   _s("text", "the new text", Entity.TEXT)],
                  "edit_document(document={document}, text={text})"),
        execution("MentionUsers", "mention users in a channel",
                  "Posts a message mentioning the given users.",
                  "execution.mention_users",
                  [_s("channel", "the channel to post in", Entity.CHANNEL),
                   _s("users", "the users to mention", Entity.USER_LIST)],
                  "mention_users(channel={channel}, users={users})"),
    ]
    return out


def stdlib_registry() -> Registry:
    components = {(d.kind, d.name): d for d in _descriptors()}
    return Registry(components=components, version=STDLIB_VERSION)


def stdlib_json() -> str:
    return serialize_library(stdlib_registry())
