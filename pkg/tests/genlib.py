"""Hypothesis strategies over the demo community and the built-in library."""

from __future__ import annotations

import hypothesis.strategies as st

from agora.policy import (
    CustomAction,
    CustomProcedure,
    ExecutionInstance,
    FilterInstance,
    PolicyDocument,
    setting_value_from_json,
)

USERS = ["alice", "bob", "carol", "dave", "erin"]
CHANNELS = ["general", "governance", "product"]
ROLES = ["base_user", "admin", "moderator"]
DOCUMENTS = ["rules"]

TEXTS = ["hello world", "", "%voteadmin alice, bob", "%voteadmin alice, zoe",
         "!mods please help", "admin decisions", "x" * 30, "%voteadmin"]

# per-field value pools for generated action events
FIELD_VALUES = {
    "initiator": USERS,
    "user": USERS,
    "invitee": USERS,
    "channel": CHANNELS,
    "new_name": ["#lounge", "#general-2", "zz"],
    "text": TEXTS,
    "name": ["#fresh", "team"],
    "role": ROLES,
    "document": DOCUMENTS,
    "new_text": ["updated rules", ""],
    "message_ref": ["m1", "m9"],
    "emoji": ["\N{THUMBS UP SIGN}", "\N{THUMBS DOWN SIGN}", "sparkles"],
}

ACTION_FIELDS = {
    "RenameChannel": ["initiator", "channel", "new_name"],
    "PostMessage": ["initiator", "channel", "text"],
    "InviteToChannel": ["initiator", "channel", "invitee"],
    "GrantRole": ["initiator", "user", "role"],
}

# filters applicable per (action, field), with literal setting generators
FILTER_CHOICES = {
    "initiator": [
        ("User.HasRole", lambda d: {"role": d(st.sampled_from(ROLES))}),
        ("User.Is", lambda d: {"user": d(st.sampled_from(USERS))}),
        ("User.NotIn", lambda d: {"list": d(st.lists(st.sampled_from(USERS),
                                                     max_size=3, unique=True))}),
    ],
    "user": [
        ("User.Is", lambda d: {"user": d(st.sampled_from(USERS))}),
    ],
    "invitee": [
        ("User.Is", lambda d: {"user": d(st.sampled_from(USERS))}),
        ("User.NotIn", lambda d: {"list": d(st.lists(st.sampled_from(USERS),
                                                     max_size=3, unique=True))}),
    ],
    "channel": [
        ("Channel.Is", lambda d: {"channel": d(st.sampled_from(CHANNELS))}),
        ("Channel.NameStartsWith", lambda d: {"prefix": d(st.sampled_from(
            ["#", "#g", "#pro", "zzz"]))}),
    ],
    "new_name": [
        ("NewName.StartsWith", lambda d: {"prefix": d(st.sampled_from(["#", "#lo", "q"]))}),
    ],
    "text": [
        ("Text.StartsWith", lambda d: {"word": d(st.sampled_from(
            ["%voteadmin", "!mods", "hello", ""]))}),
        ("Text.Contains", lambda d: {"word": d(st.sampled_from(["admin", "zz", "o"]))}),
        ("Text.LengthAtLeast", lambda d: {"n": d(st.integers(0, 25))}),
        ("Text.CommandWithUserList", lambda d: {"command": d(st.sampled_from(
            ["%voteadmin", "!elect"]))}),
    ],
    "role": [
        ("Role.Is", lambda d: {"role": d(st.sampled_from(ROLES))}),
    ],
}


@st.composite
def custom_actions(draw):
    kind = draw(st.sampled_from(sorted(ACTION_FIELDS)))
    filters = []
    for field in ACTION_FIELDS[kind]:
        if field not in FILTER_CHOICES or not draw(st.booleans()):
            continue
        name, settings_fn = draw(st.sampled_from(FILTER_CHOICES[field]))
        raw = settings_fn(draw)
        filters.append(FilterInstance(
            field=field, filter=name,
            settings={k: setting_value_from_json(v) for k, v in raw.items()}))
    return CustomAction(base_action=kind, filters=filters)


@st.composite
def action_events(draw, kind=None):
    kind = kind or draw(st.sampled_from(sorted(ACTION_FIELDS)))
    fields = {f: draw(st.sampled_from(FIELD_VALUES[f])) for f in ACTION_FIELDS[kind]}
    return kind, fields


@st.composite
def procedures_for(draw, action: CustomAction):
    """A plain majority procedure with a couple of executions referencing slots."""
    threshold = draw(st.sampled_from([0.5, 0.6, 1.0]))
    settings = {"threshold": threshold, "vote_channel": draw(st.sampled_from(CHANNELS))}
    on_pass = [ExecutionInstance(
        execution="PostMessage",
        settings={"channel": setting_value_from_json(draw(st.sampled_from(CHANNELS))),
                  "text": setting_value_from_json(
                      "passed with ${procedure.yes_votes} yes")})]
    return CustomProcedure(
        base_procedure="Majority",
        settings={k: setting_value_from_json(v) for k, v in settings.items()},
        on_pass=on_pass,
    )


@st.composite
def policy_documents(draw, registry_version=1):
    action = draw(custom_actions())
    procedure = draw(procedures_for(action))
    return PolicyDocument(
        id="gen", name="generated", description="",
        action=action, procedure=procedure,
        registry_version=registry_version, enabled=True,
    )


def _break_unknown_component(doc):
    doc.action.base_action = "NoSuchAction"


def _break_unknown_filter_field(doc):
    doc.action.filters.append(FilterInstance(
        field="no_such_field", filter="Channel.Is",
        settings={"channel": setting_value_from_json("general")}))


def _break_missing_setting(doc):
    doc.procedure.settings.pop("threshold", None)


def _break_entity_mismatch(doc):
    doc.procedure.settings["vote_channel"] = setting_value_from_json("${action.initiator}")


def _break_unknown_entity_value(doc):
    doc.procedure.settings["vote_channel"] = setting_value_from_json("no_such_channel")


def _break_unresolved_reference(doc):
    doc.procedure.settings["vote_channel"] = setting_value_from_json("${action.nothing}")


def _break_stale_version(doc):
    doc.registry_version = 999


MUTATIONS = [
    _break_unknown_component,
    _break_unknown_filter_field,
    _break_missing_setting,
    _break_entity_mismatch,
    _break_unknown_entity_value,
    _break_unresolved_reference,
    _break_stale_version,
]


@st.composite
def maybe_broken_documents(draw):
    doc = draw(policy_documents())
    mutation = draw(st.sampled_from([None] + MUTATIONS))
    if mutation is not None:
        mutation(doc)
    return doc
