import json

import hypothesis.strategies as st
import pytest
from hypothesis import given

from agora import (
    ComponentKind,
    Entity,
    RegistryHolder,
    SettingSpec,
    ValueType,
    VariableBinding,
    compatible_variables,
    load_library,
    serialize_library,
    stdlib_json,
    stdlib_registry,
)
from agora.errors import (
    BadIdentifier,
    DuplicateComponent,
    FilterWithoutAppliesTo,
    NotFound,
    ParseError,
    UnknownBehavior,
)


def library_doc(components, version=1):
    return json.dumps({"version": version, "components": components})


JURY_COMPONENT = {
    "kind": "BaseProcedure",
    "name": "Jury",
    "label": "jury vote",
    "description": "a sampled jury decides",
    "behavior": "procedure.jury",
    "settings": [
        {"name": "no_of_jurors", "label": "number of jurors", "entity": "Number"},
        {"name": "threshold", "label": "required yes votes", "entity": "Number"},
    ],
    "variables": [
        {"name": "jurors", "label": "the selected jurors", "entity": "UserList"},
        {"name": "yes_votes", "label": "final yes votes", "entity": "Number"},
    ],
    "source_view": "jury check",
}


def test_load_library_jury_example():
    registry = load_library(library_doc([JURY_COMPONENT]))
    desc = registry.lookup(ComponentKind.BASE_PROCEDURE, "Jury")
    assert [s.name for s in desc.settings] == ["no_of_jurors", "threshold"]
    assert [v.name for v in desc.variables] == ["jurors", "yes_votes"]
    assert desc.variable("jurors").entity is Entity.USER_LIST


def test_load_library_empty():
    registry = load_library(library_doc([]))
    assert not registry.components
    with pytest.raises(NotFound):
        registry.lookup(ComponentKind.BASE_PROCEDURE, "Jury")


def test_duplicate_component_rejected():
    f = {"kind": "Filter", "name": "User.Role", "label": "", "description": "",
         "behavior": "filter.user_has_role", "applies_to": "CommunityUser",
         "settings": [{"name": "role", "label": "role", "entity": "CommunityRole"}]}
    with pytest.raises(DuplicateComponent):
        load_library(library_doc([f, dict(f)]))


def test_unknown_behavior_rejected():
    bad = dict(JURY_COMPONENT, behavior="procedure.nonexistent")
    with pytest.raises(UnknownBehavior):
        load_library(library_doc([bad]))


def test_bad_identifiers_rejected():
    bad_setting = dict(JURY_COMPONENT)
    bad_setting["settings"] = [{"name": "NoOfJurors", "label": "x", "entity": "Number"}]
    with pytest.raises(BadIdentifier):
        load_library(library_doc([bad_setting]))
    bad_name = dict(JURY_COMPONENT, name="jury")
    with pytest.raises(BadIdentifier):
        load_library(library_doc([bad_name]))


def test_filter_without_applies_to_rejected():
    f = {"kind": "Filter", "name": "User.Odd", "label": "", "description": "",
         "behavior": "filter.user_is",
         "settings": [{"name": "user", "label": "u", "entity": "CommunityUser"}]}
    with pytest.raises(FilterWithoutAppliesTo):
        load_library(library_doc([f]))


def test_unknown_keys_rejected():
    with pytest.raises(ParseError):
        load_library(json.dumps({"version": 1, "components": [], "extra": True}))
    bad = dict(JURY_COMPONENT, surprise=1)
    with pytest.raises(ParseError):
        load_library(library_doc([bad]))


def test_setting_variable_namespace_collision_rejected():
    bad = dict(JURY_COMPONENT)
    bad["variables"] = [{"name": "threshold", "label": "x", "entity": "Number"}]
    with pytest.raises(ParseError):
        load_library(library_doc([bad]))


def test_lookup_stdlib_rename_channel(registry):
    desc = registry.lookup(ComponentKind.BASE_ACTION, "RenameChannel")
    assert [v.name for v in desc.variables] == ["initiator", "channel", "new_name"]


def test_lookup_kind_mismatch_is_not_found(registry):
    with pytest.raises(NotFound):
        registry.lookup(ComponentKind.DECORATOR, "Jury")


def test_stdlib_round_trip(registry):
    text = stdlib_json()
    reloaded = load_library(text)
    assert reloaded == registry
    assert serialize_library(reloaded) == text


def test_round_trip_custom_library():
    text = library_doc([JURY_COMPONENT])
    registry = load_library(text)
    again = load_library(serialize_library(registry))
    assert again == registry


_SETTING_NAMES = st.sampled_from(["alpha", "beta", "gamma", "delta"])
_ENTITIES = st.sampled_from([e.value for e in Entity])


@st.composite
def random_components(draw, index):
    names = draw(st.lists(_SETTING_NAMES, max_size=3, unique=True))
    split = draw(st.integers(0, len(names)))
    settings = [{"name": n, "label": n, "entity": draw(_ENTITIES),
                 "required": draw(st.booleans())} for n in names[:split]]
    variables = [{"name": n, "label": n, "entity": draw(_ENTITIES)}
                 for n in names[split:]]
    return {"kind": "Execution", "name": f"Thing{index}", "label": "thing",
            "description": "", "behavior": "execution.post_message",
            "settings": settings, "variables": variables, "source_view": "x()"}


@st.composite
def random_libraries(draw):
    count = draw(st.integers(0, 4))
    comps = [draw(random_components(i)) for i in range(count)]
    return library_doc(comps, version=draw(st.integers(0, 9)))


@given(random_libraries())
def test_round_trip_property(text):
    registry = load_library(text)
    assert load_library(serialize_library(registry)) == registry


def test_atomic_reload_keeps_previous_registry():
    holder = RegistryHolder()
    assert not holder.loaded
    holder.reload(stdlib_json())
    before = holder.registry
    with pytest.raises(ParseError):
        holder.reload("{not json")
    assert holder.registry is before
    with pytest.raises(DuplicateComponent):
        holder.reload(library_doc([JURY_COMPONENT, dict(JURY_COMPONENT)], version=5))
    assert holder.registry is before


def test_reload_bumps_version_monotonically():
    holder = RegistryHolder()
    holder.reload(library_doc([JURY_COMPONENT], version=1))
    holder.reload(library_doc([JURY_COMPONENT], version=1))
    assert holder.registry.version == 2


def test_failed_initial_load_leaves_holder_empty():
    holder = RegistryHolder()
    with pytest.raises(UnknownBehavior):
        holder.reload(library_doc([dict(JURY_COMPONENT, behavior="nope")]))
    assert not holder.loaded
    with pytest.raises(NotFound):
        holder.registry


def _binding(name, entity, value_type=ValueType.SCALAR):
    return VariableBinding("action", name, name, entity, value_type)


def test_compatible_variables_filters_by_entity():
    available = [_binding("channel", Entity.CHANNEL),
                 _binding("initiator", Entity.COMMUNITY_USER)]
    target = SettingSpec(name="vote_channel", label="", entity=Entity.CHANNEL)
    assert compatible_variables(available, target) == [available[0]]


def test_compatible_variables_empty_and_no_match():
    target = SettingSpec(name="text", label="", entity=Entity.TEXT)
    assert compatible_variables([], target) == []
    available = [_binding("channel", Entity.CHANNEL)]
    assert compatible_variables(available, target) == []


@given(st.lists(st.tuples(_SETTING_NAMES, st.sampled_from(list(Entity))), max_size=6))
def test_compatible_variables_subset_and_idempotent(pairs):
    available = [_binding(f"{n}{i}", e) for i, (n, e) in enumerate(pairs)]
    target = SettingSpec(name="t", label="", entity=Entity.CHANNEL)
    picked = compatible_variables(available, target)
    assert all(b in available for b in picked)
    assert all(b.entity is Entity.CHANNEL for b in picked)
    assert compatible_variables(picked, target) == picked
