"""Component library: typed descriptors, loading, lookup, and variable matching.

The library is a single JSON document describing every policy component
(base actions, filters, base procedures, decorators, executions) with its
settings, variables, and the name of the built-in behavior that implements it.
Loading is all-or-nothing: any violation rejects the whole document.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Collection, Iterator, Optional

from .entities import Entity, ValueType, scalar_shape_ok
from .errors import (
    BadIdentifier,
    DuplicateComponent,
    FilterWithoutAppliesTo,
    NotFound,
    ParseError,
    UnknownBehavior,
)

SETTING_NAME = re.compile(r"^[a-z][a-z0-9_]*$")
COMPONENT_NAME = re.compile(r"^[A-Z][A-Za-z0-9]*(\.[A-Z][A-Za-z0-9]*)?$")


class ComponentKind(str, Enum):
    BASE_ACTION = "BaseAction"
    FILTER = "Filter"
    BASE_PROCEDURE = "BaseProcedure"
    DECORATOR = "Decorator"
    EXECUTION = "Execution"


@dataclass(frozen=True)
class SettingSpec:
    """One user-configurable parameter of a component."""

    name: str
    label: str
    entity: Entity
    value_type: ValueType = ValueType.SCALAR
    required: bool = True
    default: Any = None
    has_default: bool = False

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "label": self.label,
            "entity": self.entity.value,
            "value_type": self.value_type.value,
            "required": self.required,
        }
        if self.has_default:
            out["default"] = self.default
        return out


@dataclass(frozen=True)
class VariableSpec:
    """A read-only output of a component, referenceable across components."""

    name: str
    label: str
    entity: Entity
    value_type: ValueType = ValueType.SCALAR

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "label": self.label,
            "entity": self.entity.value,
            "value_type": self.value_type.value,
        }


@dataclass(frozen=True)
class VariableBinding:
    """A referenceable name in an authoring scope, for drop-downs and checks."""

    scope: str  # "action" | "procedure"
    name: str
    label: str
    entity: Entity
    value_type: ValueType = ValueType.SCALAR

    @property
    def token_text(self) -> str:
        return "${%s.%s}" % (self.scope, self.name)

    def to_json(self) -> dict:
        return {
            "scope": self.scope,
            "name": self.name,
            "label": self.label,
            "entity": self.entity.value,
            "value_type": self.value_type.value,
            "token": self.token_text,
        }


@dataclass(frozen=True)
class ComponentDescriptor:
    kind: ComponentKind
    name: str
    label: str
    description: str
    behavior: str
    settings: tuple[SettingSpec, ...] = ()
    variables: tuple[VariableSpec, ...] = ()
    applies_to: Optional[Entity] = None  # Filters only: entity of the field they specialize
    source_view: str = ""
    compatible_with: tuple[str, ...] = ()  # Decorators only; empty means "unclassified"

    def setting(self, name: str) -> Optional[SettingSpec]:
        for s in self.settings:
            if s.name == name:
                return s
        return None

    def variable(self, name: str) -> Optional[VariableSpec]:
        for v in self.variables:
            if v.name == name:
                return v
        return None

    def to_json(self) -> dict:
        out: dict[str, Any] = {
            "kind": self.kind.value,
            "name": self.name,
            "label": self.label,
            "description": self.description,
            "behavior": self.behavior,
            "settings": [s.to_json() for s in self.settings],
            "variables": [v.to_json() for v in self.variables],
            "source_view": self.source_view,
        }
        if self.applies_to is not None:
            out["applies_to"] = self.applies_to.value
        if self.compatible_with:
            out["compatible_with"] = list(self.compatible_with)
        return out


@dataclass
class Registry:
    """Immutable-after-load component table keyed by (kind, name)."""

    components: dict[tuple[ComponentKind, str], ComponentDescriptor] = field(default_factory=dict)
    version: int = 0

    def lookup(self, kind: ComponentKind, name: str) -> ComponentDescriptor:
        try:
            return self.components[(kind, name)]
        except KeyError:
            raise NotFound(f"no component ({kind.value}, {name!r})") from None

    def has(self, kind: ComponentKind, name: str) -> bool:
        return (kind, name) in self.components

    def by_kind(self, kind: ComponentKind) -> Iterator[ComponentDescriptor]:
        for (k, _), desc in self.components.items():
            if k == kind:
                yield desc


# --- parsing -----------------------------------------------------------------

def _require_keys(obj: dict, allowed: set[str], required: set[str], path: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", path)
    missing = required - set(obj)
    if missing:
        raise ParseError(f"missing keys {sorted(missing)}", path)


def _parse_entity(raw: Any, path: str) -> Entity:
    try:
        return Entity(raw)
    except ValueError:
        raise ParseError(f"unknown entity {raw!r}", path) from None


def _parse_value_type(raw: Any, path: str) -> ValueType:
    try:
        return ValueType(raw)
    except ValueError:
        raise ParseError(f"unknown value_type {raw!r}", path) from None


def _parse_setting(obj: Any, path: str) -> SettingSpec:
    if not isinstance(obj, dict):
        raise ParseError("setting must be an object", path)
    _require_keys(obj, {"name", "label", "entity", "value_type", "required", "default"},
                  {"name", "label", "entity"}, path)
    name = obj["name"]
    if not isinstance(name, str) or not SETTING_NAME.match(name):
        raise BadIdentifier(f"{path}: bad setting name {name!r}")
    return SettingSpec(
        name=name,
        label=str(obj["label"]),
        entity=_parse_entity(obj["entity"], path),
        value_type=_parse_value_type(obj.get("value_type", "scalar"), path),
        required=bool(obj.get("required", True)),
        default=obj.get("default"),
        has_default="default" in obj,
    )


def _parse_variable(obj: Any, path: str) -> VariableSpec:
    if not isinstance(obj, dict):
        raise ParseError("variable must be an object", path)
    _require_keys(obj, {"name", "label", "entity", "value_type"}, {"name", "label", "entity"}, path)
    name = obj["name"]
    if not isinstance(name, str) or not SETTING_NAME.match(name):
        raise BadIdentifier(f"{path}: bad variable name {name!r}")
    return VariableSpec(
        name=name,
        label=str(obj["label"]),
        entity=_parse_entity(obj["entity"], path),
        value_type=_parse_value_type(obj.get("value_type", "scalar"), path),
    )


def _parse_component(obj: Any, path: str) -> ComponentDescriptor:
    if not isinstance(obj, dict):
        raise ParseError("component must be an object", path)
    allowed = {"kind", "name", "label", "description", "behavior", "settings",
               "variables", "applies_to", "source_view", "compatible_with"}
    _require_keys(obj, allowed, {"kind", "name", "behavior"}, path)
    try:
        kind = ComponentKind(obj["kind"])
    except ValueError:
        raise ParseError(f"unknown kind {obj['kind']!r}", path) from None
    name = obj["name"]
    if not isinstance(name, str) or not COMPONENT_NAME.match(name):
        raise BadIdentifier(f"{path}: bad component name {name!r}")

    settings = tuple(_parse_setting(s, f"{path}.settings[{i}]")
                     for i, s in enumerate(obj.get("settings", [])))
    variables = tuple(_parse_variable(v, f"{path}.variables[{i}]")
                      for i, v in enumerate(obj.get("variables", [])))
    names = [s.name for s in settings] + [v.name for v in variables]
    if len(names) != len(set(names)):
        raise ParseError("setting and variable names share one namespace and must not collide", path)
    for s in settings:
        if s.has_default and not scalar_shape_ok(s.entity, s.default) \
                and not (s.value_type is ValueType.LIST and isinstance(s.default, list)):
            raise ParseError(f"default for {s.name!r} does not fit entity {s.entity.value}", path)

    applies_to: Optional[Entity] = None
    if "applies_to" in obj:
        if kind is not ComponentKind.FILTER:
            raise ParseError("applies_to is only valid on filters", path)
        applies_to = _parse_entity(obj["applies_to"], path)
    elif kind is ComponentKind.FILTER:
        raise FilterWithoutAppliesTo(f"{path}: filter {name!r} declares no applies_to entity")

    compatible_with: tuple[str, ...] = ()
    if "compatible_with" in obj:
        if kind is not ComponentKind.DECORATOR:
            raise ParseError("compatible_with is only valid on decorators", path)
        raw = obj["compatible_with"]
        if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
            raise ParseError("compatible_with must be a list of procedure names", path)
        compatible_with = tuple(raw)

    return ComponentDescriptor(
        kind=kind,
        name=name,
        label=str(obj.get("label", name)),
        description=str(obj.get("description", "")),
        behavior=str(obj["behavior"]),
        settings=settings,
        variables=variables,
        applies_to=applies_to,
        source_view=str(obj.get("source_view", "")),
        compatible_with=compatible_with,
    )


def load_library(source: str, known_behaviors: Optional[Collection[str]] = None) -> Registry:
    """Parse and validate a library document, returning a fresh Registry.

    Rejects the whole document on any violation; a caller holding a previous
    registry keeps it untouched when this raises. `known_behaviors` defaults
    to the built-in behavior catalog.
    """
    if known_behaviors is None:
        from . import stdlib  # late import; stdlib itself builds on this module
        known_behaviors = stdlib.behavior_names()
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ParseError("library document must be an object")
    _require_keys(doc, {"version", "components"}, {"version", "components"}, "library")
    version = doc["version"]
    if not isinstance(version, int) or isinstance(version, bool) or version < 0:
        raise ParseError("version must be a non-negative integer", "library")
    if not isinstance(doc["components"], list):
        raise ParseError("components must be a list", "library")

    components: dict[tuple[ComponentKind, str], ComponentDescriptor] = {}
    for i, raw in enumerate(doc["components"]):
        desc = _parse_component(raw, f"components[{i}]")
        key = (desc.kind, desc.name)
        if key in components:
            raise DuplicateComponent(f"duplicate component ({desc.kind.value}, {desc.name!r})")
        if desc.behavior not in known_behaviors:
            raise UnknownBehavior(
                f"components[{i}]: behavior {desc.behavior!r} is not a registered built-in")
        components[key] = desc
    return Registry(components=components, version=version)


def serialize_library(registry: Registry) -> str:
    """Inverse of load_library: stable JSON with components ordered by (kind, name)."""
    ordered = sorted(registry.components.values(), key=lambda d: (d.kind.value, d.name))
    doc = {"version": registry.version, "components": [d.to_json() for d in ordered]}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def compatible_variables(available: list[VariableBinding], target: SettingSpec) -> list[VariableBinding]:
    """Bindings whose entity and value_type equal the target's, order preserved."""
    return [b for b in available
            if b.entity == target.entity and b.value_type == target.value_type]


class RegistryHolder:
    """Single-writer holder for atomic registry swaps.

    A failed reload leaves the previous registry in place; a successful one
    swaps it whole and keeps the version strictly increasing.
    """

    def __init__(self, registry: Optional[Registry] = None):
        self._registry = registry

    @property
    def registry(self) -> Registry:
        if self._registry is None:
            raise NotFound("no library loaded")
        return self._registry

    @property
    def loaded(self) -> bool:
        return self._registry is not None

    def reload(self, source: str, known_behaviors: Optional[Collection[str]] = None) -> Registry:
        fresh = load_library(source, known_behaviors)
        if self._registry is not None and fresh.version <= self._registry.version:
            fresh = Registry(components=fresh.components, version=self._registry.version + 1)
        self._registry = fresh
        return fresh
