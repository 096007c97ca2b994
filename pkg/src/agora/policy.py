"""Declarative policy documents: reference grammar, document model, validation.

A policy pairs a custom action (base action + per-field filters, AND-ed) with
a custom procedure (base procedure + settings + decorators + pass/fail
executions). Values cross component boundaries through `${scope.name}`
reference tokens; `$$` escapes a literal dollar sign. Validation is pure and
produces diagnostics as data, never exceptions.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .community import CommunitySnapshot
from .entities import Entity, ID_ENTITIES, ValueType, value_shape_ok
from .errors import BadIdentifier, BadScope, NotFound, ParseError, UnterminatedReference
from .registry import (
    ComponentDescriptor,
    ComponentKind,
    Registry,
    VariableBinding,
)

_IDENT = re.compile(r"^[a-z][a-z0-9_]*$")
SCOPES = ("action", "procedure")


@dataclass(frozen=True)
class ReferenceToken:
    scope: str
    name: str

    def __str__(self) -> str:
        return "${%s.%s}" % (self.scope, self.name)


Segment = Union[str, ReferenceToken]


def parse_reference_text(text: str) -> list[Segment]:
    """Split text into literal and reference segments.

    `${scope.name}` produces a ReferenceToken; `$$` produces a literal `$`;
    a bare `$` not opening a token stays literal. Adjacent literals merge.
    """
    segments: list[Segment] = []
    lit: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "$":
            if text.startswith("$$", i):
                lit.append("$")
                i += 2
                continue
            if text.startswith("${", i):
                end = text.find("}", i + 2)
                if end < 0:
                    raise UnterminatedReference(f"unterminated reference at offset {i}: {text[i:]!r}")
                body = text[i + 2:end]
                scope, dot, name = body.partition(".")
                if scope not in SCOPES:
                    raise BadScope(f"bad reference scope {scope!r} in {body!r}")
                if not dot or not _IDENT.match(name):
                    raise BadIdentifier(f"bad reference name in {body!r}")
                if lit:
                    segments.append("".join(lit))
                    lit = []
                segments.append(ReferenceToken(scope, name))
                i = end + 1
                continue
        lit.append(ch)
        i += 1
    if lit:
        segments.append("".join(lit))
    return segments


def render_segments(segments: list[Segment], escape: bool = False) -> str:
    """Join segments back into text; with escape=True, literal `$` becomes `$$`."""
    parts = []
    for seg in segments:
        if isinstance(seg, ReferenceToken):
            parts.append(str(seg))
        else:
            parts.append(seg.replace("$", "$$") if escape else seg)
    return "".join(parts)


# --- setting values ----------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    value: Any


@dataclass(frozen=True)
class Reference:
    token: ReferenceToken


@dataclass(frozen=True)
class TemplateText:
    segments: tuple[Segment, ...]


SettingValue = Union[Literal, Reference, TemplateText]


def setting_value_from_json(raw: Any) -> SettingValue:
    """Classify a raw JSON value; reference tokens appear inline in strings."""
    if isinstance(raw, str):
        segments = parse_reference_text(raw)
        if len(segments) == 1 and isinstance(segments[0], ReferenceToken):
            return Reference(segments[0])
        if any(isinstance(s, ReferenceToken) for s in segments):
            return TemplateText(tuple(segments))
        return Literal(segments[0] if segments else "")
    return Literal(raw)


def setting_value_to_json(value: SettingValue) -> Any:
    if isinstance(value, Reference):
        return str(value.token)
    if isinstance(value, TemplateText):
        return render_segments(list(value.segments), escape=True)
    if isinstance(value.value, str):
        return value.value.replace("$", "$$")
    return value.value


def _settings_from_json(raw: Any, path: str) -> dict[str, SettingValue]:
    if not isinstance(raw, dict):
        raise ParseError("settings must be an object", path)
    return {name: setting_value_from_json(v) for name, v in raw.items()}


def _settings_to_json(settings: dict[str, SettingValue]) -> dict:
    return {name: setting_value_to_json(v) for name, v in settings.items()}


# --- document model ----------------------------------------------------------

@dataclass
class FilterInstance:
    field: str                 # field of the base action this filter specializes
    filter: str                # Filter component name
    settings: dict[str, SettingValue] = field(default_factory=dict)


@dataclass
class CustomAction:
    base_action: str
    filters: list[FilterInstance] = field(default_factory=list)


@dataclass
class ExecutionInstance:
    execution: str
    settings: dict[str, SettingValue] = field(default_factory=dict)


@dataclass
class DecoratorInstance:
    name: str
    settings: dict[str, SettingValue] = field(default_factory=dict)


@dataclass
class CustomProcedure:
    base_procedure: str
    settings: dict[str, SettingValue] = field(default_factory=dict)
    decorators: list[DecoratorInstance] = field(default_factory=list)
    on_pass: list[ExecutionInstance] = field(default_factory=list)
    on_fail: list[ExecutionInstance] = field(default_factory=list)


@dataclass
class PolicyDocument:
    id: str
    name: str
    description: str
    action: CustomAction
    procedure: CustomProcedure
    registry_version: int
    enabled: bool = True

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "description": self.description,
            "action": {
                "base_action": self.action.base_action,
                "filters": [
                    {"field": f.field, "filter": f.filter,
                     "settings": _settings_to_json(f.settings)}
                    for f in self.action.filters
                ],
            },
            "procedure": {
                "base_procedure": self.procedure.base_procedure,
                "settings": _settings_to_json(self.procedure.settings),
                "decorators": [
                    {"name": d.name, "settings": _settings_to_json(d.settings)}
                    for d in self.procedure.decorators
                ],
                "on_pass": [
                    {"execution": e.execution, "settings": _settings_to_json(e.settings)}
                    for e in self.procedure.on_pass
                ],
                "on_fail": [
                    {"execution": e.execution, "settings": _settings_to_json(e.settings)}
                    for e in self.procedure.on_fail
                ],
            },
            "registry_version": self.registry_version,
            "enabled": self.enabled,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "PolicyDocument":
        if not isinstance(doc, dict):
            raise ParseError("policy must be an object")
        allowed = {"id", "name", "description", "action", "procedure",
                   "registry_version", "enabled"}
        unknown = set(doc) - allowed
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)}", "policy")
        for key in ("id", "action", "procedure", "registry_version"):
            if key not in doc:
                raise ParseError(f"missing key {key!r}", "policy")

        raw_action = doc["action"]
        unknown = set(raw_action) - {"base_action", "filters"}
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)}", "action")
        filters = []
        for i, rf in enumerate(raw_action.get("filters", [])):
            unknown = set(rf) - {"field", "filter", "settings"}
            if unknown:
                raise ParseError(f"unknown keys {sorted(unknown)}", f"action.filters[{i}]")
            filters.append(FilterInstance(
                field=rf["field"], filter=rf["filter"],
                settings=_settings_from_json(rf.get("settings", {}), f"action.filters[{i}]")))
        action = CustomAction(base_action=raw_action["base_action"], filters=filters)

        raw_proc = doc["procedure"]
        unknown = set(raw_proc) - {"base_procedure", "settings", "decorators", "on_pass", "on_fail"}
        if unknown:
            raise ParseError(f"unknown keys {sorted(unknown)}", "procedure")
        decorators = []
        for i, rd in enumerate(raw_proc.get("decorators", [])):
            unknown = set(rd) - {"name", "settings"}
            if unknown:
                raise ParseError(f"unknown keys {sorted(unknown)}", f"procedure.decorators[{i}]")
            decorators.append(DecoratorInstance(
                name=rd["name"],
                settings=_settings_from_json(rd.get("settings", {}), f"procedure.decorators[{i}]")))

        def executions(key: str) -> list[ExecutionInstance]:
            out = []
            for i, re_ in enumerate(raw_proc.get(key, [])):
                unknown = set(re_) - {"execution", "settings"}
                if unknown:
                    raise ParseError(f"unknown keys {sorted(unknown)}", f"procedure.{key}[{i}]")
                out.append(ExecutionInstance(
                    execution=re_["execution"],
                    settings=_settings_from_json(re_.get("settings", {}), f"procedure.{key}[{i}]")))
            return out

        procedure = CustomProcedure(
            base_procedure=raw_proc["base_procedure"],
            settings=_settings_from_json(raw_proc.get("settings", {}), "procedure.settings"),
            decorators=decorators,
            on_pass=executions("on_pass"),
            on_fail=executions("on_fail"),
        )
        return cls(
            id=str(doc["id"]),
            name=str(doc.get("name", doc["id"])),
            description=str(doc.get("description", "")),
            action=action,
            procedure=procedure,
            registry_version=int(doc["registry_version"]),
            enabled=bool(doc.get("enabled", True)),
        )


def load_policy(text: str) -> PolicyDocument:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return PolicyDocument.from_json(doc)


# --- authoring scopes --------------------------------------------------------

@dataclass
class PolicyDraft:
    """The partial document an authoring flow holds while a policy is built."""

    base_action: Optional[str] = None
    filters: list[str] = field(default_factory=list)  # Filter component names, listed order
    base_procedure: Optional[str] = None

    @classmethod
    def of(cls, doc: PolicyDocument) -> "PolicyDraft":
        return cls(
            base_action=doc.action.base_action,
            filters=[f.filter for f in doc.action.filters],
            base_procedure=doc.procedure.base_procedure,
        )


def global_variable_list(draft: Union[PolicyDraft, PolicyDocument],
                         registry: Registry) -> list[VariableBinding]:
    """Every referenceable name, action scope first, in declaration order.

    The action scope holds the base action's fields plus variables exported by
    chosen filters; the procedure scope holds the base procedure's settings and
    variables. Unknown component names contribute nothing (drafts in progress).
    """
    if isinstance(draft, PolicyDocument):
        draft = PolicyDraft.of(draft)
    out: list[VariableBinding] = []
    if draft.base_action:
        try:
            base = registry.lookup(ComponentKind.BASE_ACTION, draft.base_action)
        except NotFound:
            base = None
        if base is not None:
            for v in base.variables:
                out.append(VariableBinding("action", v.name, v.label, v.entity, v.value_type))
        for fname in draft.filters:
            try:
                fdesc = registry.lookup(ComponentKind.FILTER, fname)
            except NotFound:
                continue
            for v in fdesc.variables:
                out.append(VariableBinding("action", v.name, v.label, v.entity, v.value_type))
    if draft.base_procedure:
        try:
            proc = registry.lookup(ComponentKind.BASE_PROCEDURE, draft.base_procedure)
        except NotFound:
            proc = None
        if proc is not None:
            for s in proc.settings:
                out.append(VariableBinding("procedure", s.name, s.label, s.entity, s.value_type))
            for v in proc.variables:
                out.append(VariableBinding("procedure", v.name, v.label, v.entity, v.value_type))
    return out


def scope_bindings(doc: Union[PolicyDraft, PolicyDocument],
                   registry: Registry) -> dict[str, dict[str, VariableBinding]]:
    """Resolution tables per scope; later duplicates are dropped (diagnosed separately)."""
    tables: dict[str, dict[str, VariableBinding]] = {"action": {}, "procedure": {}}
    for b in global_variable_list(doc, registry):
        tables[b.scope].setdefault(b.name, b)
    return tables


# --- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    path: str

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "path": self.path}


@dataclass
class ValidationReport:
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.diagnostics

    def add(self, code: str, message: str, path: str) -> None:
        self.diagnostics.append(Diagnostic(code, message, path))

    def to_json(self) -> dict:
        return {"ok": self.ok, "diagnostics": [d.to_json() for d in self.diagnostics]}


def _literal_exists(entity: Entity, value: Any, community: CommunitySnapshot) -> bool:
    if entity is Entity.CHANNEL:
        return value in community.channel_ids()
    if entity is Entity.COMMUNITY_USER:
        return value in community.user_ids()
    if entity is Entity.COMMUNITY_ROLE:
        return value in community.roles
    if entity is Entity.DOCUMENT:
        return value in community.documents
    if entity is Entity.USER_LIST:
        known = community.user_ids()
        return all(u in known for u in value)
    return True


def _check_literal(spec, value: Any, community: Optional[CommunitySnapshot],
                   report: ValidationReport, path: str) -> None:
    if not value_shape_ok(spec.entity, spec.value_type, value):
        report.add("EntityMismatch",
                   f"value {value!r} does not fit entity {spec.entity.value} "
                   f"({spec.value_type.value})", path)
        return
    if community is None:
        return
    values = value if spec.value_type is ValueType.LIST else [value]
    for v in values:
        if spec.entity in ID_ENTITIES or spec.entity is Entity.USER_LIST:
            if not _literal_exists(spec.entity, v, community):
                report.add("UnknownEntityValue",
                           f"{spec.entity.value} value {v!r} not found in the community", path)


def _check_settings(desc: ComponentDescriptor, given: dict[str, SettingValue],
                    scopes: dict[str, dict[str, VariableBinding]],
                    community: Optional[CommunitySnapshot],
                    report: ValidationReport, path: str,
                    allow_references: bool = True) -> None:
    known = {s.name for s in desc.settings}
    for name in given:
        if name not in known:
            report.add("UnknownSetting",
                       f"{desc.name} has no setting {name!r}", f"{path}.{name}")
    for spec in desc.settings:
        if spec.name not in given:
            if spec.required and not spec.has_default:
                report.add("MissingSetting",
                           f"required setting {spec.name!r} of {desc.name} is missing",
                           f"{path}.{spec.name}")
            continue
        value = given[spec.name]
        vpath = f"{path}.{spec.name}"
        if isinstance(value, (Reference, TemplateText)) and not allow_references:
            report.add("ReferenceNotAllowed",
                       "filter settings take literal values only", vpath)
            continue
        if isinstance(value, Literal):
            _check_literal(spec, value.value, community, report, vpath)
        elif isinstance(value, Reference):
            binding = scopes.get(value.token.scope, {}).get(value.token.name)
            if binding is None:
                report.add("UnresolvedReference",
                           f"{value.token} does not resolve to a known setting or variable",
                           vpath)
            elif binding.entity != spec.entity or binding.value_type != spec.value_type:
                report.add("EntityMismatch",
                           f"{value.token} has entity {binding.entity.value} "
                           f"({binding.value_type.value}) but {spec.name!r} expects "
                           f"{spec.entity.value} ({spec.value_type.value})", vpath)
        else:  # TemplateText
            if spec.entity is not Entity.TEXT or spec.value_type is not ValueType.SCALAR:
                report.add("TemplateNotAllowed",
                           f"templates are only valid for Text settings, not "
                           f"{spec.entity.value}", vpath)
            for seg in value.segments:
                if isinstance(seg, ReferenceToken):
                    if scopes.get(seg.scope, {}).get(seg.name) is None:
                        report.add("UnresolvedReference",
                                   f"{seg} does not resolve to a known setting or variable",
                                   vpath)


def validate_policy(doc: PolicyDocument, registry: Registry,
                    community: Optional[CommunitySnapshot] = None) -> ValidationReport:
    """Full static validation; an empty report means the document compiles.

    With community=None the existence checks for id-valued literals are
    skipped (structural validation only).
    """
    report = ValidationReport()
    if doc.registry_version != registry.version:
        report.add("StaleRegistryVersion",
                   f"document targets registry version {doc.registry_version}, "
                   f"loaded version is {registry.version}", "registry_version")

    scopes = scope_bindings(doc, registry)

    # action scope name collisions (base-action fields vs filter exports)
    seen: dict[str, str] = {}
    base = None
    try:
        base = registry.lookup(ComponentKind.BASE_ACTION, doc.action.base_action)
    except NotFound:
        report.add("UnknownComponent",
                   f"no base action {doc.action.base_action!r}", "action.base_action")
    if base is not None:
        for v in base.variables:
            seen[v.name] = doc.action.base_action

    fields_filtered: set[str] = set()
    for i, inst in enumerate(doc.action.filters):
        fpath = f"action.filters[{i}]"
        try:
            fdesc = registry.lookup(ComponentKind.FILTER, inst.filter)
        except NotFound:
            report.add("UnknownComponent", f"no filter {inst.filter!r}", fpath)
            continue
        for v in fdesc.variables:
            if v.name in seen:
                report.add("NameCollision",
                           f"variable {v.name!r} of {inst.filter} collides with "
                           f"{seen[v.name]}", fpath)
            else:
                seen[v.name] = inst.filter
        if base is not None:
            fld = base.variable(inst.field)
            if fld is None:
                report.add("UnknownField",
                           f"{doc.action.base_action} has no field {inst.field!r}", fpath)
            else:
                if inst.field in fields_filtered:
                    report.add("DuplicateFilterField",
                               f"field {inst.field!r} already has a filter", fpath)
                fields_filtered.add(inst.field)
                if fdesc.applies_to != fld.entity:
                    report.add("EntityMismatch",
                               f"{inst.filter} applies to {fdesc.applies_to.value} but "
                               f"field {inst.field!r} has entity {fld.entity.value}", fpath)
        _check_settings(fdesc, inst.settings, scopes, community, report,
                        f"{fpath}.settings", allow_references=False)

    proc = None
    try:
        proc = registry.lookup(ComponentKind.BASE_PROCEDURE, doc.procedure.base_procedure)
    except NotFound:
        report.add("UnknownComponent",
                   f"no base procedure {doc.procedure.base_procedure!r}",
                   "procedure.base_procedure")
    if proc is not None:
        _check_settings(proc, doc.procedure.settings, scopes, community, report,
                        "procedure.settings")

    names = [d.name for d in doc.procedure.decorators]
    for i, dec in enumerate(doc.procedure.decorators):
        dpath = f"procedure.decorators[{i}]"
        if names.index(dec.name) != i:
            report.add("DuplicateDecorator", f"decorator {dec.name!r} listed twice", dpath)
        try:
            ddesc = registry.lookup(ComponentKind.DECORATOR, dec.name)
        except NotFound:
            report.add("UnknownComponent", f"no decorator {dec.name!r}", dpath)
            continue
        _check_settings(ddesc, dec.settings, scopes, community, report, f"{dpath}.settings")

    for key, insts in (("on_pass", doc.procedure.on_pass), ("on_fail", doc.procedure.on_fail)):
        for i, inst in enumerate(insts):
            epath = f"procedure.{key}[{i}]"
            try:
                edesc = registry.lookup(ComponentKind.EXECUTION, inst.execution)
            except NotFound:
                report.add("UnknownComponent", f"no execution {inst.execution!r}", epath)
                continue
            _check_settings(edesc, inst.settings, scopes, community, report,
                            f"{epath}.settings")
    return report
