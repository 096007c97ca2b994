"""Links validated policy documents into executable plans and source renderings.

Compilation resolves component names to built-in behaviors, bakes filter
settings into a matcher predicate, arranges decorators around the base
procedure (first listed = outermost), and defers reference substitution to
runtime slots, since procedure outputs only exist after voting.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional, Union

from .community import CommunityState, CommunitySnapshot
from .entities import Entity, ValueType
from .errors import InternalLinkError, InvalidPolicy, StaleRegistry, UnfilledSlot
from .policy import (
    Literal,
    PolicyDocument,
    Reference,
    ReferenceToken,
    SettingValue,
    TemplateText,
    scope_bindings,
    validate_policy,
)
from .procedures import ProcedureBehavior, PROCEDURE_BEHAVIORS
from .registry import ComponentDescriptor, ComponentKind, Registry
from .stdlib import DECORATOR_BEHAVIORS, DecoratorHooks, FILTER_BEHAVIORS


# --- compiled values ----------------------------------------------------------

@dataclass(frozen=True)
class CompiledLiteral:
    value: Any


@dataclass(frozen=True)
class CompiledRef:
    token: ReferenceToken
    entity: Entity
    value_type: ValueType


@dataclass(frozen=True)
class CompiledTemplate:
    segments: tuple[Union[str, CompiledRef], ...]


CompiledValue = Union[CompiledLiteral, CompiledRef, CompiledTemplate]


def format_number(value) -> str:
    if isinstance(value, float) and value.is_integer():
        return str(int(value))
    return str(value)


def render_slot_value(value: Any, entity: Entity, community: CommunityState) -> str:
    """Entity-aware text rendering for templates shown to community members."""
    if entity is Entity.USER_LIST:
        return ", ".join(community.display_user(u) for u in value)
    if entity is Entity.COMMUNITY_USER:
        return community.display_user(value)
    if entity is Entity.CHANNEL:
        return community.display_channel(value)
    if entity is Entity.NUMBER:
        return format_number(value)
    if entity is Entity.BOOLEAN:
        return "true" if value else "false"
    return str(value)


def resolve_value(value: CompiledValue, slots: dict[ReferenceToken, Any],
                  community: CommunityState) -> Any:
    if isinstance(value, CompiledLiteral):
        return value.value
    if isinstance(value, CompiledRef):
        if value.token not in slots:
            raise UnfilledSlot(f"{value.token} has no value yet")
        return slots[value.token]
    parts = []
    for seg in value.segments:
        if isinstance(seg, str):
            parts.append(seg)
        else:
            if seg.token not in slots:
                raise UnfilledSlot(f"{seg.token} has no value yet")
            parts.append(render_slot_value(slots[seg.token], seg.entity, community))
    return "".join(parts)


# --- executable parts ----------------------------------------------------------

@dataclass
class CompiledFilter:
    field: str
    name: str
    behavior: Any                     # (value, settings, community) -> FilterMatch
    settings: dict[str, Any]          # literal values only


@dataclass
class CompiledMatcher:
    action_kind: str
    filters: list[CompiledFilter]


@dataclass(frozen=True)
class MatchResult:
    matched: bool
    exports: dict[str, Any] = field(default_factory=dict)


@dataclass
class DecoratorLink:
    name: str
    hooks: DecoratorHooks
    settings: dict[str, CompiledValue]


@dataclass
class ProcedureLink:
    name: str
    behavior: ProcedureBehavior
    settings: dict[str, CompiledValue]
    variables: tuple[str, ...]


@dataclass
class BoundCall:
    execution: str
    settings: dict[str, CompiledValue]


@dataclass(frozen=True)
class SlotPlan:
    source: str    # "action_field" | "filter_export" | "procedure_setting" | "procedure_output"
    fill_at: str   # "open" | "close"
    entity: Entity
    value_type: ValueType


@dataclass
class ExecutablePolicy:
    policy_id: str
    enabled: bool
    registry_version: int
    matcher: CompiledMatcher
    procedure: ProcedureLink
    decorators: list[DecoratorLink]   # first listed = outermost
    pass_program: list[BoundCall]
    fail_program: list[BoundCall]
    binding_plan: dict[ReferenceToken, SlotPlan]

    @property
    def chain(self) -> list[str]:
        """Evaluation chain, outermost first, base procedure innermost."""
        return [d.name for d in self.decorators] + [self.procedure.name]

    @property
    def start_hooks(self) -> list[DecoratorLink]:
        return [d for d in self.decorators if d.hooks.start is not None]

    @property
    def vote_hooks(self) -> list[DecoratorLink]:
        return [d for d in self.decorators if d.hooks.vote is not None]

    @property
    def tick_hooks(self) -> list[DecoratorLink]:
        return [d for d in self.decorators if d.hooks.tick is not None]

    def match(self, event_kind: str, fields: dict[str, Any],
              community: CommunityState) -> MatchResult:
        """Conjunction of the action-kind test and every filter."""
        if event_kind != self.matcher.action_kind:
            return MatchResult(False)
        exports: dict[str, Any] = {}
        for f in self.matcher.filters:
            result = f.behavior(fields.get(f.field), f.settings, community)
            if not result.matched:
                return MatchResult(False)
            exports.update(result.exports)
        return MatchResult(True, exports)


def _compile_value(raw: SettingValue, scopes) -> CompiledValue:
    if isinstance(raw, Literal):
        return CompiledLiteral(raw.value)
    if isinstance(raw, Reference):
        binding = scopes[raw.token.scope][raw.token.name]
        return CompiledRef(raw.token, binding.entity, binding.value_type)
    segments: list[Union[str, CompiledRef]] = []
    for seg in raw.segments:
        if isinstance(seg, ReferenceToken):
            binding = scopes[seg.scope][seg.name]
            segments.append(CompiledRef(seg, binding.entity, binding.value_type))
        else:
            segments.append(seg)
    return CompiledTemplate(tuple(segments))


def _compile_settings(desc: ComponentDescriptor, given: dict[str, SettingValue],
                      scopes) -> dict[str, CompiledValue]:
    out: dict[str, CompiledValue] = {}
    for spec in desc.settings:
        if spec.name in given:
            out[spec.name] = _compile_value(given[spec.name], scopes)
        elif spec.has_default:
            out[spec.name] = CompiledLiteral(spec.default)
    return out


def _collect_refs(values: dict[str, CompiledValue]):
    for v in values.values():
        if isinstance(v, CompiledRef):
            yield v
        elif isinstance(v, CompiledTemplate):
            for seg in v.segments:
                if isinstance(seg, CompiledRef):
                    yield seg


def compile_policy(doc: PolicyDocument, registry: Registry,
                   community: Optional[CommunitySnapshot] = None) -> ExecutablePolicy:
    """Link a document against the registry; total on valid inputs.

    Raises StaleRegistry on a version mismatch and InvalidPolicy (carrying the
    report) when validation finds diagnostics, so compile succeeds exactly when
    the validation report is empty.
    """
    if doc.registry_version != registry.version:
        raise StaleRegistry(
            f"policy {doc.id!r} was validated against registry version "
            f"{doc.registry_version}, loaded version is {registry.version}")
    report = validate_policy(doc, registry, community)
    if not report.ok:
        raise InvalidPolicy(report)

    scopes = scope_bindings(doc, registry)
    base = registry.lookup(ComponentKind.BASE_ACTION, doc.action.base_action)

    filters = []
    for inst in doc.action.filters:
        fdesc = registry.lookup(ComponentKind.FILTER, inst.filter)
        behavior = FILTER_BEHAVIORS.get(fdesc.behavior)
        if behavior is None:
            raise InternalLinkError(f"filter behavior {fdesc.behavior!r} is unregistered")
        settings = {}
        for spec in fdesc.settings:
            if spec.name in inst.settings:
                settings[spec.name] = inst.settings[spec.name].value  # literals only
            elif spec.has_default:
                settings[spec.name] = spec.default
        filters.append(CompiledFilter(field=inst.field, name=inst.filter,
                                      behavior=behavior, settings=settings))
    matcher = CompiledMatcher(action_kind=doc.action.base_action, filters=filters)

    pdesc = registry.lookup(ComponentKind.BASE_PROCEDURE, doc.procedure.base_procedure)
    pbehavior = PROCEDURE_BEHAVIORS.get(pdesc.behavior)
    if pbehavior is None:
        raise InternalLinkError(f"procedure behavior {pdesc.behavior!r} is unregistered")
    procedure = ProcedureLink(
        name=pdesc.name,
        behavior=pbehavior,
        settings=_compile_settings(pdesc, doc.procedure.settings, scopes),
        variables=tuple(v.name for v in pdesc.variables),
    )

    decorators = []
    for dec in doc.procedure.decorators:
        ddesc = registry.lookup(ComponentKind.DECORATOR, dec.name)
        factory = DECORATOR_BEHAVIORS.get(ddesc.behavior)
        if factory is None:
            raise InternalLinkError(f"decorator behavior {ddesc.behavior!r} is unregistered")
        decorators.append(DecoratorLink(
            name=dec.name, hooks=factory(),
            settings=_compile_settings(ddesc, dec.settings, scopes)))

    def program(insts) -> list[BoundCall]:
        calls = []
        for inst in insts:
            edesc = registry.lookup(ComponentKind.EXECUTION, inst.execution)
            calls.append(BoundCall(execution=inst.execution,
                                   settings=_compile_settings(edesc, inst.settings, scopes)))
        return calls

    pass_program = program(doc.procedure.on_pass)
    fail_program = program(doc.procedure.on_fail)

    binding_plan: dict[ReferenceToken, SlotPlan] = {}
    base_fields = {v.name for v in base.variables}
    proc_settings = {s.name for s in pdesc.settings}
    all_values = [procedure.settings] + [d.settings for d in decorators] \
        + [c.settings for c in pass_program + fail_program]
    for values in all_values:
        for ref in _collect_refs(values):
            token = ref.token
            if token in binding_plan:
                continue
            if token.scope == "action":
                source = "action_field" if token.name in base_fields else "filter_export"
                fill_at = "open"
            else:
                source = "procedure_setting" if token.name in proc_settings \
                    else "procedure_output"
                fill_at = "open" if source == "procedure_setting" else "close"
            binding_plan[token] = SlotPlan(source=source, fill_at=fill_at,
                                           entity=ref.entity, value_type=ref.value_type)

    return ExecutablePolicy(
        policy_id=doc.id,
        enabled=doc.enabled,
        registry_version=doc.registry_version,
        matcher=matcher,
        procedure=procedure,
        decorators=decorators,
        pass_program=pass_program,
        fail_program=fail_program,
        binding_plan=binding_plan,
    )


# --- source rendering -----------------------------------------------------------

SECTION_ORDER = ("notify", "check", "pass", "fail")  # decorators print above the procedure


@dataclass
class RenderedSource:
    """Human-readable splice of component snippets, deterministic per document."""

    sections: dict[str, str]

    @property
    def text(self) -> str:
        parts = []
        for key in SECTION_ORDER:
            body = self.sections.get(key, "")
            parts.append(f"# --- {key} ---")
            if body:
                parts.append(body)
        return "\n".join(parts) + "\n"


def _render_setting_text(value: Optional[SettingValue]) -> str:
    if value is None:
        return "None"
    if isinstance(value, Literal):
        return json.dumps(value.value, ensure_ascii=False)
    if isinstance(value, Reference):
        return str(value.token)
    text = "".join(str(s) if isinstance(s, ReferenceToken) else s for s in value.segments)
    return json.dumps(text, ensure_ascii=False)


def _splice(desc: ComponentDescriptor, given: dict[str, SettingValue]) -> str:
    snippet = f"# {desc.name}\n{desc.source_view}" if desc.source_view else f"# {desc.name}"
    for spec in desc.settings:
        if spec.name in given:
            rendered = _render_setting_text(given[spec.name])
        elif spec.has_default:
            rendered = json.dumps(spec.default, ensure_ascii=False)
        else:
            rendered = "None"
        snippet = snippet.replace("{%s}" % spec.name, rendered)
    return snippet


def render_source(doc: PolicyDocument, registry: Registry,
                  community: Optional[CommunitySnapshot] = None) -> RenderedSource:
    """Textual view of the compiled policy; references stay symbolic."""
    if doc.registry_version != registry.version:
        raise StaleRegistry(
            f"policy {doc.id!r} was validated against registry version "
            f"{doc.registry_version}, loaded version is {registry.version}")
    report = validate_policy(doc, registry, community)
    if not report.ok:
        raise InvalidPolicy(report)

    notify = "\n\n".join(
        _splice(registry.lookup(ComponentKind.DECORATOR, d.name), d.settings)
        for d in doc.procedure.decorators)
    pdesc = registry.lookup(ComponentKind.BASE_PROCEDURE, doc.procedure.base_procedure)
    check = _splice(pdesc, doc.procedure.settings)

    def execs(insts) -> str:
        return "\n\n".join(
            _splice(registry.lookup(ComponentKind.EXECUTION, e.execution), e.settings)
            for e in insts)

    return RenderedSource(sections={
        "notify": notify,
        "check": check,
        "pass": execs(doc.procedure.on_pass),
        "fail": execs(doc.procedure.on_fail),
    })
