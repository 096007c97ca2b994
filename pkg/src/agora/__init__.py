"""Declarative governance policies over a simulated chat community.

Policies decompose into modular components (base action + filters; base
procedure + settings + decorators + executions), compile into executable
plans, and run against an event-driven engine that orchestrates asynchronous
voting.
"""

__version__ = "0.1.0"

from .community import CommunityState, CommunitySnapshot, load_community, snapshot
from .compiler import ExecutablePolicy, RenderedSource, compile_policy, render_source
from .engine import ActionEvent, Engine, Proposal, trace_to_ldjson
from .entities import Entity, ValueType
from .policy import (
    PolicyDocument,
    PolicyDraft,
    ReferenceToken,
    ValidationReport,
    global_variable_list,
    load_policy,
    parse_reference_text,
    validate_policy,
)
from .registry import (
    ComponentDescriptor,
    ComponentKind,
    Registry,
    RegistryHolder,
    SettingSpec,
    VariableBinding,
    VariableSpec,
    compatible_variables,
    load_library,
    serialize_library,
)
from .scenario import ScenarioScript, load_scenario, run_scenario
from .stdlib import stdlib_json, stdlib_registry

__all__ = [
    "ActionEvent",
    "CommunityState",
    "CommunitySnapshot",
    "ComponentDescriptor",
    "ComponentKind",
    "Engine",
    "Entity",
    "ExecutablePolicy",
    "PolicyDocument",
    "PolicyDraft",
    "Proposal",
    "ReferenceToken",
    "Registry",
    "RegistryHolder",
    "RenderedSource",
    "ScenarioScript",
    "SettingSpec",
    "ValidationReport",
    "ValueType",
    "VariableBinding",
    "VariableSpec",
    "compatible_variables",
    "compile_policy",
    "global_variable_list",
    "load_community",
    "load_library",
    "load_policy",
    "load_scenario",
    "parse_reference_text",
    "render_source",
    "run_scenario",
    "serialize_library",
    "snapshot",
    "stdlib_json",
    "stdlib_registry",
    "trace_to_ldjson",
    "validate_policy",
]
