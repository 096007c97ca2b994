"""HTTP surface over the registry, validation, compilation, and a live session.

A thin layer: every endpoint speaks the same JSON documents the files and CLI
use, so the authoring UI and batch tests exercise identical artifacts. The
default session owns one engine; its commands serialize through a lock.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field as dataclass_field
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse, PlainTextResponse

from . import __version__
from .community import CommunityState, snapshot
from .compiler import ExecutablePolicy, compile_policy, render_source
from .engine import ActionEvent, Engine, trace_to_ldjson
from .errors import AgoraError, InvalidPolicy
from .policy import PolicyDocument, PolicyDraft, global_variable_list, validate_policy
from .registry import Registry
from .scenario import ScenarioScript, run_scenario
from .stdlib import stdlib_registry


@dataclass
class SessionState:
    """One live simulated community plus its engine and enabled policies."""

    session_id: str
    registry: Registry
    community: CommunityState
    seed: int
    engine: Engine
    documents: dict[str, PolicyDocument] = dataclass_field(default_factory=dict)
    lock: threading.Lock = dataclass_field(default_factory=threading.Lock)


def _error_body(code: str, message: str, path: str = "") -> dict:
    return {"code": code, "message": message, "path": path}


def create_app(registry: Optional[Registry] = None,
               community: Optional[CommunityState] = None,
               seed: int = 0) -> FastAPI:
    registry = registry or stdlib_registry()
    community = community if community is not None else CommunityState()
    app = FastAPI(title="agora", version=__version__)
    session = SessionState(
        session_id="default",
        registry=registry,
        community=community,
        seed=seed,
        engine=Engine(registry=registry, community=community, policies=[], seed=seed),
    )
    app.state.session = session

    @app.exception_handler(AgoraError)
    async def _agora_error(_request: Request, exc: AgoraError):
        status = 400
        body = _error_body(type(exc).__name__, str(exc),
                           getattr(exc, "path", ""))
        if isinstance(exc, InvalidPolicy):
            body["diagnostics"] = [d.to_json() for d in exc.report.diagnostics]
        return JSONResponse(status_code=status, content=body)

    @app.get("/library")
    def get_library():
        ordered = sorted(session.registry.components.values(),
                         key=lambda d: (d.kind.value, d.name))
        return {"version": session.registry.version,
                "components": [d.to_json() for d in ordered]}

    @app.get("/community")
    def get_community():
        return snapshot(session.community).to_json()

    @app.post("/policies/validate")
    def post_validate(doc: dict):
        policy = PolicyDocument.from_json(doc)
        report = validate_policy(policy, session.registry, snapshot(session.community))
        return report.to_json()

    @app.post("/policies")
    def post_policy(doc: dict):
        policy = PolicyDocument.from_json(doc)
        with session.lock:
            executable = compile_policy(policy, session.registry,
                                        snapshot(session.community))
            session.documents[policy.id] = policy
            session.engine.add_policy(executable)
        return {"id": policy.id, "enabled": policy.enabled}

    @app.get("/policies")
    def get_policies():
        return {"policies": [d.to_json() for d in session.documents.values()]}

    @app.post("/policies/{policy_id}/compile")
    def post_compile(policy_id: str):
        doc = session.documents.get(policy_id)
        if doc is None:
            return JSONResponse(status_code=404,
                                content=_error_body("NotFound",
                                                    f"no policy {policy_id!r}"))
        rendered = render_source(doc, session.registry, snapshot(session.community))
        return {"id": policy_id, "sections": rendered.sections, "source": rendered.text}

    @app.post("/drafts/variables")
    def post_draft_variables(body: dict):
        raw = body.get("draft", {})
        draft = PolicyDraft(
            base_action=raw.get("base_action"),
            filters=list(raw.get("filters", [])),
            base_procedure=raw.get("base_procedure"),
        )
        bindings = global_variable_list(draft, session.registry)
        entity = body.get("entity")
        value_type = body.get("value_type")
        if entity is not None:
            matching = [b for b in bindings if b.entity.value == entity
                        and (value_type is None or b.value_type.value == value_type)]
        else:
            matching = bindings
        return {"variables": [b.to_json() for b in matching]}

    @app.post("/session/events")
    def post_event(body: dict):
        with session.lock:
            event = ActionEvent.from_json(
                body, default_id=f"api-e{len(session.engine._seen_events) + 1}",
                default_at=session.engine.now)
            effects = session.engine.submit_event(event)
        return {"event_id": event.event_id,
                "effects": [e.to_record() for e in effects],
                "proposals": [p.to_json() for p in session.engine.proposals.values()]}

    @app.post("/session/proposals/{proposal_id}/votes")
    def post_vote(proposal_id: str, body: dict):
        from .procedures import ballot_content_from_json
        with session.lock:
            content = ballot_content_from_json(body.get("ballot", {}))
            effects = session.engine.cast_vote(proposal_id, body["voter"], content,
                                               at=body.get("at"))
            proposal = session.engine.proposals[proposal_id]
        return {"effects": [e.to_record() for e in effects],
                "proposal": proposal.to_json()}

    @app.post("/session/tick")
    def post_tick(body: dict):
        with session.lock:
            effects = session.engine.tick(int(body["now"]))
        return {"effects": [e.to_record() for e in effects],
                "proposals": [p.to_json() for p in session.engine.proposals.values()]}

    @app.get("/session/trace")
    def get_trace():
        with session.lock:
            text = trace_to_ldjson(session.engine.trace)
        return PlainTextResponse(text, media_type="application/x-ndjson")

    @app.get("/session")
    def get_session():
        with session.lock:
            return {
                "session_id": session.session_id,
                "registry_version": session.registry.version,
                "seed": session.seed,
                "now": session.engine.now,
                "policies": sorted(session.documents),
                "proposals": [p.to_json() for p in session.engine.proposals.values()],
                "community": session.community.to_json(),
            }

    @app.post("/simulate")
    def post_simulate(body: dict):
        script = ScenarioScript.from_json(body.get("scenario", {}))
        policies: list[ExecutablePolicy] = []
        from .community import snapshot as snap
        validation_community = snap(script.initial)
        for raw in body.get("policies", []):
            doc = PolicyDocument.from_json(raw)
            policies.append(compile_policy(doc, session.registry, validation_community))
        seed = body.get("seed")
        trace, final = run_scenario(script, policies, session.registry, seed=seed)
        return {"trace": trace, "ldjson": trace_to_ldjson(trace),
                "community": final.to_json()}

    return app


def serve(host: str, port: int, registry: Optional[Registry] = None,
          community: Optional[CommunityState] = None, seed: int = 0) -> None:
    import uvicorn

    app = create_app(registry=registry, community=community, seed=seed)
    uvicorn.run(app, host=host, port=port, log_level="warning")
