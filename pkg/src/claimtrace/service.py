"""Local HTTP service over a store: graphs, metrics, gating, audit sessions.

Single-tenant and local-first. When AAR_API_TOKEN is set every request
must carry `Authorization: Bearer <token>`. All bodies are canonical
documents; error bodies are `{"error": code, "detail": text}`. Every
state-mutating endpoint appends exactly one audit event; GETs append none.
"""

import os
import threading
import time
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response

from . import canonical, kernels
from .errors import (
    ClaimtraceError,
    CorruptLog,
    DuplicateEdge,
    DuplicateId,
    DuplicateResolution,
    EmptyClaimSet,
    EmptySample,
    InvalidConfig,
    InvalidNode,
    InvalidTiming,
    NotAClaim,
    RemoteMalformedResponse,
    RemoteUnavailable,
    SchemaViolation,
    ScorerError,
    StorageFull,
    UnknownAnnotation,
    UnknownClaim,
    UnknownEndpoint,
    UnknownGraph,
    UnknownNodeInAnnotation,
)
from .gate import GatePolicy, evaluate_claim
from .graph import ProvenanceGraph
from .metrics import VERDICTS, compute_report, detect_contradictions
from .store import Store, edge_to_document, graph_to_document, node_to_document

_STATUS_BY_ERROR = (
    (DuplicateResolution, 409),
    (DuplicateId, 409),
    (DuplicateEdge, 409),
    (UnknownGraph, 404),
    (UnknownClaim, 404),
    (NotAClaim, 404),
    (UnknownAnnotation, 404),
    (UnknownEndpoint, 400),
    (UnknownNodeInAnnotation, 400),
    (RemoteUnavailable, 503),
    (RemoteMalformedResponse, 503),
    (ScorerError, 503),
    (SchemaViolation, 400),
    (InvalidConfig, 400),
    (InvalidNode, 400),
    (InvalidTiming, 400),
    (EmptyClaimSet, 400),
    (EmptySample, 400),
    (StorageFull, 507),
    (CorruptLog, 500),
)


def _status_for(exc: ClaimtraceError) -> int:
    for err_type, status in _STATUS_BY_ERROR:
        if isinstance(exc, err_type):
            return status
    return 500


def _error_code(exc: Exception) -> str:
    name = type(exc).__name__
    out = [name[0].lower()]
    for ch in name[1:]:
        if ch.isupper():
            out.append("_")
            out.append(ch.lower())
        else:
            out.append(ch)
    return "".join(out)


def _doc_response(doc, status: int = 200) -> Response:
    return Response(
        content=canonical.dump_bytes(doc), status_code=status, media_type="application/json"
    )


def _error_response(code: str, detail: str, status: int) -> Response:
    return _doc_response({"error": code, "detail": detail}, status)


class _ApiError(Exception):
    """Non-ClaimtraceError HTTP failures (auth, bad routes, bad bodies)."""

    def __init__(self, code: str, detail: str, status: int):
        super().__init__(detail)
        self.code = code
        self.detail = detail
        self.status = status


@dataclass
class _ClaimTimer:
    opened: float | None = None
    seconds: float | None = None
    verdict: str | None = None

    @property
    def state(self) -> str:
        if self.seconds is not None:
            return "closed"
        if self.opened is not None:
            return "open"
        return "pending"


@dataclass
class _Session:
    session_id: str
    graph_id: str
    auditor_id: str
    started_at: str
    queue: list
    timers: dict = field(default_factory=dict)

    def to_document(self) -> dict:
        closed = [t for t in self.timers.values() if t.seconds is not None]
        mean_seconds = sum(t.seconds for t in closed) / len(closed) if closed else None
        return {
            "session_id": self.session_id,
            "graph_id": self.graph_id,
            "auditor_id": self.auditor_id,
            "started_at": self.started_at,
            "queue": list(self.queue),
            "claims": {
                claim_id: {
                    "state": timer.state,
                    "seconds": timer.seconds,
                    "verdict": timer.verdict,
                }
                for claim_id, timer in self.timers.items()
            },
            "summary": {
                "total": len(self.queue),
                "completed": len(closed),
                "mean_seconds": mean_seconds,
                "empirical_aeff_minutes": (mean_seconds / 60.0) if closed else None,
            },
        }


def _claim_doc(graph: ProvenanceGraph, claim_id: str) -> dict:
    doc = node_to_document(graph.claims[claim_id])
    gate_state = None
    for edge in graph.edge_list():
        if edge.dst == claim_id and edge.rel in ("validates", "challenges"):
            gate_state = edge.rel
    doc["gate"] = gate_state
    return doc


def _path_document(graph: ProvenanceGraph, graph_id: str, claim_id: str) -> dict:
    path = graph.provenance_path(claim_id)
    members = set(path.nodes)
    nodes = []
    for node_id in path.nodes:
        node_doc = node_to_document(graph.node(node_id))
        # node_kind, not kind: reasoning nodes carry their own kind field
        node_doc["node_kind"] = graph.kind(node_id)
        nodes.append(node_doc)
    lineage = [
        edge_to_document(e)
        for e in graph.edge_list()
        if e.rel in ("supports", "refines", "prerequisite")
        and e.src in members
        and e.dst in members
    ]
    return {
        "graph_id": graph_id,
        "claim_id": claim_id,
        "complete": path.complete,
        "proxy": path.proxy,
        "nodes": nodes,
        "edges": lineage,
        "sources": list(path.sources),
        "reasoning": list(path.reasoning),
        "annotations": [edge_to_document(e) for e in path.annotations],
    }


def _annotation_entries(store: Store, graph: ProvenanceGraph, graph_id: str, scorer) -> list:
    merged = {}
    for annotation in store.ground_truth(graph_id):
        merged[annotation.annotation_id] = annotation
    for annotation in detect_contradictions(graph, scorer, scorer.config.tau_contra):
        merged.setdefault(annotation.annotation_id, annotation)
    entries = []
    for annotation_id in sorted(merged):
        annotation = merged[annotation_id]
        doc = annotation.to_document()
        doc["edge_present"] = graph.has_edge(
            annotation.node_a, annotation.node_b, "contradicts"
        ) or graph.has_edge(annotation.node_b, annotation.node_a, "contradicts")
        doc["resolved"] = graph.is_resolved(annotation.node_a, annotation.node_b)
        entries.append(doc)
    return entries


def build_app(
    store: Store,
    scorer,
    policy: GatePolicy | None = None,
    clock=time.time,
    token: str | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    """Assemble the service; `clock` is injectable for timer tests.

    `static_dir` mounts the workbench's built assets at / (API routes
    keep precedence).
    """
    app = FastAPI(title="claimtrace", docs_url=None, redoc_url=None, openapi_url=None)
    # Local-first, token-authenticated, no cookies: permissive CORS lets the
    # workbench run standalone against a different origin.
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    policy = policy or GatePolicy()
    expected_token = os.environ.get("AAR_API_TOKEN") if token is None else token
    sessions: dict[str, _Session] = {}
    session_lock = threading.Lock()
    session_counter = [0]

    @app.exception_handler(ClaimtraceError)
    async def _claimtrace_error(_request, exc: ClaimtraceError):
        return _error_response(_error_code(exc), str(exc), _status_for(exc))

    @app.exception_handler(_ApiError)
    async def _api_error(_request, exc: _ApiError):
        return _error_response(exc.code, exc.detail, exc.status)

    @app.middleware("http")
    async def _auth(request: Request, call_next):
        # CORS preflights carry no Authorization header; let them through.
        if expected_token and request.method != "OPTIONS":
            header = request.headers.get("authorization", "")
            if header != f"Bearer {expected_token}":
                return _error_response("unauthorized", "missing or invalid bearer token", 401)
        return await call_next(request)

    async def _body(request: Request) -> dict:
        raw = await request.body()
        if not raw:
            return {}
        try:
            import json

            doc = json.loads(raw)
        except ValueError as exc:
            raise _ApiError("schema_violation", f"body is not JSON: {exc}", 400) from exc
        if not isinstance(doc, dict):
            raise _ApiError("schema_violation", "body must be a JSON object", 400)
        return doc

    def _graph(graph_id: str) -> ProvenanceGraph:
        if not store.exists(graph_id):
            raise UnknownGraph(f"no graph named {graph_id}")
        return store.live_graph(graph_id)

    def _session(session_id: str) -> _Session:
        session = sessions.get(session_id)
        if session is None:
            raise _ApiError("unknown_session", f"no session named {session_id}", 404)
        return session

    # -- read surface ------------------------------------------------------

    @app.get("/health")
    async def health():
        return _doc_response(
            {
                "status": "ok",
                "kernel_backend": kernels.BACKEND,
                "scorer": scorer.health_check(),
                "policy": policy.to_document(),
            }
        )

    @app.get("/graphs")
    async def list_graphs():
        entries = []
        for graph_id in store.graph_ids():
            graph = store.live_graph(graph_id)
            entries.append(
                {
                    "graph_id": graph_id,
                    "query": graph.query,
                    "sources": len(graph.sources),
                    "reasoning": len(graph.reasoning),
                    "claims": len(graph.claims),
                    "edges": graph.edge_count(),
                }
            )
        return _doc_response({"graphs": entries})

    @app.get("/graphs/{graph_id}")
    async def get_graph(graph_id: str):
        graph = _graph(graph_id)
        return _doc_response(graph_to_document(graph, graph_id, store.last_seq(graph_id)))

    @app.get("/graphs/{graph_id}/claims")
    async def get_claims(graph_id: str):
        graph = _graph(graph_id)
        return _doc_response(
            {
                "graph_id": graph_id,
                "query": graph.query,
                "claims": [_claim_doc(graph, cid) for cid in graph.claim_ids_by_location()],
            }
        )

    @app.get("/claims/{claim_id}/path")
    async def get_path(claim_id: str, graph_id: str | None = None):
        # graph_id query parameter disambiguates claim ids shared by graphs.
        if graph_id is not None:
            graph = _graph(graph_id)
            if claim_id not in graph.claims:
                raise UnknownClaim(f"no claim named {claim_id} in graph {graph_id}")
            return _doc_response(_path_document(graph, graph_id, claim_id))
        owners = [
            gid for gid in store.graph_ids() if claim_id in store.live_graph(gid).claims
        ]
        if not owners:
            raise UnknownClaim(f"no claim named {claim_id} in any graph")
        if len(owners) > 1:
            raise _ApiError(
                "ambiguous_claim",
                f"claim {claim_id} exists in graphs {owners}; pass ?graph_id=",
                409,
            )
        return _doc_response(_path_document(store.live_graph(owners[0]), owners[0], claim_id))

    @app.get("/graphs/{graph_id}/metrics")
    async def get_metrics(graph_id: str):
        graph = _graph(graph_id)
        report = compute_report(
            graph,
            scorer,
            ground_truth=store.ground_truth(graph_id),
            timings=store.timings(graph_id),
            graph_id=graph_id,
        )
        return _doc_response(report.to_document())

    @app.get("/graphs/{graph_id}/contradictions")
    async def get_contradictions(graph_id: str):
        graph = _graph(graph_id)
        return _doc_response(
            {
                "graph_id": graph_id,
                "annotations": _annotation_entries(store, graph, graph_id, scorer),
                "resolutions": [
                    {
                        "node_a": r.node_a,
                        "node_b": r.node_b,
                        "entity": r.entity,
                        "verdict": r.verdict,
                        "auditor_id": r.auditor_id,
                    }
                    for r in graph.resolution_list()
                ],
            }
        )

    # -- mutation surface ---------------------------------------------------

    @app.post("/graphs/{graph_id}/events")
    async def post_event(graph_id: str, request: Request):
        body = await _body(request)
        kind = body.get("kind")
        payload = body.get("payload")
        if not isinstance(kind, str) or not isinstance(payload, dict):
            raise _ApiError("schema_violation", "body needs kind and payload", 400)
        at = body.get("at")
        query = body.get("query", "")
        seq = store.append(graph_id, kind, payload, at=at, query=query)
        return _doc_response({"graph_id": graph_id, "seq": seq}, status=201)

    @app.post("/graphs/{graph_id}/gate/{claim_id}")
    async def post_gate(graph_id: str, claim_id: str, request: Request):
        body = await _body(request)
        effective = policy
        if "policy" in body:
            merged = policy.to_document()
            if not isinstance(body["policy"], dict):
                raise _ApiError("schema_violation", "policy override must be an object", 400)
            merged.update(body["policy"])
            effective = GatePolicy.from_document(merged)
        graph = _graph(graph_id)
        with store.lock(graph_id):
            decision = evaluate_claim(graph, claim_id, effective, scorer)
        seq = store.append(
            graph_id,
            "gate_decision",
            {"decision": decision.to_document(), "policy": effective.to_document()},
        )
        doc = decision.to_document()
        doc["graph_id"] = graph_id
        doc["seq"] = seq
        return _doc_response(doc)

    @app.post("/contradictions/{annotation_id}/resolution")
    async def post_resolution(annotation_id: str, request: Request):
        body = await _body(request)
        verdict = body.get("verdict")
        auditor_id = body.get("auditor_id", "")
        if verdict not in ("upheld_a", "upheld_b", "both_reported"):
            raise _ApiError(
                "schema_violation",
                "verdict must be one of upheld_a, upheld_b, both_reported",
                400,
            )
        scoped = body.get("graph_id")
        candidates = [scoped] if scoped else store.graph_ids()
        owners = []
        for graph_id in candidates:
            graph = _graph(graph_id)
            for entry in _annotation_entries(store, graph, graph_id, scorer):
                if entry["id"] == annotation_id:
                    owners.append((graph_id, entry))
                    break
        if not owners:
            raise UnknownAnnotation(f"no annotation named {annotation_id}")
        if len(owners) > 1:
            raise _ApiError(
                "ambiguous_annotation",
                f"annotation {annotation_id} exists in graphs "
                f"{[gid for gid, _ in owners]}; pass graph_id in the body",
                409,
            )
        graph_id, entry = owners[0]
        seq = store.append(
            graph_id,
            "resolution_recorded",
            {
                "node_a": entry["node_a"],
                "node_b": entry["node_b"],
                "entity": entry["entity"],
                "verdict": verdict,
                "auditor_id": auditor_id,
            },
        )
        return _doc_response(
            {
                "graph_id": graph_id,
                "annotation_id": annotation_id,
                "verdict": verdict,
                "seq": seq,
            }
        )

    # -- audit sessions ------------------------------------------------------

    @app.post("/sessions")
    async def post_session(request: Request):
        body = await _body(request)
        graph_id = body.get("graph_id")
        auditor_id = body.get("auditor_id")
        if not isinstance(graph_id, str) or not isinstance(auditor_id, str) or not auditor_id:
            raise _ApiError("schema_violation", "body needs graph_id and auditor_id", 400)
        graph = _graph(graph_id)
        queue = graph.claim_ids_by_location()
        with session_lock:
            session_counter[0] += 1
            session_id = f"sess-{session_counter[0]:04d}"
            session = _Session(
                session_id=session_id,
                graph_id=graph_id,
                auditor_id=auditor_id,
                started_at=_now_iso(clock),
                queue=queue,
                timers={claim_id: _ClaimTimer() for claim_id in queue},
            )
            sessions[session_id] = session
        return _doc_response(session.to_document(), status=201)

    @app.get("/sessions/{session_id}")
    async def get_session(session_id: str):
        return _doc_response(_session(session_id).to_document())

    @app.post("/sessions/{session_id}/claims/{claim_id}/open")
    async def open_timer(session_id: str, claim_id: str):
        with session_lock:
            session = _session(session_id)
            timer = session.timers.get(claim_id)
            if timer is None:
                raise UnknownClaim(f"claim {claim_id} is not in session {session_id}")
            if timer.state != "pending":
                raise _ApiError(
                    "timer_conflict", f"timer for {claim_id} is {timer.state}", 409
                )
            timer.opened = clock()
        return _doc_response(session.to_document())

    @app.post("/sessions/{session_id}/claims/{claim_id}/close")
    async def close_timer(session_id: str, claim_id: str, request: Request):
        body = await _body(request)
        verdict = body.get("verdict")
        if verdict not in VERDICTS:
            raise _ApiError(
                "schema_violation", f"verdict must be one of {sorted(VERDICTS)}", 400
            )
        with session_lock:
            session = _session(session_id)
            timer = session.timers.get(claim_id)
            if timer is None:
                raise UnknownClaim(f"claim {claim_id} is not in session {session_id}")
            if timer.state != "open":
                raise _ApiError(
                    "timer_conflict", f"timer for {claim_id} is {timer.state}, not open", 409
                )
            seconds = max(clock() - timer.opened, 1e-3)
            timer.seconds = seconds
            timer.verdict = verdict
        store.append(
            session.graph_id,
            "timing_recorded",
            {
                "claim_id": claim_id,
                "seconds": seconds,
                "auditor_id": session.auditor_id,
                "session_id": session_id,
                "verdict": verdict,
            },
        )
        store.append(
            session.graph_id,
            "verdict_recorded",
            {
                "claim_id": claim_id,
                "verdict": verdict,
                "auditor_id": session.auditor_id,
                "session_id": session_id,
            },
        )
        doc = session.to_document()
        doc["closed_claim"] = {"claim_id": claim_id, "seconds": seconds, "verdict": verdict}
        return _doc_response(doc)

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="workbench")

    return app


def _now_iso(clock) -> str:
    from datetime import datetime, timezone

    return datetime.fromtimestamp(clock(), tz=timezone.utc).isoformat(timespec="microseconds")
