"""Durable, replayable persistence for provenance graphs.

Layout inside a store directory:

  <graph_id>.events      append-only log, one CRC32-framed record per line
  <graph_id>.snapshot    canonical graph document (sorted, fixed decimals)
  <graph_id>.groundtruth known contradiction annotations for CTran

Every event line is `crc32hex<space>json`; the first line of a log is a
header record naming the graph and query. Replay is a pure function of
the event sequence, and snapshots of the same logical graph are
byte-identical regardless of insertion order.
"""

import json
import os
import re
import threading
import zlib
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from . import canonical
from .errors import (
    ClaimtraceError,
    CorruptLog,
    InvalidConfig,
    SchemaViolation,
    StorageFull,
    UnknownClaim,
    UnknownGraph,
)
from .graph import (
    ClaimNode,
    Location,
    ProvenanceGraph,
    ReasoningNode,
    Resolution,
    SourceNode,
    TypedEdge,
    Violation,
    validate_graph,
)
from .metrics import AuditTiming, ContradictionAnnotation

EVENTS_FORMAT = "claimtrace-events/1"
SNAPSHOT_FORMAT = "claimtrace-snapshot/1"
GROUNDTRUTH_FORMAT = "claimtrace-groundtruth/1"

EVENT_KINDS = frozenset(
    {
        "node_added",
        "edge_added",
        "verdict_recorded",
        "gate_decision",
        "resolution_recorded",
        "timing_recorded",
    }
)

_GRAPH_ID_RE = re.compile(r"^[A-Za-z0-9][A-Za-z0-9._-]{0,127}$")


def check_graph_id(graph_id: str) -> str:
    """Graph ids double as file names, so the charset is restricted."""
    if not isinstance(graph_id, str) or not _GRAPH_ID_RE.match(graph_id):
        raise InvalidConfig(
            f"graph id must match [A-Za-z0-9][A-Za-z0-9._-]* (max 128 chars): {graph_id!r}"
        )
    return graph_id


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


@dataclass(frozen=True)
class AuditEvent:
    """One immutable, strictly ordered record in a graph's log."""

    seq: int
    at: str
    graph_id: str
    kind: str
    payload: dict

    def to_record(self) -> dict:
        return {
            "seq": self.seq,
            "at": self.at,
            "graph_id": self.graph_id,
            "kind": self.kind,
            "payload": self.payload,
        }


# -- node/edge/graph documents -------------------------------------------


def node_to_document(node) -> dict:
    if isinstance(node, SourceNode):
        return {
            "id": node.id,
            "locator": node.locator,
            "excerpt": node.excerpt,
            "timestamp": node.timestamp,
        }
    if isinstance(node, ReasoningNode):
        return {
            "id": node.id,
            "inference": node.inference,
            "kind": node.kind,
            "model": node.model,
        }
    if isinstance(node, ClaimNode):
        return {
            "id": node.id,
            "statement": node.statement,
            "location": {
                "section": node.location.section,
                "start": node.location.start,
                "end": node.location.end,
            },
        }
    raise InvalidConfig(f"not a graph node: {type(node).__name__}")


def node_from_document(node_kind: str, doc: dict):
    try:
        if node_kind == "source":
            return SourceNode(doc["id"], doc["locator"], doc["excerpt"], doc["timestamp"])
        if node_kind == "reasoning":
            return ReasoningNode(doc["id"], doc["inference"], doc["kind"], doc["model"])
        if node_kind == "claim":
            loc = doc["location"]
            return ClaimNode(
                doc["id"],
                doc["statement"],
                Location(loc["section"], loc["start"], loc["end"]),
            )
    except (KeyError, TypeError) as exc:
        raise SchemaViolation(f"malformed {node_kind} node document: {exc}") from exc
    raise SchemaViolation(f"unknown node kind: {node_kind!r}")


def edge_to_document(edge: TypedEdge) -> dict:
    return {"from": edge.src, "to": edge.dst, "rel": edge.rel, "strength": edge.strength}


def edge_from_document(doc: dict) -> TypedEdge:
    try:
        return TypedEdge(doc["from"], doc["to"], doc["rel"], doc.get("strength"))
    except (KeyError, TypeError) as exc:
        raise SchemaViolation(f"malformed edge document: {exc}") from exc


def graph_to_document(graph: ProvenanceGraph, graph_id: str, up_to_seq: int = 0) -> dict:
    """Canonical snapshot document: everything sorted, strengths fixed."""
    return {
        "format": SNAPSHOT_FORMAT,
        "graph_id": graph_id,
        "query": graph.query,
        "up_to_seq": up_to_seq,
        "sources": [node_to_document(graph.sources[k]) for k in sorted(graph.sources)],
        "reasoning": [node_to_document(graph.reasoning[k]) for k in sorted(graph.reasoning)],
        "claims": [node_to_document(graph.claims[k]) for k in sorted(graph.claims)],
        "edges": [edge_to_document(e) for e in graph.edge_list()],
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


def graph_from_document(doc: dict):
    """Assemble a graph from a snapshot document without early rejection.

    Returns (graph_id, graph, load_violations); defects that survive
    assembly are found by validate_graph, defects that would vanish
    (duplicate ids/edges) are reported here.
    """
    if not isinstance(doc, dict) or doc.get("format") != SNAPSHOT_FORMAT:
        raise SchemaViolation(f"not a {SNAPSHOT_FORMAT} document")
    nodes = []
    for kind_name, key in (("source", "sources"), ("reasoning", "reasoning"), ("claim", "claims")):
        for node_doc in doc.get(key, []):
            nodes.append(node_from_document(kind_name, node_doc))
    edges = [edge_from_document(e) for e in doc.get("edges", [])]
    resolutions = []
    for r in doc.get("resolutions", []):
        try:
            resolutions.append(
                Resolution(r["node_a"], r["node_b"], r["entity"], r["verdict"], r["auditor_id"])
            )
        except (KeyError, TypeError) as exc:
            raise SchemaViolation(f"malformed resolution document: {exc}") from exc
    graph, load_violations = ProvenanceGraph.from_parts(
        doc.get("query", ""), nodes, edges, resolutions
    )
    return doc.get("graph_id", ""), graph, load_violations


# -- event application ----------------------------------------------------


def apply_event(graph: ProvenanceGraph, event: AuditEvent) -> None:
    """Apply one event to a graph; raises on events that cannot apply."""
    payload = event.payload
    if event.kind == "node_added":
        graph.add_node(node_from_document(payload["node_kind"], payload["node"]))
    elif event.kind == "edge_added":
        graph.add_edge(edge_from_document(payload["edge"]))
    elif event.kind == "gate_decision":
        for edge_doc in payload["decision"].get("emitted_edges", []):
            edge = edge_from_document(edge_doc)
            graph.replace_agent_edges(edge.src, edge.dst, edge)
    elif event.kind == "resolution_recorded":
        graph.record_resolution(
            payload["node_a"],
            payload["node_b"],
            payload.get("entity", ""),
            payload["verdict"],
            payload.get("auditor_id", ""),
        )
    elif event.kind == "verdict_recorded":
        if not graph.has_node(payload["claim_id"]):
            raise UnknownClaim(f"verdict for unknown claim {payload['claim_id']}")
    elif event.kind == "timing_recorded":
        if not graph.has_node(payload["claim_id"]):
            raise UnknownClaim(f"timing for unknown claim {payload['claim_id']}")
        AuditTiming(
            payload["claim_id"],
            payload["seconds"],
            payload.get("auditor_id", ""),
            payload.get("verdict", "cannot_tell"),
        )
    else:
        raise SchemaViolation(f"unknown event kind: {event.kind!r}")


def replay_events(graph_id: str, query: str, events, collect: bool = False):
    """Rebuild graph state by applying events in order.

    With collect=True application errors become violations instead of
    exceptions (used by the validate surface).
    """
    graph = ProvenanceGraph(query)
    violations = []
    for event in events:
        try:
            apply_event(graph, event)
        except (ClaimtraceError, KeyError, TypeError) as exc:
            if not collect:
                raise
            violations.append(
                Violation("event_apply_failed", f"seq {event.seq}", f"{type(exc).__name__}: {exc}")
            )
    return graph, violations


# -- the event log file ----------------------------------------------------


def _frame(record: dict) -> bytes:
    body = json.dumps(record, sort_keys=True, separators=(",", ":"))
    crc = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
    return f"{crc:08x} {body}\n".encode("utf-8")


def _unframe(line: bytes, line_no: int) -> dict:
    text = line.decode("utf-8", errors="replace").rstrip("\n")
    if len(text) < 10 or text[8] != " ":
        raise CorruptLog(f"line {line_no}: missing checksum frame")
    crc_hex, body = text[:8], text[9:]
    try:
        expected = int(crc_hex, 16)
    except ValueError as exc:
        raise CorruptLog(f"line {line_no}: bad checksum field") from exc
    actual = zlib.crc32(body.encode("utf-8")) & 0xFFFFFFFF
    if actual != expected:
        raise CorruptLog(f"line {line_no}: checksum mismatch")
    try:
        record = json.loads(body)
    except ValueError as exc:
        raise CorruptLog(f"line {line_no}: unparseable record") from exc
    if not isinstance(record, dict):
        raise CorruptLog(f"line {line_no}: record is not an object")
    return record


class EventLog:
    """One graph's append-only log file."""

    def __init__(self, path: Path, fsync: bool = True, max_bytes: int | None = None):
        self.path = Path(path)
        self.fsync = fsync
        self.max_bytes = max_bytes
        self._tail_checked = False

    def exists(self) -> bool:
        return self.path.exists()

    def create(self, graph_id: str, query: str, at: str | None = None) -> None:
        if self.path.exists():
            raise InvalidConfig(f"event log already exists: {self.path}")
        header = {
            "format": EVENTS_FORMAT,
            "graph_id": graph_id,
            "query": query,
            "created_at": at or utc_now(),
        }
        self._write(_frame(header), creating=True)
        self._tail_checked = True

    def read(self):
        """Parse the whole log; returns (header, events)."""
        if not self.path.exists():
            raise UnknownGraph(f"no event log at {self.path}")
        header = None
        events = []
        last_seq = 0
        with self.path.open("rb") as fh:
            raw = fh.read()
        if not raw:
            raise CorruptLog("line 1: empty log file")
        if not raw.endswith(b"\n"):
            line_no = raw.count(b"\n") + 1
            raise CorruptLog(f"line {line_no}: truncated final record")
        for line_no, line in enumerate(raw.splitlines(keepends=False), start=1):
            record = _unframe(line + b"\n", line_no)
            if line_no == 1:
                if record.get("format") != EVENTS_FORMAT:
                    raise CorruptLog("line 1: missing log header")
                header = record
                continue
            try:
                event = AuditEvent(
                    int(record["seq"]),
                    record["at"],
                    record["graph_id"],
                    record["kind"],
                    record["payload"],
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise CorruptLog(f"line {line_no}: malformed event: {exc}") from exc
            if event.seq != last_seq + 1:
                raise CorruptLog(
                    f"line {line_no}: seq {event.seq} breaks strict ordering after {last_seq}"
                )
            if event.kind not in EVENT_KINDS:
                raise CorruptLog(f"line {line_no}: unknown event kind {event.kind!r}")
            last_seq = event.seq
            events.append(event)
        return header, events

    def last_seq(self) -> int:
        _, events = self.read()
        return events[-1].seq if events else 0

    def _check_tail(self) -> None:
        # Cheap corruption probe before appending: re-verify the last line.
        if self._tail_checked or not self.path.exists():
            return
        with self.path.open("rb") as fh:
            fh.seek(0, os.SEEK_END)
            size = fh.tell()
            fh.seek(max(0, size - 65536))
            chunk = fh.read()
        if not chunk or not chunk.endswith(b"\n"):
            raise CorruptLog("tail: truncated final record")
        last_line = chunk.splitlines()[-1]
        _unframe(last_line + b"\n", -1)
        self._tail_checked = True

    def _write(self, data: bytes, creating: bool = False) -> None:
        if self.max_bytes is not None:
            current = self.path.stat().st_size if self.path.exists() else 0
            if current + len(data) > self.max_bytes:
                raise StorageFull(
                    f"appending {len(data)} bytes would exceed quota {self.max_bytes}"
                )
        mode = "xb" if creating else "ab"
        with self.path.open(mode) as fh:
            fh.write(data)
            fh.flush()
            if self.fsync:
                os.fsync(fh.fileno())

    def append(self, event: AuditEvent) -> int:
        """Write one event; durable before the sequence number returns."""
        self._check_tail()
        self._write(_frame(event.to_record()))
        return event.seq


# -- the store -------------------------------------------------------------


class Store:
    """Directory of event logs, snapshots, and ground-truth documents.

    Appends per graph serialize through a per-graph lock; reads of
    committed events never block appenders.
    """

    def __init__(self, root, fsync: bool = True, max_bytes: int | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.fsync = fsync
        self.max_bytes = max_bytes
        self._meta_lock = threading.Lock()
        self._locks: dict = {}
        self._logs: dict = {}
        self._live: dict = {}
        self._next_seq: dict = {}

    # paths
    def events_path(self, graph_id: str) -> Path:
        return self.root / f"{graph_id}.events"

    def snapshot_path(self, graph_id: str) -> Path:
        return self.root / f"{graph_id}.snapshot"

    def ground_truth_path(self, graph_id: str) -> Path:
        return self.root / f"{graph_id}.groundtruth"

    def lock(self, graph_id: str) -> threading.Lock:
        with self._meta_lock:
            if graph_id not in self._locks:
                self._locks[graph_id] = threading.Lock()
            return self._locks[graph_id]

    def _log(self, graph_id: str) -> EventLog:
        check_graph_id(graph_id)
        with self._meta_lock:
            if graph_id not in self._logs:
                self._logs[graph_id] = EventLog(
                    self.events_path(graph_id), fsync=self.fsync, max_bytes=self.max_bytes
                )
            return self._logs[graph_id]

    def graph_ids(self):
        return sorted(p.name[: -len(".events")] for p in self.root.glob("*.events"))

    def exists(self, graph_id: str) -> bool:
        return self.events_path(graph_id).exists()

    def create_graph(self, graph_id: str, query: str = "", at: str | None = None) -> None:
        log = self._log(graph_id)
        with self.lock(graph_id):
            log.create(graph_id, query, at=at)
            self._next_seq[graph_id] = 1
            self._live[graph_id] = ProvenanceGraph(query)

    def append(
        self, graph_id: str, kind: str, payload: dict, at: str | None = None, query: str = ""
    ) -> int:
        """Append one event (auto-creating the log) and apply it live."""
        if kind not in EVENT_KINDS:
            raise SchemaViolation(f"unknown event kind: {kind!r}")
        log = self._log(graph_id)
        with self.lock(graph_id):
            if not log.exists():
                log.create(graph_id, query, at=at)
                self._next_seq[graph_id] = 1
                self._live[graph_id] = ProvenanceGraph(query)
            graph = self._live_graph_locked(graph_id)
            seq = self._next_seq[graph_id]
            event = AuditEvent(seq, at or utc_now(), graph_id, kind, dict(payload))
            # Apply first: an event that cannot apply must never be logged.
            apply_event(graph, event)
            try:
                log.append(event)
            except ClaimtraceError:
                # Log/live divergence: drop the cache so the next read replays.
                self._live.pop(graph_id, None)
                self._next_seq.pop(graph_id, None)
                raise
            self._next_seq[graph_id] = seq + 1
            return seq

    def events(self, graph_id: str):
        header, events = self._log(graph_id).read()
        return header, events

    def replay(self, graph_id: str, collect: bool = False):
        """Rebuild the graph from its full event log."""
        header, events = self.events(graph_id)
        graph, violations = replay_events(
            graph_id, header.get("query", ""), events, collect=collect
        )
        if collect:
            return graph, violations
        return graph

    def _live_graph_locked(self, graph_id: str) -> ProvenanceGraph:
        if graph_id not in self._live:
            header, events = self.events(graph_id)
            graph, _ = replay_events(graph_id, header.get("query", ""), events)
            self._live[graph_id] = graph
            self._next_seq[graph_id] = (events[-1].seq if events else 0) + 1
        return self._live[graph_id]

    def live_graph(self, graph_id: str) -> ProvenanceGraph:
        """The graph with every committed event applied (cached)."""
        if not self.exists(graph_id):
            raise UnknownGraph(f"no graph named {graph_id}")
        with self.lock(graph_id):
            return self._live_graph_locked(graph_id)

    def query_of(self, graph_id: str) -> str:
        header, _ = self.events(graph_id)
        return header.get("query", "")

    def last_seq(self, graph_id: str) -> int:
        with self.lock(graph_id):
            if graph_id in self._next_seq:
                return self._next_seq[graph_id] - 1
            return self._log(graph_id).last_seq()

    # -- snapshots --------------------------------------------------------

    def snapshot_document(self, graph_id: str) -> dict:
        header, events = self.events(graph_id)
        graph, _ = replay_events(graph_id, header.get("query", ""), events)
        return graph_to_document(graph, graph_id, events[-1].seq if events else 0)

    def snapshot_bytes(self, graph_id: str) -> bytes:
        return canonical.dump_bytes(self.snapshot_document(graph_id))

    def write_snapshot(self, graph_id: str) -> Path:
        data = self.snapshot_bytes(graph_id)
        path = self.snapshot_path(graph_id)
        path.write_bytes(data)
        return path

    def load(self, graph_id: str, prefer_snapshot: bool = False) -> ProvenanceGraph:
        """Graph state; optionally snapshot plus tail instead of full replay."""
        if not prefer_snapshot or not self.snapshot_path(graph_id).exists():
            return self.replay(graph_id)
        doc = json.loads(self.snapshot_path(graph_id).read_text("utf-8"))
        _, graph, load_violations = graph_from_document(doc)
        if load_violations:
            raise CorruptLog(f"snapshot {graph_id}: {load_violations[0].line()}")
        result = validate_graph(graph)
        if not result.ok:
            raise CorruptLog(f"snapshot {graph_id}: {result.violations[0].line()}")
        up_to = int(doc.get("up_to_seq", 0))
        _, events = self.events(graph_id)
        for event in events:
            if event.seq > up_to:
                apply_event(graph, event)
        return graph

    # -- ground truth and timings ------------------------------------------

    def write_ground_truth(self, graph_id: str, annotations) -> Path:
        doc = {
            "format": GROUNDTRUTH_FORMAT,
            "graph_id": graph_id,
            "annotations": [
                {"node_a": a.node_a, "node_b": a.node_b, "entity": a.entity}
                for a in sorted(annotations, key=lambda a: (a.node_a, a.node_b, a.entity))
            ],
        }
        path = self.ground_truth_path(graph_id)
        path.write_bytes(canonical.dump_bytes(doc))
        return path

    def ground_truth(self, graph_id: str):
        path = self.ground_truth_path(graph_id)
        if not path.exists():
            return []
        return load_ground_truth_file(path)

    def timings(self, graph_id: str):
        _, events = self.events(graph_id)
        return [
            AuditTiming(
                e.payload["claim_id"],
                e.payload["seconds"],
                e.payload.get("auditor_id", ""),
                e.payload.get("verdict", "cannot_tell"),
            )
            for e in events
            if e.kind == "timing_recorded"
        ]


def load_ground_truth_file(path):
    """Parse a ground-truth document into annotations."""
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except ValueError as exc:
        raise SchemaViolation(f"ground truth is not JSON: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("format") != GROUNDTRUTH_FORMAT:
        raise SchemaViolation(f"not a {GROUNDTRUTH_FORMAT} document")
    annotations = []
    for i, entry in enumerate(doc.get("annotations", []), start=1):
        try:
            annotations.append(
                ContradictionAnnotation(
                    entry["node_a"], entry["node_b"], entry.get("entity", "")
                )
            )
        except (KeyError, TypeError) as exc:
            raise SchemaViolation(f"annotation {i}: {exc}", line=i) from exc
    return annotations


def read_events_file(path):
    """Read any .events file directly (outside a store directory)."""
    log = EventLog(Path(path))
    return log.read()


def load_snapshot_file(path):
    """Read any .snapshot file; returns (graph_id, graph, load_violations)."""
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except ValueError as exc:
        raise SchemaViolation(f"snapshot is not JSON: {exc}") from exc
    return graph_from_document(doc)
