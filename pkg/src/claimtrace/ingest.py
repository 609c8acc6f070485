"""Rule-driven conversion of agent trace logs into provenance graphs.

Traces are JSON-lines records (action kind, tool id, inputs, outputs,
cited node ids, timestamp). A mapping document declares which actions
become source/reasoning/claim nodes and how cited ids turn into edges.
Records no rule can place are listed in the ingestion report, never
dropped silently; a record either applies completely or not at all.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ClaimtraceError, SchemaViolation
from .graph import (
    ClaimNode,
    Location,
    ProvenanceGraph,
    ReasoningNode,
    SourceNode,
    TypedEdge,
    parse_rfc3339_utc,
)
from .store import edge_to_document, node_to_document

MAPPING_FORMAT = "claimtrace-mapping/1"

_NODE_FIELDS = {
    "source": ("id", "locator", "excerpt", "timestamp"),
    "reasoning": ("id", "inference", "kind", "model"),
    "claim": ("id", "statement", "section", "start", "end"),
}


@dataclass(frozen=True)
class MappingRule:
    """One declarative trace-to-graph rule."""

    when: dict
    emit: str
    fields: dict
    edges: dict | None = None


def parse_mapping(doc: dict):
    """Validate a mapping document into rules; SchemaViolation on defects."""
    if not isinstance(doc, dict) or doc.get("format") != MAPPING_FORMAT:
        raise SchemaViolation(f"not a {MAPPING_FORMAT} document")
    rules = []
    for i, raw in enumerate(doc.get("rules", []), start=1):
        if not isinstance(raw, dict):
            raise SchemaViolation(f"rule {i}: must be an object")
        emit = raw.get("emit")
        if emit not in _NODE_FIELDS:
            raise SchemaViolation(f"rule {i}: emit must be one of {sorted(_NODE_FIELDS)}")
        when = raw.get("when")
        if not isinstance(when, dict) or not when:
            raise SchemaViolation(f"rule {i}: when must be a non-empty object")
        fields = raw.get("fields")
        if not isinstance(fields, dict):
            raise SchemaViolation(f"rule {i}: fields must be an object")
        missing = [f for f in _NODE_FIELDS[emit] if f not in fields]
        if missing:
            raise SchemaViolation(f"rule {i}: fields missing {missing} for emit={emit}")
        edges = raw.get("edges")
        if edges is not None:
            if not isinstance(edges, dict) or "rel" not in edges:
                raise SchemaViolation(f"rule {i}: edges needs at least a rel")
            edges.setdefault("sources", "cites")
        rules.append(MappingRule(when, emit, fields, edges))
    if not rules:
        raise SchemaViolation("mapping document declares no rules")
    return rules


def load_mapping_file(path):
    try:
        doc = json.loads(Path(path).read_text("utf-8"))
    except ValueError as exc:
        raise SchemaViolation(f"mapping is not JSON: {exc}") from exc
    return parse_mapping(doc)


def load_trace_file(path):
    """Parse a JSON-lines trace into (line_no, record) pairs."""
    records = []
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except ValueError as exc:
                raise SchemaViolation(f"line {line_no}: not JSON: {exc}", line=line_no) from exc
            _check_record(record, line_no)
            records.append((line_no, record))
    return records


def _check_record(record, line_no: int):
    if not isinstance(record, dict):
        raise SchemaViolation(f"line {line_no}: record must be an object", line=line_no)
    action = record.get("action")
    if not isinstance(action, str) or not action:
        raise SchemaViolation(
            f"line {line_no}: action must be a non-empty string", line=line_no, field="action"
        )
    at = record.get("at")
    try:
        parse_rfc3339_utc(at)
    except (ValueError, TypeError) as exc:
        raise SchemaViolation(f"line {line_no}: {exc}", line=line_no, field="at") from exc
    for key, type_ in (("tool", str), ("inputs", dict), ("outputs", dict), ("cites", list)):
        if key in record and not isinstance(record[key], type_):
            raise SchemaViolation(
                f"line {line_no}: {key} must be a {type_.__name__}", line=line_no, field=key
            )
    if "cites" in record and not all(isinstance(c, str) and c for c in record["cites"]):
        raise SchemaViolation(
            f"line {line_no}: cites must be non-empty strings", line=line_no, field="cites"
        )


def _lookup(record: dict, path: str):
    value = record
    for part in path.split("."):
        if not isinstance(value, dict) or part not in value:
            raise KeyError(path)
        value = value[part]
    return value


@dataclass
class IngestReport:
    """What ingestion placed and what it could not."""

    mapped: int = 0
    unmapped: list = field(default_factory=list)
    node_events: int = 0
    edge_events: int = 0

    def to_document(self) -> dict:
        return {
            "mapped": self.mapped,
            "node_events": self.node_events,
            "edge_events": self.edge_events,
            "unmapped": [{"line": line, "reason": reason} for line, reason in self.unmapped],
        }


def _match(rule: MappingRule, record: dict) -> bool:
    return all(record.get(key) == value for key, value in rule.when.items())


def _build_node(rule: MappingRule, record: dict):
    values = {}
    for name in _NODE_FIELDS[rule.emit]:
        path = rule.fields[name]
        try:
            values[name] = _lookup(record, path)
        except KeyError:
            raise ValueError(f"missing field {path!r} for {name}") from None
    if rule.emit == "source":
        return SourceNode(values["id"], values["locator"], values["excerpt"], values["timestamp"])
    if rule.emit == "reasoning":
        return ReasoningNode(values["id"], values["inference"], values["kind"], values["model"])
    return ClaimNode(
        values["id"],
        values["statement"],
        Location(values["section"], values["start"], values["end"]),
    )


def _build_edges(rule: MappingRule, record: dict, node_id: str):
    if rule.edges is None:
        return []
    try:
        cited = _lookup(record, rule.edges["sources"])
    except KeyError:
        raise ValueError(f"missing cited locators at {rule.edges['sources']!r}") from None
    if not isinstance(cited, list):
        raise ValueError("cited locators must be a list")
    rel = rule.edges["rel"]
    strength = None
    if rel == "supports":
        path = rule.edges.get("strength_path")
        if path:
            try:
                strength = _lookup(record, path)
            except KeyError:
                strength = rule.edges.get("strength_default")
        else:
            strength = rule.edges.get("strength_default")
        if strength is None:
            raise ValueError("supports edges need strength_path or strength_default")
    edges = []
    seen = set()
    for cited_id in cited:
        if cited_id in seen:
            continue
        seen.add(cited_id)
        edges.append(TypedEdge(cited_id, node_id, rel, strength))
    return edges


def ingest_trace(records, rules, graph: ProvenanceGraph | None = None):
    """Convert trace records into graph structure.

    Returns (graph, report, events) where events are the (kind, payload)
    pairs that a store can append to make the graph replayable. Records
    apply atomically: any defect leaves the graph untouched and puts the
    record in the unmapped list with its reason.
    """
    graph = graph or ProvenanceGraph()
    report = IngestReport()
    events = []
    for line_no, record in records:
        rule = next((r for r in rules if _match(r, record)), None)
        if rule is None:
            report.unmapped.append((line_no, f"no mapping rule for action {record.get('action')!r}"))
            continue
        try:
            node = _build_node(rule, record)
            node.validate()
            edges = _build_edges(rule, record, node.id)
        except (ValueError, ClaimtraceError) as exc:
            report.unmapped.append((line_no, str(exc)))
            continue
        problem = _precheck(graph, node, edges)
        if problem:
            report.unmapped.append((line_no, problem))
            continue
        graph.add_node(node)
        for edge in edges:
            graph.add_edge(edge)
        report.mapped += 1
        report.node_events += 1
        report.edge_events += len(edges)
        events.append(("node_added", {"node_kind": rule.emit, "node": node_to_document(node)}))
        for edge in edges:
            events.append(("edge_added", {"edge": edge_to_document(edge)}))
    return graph, report, events


def _precheck(graph: ProvenanceGraph, node, edges) -> str | None:
    """Everything that could make the apply fail, checked up front."""
    if graph.has_node(node.id):
        return f"node id already present: {node.id}"
    if isinstance(node, SourceNode) and edges:
        return "source nodes take no incoming edges"
    for edge in edges:
        if edge.src == node.id:
            return "record cites its own node id"
        kind = graph.kind(edge.src)
        if kind is None:
            return f"cites unknown node {edge.src!r}"
        if kind == "claim":
            return f"cites claim node {edge.src!r} (claims take no outgoing edges)"
        try:
            edge.validate()
        except ClaimtraceError as exc:
            return str(exc)
    return None
