"""Typed provenance DAG: sources, reasoning steps, claims, typed edges.

One graph answers one query. Lineage edges (supports/refines/prerequisite)
form a DAG and define backward reachability; contradicts edges annotate
conflicts and may be mutually opposed; validates/challenges edges are
written by the gate and never affect reachability.

Mutations are serialized per graph; reads may run concurrently once a
graph stops mutating. Set-valued outputs are emitted in lexicographic id
order, path node lists in topological order with ties broken by id, so
identical logical graphs always produce identical outputs.
"""

import heapq
import threading
from dataclasses import dataclass, field
from datetime import datetime
from types import MappingProxyType

import numpy as np

from . import kernels
from .errors import (
    CycleIntroduced,
    DuplicateEdge,
    DuplicateId,
    DuplicateResolution,
    EdgeIntoSource,
    EdgeOutOfClaim,
    InvalidNode,
    MissingStrength,
    NotAClaim,
    StrengthOnNonSupport,
    UnknownAnnotation,
    UnknownClaim,
    UnknownEndpoint,
)

LINEAGE_RELS = frozenset({"supports", "refines", "prerequisite"})
ANNOTATION_RELS = frozenset({"contradicts", "validates", "challenges"})
ALL_RELS = LINEAGE_RELS | ANNOTATION_RELS
AGENT_RELS = frozenset({"validates", "challenges"})

REASONING_KINDS = frozenset({"deduction", "induction", "synthesis"})
RESOLUTION_VERDICTS = frozenset({"upheld_a", "upheld_b", "both_reported"})

# Edge origins with this prefix identify gate/auditor agents rather than
# graph nodes; only validates/challenges edges may use them.
AGENT_PREFIX = "agent:"

MAX_ID_LEN = 128


def _check_id(node_id: str) -> str:
    if not isinstance(node_id, str) or not node_id:
        raise InvalidNode("node id must be a non-empty string")
    if len(node_id) > MAX_ID_LEN:
        raise InvalidNode(f"node id longer than {MAX_ID_LEN} chars: {node_id[:32]}...")
    if node_id.startswith(AGENT_PREFIX):
        raise InvalidNode(f"node id may not use the reserved '{AGENT_PREFIX}' prefix: {node_id}")
    return node_id


def parse_rfc3339_utc(value: str) -> datetime:
    """Parse an RFC 3339 UTC timestamp; raises ValueError on drift from UTC."""
    if not isinstance(value, str) or not value:
        raise ValueError("timestamp must be a non-empty RFC 3339 string")
    text = value[:-1] + "+00:00" if value.endswith(("Z", "z")) else value
    parsed = datetime.fromisoformat(text)
    if parsed.utcoffset() is None or parsed.utcoffset().total_seconds() != 0:
        raise ValueError(f"timestamp must be UTC: {value}")
    return parsed


@dataclass(frozen=True)
class SourceNode:
    """External evidence: a quoted excerpt retrieved from a locator."""

    id: str
    locator: str
    excerpt: str
    timestamp: str

    def validate(self):
        _check_id(self.id)
        if not isinstance(self.locator, str) or not self.locator:
            raise InvalidNode(f"source {self.id}: locator must be a non-empty string")
        if not isinstance(self.excerpt, str) or not self.excerpt.strip():
            raise InvalidNode(f"source {self.id}: excerpt must be non-empty")
        try:
            parse_rfc3339_utc(self.timestamp)
        except ValueError as exc:
            raise InvalidNode(f"source {self.id}: {exc}") from exc


@dataclass(frozen=True)
class ReasoningNode:
    """One inferential step (deduction, induction, or synthesis)."""

    id: str
    inference: str
    kind: str
    model: str

    def validate(self):
        _check_id(self.id)
        if not isinstance(self.inference, str) or not self.inference.strip():
            raise InvalidNode(f"reasoning {self.id}: inference must be non-empty")
        if self.kind not in REASONING_KINDS:
            raise InvalidNode(
                f"reasoning {self.id}: kind {self.kind!r} not in {sorted(REASONING_KINDS)}"
            )
        if not isinstance(self.model, str) or not self.model:
            raise InvalidNode(f"reasoning {self.id}: model must be a non-empty string")


@dataclass(frozen=True)
class Location:
    """Position of a claim in the output document."""

    section: str
    start: int
    end: int

    def validate(self, claim_id: str):
        if not isinstance(self.section, str):
            raise InvalidNode(f"claim {claim_id}: location section must be a string")
        if not isinstance(self.start, int) or not isinstance(self.end, int):
            raise InvalidNode(f"claim {claim_id}: location offsets must be integers")
        if self.start < 0 or self.end < self.start:
            raise InvalidNode(f"claim {claim_id}: location offsets out of order")

    def sort_key(self):
        return (self.section, self.start, self.end)


@dataclass(frozen=True)
class ClaimNode:
    """A factual assertion in the output; terminal node of the graph."""

    id: str
    statement: str
    location: Location

    def validate(self):
        _check_id(self.id)
        if not isinstance(self.statement, str) or not self.statement.strip():
            raise InvalidNode(f"claim {self.id}: statement must be non-empty")
        if not isinstance(self.location, Location):
            raise InvalidNode(f"claim {self.id}: location must be a Location")
        self.location.validate(self.id)


def _quantize_strength(value):
    # Strengths are stored at canonical (6-decimal) precision so snapshots,
    # replays, and threshold comparisons can never disagree.
    return None if value is None else round(float(value), 6)


@dataclass(frozen=True)
class TypedEdge:
    """Directed relation between nodes; strength only on supports edges."""

    src: str
    dst: str
    rel: str
    strength: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "strength", _quantize_strength(self.strength))

    def key(self):
        return (self.src, self.dst, self.rel)

    def label(self):
        return f"{self.src}->{self.dst}[{self.rel}]"

    def validate(self):
        if self.rel not in ALL_RELS:
            raise InvalidNode(f"edge {self.label()}: unknown relation {self.rel!r}")
        if self.rel == "supports":
            if self.strength is None:
                raise MissingStrength(f"edge {self.label()}: supports edges carry a strength")
            if not 0.0 <= self.strength <= 1.0:
                raise MissingStrength(
                    f"edge {self.label()}: strength {self.strength} outside [0, 1]"
                )
        elif self.strength is not None:
            raise StrengthOnNonSupport(
                f"edge {self.label()}: strength given with rel {self.rel!r}"
            )


@dataclass(frozen=True)
class Resolution:
    """Auditor verdict closing out one contradiction annotation.

    node_a/node_b are stored in lexicographic order; upheld_a/upheld_b are
    relative to that normalized order.
    """

    node_a: str
    node_b: str
    entity: str
    verdict: str
    auditor_id: str

    def key(self):
        return (self.node_a, self.node_b, self.entity)


@dataclass(frozen=True)
class ProvenancePath:
    """Backward closure of one claim over lineage edges.

    `nodes` is in topological order (ties by id) and always contains the
    claim; `sources`/`reasoning` are sorted. `annotations` carries the
    contradicts/validates/challenges edges touching any node on the path.
    """

    claim_id: str
    nodes: tuple
    sources: tuple
    reasoning: tuple
    complete: bool
    annotations: tuple

    @property
    def proxy(self) -> int:
        """Structural audit-effort proxy: sources plus reasoning steps."""
        return len(self.sources) + len(self.reasoning)


class _Index:
    """Immutable CSR view of the lineage subgraph for the kernels."""

    __slots__ = ("ids", "pos", "rev_indptr", "rev_indices", "fwd_indptr", "fwd_indices")

    def __init__(self, ids, pos, rev, fwd):
        self.ids = ids
        self.pos = pos
        self.rev_indptr, self.rev_indices = rev
        self.fwd_indptr, self.fwd_indices = fwd


def _build_csr(n, pos, adjacency):
    # Endpoints missing from `pos` (possible only in bulk-loaded broken
    # graphs) are skipped; validate_graph reports them separately.
    counts = [0] * n
    for node_id, neighbors in adjacency.items():
        if node_id in pos:
            counts[pos[node_id]] = sum(1 for other in neighbors if other in pos)
    indptr = np.zeros(n + 1, dtype=np.int32)
    np.cumsum(counts, out=indptr[1:])
    indices = np.empty(int(indptr[-1]), dtype=np.int32)
    for node_id, neighbors in adjacency.items():
        if node_id not in pos:
            continue
        i = int(indptr[pos[node_id]])
        for other in neighbors:
            if other in pos:
                indices[i] = pos[other]
                i += 1
    return indptr, indices


class ProvenanceGraph:
    """In-memory typed provenance DAG for one query."""

    def __init__(self, query: str = ""):
        self.query = query
        self._sources: dict[str, SourceNode] = {}
        self._reasoning: dict[str, ReasoningNode] = {}
        self._claims: dict[str, ClaimNode] = {}
        self._edges: dict[tuple, TypedEdge] = {}
        self._out_lineage: dict[str, list] = {}
        self._in_lineage: dict[str, list] = {}
        self._resolutions: dict[tuple, Resolution] = {}
        self._version = 0
        self._index_cache = None
        self._lock = threading.RLock()

    # -- introspection ----------------------------------------------------

    @property
    def sources(self):
        return MappingProxyType(self._sources)

    @property
    def reasoning(self):
        return MappingProxyType(self._reasoning)

    @property
    def claims(self):
        return MappingProxyType(self._claims)

    @property
    def version(self) -> int:
        return self._version

    def node(self, node_id: str):
        for table in (self._sources, self._reasoning, self._claims):
            if node_id in table:
                return table[node_id]
        return None

    def kind(self, node_id: str):
        if node_id in self._sources:
            return "source"
        if node_id in self._reasoning:
            return "reasoning"
        if node_id in self._claims:
            return "claim"
        return None

    def has_node(self, node_id: str) -> bool:
        return self.kind(node_id) is not None

    def node_ids(self):
        return sorted(self._sources) + sorted(self._reasoning) + sorted(self._claims)

    def node_count(self) -> int:
        return len(self._sources) + len(self._reasoning) + len(self._claims)

    def edge_list(self):
        """All edges sorted by (from, to, rel)."""
        return [self._edges[k] for k in sorted(self._edges)]

    def has_edge(self, src: str, dst: str, rel: str) -> bool:
        return (src, dst, rel) in self._edges

    def get_edge(self, src: str, dst: str, rel: str):
        return self._edges.get((src, dst, rel))

    def edge_count(self) -> int:
        return len(self._edges)

    def claim_ids_by_location(self):
        """Claim ids in document order (section, offsets, then id)."""
        return [
            c.id
            for c in sorted(self._claims.values(), key=lambda c: (c.location.sort_key(), c.id))
        ]

    def resolution_list(self):
        return [self._resolutions[k] for k in sorted(self._resolutions)]

    # -- mutation ---------------------------------------------------------

    def add_node(self, node):
        """Insert a node; raises DuplicateId/InvalidNode."""
        with self._lock:
            if isinstance(node, SourceNode):
                table = self._sources
            elif isinstance(node, ReasoningNode):
                table = self._reasoning
            elif isinstance(node, ClaimNode):
                table = self._claims
            else:
                raise InvalidNode(f"not a graph node: {type(node).__name__}")
            node.validate()
            if self.has_node(node.id):
                raise DuplicateId(f"node id already present: {node.id}")
            table[node.id] = node
            self._bump()

    def add_edge(self, edge: TypedEdge):
        """Insert an edge, preserving all structural invariants.

        Raises UnknownEndpoint, EdgeIntoSource, EdgeOutOfClaim,
        CycleIntroduced, StrengthOnNonSupport/MissingStrength, DuplicateEdge.
        """
        with self._lock:
            edge.validate()
            if edge.src == edge.dst:
                raise CycleIntroduced(f"edge {edge.label()}: self-edge")
            agent_origin = edge.src.startswith(AGENT_PREFIX)
            if agent_origin and edge.rel not in AGENT_RELS:
                raise UnknownEndpoint(
                    f"edge {edge.label()}: agent origins are only valid for "
                    f"validates/challenges edges"
                )
            if not agent_origin and not self.has_node(edge.src):
                raise UnknownEndpoint(f"edge {edge.label()}: unknown origin {edge.src}")
            if not self.has_node(edge.dst):
                raise UnknownEndpoint(f"edge {edge.label()}: unknown destination {edge.dst}")
            if edge.dst in self._sources:
                raise EdgeIntoSource(f"edge {edge.label()}: source nodes take no incoming edges")
            if edge.src in self._claims:
                raise EdgeOutOfClaim(f"edge {edge.label()}: claim nodes take no outgoing edges")
            if edge.key() in self._edges:
                raise DuplicateEdge(f"edge {edge.label()}: duplicate (from, to, rel) triple")
            if edge.rel in LINEAGE_RELS and self._lineage_reaches(edge.dst, edge.src):
                raise CycleIntroduced(f"edge {edge.label()}: would close a lineage cycle")
            self._insert_edge(edge)
            self._bump()

    def _insert_edge(self, edge: TypedEdge):
        self._edges[edge.key()] = edge
        if edge.rel in LINEAGE_RELS:
            self._out_lineage.setdefault(edge.src, []).append(edge.dst)
            self._in_lineage.setdefault(edge.dst, []).append(edge.src)

    def _remove_edge(self, key: tuple):
        edge = self._edges.pop(key)
        if edge.rel in LINEAGE_RELS:
            self._out_lineage[edge.src].remove(edge.dst)
            self._in_lineage[edge.dst].remove(edge.src)
        self._bump()

    def replace_agent_edges(self, agent_id: str, claim_id: str, edge: TypedEdge):
        """Upsert the gate's validates/challenges edge for one claim.

        The graph keeps only the latest gate verdict per claim; the full
        decision history lives in the audit-event log.
        """
        with self._lock:
            stale = [
                k
                for k, e in self._edges.items()
                if e.src == agent_id and e.dst == claim_id and e.rel in AGENT_RELS
            ]
            for k in stale:
                self._remove_edge(k)
            self.add_edge(edge)

    def record_resolution(self, node_a, node_b, entity, verdict, auditor_id) -> Resolution:
        """Record an auditor's resolution of a contradiction annotation."""
        with self._lock:
            if verdict not in RESOLUTION_VERDICTS:
                raise UnknownAnnotation(
                    f"verdict {verdict!r} not in {sorted(RESOLUTION_VERDICTS)}"
                )
            for node_id in (node_a, node_b):
                if not self.has_node(node_id):
                    raise UnknownAnnotation(f"annotation references unknown node {node_id}")
            if node_a == node_b:
                raise UnknownAnnotation("annotation endpoints must differ")
            if node_b < node_a:
                node_a, node_b = node_b, node_a
                if verdict == "upheld_a":
                    verdict = "upheld_b"
                elif verdict == "upheld_b":
                    verdict = "upheld_a"
            resolution = Resolution(node_a, node_b, entity, verdict, auditor_id)
            if resolution.key() in self._resolutions:
                raise DuplicateResolution(
                    f"annotation ({node_a}, {node_b}, {entity!r}) already resolved"
                )
            self._resolutions[resolution.key()] = resolution
            self._bump()
            return resolution

    def is_resolved(self, node_a: str, node_b: str) -> bool:
        """True if any resolution covers the unordered pair, any entity."""
        if node_b < node_a:
            node_a, node_b = node_b, node_a
        return any(k[0] == node_a and k[1] == node_b for k in self._resolutions)

    def _bump(self):
        self._version += 1
        self._index_cache = None

    # -- queries ----------------------------------------------------------

    def _lineage_reaches(self, start: str, target: str) -> bool:
        # Incremental DFS over the adjacency dict; used only by add_edge so
        # mutation never forces a CSR rebuild.
        stack = [start]
        seen = {start}
        while stack:
            u = stack.pop()
            if u == target:
                return True
            for v in self._out_lineage.get(u, ()):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return False

    def index(self) -> _Index:
        """CSR view of the lineage subgraph, cached until the next mutation."""
        with self._lock:
            cached = self._index_cache
            if cached is not None and cached[0] == self._version:
                return cached[1]
            ids = self.node_ids()
            pos = {node_id: i for i, node_id in enumerate(ids)}
            n = len(ids)
            rev = _build_csr(n, pos, self._in_lineage)
            fwd = _build_csr(n, pos, self._out_lineage)
            index = _Index(ids, pos, rev, fwd)
            self._index_cache = (self._version, index)
            return index

    def provenance_path(self, claim_id: str) -> ProvenancePath:
        """Backward closure of `claim_id` over lineage edges.

        Raises UnknownClaim for absent ids and NotAClaim when the id names
        a source or reasoning node.
        """
        node_kind = self.kind(claim_id)
        if node_kind is None:
            raise UnknownClaim(f"no node named {claim_id}")
        if node_kind != "claim":
            raise NotAClaim(f"{claim_id} is a {node_kind} node, not a claim")
        index = self.index()
        reached = kernels.closure(index.rev_indptr, index.rev_indices, index.pos[claim_id])
        members = {index.ids[i] for i in reached.tolist()}
        sources = tuple(sorted(m for m in members if m in self._sources))
        reasoning = tuple(sorted(m for m in members if m in self._reasoning))
        complete = bool(sources) and all(self._in_lineage.get(r) for r in reasoning)
        annotations = tuple(
            self._edges[k]
            for k in sorted(self._edges)
            if self._edges[k].rel in ANNOTATION_RELS
            and (self._edges[k].src in members or self._edges[k].dst in members)
        )
        return ProvenancePath(
            claim_id=claim_id,
            nodes=self._topo_order(members),
            sources=sources,
            reasoning=reasoning,
            complete=complete,
            annotations=annotations,
        )

    def _topo_order(self, members: set) -> tuple:
        indegree = {}
        for node_id in members:
            indegree[node_id] = sum(1 for u in self._in_lineage.get(node_id, ()) if u in members)
        ready = [node_id for node_id, deg in indegree.items() if deg == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            u = heapq.heappop(ready)
            order.append(u)
            for v in self._out_lineage.get(u, ()):
                if v in members:
                    indegree[v] -= 1
                    if indegree[v] == 0:
                        heapq.heappush(ready, v)
        return tuple(order)

    # -- bulk construction (deserialization path) --------------------------

    @classmethod
    def from_parts(cls, query, nodes, edges, resolutions=()):
        """Assemble a graph without per-operation checks.

        Used by loaders that must accept structurally broken input and
        report problems via validate_graph instead of raising midway.
        Returns (graph, load_violations) where load_violations covers
        defects invisible after assembly (id/edge-key collisions).
        """
        graph = cls(query)
        load_violations = []
        for node in nodes:
            table = {
                SourceNode: graph._sources,
                ReasoningNode: graph._reasoning,
                ClaimNode: graph._claims,
            }[type(node)]
            if graph.has_node(node.id):
                load_violations.append(
                    Violation("duplicate_id", node.id, "node id appears more than once")
                )
            table[node.id] = node
        for edge in edges:
            if edge.key() in graph._edges:
                load_violations.append(
                    Violation("duplicate_edge", edge.label(), "duplicate (from, to, rel) triple")
                )
                continue
            graph._insert_edge(edge)
        for res in resolutions:
            graph._resolutions[res.key()] = res
        graph._bump()
        return graph, load_violations


@dataclass(frozen=True)
class Violation:
    """One broken invariant, named by rule and subject."""

    rule: str
    subject: str
    detail: str

    def line(self) -> str:
        return f"{self.rule} {self.subject}: {self.detail}"


@dataclass
class ValidationResult:
    """Whole-graph re-check outcome: hard violations plus advisories."""

    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _lineage_sccs(graph: ProvenanceGraph):
    """Strongly connected components (size > 1) over lineage edges."""
    index = {}
    lowlink = {}
    on_stack = set()
    stack = []
    sccs = []
    counter = [0]

    def strongconnect(root):
        work = [(root, iter(sorted(graph._out_lineage.get(root, ()))))]
        index[root] = lowlink[root] = counter[0]
        counter[0] += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, neighbors = work[-1]
            advanced = False
            for child in neighbors:
                if child not in index:
                    index[child] = lowlink[child] = counter[0]
                    counter[0] += 1
                    stack.append(child)
                    on_stack.add(child)
                    work.append((child, iter(sorted(graph._out_lineage.get(child, ())))))
                    advanced = True
                    break
                if child in on_stack:
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                component = []
                while True:
                    member = stack.pop()
                    on_stack.discard(member)
                    component.append(member)
                    if member == node:
                        break
                if len(component) > 1:
                    sccs.append(sorted(component))

    for node_id in graph.node_ids():
        if node_id not in index:
            strongconnect(node_id)
    return sorted(sccs)


def validate_graph(graph: ProvenanceGraph) -> ValidationResult:
    """Re-check every invariant; violations are data, never exceptions.

    Dangling reasoning nodes (no incoming or no outgoing lineage edge) are
    reported as warnings: they are legal mid-construction and merely mark
    incomplete wiring, unlike the hard structural rules.
    """
    result = ValidationResult()

    for table in (graph._sources, graph._reasoning, graph._claims):
        for node in table.values():
            try:
                node.validate()
            except Exception as exc:  # noqa: BLE001 - every defect becomes data
                result.violations.append(Violation("invalid_node", node.id, str(exc)))

    seen_ids = {}
    for kind_name, table in (
        ("source", graph._sources),
        ("reasoning", graph._reasoning),
        ("claim", graph._claims),
    ):
        for node_id in table:
            if node_id in seen_ids:
                result.violations.append(
                    Violation(
                        "duplicate_id",
                        node_id,
                        f"id present as both {seen_ids[node_id]} and {kind_name}",
                    )
                )
            seen_ids[node_id] = kind_name

    for edge in graph.edge_list():
        label = edge.label()
        try:
            edge.validate()
        except Exception as exc:  # noqa: BLE001
            result.violations.append(Violation("invalid_edge", label, str(exc)))
            continue
        if edge.src == edge.dst:
            result.violations.append(Violation("self_edge", label, "self-edges are forbidden"))
            continue
        agent_origin = edge.src.startswith(AGENT_PREFIX)
        if agent_origin and edge.rel not in AGENT_RELS:
            result.violations.append(
                Violation("unknown_endpoint", label, "agent origin on a non-gate relation")
            )
        if not agent_origin and not graph.has_node(edge.src):
            result.violations.append(
                Violation("unknown_endpoint", label, f"origin {edge.src} not in graph")
            )
        if not graph.has_node(edge.dst):
            result.violations.append(
                Violation("unknown_endpoint", label, f"destination {edge.dst} not in graph")
            )
            continue
        if edge.dst in graph._sources:
            result.violations.append(
                Violation("edge_into_source", label, "source nodes take no incoming edges")
            )
        if edge.src in graph._claims:
            result.violations.append(
                Violation("edge_out_of_claim", label, "claim nodes take no outgoing edges")
            )

    for component in _lineage_sccs(graph):
        result.violations.append(
            Violation(
                "cycle_introduced",
                "->".join(component),
                "lineage edges form a cycle through these nodes",
            )
        )

    for res in graph.resolution_list():
        for node_id in (res.node_a, res.node_b):
            if not graph.has_node(node_id):
                result.violations.append(
                    Violation(
                        "unknown_resolution_node",
                        node_id,
                        f"resolution ({res.node_a}, {res.node_b}) references a missing node",
                    )
                )

    for node_id in sorted(graph._reasoning):
        missing = []
        if not graph._in_lineage.get(node_id):
            missing.append("incoming")
        if not graph._out_lineage.get(node_id):
            missing.append("outgoing")
        if missing:
            result.warnings.append(
                Violation(
                    "dangling_reasoning",
                    node_id,
                    f"reasoning node lacks {' and '.join(missing)} lineage edges",
                )
            )

    return result
