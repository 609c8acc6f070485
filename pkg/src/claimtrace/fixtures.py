"""Canonical demo graphs: opaque aggregation vs. transparent reasoning.

Both graphs answer the same query over the same four sources. The
black-box variant wires sources straight to one claim and leaves the
other two ungrounded, hiding both known conflicts; the transparent
variant routes every claim through typed reasoning steps and carries the
conflicts as explicit contradicts edges. Their metric values are fixed by
construction (black box: PCov 1/3, PSnd 1/4, CTran 0; transparent: all
three 1.0) and pinned by golden files in the test suite.

Run `python -m claimtrace.fixtures DIR` to seed a demo store directory.
"""

from .gate import GatePolicy
from .graph import ClaimNode, Location, ProvenanceGraph, ReasoningNode, SourceNode, TypedEdge
from .ingest import MAPPING_FORMAT
from .metrics import ContradictionAnnotation
from .store import Store, edge_to_document, node_to_document

BLACK_BOX_GRAPH_ID = "blackbox-demo"
TRANSPARENT_GRAPH_ID = "transparent-demo"

DEMO_QUERY = "does edge caching improve tail latency in replicated key-value stores?"

_RETRIEVED_AT = "2026-02-14T09:00:00+00:00"
_EVENT_AT = "2026-02-14T09:05:00+00:00"

_SOURCES = [
    SourceNode(
        "s1",
        "https://example.org/papers/kv-cache-latency-field-study",
        "across three replicated key value deployments edge caching lowered p99 tail "
        "latency and latency gains persisted under read heavy workloads",
        _RETRIEVED_AT,
    ),
    SourceNode(
        "s2",
        "https://example.org/papers/cache-admission-benchmarks",
        "measurements show edge caching lowered p99 tail latency across replicated "
        "deployments while cache admission policies reduced memory pressure",
        _RETRIEVED_AT,
    ),
    SourceNode(
        "s3",
        "https://example.org/papers/cache-trials-replication",
        "in our trials cache admission policies reduced memory pressure although edge "
        "caching raised p99 tail latency in replicated deployments",
        _RETRIEVED_AT,
    ),
    SourceNode(
        "s4",
        "https://example.org/papers/write-heavy-cache-workloads",
        "under write heavy workloads latency gains vanished once replication pressure grew",
        _RETRIEVED_AT,
    ),
]

_CLAIMS = [
    ClaimNode(
        "c1",
        "edge caching lowered p99 tail latency in replicated deployments",
        Location("findings", 0, 62),
    ),
    ClaimNode(
        "c2",
        "cache admission policies reduced memory pressure in replicated deployments",
        Location("findings", 63, 138),
    ),
    ClaimNode(
        "c3",
        "latency gains persisted under read heavy workloads",
        Location("findings", 139, 189),
    ),
]

_REASONING = [
    ReasoningNode(
        "r1",
        "synthesized benchmark latency measurements into a deployment level finding",
        "synthesis",
        "demo-llm-1",
    ),
    ReasoningNode(
        "r2",
        "generalized cache admission behavior from repeated trial outcomes",
        "induction",
        "demo-llm-1",
    ),
    ReasoningNode(
        "r3",
        "derived workload persistence from the sustained latency measurements",
        "deduction",
        "demo-llm-1",
    ),
]

# Known evidence conflicts over these sources; both fixtures share them.
GROUND_TRUTH = [
    ContradictionAnnotation("s3", "c1", "latency"),
    ContradictionAnnotation("s4", "c3", "gains"),
]


def black_box_demo() -> ProvenanceGraph:
    """Opaque aggregation: direct citations, two orphan claims, no conflicts."""
    graph = ProvenanceGraph(DEMO_QUERY)
    for node in _SOURCES + _CLAIMS:
        graph.add_node(node)
    graph.add_edge(TypedEdge("s1", "c1", "supports", 0.90))
    graph.add_edge(TypedEdge("s2", "c1", "supports", 0.40))
    graph.add_edge(TypedEdge("s3", "c1", "supports", 0.30))
    graph.add_edge(TypedEdge("s4", "c1", "supports", 0.20))
    return graph


def transparent_demo() -> ProvenanceGraph:
    """Typed reasoning between sources and claims, conflicts made explicit."""
    graph = ProvenanceGraph(DEMO_QUERY)
    for node in _SOURCES + _REASONING + _CLAIMS:
        graph.add_node(node)
    graph.add_edge(TypedEdge("s1", "r1", "supports", 0.90))
    graph.add_edge(TypedEdge("s2", "r1", "supports", 0.85))
    graph.add_edge(TypedEdge("r1", "c1", "supports", 0.90))
    graph.add_edge(TypedEdge("s2", "r2", "supports", 0.80))
    graph.add_edge(TypedEdge("s3", "r2", "supports", 0.75))
    graph.add_edge(TypedEdge("r2", "c2", "supports", 0.80))
    graph.add_edge(TypedEdge("s1", "r3", "supports", 0.70))
    graph.add_edge(TypedEdge("r3", "c3", "supports", 0.85))
    graph.add_edge(TypedEdge("s3", "c1", "contradicts"))
    graph.add_edge(TypedEdge("s4", "c3", "contradicts"))
    return graph


def demo_mapping() -> dict:
    """Mapping rules for the synthetic trace format shipped with the repo."""
    return {
        "format": MAPPING_FORMAT,
        "rules": [
            {
                "when": {"action": "retrieve"},
                "emit": "source",
                "fields": {
                    "id": "outputs.doc_id",
                    "locator": "outputs.locator",
                    "excerpt": "outputs.excerpt",
                    "timestamp": "at",
                },
            },
            {
                "when": {"action": "synthesize"},
                "emit": "reasoning",
                "fields": {
                    "id": "outputs.step_id",
                    "inference": "outputs.inference",
                    "kind": "outputs.kind",
                    "model": "tool",
                },
                "edges": {"sources": "cites", "rel": "supports", "strength_path": "outputs.strength"},
            },
            {
                "when": {"action": "assert_claim"},
                "emit": "claim",
                "fields": {
                    "id": "outputs.claim_id",
                    "statement": "outputs.statement",
                    "section": "outputs.section",
                    "start": "outputs.start",
                    "end": "outputs.end",
                },
                "edges": {"sources": "cites", "rel": "supports", "strength_path": "outputs.strength"},
            },
        ],
    }


def demo_trace() -> list:
    """Six-record synthetic agent trace: four mappable, two not."""
    return [
        {
            "action": "plan",
            "tool": "planner",
            "at": "2026-02-14T08:58:00+00:00",
            "outputs": {"objective": "survey caching impact on tail latency"},
        },
        {
            "action": "retrieve",
            "tool": "search",
            "at": _RETRIEVED_AT,
            "outputs": {
                "doc_id": "t-s1",
                "locator": _SOURCES[0].locator,
                "excerpt": _SOURCES[0].excerpt,
            },
        },
        {
            "action": "retrieve",
            "tool": "search",
            "at": _RETRIEVED_AT,
            "outputs": {
                "doc_id": "t-s2",
                "locator": _SOURCES[1].locator,
                "excerpt": _SOURCES[1].excerpt,
            },
        },
        {
            "action": "execute_code",
            "tool": "sandbox",
            "at": "2026-02-14T09:01:00+00:00",
            "outputs": {"stdout": "p99 deltas computed"},
        },
        {
            "action": "synthesize",
            "tool": "demo-llm-1",
            "at": "2026-02-14T09:02:00+00:00",
            "cites": ["t-s1", "t-s2"],
            "outputs": {
                "step_id": "t-r1",
                "inference": "synthesized benchmark latency measurements into a deployment level finding",
                "kind": "synthesis",
                "strength": 0.9,
            },
        },
        {
            "action": "assert_claim",
            "tool": "demo-llm-1",
            "at": "2026-02-14T09:03:00+00:00",
            "cites": ["t-r1"],
            "outputs": {
                "claim_id": "t-c1",
                "statement": _CLAIMS[0].statement,
                "section": "findings",
                "start": 0,
                "end": 62,
                "strength": 0.9,
            },
        },
    ]


def graph_events(graph: ProvenanceGraph, at: str = _EVENT_AT):
    """(kind, payload, at) triples that rebuild `graph` through a store."""
    events = []
    for table, node_kind in ((graph.sources, "source"), (graph.reasoning, "reasoning"), (graph.claims, "claim")):
        for node_id in sorted(table):
            events.append(
                ("node_added", {"node_kind": node_kind, "node": node_to_document(table[node_id])}, at)
            )
    for edge in graph.edge_list():
        events.append(("edge_added", {"edge": edge_to_document(edge)}, at))
    return events


def seed_store(root, fsync: bool = True) -> Store:
    """Write both demo graphs (events, snapshots, ground truth) into a store."""
    store = Store(root, fsync=fsync)
    for graph_id, graph in (
        (BLACK_BOX_GRAPH_ID, black_box_demo()),
        (TRANSPARENT_GRAPH_ID, transparent_demo()),
    ):
        store.create_graph(graph_id, DEMO_QUERY, at=_EVENT_AT)
        for kind, payload, at in graph_events(graph):
            store.append(graph_id, kind, payload, at=at)
        store.write_snapshot(graph_id)
        store.write_ground_truth(graph_id, GROUND_TRUTH)
    return store


def write_demo_files(root) -> None:
    """Seed a store plus policy, mapping, and trace files for the CLI demo."""
    import json
    from pathlib import Path

    from . import canonical

    root = Path(root)
    seed_store(root)
    (root / "policy.json").write_bytes(canonical.dump_bytes(GatePolicy().to_document()))
    (root / "mapping.rules").write_bytes(canonical.dump_bytes(demo_mapping()))
    with (root / "trace.jsonl").open("w", encoding="utf-8") as fh:
        for record in demo_trace():
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def _main() -> int:
    import sys

    if len(sys.argv) != 2:
        print("usage: python -m claimtrace.fixtures DIR", file=sys.stderr)
        return 2
    write_demo_files(sys.argv[1])
    print(f"demo store written to {sys.argv[1]}")
    return 0


if __name__ == "__main__":
    raise SystemExit(_main())
