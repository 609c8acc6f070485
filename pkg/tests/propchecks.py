"""Quantified invariant checks shared by test_properties and acceptance.

Each check runs `cases` seeded iterations and returns the number of cases
it actually exercised, so the acceptance suite can tally the grand total.
"""

import random

import oracles
from generators import defect_corpus, propose_edge, random_graph

from claimtrace import canonical
from claimtrace.gate import GatePolicy, gate_stream
from claimtrace.graph import ProvenanceGraph, TypedEdge, validate_graph
from claimtrace.metrics import compute_ctran, compute_pcov, compute_psnd, compute_report
from claimtrace.scoring import LexicalScorer
from claimtrace.store import graph_to_document


def check_metric_ranges(seed: int, cases: int, scorer=None) -> int:
    """PCov/CTran/defined-PSnd in [0,1]; accepted graphs validate clean."""
    rng = random.Random(seed)
    scorer = scorer or LexicalScorer()
    for _ in range(cases):
        graph, ground_truth = random_graph(rng)
        assert validate_graph(graph).ok, "construction/validation agreement broke"
        pcov = compute_pcov(graph).value
        assert 0.0 <= pcov <= 1.0
        psnd = compute_psnd(graph, scorer, 0.5)
        if psnd.value is None:
            assert psnd.undefined_reason == "no_citation_pairs"
            assert not psnd.pairs
        else:
            assert 0.0 <= psnd.value <= 1.0
        ctran = compute_ctran(graph, ground_truth)
        assert 0.0 <= ctran.value <= 1.0
        assert ctran.vacuous == (not ground_truth)
    return cases


def check_oracle_equivalence(seed: int, cases: int, scorer=None) -> int:
    """Engine metrics == brute-force recomputation, exactly."""
    rng = random.Random(seed)
    scorer = scorer or LexicalScorer()
    for _ in range(cases):
        graph, ground_truth = random_graph(rng)
        assert compute_pcov(graph).value == oracles.pcov(graph)
        engine_psnd = compute_psnd(graph, scorer, 0.5).value
        assert engine_psnd == oracles.psnd(graph, scorer, 0.5)
        assert compute_ctran(graph, ground_truth).value == oracles.ctran(graph, ground_truth)
        report = compute_report(graph, scorer, ground_truth)
        oracle_mean, _ = oracles.proxy(graph)
        assert report.aeff_proxy == oracle_mean
        assert not oracles.has_lineage_cycle(graph)
    return cases


def check_path_oracle(seed: int, cases: int) -> int:
    """provenance_path == exhaustive backward BFS for every claim."""
    rng = random.Random(seed)
    total = 0
    for _ in range(cases):
        graph, _ = random_graph(rng)
        for claim_id in graph.claims:
            path = graph.provenance_path(claim_id)
            expected = oracles.backward_closure(graph, claim_id)
            assert set(path.nodes) == expected
            assert set(path.sources) == {
                n for n in expected if graph.kind(n) == "source"
            }
            assert set(path.reasoning) == {
                n for n in expected if graph.kind(n) == "reasoning"
            }
            assert path.complete == oracles.is_complete(graph, claim_id)
            assert list(path.sources) == sorted(path.sources)
        total += 1
    return total


def check_reachability_monotone(seed: int, cases: int) -> int:
    """Adding any edge never shrinks an existing claim's closure."""
    rng = random.Random(seed)
    for _ in range(cases):
        graph, _ = random_graph(rng)
        before = {c: set(graph.provenance_path(c).nodes) for c in graph.claims}
        edge = propose_edge(rng, graph)
        if edge is None:
            continue
        graph.add_edge(edge)
        for claim_id, closure in before.items():
            assert closure <= set(graph.provenance_path(claim_id).nodes)
    return cases


def check_pcov_monotone(seed: int, cases: int) -> int:
    """A new supports edge out of a source never decreases PCov."""
    rng = random.Random(seed)
    for _ in range(cases):
        graph, _ = random_graph(rng)
        targets = sorted(graph.reasoning) + sorted(graph.claims)
        if not targets:
            continue
        before = compute_pcov(graph).value
        src = rng.choice(sorted(graph.sources))
        dst = rng.choice(targets)
        if graph.has_edge(src, dst, "supports"):
            continue
        graph.add_edge(TypedEdge(src, dst, "supports", 0.9))
        assert compute_pcov(graph).value >= before
    return cases


def check_ctran_monotone(seed: int, cases: int) -> int:
    """Adding a contradicts edge matching ground truth never lowers CTran."""
    rng = random.Random(seed)
    for _ in range(cases):
        graph, ground_truth = random_graph(rng)
        if not ground_truth:
            continue
        before = compute_ctran(graph, ground_truth)
        matchable = [
            a
            for a in before.missed
            if graph.kind(a.node_a) != "claim"
            and graph.kind(a.node_b) != "source"
            and not graph.has_edge(a.node_a, a.node_b, "contradicts")
        ]
        if not matchable:
            continue
        pick = rng.choice(matchable)
        graph.add_edge(TypedEdge(pick.node_a, pick.node_b, "contradicts"))
        assert compute_ctran(graph, ground_truth).value >= before.value
    return cases


def check_gate_soundness(seed: int, n_claims: int, scorer=None):
    """No defective claim passes; no clean claim is blocked."""
    rng = random.Random(seed)
    scorer = scorer or LexicalScorer()
    graph, labels = defect_corpus(rng, n_claims)
    decisions = gate_stream(graph, sorted(labels), GatePolicy(), scorer)
    outcomes = {d.claim_id: d.outcome for d in decisions}
    for claim_id, defect in labels.items():
        if defect == "clean":
            assert outcomes[claim_id] == "pass", f"clean {claim_id} got {outcomes[claim_id]}"
        else:
            assert outcomes[claim_id] in ("block", "escalate"), (
                f"defective {claim_id} ({defect}) got {outcomes[claim_id]}"
            )
    return len(labels)


def check_report_determinism(seed: int, cases: int, scorer=None) -> int:
    """Reports and snapshots are byte-stable across runs and node orderings."""
    rng = random.Random(seed)
    scorer = scorer or LexicalScorer()
    for _ in range(cases):
        graph, ground_truth = random_graph(rng)
        doc_a = canonical.dumps(compute_report(graph, scorer, ground_truth).to_document())
        doc_b = canonical.dumps(compute_report(graph, scorer, ground_truth).to_document())
        assert doc_a == doc_b
        # rebuild with shuffled insertion order; snapshot must not notice
        nodes = (
            [graph.sources[k] for k in graph.sources]
            + [graph.reasoning[k] for k in graph.reasoning]
            + [graph.claims[k] for k in graph.claims]
        )
        edges = graph.edge_list()
        rng.shuffle(nodes)
        edges = list(edges)
        rng.shuffle(edges)
        rebuilt = ProvenanceGraph(graph.query)
        for node in nodes:
            rebuilt.add_node(node)
        # lineage edges may depend on each other only via endpoints, which
        # all exist already, so any edge order is insertable
        for edge in edges:
            rebuilt.add_edge(edge)
        assert canonical.dumps(graph_to_document(rebuilt, "g", 0)) == canonical.dumps(
            graph_to_document(graph, "g", 0)
        )
    return cases
