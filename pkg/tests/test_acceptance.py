"""Acceptance criteria, one test per criterion at its stated tolerance.

Each test prints a single PASS line on success; pytest reports failures.
Run with `pytest tests/test_acceptance.py -s` to see the lines directly.
"""

import contextlib
import io
import json
import random
import time
from pathlib import Path

import oracles
import propchecks
from generators import random_graph

from claimtrace import canonical
from claimtrace.cli import main
from claimtrace.fixtures import TRANSPARENT_GRAPH_ID, graph_events, seed_store, transparent_demo
from claimtrace.metrics import compute_ctran, compute_pcov, compute_psnd, compute_report
from claimtrace.scoring import LexicalScorer
from claimtrace.store import Store

GOLDEN = Path(__file__).parent / "golden"
ORACLE_SEED = 2026
ORACLE_GRAPHS = 1000


def _cli_metrics(events_name: str, seconds_budget: float):
    start = time.perf_counter()
    out = io.StringIO()
    with contextlib.redirect_stdout(out):
        code = main(
            [
                "metrics",
                str(GOLDEN / f"{events_name}.events"),
                "--ground-truth",
                str(GOLDEN / f"{events_name}.groundtruth"),
            ]
        )
    elapsed = time.perf_counter() - start
    assert code == 0
    assert elapsed < seconds_budget, f"metrics took {elapsed:.3f}s"
    return json.loads(out.getvalue())


def test_fixture_reproduction():
    """Frozen fixtures reproduce the published metric triples via the CLI."""
    black = _cli_metrics("blackbox-demo", 1.0)
    assert abs(black["pcov"] - 0.333) <= 0.001
    assert black["psnd"] == 0.25
    assert black["ctran"] == 0.0
    transparent = _cli_metrics("transparent-demo", 1.0)
    assert transparent["pcov"] == 1.0
    assert transparent["psnd"] == 1.0
    assert transparent["ctran"] == 1.0
    print(
        "\nACCEPTANCE PASS: fixture reproduction "
        f"(black box {black['pcov']}/{black['psnd']}/{black['ctran']}, "
        f"transparent {transparent['pcov']}/{transparent['psnd']}/{transparent['ctran']})"
    )


def test_oracle_equivalence_1000_graphs():
    """Engine metrics equal brute-force recomputation on 1,000 graphs."""
    rng = random.Random(ORACLE_SEED)
    scorer = LexicalScorer()
    start = time.perf_counter()
    for _ in range(ORACLE_GRAPHS):
        graph, ground_truth = random_graph(rng)
        assert compute_pcov(graph).value == oracles.pcov(graph)
        assert compute_psnd(graph, scorer, 0.5).value == oracles.psnd(graph, scorer, 0.5)
        assert compute_ctran(graph, ground_truth).value == oracles.ctran(graph, ground_truth)
        report = compute_report(graph, scorer, ground_truth)
        oracle_mean, _ = oracles.proxy(graph)
        assert report.aeff_proxy == oracle_mean
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0, f"oracle equivalence took {elapsed:.1f}s"
    print(
        f"\nACCEPTANCE PASS: oracle equivalence on {ORACLE_GRAPHS} graphs "
        f"in {elapsed:.1f}s (< 60s)"
    )


def test_path_oracle_same_graphs():
    """provenance_path equals exhaustive backward BFS, node-set exact."""
    rng = random.Random(ORACLE_SEED)
    claims_checked = 0
    for _ in range(ORACLE_GRAPHS):
        graph, _ = random_graph(rng)
        for claim_id in graph.claims:
            path = graph.provenance_path(claim_id)
            expected = oracles.backward_closure(graph, claim_id)
            assert set(path.nodes) == expected
            assert path.complete == oracles.is_complete(graph, claim_id)
            claims_checked += 1
    print(
        f"\nACCEPTANCE PASS: path oracle exact on {claims_checked} claims "
        f"across {ORACLE_GRAPHS} graphs"
    )


def test_gate_soundness_500_claims():
    """All defective claims stopped, no clean claim blocked, under 10s."""
    start = time.perf_counter()
    n = propchecks.check_gate_soundness(seed=9, n_claims=500)
    elapsed = time.perf_counter() - start
    assert n == 500
    assert elapsed < 10.0, f"gate soundness took {elapsed:.1f}s"
    print(f"\nACCEPTANCE PASS: gate soundness on {n} claims in {elapsed:.1f}s (< 10s)")


def test_replay_determinism(tmp_path):
    """Replay -> snapshot is byte-identical across runs and event orders."""
    first = seed_store(tmp_path / "one", fsync=False)
    second = seed_store(tmp_path / "two", fsync=False)
    for graph_id in ("blackbox-demo", "transparent-demo"):
        run_a = first.snapshot_bytes(graph_id)
        run_b = second.snapshot_bytes(graph_id)
        golden = (GOLDEN / f"{graph_id}.snapshot").read_bytes()
        assert run_a == run_b == golden

    # Same logical graph, different insertion order, same snapshot bytes.
    shuffled = Store(tmp_path / "three", fsync=False)
    shuffled.create_graph(TRANSPARENT_GRAPH_ID, transparent_demo().query,
                          at="2026-02-14T09:05:00+00:00")
    events = graph_events(transparent_demo())
    nodes = [e for e in events if e[0] == "node_added"]
    edges = [e for e in events if e[0] == "edge_added"]
    rng = random.Random(5)
    rng.shuffle(nodes)
    rng.shuffle(edges)
    for kind, payload, at in nodes + edges:
        shuffled.append(TRANSPARENT_GRAPH_ID, kind, payload, at=at)
    assert shuffled.snapshot_bytes(TRANSPARENT_GRAPH_ID) == (
        GOLDEN / "transparent-demo.snapshot"
    ).read_bytes()
    print("\nACCEPTANCE PASS: replay determinism across runs and insertion orders")


def test_property_budget_10k_cases():
    """Range and monotonicity invariants over >= 10,000 generated cases."""
    tally = 0
    tally += propchecks.check_metric_ranges(seed=201, cases=3500)
    tally += propchecks.check_pcov_monotone(seed=202, cases=2500)
    tally += propchecks.check_ctran_monotone(seed=203, cases=2500)
    tally += propchecks.check_reachability_monotone(seed=204, cases=1000)
    tally += propchecks.check_report_determinism(seed=205, cases=500)
    assert tally >= 10000
    print(f"\nACCEPTANCE PASS: metric range/monotonicity properties over {tally} cases")
