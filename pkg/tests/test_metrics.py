"""Metric semantics: frozen fixture values, boundaries, error contracts."""

import pytest

import oracles

from claimtrace.errors import (
    EmptyClaimSet,
    EmptySample,
    InvalidTiming,
    RemoteUnavailable,
    UnknownNodeInAnnotation,
)
from claimtrace.fixtures import GROUND_TRUTH
from claimtrace.graph import ClaimNode, Location, ProvenanceGraph, SourceNode, TypedEdge
from claimtrace.metrics import (
    AuditTiming,
    ContradictionAnnotation,
    compute_aeff_empirical,
    compute_aeff_proxy,
    compute_ctran,
    compute_pcov,
    compute_psnd,
    compute_report,
    detect_contradictions,
)

TS = "2026-03-01T00:00:00+00:00"


class TestPcov:
    def test_black_box_one_of_three(self, black_box):
        result = compute_pcov(black_box)
        assert result.value == pytest.approx(1 / 3)
        assert result.complete_by_claim == {"c1": True, "c2": False, "c3": False}

    def test_transparent_perfect(self, transparent):
        assert compute_pcov(transparent).value == 1.0

    def test_single_orphan_claim(self):
        graph = ProvenanceGraph()
        graph.add_node(ClaimNode("c1", "floats alone", Location("r", 0, 5)))
        assert compute_pcov(graph).value == 0.0

    def test_empty_claim_set_rejected(self):
        with pytest.raises(EmptyClaimSet):
            compute_pcov(ProvenanceGraph())


class TestPsnd:
    def test_black_box_annotated_strengths(self, black_box, scorer):
        result = compute_psnd(black_box, scorer, 0.5)
        assert result.value == 0.25
        nus = {(p.claim_id, p.source_id): p.score.value for p in result.pairs}
        assert nus == {
            ("c1", "s1"): 0.9,
            ("c1", "s2"): 0.4,
            ("c1", "s3"): 0.3,
            ("c1", "s4"): 0.2,
        }
        assert all(p.score.scorer_id == "edge-annotation" for p in result.pairs)

    def test_transparent_scored_through_reasoning(self, transparent, scorer):
        result = compute_psnd(transparent, scorer, 0.5)
        assert result.value == 1.0
        assert len(result.pairs) == 5
        assert all(p.score.scorer_id == "lexical-v1" for p in result.pairs)

    def test_boundary_is_strict(self, scorer):
        graph = ProvenanceGraph()
        graph.add_node(SourceNode("s1", "https://example.org", "cache latency", TS))
        graph.add_node(ClaimNode("c1", "cache latency", Location("r", 0, 5)))
        graph.add_edge(TypedEdge("s1", "c1", "supports", 0.5))
        result = compute_psnd(graph, scorer, 0.5)
        assert result.value == 0.0  # nu == tau is invalid under strict >

    def test_no_pairs_is_undefined_not_one(self, scorer):
        graph = ProvenanceGraph()
        graph.add_node(ClaimNode("c1", "orphan claim", Location("r", 0, 5)))
        result = compute_psnd(graph, scorer, 0.5)
        assert result.value is None
        assert result.undefined_reason == "no_citation_pairs"

    def test_scorer_failure_carries_pair_context(self, transparent):
        class Dying:
            scorer_id = "dying"

            def score(self, *_a, **_k):
                raise RemoteUnavailable("socket down")

        with pytest.raises(RemoteUnavailable, match=r"\(c1, s1\)"):
            compute_psnd(transparent, Dying(), 0.5)


class TestCtran:
    def test_black_box_hides_both_conflicts(self, black_box, ground_truth):
        result = compute_ctran(black_box, ground_truth)
        assert result.value == 0.0
        assert len(result.missed) == 2

    def test_transparent_carries_both(self, transparent, ground_truth):
        result = compute_ctran(transparent, ground_truth)
        assert result.value == 1.0
        assert not result.missed

    def test_empty_ground_truth_vacuous(self, transparent):
        result = compute_ctran(transparent, [])
        assert result.value == 1.0
        assert result.vacuous

    def test_unordered_matching(self):
        graph = ProvenanceGraph()
        graph.add_node(SourceNode("s1", "https://example.org", "text a", TS))
        graph.add_node(ClaimNode("c1", "text b", Location("r", 0, 5)))
        graph.add_edge(TypedEdge("s1", "c1", "contradicts"))
        # annotation endpoints given in the opposite order still match
        result = compute_ctran(graph, [ContradictionAnnotation("c1", "s1", "text")])
        assert result.value == 1.0

    def test_unknown_node_rejected(self, transparent):
        with pytest.raises(UnknownNodeInAnnotation):
            compute_ctran(transparent, [ContradictionAnnotation("s1", "ghost", "x")])

    def test_duplicate_annotations_counted_once(self, transparent, ground_truth):
        doubled = ground_truth + list(GROUND_TRUTH)
        assert compute_ctran(transparent, doubled).value == 1.0


class TestDetect:
    def test_antonym_pair_detected_with_entity(self, scorer):
        graph = ProvenanceGraph()
        graph.add_node(SourceNode("s1", "https://example.org/a", "x reduces cost", TS))
        graph.add_node(SourceNode("s2", "https://example.org/b", "x increases cost", TS))
        found = detect_contradictions(graph, scorer, 0.5)
        assert [(a.node_a, a.node_b, a.entity, a.origin) for a in found] == [
            ("s1", "s2", "x", "detected")
        ]

    def test_distinct_topics_empty(self, scorer):
        graph = ProvenanceGraph()
        graph.add_node(SourceNode("s1", "https://example.org/a", "alpha beta", TS))
        graph.add_node(SourceNode("s2", "https://example.org/b", "gamma delta", TS))
        assert detect_contradictions(graph, scorer, 0.5) == []

    def test_single_node_no_pairs(self, scorer):
        graph = ProvenanceGraph()
        graph.add_node(SourceNode("s1", "https://example.org/a", "alpha beta", TS))
        assert detect_contradictions(graph, scorer, 0.5) == []

    def test_transparent_fixture_finds_ground_truth_conflicts(self, transparent, scorer):
        pairs = {(a.node_a, a.node_b) for a in detect_contradictions(transparent, scorer, 0.5)}
        assert ("c1", "s3") in pairs
        assert ("c3", "s4") in pairs

    def test_deterministic(self, transparent, scorer):
        first = detect_contradictions(transparent, scorer, 0.5)
        second = detect_contradictions(transparent, scorer, 0.5)
        assert first == second


class TestAeff:
    def test_transparent_per_claim_proxies(self, transparent):
        result = compute_aeff_proxy(transparent)
        assert result.proxy_by_claim == {"c1": 3, "c2": 3, "c3": 2}
        assert result.value == pytest.approx(8 / 3)

    def test_black_box_proxies(self, black_box):
        result = compute_aeff_proxy(black_box)
        assert result.proxy_by_claim == {"c1": 4, "c2": 0, "c3": 0}
        oracle_mean, _ = oracles.proxy(black_box)
        assert result.value == oracle_mean

    def test_orphan_proxy_zero(self):
        graph = ProvenanceGraph()
        graph.add_node(ClaimNode("c1", "alone", Location("r", 0, 5)))
        assert compute_aeff_proxy(graph).proxy_by_claim == {"c1": 0}

    def test_empirical_mean_minutes(self):
        timings = [
            AuditTiming("c1", 120.0, "aud", "supported"),
            AuditTiming("c2", 240.0, "aud", "unsupported"),
        ]
        assert compute_aeff_empirical(timings) == 3.0

    def test_single_timing(self):
        assert compute_aeff_empirical([AuditTiming("c1", 60.0, "a", "supported")]) == 1.0

    def test_nonpositive_seconds_rejected_at_construction(self):
        with pytest.raises(InvalidTiming):
            AuditTiming("c1", 0.0, "a", "supported")
        with pytest.raises(InvalidTiming):
            AuditTiming("c1", -5.0, "a", "supported")

    def test_bad_verdict_rejected(self):
        with pytest.raises(InvalidTiming):
            AuditTiming("c1", 5.0, "a", "maybe")

    def test_empty_sample_rejected(self):
        with pytest.raises(EmptySample):
            compute_aeff_empirical([])


class TestReport:
    def test_black_box_triple(self, black_box, scorer, ground_truth):
        report = compute_report(black_box, scorer, ground_truth)
        assert report.pcov == pytest.approx(1 / 3)
        assert report.psnd == 0.25
        assert report.ctran == 0.0

    def test_transparent_triple(self, transparent, scorer, ground_truth):
        report = compute_report(transparent, scorer, ground_truth)
        assert (report.pcov, report.psnd, report.ctran) == (1.0, 1.0, 1.0)

    def test_empty_claims_rejected(self, scorer):
        with pytest.raises(EmptyClaimSet):
            compute_report(ProvenanceGraph(), scorer)

    def test_per_claim_diagnostics(self, black_box, scorer, ground_truth):
        report = compute_report(black_box, scorer, ground_truth)
        by_claim = {entry["claim_id"]: entry for entry in report.per_claim}
        assert by_claim["c1"]["complete"] and by_claim["c1"]["direct_only"]
        assert by_claim["c1"]["invalid_pairs"] == ["s2", "s3", "s4"]
        assert by_claim["c2"]["path_size"] == 1
        assert not by_claim["c2"]["complete"]

    def test_config_echo(self, transparent, scorer, ground_truth):
        report = compute_report(transparent, scorer, ground_truth)
        assert report.config_echo["backend"] == "lexical"
        assert report.config_echo["tau_entail"] == 0.5
        assert report.config_echo["psnd_scope"] == "stored_excerpts"

    def test_timings_fold_into_report(self, transparent, scorer, ground_truth):
        timings = [AuditTiming("c1", 90.0, "aud", "supported")]
        report = compute_report(transparent, scorer, ground_truth, timings=timings)
        assert report.aeff_empirical_minutes == 1.5
        assert report.aeff_sample_size == 1

    def test_document_flags_undefined_psnd(self, scorer):
        graph = ProvenanceGraph()
        graph.add_node(ClaimNode("c1", "orphan claim", Location("r", 0, 5)))
        doc = compute_report(graph, scorer).to_document()
        assert doc["psnd"] is None
        assert doc["psnd_undefined_reason"] == "no_citation_pairs"
        assert doc["ctran_vacuous"] is True
