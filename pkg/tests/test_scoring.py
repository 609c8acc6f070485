"""Lexical baseline rules, remote NLI client, caching, configuration."""

import json
import random
import string
import threading

import httpx
import pytest

from claimtrace.errors import (
    EmptyText,
    InvalidConfig,
    RemoteMalformedResponse,
    RemoteUnavailable,
)
from claimtrace.scoring import (
    STOPWORDS,
    LexicalScorer,
    RemoteNliScorer,
    ScorerConfig,
    content_tokens,
    make_scorer,
    tokenize,
)


class TestTokenization:
    def test_stopword_list_is_exactly_thirty(self):
        assert len(STOPWORDS) == 30

    def test_punctuation_becomes_spaces(self):
        assert tokenize("Long-form QA, really?") == ["long", "form", "qa", "really"]

    def test_content_tokens_drop_stopwords_keep_order(self):
        assert content_tokens("the cache is on the shard") == ["cache", "shard"]

    def test_negators_are_not_stopwords(self):
        assert "not" not in STOPWORDS and "no" not in STOPWORDS


class TestLexicalEntailment:
    def test_identity_scores_one(self, scorer):
        assert scorer.score("cache lowers latency", "cache lowers latency").value == 1.0

    def test_disjoint_scores_zero(self, scorer):
        assert scorer.score("alpha beta", "gamma delta").value == 0.0

    def test_hand_tokenized_coverage_example(self, scorer):
        # 4 claim content tokens, all covered by the longer excerpt
        score = scorer.score(
            "rag improves factual accuracy",
            "rag improves factual accuracy on long-form benchmarks",
        )
        assert score.value == 1.0
        assert "4/4" in score.rationale

    def test_partial_coverage_fraction(self, scorer):
        score = scorer.score("cache lowers tail latency", "cache latency study")
        assert score.value == 0.5  # cache, latency of 4 tokens

    def test_directionality(self, scorer):
        forward = scorer.score("cache wins", "cache wins on every benchmark suite")
        reverse = scorer.score(
            "cache wins", "cache wins on every benchmark suite", "claim_entails_source"
        )
        assert forward.value == 1.0
        assert reverse.value < 1.0

    def test_empty_text_rejected(self, scorer):
        with pytest.raises(EmptyText):
            scorer.score("", "text")
        with pytest.raises(EmptyText):
            scorer.score("text", "   ")

    def test_stopword_only_hypothesis(self, scorer):
        assert scorer.score("the of and", "the of and").value == 1.0
        assert scorer.score("the of and", "something else").value == 0.0

    def test_unknown_direction_rejected(self, scorer):
        with pytest.raises(InvalidConfig):
            scorer.score("a", "b", "sideways")

    def test_pure_function_across_instances(self):
        a = LexicalScorer().score("cache lowers tail latency", "cache latency study")
        b = LexicalScorer().score("cache lowers tail latency", "cache latency study")
        assert a == b

    def test_range_on_random_strings(self, scorer):
        rng = random.Random(17)
        alphabet = string.ascii_lowercase + "   .,-"
        for _ in range(300):
            a = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 40))) or "x"
            b = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 40))) or "y"
            if not a.strip() or not b.strip():
                continue
            assert 0.0 <= scorer.score(a, b).value <= 1.0
            assert 0.0 <= scorer.score_contradiction(a, b).value <= 1.0


class TestLexicalContradiction:
    def test_identical_texts_never_contradict(self, scorer):
        assert scorer.score_contradiction("rose then fell", "rose then fell").value == 0.0

    def test_antonym_pair_with_shared_context(self, scorer):
        score = scorer.score_contradiction("reduces cost", "increases cost")
        assert score.value >= scorer.config.tau_contra
        assert score.value == 1.0

    def test_token_disjoint_scores_zero(self, scorer):
        assert scorer.score_contradiction("alpha beta", "gamma delta").value == 0.0

    def test_symmetry(self, scorer):
        rng = random.Random(23)
        words = ["cache", "cost", "increases", "reduces", "not", "latency"]
        for _ in range(200):
            a = " ".join(rng.choices(words, k=rng.randint(1, 5)))
            b = " ".join(rng.choices(words, k=rng.randint(1, 5)))
            assert (
                scorer.score_contradiction(a, b).value
                == scorer.score_contradiction(b, a).value
            )

    def test_one_sided_negation(self, scorer):
        score = scorer.score_contradiction(
            "caching improves accuracy", "caching does not improve accuracy"
        )
        assert score.value == 1.0

    def test_opposed_terms_without_shared_context(self, scorer):
        assert scorer.score_contradiction("gains increased", "costs decreased").value == 0.0

    def test_health_check_echoes_thresholds(self, scorer):
        report = scorer.health_check()
        assert report["healthy"] is True
        assert report["tau_entail"] == 0.5


class TestScorerConfig:
    def test_tau_bounds_enforced(self):
        with pytest.raises(InvalidConfig):
            ScorerConfig(tau_entail=0.0)
        with pytest.raises(InvalidConfig):
            ScorerConfig(tau_contra=1.0)

    def test_remote_requires_endpoint(self):
        with pytest.raises(InvalidConfig):
            ScorerConfig(backend="remote_nli")

    def test_unknown_backend(self):
        with pytest.raises(InvalidConfig):
            ScorerConfig(backend="quantum")


def _remote(handler, retry_limit=2, timeout=1.0):
    config = ScorerConfig(
        backend="remote_nli",
        endpoint="http://scorer.test/nli",
        retry_limit=retry_limit,
        timeout=timeout,
    )
    return RemoteNliScorer(
        config, transport=httpx.MockTransport(handler), backoff_base=0.0, sleep=lambda _s: None
    )


class TestRemoteNli:
    def test_entailment_probability_is_the_score(self):
        def handler(request):
            body = json.loads(request.content)
            assert set(body) == {"premise", "hypothesis"}
            return httpx.Response(
                200, json={"entailment": 0.83, "neutral": 0.12, "contradiction": 0.05}
            )

        scorer = _remote(handler)
        score = scorer.score("claim text", "excerpt text")
        assert score.value == 0.83
        assert score.scorer_id == "remote-nli"

    def test_direction_swaps_premise_and_hypothesis(self):
        seen = []

        def handler(request):
            seen.append(json.loads(request.content))
            return httpx.Response(
                200, json={"entailment": 0.5, "neutral": 0.5, "contradiction": 0.0}
            )

        scorer = _remote(handler)
        scorer.score("the claim", "the excerpt", "source_entails_claim")
        scorer.score("the claim", "the excerpt", "claim_entails_source")
        assert seen[0] == {"premise": "the excerpt", "hypothesis": "the claim"}
        assert seen[1] == {"premise": "the claim", "hypothesis": "the excerpt"}

    def test_contradiction_is_bidirectional_max(self):
        def handler(request):
            body = json.loads(request.content)
            value = 0.9 if body["premise"] == "a text" else 0.2
            return httpx.Response(
                200,
                json={"entailment": 0.0, "neutral": 1.0 - value, "contradiction": value},
            )

        scorer = _remote(handler)
        assert scorer.score_contradiction("a text", "b text").value == 0.9
        assert scorer.score_contradiction("b text", "a text").value == 0.9

    def test_retries_then_unavailable(self):
        calls = []

        def handler(request):
            calls.append(1)
            raise httpx.ConnectError("refused")

        scorer = _remote(handler, retry_limit=2)
        with pytest.raises(RemoteUnavailable):
            scorer.score("a", "b")
        assert len(calls) == 3  # initial try plus two retries

    def test_recovers_after_transient_failure(self):
        calls = []

        def handler(request):
            calls.append(1)
            if len(calls) < 3:
                return httpx.Response(500, text="boom")
            return httpx.Response(
                200, json={"entailment": 0.7, "neutral": 0.2, "contradiction": 0.1}
            )

        scorer = _remote(handler, retry_limit=2)
        assert scorer.score("a", "b").value == 0.7

    def test_malformed_probabilities_rejected(self):
        def handler(request):
            return httpx.Response(
                200, json={"entailment": 0.9, "neutral": 0.9, "contradiction": 0.9}
            )

        with pytest.raises(RemoteMalformedResponse):
            _remote(handler).score("a", "b")

    def test_missing_key_rejected(self):
        def handler(request):
            return httpx.Response(200, json={"entailment": 1.0})

        with pytest.raises(RemoteMalformedResponse):
            _remote(handler).score("a", "b")

    def test_non_json_rejected(self):
        def handler(request):
            return httpx.Response(200, text="<html>")

        with pytest.raises(RemoteMalformedResponse):
            _remote(handler).score("a", "b")

    def test_health_check_reports_cause(self):
        def handler(request):
            raise httpx.ConnectError("refused")

        report = _remote(handler).health_check()
        assert report["healthy"] is False
        assert "refused" in report["cause"]

    def test_health_check_echoes_config(self):
        def handler(request):
            return httpx.Response(
                200, json={"entailment": 1.0, "neutral": 0.0, "contradiction": 0.0}
            )

        report = _remote(handler).health_check()
        assert report["healthy"] is True
        assert report["tau_entail"] == 0.5
        assert report["endpoint"] == "http://scorer.test/nli"

    def test_cache_avoids_second_request(self):
        calls = []

        def handler(request):
            calls.append(1)
            return httpx.Response(
                200, json={"entailment": 0.6, "neutral": 0.3, "contradiction": 0.1}
            )

        scorer = _remote(handler)
        first = scorer.score("a claim", "an excerpt")
        second = scorer.score("a claim", "an excerpt")
        assert first == second
        assert len(calls) == 1

    def test_concurrent_scoring_is_safe(self):
        def handler(request):
            return httpx.Response(
                200, json={"entailment": 0.6, "neutral": 0.3, "contradiction": 0.1}
            )

        scorer = _remote(handler)
        results = []

        def work(i):
            results.append(scorer.score(f"claim {i}", "shared excerpt").value)

        threads = [threading.Thread(target=work, args=(i,)) for i in range(16)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert results == [0.6] * 16


def test_make_scorer_dispatch():
    assert isinstance(make_scorer(ScorerConfig()), LexicalScorer)
    remote = make_scorer(
        ScorerConfig(backend="remote_nli", endpoint="http://scorer.test/nli")
    )
    assert isinstance(remote, RemoteNliScorer)
