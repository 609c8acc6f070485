"""Entailment and contradiction scoring backends.

Two interchangeable backends produce the semantic-validity score in
[0, 1]: a deterministic lexical baseline (token coverage; keeps the whole
test suite offline) and a client for a remote NLI service returning
entailment/neutral/contradiction probabilities.
"""

import hashlib
import threading
import time
from dataclasses import dataclass

import httpx

from .errors import (
    EmptyText,
    InvalidConfig,
    RemoteMalformedResponse,
    RemoteUnavailable,
)

DIRECTIONS = ("source_entails_claim", "claim_entails_source")

# Exactly 30 entries; the list is part of the lexical backend's contract,
# so scores stay reproducible across releases. Negators are deliberately
# not stopwords.
STOPWORDS = frozenset(
    """
    a an the and or but if then of in on at to for with by from as
    is are was were be been it its this that these those
    """.split()
)

NEGATORS = frozenset({"not", "no", "never", "cannot", "nor", "without"})

# Small fixed lexicon of opposed word forms for the contradiction baseline.
ANTONYM_PAIRS = frozenset(
    frozenset(pair)
    for pair in [
        ("increase", "decrease"),
        ("increases", "decreases"),
        ("increased", "decreased"),
        ("increase", "reduce"),
        ("increases", "reduces"),
        ("increased", "reduced"),
        ("raise", "lower"),
        ("raises", "lowers"),
        ("raised", "lowered"),
        ("higher", "lower"),
        ("more", "less"),
        ("improve", "worsen"),
        ("improves", "worsens"),
        ("improved", "worsened"),
        ("gain", "loss"),
        ("gains", "losses"),
        ("rise", "fall"),
        ("rose", "fell"),
        ("faster", "slower"),
        ("better", "worse"),
        ("persist", "vanish"),
        ("persists", "vanishes"),
        ("persisted", "vanished"),
        ("confirm", "refute"),
        ("confirms", "refutes"),
        ("confirmed", "refuted"),
        ("supports", "refutes"),
        ("positive", "negative"),
        ("above", "below"),
        ("succeed", "fail"),
        ("succeeded", "failed"),
    ]
)

_OVERLAP_FLOOR = 0.6


def tokenize(text: str):
    """Lowercase, strip punctuation to spaces, split on whitespace."""
    chars = [c if c.isalnum() else " " for c in text.lower()]
    return "".join(chars).split()


def content_tokens(text: str):
    """Tokens with the stopword list removed, original order kept."""
    return [t for t in tokenize(text) if t not in STOPWORDS]


@dataclass(frozen=True)
class EntailmentScore:
    """One scored text pair; value is the semantic validity in [0, 1]."""

    value: float
    direction: str
    scorer_id: str
    rationale: str | None = None


@dataclass(frozen=True)
class ScorerConfig:
    backend: str = "lexical"
    tau_entail: float = 0.5
    tau_contra: float = 0.5
    endpoint: str | None = None
    timeout: float = 5.0
    retry_limit: int = 2
    max_in_flight: int = 4

    def __post_init__(self):
        if self.backend not in ("lexical", "remote_nli"):
            raise InvalidConfig(f"unknown scorer backend: {self.backend!r}")
        for name in ("tau_entail", "tau_contra"):
            value = getattr(self, name)
            if not 0.0 < value < 1.0:
                raise InvalidConfig(f"{name} must lie strictly inside (0, 1), got {value}")
        if self.backend == "remote_nli" and not self.endpoint:
            raise InvalidConfig("remote_nli backend requires an endpoint URL")
        if self.retry_limit < 0:
            raise InvalidConfig("retry_limit must be >= 0")


def _require_text(name: str, text: str):
    if not isinstance(text, str) or not text.strip():
        raise EmptyText(f"{name} must be non-empty")


class _ScoreCache:
    """Keyed score memo; pure optimization, results never depend on it."""

    def __init__(self, max_entries: int = 65536):
        self._data: dict = {}
        self._max = max_entries
        self._lock = threading.Lock()

    @staticmethod
    def key(kind: str, a: str, b: str):
        ha = hashlib.sha256(a.encode("utf-8")).digest()
        hb = hashlib.sha256(b.encode("utf-8")).digest()
        return (kind, ha, hb)

    def get(self, key):
        with self._lock:
            return self._data.get(key)

    def put(self, key, value):
        with self._lock:
            if len(self._data) >= self._max:
                self._data.clear()
            self._data[key] = value


class LexicalScorer:
    """Deterministic token-coverage baseline.

    Entailment: fraction of the hypothesis' content tokens covered by the
    premise. Contradiction: 1.0 when the texts exhibit an antonym pair or
    one-sided negation and, with those opposed terms set aside, still share
    >= 60% of the smaller content-token set (overlap coefficient); else 0.0.
    """

    scorer_id = "lexical-v1"

    def __init__(self, config: ScorerConfig | None = None):
        self.config = config or ScorerConfig(backend="lexical")
        self._cache = _ScoreCache()

    def score(self, claim_text: str, source_excerpt: str, direction: str = "source_entails_claim") -> EntailmentScore:
        _require_text("claim_text", claim_text)
        _require_text("source_excerpt", source_excerpt)
        if direction not in DIRECTIONS:
            raise InvalidConfig(f"unknown direction: {direction!r}")
        key = self._cache.key(direction, claim_text, source_excerpt)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if direction == "source_entails_claim":
            hypothesis, premise = claim_text, source_excerpt
        else:
            hypothesis, premise = source_excerpt, claim_text
        hyp = set(content_tokens(hypothesis))
        prem = set(content_tokens(premise))
        if not hyp:
            # Stopword-only hypothesis: only verbatim identity counts.
            value = 1.0 if tokenize(hypothesis) == tokenize(premise) else 0.0
            rationale = "hypothesis has no content tokens"
        else:
            covered = len(hyp & prem)
            value = covered / len(hyp)
            rationale = f"{covered}/{len(hyp)} hypothesis content tokens covered"
        result = EntailmentScore(value, direction, self.scorer_id, rationale)
        self._cache.put(key, result)
        return result

    def score_contradiction(self, text_a: str, text_b: str) -> EntailmentScore:
        _require_text("text_a", text_a)
        _require_text("text_b", text_b)
        # Normalize the pair so the score is symmetric by construction.
        first, second = sorted((text_a, text_b))
        key = self._cache.key("contradiction", first, second)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        value, rationale = self._contradiction(first, second)
        result = EntailmentScore(value, "source_entails_claim", self.scorer_id, rationale)
        self._cache.put(key, result)
        return result

    @staticmethod
    def _contradiction(first: str, second: str):
        tokens_a = tokenize(first)
        tokens_b = tokenize(second)
        if tokens_a == tokens_b:
            return 0.0, "texts are identical"
        set_a = {t for t in tokens_a if t not in STOPWORDS}
        set_b = {t for t in tokens_b if t not in STOPWORDS}
        if not set_a or not set_b:
            return 0.0, "no content tokens to compare"
        paired = set()
        for word_a in sorted(set_a):
            for word_b in sorted(set_b):
                if word_a != word_b and frozenset((word_a, word_b)) in ANTONYM_PAIRS:
                    paired.update((word_a, word_b))
        negation = bool(set_a & NEGATORS) != bool(set_b & NEGATORS)
        if not paired and not negation:
            return 0.0, "no opposed terms"
        # Opposed terms are what differs; the remaining tokens must agree
        # enough to show the texts talk about the same thing.
        rem_a = set_a - paired - NEGATORS
        rem_b = set_b - paired - NEGATORS
        if not rem_a or not rem_b:
            overlap = 1.0 if not rem_a and not rem_b else 0.0
        else:
            overlap = len(rem_a & rem_b) / min(len(rem_a), len(rem_b))
        cause = f"antonym pair among {sorted(paired)}" if paired else "one-sided negation"
        if overlap < _OVERLAP_FLOOR:
            return 0.0, f"{cause} but shared-context overlap {overlap:.2f} below {_OVERLAP_FLOOR}"
        return 1.0, f"shared-context overlap {overlap:.2f} with {cause}"

    def health_check(self) -> dict:
        return {
            "backend": "lexical",
            "scorer_id": self.scorer_id,
            "healthy": True,
            "tau_entail": self.config.tau_entail,
            "tau_contra": self.config.tau_contra,
        }


class RemoteNliScorer:
    """Client for an external NLI service.

    Wire format: POST {"premise": ..., "hypothesis": ...} to the endpoint;
    response {"entailment": p1, "neutral": p2, "contradiction": p3} with
    the probabilities summing to 1 within 1e-6. Entailment probability is
    the score; contradiction checks run bidirectionally and take the max.
    """

    scorer_id = "remote-nli"

    def __init__(self, config: ScorerConfig, transport: httpx.BaseTransport | None = None,
                 backoff_base: float = 0.1, sleep=time.sleep):
        if config.backend != "remote_nli":
            raise InvalidConfig("RemoteNliScorer requires backend='remote_nli'")
        self.config = config
        self._client = httpx.Client(timeout=config.timeout, transport=transport)
        self._slots = threading.Semaphore(config.max_in_flight)
        self._backoff_base = backoff_base
        self._sleep = sleep
        self._cache = _ScoreCache()

    def close(self):
        self._client.close()

    def _post(self, premise: str, hypothesis: str) -> dict:
        body = {"premise": premise, "hypothesis": hypothesis}
        last_error = None
        for attempt in range(self.config.retry_limit + 1):
            if attempt:
                self._sleep(self._backoff_base * (2 ** (attempt - 1)))
            try:
                with self._slots:
                    response = self._client.post(self.config.endpoint, json=body)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = RemoteUnavailable(f"server returned {response.status_code}")
                continue
            if response.status_code != 200:
                raise RemoteMalformedResponse(
                    f"unexpected status {response.status_code} from scorer endpoint"
                )
            return self._parse(response)
        raise RemoteUnavailable(
            f"scorer endpoint unreachable after {self.config.retry_limit + 1} attempts: {last_error}"
        )

    @staticmethod
    def _parse(response: httpx.Response) -> dict:
        try:
            doc = response.json()
        except ValueError as exc:
            raise RemoteMalformedResponse(f"response is not JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise RemoteMalformedResponse("response body must be a JSON object")
        probs = {}
        for label in ("entailment", "neutral", "contradiction"):
            value = doc.get(label)
            if not isinstance(value, (int, float)) or not 0.0 <= float(value) <= 1.0:
                raise RemoteMalformedResponse(f"missing or out-of-range probability: {label}")
            probs[label] = float(value)
        if abs(sum(probs.values()) - 1.0) > 1e-6:
            raise RemoteMalformedResponse(
                f"probabilities sum to {sum(probs.values())}, expected 1 within 1e-6"
            )
        return probs

    def score(self, claim_text: str, source_excerpt: str, direction: str = "source_entails_claim") -> EntailmentScore:
        _require_text("claim_text", claim_text)
        _require_text("source_excerpt", source_excerpt)
        if direction not in DIRECTIONS:
            raise InvalidConfig(f"unknown direction: {direction!r}")
        key = self._cache.key(direction, claim_text, source_excerpt)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        if direction == "source_entails_claim":
            premise, hypothesis = source_excerpt, claim_text
        else:
            premise, hypothesis = claim_text, source_excerpt
        probs = self._post(premise, hypothesis)
        result = EntailmentScore(
            probs["entailment"], direction, self.scorer_id,
            f"entailment={probs['entailment']:.4f} neutral={probs['neutral']:.4f} "
            f"contradiction={probs['contradiction']:.4f}",
        )
        self._cache.put(key, result)
        return result

    def score_contradiction(self, text_a: str, text_b: str) -> EntailmentScore:
        _require_text("text_a", text_a)
        _require_text("text_b", text_b)
        first, second = sorted((text_a, text_b))
        key = self._cache.key("contradiction", first, second)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        forward = self._post(first, second)["contradiction"]
        backward = self._post(second, first)["contradiction"]
        value = max(forward, backward)
        result = EntailmentScore(
            value, "source_entails_claim", self.scorer_id,
            f"bidirectional contradiction max({forward:.4f}, {backward:.4f})",
        )
        self._cache.put(key, result)
        return result

    def health_check(self) -> dict:
        report = {
            "backend": "remote_nli",
            "scorer_id": self.scorer_id,
            "endpoint": self.config.endpoint,
            "tau_entail": self.config.tau_entail,
            "tau_contra": self.config.tau_contra,
        }
        try:
            self._post("service probe", "service probe")
        except (RemoteUnavailable, RemoteMalformedResponse) as exc:
            report["healthy"] = False
            report["cause"] = str(exc)
        else:
            report["healthy"] = True
        return report


def make_scorer(config: ScorerConfig, transport: httpx.BaseTransport | None = None):
    """Build the backend named by `config`."""
    if config.backend == "lexical":
        return LexicalScorer(config)
    return RemoteNliScorer(config, transport=transport)
