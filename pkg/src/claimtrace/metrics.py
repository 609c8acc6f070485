"""The four audit metrics over a provenance graph.

PCov: fraction of claims with complete provenance paths. PSnd: fraction of
citation pairs whose entailment score beats tau_entail (strictly). CTran:
fraction of known evidence conflicts carried as explicit contradicts
edges. AEff: mean human verification minutes, structurally proxied by
sources-plus-reasoning counts on each path.

All computations are read-only over a graph snapshot and evaluation-order
independent; reports render canonically for byte-exact comparison.
"""

import hashlib
from dataclasses import dataclass, field

from .errors import (
    EmptyClaimSet,
    EmptySample,
    InvalidTiming,
    ScorerError,
    UnknownNodeInAnnotation,
)
from .graph import ProvenanceGraph
from .scoring import EntailmentScore, content_tokens

VERDICTS = frozenset({"supported", "unsupported", "cannot_tell"})

# Scorer id recorded on pairs whose score came from a stored edge strength
# rather than a scoring backend.
EDGE_ANNOTATION_SCORER = "edge-annotation"


@dataclass(frozen=True)
class CitationPair:
    """One (claim, source) citation with its entailment score."""

    claim_id: str
    source_id: str
    score: EntailmentScore
    valid: bool


@dataclass(frozen=True)
class ContradictionAnnotation:
    """An evidence conflict between two nodes about one entity.

    Endpoints are normalized to lexicographic order; `origin` says whether
    the conflict is asserted ground truth or detected by a scorer.
    """

    node_a: str
    node_b: str
    entity: str
    origin: str = "ground_truth"

    def __post_init__(self):
        if self.node_a == self.node_b:
            raise UnknownNodeInAnnotation("annotation endpoints must differ")
        if self.node_b < self.node_a:
            a, b = self.node_b, self.node_a
            object.__setattr__(self, "node_a", a)
            object.__setattr__(self, "node_b", b)

    @property
    def annotation_id(self) -> str:
        digest = hashlib.sha256(
            "\x1f".join((self.node_a, self.node_b, self.entity)).encode("utf-8")
        ).hexdigest()
        return f"k-{digest[:12]}"

    def to_document(self) -> dict:
        return {
            "id": self.annotation_id,
            "node_a": self.node_a,
            "node_b": self.node_b,
            "entity": self.entity,
            "origin": self.origin,
        }


@dataclass(frozen=True)
class AuditTiming:
    """One human verification measurement for a claim."""

    claim_id: str
    seconds: float
    auditor_id: str
    verdict: str

    def __post_init__(self):
        if not isinstance(self.seconds, (int, float)) or self.seconds <= 0:
            raise InvalidTiming(f"timing for {self.claim_id}: seconds must be > 0")
        if self.verdict not in VERDICTS:
            raise InvalidTiming(
                f"timing for {self.claim_id}: verdict {self.verdict!r} not in {sorted(VERDICTS)}"
            )


@dataclass
class PcovResult:
    value: float
    complete_by_claim: dict


@dataclass
class PsndResult:
    value: float | None
    pairs: list
    undefined_reason: str | None = None


@dataclass
class CtranResult:
    value: float
    matched: list
    missed: list
    vacuous: bool = False


@dataclass
class AeffProxyResult:
    value: float
    proxy_by_claim: dict


def _claim_paths(graph: ProvenanceGraph):
    return {claim_id: graph.provenance_path(claim_id) for claim_id in sorted(graph.claims)}


def compute_pcov(graph: ProvenanceGraph) -> PcovResult:
    """Fraction of claims whose provenance path is complete."""
    if not graph.claims:
        raise EmptyClaimSet("PCov needs at least one claim")
    complete = {cid: path.complete for cid, path in _claim_paths(graph).items()}
    return PcovResult(sum(complete.values()) / len(complete), complete)


def citation_pairs(graph: ProvenanceGraph, scorer, tau_entail: float):
    """Every (claim, source) pair where the claim cites the source.

    A claim cites every source on its provenance path. When the citation
    is a direct supports edge its stored strength is the score; otherwise
    the scorer rates the claim statement against the stored excerpt.
    """
    pairs = []
    for claim_id, path in _claim_paths(graph).items():
        statement = graph.claims[claim_id].statement
        for source_id in path.sources:
            direct = graph.get_edge(source_id, claim_id, "supports")
            if direct is not None:
                score = EntailmentScore(
                    direct.strength,
                    "source_entails_claim",
                    EDGE_ANNOTATION_SCORER,
                    "stored supports-edge strength",
                )
            else:
                try:
                    score = scorer.score(
                        statement, graph.sources[source_id].excerpt, "source_entails_claim"
                    )
                except ScorerError as exc:
                    raise type(exc)(f"scoring pair ({claim_id}, {source_id}): {exc}") from exc
            pairs.append(CitationPair(claim_id, source_id, score, score.value > tau_entail))
    return pairs


def compute_psnd(graph: ProvenanceGraph, scorer, tau_entail: float) -> PsndResult:
    """Mean of the validity indicator over all citation pairs.

    An empty pair set yields an explicitly undefined PSnd (None with a
    reason), never a silent 1.0.
    """
    pairs = citation_pairs(graph, scorer, tau_entail)
    if not pairs:
        return PsndResult(None, [], "no_citation_pairs")
    return PsndResult(sum(p.valid for p in pairs) / len(pairs), pairs)


def compute_ctran(graph: ProvenanceGraph, ground_truth) -> CtranResult:
    """Fraction of known conflicts carried as explicit contradicts edges.

    Matching is unordered on the endpoints. An empty ground-truth set is
    vacuously transparent (1.0) and flagged as such.
    """
    unique = {}
    for annotation in ground_truth:
        for node_id in (annotation.node_a, annotation.node_b):
            if not graph.has_node(node_id):
                raise UnknownNodeInAnnotation(
                    f"annotation ({annotation.node_a}, {annotation.node_b}) references "
                    f"unknown node {node_id}"
                )
        unique.setdefault((annotation.node_a, annotation.node_b, annotation.entity), annotation)
    if not unique:
        return CtranResult(1.0, [], [], vacuous=True)
    matched, missed = [], []
    for key in sorted(unique):
        annotation = unique[key]
        a, b = annotation.node_a, annotation.node_b
        if graph.has_edge(a, b, "contradicts") or graph.has_edge(b, a, "contradicts"):
            matched.append(annotation)
        else:
            missed.append(annotation)
    return CtranResult(len(matched) / len(unique), matched, missed)


def detect_contradictions(graph: ProvenanceGraph, scorer, tau_contra: float):
    """Scan all node-text pairs for conflicts the scorer can see.

    Pairs must share at least one content token to be considered; the
    annotation's entity is the earliest shared token in the first text
    (ids ordered lexicographically), so output is deterministic.
    """
    texts = {}
    for source in graph.sources.values():
        texts[source.id] = source.excerpt
    for step in graph.reasoning.values():
        texts[step.id] = step.inference
    for claim in graph.claims.values():
        texts[claim.id] = claim.statement
    ids = sorted(texts)
    token_lists = {node_id: content_tokens(texts[node_id]) for node_id in ids}
    token_sets = {node_id: set(tokens) for node_id, tokens in token_lists.items()}
    found = []
    for i, id_a in enumerate(ids):
        for id_b in ids[i + 1 :]:
            shared = token_sets[id_a] & token_sets[id_b]
            if not shared:
                continue
            try:
                score = scorer.score_contradiction(texts[id_a], texts[id_b])
            except ScorerError as exc:
                raise type(exc)(f"contradiction scan ({id_a}, {id_b}): {exc}") from exc
            if score.value >= tau_contra:
                entity = next(t for t in token_lists[id_a] if t in shared)
                found.append(ContradictionAnnotation(id_a, id_b, entity, origin="detected"))
    return found


def compute_aeff_proxy(graph: ProvenanceGraph) -> AeffProxyResult:
    """Structural audit-effort proxy: mean path sources+reasoning count."""
    if not graph.claims:
        raise EmptyClaimSet("audit-effort proxy needs at least one claim")
    proxies = {cid: path.proxy for cid, path in _claim_paths(graph).items()}
    return AeffProxyResult(sum(proxies.values()) / len(proxies), proxies)


def compute_aeff_empirical(timings) -> float:
    """Mean verification time in minutes over the timed sample."""
    timings = list(timings)
    if not timings:
        raise EmptySample("empirical audit effort needs at least one timing")
    return sum(t.seconds for t in timings) / len(timings) / 60.0


@dataclass
class AarReport:
    """All four metrics plus per-claim diagnostics for one graph."""

    pcov: float
    psnd: float | None
    psnd_undefined_reason: str | None
    ctran: float
    ctran_vacuous: bool
    aeff_proxy: float
    aeff_empirical_minutes: float | None
    aeff_sample_size: int
    pairs: list
    matched_contradictions: list
    missed_contradictions: list
    per_claim: list
    config_echo: dict
    query: str = ""
    graph_id: str | None = None
    node_counts: dict = field(default_factory=dict)

    def to_document(self) -> dict:
        return {
            "format": "claimtrace-report/1",
            "graph_id": self.graph_id,
            "query": self.query,
            "node_counts": self.node_counts,
            "pcov": float(self.pcov),
            "psnd": None if self.psnd is None else float(self.psnd),
            "psnd_undefined_reason": self.psnd_undefined_reason,
            "ctran": float(self.ctran),
            "ctran_vacuous": self.ctran_vacuous,
            "aeff_proxy": float(self.aeff_proxy),
            "aeff_empirical_minutes": (
                None
                if self.aeff_empirical_minutes is None
                else float(self.aeff_empirical_minutes)
            ),
            "aeff_sample_size": self.aeff_sample_size,
            "citation_pairs": [
                {
                    "claim_id": p.claim_id,
                    "source_id": p.source_id,
                    "nu": float(p.score.value),
                    "direction": p.score.direction,
                    "scorer_id": p.score.scorer_id,
                    "valid": p.valid,
                }
                for p in self.pairs
            ],
            "contradictions": {
                "ground_truth_total": len(self.matched_contradictions)
                + len(self.missed_contradictions),
                "matched": [a.to_document() for a in self.matched_contradictions],
                "missed": [a.to_document() for a in self.missed_contradictions],
            },
            "per_claim": self.per_claim,
            "config_echo": self.config_echo,
        }


def compute_report(
    graph: ProvenanceGraph,
    scorer,
    ground_truth=(),
    timings=None,
    graph_id: str | None = None,
    tau_entail: float | None = None,
    tau_contra: float | None = None,
) -> AarReport:
    """Aggregate all four metrics with per-claim diagnostics.

    Thresholds default to the scorer's configuration. Undefined PSnd and
    vacuous CTran are flagged explicitly, never smoothed over.
    """
    if not graph.claims:
        raise EmptyClaimSet("metric report needs at least one claim")
    tau_entail = scorer.config.tau_entail if tau_entail is None else tau_entail
    tau_contra = scorer.config.tau_contra if tau_contra is None else tau_contra

    paths = _claim_paths(graph)
    pcov = compute_pcov(graph)
    psnd = compute_psnd(graph, scorer, tau_entail)
    ctran = compute_ctran(graph, ground_truth)
    proxy = compute_aeff_proxy(graph)

    timings = list(timings) if timings else []
    empirical = compute_aeff_empirical(timings) if timings else None

    invalid_by_claim = {}
    for pair in psnd.pairs:
        if not pair.valid:
            invalid_by_claim.setdefault(pair.claim_id, []).append(pair.source_id)
    per_claim = [
        {
            "claim_id": claim_id,
            "complete": path.complete,
            "path_size": len(path.nodes),
            "proxy": path.proxy,
            "invalid_pairs": sorted(invalid_by_claim.get(claim_id, [])),
            "direct_only": path.complete and not path.reasoning,
        }
        for claim_id, path in paths.items()
    ]

    return AarReport(
        pcov=pcov.value,
        psnd=psnd.value,
        psnd_undefined_reason=psnd.undefined_reason,
        ctran=ctran.value,
        ctran_vacuous=ctran.vacuous,
        aeff_proxy=proxy.value,
        aeff_empirical_minutes=empirical,
        aeff_sample_size=len(timings),
        pairs=psnd.pairs,
        matched_contradictions=ctran.matched,
        missed_contradictions=ctran.missed,
        per_claim=per_claim,
        config_echo={
            "backend": scorer.config.backend,
            "scorer_id": scorer.scorer_id,
            "tau_entail": float(tau_entail),
            "tau_contra": float(tau_contra),
            "psnd_scope": "stored_excerpts",
        },
        query=graph.query,
        graph_id=graph_id,
        node_counts={
            "sources": len(graph.sources),
            "reasoning": len(graph.reasoning),
            "claims": len(graph.claims),
            "edges": graph.edge_count(),
        },
    )
