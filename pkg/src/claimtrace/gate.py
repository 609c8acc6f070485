"""Claim gating: pass / block / escalate decisions during synthesis.

Rules run in the order completeness, citation soundness, unresolved
contradictions, effort bound; the first failing rule fixes the outcome.
Every evaluation writes one validates (pass) or challenges (block or
escalate) edge from the gate's agent identity to the claim; those edges
never affect path reachability. Blocked claims stay in the graph so the
audit trail shows what was stopped and why.
"""

from dataclasses import dataclass

from .errors import ClaimtraceError, InvalidConfig, NotAClaim, ScorerError, UnknownClaim
from .graph import ProvenanceGraph, TypedEdge
from .metrics import EDGE_ANNOTATION_SCORER, CitationPair, ContradictionAnnotation
from .scoring import EntailmentScore

GATE_AGENT_ID = "agent:gate"

_ACTIONS = frozenset({"block", "escalate"})
_POLICY_FIELDS = (
    "tau_entail",
    "min_completeness",
    "max_aeff_proxy",
    "unresolved_contradiction_action",
    "undefined_psnd_action",
)


@dataclass(frozen=True)
class GatePolicy:
    """Thresholds and failure actions for claim evaluation."""

    tau_entail: float = 0.5
    min_completeness: bool = True
    max_aeff_proxy: int = 10
    unresolved_contradiction_action: str = "escalate"
    undefined_psnd_action: str = "block"

    def __post_init__(self):
        if not isinstance(self.tau_entail, (int, float)) or not 0.0 < self.tau_entail < 1.0:
            raise InvalidConfig(f"tau_entail must lie strictly inside (0, 1), got {self.tau_entail}")
        if not isinstance(self.min_completeness, bool):
            raise InvalidConfig("min_completeness must be a boolean")
        if not isinstance(self.max_aeff_proxy, int) or self.max_aeff_proxy < 1:
            raise InvalidConfig(f"max_aeff_proxy must be an integer >= 1, got {self.max_aeff_proxy}")
        for name in ("unresolved_contradiction_action", "undefined_psnd_action"):
            if getattr(self, name) not in _ACTIONS:
                raise InvalidConfig(f"{name} must be one of {sorted(_ACTIONS)}")

    @classmethod
    def from_document(cls, doc: dict) -> "GatePolicy":
        if not isinstance(doc, dict):
            raise InvalidConfig("policy document must be a JSON object")
        unknown = set(doc) - set(_POLICY_FIELDS)
        if unknown:
            raise InvalidConfig(f"unknown policy fields: {sorted(unknown)}")
        return cls(**doc)

    def to_document(self) -> dict:
        return {
            "tau_entail": float(self.tau_entail),
            "min_completeness": self.min_completeness,
            "max_aeff_proxy": self.max_aeff_proxy,
            "unresolved_contradiction_action": self.unresolved_contradiction_action,
            "undefined_psnd_action": self.undefined_psnd_action,
        }


@dataclass(frozen=True)
class GateReason:
    """One rule's verdict inside a decision."""

    rule: str
    satisfied: bool
    detail: str

    def to_document(self) -> dict:
        return {"rule": self.rule, "satisfied": self.satisfied, "detail": self.detail}


@dataclass
class GateDecision:
    claim_id: str
    outcome: str
    reasons: list
    emitted_edges: list

    def to_document(self) -> dict:
        return {
            "claim_id": self.claim_id,
            "outcome": self.outcome,
            "reasons": [r.to_document() for r in self.reasons],
            "emitted_edges": [
                {"from": e.src, "to": e.dst, "rel": e.rel} for e in self.emitted_edges
            ],
        }


def _pairs_for_claim(graph: ProvenanceGraph, path, scorer, tau_entail: float):
    statement = graph.claims[path.claim_id].statement
    pairs = []
    for source_id in path.sources:
        direct = graph.get_edge(source_id, path.claim_id, "supports")
        if direct is not None:
            score = EntailmentScore(
                direct.strength,
                "source_entails_claim",
                EDGE_ANNOTATION_SCORER,
                "stored supports-edge strength",
            )
        else:
            score = scorer.score(
                statement, graph.sources[source_id].excerpt, "source_entails_claim"
            )
        pairs.append(CitationPair(path.claim_id, source_id, score, score.value > tau_entail))
    return pairs


def evaluate_claim(
    graph: ProvenanceGraph, claim_id: str, policy: GatePolicy, scorer
) -> GateDecision:
    """Run the rule chain on one claim and write the gate edge.

    A scorer failure escalates with its cause; it never passes silently.
    """
    path = graph.provenance_path(claim_id)
    reasons = []
    outcome = None

    if policy.min_completeness:
        if path.complete:
            reasons.append(GateReason("complete_path", True, "provenance path is complete"))
        else:
            reasons.append(
                GateReason(
                    "complete_path",
                    False,
                    "incomplete_path: no traceable route from sources to this claim",
                )
            )
            outcome = "block"

    if outcome is None:
        try:
            pairs = _pairs_for_claim(graph, path, scorer, policy.tau_entail)
        except ScorerError as exc:
            reasons.append(GateReason("sound_citations", False, f"scorer_failure: {exc}"))
            outcome = "escalate"
        else:
            if not pairs:
                reasons.append(
                    GateReason(
                        "sound_citations",
                        False,
                        "undefined_psnd: claim has no citation pairs",
                    )
                )
                outcome = policy.undefined_psnd_action
            else:
                weak = [p for p in pairs if not p.valid]
                if weak:
                    listing = ", ".join(
                        f"{p.source_id} (nu={p.score.value:.6f})" for p in weak
                    )
                    reasons.append(
                        GateReason(
                            "sound_citations",
                            False,
                            f"unsound_pairs below tau_entail={policy.tau_entail}: {listing}",
                        )
                    )
                    outcome = "block"
                else:
                    reasons.append(
                        GateReason(
                            "sound_citations",
                            True,
                            f"all {len(pairs)} citation pairs exceed tau_entail",
                        )
                    )

    if outcome is None:
        unresolved = [
            e
            for e in path.annotations
            if e.rel == "contradicts" and not graph.is_resolved(e.src, e.dst)
        ]
        if unresolved:
            listing = ", ".join(e.label() for e in unresolved)
            reasons.append(
                GateReason(
                    "resolved_contradictions",
                    False,
                    f"unresolved_contradiction touching path: {listing}",
                )
            )
            outcome = policy.unresolved_contradiction_action
        else:
            reasons.append(
                GateReason(
                    "resolved_contradictions", True, "no unresolved contradictions touch the path"
                )
            )

    if outcome is None:
        if path.proxy <= policy.max_aeff_proxy:
            reasons.append(
                GateReason(
                    "effort_bound",
                    True,
                    f"audit-effort proxy {path.proxy} within bound {policy.max_aeff_proxy}",
                )
            )
        else:
            reasons.append(
                GateReason(
                    "effort_bound",
                    False,
                    f"effort_exceeded: proxy {path.proxy} above bound {policy.max_aeff_proxy}",
                )
            )
            outcome = "block"

    if outcome is None:
        outcome = "pass"

    rel = "validates" if outcome == "pass" else "challenges"
    edge = TypedEdge(GATE_AGENT_ID, claim_id, rel)
    graph.replace_agent_edges(GATE_AGENT_ID, claim_id, edge)
    return GateDecision(claim_id, outcome, reasons, [edge])


def resolve_contradiction(
    graph: ProvenanceGraph, annotation: ContradictionAnnotation, verdict: str, auditor_id: str
):
    """Record an auditor resolution; later evaluations treat it as settled.

    Raises UnknownAnnotation for endpoints missing from the graph and
    DuplicateResolution when the annotation was already resolved.
    """
    return graph.record_resolution(
        annotation.node_a, annotation.node_b, annotation.entity, verdict, auditor_id
    )


def gate_stream(graph: ProvenanceGraph, claim_ids, policy: GatePolicy, scorer):
    """Evaluate submitted claims in order; one failure never halts the rest."""
    decisions = []
    for claim_id in claim_ids:
        try:
            decisions.append(evaluate_claim(graph, claim_id, policy, scorer))
        except (UnknownClaim, NotAClaim, ClaimtraceError) as exc:
            decisions.append(
                GateDecision(
                    claim_id,
                    "escalate",
                    [GateReason("claim_exists", False, f"{type(exc).__name__}: {exc}")],
                    [],
                )
            )
    return decisions


def released_claims(decisions) -> list:
    """Claims cleared for downstream use: pass outcomes only."""
    return [d.claim_id for d in decisions if d.outcome == "pass"]
