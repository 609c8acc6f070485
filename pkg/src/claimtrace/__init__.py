"""claimtrace: claim-level provenance graphs and audit tooling.

Store typed claim-evidence graphs, compute the four audit metrics (PCov,
PSnd, CTran, AEff), and gate claims through protocolized validation with
an append-only, replayable audit log.
"""

from .errors import ClaimtraceError
from .gate import GatePolicy, evaluate_claim, gate_stream, resolve_contradiction
from .graph import (
    ClaimNode,
    Location,
    ProvenanceGraph,
    ProvenancePath,
    ReasoningNode,
    SourceNode,
    TypedEdge,
    validate_graph,
)
from .metrics import (
    AarReport,
    AuditTiming,
    CitationPair,
    ContradictionAnnotation,
    compute_aeff_empirical,
    compute_aeff_proxy,
    compute_ctran,
    compute_pcov,
    compute_psnd,
    compute_report,
    detect_contradictions,
)
from .scoring import EntailmentScore, LexicalScorer, RemoteNliScorer, ScorerConfig, make_scorer

__version__ = "0.1.0"

__all__ = [
    "AarReport",
    "AuditTiming",
    "CitationPair",
    "ClaimNode",
    "ClaimtraceError",
    "ContradictionAnnotation",
    "EntailmentScore",
    "GatePolicy",
    "LexicalScorer",
    "Location",
    "ProvenanceGraph",
    "ProvenancePath",
    "ReasoningNode",
    "RemoteNliScorer",
    "ScorerConfig",
    "SourceNode",
    "TypedEdge",
    "compute_aeff_empirical",
    "compute_aeff_proxy",
    "compute_ctran",
    "compute_pcov",
    "compute_psnd",
    "compute_report",
    "detect_contradictions",
    "evaluate_claim",
    "gate_stream",
    "make_scorer",
    "resolve_contradiction",
    "validate_graph",
    "__version__",
]
