"""Command line surface: validate | metrics | gate | ingest | serve.

Exit codes: 0 success, 1 validation violations found, 2 unreadable or
malformed input (files, policies, corrupt logs), 3 metric domain errors
(e.g. a graph with no claims).
"""

import argparse
import json
import sys
from pathlib import Path

from . import canonical
from .errors import (
    ClaimtraceError,
    CorruptLog,
    EmptyClaimSet,
    EmptySample,
    InvalidConfig,
    SchemaViolation,
    UnknownGraph,
)
from .gate import GatePolicy, gate_stream
from .graph import validate_graph
from .ingest import ingest_trace, load_mapping_file, load_trace_file
from .metrics import compute_report
from .scoring import ScorerConfig, make_scorer
from .store import (
    Store,
    load_ground_truth_file,
    load_snapshot_file,
    read_events_file,
    replay_events,
)

_INPUT_ERRORS = (CorruptLog, SchemaViolation, UnknownGraph, InvalidConfig, OSError, ValueError)


def _build_scorer(args):
    backend = "remote_nli" if args.scorer == "remote" else "lexical"
    return make_scorer(
        ScorerConfig(
            backend=backend,
            tau_entail=args.tau_entail,
            tau_contra=args.tau_contra,
            endpoint=args.endpoint,
        )
    )


def _load_graph_input(path: Path):
    """Load a .events log or snapshot document.

    Returns (graph_id, graph, violations, claim_order) where claim_order
    is submission order for logs and document order for snapshots.
    """
    if path.suffix == ".events":
        header, events = read_events_file(path)
        graph, violations = replay_events(
            header.get("graph_id", ""), header.get("query", ""), events, collect=True
        )
        claim_order = [
            e.payload["node"]["id"]
            for e in events
            if e.kind == "node_added" and e.payload.get("node_kind") == "claim"
        ]
        return header.get("graph_id", ""), graph, violations, claim_order
    graph_id, graph, violations = load_snapshot_file(path)
    return graph_id, graph, violations, graph.claim_ids_by_location()


def _cmd_validate(args) -> int:
    try:
        _, graph, violations, _ = _load_graph_input(Path(args.path))
    except _INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    result = validate_graph(graph)
    all_violations = violations + result.violations
    for violation in all_violations:
        print(violation.line())
    for warning in result.warnings:
        print(f"warning: {warning.line()}")
    return 1 if all_violations else 0


def _cmd_metrics(args) -> int:
    try:
        graph_id, graph, violations, _ = _load_graph_input(Path(args.path))
        ground_truth = (
            load_ground_truth_file(args.ground_truth) if args.ground_truth else []
        )
        scorer = _build_scorer(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if violations:
        for violation in violations:
            print(f"error: {violation.line()}", file=sys.stderr)
        return 2
    try:
        report = compute_report(
            graph, scorer, ground_truth=ground_truth, graph_id=args.graph_id or graph_id
        )
    except (EmptyClaimSet, EmptySample) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 3
    except ClaimtraceError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(canonical.dumps(report.to_document()))
    return 0


def _cmd_gate(args) -> int:
    try:
        policy_doc = json.loads(Path(args.policy).read_text("utf-8"))
        policy = GatePolicy.from_document(policy_doc)
    except (OSError, ValueError, InvalidConfig) as exc:
        print(f"error: malformed policy: {exc}", file=sys.stderr)
        return 2
    try:
        _, graph, violations, claim_order = _load_graph_input(Path(args.path))
        scorer = _build_scorer(args)
    except _INPUT_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    if violations:
        for violation in violations:
            print(f"error: {violation.line()}", file=sys.stderr)
        return 2
    decisions = gate_stream(graph, claim_order, policy, scorer)
    counts = {"pass": 0, "block": 0, "escalate": 0}
    for decision in decisions:
        counts[decision.outcome] += 1
        failing = [r for r in decision.reasons if not r.satisfied]
        detail = failing[0].detail if failing else "all rules satisfied"
        print(f"{decision.claim_id}\t{decision.outcome}\t{detail}")
    print(f"summary pass={counts['pass']} block={counts['block']} escalate={counts['escalate']}")
    return 0


def _cmd_ingest(args) -> int:
    try:
        rules = load_mapping_file(args.mapping)
        records = load_trace_file(args.path)
    except (SchemaViolation, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    graph, report, events = ingest_trace(records, rules)
    if args.store:
        try:
            store = Store(args.store)
            for kind, payload in events:
                store.append(args.graph_id, kind, payload, query=args.query)
        except ClaimtraceError as exc:
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return 2
    doc = report.to_document()
    doc["graph_id"] = args.graph_id
    doc["nodes_total"] = graph.node_count()
    doc["edges_total"] = graph.edge_count()
    print(canonical.dumps(doc))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import build_app

    try:
        host, _, port_text = args.listen.rpartition(":")
        port = int(port_text)
        store = Store(args.store)
        scorer = _build_scorer(args)
        policy = GatePolicy()
        if args.policy:
            policy = GatePolicy.from_document(json.loads(Path(args.policy).read_text("utf-8")))
        if args.ui and not Path(args.ui).is_dir():
            raise InvalidConfig(f"--ui directory not found: {args.ui}")
    except (OSError, ValueError, InvalidConfig) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    app = build_app(store, scorer, policy, static_dir=args.ui)
    uvicorn.run(app, host=host or "127.0.0.1", port=port, log_level="warning")
    return 0


def _add_scorer_args(parser):
    parser.add_argument("--scorer", choices=("lexical", "remote"), default="lexical")
    parser.add_argument("--endpoint", default=None, help="remote scorer URL")
    parser.add_argument("--tau-entail", type=float, default=0.5, dest="tau_entail")
    parser.add_argument("--tau-contra", type=float, default=0.5, dest="tau_contra")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="claimtrace",
        description="Audit research-agent outputs at claim granularity.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a snapshot or event log for violations")
    p_validate.add_argument("path", help="path to .events log or snapshot document")
    p_validate.set_defaults(func=_cmd_validate)

    p_metrics = sub.add_parser("metrics", help="print the canonical metric report")
    p_metrics.add_argument("path", help="path to .events log or snapshot document")
    p_metrics.add_argument("--ground-truth", default=None, dest="ground_truth")
    p_metrics.add_argument("--graph-id", default=None, dest="graph_id")
    _add_scorer_args(p_metrics)
    p_metrics.set_defaults(func=_cmd_metrics)

    p_gate = sub.add_parser("gate", help="stream gate decisions for every claim")
    p_gate.add_argument("path", help="path to .events log or snapshot document")
    p_gate.add_argument("--policy", required=True)
    _add_scorer_args(p_gate)
    p_gate.set_defaults(func=_cmd_gate)

    p_ingest = sub.add_parser("ingest", help="convert an agent trace into a graph")
    p_ingest.add_argument("path", help="path to JSON-lines trace")
    p_ingest.add_argument("--mapping", required=True)
    p_ingest.add_argument("--store", default=None, help="store directory to append events into")
    p_ingest.add_argument("--graph-id", default="ingested", dest="graph_id")
    p_ingest.add_argument("--query", default="")
    p_ingest.set_defaults(func=_cmd_ingest)

    p_serve = sub.add_parser("serve", help="run the local HTTP service")
    p_serve.add_argument("--listen", default="127.0.0.1:8420")
    p_serve.add_argument("--store", required=True)
    p_serve.add_argument("--policy", default=None)
    p_serve.add_argument("--ui", default=None, help="workbench asset directory to serve at /")
    _add_scorer_args(p_serve)
    p_serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
