#!/usr/bin/env python3
"""Record canonical API responses for the workbench's snapshot tests.

Drives the real service in-process with a fixed clock so the recorded
bodies are byte-stable. Usage: python3 scripts/record-fixtures.py OUTDIR
"""

import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from claimtrace.fixtures import TRANSPARENT_GRAPH_ID, seed_store
from claimtrace.gate import GatePolicy
from claimtrace.scoring import LexicalScorer
from claimtrace.service import build_app


class FixedClock:
    def __init__(self):
        self.now = 1_760_000_000.0

    def __call__(self):
        return self.now


def main() -> int:
    out = Path(sys.argv[1] if len(sys.argv) > 1 else "tests/fixtures")
    out.mkdir(parents=True, exist_ok=True)
    clock = FixedClock()
    with tempfile.TemporaryDirectory() as tmp:
        store = seed_store(tmp, fsync=False)
        app = build_app(store, LexicalScorer(), GatePolicy(), clock=clock, token="")
        client = TestClient(app)

        def record(name, response):
            assert response.status_code < 300, f"{name}: {response.status_code} {response.text}"
            (out / name).write_bytes(response.content)

        record("graphs.json", client.get("/graphs"))
        record("claims.json", client.get(f"/graphs/{TRANSPARENT_GRAPH_ID}/claims"))
        record(
            "path_c1.json",
            client.get("/claims/c1/path", params={"graph_id": TRANSPARENT_GRAPH_ID}),
        )
        record("metrics_before.json", client.get(f"/graphs/{TRANSPARENT_GRAPH_ID}/metrics"))
        record(
            "contradictions.json",
            client.get(f"/graphs/{TRANSPARENT_GRAPH_ID}/contradictions"),
        )
        record("gate_c1.json", client.post(f"/graphs/{TRANSPARENT_GRAPH_ID}/gate/c1"))

        session = client.post(
            "/sessions", json={"graph_id": TRANSPARENT_GRAPH_ID, "auditor_id": "aud-rec"}
        )
        record("session_created.json", session)
        sid = session.json()["session_id"]
        durations = {"c1": 30.0, "c2": 60.0, "c3": 90.0}
        for claim_id, verdict in (("c1", "supported"), ("c2", "unsupported"), ("c3", "cannot_tell")):
            client.post(f"/sessions/{sid}/claims/{claim_id}/open")
            clock.now += durations[claim_id]
            response = client.post(
                f"/sessions/{sid}/claims/{claim_id}/close", json={"verdict": verdict}
            )
            record(f"close_{claim_id}.json", response)
        record("metrics_after.json", client.get(f"/graphs/{TRANSPARENT_GRAPH_ID}/metrics"))
        record("session_final.json", client.get(f"/sessions/{sid}"))
    print(f"fixtures recorded to {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
