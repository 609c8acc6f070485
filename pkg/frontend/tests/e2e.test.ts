/**
 * End-to-end acceptance against the real backend: spawns the claimtrace
 * service, runs a full three-verdict audit session through the same flow
 * code the browser uses, and checks the recorded evidence.
 *
 * Needs python3 with the claimtrace package installed; skips otherwise.
 */

import { spawn, spawnSync } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, test } from "vitest";
import { WorkbenchApi } from "../src/api.js";
import { rawValue } from "../src/raw.js";
import { SessionFlow } from "../src/session.js";
import { renderMetricsPanel, renderSessionSummary } from "../src/views.js";

const PORT = 8461;
const BASE = `http://127.0.0.1:${PORT}`;

function backendAvailable(): boolean {
  const probe = spawnSync("python3", ["-c", "import claimtrace"], { timeout: 20_000 });
  return probe.status === 0;
}

const haveBackend = backendAvailable();

describe.skipIf(!haveBackend)("live backend session", () => {
  let storeDir: string;
  let server: ReturnType<typeof spawn>;

  beforeAll(async () => {
    storeDir = mkdtempSync(join(tmpdir(), "claimtrace-e2e-"));
    const seeded = spawnSync("python3", ["-m", "claimtrace.fixtures", storeDir], {
      timeout: 60_000,
    });
    expect(seeded.status).toBe(0);
    server = spawn(
      "python3",
      ["-m", "claimtrace.cli", "serve", "--store", storeDir, "--listen", `127.0.0.1:${PORT}`],
      { stdio: "ignore" },
    );
    for (let i = 0; ; i += 1) {
      try {
        const health = await fetch(`${BASE}/health`);
        if (health.ok) break;
      } catch {
        // not up yet
      }
      if (i > 120) throw new Error("backend never became healthy");
      await new Promise((resolve) => setTimeout(resolve, 250));
    }
  }, 90_000);

  afterAll(() => {
    server?.kill();
    if (storeDir) rmSync(storeDir, { recursive: true, force: true });
  });

  test(
    "three verdicts produce three timing events and a byte-exact AEff display",
    async () => {
      const api = new WorkbenchApi(BASE);
      const flow = await SessionFlow.start(api, "transparent-demo", "aud-e2e");
      expect(flow.queue).toEqual(["c1", "c2", "c3"]);

      const serverSeconds: number[] = [];
      for (const claimId of ["c1", "c2", "c3"] as const) {
        const view = await flow.loadClaimView(claimId);
        expect(view.path.doc.complete).toBe(true);
        await flow.openClaim(claimId);
        await new Promise((resolve) => setTimeout(resolve, 350));
        const closed = await flow.submitVerdict(claimId, "supported");
        serverSeconds.push(closed.doc.closed_claim!.seconds);
      }
      expect(flow.finished()).toBe(true);

      // three timing_recorded events landed in the durable log
      const log = readFileSync(join(storeDir, "transparent-demo.events"), "utf8");
      const timingEvents = log
        .split("\n")
        .filter((line) => line.includes('"kind":"timing_recorded"'));
      expect(timingEvents.length).toBe(3);

      // the metrics endpoint folds them into the empirical sample
      const metrics = await flow.refreshMetrics();
      expect(metrics.doc.aeff_sample_size).toBe(3);

      // displayed empirical AEff equals the mean of server-recorded
      // durations to 1 s resolution
      const summaryHtml = renderSessionSummary({ doc: flow.doc, raw: flow.raw });
      const displayedMinutes = Number(rawValue(flow.raw, ["summary", "empirical_aeff_minutes"]));
      const meanSeconds = serverSeconds.reduce((a, b) => a + b, 0) / serverSeconds.length;
      expect(Math.abs(displayedMinutes * 60 - meanSeconds)).toBeLessThanOrEqual(1.0);
      expect(summaryHtml).toContain(rawValue(flow.raw, ["summary", "empirical_aeff_minutes"]));

      // every number displayed matches the API response byte-for-byte
      const metricsHtml = renderMetricsPanel(metrics);
      for (const field of ["pcov", "psnd", "ctran", "aeff_proxy", "aeff_empirical_minutes"]) {
        expect(metricsHtml).toContain(rawValue(metrics.raw, [field]));
      }
      for (const token of metricsHtml.match(/\d+\.\d+/g) ?? []) {
        expect(metrics.raw).toContain(token);
      }
    },
    60_000,
  );

  test("duplicate resolution is rejected with 409 by the live server", async () => {
    const api = new WorkbenchApi(BASE);
    const contradictions = await api.contradictions("transparent-demo");
    const target = contradictions.doc.annotations.find((a) => a.origin === "ground_truth")!;
    await api.resolve(target.id, "transparent-demo", "both_reported", "aud-e2e");
    await expect(
      api.resolve(target.id, "transparent-demo", "both_reported", "aud-e2e"),
    ).rejects.toThrow(/duplicate_resolution/);
  });
});

describe.skipIf(haveBackend)("live backend session (skipped)", () => {
  test("backend unavailable", () => {
    expect(haveBackend).toBe(false);
  });
});
