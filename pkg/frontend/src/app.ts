/**
 * Workbench shell: pick a graph, start a timed session, step claim by
 * claim with keyboard-first verdict entry, resolve conflicts, watch the
 * metrics panel refresh after every verdict.
 *
 * Keys: s = supported, u = unsupported, c = cannot tell, e = evaluate
 * gate. Buttons mirror every key.
 */

import { ApiError, WorkbenchApi } from "./api.js";
import { SessionFlow } from "./session.js";
import type { ApiResult, GateDecisionDoc, Verdict } from "./types.js";
import {
  renderClaimView,
  renderGraphList,
  renderMetricsPanel,
  renderQueue,
  renderSessionSummary,
} from "./views.js";

const $ = (selector: string): HTMLElement => {
  const el = document.querySelector(selector);
  if (!el) throw new Error(`missing element: ${selector}`);
  return el as HTMLElement;
};

let api = new WorkbenchApi();
let flow: SessionFlow | null = null;
let gateResult: ApiResult<GateDecisionDoc> | undefined;
const closedLocal = new Set<string>();

function setStatus(text: string, isError = false): void {
  const el = $("#status");
  el.textContent = text;
  el.className = isError ? "error" : "";
}

function surface(err: unknown): void {
  if (err instanceof ApiError) {
    setStatus(`${err.code}: ${err.detail}`, true);
  } else {
    setStatus(String(err), true);
  }
}

function apiBase(): string {
  // empty = same origin (assets served by `claimtrace serve --ui`);
  // standalone deployments point this at the service's --listen address
  return ($("#api-base") as HTMLInputElement).value.trim().replace(/\/+$/, "");
}

async function loadGraphs(): Promise<void> {
  const graphs = await api.graphs();
  $("#graphs").innerHTML = renderGraphList(graphs.doc.graphs);
}

async function refreshMetrics(): Promise<void> {
  if (!flow) return;
  try {
    $("#metrics").innerHTML = renderMetricsPanel(await flow.refreshMetrics());
  } catch (err) {
    surface(err);
  }
}

async function showCurrent(): Promise<void> {
  if (!flow) return;
  $("#summary").innerHTML = renderSessionSummary({ doc: flow.doc, raw: flow.raw });
  const current = flow.currentClaim();
  $("#queue-panel").innerHTML = renderQueue(flow.queue, current, closedLocal);
  if (current === null) {
    $("#claim").innerHTML =
      `<p class="done">Queue complete. Session ${flow.sessionId} recorded ` +
      `${flow.doc.summary.completed} verdicts.</p>`;
    return;
  }
  try {
    const view = await flow.loadClaimView(current);
    if (!flow.isOpen(current)) {
      await flow.openClaim(current);
    }
    $("#claim").innerHTML = renderClaimView(view, gateResult);
  } catch (err) {
    surface(err);
  }
}

async function startSession(): Promise<void> {
  const graphId = ($("#graph-id") as HTMLInputElement).value.trim();
  const auditorId = ($("#auditor-id") as HTMLInputElement).value.trim();
  const token = ($("#token") as HTMLInputElement).value.trim();
  if (!graphId || !auditorId) {
    setStatus("pick a graph and enter an auditor id", true);
    return;
  }
  api = new WorkbenchApi(apiBase(), token);
  try {
    flow = await SessionFlow.start(api, graphId, auditorId);
    closedLocal.clear();
    gateResult = undefined;
    setStatus(`session ${flow.sessionId} started: ${flow.queue.length} claims queued`);
    await refreshMetrics();
    await showCurrent();
  } catch (err) {
    flow = null;
    surface(err);
  }
}

async function submit(verdict: Verdict): Promise<void> {
  if (!flow) return;
  const current = flow.currentClaim();
  if (current === null) return;
  try {
    await flow.submitVerdict(current, verdict);
    closedLocal.add(current);
    gateResult = undefined;
    setStatus(`${current}: ${verdict}`);
    await refreshMetrics();
    await showCurrent();
  } catch (err) {
    surface(err);
  }
}

async function evaluateGate(): Promise<void> {
  if (!flow) return;
  const current = flow.currentClaim();
  if (current === null) return;
  try {
    gateResult = await api.evaluate(flow.graphId, current);
    await flow.refreshClaims();
    await showCurrent();
  } catch (err) {
    surface(err);
  }
}

async function resolveConflict(annotationId: string, verdict: string): Promise<void> {
  if (!flow) return;
  try {
    await api.resolve(
      annotationId,
      flow.graphId,
      verdict as "upheld_a" | "upheld_b" | "both_reported",
      flow.doc.auditor_id,
    );
    setStatus(`conflict ${annotationId} resolved: ${verdict}`);
    gateResult = undefined;
    await showCurrent();
  } catch (err) {
    surface(err);
  }
}

function wire(): void {
  $("#start").addEventListener("click", () => void startSession());
  $("#api-base").addEventListener("change", () => {
    api = new WorkbenchApi(apiBase(), ($("#token") as HTMLInputElement).value.trim());
    void loadGraphs().catch(surface);
  });
  $("#graphs").addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest(".graph-pick");
    if (target) {
      ($("#graph-id") as HTMLInputElement).value = target.getAttribute("data-graph") ?? "";
    }
  });
  $("#claim").addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest(".resolve");
    if (target) {
      void resolveConflict(
        target.getAttribute("data-annotation") ?? "",
        target.getAttribute("data-verdict") ?? "",
      );
    }
  });
  for (const [id, verdict] of [
    ["#verdict-supported", "supported"],
    ["#verdict-unsupported", "unsupported"],
    ["#verdict-cannot-tell", "cannot_tell"],
  ] as const) {
    $(id).addEventListener("click", () => void submit(verdict));
  }
  $("#evaluate").addEventListener("click", () => void evaluateGate());
  document.addEventListener("keydown", (event) => {
    if ((event.target as HTMLElement).tagName === "INPUT") return;
    if (event.key === "s") void submit("supported");
    else if (event.key === "u") void submit("unsupported");
    else if (event.key === "c") void submit("cannot_tell");
    else if (event.key === "e") void evaluateGate();
  });
  void loadGraphs().catch(surface);
}

document.addEventListener("DOMContentLoaded", wire);
