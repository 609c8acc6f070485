/**
 * Pure HTML renderers. Views format and arrange API data but never
 * compute it: every number shown is sliced byte-for-byte out of the
 * response body via raw.ts, so what the auditor reads is exactly what
 * the server said.
 */

import { rawValue } from "./raw.js";
import type { ClaimView } from "./session.js";
import type {
  ApiResult,
  EdgeDoc,
  GateDecisionDoc,
  GraphSummary,
  MetricsDoc,
  PathNode,
  SessionDoc,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function nodeIndex(nodes: PathNode[], id: string): number {
  return nodes.findIndex((n) => n.id === id);
}

/** supports-edge strengths into a node, as exact response bytes. */
function incomingStrengths(path: ApiResult<{ edges: EdgeDoc[] }>, nodeId: string): string[] {
  const out: string[] = [];
  path.doc.edges.forEach((edge, i) => {
    if (edge.to === nodeId && edge.rel === "supports") {
      const nu = rawValue(path.raw, ["edges", i, "strength"]);
      out.push(`${escapeHtml(edge.from)} &rarr; &nu;=${nu}`);
    }
  });
  return out;
}

export function renderGraphList(graphs: GraphSummary[]): string {
  const rows = graphs
    .map(
      (g) =>
        `<li><button class="graph-pick" data-graph="${escapeHtml(g.graph_id)}">` +
        `${escapeHtml(g.graph_id)}</button> <span class="muted">${escapeHtml(g.query)}</span>` +
        ` <span class="counts">${g.claims} claims / ${g.sources} sources</span></li>`,
    )
    .join("");
  return `<ul class="graph-list">${rows}</ul>`;
}

export function renderQueue(queue: string[], current: string | null, closed: Set<string>): string {
  const items = queue
    .map((claimId) => {
      const state = closed.has(claimId) ? "done" : claimId === current ? "current" : "pending";
      return `<li class="queue-${state}" data-claim="${escapeHtml(claimId)}">${escapeHtml(claimId)}</li>`;
    })
    .join("");
  return `<ol class="queue">${items}</ol>`;
}

/**
 * Three-column provenance layout: sources left, reasoning center, claim
 * right, mirroring the left-to-right evidence flow; contradicts edges
 * are called out, never smoothed away.
 */
export function renderClaimView(view: ClaimView, gate?: ApiResult<GateDecisionDoc>): string {
  const { claim, path } = view;
  const nodes = path.doc.nodes;

  const sourceCards = path.doc.sources
    .map((id) => {
      const node = nodes[nodeIndex(nodes, id)];
      return (
        `<div class="card source" data-node="${escapeHtml(id)}">` +
        `<h4>${escapeHtml(id)}</h4>` +
        `<p class="excerpt">&ldquo;${escapeHtml(node.excerpt ?? "")}&rdquo;</p>` +
        `<p class="muted locator">${escapeHtml(node.locator ?? "")}</p></div>`
      );
    })
    .join("");

  const reasoningCards = path.doc.reasoning
    .map((id) => {
      const node = nodes[nodeIndex(nodes, id)];
      const strengths = incomingStrengths(path, id)
        .map((s) => `<li>${s}</li>`)
        .join("");
      return (
        `<div class="card reasoning" data-node="${escapeHtml(id)}">` +
        `<h4>${escapeHtml(id)} <span class="badge kind-badge">${escapeHtml(node.kind ?? "")}</span></h4>` +
        `<p>${escapeHtml(node.inference ?? "")}</p>` +
        `<p class="muted">${escapeHtml(node.model ?? "")}</p>` +
        (strengths ? `<ul class="strengths">${strengths}</ul>` : "") +
        `</div>`
      );
    })
    .join("");

  const claimStrengths = incomingStrengths(path, claim.id)
    .map((s) => `<li>${s}</li>`)
    .join("");

  const conflicts = view.pendingConflicts
    .map(
      (a) =>
        `<div class="conflict" data-annotation="${escapeHtml(a.id)}">` +
        `<strong>${escapeHtml(a.node_a)} &harr; ${escapeHtml(a.node_b)}</strong>` +
        ` about <em>${escapeHtml(a.entity)}</em> (${escapeHtml(a.origin)})` +
        ` <button class="resolve" data-annotation="${escapeHtml(a.id)}" data-verdict="upheld_a">uphold ${escapeHtml(a.node_a)}</button>` +
        ` <button class="resolve" data-annotation="${escapeHtml(a.id)}" data-verdict="upheld_b">uphold ${escapeHtml(a.node_b)}</button>` +
        ` <button class="resolve" data-annotation="${escapeHtml(a.id)}" data-verdict="both_reported">report both</button>` +
        `</div>`,
    )
    .join("");

  const gateBlock = gate ? renderGateDecision(gate) : renderGateStanding(claim.gate);

  return (
    `<div class="claim-view">` +
    `<header><h2>${escapeHtml(claim.id)}</h2>` +
    `<p class="statement">${escapeHtml(claim.statement)}</p>` +
    `<p class="muted">at ${escapeHtml(claim.location.section)} [${claim.location.start}&ndash;${claim.location.end}]` +
    ` &middot; path ${path.doc.complete ? "complete" : "incomplete"}` +
    ` &middot; effort proxy ${rawValue(path.raw, ["proxy"])}</p></header>` +
    `<div class="columns">` +
    `<section class="col sources"><h3>Sources</h3>${sourceCards || "<p class='muted'>none</p>"}</section>` +
    `<section class="col reasoning"><h3>Reasoning</h3>${reasoningCards || "<p class='muted'>none</p>"}</section>` +
    `<section class="col claim"><h3>Claim</h3>` +
    `<div class="card claim-card"><h4>${escapeHtml(claim.id)}</h4>` +
    `<p>${escapeHtml(claim.statement)}</p>` +
    (claimStrengths ? `<ul class="strengths">${claimStrengths}</ul>` : "") +
    `</div></section></div>` +
    `<section class="gate">${gateBlock}</section>` +
    `<section class="conflicts"><h3>Evidence conflicts touching this path</h3>` +
    `${conflicts || "<p class='muted'>none pending</p>"}</section>` +
    `</div>`
  );
}

export function renderGateStanding(gate: "validates" | "challenges" | null): string {
  if (gate === null) return `<p class="muted">Gate: not evaluated yet (press e)</p>`;
  const label = gate === "validates" ? "validated" : "challenged";
  return `<p class="gate-standing gate-${gate}">Gate: last decision ${label}</p>`;
}

export function renderGateDecision(gate: ApiResult<GateDecisionDoc>): string {
  const reasons = gate.doc.reasons
    .map(
      (r) =>
        `<li class="${r.satisfied ? "ok" : "fail"}">` +
        `<code>${escapeHtml(r.rule)}</code> ${escapeHtml(r.detail)}</li>`,
    )
    .join("");
  return (
    `<div class="gate-decision outcome-${gate.doc.outcome}">` +
    `<h3>Gate: ${escapeHtml(gate.doc.outcome)}</h3><ul>${reasons}</ul></div>`
  );
}

/** Metric panel; every figure is the server's exact rendering. */
export function renderMetricsPanel(metrics: ApiResult<MetricsDoc>): string {
  const raw = metrics.raw;
  const psnd =
    metrics.doc.psnd === null
      ? `undefined (${escapeHtml(metrics.doc.psnd_undefined_reason ?? "")})`
      : rawValue(raw, ["psnd"]);
  const ctranSuffix = metrics.doc.ctran_vacuous ? " (vacuous)" : "";
  const aeff =
    metrics.doc.aeff_empirical_minutes === null
      ? "no timings yet"
      : `${rawValue(raw, ["aeff_empirical_minutes"])} min over ${rawValue(raw, ["aeff_sample_size"])} claims`;
  return (
    `<dl class="metrics">` +
    `<dt>PCov</dt><dd>${rawValue(raw, ["pcov"])}</dd>` +
    `<dt>PSnd</dt><dd>${psnd}</dd>` +
    `<dt>CTran</dt><dd>${rawValue(raw, ["ctran"])}${ctranSuffix}</dd>` +
    `<dt>AEff proxy</dt><dd>${rawValue(raw, ["aeff_proxy"])}</dd>` +
    `<dt>AEff empirical</dt><dd>${aeff}</dd>` +
    `</dl>`
  );
}

/** Session summary; the empirical mean comes from the server document. */
export function renderSessionSummary(session: ApiResult<SessionDoc>): string {
  const raw = session.raw;
  const summary = session.doc.summary;
  const mean =
    summary.mean_seconds === null
      ? "&mdash;"
      : `${rawValue(raw, ["summary", "mean_seconds"])} s`;
  const minutes =
    summary.empirical_aeff_minutes === null
      ? "&mdash;"
      : `${rawValue(raw, ["summary", "empirical_aeff_minutes"])} min`;
  return (
    `<div class="session-summary">` +
    `<span>${rawValue(raw, ["summary", "completed"])}/${rawValue(raw, ["summary", "total"])} claims</span>` +
    `<span>mean ${mean}</span>` +
    `<span>empirical AEff ${minutes}</span>` +
    `</div>`
  );
}
