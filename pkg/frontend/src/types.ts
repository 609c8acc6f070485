/**
 * Server document shapes. Every field mirrors the canonical JSON the API
 * emits; the workbench renders these and never derives its own numbers.
 */

export type Verdict = "supported" | "unsupported" | "cannot_tell";
export type ResolutionVerdict = "upheld_a" | "upheld_b" | "both_reported";
export type GateOutcome = "pass" | "block" | "escalate";

export interface GraphSummary {
  graph_id: string;
  query: string;
  sources: number;
  reasoning: number;
  claims: number;
  edges: number;
}

export interface GraphListDoc {
  graphs: GraphSummary[];
}

export interface ClaimLocation {
  section: string;
  start: number;
  end: number;
}

export interface ClaimEntry {
  id: string;
  statement: string;
  location: ClaimLocation;
  gate: "validates" | "challenges" | null;
}

export interface ClaimListDoc {
  graph_id: string;
  query: string;
  claims: ClaimEntry[];
}

export interface PathNode {
  id: string;
  node_kind: "source" | "reasoning" | "claim";
  locator?: string;
  excerpt?: string;
  timestamp?: string;
  inference?: string;
  /** inference kind (deduction, induction, synthesis) on reasoning nodes */
  kind?: string;
  model?: string;
  statement?: string;
  location?: ClaimLocation;
}

export interface EdgeDoc {
  from: string;
  to: string;
  rel: string;
  strength: number | null;
}

export interface PathDoc {
  graph_id: string;
  claim_id: string;
  complete: boolean;
  proxy: number;
  nodes: PathNode[];
  edges: EdgeDoc[];
  sources: string[];
  reasoning: string[];
  annotations: EdgeDoc[];
}

export interface AnnotationEntry {
  id: string;
  node_a: string;
  node_b: string;
  entity: string;
  origin: "ground_truth" | "detected";
  edge_present: boolean;
  resolved: boolean;
}

export interface ContradictionsDoc {
  graph_id: string;
  annotations: AnnotationEntry[];
  resolutions: {
    node_a: string;
    node_b: string;
    entity: string;
    verdict: ResolutionVerdict;
    auditor_id: string;
  }[];
}

export interface MetricsDoc {
  format: string;
  graph_id: string | null;
  query: string;
  pcov: number;
  psnd: number | null;
  psnd_undefined_reason: string | null;
  ctran: number;
  ctran_vacuous: boolean;
  aeff_proxy: number;
  aeff_empirical_minutes: number | null;
  aeff_sample_size: number;
  citation_pairs: {
    claim_id: string;
    source_id: string;
    nu: number;
    direction: string;
    scorer_id: string;
    valid: boolean;
  }[];
  per_claim: {
    claim_id: string;
    complete: boolean;
    path_size: number;
    proxy: number;
    invalid_pairs: string[];
    direct_only: boolean;
  }[];
}

export interface GateReasonDoc {
  rule: string;
  satisfied: boolean;
  detail: string;
}

export interface GateDecisionDoc {
  claim_id: string;
  outcome: GateOutcome;
  reasons: GateReasonDoc[];
  emitted_edges: { from: string; to: string; rel: string }[];
  graph_id?: string;
  seq?: number;
}

export interface TimerDoc {
  state: "pending" | "open" | "closed";
  seconds: number | null;
  verdict: Verdict | null;
}

export interface SessionDoc {
  session_id: string;
  graph_id: string;
  auditor_id: string;
  started_at: string;
  queue: string[];
  claims: Record<string, TimerDoc>;
  summary: {
    total: number;
    completed: number;
    mean_seconds: number | null;
    empirical_aeff_minutes: number | null;
  };
  closed_claim?: { claim_id: string; seconds: number; verdict: Verdict };
}

export interface ApiErrorDoc {
  error: string;
  detail: string;
}

/** One API response: the parsed document plus its exact body text. */
export interface ApiResult<T> {
  doc: T;
  raw: string;
}
