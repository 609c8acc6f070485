/**
 * Audit session flow: step through the claim queue, time each claim,
 * submit verdicts, resolve conflicts.
 *
 * Timer integrity lives here on the client side (exactly one open and
 * one close per claim per session) and on the server (409 on conflicts);
 * this class refuses locally before the server ever sees a double.
 */

import type { WorkbenchApi } from "./api.js";
import type {
  AnnotationEntry,
  ApiResult,
  ClaimEntry,
  MetricsDoc,
  PathDoc,
  SessionDoc,
  Verdict,
} from "./types.js";

/** Everything one claim's screen shows; all fields come from API responses. */
export interface ClaimView {
  graphId: string;
  claim: ClaimEntry;
  path: ApiResult<PathDoc>;
  pendingConflicts: AnnotationEntry[];
}

export class SessionFlow {
  private opened = new Set<string>();
  private closed = new Set<string>();
  private sessionDoc: SessionDoc;
  private sessionRaw: string;

  private constructor(
    private readonly api: WorkbenchApi,
    created: ApiResult<SessionDoc>,
    private claimEntries: Map<string, ClaimEntry>,
  ) {
    this.sessionDoc = created.doc;
    this.sessionRaw = created.raw;
  }

  static async start(api: WorkbenchApi, graphId: string, auditorId: string): Promise<SessionFlow> {
    const created = await api.createSession(graphId, auditorId);
    const claims = await api.claims(graphId);
    const entries = new Map(claims.doc.claims.map((c) => [c.id, c]));
    return new SessionFlow(api, created, entries);
  }

  get doc(): SessionDoc {
    return this.sessionDoc;
  }

  get raw(): string {
    return this.sessionRaw;
  }

  get sessionId(): string {
    return this.sessionDoc.session_id;
  }

  get graphId(): string {
    return this.sessionDoc.graph_id;
  }

  get queue(): string[] {
    return this.sessionDoc.queue;
  }

  /** First queued claim without a submitted verdict; null when done. */
  currentClaim(): string | null {
    for (const claimId of this.queue) {
      if (!this.closed.has(claimId)) return claimId;
    }
    return null;
  }

  isOpen(claimId: string): boolean {
    return this.opened.has(claimId) && !this.closed.has(claimId);
  }

  finished(): boolean {
    return this.currentClaim() === null;
  }

  /** Load the full claim view; every datum originates from a response. */
  async loadClaimView(claimId: string): Promise<ClaimView> {
    const entry = this.claimEntries.get(claimId);
    if (!entry) throw new Error(`claim ${claimId} is not in this session's graph`);
    const path = await this.api.path(claimId, this.graphId);
    const contradictions = await this.api.contradictions(this.graphId);
    const onPath = new Set(path.doc.nodes.map((n) => n.id));
    const pendingConflicts = contradictions.doc.annotations.filter(
      (a) => !a.resolved && (onPath.has(a.node_a) || onPath.has(a.node_b)),
    );
    return { graphId: this.graphId, claim: entry, path, pendingConflicts };
  }

  /** Open the claim's timer; a second open for the same claim refuses. */
  async openClaim(claimId: string): Promise<void> {
    if (this.opened.has(claimId)) {
      throw new Error(`timer for ${claimId} was already opened in this session`);
    }
    const result = await this.api.openTimer(this.sessionId, claimId);
    this.opened.add(claimId);
    this.sessionDoc = result.doc;
    this.sessionRaw = result.raw;
  }

  /**
   * Close the timer with a verdict. The close call is issued before any
   * metric refresh, and double submission refuses client-side.
   */
  async submitVerdict(claimId: string, verdict: Verdict): Promise<ApiResult<SessionDoc>> {
    if (!this.opened.has(claimId)) {
      throw new Error(`verdict for ${claimId} refused: timer never opened`);
    }
    if (this.closed.has(claimId)) {
      throw new Error(`verdict for ${claimId} refused: already submitted`);
    }
    const result = await this.api.closeTimer(this.sessionId, claimId, verdict);
    this.closed.add(claimId);
    this.sessionDoc = result.doc;
    this.sessionRaw = result.raw;
    return result;
  }

  /** Metrics panel refresh; called after every verdict. */
  refreshMetrics(): Promise<ApiResult<MetricsDoc>> {
    return this.api.metrics(this.graphId);
  }

  async refreshClaims(): Promise<void> {
    const claims = await this.api.claims(this.graphId);
    this.claimEntries = new Map(claims.doc.claims.map((c) => [c.id, c]));
  }
}
