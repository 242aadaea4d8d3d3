import { ApiError, ReviewApi } from "./api.js";
import { RULE_KEYS, type QueueItem, type RuleKey, type SessionStats } from "./types.js";

export type TriState = "unset" | "yes" | "no";

export type Phase = "loading" | "reviewing" | "done" | "error";

export interface FlowState {
  phase: Phase;
  item: QueueItem | null;
  toggles: Record<RuleKey, TriState>;
  reviewed: number;
  total: number;
  stats: SessionStats | null;
  error: string | null;
}

function freshToggles(): Record<RuleKey, TriState> {
  return {
    background_valid: "unset",
    background_realistic: "unset",
    boat_preserved: "unset",
  };
}

/**
 * Session review state machine: fetch-next, collect tri-state rule answers,
 * submit, advance. The flow never derives the good/bad verdict itself; it
 * submits raw flags and displays whatever statistics the service reports,
 * so every number on screen has a single source of truth. All state is
 * recoverable from the service: constructing a new flow for the same
 * session resumes at the first unreviewed item.
 */
export class ReviewFlow {
  private state: FlowState = {
    phase: "loading",
    item: null,
    toggles: freshToggles(),
    reviewed: 0,
    total: 0,
    stats: null,
    error: null,
  };

  private listeners: Array<(state: FlowState) => void> = [];

  constructor(
    readonly api: ReviewApi,
    readonly sessionId: string,
    readonly reviewer: string = "anonymous",
  ) {}

  snapshot(): FlowState {
    return {
      ...this.state,
      toggles: { ...this.state.toggles },
    };
  }

  onChange(listener: (state: FlowState) => void): void {
    this.listeners.push(listener);
  }

  private update(patch: Partial<FlowState>): void {
    this.state = { ...this.state, ...patch };
    const snap = this.snapshot();
    for (const listener of this.listeners) listener(snap);
  }

  async start(): Promise<void> {
    await this.advance();
  }

  /** Fetch the next unreviewed item (idempotent server-side) plus stats. */
  async advance(): Promise<void> {
    this.update({ phase: "loading", error: null });
    try {
      const [next, stats] = await Promise.all([
        this.api.next(this.sessionId),
        this.api.sessionStats(this.sessionId),
      ]);
      if (next.done) {
        this.update({
          phase: "done",
          item: null,
          reviewed: next.reviewed,
          total: next.total,
          stats,
        });
      } else {
        this.update({
          phase: "reviewing",
          item: next,
          toggles: freshToggles(),
          reviewed: next.reviewed,
          total: next.total,
          stats,
        });
      }
    } catch (error) {
      this.update({ phase: "error", error: describe(error) });
    }
  }

  setRule(rule: RuleKey, value: "yes" | "no"): void {
    if (this.state.phase !== "reviewing") return;
    this.update({ toggles: { ...this.state.toggles, [rule]: value } });
  }

  /** Submit is allowed only once every rule has an explicit answer. */
  canSubmit(): boolean {
    return (
      this.state.phase === "reviewing" &&
      RULE_KEYS.every((rule) => this.state.toggles[rule] !== "unset")
    );
  }

  async submit(): Promise<void> {
    const item = this.state.item;
    if (!item || !this.canSubmit()) return;
    const flags = Object.fromEntries(
      RULE_KEYS.map((rule) => [rule, this.state.toggles[rule] === "yes"]),
    ) as Record<RuleKey, boolean>;
    this.update({ phase: "loading" });
    try {
      await this.api.submitVerdict(this.sessionId, item.edited_id, this.reviewer, flags);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        // somebody already reviewed this item (duplicate race): just advance
        await this.advance();
        return;
      }
      this.update({ phase: "error", error: describe(error) });
      return;
    }
    await this.advance();
  }

  /** Re-attempt after a surfaced error (service unreachable etc.). */
  async retry(): Promise<void> {
    await this.advance();
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `service error ${error.status}: ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}
