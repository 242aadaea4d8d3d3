// Payload shapes of the review-service endpoints (field names are the wire contract).

export const RULE_KEYS = [
  "background_valid",
  "background_realistic",
  "boat_preserved",
] as const;

export type RuleKey = (typeof RULE_KEYS)[number];

export const RULE_LABELS: Record<RuleKey, string> = {
  background_valid: "Background contains only island / ocean / cloud",
  background_realistic: "Background looks realistic",
  boat_preserved: "At least one boat is preserved",
};

export interface GtBox {
  x: number;
  y: number;
  w: number;
  h: number;
  label: string;
}

export interface QueueItem {
  done: false;
  edited_id: string;
  source_id: string;
  sea_state: number;
  boxes: GtBox[];
  reviewed: number;
  total: number;
}

export interface QueueDone {
  done: true;
  reviewed: number;
  total: number;
}

export type NextResponse = QueueItem | QueueDone;

export interface SessionInfo {
  session_id: string;
  n_items: number;
  sample_size: number;
  seed: number;
  subset: string;
}

export interface SessionStats {
  session_id: string;
  n_reviewed: number;
  n_good: number;
  good_rate: number;
}

export interface CrossStats {
  sessions: string[];
  mean_good_rate: number;
  std_good_rate: number | null;
  per_session: { session_id: string; good_rate: number; n_reviewed: number }[];
}

export interface VerdictResponse {
  edited_id: string;
  session_id: string;
  reviewer: string;
  good: boolean;
  rule_flags: Record<string, boolean>;
  timestamp: string;
}
