import type {
  CrossStats,
  NextResponse,
  RuleKey,
  SessionInfo,
  SessionStats,
  VerdictResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function asJson<T>(response: Response): Promise<T> {
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = (await response.json()) as { detail?: string };
      if (body.detail) detail = body.detail;
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

/** Thin typed client over the review-service HTTP endpoints. */
export class ReviewApi {
  constructor(readonly baseUrl: string = "") {}

  async createSession(options: {
    sample_size?: number;
    seed?: number;
    subset?: string;
    session_id?: string;
  }): Promise<SessionInfo> {
    const response = await fetch(`${this.baseUrl}/api/session`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(options),
    });
    return asJson<SessionInfo>(response);
  }

  async next(sessionId: string): Promise<NextResponse> {
    const response = await fetch(`${this.baseUrl}/api/session/${sessionId}/next`);
    return asJson<NextResponse>(response);
  }

  async submitVerdict(
    sessionId: string,
    editedId: string,
    reviewer: string,
    ruleFlags: Record<RuleKey, boolean>,
  ): Promise<VerdictResponse> {
    const response = await fetch(`${this.baseUrl}/api/session/${sessionId}/verdict`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({
        edited_id: editedId,
        reviewer,
        rule_flags: ruleFlags,
      }),
    });
    return asJson<VerdictResponse>(response);
  }

  async sessionStats(sessionId: string): Promise<SessionStats> {
    const response = await fetch(`${this.baseUrl}/api/session/${sessionId}/stats`);
    return asJson<SessionStats>(response);
  }

  async crossStats(sessionIds: string[]): Promise<CrossStats> {
    const response = await fetch(
      `${this.baseUrl}/api/stats?sessions=${sessionIds.join(",")}`,
    );
    return asJson<CrossStats>(response);
  }

  imageUrl(editedId: string, which: "edited" | "source" = "edited"): string {
    const suffix = which === "source" ? "?which=source" : "";
    return `${this.baseUrl}/api/image/${editedId}${suffix}`;
  }
}
