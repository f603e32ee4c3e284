/** Thin typed client for the review service; the UI holds no truth of its
 * own, so every method is a plain re-fetchable GET or an explicit POST. */

import type {
  Candidate,
  CandidatePage,
  DecisionBody,
  Proposal,
  SentenceView,
  Stats,
  Verdict,
} from "./types";

export interface QueueFilters {
  status?: string;
  source?: string;
  rule?: string;
  offset?: number;
  limit?: number;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export function buildQuery(params: Record<string, string | number | undefined>): string {
  const q = new URLSearchParams();
  for (const [key, value] of Object.entries(params)) {
    if (value !== undefined && value !== "") q.set(key, String(value));
  }
  const s = q.toString();
  return s ? `?${s}` : "";
}

/** The decision payload is built in exactly one place so every input path
 * (keyboard, mouse, modify editor) produces byte-identical bodies. */
export function decisionPayload(
  verdict: Verdict,
  actor: string,
  replacement?: Proposal,
): string {
  const body: DecisionBody = { verdict, actor };
  if (replacement) body.replacement = replacement;
  return JSON.stringify(body);
}

export class Api {
  constructor(
    readonly base: string = "",
    private readonly fetcher: typeof fetch = (...args) => fetch(...args),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetcher(`${this.base}/api/v1${path}`, init);
    const text = await response.text();
    const body = text ? JSON.parse(text) : {};
    if (!response.ok) {
      throw new ApiError(response.status, body.error ?? response.statusText);
    }
    return body as T;
  }

  candidates(filters: QueueFilters = {}): Promise<CandidatePage> {
    return this.request<CandidatePage>(
      "/candidates" +
        buildQuery({
          status: filters.status,
          source: filters.source,
          rule: filters.rule,
          offset: filters.offset,
          limit: filters.limit,
        }),
    );
  }

  candidate(id: string, window = 0): Promise<Candidate> {
    return this.request<Candidate>(`/candidates/${id}` + buildQuery({ window }));
  }

  decide(id: string, verdict: Verdict, actor: string, replacement?: Proposal) {
    return this.request<{ candidate: Candidate }>(`/candidates/${id}/decision`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: decisionPayload(verdict, actor, replacement),
    });
  }

  proposals(rule?: string, status?: string): Promise<{ total: number; items: Proposal[] }> {
    return this.request("/proposals" + buildQuery({ rule, status }));
  }

  stats(): Promise<Stats> {
    return this.request<Stats>("/stats");
  }

  sentence(docId: string, sentIndex: number, window = 0): Promise<SentenceView> {
    return this.request<SentenceView>(
      `/sentences/${docId}/${sentIndex}` + buildQuery({ window }),
    );
  }

  export(): Promise<{ corpus: string; report: string }> {
    return this.request("/export", { method: "POST" });
  }
}
