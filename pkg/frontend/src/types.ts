/** Wire types of the review service (/api/v1). */

export type Verdict = "accept" | "reject" | "ambiguous" | "modify";

export type CandidateStatus =
  | "pending"
  | "confirmed_error"
  | "dismissed"
  | "ambiguous";

export interface TokenFlag {
  offset: number; // token offset within the mention
  label: string; // unseen-I | diff-I | diff-etype
}

export interface Occurrence {
  doc_id: string;
  sent_index: number;
  start: number;
  end: number;
}

export interface EditOperation {
  op: "shrink" | "grow" | "retype" | "delete";
  left?: number;
  right?: number;
  etype?: string;
}

export interface Proposal {
  id: string;
  rule_id: string;
  target: Occurrence & { etype: string; surface: string };
  operation: EditOperation;
  status?: string;
}

export interface Candidate {
  id: string;
  surface: string;
  etype: string;
  flags: TokenFlag[];
  occurrences: Occurrence[];
  context_sample: string;
  status: CandidateStatus;
  source: string; // token-flags | pair-list | rule
  rule_id?: string;
  note?: string;
  proposal?: Proposal;
  sentence?: SentenceView;
}

export interface SentenceView {
  doc_id: string;
  sent_index: number;
  tokens: string[];
  tags: string[];
  window?: SentenceView[];
}

export interface CandidatePage {
  total: number;
  offset: number;
  limit: number;
  items: Candidate[];
}

export interface Stats {
  candidates: Record<string, number>;
  by_source: Record<string, number>;
  proposals: Record<string, number>;
  decisions: number;
  diff: {
    tokens: { changed: number; total: number; pct: number };
    sentences: { changed: number; total: number; pct: number };
    mentions: { before: number; after: number };
    categories: Record<string, number>;
    per_type: { type: string; delta: number; pct: number | null }[];
  };
}

export interface DecisionBody {
  verdict: Verdict;
  actor: string;
  replacement?: Proposal;
}
