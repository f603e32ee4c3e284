/** Token-level render classes for a candidate in its sentence context.
 * Mention-span emphasis and per-token flag emphasis are distinct visual
 * channels; all ranges are clamped to the rendered token list. */

import type { Candidate, Occurrence, SentenceView } from "./types";

export interface TokenHighlight {
  index: number;
  text: string;
  inMention: boolean;
  flag: string | null; // unseen-I | diff-I | diff-etype
}

export function occurrenceInSentence(
  candidate: Candidate,
  sentence: SentenceView,
): Occurrence | null {
  return (
    candidate.occurrences.find(
      (o) => o.doc_id === sentence.doc_id && o.sent_index === sentence.sent_index,
    ) ?? null
  );
}

export function highlightTokens(
  candidate: Candidate,
  sentence: SentenceView,
): TokenHighlight[] {
  const n = sentence.tokens.length;
  const occ = occurrenceInSentence(candidate, sentence);
  const start = occ ? Math.max(0, Math.min(occ.start, n)) : -1;
  const end = occ ? Math.max(start, Math.min(occ.end, n)) : -1;
  const flagAt = new Map<number, string>();
  if (occ) {
    for (const f of candidate.flags) {
      const index = start + f.offset;
      if (index >= start && index < end) flagAt.set(index, f.label);
    }
  }
  return sentence.tokens.map((text, index) => ({
    index,
    text,
    inMention: index >= start && index < end,
    flag: flagAt.get(index) ?? null,
  }));
}
