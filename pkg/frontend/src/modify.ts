/** Span/type editor model for modify verdicts.
 *
 * A replacement carries exactly one operation (shrink, grow, retype, or
 * delete), so a draft must change the span or the type, not both at once;
 * span changes must nest with the original span (pure shrink or pure grow).
 * Validation enforces that before a replacement proposal is built, so the
 * service never sees an impossible edit.
 */

import type { Candidate, EditOperation, Occurrence, Proposal, SentenceView } from "./types";

export interface ModifyDraft {
  start: number;
  end: number; // exclusive
  etype: string;
  remove: boolean;
}

function occurrenceIn(candidate: Candidate, sentence: SentenceView): Occurrence | null {
  return (
    candidate.occurrences.find(
      (o) => o.doc_id === sentence.doc_id && o.sent_index === sentence.sent_index,
    ) ?? null
  );
}

export function draftFromCandidate(
  candidate: Candidate,
  sentence: SentenceView,
): ModifyDraft | null {
  const occ = occurrenceIn(candidate, sentence);
  if (!occ) return null;
  return { start: occ.start, end: occ.end, etype: candidate.etype, remove: false };
}

export function validateDraft(
  candidate: Candidate,
  sentence: SentenceView,
  draft: ModifyDraft,
): string | null {
  if (draft.remove) return null;
  const occ = occurrenceIn(candidate, sentence);
  if (!occ) return "candidate does not occur in this sentence";
  if (!Number.isInteger(draft.start) || !Number.isInteger(draft.end)) {
    return "span bounds must be integers";
  }
  if (draft.start < 0 || draft.end > sentence.tokens.length) {
    return `span must lie within the ${sentence.tokens.length}-token sentence`;
  }
  if (draft.start >= draft.end) return "span must contain at least one token";
  if (!draft.etype.trim()) return "an entity type is required";
  const spanChanged = draft.start !== occ.start || draft.end !== occ.end;
  const typeChanged = draft.etype !== candidate.etype;
  if (spanChanged && typeChanged) {
    return "change the span or the type, not both in one decision";
  }
  if (spanChanged) {
    const shrinks = draft.start >= occ.start && draft.end <= occ.end;
    const grows = draft.start <= occ.start && draft.end >= occ.end;
    if (!shrinks && !grows) return "the new span must contain or be contained in the old one";
  } else if (!typeChanged) {
    return "nothing changed";
  }
  return null;
}

/** Express the validated draft as an edit of the original mention. */
export function buildReplacement(
  candidate: Candidate,
  sentence: SentenceView,
  draft: ModifyDraft,
): Proposal {
  const occ = occurrenceIn(candidate, sentence) as Occurrence;
  const target = {
    doc_id: occ.doc_id,
    sent_index: occ.sent_index,
    start: occ.start,
    end: occ.end,
    etype: candidate.etype,
    surface: candidate.surface,
  };
  let operation: EditOperation;
  if (draft.remove) {
    operation = { op: "delete" };
  } else if (draft.start !== occ.start || draft.end !== occ.end) {
    const shrinks = draft.start >= occ.start && draft.end <= occ.end;
    operation = {
      op: shrinks ? "shrink" : "grow",
      left: Math.abs(draft.start - occ.start),
      right: Math.abs(occ.end - draft.end),
    };
  } else {
    operation = { op: "retype", etype: draft.etype };
  }
  return {
    id: replacementId(candidate.id, draft),
    rule_id: "manual",
    target,
    operation,
  };
}

/** Deterministic id so re-posting the same modify supersedes, not duplicates. */
export function replacementId(candidateId: string, draft: ModifyDraft): string {
  const payload = `${candidateId}|${draft.start}|${draft.end}|${draft.etype}|${draft.remove}`;
  let h = 0x811c9dc5; // FNV-1a, hex-padded to the service's 16-char id shape
  for (let i = 0; i < payload.length; i++) {
    h ^= payload.charCodeAt(i);
    h = Math.imul(h, 0x01000193) >>> 0;
  }
  return (h.toString(16).padStart(8, "0") + h.toString(16).padStart(8, "0")).slice(0, 16);
}
