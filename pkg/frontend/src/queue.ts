/** Review-queue state: filters, pagination, and post-verdict advancement.
 * Pure data + transitions; the DOM layer consumes snapshots of it. The
 * service fixes the ordering, the queue never re-sorts. */

import type { Candidate, CandidatePage } from "./types";
import type { QueueFilters } from "./api";

export const PAGE_SIZE = 20;

export interface QueueState {
  filters: QueueFilters;
  page: CandidatePage | null;
  selected: number; // index into page.items
  error: string | null;
}

export function initialQueue(filters: QueueFilters = {}): QueueState {
  return {
    filters: { status: "pending", limit: PAGE_SIZE, offset: 0, ...filters },
    page: null,
    selected: 0,
    error: null,
  };
}

export function pageCount(state: QueueState): number {
  if (!state.page || !state.page.limit) return 0;
  return Math.ceil(state.page.total / state.page.limit);
}

export function currentPage(state: QueueState): number {
  if (!state.page || !state.page.limit) return 0;
  return Math.floor(state.page.offset / state.page.limit);
}

export function selectedCandidate(state: QueueState): Candidate | null {
  return state.page?.items[state.selected] ?? null;
}

export function withPage(state: QueueState, page: CandidatePage): QueueState {
  const selected = Math.min(state.selected, Math.max(page.items.length - 1, 0));
  return { ...state, page, selected, error: null };
}

export function withError(state: QueueState, message: string): QueueState {
  return { ...state, error: message };
}

export function select(state: QueueState, index: number): QueueState {
  if (!state.page) return state;
  const clamped = Math.max(0, Math.min(index, state.page.items.length - 1));
  return { ...state, selected: clamped };
}

export function moveSelection(state: QueueState, delta: number): QueueState {
  return select(state, state.selected + delta);
}

export function setFilters(state: QueueState, filters: QueueFilters): QueueState {
  return {
    ...state,
    filters: { ...state.filters, ...filters, offset: 0 },
    selected: 0,
  };
}

export function gotoPage(state: QueueState, page: number): QueueState {
  const limit = state.filters.limit ?? PAGE_SIZE;
  const pages = pageCount(state);
  const clamped = Math.max(0, pages ? Math.min(page, pages - 1) : page);
  return {
    ...state,
    filters: { ...state.filters, offset: clamped * limit },
    selected: 0,
  };
}

/** After a verdict on `id`: when the queue filters on pending, the decided
 * item will vanish on refetch, so keep the same index (the next item slides
 * in); otherwise step past it. */
export function afterDecision(state: QueueState, id: string): QueueState {
  if (!state.page) return state;
  const index = state.page.items.findIndex((c) => c.id === id);
  if (index < 0) return state;
  if (state.filters.status === "pending") return state;
  return moveSelection(state, state.selected === index ? 1 : 0);
}
