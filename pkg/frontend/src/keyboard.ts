/** Single-keystroke review flow. The map returns abstract actions; the app
 * routes them through the same code path as the buttons, so both input
 * methods emit identical requests. */

export type QueueAction =
  | { kind: "verdict"; verdict: "accept" | "reject" | "ambiguous" }
  | { kind: "skip" }
  | { kind: "move"; delta: number }
  | { kind: "page"; delta: number }
  | { kind: "modify" };

const BINDINGS: Record<string, QueueAction> = {
  a: { kind: "verdict", verdict: "accept" },
  r: { kind: "verdict", verdict: "reject" },
  x: { kind: "verdict", verdict: "ambiguous" },
  s: { kind: "skip" },
  j: { kind: "move", delta: 1 },
  k: { kind: "move", delta: -1 },
  ArrowDown: { kind: "move", delta: 1 },
  ArrowUp: { kind: "move", delta: -1 },
  n: { kind: "page", delta: 1 },
  p: { kind: "page", delta: -1 },
  m: { kind: "modify" },
};

export function actionForKey(
  key: string,
  target?: { tagName?: string } | null,
): QueueAction | null {
  const tag = target?.tagName?.toLowerCase();
  if (tag === "input" || tag === "select" || tag === "textarea") return null;
  return BINDINGS[key] ?? null;
}

export const KEY_HELP = "a accept · r reject · x ambiguous · s skip · m modify · j/k move · n/p page";
