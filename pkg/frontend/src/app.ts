/** The review application: a candidate queue, a context pane with span and
 * flag highlighting, a modify editor, and a live statistics dashboard.
 *
 * The app is stateless with respect to truth: everything rendered is
 * re-fetchable from the service, no verdict is shown as done before the
 * service confirms the log write, and at most one decision request is in
 * flight at a time (queued keystrokes are processed in order).
 */

import { Api, ApiError } from "./api";
import type { QueueFilters } from "./api";
import { highlightTokens } from "./highlight";
import { actionForKey, KEY_HELP, QueueAction } from "./keyboard";
import {
  buildReplacement,
  draftFromCandidate,
  ModifyDraft,
  validateDraft,
} from "./modify";
import {
  afterDecision,
  currentPage,
  gotoPage,
  initialQueue,
  moveSelection,
  pageCount,
  QueueState,
  select,
  selectedCandidate,
  setFilters,
  withError,
  withPage,
} from "./queue";
import type { Candidate, Stats, Verdict } from "./types";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [k, v] of Object.entries(attrs)) {
    if (k === "class") node.className = v;
    else node.setAttribute(k, v);
  }
  for (const child of children) node.append(child);
  return node;
}

export class App {
  queue: QueueState;
  detail: Candidate | null = null;
  stats: Stats | null = null;
  draft: ModifyDraft | null = null;
  actor: string;
  private chain: Promise<unknown> = Promise.resolve();

  constructor(
    readonly root: HTMLElement,
    readonly api: Api,
    actor = "reviewer",
  ) {
    this.actor = actor;
    this.queue = initialQueue();
  }

  /** Mount, do the first fetch, and wire global keyboard handling. */
  async start(): Promise<void> {
    this.render();
    document.addEventListener("keydown", (event) => {
      const action = actionForKey(event.key, event.target as HTMLElement);
      if (!action) return;
      event.preventDefault();
      this.dispatch(action);
    });
    await this.refresh();
  }

  /** Serialize all mutating work; keystrokes never race each other. */
  enqueue(work: () => Promise<void>): Promise<void> {
    const next = this.chain.then(work).catch((err) => this.fail(err));
    this.chain = next;
    return next;
  }

  /** Resolves once every queued action so far has finished (test hook). */
  settled(): Promise<unknown> {
    return this.chain;
  }

  dispatch(action: QueueAction): Promise<void> {
    switch (action.kind) {
      case "verdict":
        return this.enqueue(() => this.decide(action.verdict));
      case "skip":
      case "move":
        return this.enqueue(async () => {
          this.queue = moveSelection(this.queue, action.kind === "skip" ? 1 : action.delta);
          await this.loadDetail();
          this.render();
        });
      case "page":
        return this.enqueue(async () => {
          this.queue = gotoPage(this.queue, currentPage(this.queue) + action.delta);
          await this.refresh();
        });
      case "modify":
        return this.enqueue(async () => {
          this.openModify();
          this.render();
        });
    }
  }

  fail(err: unknown): void {
    const message =
      err instanceof ApiError
        ? `service error ${err.status}: ${err.message}`
        : `service unreachable: ${String(err)}`;
    this.queue = withError(this.queue, message);
    this.render();
  }

  async refresh(): Promise<void> {
    try {
      const [page, stats] = await Promise.all([
        this.api.candidates(this.queue.filters),
        this.api.stats(),
      ]);
      this.queue = withPage(this.queue, page);
      this.stats = stats;
      await this.loadDetail();
    } catch (err) {
      this.fail(err);
      return;
    }
    this.render();
  }

  async loadDetail(): Promise<void> {
    const candidate = selectedCandidate(this.queue);
    if (!candidate) {
      this.detail = null;
      return;
    }
    this.detail = await this.api.candidate(candidate.id, 1);
  }

  async decide(verdict: Verdict, replacement?: ReturnType<typeof buildReplacement>) {
    const candidate = selectedCandidate(this.queue);
    if (!candidate) return;
    // the service's 200 (a durable log line) is the only ack that advances us
    await this.api.decide(candidate.id, verdict, this.actor, replacement);
    this.draft = null;
    this.queue = afterDecision(this.queue, candidate.id);
    await this.refresh();
  }

  async applyFilters(filters: QueueFilters): Promise<void> {
    this.queue = setFilters(this.queue, filters);
    await this.refresh();
  }

  openModify(): void {
    if (!this.detail?.sentence) return;
    this.draft = draftFromCandidate(this.detail, this.detail.sentence);
  }

  submitModify(): Promise<void> {
    return this.enqueue(async () => {
      if (!this.draft || !this.detail?.sentence) return;
      const problem = validateDraft(this.detail, this.detail.sentence, this.draft);
      if (problem) {
        this.queue = withError(this.queue, problem);
        this.render();
        return;
      }
      const replacement = buildReplacement(this.detail, this.detail.sentence, this.draft);
      await this.decide("modify", replacement);
    });
  }

  // ---- rendering ---------------------------------------------------------

  render(): void {
    this.root.replaceChildren(
      this.renderToolbar(),
      el("div", { class: "columns" }, [this.renderQueue(), this.renderDetail()]),
      this.renderStats(),
      el("footer", { class: "keys" }, [KEY_HELP]),
    );
  }

  private renderToolbar(): HTMLElement {
    const statusSel = el("select", { id: "filter-status" });
    for (const s of ["pending", "confirmed_error", "dismissed", "ambiguous", ""]) {
      statusSel.append(el("option", { value: s }, [s || "all statuses"]));
    }
    statusSel.value = this.queue.filters.status ?? "";
    const sourceSel = el("select", { id: "filter-source" });
    for (const s of ["", "token-flags", "pair-list", "rule"]) {
      sourceSel.append(el("option", { value: s }, [s || "all sources"]));
    }
    sourceSel.value = this.queue.filters.source ?? "";
    const ruleSel = el("select", { id: "filter-rule" });
    for (const r of ["", "leading_determiner", "trailing_possessive", "edge_punctuation"]) {
      ruleSel.append(el("option", { value: r }, [r || "all rules"]));
    }
    ruleSel.value = this.queue.filters.rule ?? "";
    const onchange = () =>
      void this.enqueue(() =>
        this.applyFilters({
          status: statusSel.value || undefined,
          source: sourceSel.value || undefined,
          rule: ruleSel.value || undefined,
        }),
      );
    statusSel.onchange = onchange;
    sourceSel.onchange = onchange;
    ruleSel.onchange = onchange;
    const error = this.queue.error
      ? el("span", { class: "error", role: "alert" }, [this.queue.error])
      : "";
    return el("header", { class: "toolbar" }, [statusSel, sourceSel, ruleSel, error]);
  }

  private renderQueue(): HTMLElement {
    const page = this.queue.page;
    const list = el("ul", { id: "queue", class: "queue" });
    if (!page || page.items.length === 0) {
      list.append(el("li", { class: "empty" }, ["nothing to review here"]));
    }
    page?.items.forEach((c, index) => {
      const item = el(
        "li",
        {
          class: `card${index === this.queue.selected ? " selected" : ""}`,
          "data-id": c.id,
        },
        [
          el("span", { class: "surface" }, [c.surface]),
          el("span", { class: "etype" }, [c.etype]),
          el("span", { class: "meta" }, [
            `${c.source}${c.rule_id ? "/" + c.rule_id : ""} · ${c.occurrences.length}×` +
              (c.flags.length ? ` · ${c.flags.map((f) => f.label).join(",")}` : ""),
          ]),
          el("span", { class: `status ${c.status}` }, [c.status]),
        ],
      );
      item.onclick = () =>
        void this.enqueue(async () => {
          this.queue = select(this.queue, index);
          await this.loadDetail();
          this.render();
        });
      list.append(item);
    });
    const pages = pageCount(this.queue);
    const pager = el("div", { class: "pager" }, [
      `page ${pages ? currentPage(this.queue) + 1 : 0}/${pages} · ${page?.total ?? 0} total`,
    ]);
    const prev = el("button", { id: "page-prev" }, ["prev"]);
    prev.onclick = () => void this.dispatch({ kind: "page", delta: -1 });
    const next = el("button", { id: "page-next" }, ["next"]);
    next.onclick = () => void this.dispatch({ kind: "page", delta: 1 });
    pager.append(prev, next);
    return el("section", { class: "queue-pane" }, [list, pager]);
  }

  private renderDetail(): HTMLElement {
    const pane = el("section", { id: "detail", class: "detail-pane" });
    const c = this.detail;
    if (!c) {
      pane.append(el("p", { class: "empty" }, ["select a candidate"]));
      return pane;
    }
    pane.append(
      el("h2", {}, [
        el("span", { class: "surface" }, [c.surface]),
        " ",
        el("span", { class: "etype" }, [c.etype]),
      ]),
    );
    if (c.note) pane.append(el("p", { class: "note" }, [c.note]));
    if (c.proposal) {
      pane.append(
        el("p", { class: "proposal" }, [
          `${c.proposal.rule_id} proposes ${JSON.stringify(c.proposal.operation)}`,
        ]),
      );
    }
    if (c.sentence) {
      const sentence = el("p", { id: "context", class: "context" });
      for (const tok of highlightTokens(c, c.sentence)) {
        const classes = ["token"];
        if (tok.inMention) classes.push("mention");
        if (tok.flag) classes.push("flagged", tok.flag);
        sentence.append(
          el("span", { class: classes.join(" "), title: tok.flag ?? "" }, [tok.text]),
          " ",
        );
      }
      pane.append(sentence);
      for (const w of c.sentence.window ?? []) {
        pane.append(el("p", { class: "context neighbor" }, [w.tokens.join(" ")]));
      }
    }
    const actions = el("div", { class: "actions" });
    const mk = (label: string, verdict: Verdict) => {
      const b = el("button", { id: `btn-${verdict}` }, [label]);
      b.onclick = () => void this.enqueue(() => this.decide(verdict));
      return b;
    };
    actions.append(mk("accept (a)", "accept"), mk("reject (r)", "reject"), mk("ambiguous (x)", "ambiguous"));
    const modifyBtn = el("button", { id: "btn-modify" }, ["modify (m)"]);
    modifyBtn.onclick = () => void this.dispatch({ kind: "modify" });
    actions.append(modifyBtn);
    pane.append(actions);
    if (this.draft) pane.append(this.renderModify());
    return pane;
  }

  private renderModify(): HTMLElement {
    const draft = this.draft as ModifyDraft;
    const form = el("form", { id: "modify-form", class: "modify" });
    const start = el("input", { id: "modify-start", type: "number", value: String(draft.start) });
    const end = el("input", { id: "modify-end", type: "number", value: String(draft.end) });
    const etype = el("input", { id: "modify-etype", type: "text", value: draft.etype });
    const remove = el("input", { id: "modify-delete", type: "checkbox" });
    start.onchange = () => (draft.start = Number(start.value));
    end.onchange = () => (draft.end = Number(end.value));
    etype.onchange = () => (draft.etype = etype.value);
    remove.onchange = () => (draft.remove = remove.checked);
    const submit = el("button", { id: "modify-submit", type: "submit" }, ["apply modify"]);
    form.onsubmit = (event) => {
      event.preventDefault();
      void this.submitModify();
    };
    form.append(
      el("label", {}, ["start ", start]),
      el("label", {}, ["end ", end]),
      el("label", {}, ["type ", etype]),
      el("label", {}, ["delete ", remove]),
      submit,
    );
    return form;
  }

  private renderStats(): HTMLElement {
    const pane = el("section", { id: "stats", class: "stats" });
    const s = this.stats;
    if (!s) return pane;
    // rendered verbatim from GET /stats; the client recomputes nothing
    const counts = el("div", { class: "stat-row" });
    for (const status of ["pending", "confirmed_error", "dismissed", "ambiguous"]) {
      counts.append(
        el("span", { class: "stat", "data-status": status }, [
          `${status}: ${s.candidates[status] ?? 0}`,
        ]),
      );
    }
    counts.append(el("span", { class: "stat" }, [`decisions: ${s.decisions}`]));
    const cats = el("div", { class: "stat-row" });
    for (const [k, v] of Object.entries(s.diff.categories)) {
      cats.append(el("span", { class: "stat", "data-category": k }, [`${k}: ${v}`]));
    }
    const rates = el("div", { class: "stat-row" }, [
      el("span", { class: "stat", "data-rate": "tokens" }, [
        `tokens changed: ${s.diff.tokens.changed} (${s.diff.tokens.pct.toFixed(2)}%)`,
      ]),
      el("span", { class: "stat", "data-rate": "sentences" }, [
        `sentences changed: ${s.diff.sentences.changed} (${s.diff.sentences.pct.toFixed(2)}%)`,
      ]),
    ]);
    pane.append(counts, cats, rates);
    return pane;
  }
}

export function mount(root: HTMLElement, api: Api, actor?: string): App {
  const app = new App(root, api, actor);
  void app.start();
  return app;
}
