import { describe, expect, it, vi } from "vitest";

import { Api } from "../src/api";
import { App } from "../src/app";
import { actionForKey } from "../src/keyboard";
import type { CandidatePage, Stats } from "../src/types";

describe("actionForKey", () => {
  it("maps the review keys", () => {
    expect(actionForKey("a")).toEqual({ kind: "verdict", verdict: "accept" });
    expect(actionForKey("r")).toEqual({ kind: "verdict", verdict: "reject" });
    expect(actionForKey("x")).toEqual({ kind: "verdict", verdict: "ambiguous" });
    expect(actionForKey("s")).toEqual({ kind: "skip" });
    expect(actionForKey("m")).toEqual({ kind: "modify" });
    expect(actionForKey("n")).toEqual({ kind: "page", delta: 1 });
  });

  it("ignores unbound keys and keystrokes inside form fields", () => {
    expect(actionForKey("z")).toBeNull();
    expect(actionForKey("a", { tagName: "INPUT" })).toBeNull();
    expect(actionForKey("a", { tagName: "SELECT" })).toBeNull();
  });
});

function fakeService() {
  const page: CandidatePage = {
    total: 1,
    offset: 0,
    limit: 20,
    items: [
      {
        id: "aa11",
        surface: "the US",
        etype: "GPE",
        flags: [],
        occurrences: [{ doc_id: "d", sent_index: 0, start: 0, end: 2 }],
        context_sample: "the US economy",
        status: "pending",
        source: "rule",
        rule_id: "leading_determiner",
      },
    ],
  };
  const stats: Stats = {
    candidates: { pending: 1 },
    by_source: { rule: 1 },
    proposals: { pending: 1 },
    decisions: 0,
    diff: {
      tokens: { changed: 0, total: 3, pct: 0 },
      sentences: { changed: 0, total: 1, pct: 0 },
      mentions: { before: 1, after: 1 },
      categories: { span_only: 0 },
      per_type: [],
    },
  };
  const posts: { url: string; body: string }[] = [];
  const fetcher = vi.fn(async (url: string, init?: RequestInit) => {
    if (init?.method === "POST") {
      posts.push({ url: String(url), body: String(init.body) });
      return ok({ candidate: { ...page.items[0], status: "confirmed_error" } });
    }
    if (String(url).includes("/candidates/aa11")) {
      return ok({
        ...page.items[0],
        sentence: {
          doc_id: "d",
          sent_index: 0,
          tokens: ["the", "US", "economy"],
          tags: ["B-GPE", "I-GPE", "O"],
        },
      });
    }
    if (String(url).includes("/candidates")) return ok(page);
    if (String(url).includes("/stats")) return ok(stats);
    return ok({});
  }) as unknown as typeof fetch;

  function ok(body: unknown) {
    return {
      ok: true,
      status: 200,
      statusText: "OK",
      text: async () => JSON.stringify(body),
    };
  }
  return { fetcher, posts };
}

describe("keyboard and mouse parity", () => {
  it("both paths send byte-identical decision bodies", async () => {
    const root = document.createElement("div");
    document.body.append(root);

    const kb = fakeService();
    const appKb = new App(root, new Api("", kb.fetcher), "kai");
    await appKb.start();
    await appKb.dispatch({ kind: "verdict", verdict: "accept" }); // keyboard route

    const ms = fakeService();
    const appMs = new App(root, new Api("", ms.fetcher), "kai");
    await appMs.start();
    (root.querySelector("#btn-accept") as HTMLButtonElement).click(); // mouse route
    await new Promise((resolve) => setTimeout(resolve, 25));

    expect(kb.posts).toHaveLength(1);
    expect(ms.posts).toHaveLength(1);
    expect(ms.posts[0].url).toBe(kb.posts[0].url);
    expect(ms.posts[0].body).toBe(kb.posts[0].body);
  });
});
