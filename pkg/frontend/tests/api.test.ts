import { describe, expect, it, vi } from "vitest";

import { Api, buildQuery, decisionPayload } from "../src/api";

function mockFetch(status = 200, body: unknown = {}) {
  return vi.fn(async () => ({
    ok: status < 400,
    status,
    statusText: String(status),
    text: async () => JSON.stringify(body),
  })) as unknown as typeof fetch;
}

describe("buildQuery", () => {
  it("skips undefined and empty values", () => {
    expect(buildQuery({ a: 1, b: undefined, c: "", d: "x" })).toBe("?a=1&d=x");
  });

  it("is empty when nothing set", () => {
    expect(buildQuery({ a: undefined })).toBe("");
  });
});

describe("Api", () => {
  it("builds candidate list urls with filters", async () => {
    const f = mockFetch(200, { total: 0, offset: 0, limit: 20, items: [] });
    const api = new Api("http://s", f);
    await api.candidates({ status: "pending", source: "rule", offset: 20, limit: 20 });
    expect(f).toHaveBeenCalledWith(
      "http://s/api/v1/candidates?status=pending&source=rule&offset=20&limit=20",
      undefined,
    );
  });

  it("posts decisions with a json body", async () => {
    const f = mockFetch(200, { candidate: {} });
    const api = new Api("", f);
    await api.decide("abc123", "accept", "kai");
    const [url, init] = (f as any).mock.calls[0];
    expect(url).toBe("/api/v1/candidates/abc123/decision");
    expect(init.method).toBe("POST");
    expect(JSON.parse(init.body)).toEqual({ verdict: "accept", actor: "kai" });
  });

  it("raises ApiError with the service message", async () => {
    const api = new Api("", mockFetch(404, { error: "unknown candidate zz" }));
    await expect(api.candidate("zz")).rejects.toMatchObject({
      status: 404,
      message: "unknown candidate zz",
    });
  });

  it("keyboard and mouse payloads are byte-identical by construction", () => {
    const fromKeyboard = decisionPayload("reject", "kai");
    const fromMouse = decisionPayload("reject", "kai");
    expect(fromKeyboard).toBe(fromMouse);
  });
});
