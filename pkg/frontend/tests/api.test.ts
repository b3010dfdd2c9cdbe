import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api";
import { buildMatchStrip, trajectoryCropWindow } from "../src/inspect";
import type { MatchDetail } from "../src/types";

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

describe("ApiClient", () => {
  it("decodes {error, detail} bodies into typed errors", async () => {
    const api = new ApiClient("", async () =>
      jsonResponse({ error: "not_computed", detail: "cone scores missing" }, 409),
    );
    try {
      await api.matrix("scores", 1, "cone");
      expect.unreachable("should have thrown");
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).status).toBe(409);
      expect((err as ApiError).code).toBe("not_computed");
      expect((err as ApiError).message).toBe("cone scores missing");
    }
  });

  it("aborts a superseded reselect", async () => {
    const seen: AbortSignal[] = [];
    let release: (() => void) | null = null;
    const api = new ApiClient("", (_url, init) => {
      seen.push(init!.signal!);
      return new Promise((resolve, reject) => {
        init!.signal!.addEventListener("abort", () =>
          reject(Object.assign(new Error("aborted"), { name: "AbortError" })),
        );
        release = () =>
          resolve(
            jsonResponse({ selection: {}, metrics: null, accepted_count: 0, matches: [] }),
          );
      });
    });
    const first = api.reselect({ lambda: 0.1 });
    const second = api.reselect({ lambda: 0.2 });
    expect(seen[0].aborted).toBe(true);
    expect(seen[1].aborted).toBe(false);
    release!();
    await expect(first).rejects.toMatchObject({ name: "AbortError" });
    await expect(second).resolves.toMatchObject({ accepted_count: 0 });
  });

  it("builds image URLs against the base", () => {
    const api = new ApiClient("http://host:9");
    expect(api.imageUrl("query", 4)).toBe("http://host:9/api/image?traverse=query&index=4");
  });
});

describe("match strip", () => {
  const detail: MatchDetail = {
    query: 10,
    proposal: {
      query: 10,
      reference: 13,
      score: -4.2,
      strength: 9.1,
      uniqueness: 1.5,
      accepted: true,
    },
    trajectory: [
      { r: 12, q: 9, value: -1.0 },
      { r: 13, q: 10, value: -2.0 },
      { r: 14, q: 11, value: -1.2 },
    ],
    context: {
      query_indices: [8, 9, 10, 11, 12],
      reference_indices: [11, 12, 13, 14, 15],
    },
  };

  it("builds 2*context+1 aligned pairs for an accepted match", () => {
    const api = new ApiClient("");
    const strip = buildMatchStrip(detail, api);
    expect(strip.accepted).toBe(true);
    expect(strip.pairs.length).toBe(5);
    // aligned by the proposal offset (+3)
    expect(strip.pairs.map((p) => p.referenceIndex)).toEqual([11, 12, 13, 14, 15]);
    expect(strip.pairs[0].queryUrl).toContain("traverse=query&index=8");
  });

  it("marks rejected and missing proposals", () => {
    const api = new ApiClient("");
    const rejected = buildMatchStrip(
      { ...detail, proposal: { ...detail.proposal!, accepted: false } },
      api,
    );
    expect(rejected.accepted).toBe(false);
    const missing = buildMatchStrip(
      { ...detail, proposal: null, trajectory: [], context: { ...detail.context, reference_indices: [] } },
      api,
    );
    expect(missing.accepted).toBeNull();
    expect(missing.pairs.every((p) => p.referenceUrl === null)).toBe(true);
  });

  it("passes trajectory cells through untouched", () => {
    const api = new ApiClient("");
    const strip = buildMatchStrip(detail, api);
    expect(strip.trajectory).toEqual(detail.trajectory);
  });

  it("crops a margin window around the trajectory", () => {
    expect(trajectoryCropWindow(detail.trajectory, 60, 60, 2)).toEqual({
      r0: 10,
      r1: 17,
      q0: 7,
      q1: 14,
    });
    expect(trajectoryCropWindow([], 60, 60)).toBeNull();
  });
});
