// @vitest-environment jsdom
import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import step0 from "./fixtures/snapshot-step0.json";
import step1 from "./fixtures/snapshot-step1.json";
import { ApiClient } from "../src/api.js";
import { SessionStore } from "../src/store.js";
import type { Snapshot } from "../src/types.js";

const snap0 = step0 as unknown as Snapshot;
const snap1 = step1 as unknown as Snapshot;

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

describe("SessionStore", () => {
  beforeEach(() => {
    vi.useFakeTimers();
  });
  afterEach(() => {
    vi.restoreAllMocks();
    vi.useRealTimers();
  });

  it("answer posts the current token and adopts the new snapshot", async () => {
    const calls: { url: string; body: string }[] = [];
    vi.stubGlobal(
      "fetch",
      vi.fn(async (url: string, init?: RequestInit) => {
        calls.push({ url: String(url), body: String(init?.body ?? "") });
        return jsonResponse(snap1);
      }),
    );
    const store = new SessionStore(new ApiClient(), "fixture");
    store.seed(snap0);
    await store.answer(true);
    expect(calls[0].url).toBe("/api/sessions/fixture/answer");
    expect(JSON.parse(calls[0].body)).toEqual({ value: true, token: snap0.query!.token });
    expect(store.current.snapshot).toEqual(snap1);
    expect(store.current.busy).toBe(false);
  });

  it("only one answer request can be in flight", async () => {
    let resolves: ((r: Response) => void)[] = [];
    vi.stubGlobal(
      "fetch",
      vi.fn(
        () =>
          new Promise<Response>((resolve) => {
            resolves.push(resolve);
          }),
      ),
    );
    const store = new SessionStore(new ApiClient(), "fixture");
    store.seed(snap0);
    const first = store.answer(true);
    void store.answer(false); // double-click: dropped while busy
    expect(resolves.length).toBe(1);
    resolves[0](jsonResponse(snap1));
    await first;
    expect(resolves.length).toBe(1);
  });

  it("stale token surfaces a notice and the fresh state", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => jsonResponse({ detail: "stale query token", state: snap1 }, 409)),
    );
    const store = new SessionStore(new ApiClient(), "fixture");
    store.seed(snap0);
    await store.answer(true);
    expect(store.current.notice).toBe("query changed — reloaded");
    expect(store.current.snapshot).toEqual(snap1);
  });

  it("network failure flips the offline flag; refresh clears it", async () => {
    const fetchMock = vi.fn(async () => {
      throw new TypeError("network down");
    });
    vi.stubGlobal("fetch", fetchMock);
    const store = new SessionStore(new ApiClient(), "fixture");
    store.seed(snap0);
    await store.answer(true);
    expect(store.current.offline).toBe(true);
    fetchMock.mockImplementation(async () => jsonResponse(snap0));
    await store.refresh();
    expect(store.current.offline).toBe(false);
  });

  it("polling refreshes on the interval but not while busy", async () => {
    const fetchMock = vi.fn(async () => jsonResponse(snap0));
    vi.stubGlobal("fetch", fetchMock);
    const store = new SessionStore(new ApiClient(), "fixture");
    store.seed(snap0);
    store.startPolling();
    await vi.advanceTimersByTimeAsync(2100);
    expect(fetchMock.mock.calls.length).toBe(2);
    store.stopPolling();
    await vi.advanceTimersByTimeAsync(3000);
    expect(fetchMock.mock.calls.length).toBe(2);
  });

  it("notifies subscribers on every update", async () => {
    vi.stubGlobal("fetch", vi.fn(async () => jsonResponse(snap1)));
    const store = new SessionStore(new ApiClient(), "fixture");
    const seen: boolean[] = [];
    store.subscribe((s) => seen.push(s.busy));
    store.seed(snap0);
    await store.answer(true);
    // seed, busy-on, busy-off
    expect(seen).toEqual([false, true, false]);
  });
});
