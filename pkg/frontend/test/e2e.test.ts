// @vitest-environment jsdom
//
// End-to-end: boots the real UI against a live `faultscope serve` process,
// walks the full-adder session by clicking Yes twice, and checks that the
// final-diagnosis card names X2 and O1 with posteriors shown byte-for-byte
// as the service reports them.
import { type ChildProcess, spawn } from "node:child_process";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { boot } from "../src/main.js";

const PORT = 8700 + (process.pid % 200);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess | null = null;

async function until<T>(fn: () => T | null | undefined, ms = 15000, what = "condition"): Promise<T> {
  const deadline = Date.now() + ms;
  for (;;) {
    const v = fn();
    if (v) return v;
    if (Date.now() > deadline) throw new Error(`timed out waiting for ${what}`);
    await new Promise((r) => setTimeout(r, 50));
  }
}

async function serviceReady(): Promise<void> {
  const deadline = Date.now() + 30000;
  for (;;) {
    try {
      const res = await fetch(`${BASE}/api/problems`);
      if (res.ok) return;
    } catch {
      /* not up yet */
    }
    if (Date.now() > deadline) throw new Error("service did not come up");
    await new Promise((r) => setTimeout(r, 200));
  }
}

beforeAll(async () => {
  server = spawn("faultscope", ["serve", "--port", String(PORT)], {
    stdio: ["ignore", "ignore", "pipe"],
  });
  await serviceReady();
}, 40000);

afterAll(() => {
  server?.kill();
});

describe("full-adder session end to end", () => {
  it("clicking Yes twice reaches the [X2,O1] card with verbatim posteriors", async () => {
    const api = new ApiClient(BASE);
    document.body.innerHTML = '<main id="app" data-manual-boot="1"></main>';
    const app = document.getElementById("app")!;
    await boot(app, api);

    // pick fulladder + ENT + dynamic, σ=1.0, and start
    const form = await until(() => app.querySelector("form.picker"), 5000, "picker");
    (form.querySelector(".pick-sigma") as HTMLInputElement).value = "1.0";
    form.dispatchEvent(new Event("submit", { bubbles: true, cancelable: true }));

    await until(() => app.querySelector(".session-screen"), 10000, "session screen");
    expect(app.querySelectorAll(".leading .diag-row").length).toBe(3);

    for (let step = 0; step < 2; step++) {
      const yes = await until(
        () => app.querySelector(".answer-yes") as HTMLButtonElement | null,
        10000,
        `query ${step}`,
      );
      yes.click();
      await until(
        () => (app.querySelector(".step-badge")?.textContent === `step ${step + 1}` ? true : null),
        10000,
        `step ${step + 1}`,
      );
    }

    const banner = await until(() => app.querySelector(".stop-banner"), 10000, "stop banner");
    const chips = Array.from(banner.querySelectorAll(".final-diagnosis .chip")).map(
      (c) => c.textContent,
    );
    expect(chips.sort()).toEqual(["O1", "X2"]);

    // every displayed posterior equals the service's value byte-for-byte
    const shown = Array.from(app.querySelectorAll(".posterior")).map((n) => n.textContent);
    const screen = app.querySelector(".session-screen") as HTMLElement;
    const sid = screen.dataset.sessionId!;
    const snap = await api.getSession(sid);
    expect(snap.stopped).toBe(true);
    expect(snap.final_diagnoses).toEqual([["O1", "X2"]]);
    expect(shown).toEqual(snap.posteriors.map((p) => String(p)));

    // history shown in transcript order
    const queries = Array.from(app.querySelectorAll(".hist-query")).map((n) => n.textContent);
    expect(queries).toEqual(snap.history.map((h) => h.query));
  }, 60000);

  it("skip keeps the diagnosis set and advances to the next-best query", async () => {
    const api = new ApiClient(BASE);
    const created = await api.createSession({
      problem_id: "fulladder",
      heuristic: "ENT",
      mode: "dynamic",
      k: 6,
      sigma: 1.0,
      sampler: "best_first",
      seed: 0,
    });
    const first = created.state.query!.prop;
    const next = await api.postAnswer(created.session_id, "skip", created.state.query!.token);
    expect(next.remaining.length).toBe(created.state.remaining.length);
    expect(next.query!.prop).not.toBe(first);
    await api.deleteSession(created.session_id);
  });

  it("opening a stopped session gives a read-only transcript view", async () => {
    const api = new ApiClient(BASE);
    const created = await api.createSession({
      problem_id: "fulladder",
      heuristic: "ENT",
      mode: "dynamic",
      k: 6,
      sigma: 1.0,
      sampler: "best_first",
      seed: 0,
    });
    let snap = created.state;
    while (!snap.stopped) {
      snap = await api.postAnswer(created.session_id, true, snap.query!.token);
    }
    // remount fresh from the service: no query card, full history
    const { SessionStore } = await import("../src/store.js");
    const { mountSession } = await import("../src/main.js");
    document.body.innerHTML = '<main id="app"></main>';
    const store = new SessionStore(api, created.session_id);
    await store.refresh();
    mountSession(document.getElementById("app")!, store);
    const app = document.getElementById("app")!;
    expect(app.querySelector(".query-card")).toBeNull();
    expect(app.querySelector(".stop-banner")).not.toBeNull();
    expect(app.querySelectorAll(".hist").length).toBe(snap.history.length);
  }, 30000);
});
