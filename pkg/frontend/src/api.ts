import type { AnswerValue, ProblemInfo, SessionOptions, Snapshot } from "./types.js";

export class StaleTokenError extends Error {
  snapshot: Snapshot | null;
  constructor(snapshot: Snapshot | null) {
    super("query changed while answering");
    this.snapshot = snapshot;
  }
}

export class ApiError extends Error {
  status: number;
  constructor(status: number, detail: string) {
    super(detail);
    this.status = status;
  }
}

async function fail(res: Response): Promise<never> {
  let detail = res.statusText;
  try {
    const body = await res.json();
    if (body && body.detail) detail = JSON.stringify(body.detail);
  } catch {
    /* non-JSON error body */
  }
  throw new ApiError(res.status, detail);
}

export class ApiClient {
  constructor(private base: string = "") {}

  async listProblems(): Promise<ProblemInfo[]> {
    const res = await fetch(`${this.base}/api/problems`);
    if (!res.ok) return fail(res);
    return res.json();
  }

  async createSession(opts: SessionOptions): Promise<{ session_id: string; state: Snapshot }> {
    const res = await fetch(`${this.base}/api/sessions`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(opts),
    });
    if (!res.ok) return fail(res);
    return res.json();
  }

  async getSession(id: string): Promise<Snapshot> {
    const res = await fetch(`${this.base}/api/sessions/${id}`);
    if (!res.ok) return fail(res);
    return res.json();
  }

  async postAnswer(id: string, value: AnswerValue, token: string): Promise<Snapshot> {
    const res = await fetch(`${this.base}/api/sessions/${id}/answer`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ value, token }),
    });
    if (res.status === 409) {
      // stale token: the query changed under us; surface the fresh state
      let snap: Snapshot | null = null;
      try {
        const body = await res.json();
        snap = body.state ?? null;
      } catch {
        /* keep null */
      }
      throw new StaleTokenError(snap);
    }
    if (!res.ok) return fail(res);
    return res.json();
  }

  async deleteSession(id: string): Promise<void> {
    const res = await fetch(`${this.base}/api/sessions/${id}`, { method: "DELETE" });
    if (!res.ok && res.status !== 404) return fail(res);
  }
}
