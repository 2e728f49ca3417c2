import { ApiClient, StaleTokenError } from "./api.js";
import type { AnswerValue, Snapshot } from "./types.js";

export interface StoreState {
  snapshot: Snapshot | null;
  busy: boolean; // an answer request is in flight
  notice: string | null; // transient banner text (stale token, network loss)
  offline: boolean;
}

type Listener = (s: StoreState) => void;

const POLL_MS = 1000;

/**
 * Holds the latest session snapshot and serializes answer submissions.
 * Poll-based refresh: one human per session, a second of latency is fine.
 * At most one answer request is in flight; the query token makes
 * double-clicks and races against replenished queries harmless.
 */
export class SessionStore {
  private state: StoreState = { snapshot: null, busy: false, notice: null, offline: false };
  private listeners: Listener[] = [];
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private api: ApiClient,
    readonly sessionId: string,
  ) {}

  get current(): StoreState {
    return this.state;
  }

  subscribe(fn: Listener): () => void {
    this.listeners.push(fn);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== fn);
    };
  }

  private update(patch: Partial<StoreState>) {
    this.state = { ...this.state, ...patch };
    for (const fn of this.listeners) fn(this.state);
  }

  seed(snapshot: Snapshot) {
    this.update({ snapshot, offline: false });
  }

  async refresh(): Promise<void> {
    if (this.state.busy) return;
    try {
      const snapshot = await this.api.getSession(this.sessionId);
      this.update({ snapshot, offline: false });
    } catch {
      this.update({ offline: true });
    }
  }

  startPolling() {
    if (this.timer !== null) return;
    this.timer = setInterval(() => {
      void this.refresh();
    }, POLL_MS);
  }

  stopPolling() {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  async answer(value: AnswerValue): Promise<void> {
    const snap = this.state.snapshot;
    if (!snap || !snap.query || this.state.busy) return;
    this.update({ busy: true, notice: null });
    try {
      const next = await this.api.postAnswer(this.sessionId, value, snap.query.token);
      this.update({ snapshot: next, busy: false, offline: false });
    } catch (err) {
      if (err instanceof StaleTokenError) {
        this.update({
          snapshot: err.snapshot ?? this.state.snapshot,
          busy: false,
          notice: "query changed — reloaded",
        });
        if (!err.snapshot) void this.refresh();
      } else {
        this.update({ busy: false, offline: true });
      }
    }
  }
}
