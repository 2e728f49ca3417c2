import { ApiClient, ApiError } from "./api.js";
import { SessionStore } from "./store.js";
import { problemPicker, sessionScreen } from "./view.js";

/** Wire the picker and session screens into #app against the live service. */
export async function boot(root: HTMLElement, api: ApiClient = new ApiClient()) {
  root.textContent = "";
  let problems;
  try {
    problems = await api.listProblems();
  } catch {
    root.appendChild(offlineSplash());
    return;
  }

  const picker = problemPicker(problems, async (values) => {
    const errorBox = picker.querySelector(".picker-error") as HTMLElement;
    try {
      const created = await api.createSession({
        ...values,
        sampler: "best_first",
        seed: 0,
      });
      const store = new SessionStore(api, created.session_id);
      store.seed(created.state);
      mountSession(root, store);
    } catch (err) {
      errorBox.textContent = err instanceof ApiError ? err.message : "could not start session";
    }
  });
  root.appendChild(picker);
}

export function mountSession(root: HTMLElement, store: SessionStore) {
  root.textContent = "";
  const container = document.createElement("div");
  root.appendChild(container);

  const render = () => {
    const { snapshot, busy, notice, offline } = store.current;
    container.textContent = "";
    if (!snapshot) return;
    container.appendChild(
      sessionScreen(snapshot, busy, notice, offline, (v) => void store.answer(v)),
    );
    if (snapshot.stopped) store.stopPolling();
  };

  store.subscribe(render);
  render();
  store.startPolling();
}

function offlineSplash(): HTMLElement {
  const div = document.createElement("div");
  div.className = "banner banner-offline";
  div.textContent = "service unreachable — is `faultscope serve` running?";
  return div;
}

declare global {
  interface Window {
    faultscopeBoot?: typeof boot;
  }
}

if (typeof window !== "undefined") {
  window.faultscopeBoot = boot;
  const app = typeof document !== "undefined" ? document.getElementById("app") : null;
  if (app && !app.dataset.manualBoot) {
    void boot(app);
  }
}
