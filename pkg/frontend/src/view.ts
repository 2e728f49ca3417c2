import type { HistoryRecord, ProblemInfo, Snapshot } from "./types.js";

// Rendering rule: the UI does no diagnosis math. Every number shown below is
// the String() of a value taken verbatim from a service snapshot; bar widths
// are presentation only.

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  cls?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function diagnosisChips(comps: string[]): HTMLElement {
  const wrap = el("span", "chips");
  for (const c of comps) wrap.appendChild(el("span", "chip", c));
  if (comps.length === 0) wrap.appendChild(el("span", "chip chip-empty", "(no fault)"));
  return wrap;
}

export function diagnosisRow(comps: string[], posterior: number): HTMLElement {
  const row = el("div", "diag-row");
  row.appendChild(diagnosisChips(comps));
  const bar = el("div", "bar");
  const fill = el("div", "bar-fill");
  fill.style.width = `${Math.min(100, posterior * 100)}%`;
  bar.appendChild(fill);
  row.appendChild(bar);
  row.appendChild(el("span", "posterior", String(posterior)));
  return row;
}

export function queryCard(
  snap: Snapshot,
  onAnswer: (v: true | false | "skip") => void,
  busy: boolean,
): HTMLElement {
  const card = el("div", "card query-card");
  const q = snap.query;
  if (!q) return card;
  card.appendChild(el("h2", "query-title", `measure wire ${q.wire} — is it 1?`));
  const sizes = q.partition_sizes;
  const parts = el("div", "partitions");
  parts.appendChild(el("span", "part part-plus", `D+ ${String(sizes.dplus)}`));
  parts.appendChild(el("span", "part part-minus", `D− ${String(sizes.dminus)}`));
  parts.appendChild(el("span", "part part-zero", `D0 ${String(sizes.dzero)}`));
  card.appendChild(parts);

  const scores = el("dl", "scores");
  for (const [name, value] of Object.entries(q.scores)) {
    scores.appendChild(el("dt", undefined, name));
    scores.appendChild(el("dd", undefined, value === null ? "—" : String(value)));
  }
  card.appendChild(scores);

  const buttons = el("div", "answers");
  const mk = (label: string, value: true | false | "skip", cls: string) => {
    const b = el("button", `answer ${cls}`, label);
    b.disabled = busy;
    b.addEventListener("click", () => onAnswer(value));
    buttons.appendChild(b);
  };
  mk("Yes", true, "answer-yes");
  mk("No", false, "answer-no");
  mk("Can't tell", "skip", "answer-skip");
  card.appendChild(buttons);
  return card;
}

export function leadingList(snap: Snapshot): HTMLElement {
  const box = el("div", "card leading");
  box.appendChild(el("h3", undefined, `leading diagnoses (${String(snap.remaining.length)})`));
  snap.remaining.forEach((comps, i) => {
    box.appendChild(diagnosisRow(comps, snap.posteriors[i]));
  });
  return box;
}

export function historyTimeline(history: HistoryRecord[]): HTMLElement {
  const box = el("div", "card history");
  box.appendChild(el("h3", undefined, "history"));
  const list = el("ol", "timeline");
  for (const rec of history) {
    const item = el("li", `hist hist-${rec.answer}`);
    item.appendChild(el("span", "hist-query", rec.query));
    item.appendChild(el("span", "hist-answer", rec.answer));
    item.appendChild(
      el("span", "hist-elim", `eliminated ${String(rec.eliminated.length)}`),
    );
    list.appendChild(item);
  }
  box.appendChild(list);
  return box;
}

export function stopBanner(snap: Snapshot, transcriptHref: string | null): HTMLElement {
  const banner = el("div", "card stop-banner");
  banner.appendChild(el("h2", undefined, "diagnosis complete"));
  if (snap.stop_reason) banner.appendChild(el("p", "stop-reason", snap.stop_reason));
  const finals = snap.final_diagnoses ?? [];
  for (const comps of finals) {
    const row = el("div", "final-diagnosis");
    row.appendChild(diagnosisChips(comps));
    banner.appendChild(row);
  }
  if (transcriptHref) {
    const a = el("a", "transcript-link", "download transcript");
    a.setAttribute("href", transcriptHref);
    a.setAttribute("download", `session-${snap.session_id}.jsonl`);
    banner.appendChild(a);
  }
  return banner;
}

export function transcriptJsonl(history: HistoryRecord[]): string {
  return history.map((r) => JSON.stringify(r)).join("\n") + (history.length ? "\n" : "");
}

export function sessionScreen(
  snap: Snapshot,
  busy: boolean,
  notice: string | null,
  offline: boolean,
  onAnswer: (v: true | false | "skip") => void,
): HTMLElement {
  const root = el("div", "session-screen");
  root.dataset.sessionId = snap.session_id;
  const header = el("div", "session-header");
  header.appendChild(el("span", "mode-badge", snap.mode));
  if (snap.mode === "static") {
    header.appendChild(el("span", "mode-note", "constraining initial solution space"));
  }
  header.appendChild(el("span", "heuristic-badge", snap.heuristic));
  header.appendChild(el("span", "step-badge", `step ${String(snap.step)}`));
  root.appendChild(header);
  if (offline) root.appendChild(el("div", "banner banner-offline", "connection lost — retrying"));
  if (notice) root.appendChild(el("div", "banner banner-notice", notice));
  if (snap.stopped) {
    let href: string | null = null;
    try {
      const blob = new Blob([transcriptJsonl(snap.history)], { type: "application/jsonl" });
      href = URL.createObjectURL(blob);
    } catch {
      href = null; // environment without object URLs
    }
    root.appendChild(stopBanner(snap, href));
  } else {
    root.appendChild(queryCard(snap, onAnswer, busy));
  }
  root.appendChild(leadingList(snap));
  root.appendChild(historyTimeline(snap.history));
  return root;
}

export interface PickerValues {
  problem_id: string;
  heuristic: string;
  mode: "dynamic" | "static";
  k: number;
  sigma: number;
}

export function problemPicker(
  problems: ProblemInfo[],
  onStart: (v: PickerValues) => void,
): HTMLElement {
  const form = el("form", "picker");
  form.appendChild(el("h2", undefined, "start a diagnosis session"));

  const problemSel = el("select", "pick-problem");
  for (const p of problems) {
    const opt = el("option", undefined, `${p.id} (${String(p.components.length)} components)`);
    opt.setAttribute("value", p.id);
    problemSel.appendChild(opt);
  }
  const heuristicSel = el("select", "pick-heuristic");
  for (const h of ["ENT", "SPL", "MPS", "BME", "EMCb", "RND"]) {
    const opt = el("option", undefined, h);
    opt.setAttribute("value", h);
    heuristicSel.appendChild(opt);
  }
  const modeSel = el("select", "pick-mode");
  for (const m of ["dynamic", "static"]) {
    const opt = el("option", undefined, m);
    opt.setAttribute("value", m);
    modeSel.appendChild(opt);
  }
  const kInput = el("input", "pick-k") as HTMLInputElement;
  kInput.value = "9";
  const sigmaInput = el("input", "pick-sigma") as HTMLInputElement;
  sigmaInput.value = "1.0";
  const error = el("div", "picker-error");
  const submit = el("button", "pick-start", "start session");
  submit.setAttribute("type", "submit");

  const label = (text: string, node: HTMLElement) => {
    const l = el("label", undefined, text);
    l.appendChild(node);
    form.appendChild(l);
  };
  label("problem", problemSel);
  label("heuristic", heuristicSel);
  label("mode", modeSel);
  label("leading diagnoses k", kInput);
  label("stop threshold σ", sigmaInput);
  form.appendChild(error);
  form.appendChild(submit);

  form.addEventListener("submit", (ev) => {
    ev.preventDefault();
    const k = Number(kInput.value);
    const sigma = Number(sigmaInput.value);
    if (!Number.isInteger(k) || k < 1) {
      error.textContent = "k must be a positive integer";
      return;
    }
    if (!(sigma > 0 && sigma <= 1)) {
      error.textContent = "σ must be in (0, 1]";
      return;
    }
    error.textContent = "";
    onStart({
      problem_id: problemSel.value,
      heuristic: heuristicSel.value,
      mode: modeSel.value as "dynamic" | "static",
      k,
      sigma,
    });
  });
  return form;
}
