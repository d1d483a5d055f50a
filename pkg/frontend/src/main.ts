// Browser wiring for the play console. All numbers on screen come from the
// latest service snapshot through format.ts; this file only moves state
// between the service, the reducer and the DOM.

import { SessionApi } from "./api.js";
import {
  formatCount,
  formatGauge,
  formatLamp,
  formatPercent,
  formatStakes,
} from "./format.js";
import { controlsEnabled, initialView, reduce, type Action, type TableView } from "./state.js";
import { subscribe, type StreamHandle } from "./stream.js";
import type { FlipRecord } from "./types.js";

const api = new SessionApi("");
let view: TableView = initialView();
let stream: StreamHandle | null = null;
let autoTimer: number | null = null;

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function dispatch(action: Action): void {
  view = reduce(view, action);
  render();
}

function describeOpponent(bob: string, hidden: boolean): string {
  return hidden ? "mystery opponent" : `opponent: ${bob}`;
}

async function createTable(): Promise<void> {
  const phi = el<HTMLSelectElement>("phi-preset").value;
  const choice = el<HTMLSelectElement>("opponent").value;
  const hidden = choice === "mystery";
  const bob = hidden ? (Math.random() < 0.5 ? "honest" : "cheating") : choice;
  const seed = Math.floor(Math.random() * 2 ** 31);
  try {
    const handle = await api.createSession({
      session: { phi_deg: phi, seed },
      profile: { alice: "honest", bob },
      stop: { policy: "fixed", count: 1_000_000 },
    });
    dispatch({
      kind: "table_created",
      sessionId: handle.session_id,
      configSummary: `${phi} states · ${describeOpponent(bob, hidden)} · seed ${seed}`,
      opponentHidden: hidden,
    });
    stream?.close();
    stream = subscribe(
      api.streamUrl(handle.session_id),
      (event) => dispatch({ kind: "event", event }),
      (detail) => dispatch({ kind: "connection_lost", detail }),
    );
  } catch (err) {
    dispatch({ kind: "connection_lost", detail: String(err) });
  }
}

async function flipOnce(): Promise<void> {
  if (!view.sessionId || !controlsEnabled(view)) return;
  dispatch({ kind: "flip_requested" });
  try {
    await api.flip(view.sessionId, 1);
    dispatch({ kind: "flip_settled" });
  } catch (err) {
    // never retried silently: surface and freeze
    dispatch({ kind: "connection_lost", detail: String(err) });
  }
}

async function stopTable(reason: "stopped" | "accused"): Promise<void> {
  if (!view.sessionId || view.phase !== "playing") return;
  try {
    const report = await api.stop(view.sessionId, reason);
    stream?.close();
    dispatch({ kind: "stopped", report });
  } catch (err) {
    dispatch({ kind: "connection_lost", detail: String(err) });
  }
}

function setAutoPlay(enabled: boolean): void {
  dispatch({ kind: "auto_play", enabled });
  if (autoTimer !== null) {
    window.clearInterval(autoTimer);
    autoTimer = null;
  }
  if (enabled) {
    autoTimer = window.setInterval(() => {
      if (view.autoPlay && controlsEnabled(view)) void flipOnce();
    }, 150);
  }
}

function flipRow(record: FlipRecord): string {
  const outcome = record.verdict === "accept" ? `c=${record.c}` : "mismatch";
  return `<tr class="${record.verdict}"><td>${outcome}</td><td>b=${record.b}</td>` +
    `<td>x=${record.reveal_x} a=${record.reveal_a}</td><td>${record.attempts}</td></tr>`;
}

function render(): void {
  el("config-summary").textContent = view.configSummary;
  el("banner").textContent = view.banner ?? "";
  el("banner").hidden = view.banner === null;

  const stats = view.stats;
  el("n").textContent = stats ? formatCount(stats.n) : "0";
  el("p0").textContent = stats ? formatPercent(stats.p0) : "—";
  el("p1").textContent = stats ? formatPercent(stats.p1) : "—";
  el("pstar").textContent = stats ? formatPercent(stats.pstar) : "—";
  el("stakes").textContent = stats
    ? formatStakes(Math.round(stats.p0 * stats.n), Math.round(stats.p1 * stats.n))
    : "0";
  el("gauge").textContent = stats ? formatGauge(stats.f_hat, stats.f_ci_lo, stats.f_ci_hi) : "—";
  const lamp = el("lamp");
  const decision = stats?.test.decision ?? "continue";
  lamp.textContent = formatLamp(decision);
  lamp.className = `lamp ${decision}`;

  el("flip-log").innerHTML = [...view.flipLog].reverse().map(flipRow).join("");

  const playing = controlsEnabled(view);
  el<HTMLButtonElement>("flip").disabled = !playing;
  el<HTMLButtonElement>("stop").disabled = view.phase !== "playing";
  el<HTMLButtonElement>("accuse").disabled = view.phase !== "playing";
  el<HTMLInputElement>("autoplay").disabled = view.phase !== "playing";
  el<HTMLInputElement>("autoplay").checked = view.autoPlay;

  const reportBox = el("report");
  reportBox.hidden = view.report === null;
  if (view.report) {
    const s = view.report.stats;
    el("report-reason").textContent = view.report.reason;
    el("report-config").textContent = view.report.config;
    el("report-stats").textContent =
      `${formatCount(s.n)} flips · P0 ${formatPercent(s.p0)} · P1 ${formatPercent(s.p1)} · ` +
      `P* ${formatPercent(s.pstar)} · cheat fraction ${formatGauge(s.f_hat, s.f_ci_lo, s.f_ci_hi)} · ` +
      `verdict ${formatLamp(s.test.decision)}`;
  }
}

export function boot(): void {
  el<HTMLButtonElement>("create").addEventListener("click", () => void createTable());
  el<HTMLButtonElement>("flip").addEventListener("click", () => void flipOnce());
  el<HTMLButtonElement>("stop").addEventListener("click", () => void stopTable("stopped"));
  el<HTMLButtonElement>("accuse").addEventListener("click", () => void stopTable("accused"));
  el<HTMLInputElement>("autoplay").addEventListener("change", (ev) =>
    setAutoPlay((ev.target as HTMLInputElement).checked),
  );
  render();
}

if (typeof document !== "undefined") {
  document.addEventListener("DOMContentLoaded", boot);
}
