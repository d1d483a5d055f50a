// Table state is a pure function of the received stream events plus the
// pending-command flags; reducers never compute statistics, they only keep
// the latest service snapshot and a short flip log.

import type { FinalReport, FlipRecord, SessionStats, StreamEvent } from "./types.js";

export const FLIP_LOG_LENGTH = 12;

export type Phase = "idle" | "playing" | "stopped" | "disconnected";

export interface TableView {
  phase: Phase;
  sessionId: string | null;
  configSummary: string;
  opponentHidden: boolean;
  flipLog: FlipRecord[];
  stats: SessionStats | null;
  report: FinalReport | null;
  pendingFlip: boolean;
  autoPlay: boolean;
  banner: string | null;
}

export function initialView(): TableView {
  return {
    phase: "idle",
    sessionId: null,
    configSummary: "",
    opponentHidden: false,
    flipLog: [],
    stats: null,
    report: null,
    pendingFlip: false,
    autoPlay: false,
    banner: null,
  };
}

export type Action =
  | { kind: "table_created"; sessionId: string; configSummary: string; opponentHidden: boolean }
  | { kind: "event"; event: StreamEvent }
  | { kind: "flip_requested" }
  | { kind: "flip_settled" }
  | { kind: "auto_play"; enabled: boolean }
  | { kind: "stopped"; report: FinalReport }
  | { kind: "connection_lost"; detail: string };

export function reduce(view: TableView, action: Action): TableView {
  switch (action.kind) {
    case "table_created":
      return {
        ...initialView(),
        phase: "playing",
        sessionId: action.sessionId,
        configSummary: action.configSummary,
        opponentHidden: action.opponentHidden,
      };
    case "event": {
      if (view.phase !== "playing") return view;
      const flipLog = [...view.flipLog, action.event.record].slice(-FLIP_LOG_LENGTH);
      return { ...view, flipLog, stats: action.event.stats };
    }
    case "flip_requested":
      return { ...view, pendingFlip: true };
    case "flip_settled":
      return { ...view, pendingFlip: false };
    case "auto_play":
      return { ...view, autoPlay: action.enabled && view.phase === "playing" };
    case "stopped":
      return {
        ...view,
        phase: "stopped",
        autoPlay: false,
        pendingFlip: false,
        report: action.report,
        stats: action.report.stats,
      };
    case "connection_lost":
      // freeze the table; commands must not be retried silently
      return { ...view, phase: "disconnected", autoPlay: false, banner: action.detail };
  }
}

export function controlsEnabled(view: TableView): boolean {
  return view.phase === "playing" && !view.pendingFlip;
}

export function replay(events: StreamEvent[], base?: TableView): TableView {
  let view =
    base ??
    reduce(initialView(), {
      kind: "table_created",
      sessionId: "replay",
      configSummary: "",
      opponentHidden: false,
    });
  for (const event of events) {
    view = reduce(view, { kind: "event", event });
  }
  return view;
}
