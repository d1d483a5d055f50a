import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { FinalReport, StreamEvent } from "../src/types.js";

const here = dirname(fileURLToPath(import.meta.url));

export function loadEvents(): StreamEvent[] {
  const text = readFileSync(join(here, "fixtures", "events.jsonl"), "utf-8");
  return text
    .split("\n")
    .filter((line) => line.trim() !== "")
    .map((line) => JSON.parse(line) as StreamEvent);
}

export function loadReport(): FinalReport {
  return JSON.parse(readFileSync(join(here, "fixtures", "report.json"), "utf-8"));
}

export interface SummaryRow {
  [column: string]: string;
}

export function loadSummaryRow(): SummaryRow {
  const [header, row] = readFileSync(join(here, "fixtures", "summary.csv"), "utf-8")
    .trim()
    .split("\n");
  const columns = header.split(",");
  const cells = row.split(",");
  const out: SummaryRow = {};
  columns.forEach((name, i) => (out[name] = cells[i]));
  return out;
}
