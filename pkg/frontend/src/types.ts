// Shapes mirrored from the sessions service (field names match its JSON).

export interface FlipRecord {
  attempts: number;
  alice_x: number | null;
  alice_a: number | null;
  alice_r: number | null;
  bob_y: number | null;
  bob_basis: number;
  bob_outcome: number;
  b: number;
  reveal_x: number;
  reveal_a: number;
  verdict: "accept" | "mismatch";
  c: number | null;
  desired_c: number | null;
}

export interface TestState {
  kind: "none" | "threshold" | "sprt";
  n: number;
  k: number;
  decision: "continue" | "suspect_cheating" | "looks_honest";
}

export interface SessionStats {
  n: number;
  p0: number;
  p1: number;
  pstar: number;
  cheat_success: number | null;
  f_hat: number | null;
  f_ci_lo: number | null;
  f_ci_hi: number | null;
  test: TestState;
}

export interface StreamEvent {
  record: FlipRecord;
  stats: SessionStats;
}

export interface FinalReport {
  session_id: string;
  reason: string;
  config: string;
  stats: SessionStats;
  csv_row: string;
}

export interface SessionHandle {
  session_id: string;
  config: string;
}
