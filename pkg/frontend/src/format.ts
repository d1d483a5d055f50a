// Display rounding. The console computes no statistics of its own: every
// number shown is a service value passed through exactly one of these.

export function formatPercent(value: number | null, decimals = 2): string {
  if (value === null || !Number.isFinite(value)) return "—";
  return `${(value * 100).toFixed(decimals)}%`;
}

export function formatCount(value: number): string {
  return value.toLocaleString("en-US");
}

export function formatFraction(value: number | null, decimals = 3): string {
  if (value === null || !Number.isFinite(value)) return "—";
  return value.toFixed(decimals);
}

export function formatGauge(
  f: number | null,
  lo: number | null,
  hi: number | null,
): string {
  if (f === null) return "—";
  return `${formatPercent(f, 1)} [${formatPercent(lo, 1)}, ${formatPercent(hi, 1)}]`;
}

export const LAMP_LABELS: Record<string, string> = {
  continue: "Continue",
  suspect_cheating: "SuspectCheating",
  looks_honest: "LooksHonest",
};

export function formatLamp(decision: string): string {
  return LAMP_LABELS[decision] ?? decision;
}

export function formatStakes(p0Wins: number, p1Wins: number): string {
  const net = p0Wins - p1Wins;
  return net > 0 ? `+${formatCount(net)}` : formatCount(net);
}
