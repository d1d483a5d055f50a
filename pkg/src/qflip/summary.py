"""Deterministic CSV/JSONL serialization shared by the CLI and the service.

Outputs carry no timestamps and format numbers with fixed rules, so a
re-run with the same config and seed is byte-identical.
"""
from __future__ import annotations

import json
import math
from typing import IO, Iterable, Optional

from .config import SessionConfig
from .engine import FlipRecord

SUMMARY_COLUMNS = (
    "phi_deg",
    "V",
    "eta",
    "profile",
    "n",
    "p0",
    "p1",
    "pstar",
    "cheat_success",
    "f_hat",
    "f_ci_lo",
    "f_ci_hi",
    "seed",
)


def _num(value: Optional[float], rate: bool = False) -> str:
    if value is None:
        return ""
    if rate:
        return f"{value:.6f}"
    return f"{value:.10g}"


def summary_row(config: SessionConfig, snapshot: dict) -> dict:
    """One summary row (plain values) for a finished or running session."""
    return {
        "phi_deg": math.degrees(config.phi),
        "V": config.visibility,
        "eta": config.eta,
        "profile": config.profile.label(),
        "n": snapshot["n"],
        "p0": snapshot["p0"],
        "p1": snapshot["p1"],
        "pstar": snapshot["pstar"],
        "cheat_success": snapshot["cheat_success"],
        "f_hat": snapshot["f_hat"],
        "f_ci_lo": snapshot["f_ci_lo"],
        "f_ci_hi": snapshot["f_ci_hi"],
        "seed": config.seed,
    }


def summary_csv_line(row: dict) -> str:
    """Format one row in SUMMARY_COLUMNS order (no trailing newline)."""
    parts = []
    for col in SUMMARY_COLUMNS:
        value = row[col]
        if col in ("profile",):
            parts.append(str(value))
        elif col in ("n", "seed"):
            parts.append(str(int(value)))
        elif col in ("phi_deg", "V", "eta"):
            parts.append(_num(value))
        else:
            parts.append(_num(value, rate=True))
    return ",".join(parts)


def write_summary_csv(out: IO[str], rows: Iterable[dict]) -> None:
    out.write(",".join(SUMMARY_COLUMNS) + "\n")
    for row in rows:
        out.write(summary_csv_line(row) + "\n")


def write_records_jsonl(out: IO[str], records: Iterable[FlipRecord]) -> None:
    for record in records:
        out.write(json.dumps(record.to_dict()) + "\n")
