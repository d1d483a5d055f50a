#!/usr/bin/env python3
"""Record a scripted service session as fixtures for the browser console tests.

Produces, under frontend/tests/fixtures/:

  events.jsonl   every server-sent event of a 1000-flip session (one
                 {"record", "stats"} JSON document per line)
  report.json    the final report returned by the stop endpoint
  summary.csv    header plus the session's CSV summary row

The session is fully scripted (fair states, secretly cheating opponent,
fixed seed), so the fixtures are reproducible byte for byte and the UI
tests can assert display fidelity against them.
"""
import json
import sys
from pathlib import Path

from qflip.engine import SessionRunner
from qflip.config import parse_config_dict
from qflip.service import Session
from qflip.summary import SUMMARY_COLUMNS

FIXTURE_CONFIG = {
    "session": {"phi_deg": "fair", "seed": 20101, "visibility": 1.0},
    "profile": {"alice": "honest", "bob": "cheating"},
    "stop": {"policy": "fixed", "count": 5000},
}
FLIPS = 1000


def run(out_dir: Path) -> int:
    out_dir.mkdir(parents=True, exist_ok=True)
    config = parse_config_dict(FIXTURE_CONFIG)
    session = Session("fixture00000", SessionRunner(config))
    session.flip_batch(FLIPS, include_records=False)
    report = session.stop("accused", report_dir=None)

    with open(out_dir / "events.jsonl", "w") as out:
        for event in session.events:
            out.write(json.dumps(event) + "\n")
    (out_dir / "report.json").write_text(json.dumps(report, indent=2) + "\n")
    (out_dir / "summary.csv").write_text(
        ",".join(SUMMARY_COLUMNS) + "\n" + report["csv_row"] + "\n"
    )
    print(f"wrote {FLIPS} events + report + summary under {out_dir}")
    return 0


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("frontend/tests/fixtures")
    sys.exit(run(target))
