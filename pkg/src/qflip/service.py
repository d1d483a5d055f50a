"""Local HTTP service exposing session lifecycle and live statistics.

Endpoints (JSON everywhere; config documents use the same shape as
``parse_config_dict``):

    POST /sessions                     create; body is a config document
    POST /sessions/{id}/flips?count=k  run k flips (default 1); body-free
    POST /sessions/{id}/stop           body {"reason": "..."}; idempotent
    GET  /sessions/{id}/stats          latest statistics snapshot
    GET  /sessions/{id}/stream         server-sent events; each event is
                                       {"record": ..., "stats": ...} for one
                                       flip, replayed from the start of the
                                       session and then followed live

Human-paced play and batch runs share one code path (a batch is just
repeated single flips on the same runner), so the numbers a UI shows are
the numbers a headless run would produce.  On stop, a final report is
written to the report directory as JSON, with the CSV summary row
embedded; nothing persists beyond the process otherwise.
"""
from __future__ import annotations

import json
import threading
import uuid
from pathlib import Path
from typing import Iterator, Optional

from fastapi import FastAPI, HTTPException, Query, Request
from fastapi.responses import JSONResponse, StreamingResponse

from .config import ConfigError, parse_config_dict
from .engine import SessionRunner
from .summary import summary_csv_line, summary_row

MAX_BATCH = 1_000_000


class Session:
    """One live session: a runner, its event log, and subscriber wakeups."""

    def __init__(self, session_id: str, runner: SessionRunner):
        self.id = session_id
        self.runner = runner
        self.lock = threading.Lock()
        self.events: list[dict] = []  # one {"record", "stats"} dict per flip
        self.new_event = threading.Condition(self.lock)
        self.stopped = False
        self.final_report: Optional[dict] = None

    def flip_batch(self, count: int, include_records: bool) -> dict:
        with self.lock:
            if self.stopped:
                raise HTTPException(status_code=409, detail="session closed")
            if self.runner.should_stop() is not None:
                raise HTTPException(status_code=409, detail="session complete per stop policy")
            records = []
            for _ in range(count):
                record = self.runner.flip()
                event = {"record": record.to_dict(), "stats": self.runner.stats_snapshot()}
                self.events.append(event)
                if include_records:
                    records.append(event["record"])
                if self.runner.should_stop() is not None:
                    break
            self.new_event.notify_all()
            return {"records": records, "stats": self.runner.stats_snapshot()}

    def stop(self, reason: str, report_dir: Optional[Path]) -> dict:
        with self.lock:
            if self.stopped:
                return self.final_report
            self.stopped = True
            snapshot = self.runner.stats_snapshot()
            self.final_report = {
                "session_id": self.id,
                "reason": reason,
                "config": self.runner.config.canonical_text(),
                "stats": snapshot,
                "csv_row": summary_csv_line(summary_row(self.runner.config, snapshot)),
            }
            self.new_event.notify_all()
            if report_dir is not None:
                report_dir.mkdir(parents=True, exist_ok=True)
                path = report_dir / f"session-{self.id}.json"
                path.write_text(json.dumps(self.final_report, indent=2) + "\n")
            return self.final_report

    def stream_events(self) -> Iterator[str]:
        """Replay every event from the start, then follow until stopped."""
        index = 0
        while True:
            with self.lock:
                while index >= len(self.events) and not self.stopped:
                    self.new_event.wait(timeout=0.5)
                if index >= len(self.events):
                    if self.stopped:
                        return
                    continue
                event = self.events[index]
            index += 1
            yield f"data: {json.dumps(event)}\n\n"


def create_app(report_dir: Optional[Path] = None, ui_dir: Optional[Path] = None) -> FastAPI:
    app = FastAPI(title="qflip sessions")
    sessions: dict[str, Session] = {}
    registry_lock = threading.Lock()

    def get_session(session_id: str) -> Session:
        with registry_lock:
            session = sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail="unknown session")
        return session

    @app.exception_handler(ConfigError)
    async def config_error(request: Request, exc: ConfigError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.post("/sessions")
    async def create_session(document: dict):
        config = parse_config_dict(document)
        session = Session(uuid.uuid4().hex[:12], SessionRunner(config))
        with registry_lock:
            sessions[session.id] = session
        return {"session_id": session.id, "config": config.canonical_text()}

    @app.post("/sessions/{session_id}/flips")
    def flips(
        session_id: str,
        count: int = Query(default=1, ge=1, le=MAX_BATCH),
        records: str = Query(default="full", pattern="^(full|none)$"),
    ):
        return get_session(session_id).flip_batch(count, include_records=records == "full")

    @app.post("/sessions/{session_id}/stop")
    async def stop(session_id: str, body: Optional[dict] = None):
        reason = str((body or {}).get("reason", "stopped"))
        return get_session(session_id).stop(reason, report_dir)

    @app.get("/sessions/{session_id}/stats")
    async def stats(session_id: str):
        session = get_session(session_id)
        with session.lock:
            return session.runner.stats_snapshot()

    @app.get("/sessions/{session_id}/stream")
    def stream(session_id: str):
        session = get_session(session_id)
        return StreamingResponse(session.stream_events(), media_type="text/event-stream")

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
