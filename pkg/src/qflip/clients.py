"""Role clients: play one side of a networked session against a referee.

Each client runs exactly the same strategy objects as the in-process
engine, drawing from the same named random stream, so a networked session
consumes randomness identically to a local one.  The only difference is
the transit handle: measurements travel as MEASURE/DETECT frames instead
of touching a photon list.

Clients track the statistics visible from their side of the table (every
verdict is relayed to both parties, so n / p0 / p1 / pstar agree with the
referee's transcript; a cheating client also knows its own success rate).
"""
from __future__ import annotations

import socket
from dataclasses import dataclass
from typing import Optional

from .config import FixedCount, SessionConfig
from .engine import SessionStats, VERDICT_ACCEPT, VERDICT_MISMATCH
from .rng import stream
from .strategies import build_alice, build_bob
from .wire import (
    BBit,
    Conn,
    Detect,
    ErrorMsg,
    Hello,
    Lost,
    Measure,
    Prepare,
    PROTOCOL_VERSION,
    RevealMsg,
    ROLE_ALICE,
    ROLE_BOB,
    VERDICT_MISMATCH_CODE,
    VerdictMsg,
)


class SessionAborted(Exception):
    """The referee or peer ended the session abnormally (ERROR frame)."""


@dataclass
class ClientResult:
    config: SessionConfig
    flips: int
    stats: SessionStats
    stop_reason: str


def _update(stats: SessionStats, verdict: str, c: Optional[int], desired: Optional[int]) -> None:
    stats.n += 1
    if verdict == VERDICT_MISMATCH:
        stats.n_star += 1
    elif c == 0:
        stats.n0 += 1
    else:
        stats.n1 += 1
    if desired is not None:
        stats.n_desired += 1
        if verdict == VERDICT_ACCEPT and c == desired:
            stats.n_success += 1


def _fixed_count(config: SessionConfig) -> Optional[int]:
    return config.stop.count if isinstance(config.stop, FixedCount) else None


def _recv_or_raise(conn: Conn):
    msg = conn.recv()
    if isinstance(msg, ErrorMsg):
        raise SessionAborted(msg.reason)
    return msg


def play_alice(conn: Conn, config: SessionConfig) -> ClientResult:
    """Play the sender role until the session's stop policy ends it."""
    conn.send(Hello(PROTOCOL_VERSION, ROLE_ALICE, config.canonical_text()))
    strategy = build_alice(config.profile, config.state_set())
    rng = stream(config.seed, "alice")
    stats = SessionStats()
    target = _fixed_count(config)
    reason = "fixed_count"
    while target is None or stats.n < target:
        try:
            commit = strategy.prepare(rng)
            conn.send(Prepare(commit.angle.theta))
            msg = _recv_or_raise(conn)
        except (ConnectionError, OSError):
            reason = "referee_closed"  # stop policies other than a fixed
            break  # count end in a close at an instance boundary
        while isinstance(msg, Lost):
            commit = strategy.prepare(rng)
            conn.send(Prepare(commit.angle.theta))
            msg = _recv_or_raise(conn)
        if not isinstance(msg, BBit):
            raise SessionAborted(f"unexpected {type(msg).__name__} while awaiting b")
        rev = strategy.reveal(commit, msg.b, rng)
        conn.send(RevealMsg(rev.x, rev.a))
        verdict = _recv_or_raise(conn)
        if not isinstance(verdict, VerdictMsg):
            raise SessionAborted(f"unexpected {type(verdict).__name__} while awaiting verdict")
        if verdict.code == VERDICT_MISMATCH_CODE:
            _update(stats, VERDICT_MISMATCH, None, rev.desired_c)
        else:
            _update(stats, VERDICT_ACCEPT, verdict.code, rev.desired_c)
    conn.close()
    return ClientResult(config, stats.n, stats, reason)


class WireTransit:
    """Receiver-side pulse handle: one MEASURE frame per projective click."""

    __slots__ = ("_conn",)

    def __init__(self, conn: Conn):
        self._conn = conn

    def measure(self, angle: float) -> Optional[int]:
        self._conn.send(Measure(angle))
        msg = _recv_or_raise(self._conn)
        if isinstance(msg, Detect):
            return msg.outcome
        if isinstance(msg, Lost):
            return None
        raise SessionAborted(f"unexpected {type(msg).__name__} in reply to MEASURE")


def play_bob(conn: Conn, config: SessionConfig) -> ClientResult:
    """Play the receiver role until the session's stop policy ends it."""
    conn.send(Hello(PROTOCOL_VERSION, ROLE_BOB, config.canonical_text()))
    strategy = build_bob(config.profile, config.state_set())
    rng = stream(config.seed, "bob")
    stats = SessionStats()
    transit = WireTransit(conn)
    target = _fixed_count(config)
    reason = "fixed_count"
    while target is None or stats.n < target:
        try:
            det = strategy.receive(transit, rng)
        except (ConnectionError, OSError):
            reason = "referee_closed"
            break
        if det is None:
            conn.send(Lost())  # declare no detection (truthful or tactical)
            continue
        b, desired = strategy.announce(det, rng)
        conn.send(BBit(b))
        msg = _recv_or_raise(conn)
        if not isinstance(msg, RevealMsg):
            raise SessionAborted(f"unexpected {type(msg).__name__} while awaiting reveal")
        accepted = strategy.judge(det, b, msg.x, msg.a)
        c = (msg.a ^ b) if accepted else None
        conn.send(VerdictMsg(c if accepted else VERDICT_MISMATCH_CODE))
        _update(stats, VERDICT_ACCEPT if accepted else VERDICT_MISMATCH, c, desired)
    conn.close()
    return ClientResult(config, stats.n, stats, reason)


def connect(host: str, port: int, timeout: float = 30.0) -> Conn:
    return Conn(socket.create_connection((host, port), timeout=timeout), timeout=timeout)
