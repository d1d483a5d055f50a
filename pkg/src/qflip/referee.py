"""Physics referee: the trusted process that plays the quantum channel.

Two remote classical processes cannot exchange qubits, so a networked
session routes all quantum operations through a referee that simulates the
source, the lossy channel and every projective measurement.  The referee
enforces only physics and message order, never honesty: a cheating client
is simply one that sends adversarial PREPARE/MEASURE angles, declares loss
when it pleases, and issues whatever verdicts it likes.

Phase order per instance (restart arrows on loss):

    PREPARE (Alice) -> MEASURE* (Bob; each answered DETECT or LOST)
        -> either LOST (Bob declares no detection; referee notifies Alice,
           back to PREPARE)
        -> or B_BIT (relayed to Alice) -> REVEAL (relayed to Bob)
        -> VERDICT (relayed to Alice) -> next instance

Bob may measure as many surviving photons as the pulse carries (each
MEASURE consumes one; an exhausted pulse answers LOST), and may declare
LOST even after successful detections -- that is precisely the false-loss
freedom the protocol is designed to make worthless.  The referee never
sends Bob the prepared angle nor Alice the measurement angle.

The referee derives the physics and source random streams from the seed
both parties declared, so a networked session reproduces the in-process
engine's record stream bit for bit.
"""
from __future__ import annotations

import math
import socket
import threading
from dataclasses import dataclass
from typing import Optional

from .bloch import PI, StateAngle, _measure_fast
from .config import BobKind, SessionConfig, config_from_canonical_text
from .engine import (
    FlipRecord,
    SessionTracker,
    VERDICT_ACCEPT,
    VERDICT_MISMATCH,
    emit_surviving,
)
from .rng import stream
from .strategies import abort_guess, conclusive_bit
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
    WireError,
)


class ProtocolViolation(Exception):
    """A client broke the session phase order or the handshake contract."""


@dataclass
class RefereeResult:
    config: SessionConfig
    records: list[FlipRecord]
    snapshot: dict
    stop_reason: str


def _abort(conn_a: Conn, conn_b: Conn, reason: str) -> None:
    for conn in (conn_a, conn_b):
        try:
            conn.send(ErrorMsg(reason))
        except (OSError, ConnectionError, WireError):
            pass


def _nearest_bit(angle: float, zero_angle: float, one_angle: float) -> int:
    d0 = abs(math.remainder(angle - zero_angle, PI))
    d1 = abs(math.remainder(angle - one_angle, PI))
    return 0 if d0 <= d1 else 1


def _reconstruct(
    config: SessionConfig,
    attempts: int,
    prepared: float,
    measurements: list[tuple[float, int]],
    b: int,
    reveal_x: int,
    reveal_a: int,
    verdict_code: int,
) -> FlipRecord:
    """Rebuild the full in-process record from wire facts plus the declared profile."""
    sset = config.state_set()
    profile = config.profile
    accepted = verdict_code != VERDICT_MISMATCH_CODE

    alice_x = alice_a = alice_r = None
    desired: Optional[int] = None
    if profile.alice.value == "cheating":
        a0, a1 = sset.alice_cheat
        alice_r = _nearest_bit(prepared, a0.theta, a1.theta)
        desired = reveal_a ^ b
    else:
        alice_x, alice_a = reveal_x, reveal_a

    bob_y = guess = None
    if measurements:
        bob_basis, bob_outcome = measurements[0]
    else:
        bob_basis, bob_outcome = -1.0, -1  # detection declared blind; never
        # produced by the bundled strategies
    if profile.bob is BobKind.HONEST:
        bob_y = _nearest_bit(bob_basis, 0.0, sset.phi)
    elif profile.bob is BobKind.CHEATING:
        guess = measurements[0][1]
    elif profile.bob is BobKind.SELECTIVE_ABORT:
        guess = abort_guess(sset.phi, bob_basis, bob_outcome)
    elif profile.bob is BobKind.MULTIPHOTON:
        bob_y = _nearest_bit(bob_basis, 0.0, sset.phi)
        clicks = [(_nearest_bit(angle, 0.0, sset.phi), o) for angle, o in measurements]
        guess = conclusive_bit(sset, clicks)
    if guess is not None:
        desired = b ^ guess

    return FlipRecord(
        attempts=attempts,
        alice_x=alice_x,
        alice_a=alice_a,
        alice_r=alice_r,
        bob_y=bob_y,
        bob_basis=bob_basis,
        bob_outcome=bob_outcome,
        b=b,
        reveal_x=reveal_x,
        reveal_a=reveal_a,
        verdict=VERDICT_ACCEPT if accepted else VERDICT_MISMATCH,
        c=verdict_code if accepted else None,
        desired_c=desired,
    )


def handshake(conn: Conn, expected_role: int) -> SessionConfig:
    """Read and validate one HELLO; returns the declared config."""
    msg = conn.recv()
    if not isinstance(msg, Hello):
        raise ProtocolViolation("phase violation: expected HELLO")
    if msg.version != PROTOCOL_VERSION:
        raise ProtocolViolation(f"version mismatch: got 0x{msg.version:02x}")
    if msg.role != expected_role:
        raise ProtocolViolation("role mismatch in HELLO")
    return config_from_canonical_text(msg.config_text)


def referee_session(conn_alice: Conn, conn_bob: Conn) -> RefereeResult:
    """Referee one complete session over already-connected conns.

    Performs the HELLO handshake (compatible version, identical configs),
    then relays instances until the declared stop policy fires.  On any
    phase violation both parties get an ERROR frame and the session dies.
    """
    try:
        config_a = handshake(conn_alice, ROLE_ALICE)
        config_b = handshake(conn_bob, ROLE_BOB)
        if config_a.canonical_text() != config_b.canonical_text():
            raise ProtocolViolation("config mismatch between parties")
    except (ProtocolViolation, WireError) as exc:
        _abort(conn_alice, conn_bob, str(exc))
        raise ProtocolViolation(str(exc)) from exc

    config = config_a
    sset = config.state_set()
    rng_physics = stream(config.seed, "physics")
    rng_source = stream(config.seed, "source")
    tracker = SessionTracker(config)
    records: list[FlipRecord] = []

    try:
        while tracker.should_stop() is None:
            records.append(
                _referee_instance(conn_alice, conn_bob, config, sset, rng_physics, rng_source, tracker)
            )
        reason = tracker.should_stop()
    except (ProtocolViolation, WireError) as exc:
        _abort(conn_alice, conn_bob, str(exc))
        raise ProtocolViolation(str(exc)) from exc
    except TimeoutError as exc:
        _abort(conn_alice, conn_bob, "timeout")
        raise ProtocolViolation("timeout") from exc
    except ConnectionError as exc:
        _abort(conn_alice, conn_bob, f"peer disconnected: {exc}")
        raise ProtocolViolation(f"peer disconnected: {exc}") from exc
    finally:
        conn_alice.close()
        conn_bob.close()
    return RefereeResult(config, records, tracker.stats_snapshot(), reason)


def _referee_instance(
    conn_alice: Conn,
    conn_bob: Conn,
    config: SessionConfig,
    sset,
    rng_physics,
    rng_source,
    tracker: SessionTracker,
) -> FlipRecord:
    attempts = 0
    while True:  # attempt loop; Bob's LOST declaration restarts it
        attempts += 1
        msg = conn_alice.recv()
        if not isinstance(msg, Prepare):
            raise ProtocolViolation(f"phase violation: expected PREPARE, got {type(msg).__name__}")
        prepared = msg.angle
        photons = emit_surviving(StateAngle(prepared), config.source, config.eta, sset, rng_source)
        consumed = 0
        measurements: list[tuple[float, int]] = []
        b: Optional[int] = None
        while True:  # Bob's turn: measure any number of photons, then commit or bail
            msg = conn_bob.recv()
            if isinstance(msg, Measure):
                if consumed < len(photons):
                    p = photons[consumed]
                    consumed += 1
                    outcome = _measure_fast(p.theta.theta, p.purity, msg.angle, rng_physics)
                    measurements.append((msg.angle, outcome))
                    conn_bob.send(Detect(outcome))
                else:
                    conn_bob.send(Lost())
            elif isinstance(msg, Lost):
                conn_alice.send(Lost())  # no detection: ask Alice for a fresh state
                break
            elif isinstance(msg, BBit):
                b = msg.b
                break
            else:
                raise ProtocolViolation(
                    f"phase violation: expected MEASURE, LOST or B_BIT, got {type(msg).__name__}"
                )
        if b is not None:
            break

    conn_alice.send(BBit(b))
    msg = conn_alice.recv()
    if not isinstance(msg, RevealMsg):
        raise ProtocolViolation(f"phase violation: expected REVEAL, got {type(msg).__name__}")
    reveal_x, reveal_a = msg.x, msg.a
    conn_bob.send(msg)
    msg = conn_bob.recv()
    if not isinstance(msg, VerdictMsg):
        raise ProtocolViolation(f"phase violation: expected VERDICT, got {type(msg).__name__}")
    if msg.code != VERDICT_MISMATCH_CODE and msg.code != (reveal_a ^ b):
        raise ProtocolViolation("phase violation: accepted outcome must equal a XOR b")
    conn_alice.send(msg)

    record = _reconstruct(config, attempts, prepared, measurements, b, reveal_x, reveal_a, msg.code)
    tracker.observe(record)
    return record


class RefereeServer:
    """TCP listener pairing Alice/Bob connections into refereed sessions."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, timeout: float = 30.0):
        self._listener = socket.create_server((host, port))
        self._listener.settimeout(1.0)
        self._timeout = timeout
        self._stop = threading.Event()
        self._threads: list[threading.Thread] = []
        self.results: list[RefereeResult] = []
        self.address = self._listener.getsockname()

    def serve(self, max_sessions: Optional[int] = None) -> None:
        """Accept and pair clients until stopped (or after max_sessions)."""
        waiting: dict[int, tuple[Conn, SessionConfig]] = {}
        started = 0
        while not self._stop.is_set():
            if max_sessions is not None and started >= max_sessions:
                break
            try:
                sock, _ = self._listener.accept()
            except socket.timeout:
                continue
            except OSError:
                break
            conn = Conn(sock, timeout=self._timeout)
            try:
                msg = conn.recv()
                if not isinstance(msg, Hello):
                    raise ProtocolViolation("phase violation: expected HELLO")
                if msg.version != PROTOCOL_VERSION:
                    raise ProtocolViolation(f"version mismatch: got 0x{msg.version:02x}")
                declared = config_from_canonical_text(msg.config_text)
            except (ProtocolViolation, WireError, ValueError) as exc:
                try:
                    conn.send(ErrorMsg(str(exc)))
                except (OSError, ConnectionError):
                    pass
                conn.close()
                continue
            if msg.role in waiting:
                other, _ = waiting.pop(msg.role)
                other.close()  # superseded duplicate role
            waiting[msg.role] = (conn, declared)
            if ROLE_ALICE in waiting and ROLE_BOB in waiting:
                (conn_a, cfg_a) = waiting.pop(ROLE_ALICE)
                (conn_b, cfg_b) = waiting.pop(ROLE_BOB)
                if cfg_a.canonical_text() != cfg_b.canonical_text():
                    _abort(conn_a, conn_b, "config mismatch between parties")
                    conn_a.close()
                    conn_b.close()
                    continue
                started += 1
                thread = threading.Thread(
                    target=self._run_session, args=(conn_a, conn_b, cfg_a), daemon=True
                )
                thread.start()
                self._threads.append(thread)
        for thread in self._threads:
            thread.join()

    def _run_session(self, conn_a: Conn, conn_b: Conn, config: SessionConfig) -> None:
        # HELLOs were consumed during pairing; run the relay loop directly.
        sset = config.state_set()
        rng_physics = stream(config.seed, "physics")
        rng_source = stream(config.seed, "source")
        tracker = SessionTracker(config)
        records: list[FlipRecord] = []
        try:
            while tracker.should_stop() is None:
                records.append(
                    _referee_instance(conn_a, conn_b, config, sset, rng_physics, rng_source, tracker)
                )
            self.results.append(
                RefereeResult(config, records, tracker.stats_snapshot(), tracker.should_stop())
            )
        except (ProtocolViolation, WireError, ConnectionError, OSError) as exc:
            _abort(conn_a, conn_b, str(exc))
        finally:
            conn_a.close()
            conn_b.close()

    def stop(self) -> None:
        self._stop.set()
        try:
            self._listener.close()
        except OSError:
            pass
