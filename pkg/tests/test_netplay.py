import math
import socket
import struct
import threading

import pytest

from qflip.clients import connect, play_alice, play_bob
from qflip.config import (
    AliceKind,
    BobKind,
    FixedCount,
    SessionConfig,
    SourceKind,
    SprtStop,
    StrategyProfile,
)
from qflip.engine import run_session
from qflip.referee import ProtocolViolation, RefereeServer, referee_session
from qflip.wire import (
    Conn,
    ErrorMsg,
    Hello,
    Prepare,
    PROTOCOL_VERSION,
    RevealMsg,
    ROLE_ALICE,
    ROLE_BOB,
    encode_frame,
)

FAIR = math.acos(4 / 5)
BB84 = math.pi / 4


def _conn_pairs():
    a_client, a_ref = socket.socketpair()
    b_client, b_ref = socket.socketpair()
    return (
        Conn(a_client, timeout=20),
        Conn(b_client, timeout=20),
        Conn(a_ref, timeout=20),
        Conn(b_ref, timeout=20),
    )


def play_networked(config, alice_conn=None, bob_conn=None):
    """Run referee + both clients on in-process socketpairs."""
    conn_a, conn_b, ref_a, ref_b = _conn_pairs()
    conn_a = alice_conn or conn_a
    conn_b = bob_conn or conn_b
    outcome = {}

    def ref():
        outcome["referee"] = referee_session(ref_a, ref_b)

    def alice():
        outcome["alice"] = play_alice(conn_a, config)

    def bob():
        outcome["bob"] = play_bob(conn_b, config)

    threads = [threading.Thread(target=f, daemon=True) for f in (ref, alice, bob)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=60)
        assert not t.is_alive(), "networked session deadlocked"
    return outcome


PROFILES = [
    ("honest", StrategyProfile(), {}),
    ("cheat-alice", StrategyProfile(AliceKind.CHEATING, BobKind.HONEST), {}),
    ("cheat-bob", StrategyProfile(AliceKind.HONEST, BobKind.CHEATING), {}),
    (
        "selective-abort",
        StrategyProfile(
            AliceKind.HONEST, BobKind.SELECTIVE_ABORT, bob_theta=FAIR / 2, bob_accept=frozenset({0})
        ),
        {},
    ),
    (
        "multiphoton",
        StrategyProfile(AliceKind.ATTENUATED_HONEST, BobKind.MULTIPHOTON),
        {"source_kind": SourceKind.ATTENUATED_PULSE, "mu": 2.5, "eta": 0.8},
    ),
]


class TestTransportTransparency:
    @pytest.mark.parametrize("label,profile,extra", PROFILES)
    def test_records_bit_identical_to_in_process(self, label, profile, extra):
        config = SessionConfig(
            phi=FAIR,
            profile=profile,
            seed=4242,
            eta=extra.pop("eta", 0.85),
            visibility=0.95,
            stop=FixedCount(300),
            **extra,
        )
        local = run_session(config)
        outcome = play_networked(config)
        referee_result = outcome["referee"]
        assert referee_result.records == local.records
        assert referee_result.snapshot == local.snapshot
        # both clients observed the same verdict stream
        for side in ("alice", "bob"):
            stats = outcome[side].stats
            assert stats.n == local.stats.n
            assert stats.n_star == local.stats.n_star
            assert (stats.n0, stats.n1) == (local.stats.n0, local.stats.n1)

    def test_noisy_lossy_long_session(self):
        config = SessionConfig(
            phi=BB84,
            profile=StrategyProfile(AliceKind.CHEATING, BobKind.HONEST),
            seed=777,
            eta=0.4,
            visibility=0.91,
            stop=FixedCount(2000),
        )
        local = run_session(config)
        outcome = play_networked(config)
        assert outcome["referee"].records == local.records

    def test_hundred_thousand_flip_honest_session(self):
        config = SessionConfig(
            phi=FAIR,
            profile=StrategyProfile(),
            seed=606,
            visibility=0.96,
            stop=FixedCount(100_000),
        )
        local = run_session(config)
        outcome = play_networked(config)
        assert outcome["referee"].records == local.records
        assert outcome["referee"].snapshot == local.snapshot
        assert outcome["alice"].stats.n == 100_000

    def test_sequential_stop_over_the_wire(self):
        config = SessionConfig(
            phi=FAIR,
            profile=StrategyProfile(AliceKind.HONEST, BobKind.CHEATING),
            seed=31337,
            visibility=0.96,
            stop=SprtStop(p0=0.01, p1=0.10, max_flips=50_000),
        )
        local = run_session(config)
        assert local.stop_reason == "suspect_cheating"
        outcome = play_networked(config)
        assert outcome["referee"].records == local.records
        assert outcome["referee"].stop_reason == "suspect_cheating"
        assert outcome["alice"].stats.n == local.stats.n


class RecordingConn(Conn):
    """Taps every frame delivered to this endpoint."""

    def __init__(self, sock, timeout=20.0):
        super().__init__(sock, timeout)
        self.received = []

    def recv(self):
        msg = super().recv()
        self.received.append(msg)
        return msg


class TestInformationFirewall:
    def test_no_frame_leaks_hidden_angles(self):
        config = SessionConfig(
            phi=FAIR,
            profile=StrategyProfile(),
            seed=999,
            eta=0.7,
            stop=FixedCount(200),
        )
        a_client, a_ref = socket.socketpair()
        b_client, b_ref = socket.socketpair()
        alice_conn = RecordingConn(a_client)
        bob_conn = RecordingConn(b_client)
        outcome = {}

        def ref():
            outcome["referee"] = referee_session(Conn(a_ref, timeout=20), Conn(b_ref, timeout=20))

        threads = [
            threading.Thread(target=ref, daemon=True),
            threading.Thread(target=lambda: play_alice(alice_conn, config), daemon=True),
            threading.Thread(target=lambda: play_bob(bob_conn, config), daemon=True),
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout=60)
            assert not t.is_alive()

        sset = config.state_set()
        prepared_patterns = [struct.pack("<d", s.theta) for s in sset.honest_states]
        measure_patterns = [struct.pack("<d", a) for a in (0.0, sset.phi)]

        # Bob sees only DETECT / LOST / REVEAL frames; before the reveal no
        # frame may carry any prepared angle's byte pattern
        reveal_seen = False
        for msg in bob_conn.received:
            frame = encode_frame(msg)
            if isinstance(msg, RevealMsg):
                reveal_seen = True
            if not reveal_seen:
                for pattern in prepared_patterns:
                    assert pattern not in frame
        # Alice never receives anything carrying a measurement angle
        for msg in alice_conn.received:
            frame = encode_frame(msg)
            for pattern in measure_patterns:
                assert pattern not in frame


class TestRefereeEnforcement:
    def test_out_of_phase_reveal_from_bob(self):
        config = SessionConfig(phi=FAIR, profile=StrategyProfile(), seed=1, stop=FixedCount(10))
        conn_a, conn_b, ref_a, ref_b = _conn_pairs()
        errors = {}

        def ref():
            try:
                referee_session(ref_a, ref_b)
            except ProtocolViolation as exc:
                errors["referee"] = str(exc)

        thread = threading.Thread(target=ref, daemon=True)
        thread.start()
        conn_a.send(Hello(PROTOCOL_VERSION, ROLE_ALICE, config.canonical_text()))
        conn_b.send(Hello(PROTOCOL_VERSION, ROLE_BOB, config.canonical_text()))
        conn_a.send(Prepare(0.0))  # a normal attempt starts
        conn_b.send(RevealMsg(0, 0))  # receiver must not reveal
        reply = conn_b.recv()
        thread.join(timeout=10)
        assert isinstance(reply, ErrorMsg)
        assert "phase violation" in reply.reason
        assert "phase violation" in errors["referee"]

    def test_version_mismatch_rejected(self):
        config = SessionConfig(phi=FAIR, profile=StrategyProfile(), seed=1, stop=FixedCount(10))
        conn_a, conn_b, ref_a, ref_b = _conn_pairs()
        errors = {}

        def ref():
            try:
                referee_session(ref_a, ref_b)
            except ProtocolViolation as exc:
                errors["referee"] = str(exc)

        thread = threading.Thread(target=ref, daemon=True)
        thread.start()
        conn_a.send(Hello(0x7F, ROLE_ALICE, config.canonical_text()))
        reply = conn_a.recv()
        thread.join(timeout=10)
        assert isinstance(reply, ErrorMsg)
        assert "version mismatch" in reply.reason

    def test_config_mismatch_rejected(self):
        config = SessionConfig(phi=FAIR, profile=StrategyProfile(), seed=1, stop=FixedCount(10))
        other = SessionConfig(phi=FAIR, profile=StrategyProfile(), seed=2, stop=FixedCount(10))
        conn_a, conn_b, ref_a, ref_b = _conn_pairs()
        errors = {}

        def ref():
            try:
                referee_session(ref_a, ref_b)
            except ProtocolViolation as exc:
                errors["referee"] = str(exc)

        thread = threading.Thread(target=ref, daemon=True)
        thread.start()
        conn_a.send(Hello(PROTOCOL_VERSION, ROLE_ALICE, config.canonical_text()))
        conn_b.send(Hello(PROTOCOL_VERSION, ROLE_BOB, other.canonical_text()))
        reply = conn_a.recv()
        thread.join(timeout=10)
        assert isinstance(reply, ErrorMsg)
        assert "config mismatch" in reply.reason


class TestTcpServer:
    def test_full_tcp_session_matches_local(self):
        config = SessionConfig(
            phi=FAIR,
            profile=StrategyProfile(AliceKind.HONEST, BobKind.CHEATING),
            seed=808,
            stop=FixedCount(400),
        )
        local = run_session(config)
        server = RefereeServer("127.0.0.1", 0, timeout=20)
        host, port = server.address
        serve_thread = threading.Thread(target=server.serve, kwargs={"max_sessions": 1}, daemon=True)
        serve_thread.start()
        results = {}

        def alice():
            results["alice"] = play_alice(connect(host, port, timeout=20), config)

        def bob():
            results["bob"] = play_bob(connect(host, port, timeout=20), config)

        threads = [threading.Thread(target=f, daemon=True) for f in (alice, bob)]
        for t in threads:
            t.start()
        for t in threads:
            t.join(timeout=60)
            assert not t.is_alive()
        serve_thread.join(timeout=30)
        server.stop()
        assert len(server.results) == 1
        assert server.results[0].records == local.records
        assert results["alice"].stats.n == local.stats.n
        assert results["bob"].stats.n_star == local.stats.n_star
