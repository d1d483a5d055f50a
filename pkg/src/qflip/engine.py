"""The two-party round engine: send, detect-or-restart, commit b, reveal, verdict.

One coin-flip *instance* is one detected pulse.  The engine loops Alice's
prepare / source emission / lossy channel until the receiver declares a
detection (a genuinely lost pulse and a falsely-declared loss both just
restart the attempt), then runs the classical tail exactly once: Bob
commits his bit b before seeing anything about (x, a), Alice reveals only
after b arrived, Bob issues the verdict.  The ordering is enforced by the
strategy API itself: senders only ever receive b, receivers only ever
receive measurement outcomes and the reveal.

Everything is deterministic given the master seed; see ``qflip.rng`` for
the four named streams.  Records are immutable and serialize to JSON-ready
dicts for the CLI's JSONL output and the service's event feed.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterator, Optional

import numpy as np

from . import analysis
from .bloch import CircleDensity, ProtocolStateSet, StateAngle, _measure_fast
from .config import (
    FixedCount,
    SessionConfig,
    SourceModel,
    SprtStop,
    ThresholdStop,
)
from .rng import session_streams
from .source import apply_loss, emit
from .strategies import build_alice, build_bob

VERDICT_ACCEPT = "accept"
VERDICT_MISMATCH = "mismatch"


@dataclass(frozen=True, slots=True)
class FlipRecord:
    """One completed coin-flip instance.

    ``alice_x/alice_a`` hold an honest sender's committed choice and
    ``alice_r`` a dishonest sender's state index (the unused fields are
    None).  ``bob_y`` is an honest receiver's basis bit; ``bob_basis`` is
    the measurement angle in radians and ``bob_outcome`` the first click.
    ``c`` is the accepted outcome (None on mismatch) and ``desired_c`` the
    cheater's target, when there is a cheater.
    """

    attempts: int
    alice_x: Optional[int]
    alice_a: Optional[int]
    alice_r: Optional[int]
    bob_y: Optional[int]
    bob_basis: float
    bob_outcome: int
    b: int
    reveal_x: int
    reveal_a: int
    verdict: str
    c: Optional[int]
    desired_c: Optional[int]

    def to_dict(self) -> dict:
        return asdict(self)


def verify(reveal_x: int, reveal_a: int, bob_y: int, bob_outcome: int) -> bool:
    """Honest receiver's verification rule.

    Different bases: accept on faith.  Same basis: accept exactly when the
    click matches the revealed bit.
    """
    return bob_y != reveal_x or bob_outcome == reveal_a


class LocalTransit:
    """In-process pulse handle: measures surviving photons in order."""

    __slots__ = ("_photons", "_rng", "_next")

    def __init__(self, photons: list[CircleDensity], rng: np.random.Generator):
        self._photons = photons
        self._rng = rng
        self._next = 0

    def measure(self, angle: float) -> Optional[int]:
        if self._next >= len(self._photons):
            return None
        p = self._photons[self._next]
        self._next += 1
        return _measure_fast(p.theta.theta, p.purity, angle, self._rng)


def emit_surviving(
    prepared: StateAngle,
    source: "SourceModel",
    eta: float,
    state_set: ProtocolStateSet,
    rng_source: np.random.Generator,
) -> list[CircleDensity]:
    """One pulse through source and channel; shared by the engine and the referee."""
    return apply_loss(emit(source, prepared, state_set, rng_source), eta, rng_source)


class SessionStats:
    """Running per-instance counts and rates for one session."""

    __slots__ = ("n", "n0", "n1", "n_star", "n_desired", "n_success")

    def __init__(self) -> None:
        self.n = 0
        self.n0 = 0
        self.n1 = 0
        self.n_star = 0
        self.n_desired = 0
        self.n_success = 0

    def update(self, record: FlipRecord) -> None:
        self.n += 1
        if record.verdict == VERDICT_MISMATCH:
            self.n_star += 1
        elif record.c == 0:
            self.n0 += 1
        else:
            self.n1 += 1
        if record.desired_c is not None:
            self.n_desired += 1
            if record.verdict == VERDICT_ACCEPT and record.c == record.desired_c:
                self.n_success += 1

    @property
    def p0(self) -> float:
        return self.n0 / self.n if self.n else 0.0

    @property
    def p1(self) -> float:
        return self.n1 / self.n if self.n else 0.0

    @property
    def p_star(self) -> float:
        return self.n_star / self.n if self.n else 0.0

    @property
    def cheat_success(self) -> Optional[float]:
        if not self.n_desired:
            return None
        return self.n_success / self.n_desired


class SessionTracker:
    """Statistics, advisory test and stop policy for a stream of records.

    Shared by the in-process runner and the networked referee so that both
    make identical stop decisions and report identical snapshots.
    """

    def __init__(self, config: SessionConfig):
        self.config = config
        self.stats = SessionStats()
        self._prediction = analysis.predict(config.phi, config.visibility)
        self._monitor = self._initial_test()
        self._monitor_decision = analysis.Decision.CONTINUE

    def _initial_test(self) -> Optional[analysis.SequentialTest]:
        stop = self.config.stop
        if isinstance(stop, ThresholdStop):
            return analysis.ThresholdTest(stop.tau, stop.min_samples)
        if isinstance(stop, SprtStop):
            return analysis.SprtTest(stop.p0, stop.p1, stop.alpha, stop.beta)
        # Fixed-count sessions still carry an advisory SPRT between the
        # predicted honest rate and the opponent's full-cheat rate.
        eps, m = self._estimator_rates()
        if m is None or m - eps < 1e-9:
            return None
        return analysis.SprtTest(eps, m)

    def _estimator_rates(self) -> tuple[float, Optional[float]]:
        pred = self._prediction
        cheater = self.config.profile.cheater
        if cheater == "alice":
            m = pred.p_star_cheat_alice
        elif cheater == "bob":
            m = pred.p_star_cheat_bob
        else:
            # Nobody declared dishonest: watch for the most easily hidden
            # attack, the one with the smaller mismatch floor.
            m = min(pred.p_star_cheat_alice, pred.p_star_cheat_bob)
        return pred.p_star_honest, m

    def observe(self, record: FlipRecord) -> None:
        self.stats.update(record)
        if self._monitor is not None and self._monitor_decision is analysis.Decision.CONTINUE:
            self._monitor_decision, self._monitor = analysis.sequential_step(
                self._monitor, record.verdict == VERDICT_MISMATCH
            )

    def should_stop(self) -> Optional[str]:
        """Stop reason per the configured policy, or None to keep playing."""
        stop = self.config.stop
        n = self.stats.n
        if isinstance(stop, FixedCount):
            return "fixed_count" if n >= stop.count else None
        if self._monitor_decision is analysis.Decision.STOP_SUSPECT_CHEATING:
            return "suspect_cheating"
        if self._monitor_decision is analysis.Decision.STOP_LOOKS_HONEST:
            return "looks_honest"
        if n >= stop.max_flips:
            return "max_flips"
        return None

    def estimate(self) -> Optional[tuple[float, tuple[float, float]]]:
        """Cheat-fraction estimate from the mismatch count, when well posed."""
        eps, m = self._estimator_rates()
        if self.stats.n == 0 or m is None or m - eps < 1e-9:
            return None
        return analysis.estimate_cheat_fraction(self.stats.n_star, self.stats.n, eps, m)

    def stats_snapshot(self) -> dict:
        """JSON-ready statistics view (field names shared with the CSV summary)."""
        stats = self.stats
        est = self.estimate()
        return {
            "n": stats.n,
            "p0": stats.p0,
            "p1": stats.p1,
            "pstar": stats.p_star,
            "cheat_success": stats.cheat_success,
            "f_hat": None if est is None else est[0],
            "f_ci_lo": None if est is None else est[1][0],
            "f_ci_hi": None if est is None else est[1][1],
            "test": analysis.test_snapshot(self._monitor, self._monitor_decision),
        }


class SessionRunner:
    """Steps one session flip by flip; the batch path just loops this."""

    def __init__(self, config: SessionConfig):
        self.config = config
        self.state_set = config.state_set()
        self._alice = build_alice(config.profile, self.state_set)
        self._bob = build_bob(config.profile, self.state_set)
        self._source_model = config.source
        streams = session_streams(config.seed)
        self._rng_alice = streams["alice"]
        self._rng_bob = streams["bob"]
        self._rng_physics = streams["physics"]
        self._rng_source = streams["source"]
        self.tracker = SessionTracker(config)
        self.stop_reason: Optional[str] = None

    @property
    def stats(self) -> SessionStats:
        return self.tracker.stats

    def flip(self) -> FlipRecord:
        state_set = self.state_set
        source, eta = self._source_model, self.config.eta
        alice, bob = self._alice, self._bob
        rng_a, rng_b = self._rng_alice, self._rng_bob
        rng_p, rng_s = self._rng_physics, self._rng_source

        attempts = 0
        while True:
            attempts += 1
            commit = alice.prepare(rng_a)
            survivors = emit_surviving(commit.angle, source, eta, state_set, rng_s)
            det = bob.receive(LocalTransit(survivors, rng_p), rng_b)
            if det is not None:
                break

        b, bob_desired = bob.announce(det, rng_b)
        rev = alice.reveal(commit, b, rng_a)
        accepted = bob.judge(det, b, rev.x, rev.a)
        desired = rev.desired_c if rev.desired_c is not None else bob_desired
        record = FlipRecord(
            attempts=attempts,
            alice_x=commit.x,
            alice_a=commit.a,
            alice_r=commit.r,
            bob_y=det.y,
            bob_basis=det.basis_angle,
            bob_outcome=det.outcome,
            b=b,
            reveal_x=rev.x,
            reveal_a=rev.a,
            verdict=VERDICT_ACCEPT if accepted else VERDICT_MISMATCH,
            c=(rev.a ^ b) if accepted else None,
            desired_c=desired,
        )
        self.tracker.observe(record)
        return record

    def should_stop(self) -> Optional[str]:
        return self.tracker.should_stop()

    def estimate(self) -> Optional[tuple[float, tuple[float, float]]]:
        return self.tracker.estimate()

    def stats_snapshot(self) -> dict:
        return self.tracker.stats_snapshot()


@dataclass
class SessionResult:
    config: SessionConfig
    stats: SessionStats
    records: list[FlipRecord]
    stop_reason: str
    snapshot: dict


def run_instance(config: SessionConfig) -> FlipRecord:
    """The first instance of the session config.seed determines.

    All four random streams are derived from the seed; use a
    ``SessionRunner`` to draw successive instances from the same streams.
    """
    return SessionRunner(config).flip()


def iter_session(config: SessionConfig) -> Iterator[FlipRecord]:
    """Stream a session's records lazily (stop policy applied after each flip)."""
    runner = SessionRunner(config)
    while runner.should_stop() is None:
        yield runner.flip()


def run_session(config: SessionConfig, collect_records: bool = True) -> SessionResult:
    """Run a whole session; deterministic given config.seed."""
    runner = SessionRunner(config)
    records: list[FlipRecord] = []
    while True:
        reason = runner.should_stop()
        if reason is not None:
            runner.stop_reason = reason
            break
        record = runner.flip()
        if collect_records:
            records.append(record)
    return SessionResult(
        config=config,
        stats=runner.stats,
        records=records,
        stop_reason=runner.stop_reason,
        snapshot=runner.stats_snapshot(),
    )
