"""Honest and adversarial behaviors for both roles.

Strategies interact with the quantum channel only through a ``QubitTransit``
handle whose single operation is a destructive projective measurement.
That makes the information firewall structural: a receiver strategy can
never read a transmitted angle, and a sender strategy never sees the
measurement basis.  Strategies are stateless between flips; within a flip
the engine threads an explicit detection object through the receive /
announce / judge steps.

The adversarial repertoire:

* ``CheatingAlice`` sends one of the two orthogonal states lying halfway
  between honest states of opposite bit value, then, knowing b, reveals the
  nearest honest state that forces her desired outcome.
* ``CheatingBob`` measures in the halfway basis phi/2 before announcing b,
  guesses a from the click, and declares a mismatch whenever the revealed
  bit contradicts his guess.
* ``SelectiveAbortBob`` measures at an arbitrary angle and falsely declares
  loss unless the outcome is in his accept set; the posterior ceiling makes
  this provably no better per accepted flip than CheatingBob.
* ``MultiphotonBob`` exploits multi-photon pulses from an attenuated source:
  measuring clones in alternating bases can identify the committed bit with
  certainty, in which case (only) he declares a detection.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Protocol, Union

import numpy as np

from .bloch import ORTHO_EPS, PI, ProtocolStateSet, StateAngle, posterior_zero
from .config import AliceKind, BobKind, StrategyProfile


def _bit(rng: np.random.Generator) -> int:
    return 1 if rng.random() >= 0.5 else 0


class QubitTransit(Protocol):
    """One in-flight pulse, as seen by the receiver.

    ``measure`` destructively measures the next unconsumed photon in the
    basis {|angle>, |angle + pi/2>} and returns the outcome bit, or None
    when no photon remains (loss, empty pulse, or all consumed).
    """

    def measure(self, angle: float) -> Optional[int]: ...


@dataclass(frozen=True, slots=True)
class AliceCommit:
    """What Alice has physically committed to for one send attempt."""

    angle: StateAngle
    x: Optional[int] = None
    a: Optional[int] = None
    r: Optional[int] = None


@dataclass(frozen=True, slots=True)
class Reveal:
    x: int
    a: int
    desired_c: Optional[int] = None


@dataclass(frozen=True, slots=True)
class BobDetection:
    """Bob's declared detection for one attempt (first click recorded)."""

    basis_angle: float
    outcome: int
    y: Optional[int] = None
    guess: Optional[int] = None


# Cheating Alice's reveal rule: which basis x declares bit a from cheat state r.
# A_r is equidistant from exactly two honest states carrying opposite bits;
# the table picks the one matching the needed a (overlap cos^2(pi/4 - phi/2)).
REVEAL_X = {(0, 0): 1, (0, 1): 0, (1, 0): 0, (1, 1): 1}


class HonestAlice:
    kind = AliceKind.HONEST

    def __init__(self, state_set: ProtocolStateSet):
        self._set = state_set

    def prepare(self, rng: np.random.Generator) -> AliceCommit:
        x = _bit(rng)
        a = _bit(rng)
        return AliceCommit(self._set.honest(x, a), x=x, a=a)

    def reveal(self, commit: AliceCommit, b: int, rng: np.random.Generator) -> Reveal:
        return Reveal(commit.x, commit.a)


class AttenuatedHonestAlice(HonestAlice):
    """Honest play over an attenuated-pulse source (same choices, leaky hardware)."""

    kind = AliceKind.ATTENUATED_HONEST


class CheatingAlice:
    kind = AliceKind.CHEATING

    def __init__(self, state_set: ProtocolStateSet):
        self._set = state_set

    def prepare(self, rng: np.random.Generator) -> AliceCommit:
        r = _bit(rng)
        return AliceCommit(self._set.alice_cheat[r], r=r)

    def reveal(self, commit: AliceCommit, b: int, rng: np.random.Generator) -> Reveal:
        c = _bit(rng)  # desired outcome, fresh per flip
        a = c ^ b
        return Reveal(REVEAL_X[(commit.r, a)], a, desired_c=c)


class HonestBob:
    kind = BobKind.HONEST

    def __init__(self, state_set: ProtocolStateSet):
        self._set = state_set
        self._basis = (0.0, state_set.phi)

    def receive(self, transit: QubitTransit, rng: np.random.Generator) -> Optional[BobDetection]:
        y = _bit(rng)  # fresh basis each attempt
        angle = self._basis[y]
        outcome = transit.measure(angle)
        if outcome is None:
            return None
        return BobDetection(angle, outcome, y=y)

    def announce(self, det: BobDetection, rng: np.random.Generator) -> tuple[int, Optional[int]]:
        return _bit(rng), None

    def judge(self, det: BobDetection, b: int, x: int, a: int) -> bool:
        # Same basis: the click must match the declared state.  Different
        # basis: nothing to check, the bit is taken on faith.
        return det.y != x or det.outcome == a


class CheatingBob:
    """Measure-first guesser.  The default unhappy-path action is to declare
    a mismatch (aborting the unfavorable coin at the cost of a visible
    error); ``concede=True`` is the comparison variant that silently accepts
    bad outcomes instead, leaving no mismatch signature but letting the lost
    coins stand."""

    kind = BobKind.CHEATING

    def __init__(self, state_set: ProtocolStateSet, concede: bool = False):
        self._theta = state_set.bob_cheat_basis.theta
        self._concede = concede

    def receive(self, transit: QubitTransit, rng: np.random.Generator) -> Optional[BobDetection]:
        outcome = transit.measure(self._theta)
        if outcome is None:
            return None
        return BobDetection(self._theta, outcome, guess=outcome)

    def announce(self, det: BobDetection, rng: np.random.Generator) -> tuple[int, Optional[int]]:
        c = _bit(rng)
        return c ^ det.guess, c

    def judge(self, det: BobDetection, b: int, x: int, a: int) -> bool:
        return a == det.guess or self._concede


def abort_guess(phi: float, basis_angle: float, outcome: int) -> int:
    """Best guess of a after an accepted click: argmax of the posterior.

    The click direction is basis_angle for outcome 0 and its orthogonal
    partner for outcome 1; ties go to 0.
    """
    effective = basis_angle + outcome * (PI / 2)
    return 0 if posterior_zero(phi, effective) >= 0.5 else 1


class SelectiveAbortBob:
    kind = BobKind.SELECTIVE_ABORT

    def __init__(self, state_set: ProtocolStateSet, theta: float, accept: frozenset[int]):
        if not accept:
            raise ValueError("accept set must be nonempty (aborting everything never terminates)")
        self._phi = state_set.phi
        self._theta = theta
        self._accept = accept

    def receive(self, transit: QubitTransit, rng: np.random.Generator) -> Optional[BobDetection]:
        outcome = transit.measure(self._theta)
        if outcome is None or outcome not in self._accept:
            return None  # falsely declare loss and wait for a fresh state
        return BobDetection(self._theta, outcome, guess=abort_guess(self._phi, self._theta, outcome))

    def announce(self, det: BobDetection, rng: np.random.Generator) -> tuple[int, Optional[int]]:
        c = _bit(rng)
        return c ^ det.guess, c

    def judge(self, det: BobDetection, b: int, x: int, a: int) -> bool:
        return a == det.guess


def conclusive_bit(state_set: ProtocolStateSet, outcomes: list[tuple[int, int]]) -> Optional[int]:
    """Committed bit implied by clicks (basis bit y, outcome), if unambiguous.

    A click in basis y on outcome o excludes every honest state orthogonal
    to the clicked projector.  If all states consistent with every click
    share one bit value, that bit is certain; otherwise None.  This is
    logical elimination, so a non-None answer is never wrong when all
    measured photons really carry the same honest state.
    """
    basis = (0.0, state_set.phi)
    candidates = [(0, 0), (0, 1), (1, 0), (1, 1)]
    for y, o in outcomes:
        click = basis[y] + o * (PI / 2)
        candidates = [
            (x, a)
            for (x, a) in candidates
            if math.cos(state_set.honest(x, a).theta - click) ** 2 > ORTHO_EPS
        ]
    bits = {a for _, a in candidates}
    return bits.pop() if len(bits) == 1 else None


class MultiphotonBob:
    """Measures every photon of the pulse, alternating bases 0, 1, 0, 1, ...

    Declares a detection only when the clicks logically determine the
    committed bit; single-photon pulses and inconclusive patterns are
    reported as loss.  Against clones from an attenuated source this fixes
    every accepted flip; against an entangled-pair source the extra photons
    are uncorrelated and the "conclusions" lose their certainty.
    """

    kind = BobKind.MULTIPHOTON

    def __init__(self, state_set: ProtocolStateSet):
        self._set = state_set
        self._basis = (0.0, state_set.phi)

    def receive(self, transit: QubitTransit, rng: np.random.Generator) -> Optional[BobDetection]:
        outcomes: list[tuple[int, int]] = []
        while True:
            y = len(outcomes) % 2
            o = transit.measure(self._basis[y])
            if o is None:
                break
            outcomes.append((y, o))
        if len(outcomes) < 2:
            return None
        guess = conclusive_bit(self._set, outcomes)
        if guess is None:
            return None
        y0, o0 = outcomes[0]
        return BobDetection(self._basis[y0], o0, y=y0, guess=guess)

    def announce(self, det: BobDetection, rng: np.random.Generator) -> tuple[int, Optional[int]]:
        c = _bit(rng)
        return c ^ det.guess, c

    def judge(self, det: BobDetection, b: int, x: int, a: int) -> bool:
        return True  # certain of a, so never unhappy


AliceStrategy = Union[HonestAlice, AttenuatedHonestAlice, CheatingAlice]
BobStrategy = Union[HonestBob, CheatingBob, SelectiveAbortBob, MultiphotonBob]


def build_alice(profile: StrategyProfile, state_set: ProtocolStateSet) -> AliceStrategy:
    if profile.alice is AliceKind.CHEATING:
        return CheatingAlice(state_set)
    if profile.alice is AliceKind.ATTENUATED_HONEST:
        return AttenuatedHonestAlice(state_set)
    return HonestAlice(state_set)


def build_bob(profile: StrategyProfile, state_set: ProtocolStateSet) -> BobStrategy:
    if profile.bob is BobKind.CHEATING:
        return CheatingBob(state_set, concede=profile.bob_concede)
    if profile.bob is BobKind.SELECTIVE_ABORT:
        return SelectiveAbortBob(state_set, profile.bob_theta, profile.bob_accept)
    if profile.bob is BobKind.MULTIPHOTON:
        return MultiphotonBob(state_set)
    return HonestBob(state_set)
