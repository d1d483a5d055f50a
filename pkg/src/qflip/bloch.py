"""Qubit states, measurements and discrimination bounds on the real great circle.

Every state used by the protocol and by the optimal attacks has real
amplitudes, so a pure qubit is fully described by one angle:

    |theta> = cos(theta)|0> + sin(theta)|1>

These states live on a single great circle of the Bloch sphere (the X-Z
plane; the Bloch angle is 2*theta).  A mixed state on that circle is the
same direction with a shortened Bloch vector, here called ``purity``
(1 = pure, 0 = maximally mixed).  Depolarizing noise, projective
measurements in any real basis, Helstrom discrimination of real-state
ensembles and max-confidence posteriors all stay inside this plane, so
the two-real-parameter representation is exact for everything the
simulator needs.  Complex amplitudes and general POVMs are deliberately
out of scope.

Angles are radians everywhere in this package; degrees appear only at
CLI / config boundaries.  The canonical range is [0, pi): theta and
theta + pi differ by a global sign and denote the same physical state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PI = math.pi

#: Overlaps below this count as orthogonal (used for consistency sets).
ORTHO_EPS = 1e-12


@dataclass(frozen=True, slots=True)
class StateAngle:
    """A pure real-amplitude qubit state, canonicalized into [0, pi)."""

    theta: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta):
            raise ValueError(f"state angle must be finite, got {self.theta!r}")
        reduced = self.theta % PI
        # float mod can round a tiny negative input up to PI itself
        object.__setattr__(self, "theta", 0.0 if reduced >= PI else reduced)

    def amplitudes(self) -> tuple[float, float]:
        """Amplitude pair (<0|theta>, <1|theta>)."""
        return math.cos(self.theta), math.sin(self.theta)

    def orthogonal(self) -> "StateAngle":
        return StateAngle(self.theta + PI / 2)


def state_from_angle(theta: float) -> StateAngle:
    """Build a canonical StateAngle from any finite angle in radians."""
    return StateAngle(theta)


def overlap_prob(s: StateAngle, t: StateAngle) -> float:
    """Born overlap |<s|t>|^2 = cos^2(s - t) between two pure states."""
    return math.cos(s.theta - t.theta) ** 2


@dataclass(frozen=True, slots=True)
class CircleDensity:
    """A possibly-mixed state on the real great circle.

    Equivalent density matrix:  rho = purity * |theta><theta| + (1-purity) * I/2.
    ``purity`` is the Bloch-vector length, so purity=1 is pure and purity=0
    is maximally mixed (theta then carries no information).
    """

    theta: StateAngle
    purity: float = 1.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.purity <= 1.0:
            raise ValueError(f"purity must lie in [0, 1], got {self.purity!r}")

    @classmethod
    def pure(cls, theta: StateAngle) -> "CircleDensity":
        return cls(theta, 1.0)

    def matrix(self) -> np.ndarray:
        """The 2x2 density matrix (real symmetric, unit trace, positive)."""
        c, s = self.theta.amplitudes()
        proj = np.array([[c * c, c * s], [c * s, s * s]])
        return self.purity * proj + (1.0 - self.purity) * np.eye(2) / 2.0

    def prob_zero(self, basis: StateAngle) -> float:
        """Probability of outcome 0 (projection onto |basis>) under the Born rule."""
        return _prob_zero(self.theta.theta, self.purity, basis.theta)


def _prob_zero(theta: float, purity: float, basis: float) -> float:
    return purity * math.cos(theta - basis) ** 2 + (1.0 - purity) / 2.0


def depolarize(state: CircleDensity, visibility: float) -> CircleDensity:
    """Shrink the Bloch vector by ``visibility``.

    Composition is multiplicative: depolarizing by V1 then V2 equals
    depolarizing once by V1*V2, and direction is never changed.
    """
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility!r}")
    return CircleDensity(state.theta, state.purity * visibility)


def measure(state: CircleDensity, basis: StateAngle, rng: np.random.Generator) -> int:
    """Projective measurement in the basis {|basis>, |basis + pi/2>}.

    Returns 0 for a click on |basis>, 1 for the orthogonal projector.
    Consumes exactly one uniform draw from ``rng`` per call.
    """
    p0 = _prob_zero(state.theta.theta, state.purity, basis.theta)
    return 0 if rng.random() < p0 else 1


def _measure_fast(theta: float, purity: float, basis: float, rng: np.random.Generator) -> int:
    # Hot-path twin of measure(); same single-draw contract.
    return 0 if rng.random() < _prob_zero(theta, purity, basis) else 1


@dataclass(frozen=True, slots=True)
class ProtocolStateSet:
    """The four honest states for a basis-angle parameter phi, plus both attacks.

    Honest states, indexed by (basis bit x, committed bit a):

        psi(0,0) = |0>        psi(0,1) = |pi/2>  (= |1>)
        psi(1,0) = |phi>      psi(1,1) = |phi + pi/2>

    Alice's best dishonest preparation is the orthogonal pair A0, A1 with
    A0 = (phi + pi/2)/2: A0 sits exactly halfway between psi(1,0) and
    psi(0,1) (which encode different bits), A1 halfway between psi(1,1)
    and psi(0,0).  Bob's best guessing measurement is the basis at
    theta_b = phi/2, halfway inside each same-bit pair.
    """

    phi: float
    psi00: StateAngle
    psi01: StateAngle
    psi10: StateAngle
    psi11: StateAngle
    alice_cheat: tuple[StateAngle, StateAngle]
    bob_cheat_basis: StateAngle

    def honest(self, x: int, a: int) -> StateAngle:
        if x == 0:
            return self.psi01 if a else self.psi00
        return self.psi11 if a else self.psi10

    @property
    def honest_states(self) -> tuple[StateAngle, StateAngle, StateAngle, StateAngle]:
        """In (x, a) order: (0,0), (0,1), (1,0), (1,1)."""
        return (self.psi00, self.psi01, self.psi10, self.psi11)


def protocol_state_set(phi: float) -> ProtocolStateSet:
    """Construct the state set for 0 < phi <= pi/4 (phi in radians)."""
    if not math.isfinite(phi) or not 0.0 < phi <= PI / 4:
        raise ValueError(f"phi must lie in (0, pi/4], got {phi!r}")
    a0 = StateAngle((phi + PI / 2) / 2)
    return ProtocolStateSet(
        phi=phi,
        psi00=StateAngle(0.0),
        psi01=StateAngle(PI / 2),
        psi10=StateAngle(phi),
        psi11=StateAngle(phi + PI / 2),
        alice_cheat=(a0, a0.orthogonal()),
        bob_cheat_basis=StateAngle(phi / 2),
    )


def _ensemble_density(ensemble: list[tuple[StateAngle, float]]) -> np.ndarray:
    if not ensemble:
        raise ValueError("ensemble must not be empty")
    weights = [w for _, w in ensemble]
    if any(w < 0 for w in weights) or abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("ensemble weights must be nonnegative and sum to 1")
    rho = np.zeros((2, 2))
    for state, w in ensemble:
        c, s = state.amplitudes()
        rho += w * np.array([[c * c, c * s], [c * s, s * s]])
    return rho


def helstrom_guess_prob(
    ensemble0: list[tuple[StateAngle, float]],
    ensemble1: list[tuple[StateAngle, float]],
) -> tuple[float, StateAngle]:
    """Best success probability for guessing which equiprobable ensemble a state came from.

    Returns ``(1/2 + ||rho0 - rho1||_1 / 4, best_basis)`` where the basis is
    the positive eigendirection of rho0 - rho1: outcome 0 of that projective
    measurement is the optimal guess "ensemble 0".  For identical ensembles
    the probability is 1/2 and the basis is arbitrary (angle 0 is returned).
    """
    delta = _ensemble_density(ensemble0) - _ensemble_density(ensemble1)
    evals, evecs = np.linalg.eigh(delta)
    p = 0.5 + float(np.abs(evals).sum()) / 4.0
    top = evecs[:, int(np.argmax(evals))]
    angle = math.atan2(float(top[1]), float(top[0]))
    return p, StateAngle(angle)


def posterior_zero(phi: float, theta: float) -> float:
    """Posterior probability of bit a=0 after a click on |theta>.

    Prior: the four honest states for parameter phi, equiprobable.  The four
    click likelihoods are cos^2(theta - psi); the a=0 and a=1 pairs each sum
    their two terms, and the total over all four states is exactly 2, so

        P(a=0 | click on theta) = (cos^2(theta) + cos^2(theta - phi)) / 2.
    """
    return (math.cos(theta) ** 2 + math.cos(theta - phi) ** 2) / 2.0


def max_confidence(phi: float, theta: float) -> float:
    """Confidence of the best guess of a after a click on |theta>.

    max(q, 1-q) with q = posterior_zero(phi, theta).  Over all theta the
    maximum is cos^2(phi/2), attained at theta = phi/2 (and its orthogonal
    partner): no projective click can identify the committed bit better
    than the straight Helstrom measurement, which is why falsely declaring
    the qubit lost buys a dishonest receiver nothing.
    """
    if not math.isfinite(phi) or not 0.0 < phi <= PI / 4:
        raise ValueError(f"phi must lie in (0, pi/4], got {phi!r}")
    q = posterior_zero(phi, theta)
    return max(q, 1.0 - q)
