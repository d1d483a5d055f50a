"""Closed-form cheat probabilities, fairness, predictions and sequential detection.

The two optimal single-flip attacks have exact success probabilities as a
function of the basis-angle parameter phi:

    best Alice:  1/2 + cos^2(pi/4 - phi/2) / 2
        (half the time the bases differ and her bit is taken on faith; the
        other half her halfway state passes verification with the overlap
        cos^2 of half the angular gap pi/2 - phi)
    best Bob:    cos^2(phi/2)
        (the Helstrom success probability for the two equiprobable
        bit-value ensembles, attained by measuring at phi/2)

These cross at 2*cos(phi) - sin(phi) = 1, i.e. phi = arccos(4/5), where
both equal 90%.  Depolarized delivery (purity V) mixes every click with a
coin toss, giving the noisy predictions used to compare against runs.

Sequential coin flipping turns the per-flip mismatch floor into an
asymptotic cheat meter: the mismatch rate of a stream mixing honest flips
(rate eps) with fully cheated flips (rate m) identifies the cheated
fraction, and either a simple threshold or a Wald SPRT decides when to
stop playing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Union

from .bloch import PI


def _check_phi(phi: float) -> None:
    if not math.isfinite(phi) or not 0.0 < phi <= PI / 4:
        raise ValueError(f"phi must lie in (0, pi/4], got {phi!r}")


def p_alice_opt(phi: float) -> float:
    """Best probability for a dishonest sender to fix the outcome."""
    _check_phi(phi)
    return 0.5 + 0.5 * math.cos(PI / 4 - phi / 2) ** 2


def p_bob_opt(phi: float) -> float:
    """Best probability for a dishonest receiver to fix the outcome."""
    _check_phi(phi)
    return math.cos(phi / 2) ** 2


def find_fair_phi() -> float:
    """The phi in (0, pi/4] where both cheat probabilities are equal.

    Bracketing bisection on p_alice_opt - p_bob_opt down to an interval of
    1e-12; the difference is strictly increasing, negative near 0 and
    positive at pi/4, so a sign change always exists.
    """
    lo, hi = 1e-9, PI / 4

    def gap(phi: float) -> float:
        return p_alice_opt(phi) - p_bob_opt(phi)

    glo, ghi = gap(lo), gap(hi)
    if not (glo < 0.0 < ghi):
        raise AssertionError("fairness bracket lost its sign change")
    while hi - lo > 1e-12:
        mid = 0.5 * (lo + hi)
        if gap(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ScenarioPrediction:
    """Exact per-instance rates for one (phi, visibility) operating point."""

    phi: float
    visibility: float
    p_alice: float
    p_bob: float
    p_star_honest: float
    p_star_cheat_alice: float
    p_star_cheat_bob: float


def predict(phi: float, visibility: float) -> ScenarioPrediction:
    """Closed-form rates with depolarized delivery of purity ``visibility``.

    A click on a purity-V state lands right with V * cos^2 + (1-V)/2, so
    honest play mismatches at (1-V)/4 (same basis half the time, wrong click
    (1-V)/2), and each attack's success is the V-weighted mix of its pure
    value with a fair coin.  Cheat mismatch rates are the complements of the
    success rates.
    """
    _check_phi(phi)
    if not 0.0 <= visibility <= 1.0:
        raise ValueError(f"visibility must lie in [0, 1], got {visibility!r}")
    v = visibility
    coin = (1.0 - v) / 2.0
    p_a = 0.5 + 0.5 * (v * math.cos(PI / 4 - phi / 2) ** 2 + coin)
    p_b = v * math.cos(phi / 2) ** 2 + coin
    return ScenarioPrediction(
        phi=phi,
        visibility=v,
        p_alice=p_a,
        p_bob=p_b,
        p_star_honest=(1.0 - v) / 4.0,
        p_star_cheat_alice=1.0 - p_a,
        p_star_cheat_bob=1.0 - p_b,
    )


def wilson_interval(k: int, n: int, z: float = 3.2905) -> tuple[float, float]:
    """Wilson score interval for a binomial rate (default z: two-sided 99.9%)."""
    if n < 1 or not 0 <= k <= n:
        raise ValueError("need n >= 1 and 0 <= k <= n")
    p = k / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z2 / (4 * n * n)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def estimate_cheat_fraction(
    k: int, n: int, epsilon: float, m: float, z: float = 3.2905
) -> tuple[float, tuple[float, float]]:
    """Fraction of flips that were fully cheated, from the mismatch count.

    Model: each flip is cheated with probability f (mismatch rate m) or
    honest (rate epsilon), independently.  The observed rate k/n then has
    mean epsilon + f*(m - epsilon), so f = (k/n - epsilon)/(m - epsilon),
    clamped to [0, 1].  The Wilson interval on k/n is propagated through
    the same linear map.
    """
    if not 0.0 <= epsilon < m <= 1.0:
        raise ValueError(f"need 0 <= epsilon < m <= 1, got epsilon={epsilon!r}, m={m!r}")
    if n < 1 or not 0 <= k <= n:
        raise ValueError("need n >= 1 and 0 <= k <= n")

    def to_f(rate: float) -> float:
        return min(1.0, max(0.0, (rate - epsilon) / (m - epsilon)))

    lo, hi = wilson_interval(k, n, z)
    return to_f(k / n), (to_f(lo), to_f(hi))


class Decision(str, Enum):
    CONTINUE = "continue"
    STOP_SUSPECT_CHEATING = "suspect_cheating"
    STOP_LOOKS_HONEST = "looks_honest"


@dataclass(frozen=True)
class ThresholdTest:
    """Accuse once the observed mismatch rate exceeds tau (after warm-up)."""

    tau: float
    min_samples: int
    n: int = 0
    k: int = 0


@dataclass(frozen=True)
class SprtTest:
    """Wald sequential probability ratio test on the mismatch rate.

    H0: rate p0 (honest)  vs  H1: rate p1 (full-time optimal cheating).
    Log-likelihood ratio after n flips with k mismatches:

        L = k*ln(p1/p0) + (n-k)*ln((1-p1)/(1-p0))

    Accuse when L >= ln((1-beta)/alpha); trust when L <= ln(beta/(1-alpha)).
    Wald's bounds cap the false-accusation rate near alpha and the missed
    -cheater rate near beta.  p0 = 0 (noiseless honest play) is allowed:
    the first mismatch is then immediately damning.
    """

    p0: float
    p1: float
    alpha: float = 0.01
    beta: float = 0.01
    n: int = 0
    k: int = 0


SequentialTest = Union[ThresholdTest, SprtTest]


def _sprt_llr(test: SprtTest) -> float:
    if test.k > 0 and test.p0 == 0.0:
        return math.inf
    if test.n > test.k and test.p1 == 1.0:
        return -math.inf
    llr = 0.0
    if test.k:
        llr += test.k * math.log(test.p1 / test.p0)
    if test.n > test.k:
        llr += (test.n - test.k) * math.log((1.0 - test.p1) / (1.0 - test.p0))
    return llr


def sequential_step(test: SequentialTest, mismatch: bool) -> tuple[Decision, SequentialTest]:
    """Feed one flip's verdict into the test; returns (decision, updated test)."""
    test = replace(test, n=test.n + 1, k=test.k + int(mismatch))
    if isinstance(test, ThresholdTest):
        if test.n >= test.min_samples and test.k / test.n > test.tau:
            return Decision.STOP_SUSPECT_CHEATING, test
        return Decision.CONTINUE, test
    llr = _sprt_llr(test)
    if llr >= math.log((1.0 - test.beta) / test.alpha):
        return Decision.STOP_SUSPECT_CHEATING, test
    if llr <= math.log(test.beta / (1.0 - test.alpha)):
        return Decision.STOP_LOOKS_HONEST, test
    return Decision.CONTINUE, test


def test_snapshot(test: Optional[SequentialTest], decision: Decision) -> dict:
    """JSON-ready view of a sequential test's state."""
    if test is None:
        return {"kind": "none", "n": 0, "k": 0, "decision": decision.value}
    if isinstance(test, ThresholdTest):
        return {
            "kind": "threshold",
            "tau": test.tau,
            "min_samples": test.min_samples,
            "n": test.n,
            "k": test.k,
            "decision": decision.value,
        }
    llr = None if test.n == 0 else _sprt_llr(test)
    if llr is not None and not math.isfinite(llr):
        llr = None  # overwhelming evidence; the decision field already says so
    return {
        "kind": "sprt",
        "p0": test.p0,
        "p1": test.p1,
        "alpha": test.alpha,
        "beta": test.beta,
        "n": test.n,
        "k": test.k,
        "llr": llr,
        "decision": decision.value,
    }


PREDICTION_CSV_COLUMNS = (
    "phi_deg",
    "V",
    "pA",
    "pB",
    "pstar_honest",
    "pstar_cheat_alice",
    "pstar_cheat_bob",
)


def prediction_rows(phis: list[float], visibilities: list[float]) -> list[dict]:
    """Prediction table rows (one per phi x V cell) in CSV column order."""
    rows = []
    for phi in phis:
        for v in visibilities:
            pred = predict(phi, v)
            rows.append(
                {
                    "phi_deg": math.degrees(phi),
                    "V": v,
                    "pA": pred.p_alice,
                    "pB": pred.p_bob,
                    "pstar_honest": pred.p_star_honest,
                    "pstar_cheat_alice": pred.p_star_cheat_alice,
                    "pstar_cheat_bob": pred.p_star_cheat_bob,
                }
            )
    return rows
