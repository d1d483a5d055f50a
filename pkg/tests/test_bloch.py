import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qflip.bloch import (
    PI,
    CircleDensity,
    StateAngle,
    depolarize,
    helstrom_guess_prob,
    max_confidence,
    measure,
    overlap_prob,
    posterior_zero,
    protocol_state_set,
    state_from_angle,
)

from conftest import rng_of

FAIR = math.acos(4 / 5)
BB84 = PI / 4

finite_angles = st.floats(min_value=-50.0, max_value=50.0, allow_nan=False)


class TestStateAngle:
    def test_zero_is_ket0(self):
        c, s = state_from_angle(0.0).amplitudes()
        assert (c, s) == (1.0, 0.0)

    def test_half_pi_is_ket1(self):
        c, s = state_from_angle(PI / 2).amplitudes()
        assert c == pytest.approx(0.0, abs=1e-15)
        assert s == 1.0

    def test_quarter_pi_is_plus_state(self):
        c, s = state_from_angle(PI / 4).amplitudes()
        assert c == pytest.approx(math.sqrt(2) / 2, abs=1e-15)
        assert s == pytest.approx(math.sqrt(2) / 2, abs=1e-15)

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            state_from_angle(bad)

    @given(finite_angles)
    def test_canonical_range(self, theta):
        assert 0.0 <= state_from_angle(theta).theta < PI

    @given(finite_angles)
    def test_global_sign_identified(self, theta):
        # theta and theta + pi are the same physical state
        assert state_from_angle(theta).theta == pytest.approx(
            state_from_angle(theta + PI).theta, abs=1e-9
        )

    def test_pi_maps_to_zero(self):
        assert state_from_angle(PI).theta == 0.0


class TestOverlap:
    def test_identical(self):
        assert overlap_prob(StateAngle(0.3), StateAngle(0.3)) == 1.0

    def test_orthogonal(self):
        assert overlap_prob(StateAngle(0.0), StateAngle(PI / 2)) == pytest.approx(0.0, abs=1e-30)

    def test_cheat_state_vs_nearest_honest(self):
        # 67.5 degrees against 45 degrees: cos^2(22.5 deg) = (2 + sqrt 2)/4
        a0 = StateAngle(math.radians(67.5))
        psi10 = StateAngle(math.radians(45.0))
        assert overlap_prob(a0, psi10) == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-12)

    @given(finite_angles, finite_angles)
    def test_symmetric_and_in_range(self, s, t):
        p = overlap_prob(StateAngle(s), StateAngle(t))
        assert 0.0 <= p <= 1.0
        assert p == pytest.approx(overlap_prob(StateAngle(t), StateAngle(s)), abs=1e-12)


class TestProtocolStateSet:
    def test_bb84_angles(self):
        sset = protocol_state_set(BB84)
        degs = [math.degrees(s.theta) for s in sset.honest_states]
        assert degs == pytest.approx([0.0, 90.0, 45.0, 135.0])
        assert math.degrees(sset.alice_cheat[0].theta) == pytest.approx(67.5)
        assert math.degrees(sset.alice_cheat[1].theta) == pytest.approx(157.5)
        assert math.degrees(sset.bob_cheat_basis.theta) == pytest.approx(22.5)

    def test_fair_angles(self):
        sset = protocol_state_set(FAIR)
        assert math.degrees(sset.alice_cheat[0].theta) == pytest.approx(63.43, abs=0.01)
        assert math.degrees(sset.bob_cheat_basis.theta) == pytest.approx(18.43, abs=0.01)

    def test_thirty_degree_midpoints(self):
        sset = protocol_state_set(math.radians(30))
        assert math.degrees(sset.alice_cheat[0].theta) == pytest.approx(60.0)
        assert math.degrees(sset.bob_cheat_basis.theta) == pytest.approx(15.0)

    @pytest.mark.parametrize("phi", [0.0, -0.1, PI / 4 + 0.01, math.nan])
    def test_rejects_out_of_range(self, phi):
        with pytest.raises(ValueError):
            protocol_state_set(phi)

    @given(st.floats(min_value=1e-6, max_value=PI / 4))
    def test_cheat_states_equidistant(self, phi):
        # A0 halfway between psi(1,0) and psi(0,1); A1 between psi(1,1) and psi(0,0)
        sset = protocol_state_set(phi)
        gap = math.cos((PI / 2 - phi) / 2) ** 2
        a0, a1 = sset.alice_cheat
        assert overlap_prob(a0, sset.psi10) == pytest.approx(gap, abs=1e-12)
        assert overlap_prob(a0, sset.psi01) == pytest.approx(gap, abs=1e-12)
        assert overlap_prob(a1, sset.psi11) == pytest.approx(gap, abs=1e-12)
        assert overlap_prob(a1, sset.psi00) == pytest.approx(gap, abs=1e-12)
        assert overlap_prob(a0, a1) == pytest.approx(0.0, abs=1e-12)


class TestDepolarize:
    def test_v1_identity(self):
        state = CircleDensity.pure(StateAngle(0.7))
        assert depolarize(state, 1.0) == state

    def test_v0_maximally_mixed(self):
        mixed = depolarize(CircleDensity.pure(StateAngle(0.7)), 0.0)
        assert mixed.purity == 0.0
        assert np.allclose(mixed.matrix(), np.eye(2) / 2)

    def test_outcome_one_probability_against_density_matrix(self):
        # independent oracle: rho = V|0><0| + (1-V) I/2, p(1) = <1|rho|1>
        v = 0.92
        ket0 = np.array([1.0, 0.0])
        ket1 = np.array([0.0, 1.0])
        rho = v * np.outer(ket0, ket0) + (1 - v) * np.eye(2) / 2
        p1_oracle = float(ket1 @ rho @ ket1)
        assert p1_oracle == pytest.approx(0.04, abs=1e-15)

        state = depolarize(CircleDensity.pure(StateAngle(0.0)), v)
        assert 1.0 - state.prob_zero(StateAngle(0.0)) == pytest.approx(p1_oracle, abs=1e-12)
        draws = 10**5
        rng = rng_of(11)
        ones = sum(measure(state, StateAngle(0.0), rng) for _ in range(draws))
        sigma = math.sqrt(p1_oracle * (1 - p1_oracle) / draws)
        assert abs(ones / draws - p1_oracle) < 4 * sigma

    @given(
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
        finite_angles,
    )
    def test_composition_is_multiplicative(self, v1, v2, theta):
        state = CircleDensity.pure(StateAngle(theta))
        twice = depolarize(depolarize(state, v1), v2)
        once = depolarize(state, v1 * v2)
        assert twice.theta == once.theta
        assert twice.purity == pytest.approx(once.purity, abs=1e-15)

    @given(st.floats(min_value=0.0, max_value=1.0), finite_angles)
    def test_trace_and_positivity(self, v, theta):
        rho = depolarize(CircleDensity.pure(StateAngle(theta)), v).matrix()
        assert np.trace(rho) == pytest.approx(1.0, abs=1e-12)
        assert min(np.linalg.eigvalsh(rho)) >= -1e-12

    @pytest.mark.parametrize("bad", [-0.1, 1.1, math.nan])
    def test_rejects_bad_visibility(self, bad):
        with pytest.raises(ValueError):
            depolarize(CircleDensity.pure(StateAngle(0.0)), bad)


class TestMeasure:
    def test_eigenstate_is_deterministic(self):
        rng = rng_of(5)
        state = CircleDensity.pure(StateAngle(0.0))
        assert all(measure(state, StateAngle(0.0), rng) == 0 for _ in range(200))

    def test_diagonal_state_is_even(self):
        rng = rng_of(6)
        state = CircleDensity.pure(StateAngle(PI / 4))
        n = 10**5
        ones = sum(measure(state, StateAngle(0.0), rng) for _ in range(n))
        assert abs(ones / n - 0.5) < 4 * math.sqrt(0.25 / n)

    def test_fair_state_in_cheat_basis_is_ninety_percent(self):
        sset = protocol_state_set(FAIR)
        state = CircleDensity.pure(sset.psi10)
        assert state.prob_zero(sset.bob_cheat_basis) == pytest.approx(0.9, abs=1e-12)
        rng = rng_of(7)
        n = 10**5
        zeros = sum(1 - measure(state, sset.bob_cheat_basis, rng) for _ in range(n))
        assert abs(zeros / n - 0.9) < 4 * math.sqrt(0.09 / n)

    def test_consumes_exactly_one_draw(self):
        class CountingRng:
            def __init__(self):
                self.calls = 0

            def random(self):
                self.calls += 1
                return 0.25

        rng = CountingRng()
        state = CircleDensity(StateAngle(0.3), 0.8)
        for expected in range(1, 6):
            measure(state, StateAngle(1.0), rng)
            assert rng.calls == expected

    def test_single_draw_semantics_match_vectorized(self):
        # measure() is "one uniform, compare against p0"; the same stream
        # consumed vectorized must reproduce the exact outcome sequence.
        state = CircleDensity(StateAngle(0.4), 0.9)
        basis = StateAngle(1.1)
        p0 = state.prob_zero(basis)
        n = 2000
        gen = rng_of(99)
        looped = [measure(state, basis, gen) for _ in range(n)]
        # fresh generator, same seed, same draw order
        vector = (rng_of(99).random(n) >= p0).astype(int)
        assert looped == list(vector)

    def test_born_grid_within_four_sigma(self):
        # 20x20 (state, basis) grid, 1e5 draws per cell, vectorized with the
        # same one-uniform-per-click semantics as measure().
        n = 10**5
        thetas = np.linspace(0.0, PI, 20, endpoint=False)
        bases = np.linspace(0.0, PI, 20, endpoint=False)
        rng = rng_of(123)
        purity = 0.97
        for theta in thetas:
            p0s = purity * np.cos(theta - bases) ** 2 + (1 - purity) / 2
            draws = rng.random((bases.size, n))
            freq0 = (draws < p0s[:, None]).mean(axis=1)
            sigma = np.sqrt(p0s * (1 - p0s) / n)
            assert np.all(np.abs(freq0 - p0s) < 4 * np.maximum(sigma, 1e-9))


def _protocol_ensembles(phi):
    sset = protocol_state_set(phi)
    ens0 = [(sset.psi00, 0.5), (sset.psi10, 0.5)]
    ens1 = [(sset.psi01, 0.5), (sset.psi11, 0.5)]
    return ens0, ens1


class TestHelstrom:
    def test_bb84_value_and_angle(self):
        p, basis = helstrom_guess_prob(*_protocol_ensembles(BB84))
        assert p == pytest.approx((2 + math.sqrt(2)) / 4, abs=1e-12)
        assert math.degrees(basis.theta) == pytest.approx(22.5, abs=1e-9)

    def test_identical_ensembles(self):
        ens = [(StateAngle(0.2), 0.5), (StateAngle(1.0), 0.5)]
        p, _ = helstrom_guess_prob(ens, ens)
        assert p == pytest.approx(0.5, abs=1e-12)

    def test_orthogonal_pure_states(self):
        p, basis = helstrom_guess_prob([(StateAngle(0.0), 1.0)], [(StateAngle(PI / 2), 1.0)])
        assert p == pytest.approx(1.0, abs=1e-12)
        assert basis.theta == pytest.approx(0.0, abs=1e-9)

    def test_empty_ensemble_rejected(self):
        with pytest.raises(ValueError):
            helstrom_guess_prob([], [(StateAngle(0.0), 1.0)])

    def test_bad_weights_rejected(self):
        with pytest.raises(ValueError):
            helstrom_guess_prob([(StateAngle(0.0), 0.7)], [(StateAngle(1.0), 1.0)])

    def test_matches_closed_form_on_grid(self):
        for phi in np.linspace(1e-4, PI / 4, 100):
            p, basis = helstrom_guess_prob(*_protocol_ensembles(phi))
            assert abs(p - math.cos(phi / 2) ** 2) < 1e-12
            assert abs(basis.theta - phi / 2) < 1e-9


def _posterior_oracle(phi, theta):
    # enumerate the four honest likelihoods directly
    sset = protocol_state_set(phi)
    likes = {(x, a): math.cos(theta - sset.honest(x, a).theta) ** 2 for x in (0, 1) for a in (0, 1)}
    total = sum(likes.values())
    q0 = (likes[(0, 0)] + likes[(1, 0)]) / total
    return max(q0, 1 - q0)


class TestMaxConfidence:
    def test_fair_phi_at_half_phi(self):
        assert _posterior_oracle(FAIR, FAIR / 2) == pytest.approx(0.9, abs=1e-12)
        assert max_confidence(FAIR, FAIR / 2) == pytest.approx(0.9, abs=1e-12)

    def test_bb84_at_cheat_basis(self):
        expected = (2 + math.sqrt(2)) / 4
        assert _posterior_oracle(BB84, math.radians(22.5)) == pytest.approx(expected, abs=1e-12)
        assert max_confidence(BB84, math.radians(22.5)) == pytest.approx(expected, abs=1e-12)

    @given(st.floats(min_value=1e-4, max_value=PI / 4), finite_angles)
    def test_agrees_with_enumeration(self, phi, theta):
        assert max_confidence(phi, theta) == pytest.approx(_posterior_oracle(phi, theta), abs=1e-9)

    def test_mean_posterior_is_half(self):
        thetas = np.linspace(0.0, PI, 10_000, endpoint=False)
        q = np.array([posterior_zero(0.5, t) for t in thetas])
        assert q.mean() == pytest.approx(0.5, abs=1e-9)

    @settings(deadline=None)
    @given(st.floats(min_value=1e-3, max_value=PI / 4))
    def test_ceiling_attained_at_half_phi(self, phi):
        thetas = np.linspace(0.0, PI, 10_000, endpoint=False)
        confidences = np.maximum(
            (np.cos(thetas) ** 2 + np.cos(thetas - phi) ** 2) / 2,
            1 - (np.cos(thetas) ** 2 + np.cos(thetas - phi) ** 2) / 2,
        )
        ceiling = math.cos(phi / 2) ** 2
        assert abs(confidences.max() - ceiling) < 1e-6
        assert max_confidence(phi, phi / 2) == pytest.approx(ceiling, abs=1e-12)

    def test_ceiling_grid_full(self):
        # the machine-checkable no-advantage statement for false loss claims
        thetas = np.linspace(0.0, PI, 10_000, endpoint=False)
        cos2 = np.cos(thetas) ** 2
        for phi in np.linspace(1e-3, PI / 4, 100):
            q = (cos2 + np.cos(thetas - phi) ** 2) / 2
            best = np.maximum(q, 1 - q).max()
            assert abs(best - math.cos(phi / 2) ** 2) < 1e-6
