import numpy as np
import pytest

from qlat import (
    Ket,
    Observable,
    SeededRng,
    born_probability,
    commutes,
    compatibility_verdict,
    generate_observable_pair,
    haar_random_ket,
    interposition_invariant,
    joint_observable,
    leq,
    matrices_close,
    mc_trial_floor,
    measure,
    min_disagreement_probability,
    nondisturbing,
    nondisturbing_mc,
    sequence_symmetric,
    sequential_disagreements,
)
from qlat.measurement import (
    interposition_residual,
    nondisturbance_residual,
    sequence_symmetry_residual,
)


@pytest.fixture(scope="module")
def sigma_z():
    return Observable.from_operator(np.diag([1.0, -1.0]).astype(complex))


@pytest.fixture(scope="module")
def sigma_x():
    return Observable.from_operator(np.array([[0, 1], [1, 0]], dtype=complex))


@pytest.fixture(scope="module")
def diag_a():
    return Observable.from_operator(np.diag([1.0, 2.0]))


@pytest.fixture(scope="module")
def diag_b():
    return Observable.from_operator(np.diag([3.0, 4.0]))


class TestObservable:
    def test_spectrum_is_ascending(self, sigma_z):
        assert sigma_z.eigenvalues == (-1.0, 1.0)

    def test_rejects_unsorted_spectrum(self, sigma_z):
        flipped = tuple(reversed(sigma_z.spectrum))
        with pytest.raises(ValueError, match="ascending"):
            Observable(sigma_z.operator, flipped)

    def test_from_projection_is_dichotomic(self, pplus):
        observable = Observable.from_projection(pplus)
        assert observable.eigenvalues == (0.0, 1.0)
        assert matrices_close(observable.spectrum[1][1], pplus)

    def test_from_projection_trivial_bounds(self):
        from qlat import identity_projection, zero_projection

        assert Observable.from_projection(zero_projection(3)).eigenvalues == (0.0,)
        assert Observable.from_projection(identity_projection(3)).eigenvalues == (1.0,)


class TestSeededRng:
    def test_same_seed_same_stream(self):
        a = SeededRng(123).generator().random(5)
        b = SeededRng(123).generator().random(5)
        assert np.array_equal(a, b)

    def test_substreams_differ(self):
        rng = SeededRng(5)
        assert not np.array_equal(rng.substream(0).random(4), rng.substream(1).random(4))

    def test_derive_is_stable(self):
        assert SeededRng(9).derive(3, 1) == SeededRng(9).derive(3, 1)

    def test_rejects_unknown_algorithm(self):
        with pytest.raises(ValueError, match="algorithm"):
            SeededRng(0, algorithm="mt19937")

    def test_rejects_out_of_range_seed(self):
        with pytest.raises(ValueError, match="seed"):
            SeededRng(2**64)


class TestBornProbability:
    def test_eigenvector(self, p0):
        assert born_probability(Ket.basis(2, 0), p0) == 1.0

    def test_orthogonal(self, p1):
        assert born_probability(Ket.basis(2, 0), p1) == 0.0

    def test_superposition(self, p0, plus_ket):
        assert born_probability(plus_ket, p0) == pytest.approx(0.5)

    def test_dim_mismatch(self, p0):
        with pytest.raises(ValueError, match="mismatch"):
            born_probability(Ket.basis(3, 0), p0)


class TestMeasure:
    def test_eigenstate_is_deterministic(self, sigma_z):
        for seed in range(20):
            outcome = measure(Ket.basis(2, 0), sigma_z, SeededRng(seed))
            assert outcome.eigenvalue == 1.0
            assert outcome.probability == pytest.approx(1.0)
            assert np.allclose(outcome.post_state.amplitudes, [1.0, 0.0])

    def test_superposition_frequencies(self, sigma_z, plus_ket):
        gen = SeededRng(7).generator()
        hits = sum(measure(plus_ket, sigma_z, gen).eigenvalue == 1.0 for _ in range(4000))
        assert 0.45 < hits / 4000 < 0.55

    def test_post_state_is_matching_basis_vector(self, sigma_z, plus_ket):
        gen = SeededRng(8).generator()
        for _ in range(50):
            outcome = measure(plus_ket, sigma_z, gen)
            expected = Ket.basis(2, 0 if outcome.eigenvalue == 1.0 else 1)
            assert np.allclose(np.abs(outcome.post_state.amplitudes), expected.amplitudes)

    def test_sampled_outcome_has_positive_probability(self):
        observable = Observable.from_operator(np.diag([0.0, 1.0, 2.0]))
        gen = SeededRng(9).generator()
        for _ in range(200):
            outcome = measure(Ket.normalized([1.0, 1.0, 0.0]), observable, gen)
            assert outcome.probability > 0.0
            assert outcome.eigenvalue in (0.0, 1.0)

    def test_repeatability(self):
        from qlat.experiments import random_hermitian

        rng = SeededRng(10)
        gen = rng.generator()
        observable = None
        violations = 0
        for trial in range(10_000):
            if trial % 200 == 0:
                dim = int(gen.integers(2, 7))
                observable = Observable.from_operator(random_hermitian(dim, gen))
            state = haar_random_ket(observable.dim, gen)
            first = measure(state, observable, gen)
            second = measure(first.post_state, observable, gen)
            violations += second.outcome_index != first.outcome_index
            assert second.probability == pytest.approx(1.0)
        assert violations == 0

    def test_nonselective_probabilities_sum_to_one(self, pol):
        rng = SeededRng(11)
        gen = rng.generator()
        from qlat.experiments import random_hermitian

        for _ in range(200):
            dim = int(gen.integers(2, 8))
            observable = Observable.from_operator(random_hermitian(dim, gen))
            state = haar_random_ket(dim, gen)
            total = sum(
                born_probability(state, projection, pol)
                for _, projection in observable.spectrum
            )
            assert total == pytest.approx(1.0, abs=pol.prob_tol)


class TestExactRelations:
    def test_commutation(self, sigma_z, sigma_x, diag_a, diag_b):
        assert commutes(diag_a, diag_b)
        assert not commutes(sigma_z, sigma_x)
        assert commutes(sigma_z, sigma_z)

    def test_nondisturbance(self, sigma_z, sigma_x, diag_a, diag_b):
        assert nondisturbing(diag_a, diag_b)
        assert not nondisturbing(sigma_z, sigma_x)
        assert nondisturbing(sigma_z, sigma_z)

    def test_nondisturbance_residual_value(self, sigma_z, sigma_x):
        # (I - |0><0|) |+><+| |0><0| is rank one with entry 1/2
        assert nondisturbance_residual(sigma_z, sigma_x) == pytest.approx(0.5)

    def test_interposition(self, sigma_z, sigma_x, diag_a, diag_b):
        assert interposition_invariant(diag_a, diag_b)
        assert interposition_invariant(sigma_z, sigma_z)
        assert not interposition_invariant(sigma_z, sigma_x)

    def test_interposition_residual_value(self, sigma_z, sigma_x):
        # sum_n P_n |+><+| P_n = I/2, distance to |+><+| is 1/sqrt(2)
        assert interposition_residual(sigma_z, sigma_x) == pytest.approx(1 / np.sqrt(2))

    def test_sequence_symmetry(self, sigma_z, sigma_x, diag_a, diag_b):
        assert sequence_symmetric(diag_a, diag_b)
        assert sequence_symmetric(sigma_x, sigma_x)
        assert not sequence_symmetric(sigma_z, sigma_x)

    def test_sequence_symmetry_residual_value(self, sigma_z, sigma_x):
        # P0 Px P0 = |0><0|/2 against Px P0 Px = |+><+|/2
        assert sequence_symmetry_residual(sigma_z, sigma_x) == pytest.approx(0.5)

    def test_relations_reflexive_and_symmetric(self, pol):
        rng = SeededRng(21)
        gen = rng.generator()
        for trial in range(60):
            dim = int(gen.integers(2, 6))
            first, second = generate_observable_pair(dim, trial % 2 == 0, gen, pol)
            for relation in (commutes, nondisturbing, interposition_invariant, sequence_symmetric):
                assert relation(first, first, pol)
                assert relation(first, second, pol) == relation(second, first, pol)


class TestJointObservable:
    def test_self_pair(self, sigma_z):
        joint = joint_observable(sigma_z, sigma_z)
        assert joint is not None
        for (_, joint_projection), (_, original) in zip(joint.spectrum, sigma_z.spectrum):
            assert leq(joint_projection, original)

    def test_degenerate_pair_resolves_axes(self):
        first = Observable.from_operator(np.diag([1.0, 1.0, 2.0]))
        second = Observable.from_operator(np.diag([3.0, 4.0, 4.0]))
        joint = joint_observable(first, second)
        assert joint is not None
        assert len(joint.spectrum) == 3
        ranks = [projection.rank for _, projection in joint.spectrum]
        assert ranks == [1, 1, 1]
        axes = [np.argmax(np.diag(projection.matrix).real) for _, projection in joint.spectrum]
        assert sorted(axes) == [0, 1, 2]

    def test_noncommuting_pair_has_no_witness(self, sigma_z, sigma_x):
        assert joint_observable(sigma_z, sigma_x) is None

    def test_witness_determines_both_values(self, pol):
        gen = SeededRng(22).generator()
        for _ in range(30):
            dim = int(gen.integers(2, 6))
            first, second = generate_observable_pair(dim, True, gen, pol)
            joint = joint_observable(first, second, pol)
            assert joint is not None
            for _, joint_projection in joint.spectrum:
                below_first = sum(leq(joint_projection, p, pol) for _, p in first.spectrum)
                below_second = sum(leq(joint_projection, p, pol) for _, p in second.spectrum)
                assert below_first == 1
                assert below_second == 1


class TestMonteCarlo:
    def test_commuting_pair_never_disagrees(self, diag_a, diag_b):
        ok, count = nondisturbing_mc(diag_a, diag_b, 2000, SeededRng(31))
        assert ok and count == 0

    def test_noncommuting_pair_disagrees_at_half_rate(self, sigma_z, sigma_x):
        forward, backward = sequential_disagreements(sigma_z, sigma_x, 4000, SeededRng(32))
        assert 0.45 < forward / 4000 < 0.55
        assert 0.45 < backward / 4000 < 0.55
        ok, count = nondisturbing_mc(sigma_z, sigma_x, 1000, SeededRng(33))
        assert not ok and count > 0

    def test_rejects_zero_trials(self, sigma_z, sigma_x):
        with pytest.raises(ValueError, match="trials"):
            sequential_disagreements(sigma_z, sigma_x, 0, SeededRng(0))

    def test_deterministic_per_seed(self, sigma_z, sigma_x):
        first = sequential_disagreements(sigma_z, sigma_x, 500, SeededRng(34))
        second = sequential_disagreements(sigma_z, sigma_x, 500, SeededRng(34))
        assert first == second

    def test_analytic_rate_and_floor(self, sigma_z, sigma_x, diag_a, diag_b):
        assert min_disagreement_probability(sigma_z, sigma_x) == pytest.approx(0.5)
        # ceil of 50 / 0.5 up to float rounding, never below the exact value
        assert 100 <= mc_trial_floor(sigma_z, sigma_x) <= 101
        assert min_disagreement_probability(diag_a, diag_b) == pytest.approx(0.0, abs=1e-28)
        assert mc_trial_floor(diag_a, diag_b) == 2**62

    def test_analytic_rate_matches_observed_frequency(self, pol):
        # dual route: the Haar-averaged squared-residual sum must predict the
        # simulated first-second-first disagreement frequency
        gen = SeededRng(35).generator()
        trials = 4000
        for offset in range(3):
            dim = 2 + offset
            first, second = generate_observable_pair(dim, False, gen, pol)
            eye = np.eye(dim)
            analytic = sum(
                np.linalg.norm((eye - p.matrix) @ q.matrix @ p.matrix) ** 2
                for _, p in first.spectrum
                for _, q in second.spectrum
            ) / dim
            forward, _ = sequential_disagreements(
                first, second, trials, SeededRng(36 + offset), pol
            )
            assert abs(forward / trials - analytic) < 0.04


class TestCompatibilityVerdict:
    def test_commuting_pair_all_true(self, diag_a, diag_b):
        verdict = compatibility_verdict(diag_a, diag_b, trials=200, rng=SeededRng(41))
        assert verdict.coincide
        assert verdict.commutation and verdict.nondisturbance
        assert verdict.commeasurable and verdict.joint is not None
        assert verdict.mc_consistent and verdict.mc_disagreements == 0
        assert verdict.max_violation == 0.0

    def test_pauli_pair_all_false(self, sigma_z, sigma_x):
        verdict = compatibility_verdict(sigma_z, sigma_x, trials=200, rng=SeededRng(42))
        assert verdict.coincide
        assert not (
            verdict.commutation
            or verdict.nondisturbance
            or verdict.interposition
            or verdict.sequence_symmetry
            or verdict.commeasurable
        )
        assert verdict.mc_consistent and verdict.mc_disagreements > 0
        assert verdict.max_violation == pytest.approx(2 * np.sqrt(2))

    def test_random_ensemble_coincides(self, pol):
        rng = SeededRng(43)
        gen = rng.generator()
        for trial in range(1000):
            dim = 2 + trial % 7
            first, second = generate_observable_pair(dim, trial % 2 == 0, gen, pol)
            verdict = compatibility_verdict(
                first, second, pol, trials=16, rng=rng.derive(trial)
            )
            assert verdict.coincide
            assert verdict.mc_consistent
