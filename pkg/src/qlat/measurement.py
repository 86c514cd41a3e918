"""Projective measurement calculus and the five compatibility criteria.

Each criterion has an exact operator-level check; the non-disturbance
criterion additionally has an operational Monte Carlo check built on seeded,
reproducible measurement sequences, so the equivalence of all five can be
audited rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .numerics import (
    DEFAULT_POLICY,
    HermitianOperator,
    Ket,
    Projection,
    TolerancePolicy,
    commutator_norm,
    spectral_decompose,
)

__all__ = [
    "Observable",
    "MeasurementOutcome",
    "SeededRng",
    "CompatibilityVerdict",
    "haar_random_ket",
    "born_probability",
    "measure",
    "commutes",
    "nondisturbing",
    "sequential_disagreements",
    "nondisturbing_mc",
    "interposition_invariant",
    "sequence_symmetric",
    "joint_observable",
    "min_disagreement_probability",
    "mc_trial_floor",
    "compatibility_verdict",
]

_KNOWN_ALGORITHMS = ("pcg64",)


@dataclass(frozen=True)
class SeededRng:
    """Reproducible random source: identical seed and algorithm give an
    identical stream, and derived substreams are independent of evaluation
    order."""

    seed: int
    algorithm: str = "pcg64"

    def __post_init__(self) -> None:
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.algorithm not in _KNOWN_ALGORITHMS:
            raise ValueError(
                f"unknown rng algorithm {self.algorithm!r}, expected one of {_KNOWN_ALGORITHMS}"
            )

    def generator(self) -> np.random.Generator:
        return np.random.Generator(np.random.PCG64(np.random.SeedSequence(self.seed)))

    def substream(self, *key: int) -> np.random.Generator:
        """Generator for the substream addressed by the given index path."""
        seq = np.random.SeedSequence(self.seed, spawn_key=tuple(int(k) for k in key))
        return np.random.Generator(np.random.PCG64(seq))

    def derive(self, *key: int) -> "SeededRng":
        """New independent seeded source addressed by the given index path."""
        seq = np.random.SeedSequence(self.seed, spawn_key=tuple(int(k) for k in key))
        return SeededRng(int(seq.generate_state(1, np.uint64)[0]), self.algorithm)


def _generator_of(rng) -> np.random.Generator:
    if isinstance(rng, SeededRng):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected SeededRng or numpy Generator, got {type(rng).__name__}")


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian operator with its clustered spectral resolution.

    The spectrum lists (eigenvalue, eigenprojection) pairs with strictly
    ascending eigenvalues; the projections are mutually orthogonal and sum to
    the identity (guaranteed by spectral_decompose, re-checked in tests).
    """

    operator: HermitianOperator
    spectrum: tuple[tuple[float, Projection], ...]

    def __post_init__(self) -> None:
        spectrum = tuple((float(value), projection) for value, projection in self.spectrum)
        if not spectrum:
            raise ValueError("spectrum must be nonempty")
        dim = self.operator.dim
        for _, projection in spectrum:
            if projection.dim != dim:
                raise ValueError("spectral projection dimension mismatch")
        values = [value for value, _ in spectrum]
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError(f"eigenvalues must be strictly ascending, got {values}")
        object.__setattr__(self, "spectrum", spectrum)

    @classmethod
    def from_operator(cls, operator, pol: TolerancePolicy = DEFAULT_POLICY) -> "Observable":
        if not isinstance(operator, HermitianOperator):
            operator = HermitianOperator(operator)
        return cls(operator, tuple(spectral_decompose(operator, pol)))

    @classmethod
    def from_projection(cls, projection: Projection, pol: TolerancePolicy = DEFAULT_POLICY) -> "Observable":
        """The property as a yes/no observable with outcomes 0 and 1."""
        return cls.from_operator(HermitianOperator(projection.matrix), pol)

    @property
    def dim(self) -> int:
        return self.operator.dim

    @property
    def eigenvalues(self) -> tuple[float, ...]:
        return tuple(value for value, _ in self.spectrum)

    @cached_property
    def projection_stack(self) -> np.ndarray:
        stack = np.stack([projection.matrix for _, projection in self.spectrum])
        stack.setflags(write=False)
        return stack


@dataclass(frozen=True, eq=False)
class MeasurementOutcome:
    eigenvalue: float
    outcome_index: int
    probability: float
    post_state: Ket


def haar_random_ket(dim: int, rng) -> Ket:
    """Haar-distributed pure state: 2*dim independent Gaussians, normalized."""
    gen = _generator_of(rng)
    while True:
        raw = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
        norm = np.linalg.norm(raw)
        if norm > 1e-6:
            return Ket(raw / norm)


def born_probability(state: Ket, projection: Projection, pol: TolerancePolicy = DEFAULT_POLICY) -> float:
    """Probability of the yes outcome for the property in the given state."""
    if state.dim != projection.dim:
        raise ValueError(f"dimension mismatch: {state.dim} vs {projection.dim}")
    value = float(np.vdot(state.amplitudes, projection.matrix @ state.amplitudes).real)
    if value < -pol.prob_tol or value > 1.0 + pol.prob_tol:
        raise ValueError(f"probability {value!r} outside [0, 1] beyond tolerance")
    return min(max(value, 0.0), 1.0)


def measure(state: Ket, observable: Observable, rng, pol: TolerancePolicy = DEFAULT_POLICY) -> MeasurementOutcome:
    """One projective measurement: sample an outcome with Born weights and
    collapse onto the normalized projection of the state.

    Outcomes of zero probability are never sampled. ``rng`` may be a SeededRng
    (a fresh stream) or a numpy Generator (advances the caller's stream, which
    is what measurement sequences need).
    """
    if state.dim != observable.dim:
        raise ValueError(f"dimension mismatch: {state.dim} vs {observable.dim}")
    gen = _generator_of(rng)
    amplitudes = state.amplitudes
    stack = observable.projection_stack
    probabilities = np.einsum("i,kij,j->k", amplitudes.conj(), stack, amplitudes).real
    probabilities = np.clip(probabilities, 0.0, None)
    total = float(probabilities.sum())
    if abs(total - 1.0) > pol.prob_tol:
        raise ValueError(f"outcome probabilities sum to {total!r}, not 1")
    edges = np.cumsum(probabilities)
    index = int(np.searchsorted(edges, gen.random() * total, side="right"))
    if index >= probabilities.size:
        index = probabilities.size - 1
    if probabilities[index] <= 0.0:
        index = int(np.argmax(probabilities))
    collapsed = stack[index] @ amplitudes
    collapsed = collapsed / np.linalg.norm(collapsed)
    return MeasurementOutcome(
        eigenvalue=observable.spectrum[index][0],
        outcome_index=index,
        probability=float(min(probabilities[index], 1.0)),
        post_state=Ket(collapsed),
    )


def _check_pair(first: Observable, second: Observable) -> None:
    if first.dim != second.dim:
        raise ValueError(f"dimension mismatch: {first.dim} vs {second.dim}")


def commutes(first: Observable, second: Observable, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    """Commutation criterion on the representing operators."""
    _check_pair(first, second)
    return commutator_norm(first.operator, second.operator) < pol.op_tol * first.dim


def _max_sandwich_defect(first: Observable, second: Observable) -> float:
    """max over (n, p) of |(I - P_n) Q_p P_n|_F with P from first, Q from second."""
    eye = np.eye(first.dim, dtype=np.complex128)
    worst = 0.0
    for _, p in first.spectrum:
        complement = eye - p.matrix
        for _, q in second.spectrum:
            worst = max(worst, float(np.linalg.norm(complement @ q.matrix @ p.matrix)))
    return worst


def nondisturbance_residual(first: Observable, second: Observable) -> float:
    """Largest leakage of any eigenspace of either observable under a
    measurement of the other; zero exactly when sequential measurements in
    either order leave each other's results intact."""
    _check_pair(first, second)
    return max(_max_sandwich_defect(first, second), _max_sandwich_defect(second, first))


def nondisturbing(first: Observable, second: Observable, pol: TolerancePolicy = DEFAULT_POLICY) -> bool:
    """Exact non-disturbance criterion, imposed in both measurement orders."""
    return nondisturbance_residual(first, second) < pol.op_tol


def interposition_residual(first: Observable, second: Observable) -> float:
    worst = 0.0
    for outer, inner in ((first, second), (second, first)):
        for _, q in inner.spectrum:
            mixed = sum(
                p.matrix @ q.matrix @ p.matrix for _, p in outer.spectrum
            )
            worst = max(worst, float(np.linalg.norm(q.matrix - mixed)))
    return worst


def interposition_invariant(
    first: Observable, second: Observable, pol: TolerancePolicy = DEFAULT_POLICY
) -> bool:
    """True iff a nonselective measurement of either observable, interposed,
    leaves every outcome projection of the other unchanged."""
    _check_pair(first, second)
    return interposition_residual(first, second) < pol.op_tol * first.dim


def sequence_symmetry_residual(first: Observable, second: Observable) -> float:
    worst = 0.0
    for _, p in first.spectrum:
        for _, q in second.spectrum:
            forward = p.matrix @ q.matrix @ p.matrix
            backward = q.matrix @ p.matrix @ q.matrix
            worst = max(worst, float(np.linalg.norm(forward - backward)))
    return worst


def sequence_symmetric(
    first: Observable, second: Observable, pol: TolerancePolicy = DEFAULT_POLICY
) -> bool:
    """True iff 'outcome b then c' and 'outcome c then b' are equally likely
    for every outcome pair and every state; operator equality of the two
    sandwich products is equivalent to equality of the quadratic forms."""
    _check_pair(first, second)
    return sequence_symmetry_residual(first, second) < pol.op_tol


def joint_observable(
    first: Observable, second: Observable, pol: TolerancePolicy = DEFAULT_POLICY
) -> Observable | None:
    """Commeasurability witness.

    For a commuting pair, returns an observable whose eigenprojections are
    the nonzero products P_n Q_p and whose eigenvalue n * K + p (K the number
    of second-observable outcomes) injectively encodes the outcome pair, so a
    single measurement determines a value for both observables. Returns None
    for non-commuting pairs.
    """
    _check_pair(first, second)
    if not commutes(first, second, pol):
        return None
    k = len(second.spectrum)
    entries: list[tuple[float, Projection]] = []
    for n, (_, p) in enumerate(first.spectrum):
        for q_index, (_, q) in enumerate(second.spectrum):
            product = p.matrix @ q.matrix
            if float(np.trace(product).real) < 0.5:
                continue
            entries.append((float(n * k + q_index), Projection(product)))
    operator = sum(value * projection.matrix for value, projection in entries)
    return Observable(HermitianOperator(operator), tuple(entries))


def _sequence_disagrees(
    first: Observable, second: Observable, state: Ket, gen: np.random.Generator,
    pol: TolerancePolicy,
) -> bool:
    opening = measure(state, first, gen, pol)
    interposed = measure(opening.post_state, second, gen, pol)
    closing = measure(interposed.post_state, first, gen, pol)
    return closing.outcome_index != opening.outcome_index


def sequential_disagreements(
    first: Observable,
    second: Observable,
    trials: int,
    rng: SeededRng,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> tuple[int, int]:
    """Simulated first-second-first and second-first-second measurement runs
    on Haar-random states; returns the per-order disagreement counts.

    Each trial draws from its own substream of (seed, trial index), so the
    totals do not depend on execution order and are reproducible per seed.
    """
    _check_pair(first, second)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    forward = 0
    backward = 0
    for trial in range(trials):
        gen = rng.substream(trial)
        forward += _sequence_disagrees(first, second, haar_random_ket(first.dim, gen), gen, pol)
        backward += _sequence_disagrees(second, first, haar_random_ket(first.dim, gen), gen, pol)
    return forward, backward


def nondisturbing_mc(
    first: Observable,
    second: Observable,
    trials: int,
    rng: SeededRng,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> tuple[bool, int]:
    """Operational non-disturbance check: (no disagreement seen, total count)."""
    forward, backward = sequential_disagreements(first, second, trials, rng, pol)
    count = forward + backward
    return count == 0, count


def min_disagreement_probability(first: Observable, second: Observable) -> float:
    """Analytic lower bound on the per-trial disagreement probability over
    Haar-random initial states.

    For one first-second-first run the disagreement probability of a state
    psi is sum over (n, p) of |(I - P_n) Q_p P_n psi|^2, whose Haar average
    is the squared-Frobenius sum divided by the dimension. A trial runs both
    orders on independent states, so the larger of the two averages bounds
    the per-trial disagreement probability from below.
    """
    _check_pair(first, second)
    dim = first.dim
    eye = np.eye(dim, dtype=np.complex128)
    averages = []
    for outer, inner in ((first, second), (second, first)):
        total = 0.0
        for _, p in outer.spectrum:
            complement = eye - p.matrix
            for _, q in inner.spectrum:
                total += float(np.linalg.norm(complement @ q.matrix @ p.matrix) ** 2)
        averages.append(total / dim)
    return max(averages)


def mc_trial_floor(first: Observable, second: Observable) -> int:
    """Trials needed so that a pair violating exact non-disturbance passes a
    zero-disagreement Monte Carlo run with probability below e**-50."""
    rate = min_disagreement_probability(first, second)
    if rate <= 0.0:
        return 2**62
    return min(2**62, math.ceil(50.0 / rate))


@dataclass(frozen=True, eq=False)
class CompatibilityVerdict:
    """Per-pair record of the five compatibility criteria plus evidence.

    ``coincide`` states that the five exact verdicts agree; ``mc_consistent``
    states that the operational run matches the exact non-disturbance verdict
    (zero disagreements when it holds, at least one when it fails and the
    trial count reaches the analytic floor).
    """

    commutation: bool
    nondisturbance: bool
    mc_passed: bool
    mc_trials: int
    mc_disagreements: int
    mc_floor: int
    interposition: bool
    sequence_symmetry: bool
    commeasurable: bool
    joint: Observable | None
    max_violation: float
    coincide: bool
    mc_consistent: bool


def compatibility_verdict(
    first: Observable,
    second: Observable,
    pol: TolerancePolicy = DEFAULT_POLICY,
    trials: int = 1000,
    rng: SeededRng | None = None,
) -> CompatibilityVerdict:
    """Evaluate all five compatibility criteria on one observable pair.

    The five exact criteria are computed independently of each other; their
    agreement is the quantity under audit here, not an assumption.
    """
    _check_pair(first, second)
    if rng is None:
        rng = SeededRng(0)
    dim = first.dim

    commutation_defect = commutator_norm(first.operator, second.operator)
    commutation = commutation_defect < pol.op_tol * dim

    nd_defect = nondisturbance_residual(first, second)
    has_nondisturbance = nd_defect < pol.op_tol

    ip_defect = interposition_residual(first, second)
    interposition = ip_defect < pol.op_tol * dim

    seq_defect = sequence_symmetry_residual(first, second)
    symmetry = seq_defect < pol.op_tol

    joint = joint_observable(first, second, pol)
    commeasurable = joint is not None

    forward, backward = sequential_disagreements(first, second, trials, rng, pol)
    count = forward + backward
    floor = 0 if has_nondisturbance else mc_trial_floor(first, second)
    if has_nondisturbance:
        mc_consistent = count == 0
    else:
        mc_consistent = count > 0 or trials < floor

    verdicts = (commutation, has_nondisturbance, interposition, symmetry, commeasurable)
    coincide = len(set(verdicts)) == 1
    failed_defects = [
        defect
        for verdict, defect in (
            (commutation, commutation_defect),
            (has_nondisturbance, nd_defect),
            (interposition, ip_defect),
            (symmetry, seq_defect),
            (commeasurable, commutation_defect),
        )
        if not verdict
    ]
    return CompatibilityVerdict(
        commutation=commutation,
        nondisturbance=has_nondisturbance,
        mc_passed=count == 0,
        mc_trials=trials,
        mc_disagreements=count,
        mc_floor=floor,
        interposition=interposition,
        sequence_symmetry=symmetry,
        commeasurable=commeasurable,
        joint=joint,
        max_violation=max(failed_defects, default=0.0),
        coincide=coincide,
        mc_consistent=mc_consistent,
    )
