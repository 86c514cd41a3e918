"""Seeded verification campaigns: model generation, per-experiment runners,
and versioned JSON reports built for exact re-runs."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .domains import (
    PureStateModel,
    compatible_domain,
    objective_domain,
    pivot_residual,
    predictable_domain,
)
from .lattice import (
    PropertyFamily,
    check_covering,
    check_orthomodular,
    is_atom,
    join,
    leq,
    meet,
    orthocomplement,
)
from .measurement import (
    Observable,
    SeededRng,
    compatibility_verdict,
    commutes,
    haar_random_ket,
)
from .numerics import (
    DEFAULT_POLICY,
    HermitianOperator,
    Ket,
    Projection,
    TolerancePolicy,
    frobenius_distance,
    projection_onto_span,
)
from .semantics import (
    And,
    Elementary,
    Implies,
    Or,
    Statement,
    completeness_audit,
)

__all__ = [
    "SCHEMA_VERSION",
    "EXPERIMENTS",
    "ExperimentConfig",
    "InstanceRecord",
    "CampaignReport",
    "random_hermitian",
    "random_unitary",
    "generate_observable_pair",
    "generate_model",
    "generate_property_family",
    "reference_qubit_family",
    "reference_qubit_model",
    "reference_statements",
    "run_experiment",
]

SCHEMA_VERSION = 1

EXPERIMENTS = (
    "compatibility_equivalence",
    "predictable_vs_compatible",
    "objective_vs_predictable",
    "lattice_laws",
    "completeness_audit",
)

# Generated spectra keep at least this gap between eigenvalues so that
# cluster boundaries never interact with the campaigns.
_SPECTRAL_GAP = 1e-3


@dataclass(frozen=True)
class ExperimentConfig:
    """One campaign: which verifier, at what size, from which seed."""

    experiment: str
    dim: int = 2
    instances: int = 100
    mc_trials: int = 256
    seed: int = 0
    commuting_fraction: float = 0.5
    tolerances: TolerancePolicy = field(default_factory=TolerancePolicy)
    output_path: str | None = None

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(
                f"experiment must be one of {EXPERIMENTS}, got {self.experiment!r}"
            )
        if not 2 <= self.dim <= 8:
            raise ValueError(f"dim must be in [2, 8], got {self.dim!r}")
        if self.instances < 1:
            raise ValueError(f"instances must be positive, got {self.instances!r}")
        if self.mc_trials < 1:
            raise ValueError(f"mc_trials must be positive, got {self.mc_trials!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if not 0.0 <= self.commuting_fraction <= 1.0:
            raise ValueError(
                f"commuting_fraction must be in [0, 1], got {self.commuting_fraction!r}"
            )

    def to_json_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "dim": self.dim,
            "instances": self.instances,
            "mc_trials": self.mc_trials,
            "seed": self.seed,
            "commuting_fraction": self.commuting_fraction,
            "tolerances": {
                "op_tol": self.tolerances.op_tol,
                "eig_gap": self.tolerances.eig_gap,
                "norm_tol": self.tolerances.norm_tol,
                "prob_tol": self.tolerances.prob_tol,
            },
            "output_path": self.output_path,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "ExperimentConfig":
        known = {
            "experiment",
            "dim",
            "instances",
            "mc_trials",
            "seed",
            "commuting_fraction",
            "tolerances",
            "output_path",
        }
        unknown = set(document) - known
        if unknown:
            raise ValueError(f"unknown config field {sorted(unknown)[0]!r}")
        if "experiment" not in document:
            raise ValueError("missing config field 'experiment'")
        kwargs = dict(document)
        tolerances = kwargs.pop("tolerances", None)
        if tolerances is not None:
            if not isinstance(tolerances, dict):
                raise ValueError("config field 'tolerances' must be an object")
            kwargs["tolerances"] = TolerancePolicy(**tolerances)
        return cls(**kwargs)


@dataclass(frozen=True)
class InstanceRecord:
    index: int
    experiment: str
    passed: bool
    residual: float
    detail: dict

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "experiment": self.experiment,
            "pass": self.passed,
            "residual": self.residual,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class CampaignReport:
    config: ExperimentConfig
    instances: tuple[InstanceRecord, ...]
    wall_time_s: float

    @property
    def pass_count(self) -> int:
        return sum(record.passed for record in self.instances)

    @property
    def fail_count(self) -> int:
        return len(self.instances) - self.pass_count

    @property
    def max_residual(self) -> float:
        return max((record.residual for record in self.instances), default=0.0)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config.to_json_dict(),
            "instances": [record.to_json_dict() for record in self.instances],
            "aggregate": {
                "pass": self.pass_count,
                "fail": self.fail_count,
                "max_residual": self.max_residual,
                "wall_time_s": self.wall_time_s,
            },
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def random_hermitian(dim: int, gen: np.random.Generator) -> HermitianOperator:
    """Symmetrized matrix of independent standard Gaussian entries."""
    raw = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    return HermitianOperator((raw + raw.conj().T) / 2.0)


def random_unitary(dim: int, gen: np.random.Generator) -> np.ndarray:
    """Haar-ish random unitary from the QR factor of a Gaussian matrix."""
    raw = gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))
    q, _ = np.linalg.qr(raw)
    return q


def _gapped_values(dim: int, gen: np.random.Generator) -> np.ndarray:
    while True:
        values = gen.standard_normal(dim)
        ordered = np.sort(values)
        if dim == 1 or float(np.min(np.diff(ordered))) > _SPECTRAL_GAP:
            return values


def _observable_in_basis(
    basis: np.ndarray, values: np.ndarray, pol: TolerancePolicy
) -> Observable:
    order = np.argsort(values)
    spectrum = []
    for index in order:
        column = basis[:, index : index + 1]
        spectrum.append((float(values[index]), Projection(column @ column.conj().T)))
    matrix = (basis * values) @ basis.conj().T
    operator = HermitianOperator((matrix + matrix.conj().T) / 2.0)
    return Observable(operator, tuple(spectrum))


def _min_spectral_gap(observable: Observable) -> float:
    values = observable.eigenvalues
    if len(values) < 2:
        return float("inf")
    return float(np.min(np.diff(np.asarray(values))))


def generate_observable_pair(
    dim: int,
    commuting: bool,
    gen: np.random.Generator,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> tuple[Observable, Observable]:
    """One observable pair, forced to commute or generically non-commuting.

    Commuting pairs sample two real spectra in one shared random eigenbasis.
    Non-commuting pairs are independent Gaussian Hermitians, redrawn in the
    measure-zero event that they commute or carry a nearly degenerate
    spectrum.
    """
    if commuting:
        basis = random_unitary(dim, gen)
        return (
            _observable_in_basis(basis, _gapped_values(dim, gen), pol),
            _observable_in_basis(basis, _gapped_values(dim, gen), pol),
        )
    for _ in range(100):
        first = Observable.from_operator(random_hermitian(dim, gen), pol)
        second = Observable.from_operator(random_hermitian(dim, gen), pol)
        if min(_min_spectral_gap(first), _min_spectral_gap(second)) <= _SPECTRAL_GAP:
            continue
        if not commutes(first, second, pol):
            return first, second
    raise RuntimeError("failed to draw a non-commuting pair in 100 attempts")


def generate_model(
    dim: int,
    n_observables: int,
    commuting_fraction: float,
    rng: SeededRng,
    pol: TolerancePolicy = DEFAULT_POLICY,
) -> tuple[list[Observable], list[PureStateModel]]:
    """Seeded observables (pairwise grouped for the commuting fraction) and
    Haar-random pure states, bit-identical for identical seeds."""
    if n_observables < 1:
        raise ValueError(f"n_observables must be positive, got {n_observables}")
    gen = rng.generator() if isinstance(rng, SeededRng) else rng
    observables: list[Observable] = []
    while len(observables) < n_observables:
        commuting = gen.random() < commuting_fraction
        first, second = generate_observable_pair(dim, commuting, gen, pol)
        observables.append(first)
        if len(observables) < n_observables:
            observables.append(second)
    states = [
        PureStateModel.from_ket(haar_random_ket(dim, gen)) for _ in range(n_observables)
    ]
    return observables, states


def _random_subspace_projection(
    dim: int, rank: int, gen: np.random.Generator
) -> Projection:
    basis = random_unitary(dim, gen)[:, :rank]
    return Projection(basis @ basis.conj().T)


def generate_property_family(
    dim: int,
    n_members: int,
    model: PureStateModel,
    gen: np.random.Generator,
    pol: TolerancePolicy = DEFAULT_POLICY,
    oblique_fraction: float = 0.5,
) -> PropertyFamily:
    """Adversarial family around a state: members diagonal in a basis that
    contains the state axis (these commute with the support) mixed with
    Haar-random oblique subspaces (these generically do not). The support and
    its orthocomplement always open the family."""
    psi = model.state.amplitudes
    padding = gen.standard_normal((dim, dim - 1)) + 1j * gen.standard_normal((dim, dim - 1))
    aligned_basis, _ = np.linalg.qr(np.column_stack([psi, padding]))

    entries: list[tuple[str, Projection]] = []

    def try_add(projection: Projection) -> None:
        if any(frobenius_distance(projection, existing) < pol.op_tol for _, existing in entries):
            return
        if projection.rank in (0, dim):
            return
        entries.append((f"E{len(entries) + 1}", projection))

    try_add(model.support)
    try_add(orthocomplement(model.support))
    attempts = 0
    while len(entries) < n_members and attempts < 100 * n_members:
        attempts += 1
        if gen.random() < oblique_fraction:
            rank = int(gen.integers(1, dim))
            try_add(_random_subspace_projection(dim, rank, gen))
        else:
            mask = gen.random(dim) < 0.5
            if not mask.any() or mask.all():
                continue
            try_add(projection_onto_span(aligned_basis[:, mask], pol))
    return PropertyFamily(entries, dim=dim, pol=pol)


def reference_qubit_family(pol: TolerancePolicy = DEFAULT_POLICY) -> PropertyFamily:
    """Two-level worked family: both basis atoms plus the superposed atom."""
    ground = np.array([[1, 0], [0, 0]], dtype=np.complex128)
    excited = np.array([[0, 0], [0, 1]], dtype=np.complex128)
    superposed = np.full((2, 2), 0.5, dtype=np.complex128)
    return PropertyFamily(
        [
            ("0", np.zeros((2, 2), dtype=np.complex128)),
            ("P0", ground),
            ("P1", excited),
            ("Pplus", superposed),
            ("I", np.eye(2, dtype=np.complex128)),
        ],
        dim=2,
        pol=pol,
    )


def reference_qubit_model() -> PureStateModel:
    return PureStateModel.from_ket(Ket.basis(2, 0))


def reference_statements() -> tuple[Statement, ...]:
    """Audit statements for the worked family: all elementary statements, a
    testable contradiction, a non-testable conjunction, and a non-testable
    classical tautology that the report must flag."""
    elementary = tuple(Elementary(label) for label in ("0", "P0", "P1", "Pplus", "I"))
    return elementary + (
        And(Elementary("P0"), Elementary("P1")),
        And(Elementary("P0"), Elementary("Pplus")),
        Implies(Elementary("Pplus"), Or(Elementary("Pplus"), Elementary("P0"))),
    )


def _run_compatibility_equivalence(cfg: ExperimentConfig) -> list[InstanceRecord]:
    pol = cfg.tolerances
    base = SeededRng(cfg.seed)
    records = []
    for index in range(cfg.instances):
        gen = base.substream(index, 0)
        commuting = gen.random() < cfg.commuting_fraction
        first, second = generate_observable_pair(cfg.dim, commuting, gen, pol)
        verdict = compatibility_verdict(
            first, second, pol, trials=cfg.mc_trials, rng=base.derive(index, 1)
        )
        passed = verdict.coincide and verdict.mc_consistent
        records.append(
            InstanceRecord(
                index=index,
                experiment=cfg.experiment,
                passed=passed,
                residual=0.0 if passed else verdict.max_violation,
                detail={
                    "commuting_intended": bool(commuting),
                    "commutation": verdict.commutation,
                    "nondisturbance": verdict.nondisturbance,
                    "interposition": verdict.interposition,
                    "sequence_symmetry": verdict.sequence_symmetry,
                    "commeasurable": verdict.commeasurable,
                    "coincide": verdict.coincide,
                    "mc_trials": verdict.mc_trials,
                    "mc_disagreements": verdict.mc_disagreements,
                    "mc_floor": verdict.mc_floor,
                    "mc_consistent": verdict.mc_consistent,
                },
            )
        )
    return records


def _domain_instance(cfg: ExperimentConfig, index: int) -> tuple[PureStateModel, PropertyFamily]:
    gen = SeededRng(cfg.seed).substream(index, 0)
    model = PureStateModel.from_ket(haar_random_ket(cfg.dim, gen))
    family = generate_property_family(cfg.dim, 10, model, gen, cfg.tolerances)
    return model, family


def _run_predictable_vs_compatible(cfg: ExperimentConfig) -> list[InstanceRecord]:
    pol = cfg.tolerances
    records = []
    for index in range(cfg.instances):
        model, family = _domain_instance(cfg, index)
        predictable = predictable_domain(model, family, pol)
        compatible = compatible_domain(model, family, pol)
        member_residual = 0.0
        split_ok = True
        min_outside = float("inf")
        for label, member in family.pairs():
            residual = pivot_residual(member, model.support, pol)
            if label in compatible:
                member_residual = max(member_residual, residual)
                split_ok = split_ok and residual < pol.op_tol
            else:
                min_outside = min(min_outside, residual)
                split_ok = split_ok and residual > 10.0 * pol.op_tol
        passed = predictable == compatible and split_ok
        records.append(
            InstanceRecord(
                index=index,
                experiment=cfg.experiment,
                passed=passed,
                residual=member_residual,
                detail={
                    "predictable": sorted(predictable),
                    "compatible": sorted(compatible),
                    "split_identity_ok": split_ok,
                    "min_noncompatible_residual": (
                        None if min_outside == float("inf") else min_outside
                    ),
                },
            )
        )
    return records


def _run_objective_vs_predictable(cfg: ExperimentConfig) -> list[InstanceRecord]:
    pol = cfg.tolerances
    records = []
    for index in range(cfg.instances):
        model, family = _domain_instance(cfg, index)
        objective = objective_domain(model, family, pol)
        predictable = predictable_domain(model, family, pol)
        passed = objective == predictable
        records.append(
            InstanceRecord(
                index=index,
                experiment=cfg.experiment,
                passed=passed,
                residual=0.0,
                detail={
                    "objective": sorted(objective),
                    "predictable": sorted(predictable),
                },
            )
        )
    return records


def _nondistributivity_witness(pol: TolerancePolicy) -> InstanceRecord:
    """Fixed two-level triple on which the distributive law strictly fails."""
    ground = Projection(np.array([[1, 0], [0, 0]], dtype=np.complex128))
    excited = Projection(np.array([[0, 0], [0, 1]], dtype=np.complex128))
    superposed = Projection(np.full((2, 2), 0.5, dtype=np.complex128))
    lhs = meet(superposed, join(ground, excited, pol), pol)
    rhs = join(meet(superposed, ground, pol), meet(superposed, excited, pol), pol)
    gap = frobenius_distance(lhs, rhs)
    passed = (
        frobenius_distance(lhs, superposed) < pol.op_tol
        and rhs.rank == 0
        and gap > 100.0 * pol.op_tol
    )
    return InstanceRecord(
        index=0,
        experiment="lattice_laws",
        passed=passed,
        residual=0.0 if passed else gap,
        detail={"check": "nondistributivity_witness", "gap": gap},
    )


def _run_lattice_laws(cfg: ExperimentConfig) -> list[InstanceRecord]:
    pol = cfg.tolerances
    base = SeededRng(cfg.seed)
    records = [_nondistributivity_witness(pol)]
    for index in range(1, cfg.instances + 1):
        gen = base.substream(index, 0)
        dim = cfg.dim
        p = _random_subspace_projection(dim, int(gen.integers(1, dim)), gen)
        q = _random_subspace_projection(dim, int(gen.integers(1, dim)), gen)
        ket = haar_random_ket(dim, gen)
        atom = Projection(np.outer(ket.amplitudes, ket.amplitudes.conj()))
        comparable = join(p, _random_subspace_projection(dim, 1, gen), pol)
        orthomodular_ok = check_orthomodular(p, comparable, pol)
        de_morgan_gap = frobenius_distance(
            meet(p, q, pol), orthocomplement(join(orthocomplement(p), orthocomplement(q), pol))
        )
        covering_ok = check_covering(atom, p, pol)
        range_vector = _first_range_vector(p)
        witness_atom = Projection(np.outer(range_vector, range_vector.conj()))
        atomicity_ok = is_atom(witness_atom, pol) and leq(witness_atom, p, pol)
        passed = (
            orthomodular_ok
            and de_morgan_gap < pol.op_tol
            and covering_ok
            and atomicity_ok
        )
        records.append(
            InstanceRecord(
                index=index,
                experiment=cfg.experiment,
                passed=passed,
                residual=de_morgan_gap,
                detail={
                    "orthomodular": orthomodular_ok,
                    "de_morgan_gap": de_morgan_gap,
                    "covering": covering_ok,
                    "atomicity": atomicity_ok,
                },
            )
        )
    return records


def _first_range_vector(projection: Projection) -> np.ndarray:
    eigenvalues, eigenvectors = np.linalg.eigh(projection.matrix)
    index = int(np.argmax(eigenvalues))
    return eigenvectors[:, index]


def _run_completeness_audit(cfg: ExperimentConfig) -> list[InstanceRecord]:
    pol = cfg.tolerances
    family = reference_qubit_family(pol)
    model = reference_qubit_model()
    statements = reference_statements()
    records = []
    for index, mode in enumerate(("standard", "sr")):
        audit = completeness_audit(model, family, statements, mode, pol)
        if mode == "standard":
            passed = (
                audit.verdict == "complete"
                and audit.meaningful == audit.predictable
                and len(audit.flagged) > 0
            )
        else:
            passed = audit.verdict == "incomplete" and audit.witness == "Pplus"
        records.append(
            InstanceRecord(
                index=index,
                experiment=cfg.experiment,
                passed=passed,
                residual=0.0,
                detail=audit.to_json_dict(),
            )
        )
    return records


_RUNNERS = {
    "compatibility_equivalence": _run_compatibility_equivalence,
    "predictable_vs_compatible": _run_predictable_vs_compatible,
    "objective_vs_predictable": _run_objective_vs_predictable,
    "lattice_laws": _run_lattice_laws,
    "completeness_audit": _run_completeness_audit,
}


def run_experiment(cfg: ExperimentConfig) -> CampaignReport:
    """Dispatch the configured campaign and assemble its report; instance
    records are sorted by index so that re-runs with the same config differ
    at most in wall time."""
    start = time.perf_counter()
    records = _RUNNERS[cfg.experiment](cfg)
    records.sort(key=lambda record: record.index)
    report = CampaignReport(
        config=cfg,
        instances=tuple(records),
        wall_time_s=time.perf_counter() - start,
    )
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8") as handle:
            handle.write(report.dumps())
            handle.write("\n")
    return report
