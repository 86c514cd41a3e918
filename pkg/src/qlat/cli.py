"""Command line front end: campaign runner, family verifier, and audit.

Exit codes: 0 success (no failing instances), 1 campaign failures,
2 usage or validation errors, 3 I/O failures.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .domains import PureStateModel, domain_report
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    InstanceRecord,
    SCHEMA_VERSION,
    run_experiment,
)
from .lattice import PropertyFamily, check_orthomodular, join, meet, orthocomplement
from .measurement import SeededRng, haar_random_ket
from .numerics import DEFAULT_POLICY, Ket, frobenius_distance
from .semantics import completeness_audit, order_isomorphism_check, parse_statement

_ENV_SEED = "QLAT_SEED"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlat",
        description="Property-lattice verification campaigns, family checks, and audits.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run a configured campaign")
    run.add_argument("--config", help="path to a JSON experiment config")
    run.add_argument("--experiment", choices=EXPERIMENTS)
    run.add_argument("--seed", type=int)
    run.add_argument("--dim", type=int)
    run.add_argument("--instances", type=int)
    run.add_argument("--mc-trials", type=int, dest="mc_trials")
    run.add_argument("--commuting-fraction", type=float, dest="commuting_fraction")
    run.add_argument("--out", help="report output path (defaults to stdout)")
    run.set_defaults(handler=_cmd_run)

    verify = commands.add_parser(
        "verify-family", help="lattice laws and domain equality on a family file"
    )
    verify.add_argument("--family", required=True, help="path to a family JSON document")
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--states", type=int, default=20, help="random probe states")
    verify.add_argument("--out", help="report output path (defaults to stdout)")
    verify.set_defaults(handler=_cmd_verify_family)

    audit = commands.add_parser(
        "audit", help="completeness audit of statements against a state and family"
    )
    audit.add_argument("--family", required=True)
    audit.add_argument("--state", required=True, help="path to a state JSON document")
    audit.add_argument("--statements", required=True, help="one prefix statement per line")
    audit.add_argument("--mode", required=True, choices=("standard", "sr"))
    audit.add_argument("--out", help="report output path (defaults to stdout)")
    audit.set_defaults(handler=_cmd_audit)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


class _UsageError(Exception):
    pass


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise _UsageError(f"{path} is not valid JSON: {exc}") from None


def _emit(document: dict, out_path: str | None) -> None:
    text = json.dumps(document, indent=2, sort_keys=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)
            handle.write("\n")
    else:
        print(text)


def _cmd_run(args) -> int:
    merged: dict = {}
    if args.config:
        document = _load_json(args.config)
        if not isinstance(document, dict):
            raise _UsageError(f"{args.config} must contain a JSON object")
        merged.update(document)
    env_seed = os.environ.get(_ENV_SEED)
    if env_seed is not None:
        try:
            merged["seed"] = int(env_seed)
        except ValueError:
            raise _UsageError(f"{_ENV_SEED} must be an integer, got {env_seed!r}") from None
    for name in ("experiment", "seed", "dim", "instances", "mc_trials", "commuting_fraction"):
        value = getattr(args, name, None)
        if value is not None:
            merged[name] = value
    if args.out is not None:
        merged["output_path"] = args.out
    try:
        cfg = ExperimentConfig.from_dict(merged)
    except (ValueError, TypeError) as exc:
        raise _UsageError(str(exc)) from None
    report = run_experiment(cfg)
    if not cfg.output_path:
        print(report.dumps())
    return 0 if report.fail_count == 0 else 1


def _cmd_verify_family(args) -> int:
    family = _load_family(args.family)
    pol = DEFAULT_POLICY
    rng = SeededRng(args.seed)
    instances: list[InstanceRecord] = []

    order_ok = order_isomorphism_check(family, pol, rng=rng.derive(0), samples=args.states)
    instances.append(
        InstanceRecord(
            index=0,
            experiment="verify_family",
            passed=order_ok,
            residual=0.0,
            detail={"check": "order_isomorphism"},
        )
    )

    worst_gap = 0.0
    laws_ok = True
    for _, first in family.pairs():
        for _, second in family.pairs():
            gap = frobenius_distance(
                meet(first, second, pol),
                orthocomplement(join(orthocomplement(first), orthocomplement(second), pol)),
            )
            worst_gap = max(worst_gap, gap)
            laws_ok = laws_ok and gap < pol.op_tol
            laws_ok = laws_ok and check_orthomodular(first, join(first, second, pol), pol)
    instances.append(
        InstanceRecord(
            index=1,
            experiment="verify_family",
            passed=laws_ok,
            residual=worst_gap,
            detail={"check": "lattice_laws", "max_de_morgan_gap": worst_gap},
        )
    )

    gen = rng.substream(1)
    states = [haar_random_ket(family.dim, gen) for _ in range(args.states)]
    for _, member in family.pairs():
        if member.rank == 1:
            eigenvalues, eigenvectors = np.linalg.eigh(member.matrix)
            states.append(Ket.normalized(eigenvectors[:, int(np.argmax(eigenvalues))]))
    domain_ok = True
    for state in states:
        model = PureStateModel.from_ket(state)
        report = domain_report(model, family, pol)
        domain_ok = (
            domain_ok
            and report.predictable_equals_compatible
            and report.objective_equals_predictable
        )
    instances.append(
        InstanceRecord(
            index=2,
            experiment="verify_family",
            passed=domain_ok,
            residual=0.0,
            detail={"check": "domain_equalities", "states": len(states)},
        )
    )

    failures = sum(not record.passed for record in instances)
    _emit(
        {
            "schema_version": SCHEMA_VERSION,
            "family": {"dim": family.dim, "labels": list(family.labels)},
            "instances": [record.to_json_dict() for record in instances],
            "aggregate": {"pass": len(instances) - failures, "fail": failures},
        },
        args.out,
    )
    return 0 if failures == 0 else 1


def _cmd_audit(args) -> int:
    family = _load_family(args.family)
    state_doc = _load_json(args.state)
    try:
        amplitudes = np.array(
            [complex(entry[0], entry[1]) for entry in state_doc["amplitudes"]],
            dtype=np.complex128,
        )
        declared_dim = int(state_doc["dim"])
    except (KeyError, TypeError, IndexError) as exc:
        raise _UsageError(f"malformed state document: {exc}") from None
    if amplitudes.size != declared_dim:
        raise _UsageError(
            f"state dim {declared_dim} does not match {amplitudes.size} amplitudes"
        )
    if declared_dim != family.dim:
        raise _UsageError(f"state dim {declared_dim} does not match family dim {family.dim}")
    try:
        model = PureStateModel.from_ket(Ket(amplitudes))
    except ValueError as exc:
        raise _UsageError(str(exc)) from None

    statements = []
    with open(args.statements, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                statements.append(parse_statement(text))
            except ValueError as exc:
                raise _UsageError(f"{args.statements}:{line_number}: {exc}") from None
    if not statements:
        raise _UsageError(f"{args.statements} contains no statements")

    try:
        audit = completeness_audit(model, family, statements, args.mode)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    _emit({"schema_version": SCHEMA_VERSION, **audit.to_json_dict()}, args.out)
    return 0


def _load_family(path: str) -> PropertyFamily:
    document = _load_json(path)
    try:
        return PropertyFamily.from_json_dict(document)
    except ValueError as exc:
        raise _UsageError(f"{path}: {exc}") from None


if __name__ == "__main__":
    raise SystemExit(main())
