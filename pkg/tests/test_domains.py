import numpy as np
import pytest

from qlat import (
    Ket,
    PropertyFamily,
    PureStateModel,
    SeededRng,
    born_probability,
    certainly_false_domain,
    certainly_true_domain,
    compatible_domain,
    domain_report,
    generate_property_family,
    haar_random_ket,
    leq,
    matrices_close,
    objective_domain,
    orthocomplement,
    pivot_residual,
    predictable_domain,
    support_projection,
    verify_objective_equals_predictable,
    verify_predictable_equals_compatible,
)


def random_instance(dim, gen, pol):
    model = PureStateModel.from_ket(haar_random_ket(dim, gen))
    family = generate_property_family(dim, 8, model, gen, pol)
    return model, family


class TestSupport:
    def test_basis_state(self):
        assert matrices_close(support_projection(Ket.basis(2, 0)), np.diag([1.0, 0.0]))

    def test_superposition_outer_product(self, plus_ket, pplus):
        assert matrices_close(support_projection(plus_ket), pplus)

    def test_global_phase_invariance(self):
        ket = Ket.normalized([1.0, 2.0j, -0.5])
        rotated = Ket(np.exp(1.37j) * ket.amplitudes)
        assert matrices_close(support_projection(ket), support_projection(rotated))

    def test_support_has_probability_one(self):
        gen = SeededRng(1).generator()
        for _ in range(50):
            ket = haar_random_ket(int(gen.integers(2, 7)), gen)
            assert born_probability(ket, support_projection(ket)) == pytest.approx(1.0)

    def test_model_validates_support(self, p1):
        with pytest.raises(ValueError, match="support"):
            PureStateModel(state=Ket.basis(2, 0), support=p1)


class TestWorkedFamilyDomains:
    def test_certainly_true(self, ground_model, qubit_family):
        assert certainly_true_domain(ground_model, qubit_family) == {"P0", "I"}

    def test_certainly_false(self, ground_model, qubit_family):
        assert certainly_false_domain(ground_model, qubit_family) == {"0", "P1"}

    def test_predictable_excludes_superposed_atom(self, ground_model, qubit_family):
        assert predictable_domain(ground_model, qubit_family) == {"0", "P0", "P1", "I"}

    def test_compatible(self, ground_model, qubit_family):
        assert compatible_domain(ground_model, qubit_family) == {"0", "P0", "P1", "I"}

    def test_objective(self, ground_model, qubit_family):
        assert objective_domain(ground_model, qubit_family) == {"0", "P0", "P1", "I"}

    def test_equalities_hold(self, ground_model, qubit_family):
        assert verify_predictable_equals_compatible(ground_model, qubit_family)
        assert verify_objective_equals_predictable(ground_model, qubit_family)

    def test_report(self, ground_model, qubit_family):
        report = domain_report(ground_model, qubit_family)
        assert report.predictable == frozenset({"0", "P0", "P1", "I"})
        assert report.predictable == report.compatible == report.objective
        assert report.certainly_true & report.certainly_false == frozenset()
        assert report.to_json_dict()["predictable_equals_compatible"] is True


class TestMembershipTrivia:
    def test_support_and_bounds_always_resolved(self, pol):
        gen = SeededRng(2).generator()
        for _ in range(30):
            dim = int(gen.integers(2, 7))
            model, family = random_instance(dim, gen, pol)
            true_side = certainly_true_domain(model, family, pol)
            false_side = certainly_false_domain(model, family, pol)
            compatible = compatible_domain(model, family, pol)
            objective = objective_domain(model, family, pol)
            assert "I" in true_side
            assert "0" in false_side
            # the support and its complement open every generated family
            assert "E1" in true_side and "E1" in compatible and "E1" in objective
            assert "E2" in false_side and "E2" in compatible

    def test_trivial_family_fully_predictable(self, pol):
        family = PropertyFamily([], dim=3)
        gen = SeededRng(3).generator()
        for _ in range(20):
            model = PureStateModel.from_ket(haar_random_ket(3, gen))
            assert predictable_domain(model, family, pol) == {"0", "I"}
            assert objective_domain(model, family, pol) == {"0", "I"}

    def test_commuting_family_fully_predictable(self, pol):
        gen = SeededRng(8).generator()
        for _ in range(20):
            dim = int(gen.integers(2, 6))
            model, base = random_instance(dim, gen, pol)
            # keep only the members that commute with the support
            commuting = [
                (label, member)
                for label, member in base.pairs()
                if label not in ("0", "I")
                and np.linalg.norm(
                    member.matrix @ model.support.matrix
                    - model.support.matrix @ member.matrix
                )
                < pol.op_tol * dim
            ]
            family = PropertyFamily(commuting, dim=dim, pol=pol)
            assert predictable_domain(model, family, pol) == set(family.labels)


class TestDomainInvariants:
    def test_disjoint_and_dual(self, pol):
        gen = SeededRng(4).generator()
        for _ in range(50):
            dim = int(gen.integers(2, 7))
            model, family = random_instance(dim, gen, pol)
            true_side = certainly_true_domain(model, family, pol)
            false_side = certainly_false_domain(model, family, pol)
            assert not (true_side & false_side)
            for label, member in family.pairs():
                complement = orthocomplement(member)
                in_false_dual = leq(complement, orthocomplement(model.support), pol)
                # E certainly true iff its complement is certainly false
                assert (label in true_side) == leq(model.support, member, pol)
                assert leq(model.support, member, pol) == in_false_dual

    def test_membership_monotone(self, ground_model, qubit_family, pol):
        true_side = certainly_true_domain(ground_model, qubit_family, pol)
        for label, member in qubit_family.pairs():
            if label not in true_side:
                continue
            for other_label, other in qubit_family.pairs():
                if leq(member, other, pol):
                    assert other_label in true_side

    def test_probability_consistency(self, pol):
        gen = SeededRng(5).generator()
        for _ in range(30):
            dim = int(gen.integers(2, 6))
            model, family = random_instance(dim, gen, pol)
            report = domain_report(model, family, pol)
            for label, member in family.pairs():
                probability = born_probability(model.state, member, pol)
                if label in report.certainly_true:
                    assert probability == pytest.approx(1.0, abs=pol.prob_tol)
                elif label in report.certainly_false:
                    assert probability == pytest.approx(0.0, abs=pol.prob_tol)
                else:
                    assert pol.prob_tol < probability < 1.0 - pol.prob_tol


class TestPivot:
    def test_oblique_atom_residual_is_one(self, ground_model, pplus):
        # both meets vanish, so the rebuilt member is 0 and the defect is |E|
        assert pivot_residual(pplus, ground_model.support) == pytest.approx(1.0)

    def test_compatible_members_split_exactly(self, ground_model, qubit_family, pol):
        compatible = compatible_domain(ground_model, qubit_family, pol)
        for label, member in qubit_family.pairs():
            residual = pivot_residual(member, ground_model.support, pol)
            if label in compatible:
                assert residual < pol.op_tol
            else:
                assert residual > 10 * pol.op_tol


class TestEqualityCampaigns:
    def test_predictable_equals_compatible_random(self, pol):
        gen = SeededRng(6).generator()
        for _ in range(60):
            dim = 2 + int(gen.integers(0, 3))
            model, family = random_instance(dim, gen, pol)
            assert verify_predictable_equals_compatible(model, family, pol)

    def test_objective_equals_predictable_random(self, pol):
        gen = SeededRng(7).generator()
        for _ in range(60):
            dim = 2 + int(gen.integers(0, 3))
            model, family = random_instance(dim, gen, pol)
            assert verify_objective_equals_predictable(model, family, pol)
