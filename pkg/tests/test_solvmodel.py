"""可解流形模型的构造"""

import mpmath
import pytest
from mpmath import mp

from otcoh.characters import (
    Backend,
    Equality,
    IndexTriple,
    char_of_triple,
    classify_all,
    equal_on_lattice,
    numeric_distance,
)
from otcoh.cohomology import all_tables
from otcoh.exceptions import (
    InconsistentRelation,
    MalformedSpec,
    NotALattice,
    NotAUnit,
    NotTotallyPositive,
    NotUnimodular,
    WrongRank,
)
from otcoh.numberfield import Polynomial, power
from otcoh.solvmodel import (
    build_model,
    effective_tolerance,
    log_vector,
    synthetic_model,
)


class TestFieldModel:
    """x^3 - x - 1，U = {θ}"""

    def test_lattice_generator(self, cubic_model):
        assert cubic_model.s == 1 and cubic_model.t == 1
        assert abs(cubic_model.lattice_generators[0][0] - 0.2811995) < 1e-6

    def test_b_matrix(self, cubic_model):
        assert abs(cubic_model.b[0][0] + 1) < 1e-9

    def test_b_independent_of_lattice_scaling(self, cubic_polynomial, cubic_model):
        squared = build_model(cubic_polynomial, [power(cubic_polynomial.theta(), 2)])
        assert abs(squared.b[0][0] - cubic_model.b[0][0]) < 1e-9
        assert abs(squared.lattice_generators[0][0] - 2 * cubic_model.lattice_generators[0][0]) < 1e-9

    def test_residuals(self, cubic_model):
        assert cubic_model.residuals["unimodularity"] < 1e-9
        assert cubic_model.residuals["log_norm"] < 1e-9
        assert cubic_model.residuals["psi_reconstruction"] < 1e-9

    def test_psi_reconstructs_complex_embedding(self, cubic_model):
        with mp.workprec(cubic_model.precision + 32):
            value = mpmath.exp(cubic_model.psi(1, cubic_model.lattice_generators[0]))
            assert abs(value - cubic_model.unit_values[0][1].value) < 1e-30

    def test_log_vector_sums_to_zero(self, cubic_polynomial, cubic_model):
        vector = log_vector(cubic_polynomial.theta(), cubic_model.embeddings)
        with mp.workprec(cubic_model.embeddings.working_precision):
            assert abs(mpmath.fsum(vector)) < 1e-30

    def test_not_a_unit(self, cubic_polynomial):
        with pytest.raises(NotAUnit):
            build_model(cubic_polynomial, [cubic_polynomial.element([2])])

    def test_not_totally_positive(self, cubic_polynomial):
        with pytest.raises(NotTotallyPositive):
            build_model(cubic_polynomial, [-cubic_polynomial.theta()])

    def test_wrong_rank(self, cubic_polynomial):
        theta = cubic_polynomial.theta()
        with pytest.raises(WrongRank):
            build_model(cubic_polynomial, [theta, power(theta, 2)])

    def test_torsion_unit_is_not_a_lattice(self, cubic_polynomial):
        with pytest.raises(NotALattice):
            build_model(cubic_polynomial, [cubic_polynomial.one()])

    def test_non_integral_unit(self, cubic_polynomial):
        with pytest.raises((MalformedSpec, NotAUnit)):
            build_model(cubic_polynomial, [cubic_polynomial.element(["1/2", 0, 0])])

    def test_branch_shift_changes_c_but_not_dimensions(self, cubic_polynomial, cubic_classes):
        shifted = build_model(cubic_polynomial, [cubic_polynomial.theta()], branch_shifts=[[1]])
        assert abs(shifted.c[0][0] - cubic_classes.model.c[0][0]) > 1
        shifted_classes = classify_all(shifted, Backend.NUMERIC)
        assert [c.id for c in shifted_classes] == [c.id for c in cubic_classes]
        assert [t.dims for t in all_tables(shifted_classes)] == [t.dims for t in all_tables(cubic_classes)]

    def test_declared_relation_checked_numerically(self, cubic_polynomial):
        model = build_model(cubic_polynomial, [cubic_polynomial.theta()], relations=[[0, 1, 1, 1]])
        assert model.relations == ((1, 1, 1),)
        with pytest.raises(InconsistentRelation):
            build_model(cubic_polynomial, [cubic_polynomial.theta()], relations=[[1, 0, 0]])


class TestSyntheticModel:
    """只给出泛函数据的模型"""

    def test_generic_has_no_values(self, paired_model):
        assert paired_model.generic
        assert paired_model.unit_values is None
        assert len(paired_model.relations) == 2

    def test_unimodularity_enforced(self):
        with pytest.raises(NotUnimodular):
            synthetic_model(1, 1, [[-2]])

    def test_relation_real_part(self):
        with pytest.raises(InconsistentRelation):
            synthetic_model(2, 2, [[-1, 0], [0, -1]], relations=[[1, 0, 0, 0, 0, 0]])

    def test_generic_relation_needs_conjugate_symmetry(self):
        with pytest.raises(InconsistentRelation):
            synthetic_model(1, 1, [[-1]], relations=[[0, 1, -1]])

    def test_explicit_c_allows_imaginary_relation_only_if_it_vanishes(self):
        with pytest.raises(InconsistentRelation):
            synthetic_model(1, 1, [[-1]], relations=[[0, 1, -1]], generator_args=[["1/3"]])
        model = synthetic_model(1, 1, [[-1]], relations=[[0, 1, -1]], generator_args=[[0]])
        assert model.relations == ((0, 1, -1),)

    def test_constant_prefixed_relation(self):
        model = synthetic_model(1, 1, [[-1]], relations=[[0, 1, 1, 1]])
        assert model.relations == ((1, 1, 1),)
        with pytest.raises(InconsistentRelation):
            synthetic_model(1, 1, [[-1]], relations=[[1, 1, 1, 1]])

    def test_wrong_relation_length(self):
        with pytest.raises(MalformedSpec):
            synthetic_model(1, 1, [[-1]], relations=[[1, 1]])

    def test_float_entries_rejected(self):
        with pytest.raises(MalformedSpec):
            synthetic_model(1, 1, [[-1.0]])

    def test_b_forced_relations_merge_generic_classes(self):
        # 关系只来自 B：x_k + ψ_k + ψ̄_k = 0
        model = synthetic_model(2, 2, [[-1, 0], [0, -1]])
        assert model.b_relation_vectors() == [(1, 0, 1, 0, 1, 0), (0, 1, 0, 1, 0, 1)]
        generic = classify_all(model, Backend.GENERIC)
        assert IndexTriple(I=[1], K=[1], L=[1]) in generic.trivial_class.members
        assert len(list(generic)) == 49

    def test_generic_and_numeric_partitions_agree(self):
        B = [[-1, 0], [0, -1]]
        generic = classify_all(synthetic_model(2, 2, B), Backend.GENERIC)
        numeric = classify_all(
            synthetic_model(2, 2, B, generator_args=[["1/3", "1/5"], ["1/7", "1/11"]]), Backend.NUMERIC
        )
        assert [c.members for c in generic] == [c.members for c in numeric]

    def test_explicit_values(self, explicit_model):
        row = explicit_model.unit_values[0]
        with mp.workprec(explicit_model.precision + 32):
            assert abs(row[0].value - mpmath.e) < 1e-30
            assert abs(row[1].value - mpmath.exp(mpmath.mpc(-0.5, mpmath.mpf(1) / 3))) < 1e-30
            assert row[2].value == mpmath.conj(row[1].value)


def test_effective_tolerance_scaling():
    assert effective_tolerance(1e-9, 256) == 1e-9
    assert effective_tolerance(1e-9, 512) == pytest.approx(1e-9 * 2.0 ** -64)
    # 低于默认精度时不放宽
    assert effective_tolerance(1e-9, 128) == 1e-9
    assert effective_tolerance(1e-9, 53) == 1e-9


class TestPrecision:
    """非默认精度下结果不变"""

    @pytest.mark.parametrize("precision", [64, 128, 512, 1024])
    def test_cubic_classes_stable(self, cubic_polynomial, cubic_classes, precision):
        model = build_model(cubic_polynomial, [cubic_polynomial.theta()], precision=precision)
        assert model.tolerance <= 1e-9
        assert abs(model.b[0][0] + 1) < model.tolerance
        classes = classify_all(model, Backend.NUMERIC)
        assert [c.id for c in classes] == [c.id for c in cubic_classes]
        assert IndexTriple(I=[1], K=[1], L=[1]) in classes.trivial_class.members

    def test_conjugate_pair_exact_at_high_precision(self, cubic_polynomial):
        model = build_model(cubic_polynomial, [cubic_polynomial.theta()], precision=512)
        a = char_of_triple(model, IndexTriple(K=[1]))
        b = char_of_triple(model, IndexTriple(L=[1]))
        assert equal_on_lattice(model, a, b) == Equality.NO
        assert numeric_distance(b, b.inverse().inverse()) < model.tolerance
        assert numeric_distance(a * b, char_of_triple(model, IndexTriple(K=[1], L=[1]))) < model.tolerance
