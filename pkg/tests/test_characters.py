"""特征、格上相等与丛类划分"""

import mpmath
import pytest
from mpmath import mp

from otcoh.characters import (
    Backend,
    Equality,
    IndexTriple,
    RelationLattice,
    all_triples,
    char_from_user,
    char_of_triple,
    classify_all,
    equal_on_lattice,
)
from otcoh.exceptions import (
    AmbiguousCharacters,
    BackendUnavailable,
    IndexOutOfRange,
    MalformedSpec,
)
from otcoh.expressions import CharacterExpressionParser
from otcoh.solvmodel import synthetic_model


class TestIndexTriple:
    """多重指标三元组"""

    def test_sorted_and_deduplicated(self):
        triple = IndexTriple(I=[2, 1, 2], K=[1], L=[])
        assert triple.I == (1, 2)
        assert triple.p_degree == 3
        assert triple.l_weight == 0

    def test_exponent_layout(self):
        triple = IndexTriple(I=[2], K=[1], L=[2])
        assert triple.exponent(2, 2) == (0, 1, 1, 0, 0, 1)

    def test_bounds(self):
        with pytest.raises(IndexOutOfRange):
            IndexTriple(K=[3]).exponent(1, 2)

    def test_complement_and_conjugate(self):
        triple = IndexTriple(I=[1], K=[], L=[1])
        assert triple.complement(2, 1) == IndexTriple(I=[2], K=[1], L=[])
        assert triple.conjugate() == IndexTriple(I=[1], K=[1], L=[])

    def test_label(self):
        assert IndexTriple().label == "(∅,∅,∅)"
        assert IndexTriple(I=[1, 2], L=[1]).label == "({1,2},∅,{1})"

    def test_all_triples_count(self):
        assert len(all_triples(2, 2)) == 64
        assert all_triples(1, 1)[0] == IndexTriple()


class TestCharacterValues:
    """数域模型上的特征值"""

    def test_trivial_is_one(self, cubic_model):
        character = char_of_triple(cubic_model, IndexTriple())
        assert all(ball.value == 1 for ball in character.values)

    def test_full_triple_is_one(self, cubic_model):
        character = char_of_triple(cubic_model, IndexTriple(I=[1], K=[1], L=[1]))
        assert abs(character.values[0].value - 1) < 1e-9

    def test_real_embedding(self, cubic_model):
        character = char_of_triple(cubic_model, IndexTriple(I=[1]))
        assert abs(character.values[0].value - 1.3247180) < 1e-6

    def test_conjugation_symmetry(self, cubic_model):
        a = char_of_triple(cubic_model, IndexTriple(K=[1]))
        b = char_of_triple(cubic_model, IndexTriple(L=[1]))
        with mp.workprec(a.working_precision):
            assert abs(a.values[0].value - mpmath.conj(b.values[0].value)) < 1e-60

    def test_inverse(self, cubic_model):
        character = char_of_triple(cubic_model, IndexTriple(I=[1]))
        inverse = character.inverse()
        with mp.workprec(character.working_precision):
            assert abs(inverse.values[0].value * character.values[0].value - 1) < 1e-60
        assert inverse.exponent == (-1, 0, 0)


class TestRelationLattice:
    """精确规范型"""

    def test_reduce_is_canonical(self):
        lattice = RelationLattice([(1, 0, 1, 0, 1, 0), (1, 1, 1, 1, 1, 1)])
        assert lattice.rank == 2
        assert lattice.reduce((1, 0, 1, 0, 1, 0)) == (0,) * 6
        assert lattice.contains((0, 1, 0, 1, 0, 1))
        assert not lattice.contains((1, 0, 0, 0, 0, 0))

    def test_empty_lattice(self):
        lattice = RelationLattice([])
        assert lattice.reduce((1, 2)) == (1, 2)


class TestEquality:
    """equal_on_lattice"""

    def test_reflexive(self, cubic_model):
        a = char_of_triple(cubic_model, IndexTriple(K=[1]))
        assert equal_on_lattice(cubic_model, a, a) == Equality.YES

    def test_generic_unimodular_merge(self, t1_model):
        trivial = char_of_triple(t1_model, IndexTriple())
        full = char_of_triple(t1_model, IndexTriple(I=[1], K=[1], L=[1]))
        assert equal_on_lattice(t1_model, trivial, full, Backend.GENERIC) == Equality.YES

    def test_generic_distinct(self, t1_model):
        a = char_of_triple(t1_model, IndexTriple(I=[1]))
        b = char_of_triple(t1_model, IndexTriple(K=[1]))
        assert equal_on_lattice(t1_model, a, b, Backend.GENERIC) == Equality.NO

    def test_numeric_unavailable_on_generic_model(self, t1_model):
        a = char_of_triple(t1_model, IndexTriple(I=[1]))
        with pytest.raises(BackendUnavailable):
            equal_on_lattice(t1_model, a, a, Backend.NUMERIC)

    def test_generic_unavailable_without_relations(self, cubic_model):
        a = char_of_triple(cubic_model, IndexTriple(I=[1]))
        with pytest.raises(BackendUnavailable):
            equal_on_lattice(cubic_model, a, a, Backend.GENERIC)

    def test_guard_band_is_ambiguous(self, cubic_model):
        a = char_of_triple(cubic_model, IndexTriple(I=[1]))
        tau = cubic_model.tolerance
        shifted = char_from_user(cubic_model, [complex(a.values[0].value) + 5 * tau])
        assert equal_on_lattice(cubic_model, a, shifted) == Equality.AMBIGUOUS
        far = char_from_user(cubic_model, [complex(a.values[0].value) + 100 * tau])
        assert equal_on_lattice(cubic_model, a, far) == Equality.NO


class TestClassification:
    """classify_all"""

    def test_cubic_has_seven_classes(self, cubic_classes):
        assert len(cubic_classes) == 7
        trivial = cubic_classes.trivial_class
        assert trivial.id == "trivial"
        assert trivial.members == (IndexTriple(), IndexTriple(I=[1], K=[1], L=[1]))

    def test_partition(self, cubic_classes, paired_classes):
        for classes in (cubic_classes, paired_classes):
            members = [m for c in classes for m in c.members]
            assert len(members) == len(set(members))
            s, t = classes.model.s, classes.model.t
            assert len(members) == 2 ** (s + 2 * t)

    def test_canonical_order(self, cubic_classes):
        keys = [c.representative.sort_key for c in cubic_classes]
        assert keys == sorted(keys)

    def test_t1_generic_matches_numeric(self, t1_classes, cubic_classes):
        assert len(t1_classes) == 7
        assert [c.members for c in t1_classes] == [c.members for c in cubic_classes]

    def test_paired_trivial_class(self, paired_classes):
        assert paired_classes.trivial_class.members == (
            IndexTriple(),
            IndexTriple(I=[1], K=[1], L=[1]),
            IndexTriple(I=[1, 2], K=[1, 2], L=[1, 2]),
            IndexTriple(I=[2], K=[2], L=[2]),
        )

    def test_paired_class_of_x1(self, paired_classes):
        bundle_class = paired_classes.class_of_triple(IndexTriple(I=[1]))
        assert set(bundle_class.members) == {IndexTriple(I=[1]), IndexTriple(I=[1, 2], K=[2], L=[2])}

    def test_numeric_and_generic_agree_on_explicit_model(self, explicit_model):
        numeric = classify_all(explicit_model, Backend.NUMERIC)
        generic = classify_all(explicit_model, Backend.GENERIC)
        assert [c.members for c in numeric] == [c.members for c in generic]

    def test_ambiguity_reported(self):
        # C 极小时 σ_2 与 σ_3 的值只在保护带内不同
        model = synthetic_model(1, 1, [[-1]], generator_args=[["1/200000000"]])
        with pytest.raises(AmbiguousCharacters) as info:
            classify_all(model, Backend.NUMERIC)
        assert info.value.pairs
        assert info.value.suggested_precision == 512

    def test_resolve_user_character(self, cubic_model, cubic_classes):
        assert cubic_classes.resolve(char_from_user(cubic_model, "1")).trivial
        assert cubic_classes.resolve(char_from_user(cubic_model, "sigma(1)")).id == "({1},∅,∅)"
        assert cubic_classes.resolve(char_from_user(cubic_model, [1.0])).trivial
        assert cubic_classes.resolve(char_from_user(cubic_model, [2.0])) is None


class TestUserCharacters:
    """char_from_user 与表达式语法"""

    def test_sigma_product(self, cubic_model):
        character = char_from_user(cubic_model, "sigma(2)*sigma(3)")
        assert abs(character.values[0].value - 0.7548777) < 1e-6

    def test_triple_syntax(self, cubic_model):
        character = char_from_user(cubic_model, "triple I=1;K=;L=1")
        assert character.exponent == (1, 0, 1)

    def test_powers(self):
        parsed = CharacterExpressionParser(1, 1).parse("sigma(1)^-1 * sigma(2)^2")
        assert parsed.exponent == (-1, 2, 0)

    def test_values_syntax(self):
        parsed = CharacterExpressionParser(2, 1).parse("values(1.0, 0.5+0.2j)")
        assert parsed.values == (1.0, 0.5 + 0.2j)

    @pytest.mark.parametrize("text", ["", "sigma(4)", "tau(1)", "triple I=2", "values(1, 2)"])
    def test_malformed(self, text):
        with pytest.raises(MalformedSpec):
            CharacterExpressionParser(1, 1).parse(text)

    def test_wrong_value_count(self, cubic_model):
        with pytest.raises(MalformedSpec):
            char_from_user(cubic_model, [1.0, 2.0])
