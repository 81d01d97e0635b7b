"""外代数、扭曲导子与枚举对照"""

from fractions import Fraction

import pytest
from sympy import I, Rational

from otcoh.characters import Backend, classify_all
from otcoh.cohomology import all_tables, derham_vector
from otcoh.exterior import (
    FormExpr,
    d_invariant,
    dbar,
    derham_generators,
    dolbeault_generators,
    harmonic_closure_check,
    invariant_closure_check,
    oracle_derham_tally,
    oracle_dolbeault_tally,
    square_zero_check,
    star_closure_check,
    wedge,
)
from otcoh.solvmodel import synthetic_model

ZERO = (Fraction(0),) * 3


def _plain(n, generators):
    return FormExpr.monomial(n, generators, weight=(Fraction(0),) * n)


class TestGenerators:
    """生成元的次数与权"""

    def test_dolbeault_layout(self):
        generators = dolbeault_generators(1, 1)
        assert [g.name for g in generators] == ["a_1", "abar_1", "b_1", "bbar_1"]
        assert [g.degree for g in generators] == ["(1,0)", "(0,1)", "(1,0)", "(0,1)"]
        assert generators[1].weight == ZERO
        assert generators[3].weight == (0, 0, 1)

    def test_derham_layout(self):
        generators = derham_generators(2, 1)
        assert len(generators) == 6
        assert generators[0].weight == (0,) * 4
        assert generators[2].weight == (1, 0, 0, 0)


class TestWedge:
    """外积"""

    def test_anticommutes(self):
        a, abar, _, _ = dolbeault_generators(1, 1)
        x, y = _plain(3, [a]), _plain(3, [abar])
        assert wedge(x, y) == -wedge(y, x)
        assert wedge(x, x).is_zero

    def test_weights_add(self):
        a, _, b, _ = dolbeault_generators(1, 1)
        product = wedge(FormExpr.monomial(3, [a]), FormExpr.monomial(3, [b]))
        assert product.weights == [(1, 1, 0)]
        assert product.degrees == [2]


class TestDbar:
    """∂̄ 的生成元规则"""

    def test_untwisted_alpha(self, explicit_model):
        a, abar, _, _ = dolbeault_generators(1, 1)
        # ∂̄α = −½ ᾱ∧α = ½ α∧ᾱ
        expected = _plain(3, [a, abar]).scale(Rational(1, 2))
        assert dbar(explicit_model, _plain(3, [a])) == expected

    def test_twisted_alpha_is_closed(self, explicit_model):
        a = dolbeault_generators(1, 1)[0]
        assert dbar(explicit_model, FormExpr.monomial(3, [a])).is_zero

    def test_untwisted_beta(self, explicit_model):
        _, abar, b, _ = dolbeault_generators(1, 1)
        # ψ_1(ᾱ) = (−½ + i/3) ᾱ
        coefficient = -Rational(1, 2) * (Rational(-1, 2) + I / 3)
        expected = _plain(3, [abar, b]).scale(coefficient)
        assert dbar(explicit_model, _plain(3, [b])) == expected

    def test_abar_is_closed(self, explicit_model):
        abar = dolbeault_generators(1, 1)[1]
        assert dbar(explicit_model, _plain(3, [abar])).is_zero

    def test_symbolic_coefficients(self, cubic_model):
        b = dolbeault_generators(1, 1)[2]
        image = dbar(cubic_model, _plain(3, [b]))
        assert len(image) == 1
        coefficient = next(iter(image.terms.values()))
        assert coefficient.free_symbols


class TestDInvariant:
    """d 在不变形式上"""

    def test_rules(self, explicit_model):
        dx, ey, _, _ = derham_generators(1, 1)
        assert d_invariant(explicit_model, _plain(3, [dx])).is_zero
        expected = _plain(3, [dx, ey]).scale(-1)
        assert d_invariant(explicit_model, _plain(3, [ey])) == expected

    def test_twisted_generator_is_closed(self, explicit_model):
        _, _, ez, ezbar = derham_generators(1, 1)
        assert d_invariant(explicit_model, FormExpr.monomial(3, [ez, ezbar])).is_zero


class TestChecks:
    """符号检查"""

    def test_square_zero(self, explicit_model):
        result = square_zero_check(explicit_model, count=10)
        assert result.passed
        assert result.checked == 8 + 10

    def test_square_zero_symbolic(self, cubic_model):
        assert square_zero_check(cubic_model, count=5).passed

    @pytest.mark.parametrize("name", ["explicit_model", "cubic_model"])
    def test_harmonic_closure(self, name, request):
        result = harmonic_closure_check(request.getfixturevalue(name))
        assert result.passed
        assert result.checked == 16

    def test_invariant_closure(self, explicit_model):
        result = invariant_closure_check(explicit_model)
        assert result.passed
        assert result.checked == 16

    @pytest.mark.parametrize("name", ["cubic_classes", "paired_classes"])
    def test_star_closure(self, name, request):
        report = star_closure_check(request.getfixturevalue(name))
        assert report.passed
        classes = request.getfixturevalue(name)
        assert report.checked == 2 ** (classes.model.s + 2 * classes.model.t)


class TestOracle:
    """逐项枚举与公式一致"""

    @pytest.mark.parametrize("name", ["cubic_classes", "paired_classes"])
    def test_dolbeault_tally(self, name, request):
        classes = request.getfixturevalue(name)
        tally = oracle_dolbeault_tally(classes)
        assert "unmatched" not in tally
        size = classes.model.complex_dimension + 1
        empty = [[0] * size for _ in range(size)]
        for table in all_tables(classes):
            assert tally.get(table.class_id, empty) == [list(row) for row in table.dims]

    def test_derham_tally(self, cubic_classes):
        tally = oracle_derham_tally(cubic_classes)
        assert "unmatched" not in tally
        for bundle_class in cubic_classes:
            vector = derham_vector(cubic_classes, bundle_class)
            assert tally[bundle_class.id] == list(vector.dims)

    @pytest.mark.parametrize(
        "s, t, B",
        [
            (1, 1, [[-1]]),
            (2, 1, [[-1], [-1]]),
            (1, 2, [["-1/2", "-1/2"]]),
            (2, 2, [["-1/3", "-2/3"], ["-2/3", "-1/3"]]),
        ],
    )
    def test_generic_signatures(self, s, t, B):
        classes = classify_all(synthetic_model(s, t, B), Backend.GENERIC)
        size = s + t + 1
        empty = [[0] * size for _ in range(size)]
        tally = oracle_dolbeault_tally(classes)
        assert "unmatched" not in tally
        for table in all_tables(classes):
            assert tally.get(table.class_id, empty) == [list(row) for row in table.dims]
        derham = oracle_derham_tally(classes)
        assert "unmatched" not in derham
        for bundle_class in classes:
            expected = list(derham_vector(classes, bundle_class).dims)
            assert derham.get(bundle_class.id, [0] * len(expected)) == expected
