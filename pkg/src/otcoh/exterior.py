"""带特征权的外代数与扭曲导子

生成元全局次序为 α_1..α_s < ᾱ_1..ᾱ_s < β_1..β_t < β̄_1..β̄_t（de Rham：dx < e^{-x}dy < e^{-ψ}dz < e^{-ψ̄}dz̄）。
每一项记为 (单项式, 权) → 系数，单项式是升序的生成元编号，权是泛函基 x, ψ, ψ̄ 上的指数向量，
表示所张量的截面 v_{e^{Ψ}}。

扭曲导子 D(ω ⊗ v_w) = Dω ⊗ v_w + θ_w ∧ ω ⊗ v_w：
- Dolbeault：θ_w = ½ w(ᾱ)
- de Rham：θ_w = w(dx)
其中 ψ_k(ᾱ) = Σ_i (½ b_ik + √−1 c_ik) ᾱ_i。
"""

import itertools
import logging
import random
from fractions import Fraction
from typing import Callable, Dict, Iterable, Iterator, List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict
from sympy import I, Integer, Rational, S, Symbol, expand

from .characters import (
    Classification,
    Equality,
    IndexTriple,
    all_triples,
    char_of_triple,
    character_from_exponent,
    equal_on_lattice,
)
from .solvmodel import SolvModel, Vector

logger = logging.getLogger(__name__)

Monomial = Tuple[int, ...]
TermKey = Tuple[Monomial, Vector]

RANDOM_FORMS = 200
RANDOM_SEED = 20240917


class Generator(BaseModel):
    """外代数生成元"""

    model_config = ConfigDict(frozen=True)

    index: int
    name: str
    degree: Literal["(1,0)", "(0,1)", "1"]
    weight: Vector


def _unit(n: int, position: Optional[int]) -> Vector:
    return tuple(Fraction(1 if j == position else 0) for j in range(n))


def dolbeault_generators(s: int, t: int) -> List[Generator]:
    """α_i ⊗ v_{e^{x_i}}、ᾱ_i、β_k ⊗ v_{e^{ψ_k}}、β̄_k ⊗ v_{e^{ψ̄_k}}"""
    n = s + 2 * t
    generators: List[Generator] = []
    for i in range(s):
        generators.append(Generator(index=len(generators), name=f"a_{i + 1}", degree="(1,0)", weight=_unit(n, i)))
    for i in range(s):
        generators.append(Generator(index=len(generators), name=f"abar_{i + 1}", degree="(0,1)", weight=_unit(n, None)))
    for k in range(t):
        generators.append(Generator(index=len(generators), name=f"b_{k + 1}", degree="(1,0)", weight=_unit(n, s + k)))
    for k in range(t):
        generators.append(
            Generator(index=len(generators), name=f"bbar_{k + 1}", degree="(0,1)", weight=_unit(n, s + t + k))
        )
    return generators


def derham_generators(s: int, t: int) -> List[Generator]:
    """dx_i、e^{-x_i}dy_i ⊗ v_{e^{x_i}}、e^{-ψ_k}dz_k ⊗ v_{e^{ψ_k}}、e^{-ψ̄_k}dz̄_k ⊗ v_{e^{ψ̄_k}}"""
    n = s + 2 * t
    generators: List[Generator] = []
    for i in range(s):
        generators.append(Generator(index=len(generators), name=f"dx_{i + 1}", degree="1", weight=_unit(n, None)))
    for i in range(s):
        generators.append(Generator(index=len(generators), name=f"ey_{i + 1}", degree="1", weight=_unit(n, i)))
    for k in range(t):
        generators.append(Generator(index=len(generators), name=f"ez_{k + 1}", degree="1", weight=_unit(n, s + k)))
    for k in range(t):
        generators.append(Generator(index=len(generators), name=f"ezbar_{k + 1}", degree="1", weight=_unit(n, s + t + k)))
    return generators


def _add_vectors(a: Vector, b: Vector) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def _merge(a: Monomial, b: Monomial) -> Optional[Tuple[int, Monomial]]:
    """a ∧ b 的符号与升序单项式；有重复生成元时为 None"""
    if set(a) & set(b):
        return None
    inversions = sum(1 for x in a for y in b if x > y)
    return (-1) ** inversions, tuple(sorted(a + b))


class FormExpr:
    """稀疏的带权形式：{(单项式, 权): 系数}"""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Optional[Dict[TermKey, object]] = None):
        self.n = n
        self.terms: Dict[TermKey, object] = {}
        for key, coefficient in (terms or {}).items():
            coefficient = expand(coefficient)
            if coefficient != 0:
                self.terms[key] = coefficient

    @classmethod
    def zero(cls, n: int) -> "FormExpr":
        return cls(n)

    @classmethod
    def monomial(cls, n: int, generators: Sequence[Generator], coefficient=S.One, weight: Optional[Vector] = None) -> "FormExpr":
        """生成元之积；weight 缺省为各生成元权之和"""
        if weight is None:
            weight = _unit(n, None)
            for generator in generators:
                weight = _add_vectors(weight, generator.weight)
        result = cls(n, {((), weight): coefficient})
        for generator in generators:
            result = result.wedge(cls(n, {((generator.index,), _unit(n, None)): S.One}))
        return result

    def __iter__(self) -> Iterator[Tuple[TermKey, object]]:
        return iter(sorted(self.terms.items(), key=lambda item: (item[0][0], item[0][1])))

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FormExpr):
            return NotImplemented
        return (self - other).is_zero

    def __add__(self, other: "FormExpr") -> "FormExpr":
        terms = dict(self.terms)
        for key, coefficient in other.terms.items():
            terms[key] = terms.get(key, S.Zero) + coefficient
        return FormExpr(self.n, terms)

    def __neg__(self) -> "FormExpr":
        return self.scale(-1)

    def __sub__(self, other: "FormExpr") -> "FormExpr":
        return self + (-other)

    def scale(self, factor) -> "FormExpr":
        return FormExpr(self.n, {key: factor * coefficient for key, coefficient in self.terms.items()})

    def with_weight(self, weight: Vector) -> "FormExpr":
        """把每一项的权替换为 weight"""
        terms: Dict[TermKey, object] = {}
        for (monomial, _), coefficient in self.terms.items():
            key = (monomial, weight)
            terms[key] = terms.get(key, S.Zero) + coefficient
        return FormExpr(self.n, terms)

    def wedge(self, other: "FormExpr") -> "FormExpr":
        terms: Dict[TermKey, object] = {}
        for (m1, w1), c1 in self.terms.items():
            for (m2, w2), c2 in other.terms.items():
                merged = _merge(m1, m2)
                if merged is None:
                    continue
                sign, monomial = merged
                key = (monomial, _add_vectors(w1, w2))
                terms[key] = terms.get(key, S.Zero) + sign * c1 * c2
        return FormExpr(self.n, terms)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degrees(self) -> List[int]:
        return sorted({len(monomial) for monomial, _ in self.terms})

    @property
    def weights(self) -> List[Vector]:
        return sorted({weight for _, weight in self.terms})

    def render(self, generators: Sequence[Generator]) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for (monomial, _), coefficient in self:
            names = "∧".join(generators[i].name for i in monomial) or "1"
            parts.append(f"({coefficient})·{names}")
        return " + ".join(parts)


def wedge(a: FormExpr, b: FormExpr) -> FormExpr:
    """外积，权相加"""
    return a.wedge(b)


def psi_coefficients(model: SolvModel) -> Tuple[List[List[object]], List[List[object]]]:
    """ψ_k 与 ψ̄_k 在 x_i 上的系数 [k][i]

    合成模型取精确的 ½b_ik ± √−1 c_ik；数值 B、C 以符号 b_i_k、c_i_k 代替。
    """
    s, t = model.s, model.t
    psi: List[List[object]] = []
    psibar: List[List[object]] = []
    for k in range(t):
        row, row_bar = [], []
        for i in range(s):
            if model.b_exact is not None:
                b = Rational(model.b_exact[i][k].numerator, model.b_exact[i][k].denominator)
            else:
                b = Symbol(f"b_{i + 1}_{k + 1}", real=True)
            if model.c_exact is not None:
                c = Rational(model.c_exact[i][k].numerator, model.c_exact[i][k].denominator)
            else:
                c = Symbol(f"c_{i + 1}_{k + 1}", real=True)
            row.append(b / 2 + I * c)
            row_bar.append(b / 2 - I * c)
        psi.append(row)
        psibar.append(row_bar)
    return psi, psibar


class TwistedDerivation:
    """由生成元规则与权的联络形式 θ_w 确定的导子"""

    def __init__(
        self,
        model: SolvModel,
        generators: List[Generator],
        rules: Dict[int, FormExpr],
        basis: List[Generator],
        twist_factor,
    ):
        self.model = model
        self.generators = generators
        self.rules = rules
        self.basis = basis
        self.twist_factor = twist_factor
        self.n = model.n_functionals
        self.psi, self.psibar = psi_coefficients(model)
        self._theta_cache: Dict[Vector, FormExpr] = {}

    def one_form(self, weight: Vector) -> FormExpr:
        """w(basis)：x_i ↦ basis_i，ψ_k ↦ Σ_i ψ_ki basis_i，ψ̄_k 同理"""
        s, t = self.model.s, self.model.t
        coefficients = [S.Zero] * s
        for i in range(s):
            coefficients[i] += Rational(weight[i].numerator, weight[i].denominator)
        for k in range(t):
            w_psi = Rational(weight[s + k].numerator, weight[s + k].denominator)
            w_bar = Rational(weight[s + t + k].numerator, weight[s + t + k].denominator)
            for i in range(s):
                coefficients[i] += w_psi * self.psi[k][i] + w_bar * self.psibar[k][i]
        zero = _unit(self.n, None)
        return FormExpr(self.n, {((self.basis[i].index,), zero): coefficients[i] for i in range(s)})

    def theta(self, weight: Vector) -> FormExpr:
        if weight not in self._theta_cache:
            self._theta_cache[weight] = self.one_form(weight).scale(self.twist_factor)
        return self._theta_cache[weight]

    def _apply_monomial(self, monomial: Monomial, weight: Vector) -> FormExpr:
        zero = _unit(self.n, None)
        result = FormExpr.zero(self.n)
        for j, index in enumerate(monomial):
            image = self.rules[index]
            if image.is_zero:
                continue
            prefix = FormExpr(self.n, {(monomial[:j], zero): S.One})
            suffix = FormExpr(self.n, {(monomial[j + 1:], zero): S.One})
            result = result + prefix.wedge(image).wedge(suffix).scale((-1) ** j)
        result = result + self.theta(weight).wedge(FormExpr(self.n, {(monomial, zero): S.One}))
        return result.with_weight(weight)

    def __call__(self, form: FormExpr) -> FormExpr:
        result = FormExpr.zero(self.n)
        for (monomial, weight), coefficient in form.terms.items():
            result = result + self._apply_monomial(monomial, weight).scale(coefficient)
        return result


def _form(n: int, generator: Generator) -> FormExpr:
    return FormExpr(n, {((generator.index,), _unit(n, None)): S.One})


def dolbeault_derivation(model: SolvModel) -> TwistedDerivation:
    """∂̄α_i = −½ ᾱ_i∧α_i，∂̄ᾱ_i = 0，∂̄β_k = −½ ψ_k(ᾱ)∧β_k，∂̄β̄_k = −½ ψ̄_k(ᾱ)∧β̄_k"""
    s, t, n = model.s, model.t, model.n_functionals
    generators = dolbeault_generators(s, t)
    alpha, alpha_bar = generators[:s], generators[s:2 * s]
    beta, beta_bar = generators[2 * s:2 * s + t], generators[2 * s + t:]
    half = Rational(1, 2)

    derivation = TwistedDerivation(model, generators, {}, alpha_bar, half)
    rules: Dict[int, FormExpr] = {}
    for i in range(s):
        rules[alpha[i].index] = _form(n, alpha_bar[i]).wedge(_form(n, alpha[i])).scale(-half)
        rules[alpha_bar[i].index] = FormExpr.zero(n)
    for k in range(t):
        rules[beta[k].index] = derivation.one_form(_unit(n, s + k)).wedge(_form(n, beta[k])).scale(-half)
        rules[beta_bar[k].index] = derivation.one_form(_unit(n, s + t + k)).wedge(_form(n, beta_bar[k])).scale(-half)
    derivation.rules = rules
    return derivation


def derham_derivation(model: SolvModel) -> TwistedDerivation:
    """d(dx_i) = 0，d(e^{-x_i}dy_i) = −dx_i∧e^{-x_i}dy_i，d(e^{-ψ_k}dz_k) = −ψ_k(dx)∧e^{-ψ_k}dz_k"""
    s, t, n = model.s, model.t, model.n_functionals
    generators = derham_generators(s, t)
    dx, ey = generators[:s], generators[s:2 * s]
    ez, ezbar = generators[2 * s:2 * s + t], generators[2 * s + t:]

    derivation = TwistedDerivation(model, generators, {}, dx, S.One)
    rules: Dict[int, FormExpr] = {}
    for i in range(s):
        rules[dx[i].index] = FormExpr.zero(n)
        rules[ey[i].index] = _form(n, dx[i]).wedge(_form(n, ey[i])).scale(-1)
    for k in range(t):
        rules[ez[k].index] = derivation.one_form(_unit(n, s + k)).wedge(_form(n, ez[k])).scale(-1)
        rules[ezbar[k].index] = derivation.one_form(_unit(n, s + t + k)).wedge(_form(n, ezbar[k])).scale(-1)
    derivation.rules = rules
    return derivation


def dbar(model: SolvModel, form: FormExpr) -> FormExpr:
    return dolbeault_derivation(model)(form)


def d_invariant(model: SolvModel, form: FormExpr) -> FormExpr:
    return derham_derivation(model)(form)


def twisted_monomials(n: int, generators: List[Generator]) -> Iterator[Tuple[Tuple[Generator, ...], FormExpr]]:
    """全部无平方单项式，权取各生成元权之和（⋀W₁⊗⋀W₂ 或 ⋀V）"""
    for size in range(len(generators) + 1):
        for chosen in itertools.combinations(generators, size):
            yield chosen, FormExpr.monomial(n, chosen)


class ExteriorCheck(BaseModel):
    """一项符号检查的结果"""

    model_config = ConfigDict(frozen=True)

    name: str
    passed: bool
    checked: int
    failures: Tuple[str, ...] = ()


def _run_check(name: str, items: Iterable[Tuple[str, FormExpr]], operator: Callable[[FormExpr], FormExpr]) -> ExteriorCheck:
    checked = 0
    failures: List[str] = []
    for label, form in items:
        checked += 1
        if not operator(form).is_zero:
            failures.append(label)
    logger.debug("%s: 检查 %d 项，失败 %d 项", name, checked, len(failures))
    return ExteriorCheck(name=name, passed=not failures, checked=checked, failures=tuple(failures))


def random_forms(derivation: TwistedDerivation, count: int = RANDOM_FORMS, seed: int = RANDOM_SEED) -> List[FormExpr]:
    """次数 ≤ 3 的随机形式，权取随机整数向量"""
    rng = random.Random(seed)
    n = derivation.n
    forms = []
    for _ in range(count):
        form = FormExpr.zero(n)
        for _ in range(rng.randint(1, 3)):
            degree = rng.randint(0, min(3, len(derivation.generators)))
            chosen = sorted(rng.sample(derivation.generators, degree), key=lambda g: g.index)
            weight = tuple(Fraction(rng.randint(-2, 2)) for _ in range(n))
            coefficient = Integer(rng.choice([-3, -2, -1, 1, 2, 3]))
            form = form + FormExpr.monomial(n, chosen, coefficient, weight)
        forms.append(form)
    return forms


def square_zero_check(model: SolvModel, count: int = RANDOM_FORMS) -> ExteriorCheck:
    """∂̄² = 0：每个生成元（带权与不带权）以及 count 个随机形式"""
    derivation = dolbeault_derivation(model)
    n = derivation.n
    items: List[Tuple[str, FormExpr]] = []
    for generator in derivation.generators:
        items.append((generator.name, _form(n, generator)))
        items.append((f"{generator.name}⊗v", FormExpr.monomial(n, [generator])))
    items.extend((f"random[{j}]", form) for j, form in enumerate(random_forms(derivation, count)))
    return _run_check("dbar_squared", items, lambda form: derivation(derivation(form)))


def harmonic_closure_check(model: SolvModel) -> ExteriorCheck:
    """∂̄ 在 ⋀W₁⊗⋀W₂ 的每个单项式上为 0"""
    derivation = dolbeault_derivation(model)
    items = (
        ("∧".join(g.name for g in chosen) or "1", form)
        for chosen, form in twisted_monomials(derivation.n, derivation.generators)
    )
    return _run_check("dbar_on_harmonic_model", items, derivation)


def invariant_closure_check(model: SolvModel) -> ExteriorCheck:
    """d 在 ⋀V 上恒为 0"""
    derivation = derham_derivation(model)
    items = (
        ("∧".join(g.name for g in chosen) or "1", form)
        for chosen, form in twisted_monomials(derivation.n, derivation.generators)
    )
    return _run_check("d_on_invariant_model", items, derivation)


class StarClosureReport(BaseModel):
    """每个三元组与其补的权之和为幺模向量，补的特征是原特征的逆"""

    model_config = ConfigDict(frozen=True)

    checked: int
    failures: Tuple[str, ...] = ()
    max_residual: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


def star_closure_check(classes: Classification) -> StarClosureReport:
    """检查 ∗̄ 把 ⊗v_{e^{Ψ}} 送到 ⊗v_{e^{−Ψ}}（只检查特征，不检查 ± 号）"""
    model = classes.model
    unimodular = model.unimodular_vector()
    failures: List[str] = []
    residual = 0.0
    triples = all_triples(model.s, model.t)
    for triple in triples:
        complement = triple.complement(model.s, model.t)
        total = _add_vectors(triple.exponent(model.s, model.t), complement.exponent(model.s, model.t))
        if total != unimodular:
            failures.append(f"{triple.label}: 权之和不是幺模向量")
            continue
        full = character_from_exponent(model, total, "unimodular")
        if full.values is not None:
            for ball in full.values:
                residual = max(residual, float(abs(ball.value - 1)))
        inverse = char_of_triple(model, triple).inverse()
        if equal_on_lattice(model, char_of_triple(model, complement), inverse, classes.backend) != Equality.YES:
            failures.append(f"{triple.label}: 补的特征不是逆特征")
    if residual >= model.tolerance:
        failures.append(f"幺模特征残差 {residual:.3e} 超过容差")
    return StarClosureReport(checked=len(triples), failures=tuple(failures), max_residual=residual)


def oracle_dolbeault_tally(classes: Classification) -> Dict[str, List[List[int]]]:
    """逐个枚举 α_I∧ᾱ_J∧β_K∧β̄_L ⊗ v 并按其自身特征归类，得到各类的 h^{p,q}

    不属于任何类的单项式记在 "unmatched" 下（正常情况下不出现）。
    """
    model = classes.model
    s, t = model.s, model.t
    size = s + t + 1
    tally: Dict[str, List[List[int]]] = {}
    subsets_s = [c for r in range(s + 1) for c in itertools.combinations(range(1, s + 1), r)]
    subsets_t = [c for r in range(t + 1) for c in itertools.combinations(range(1, t + 1), r)]
    for I, J, K, L in itertools.product(subsets_s, subsets_s, subsets_t, subsets_t):
        character = char_of_triple(model, IndexTriple(I=I, K=K, L=L))
        bundle_class = classes.resolve(character)
        key = bundle_class.id if bundle_class is not None else "unmatched"
        table = tally.setdefault(key, [[0] * size for _ in range(size)])
        table[len(I) + len(K)][len(J) + len(L)] += 1
    logger.debug("Dolbeault 枚举：%d 个类", len(tally))
    return tally


def oracle_derham_tally(classes: Classification) -> Dict[str, List[int]]:
    """枚举 ⋀V 的单项式，按权所对应的特征归类，得到各类的 de Rham 维数"""
    model = classes.model
    generators = derham_generators(model.s, model.t)
    top = len(generators)
    tally: Dict[str, List[int]] = {}
    for size in range(top + 1):
        for chosen in itertools.combinations(generators, size):
            weight = _unit(model.n_functionals, None)
            for generator in chosen:
                weight = _add_vectors(weight, generator.weight)
            character = character_from_exponent(model, weight, "monomial")
            bundle_class = classes.resolve(character)
            key = bundle_class.id if bundle_class is not None else "unmatched"
            tally.setdefault(key, [0] * (top + 1))[size] += 1
    return tally
