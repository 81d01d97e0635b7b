"""平坦线丛 E_ρ 的 Dolbeault / de Rham 上同调维数

H^{p,q}(E_ρ) 由 α_I∧ᾱ_J∧β_K∧β̄_L ⊗ v 张成，其中 (I,K,L) 的特征与 ρ 在 Λ 上相同、
|I|+|K| = p、|J|+|L| = q；ᾱ 取平凡权，因此 J 的选择只贡献 C(s, q−|L|)。
"""

import logging
from typing import Dict, List, Tuple, Union

from pydantic import BaseModel, ConfigDict

from .characters import (
    BundleClass,
    Character,
    Classification,
    IndexTriple,
    all_triples,
    character_from_exponent,
    char_of_triple,
)
from .exceptions import MissingInverseClass
from .utils import binomial

logger = logging.getLogger(__name__)

Bundle = Union[Character, BundleClass, None]


class HodgeTable(BaseModel):
    """dims[p][q] = dim H^{p,q}(E_ρ)，0 ≤ p, q ≤ s+t"""

    model_config = ConfigDict(frozen=True)

    class_id: str
    dims: Tuple[Tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.dims)

    def __getitem__(self, pq: Tuple[int, int]) -> int:
        p, q = pq
        return self.dims[p][q]


class DeRhamVector(BaseModel):
    """dims[r] = dim H^r(E_ρ)，0 ≤ r ≤ 2(s+t)"""

    model_config = ConfigDict(frozen=True)

    class_id: str
    dims: Tuple[int, ...]


class NonVanishing(BaseModel):
    """H^{p,q}(E_ρ) 非零判据的结果"""

    model_config = ConfigDict(frozen=True)

    nonzero: bool
    witnesses: Tuple[IndexTriple, ...] = ()
    lower_bound: int = 0


class SerreViolation(BaseModel):
    """dim H^{p,q}(E_ρ) ≠ dim H^{n−p,n−q}(E_ρ^{-1})"""

    model_config = ConfigDict(frozen=True)

    class_id: str
    inverse_id: str
    p: int
    q: int
    dim: int
    dual_dim: int


class SerreReport(BaseModel):
    """对偶检查结果"""

    model_config = ConfigDict(frozen=True)

    inverse_classes: Dict[str, str]
    violations: Tuple[SerreViolation, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations


def _members(classes: Classification, rho: Bundle) -> Tuple[IndexTriple, ...]:
    if rho is None:
        return ()
    if isinstance(rho, BundleClass):
        return rho.members
    bundle_class = classes.resolve(rho)
    return bundle_class.members if bundle_class is not None else ()


def _check_bidegree(classes: Classification, p: int, q: int) -> None:
    n = classes.model.complex_dimension
    if not (0 <= p <= n and 0 <= q <= n):
        raise ValueError(f"双次数 ({p}, {q}) 超出 0..{n}")


def _member_dim(triple: IndexTriple, s: int, p: int, q: int) -> int:
    if triple.p_degree != p:
        return 0
    return binomial(s, q - triple.l_weight)


def dolbeault_dim(classes: Classification, rho: Bundle, p: int, q: int) -> int:
    """dim H^{p,q}(X, E_ρ)

    Args:
        classes: classify_all 的结果
        rho: 特征或丛类；不属于任何类时维数为 0
        p, q: 双次数

    Raises:
        AmbiguousCharacters: 数值后端无法判定 ρ 所在的类

    """
    _check_bidegree(classes, p, q)
    s = classes.model.s
    return sum(_member_dim(triple, s, p, q) for triple in _members(classes, rho))


def hodge_table(classes: Classification, bundle_class: BundleClass) -> HodgeTable:
    """丛类的全部 h^{p,q}"""
    s = classes.model.s
    n = classes.model.complex_dimension
    dims = [[0] * (n + 1) for _ in range(n + 1)]
    for triple in bundle_class.members:
        p = triple.p_degree
        for q in range(n + 1):
            dims[p][q] += binomial(s, q - triple.l_weight)
    return HodgeTable(class_id=bundle_class.id, dims=tuple(tuple(row) for row in dims))


def all_tables(classes: Classification) -> List[HodgeTable]:
    return [hodge_table(classes, bundle_class) for bundle_class in classes]


def total_table(tables: List[HodgeTable]) -> Tuple[Tuple[int, ...], ...]:
    """各类 Hodge 表逐项求和"""
    size = tables[0].size
    return tuple(
        tuple(sum(table.dims[p][q] for table in tables) for q in range(size))
        for p in range(size)
    )


def derham_dim(classes: Classification, rho: Bundle, r: int) -> int:
    """dim H^r(X, E_ρ)

    ⋀V 的生成元为 s 个平凡权的 dx_i 与权为 x_i、ψ_k、ψ̄_k 的 2t+s 个生成元；
    次数 r 的单项式中权部分由三元组决定，dx 部分贡献 C(s, r−|I|−|K|−|L|)。
    """
    top = 2 * classes.model.complex_dimension
    if not 0 <= r <= top:
        raise ValueError(f"次数 {r} 超出 0..{top}")
    s = classes.model.s
    return sum(
        binomial(s, r - triple.p_degree - triple.l_weight)
        for triple in _members(classes, rho)
    )


def derham_vector(classes: Classification, bundle_class: BundleClass) -> DeRhamVector:
    top = 2 * classes.model.complex_dimension
    return DeRhamVector(
        class_id=bundle_class.id,
        dims=tuple(derham_dim(classes, bundle_class, r) for r in range(top + 1)),
    )


def nonvanishing(classes: Classification, rho: Bundle, p: int, q: int) -> NonVanishing:
    """H^{p,q}(E_ρ) ≠ 0 当且仅当存在 (I,K,L) ~ ρ，|I|+|K| = p，|L| ≤ q 且 q−|L| ≤ s

    lower_bound 为见证元上 C(s, q−|L|) 的最大值。
    """
    _check_bidegree(classes, p, q)
    s = classes.model.s
    witnesses = tuple(
        triple
        for triple in _members(classes, rho)
        if triple.p_degree == p and triple.l_weight <= q and q - triple.l_weight <= s
    )
    lower_bound = max((binomial(s, q - triple.l_weight) for triple in witnesses), default=0)
    return NonVanishing(nonzero=bool(witnesses), witnesses=witnesses, lower_bound=lower_bound)


def inverse_class(classes: Classification, bundle_class: BundleClass) -> BundleClass:
    """ρ^{-1} 所在的类

    Raises:
        MissingInverseClass: 逆特征不属于任何类（划分有误）

    """
    inverse = classes.resolve(bundle_class.character.inverse())
    if inverse is None:
        raise MissingInverseClass(f"类 {bundle_class.id} 的逆特征不属于任何类")
    return inverse


def serre_check(classes: Classification) -> SerreReport:
    """检查 dim H^{p,q}(E_ρ) = dim H^{n−p,n−q}(E_ρ^{-1})，n = s+t"""
    n = classes.model.complex_dimension
    tables = {table.class_id: table for table in all_tables(classes)}
    inverses: Dict[str, str] = {}
    violations: List[SerreViolation] = []
    for bundle_class in classes:
        dual = inverse_class(classes, bundle_class)
        inverses[bundle_class.id] = dual.id
        table, dual_table = tables[bundle_class.id], tables[dual.id]
        for p in range(n + 1):
            for q in range(n + 1):
                if table.dims[p][q] != dual_table.dims[n - p][n - q]:
                    violations.append(
                        SerreViolation(
                            class_id=bundle_class.id,
                            inverse_id=dual.id,
                            p=p,
                            q=q,
                            dim=table.dims[p][q],
                            dual_dim=dual_table.dims[n - p][n - q],
                        )
                    )
    if violations:
        logger.warning("对偶检查发现 %d 处不一致", len(violations))
    return SerreReport(inverse_classes=inverses, violations=tuple(violations))


def _holomorphic_triples(classes: Classification, p: int) -> List[IndexTriple]:
    model = classes.model
    return [
        triple
        for triple in all_triples(model.s, model.t)
        if not triple.L and triple.p_degree == p
    ]


def tangent_cohomology(classes: Classification, p: int, q: int) -> int:
    """dim H^{0,q}(X, ⋀^p Θ)，Θ ≅ ⊕ E_{e^{x_i}} ⊕ E_{e^{ψ_k}}"""
    model = classes.model
    if not 0 <= p <= model.complex_dimension:
        raise ValueError(f"p = {p} 超出 0..{model.complex_dimension}")
    return sum(
        dolbeault_dim(classes, char_of_triple(model, triple), 0, q)
        for triple in _holomorphic_triples(classes, p)
    )


def cotangent_cohomology(classes: Classification, p: int, q: int) -> int:
    """dim H^{0,q}(X, Ω^p)，Ω¹ ≅ ⊕ E_{e^{−x_i}} ⊕ E_{e^{−ψ_k}}；应与平凡类的 h^{p,q} 相等"""
    model = classes.model
    if not 0 <= p <= model.complex_dimension:
        raise ValueError(f"p = {p} 超出 0..{model.complex_dimension}")
    total = 0
    for triple in _holomorphic_triples(classes, p):
        exponent = tuple(-e for e in triple.exponent(model.s, model.t))
        character = character_from_exponent(model, exponent, f"-{triple.label}")
        total += dolbeault_dim(classes, character, 0, q)
    return total


def hodge_symmetry_defects(table: HodgeTable) -> List[Tuple[int, int]]:
    """h^{p,q} ≠ h^{q,p} 的位置（p < q）"""
    return [
        (p, q)
        for p in range(table.size)
        for q in range(p + 1, table.size)
        if table.dims[p][q] != table.dims[q][p]
    ]


class RigiditySummary(BaseModel):
    """形变与全纯 Poisson 结构的摘要"""

    model_config = ConfigDict(frozen=True)

    h01_tangent: int
    h00_bivectors: int

    @property
    def rigid(self) -> bool:
        return self.h01_tangent == 0

    @property
    def poisson_free(self) -> bool:
        return self.h00_bivectors == 0


def rigidity_summary(classes: Classification) -> RigiditySummary:
    """dim H^{0,1}(Θ)（为 0 即刚性）与 dim H^{0,0}(⋀²Θ)（为 0 即无非零全纯 Poisson 结构）"""
    return RigiditySummary(
        h01_tangent=tangent_cohomology(classes, 1, 1),
        h00_bivectors=tangent_cohomology(classes, 2, 0) if classes.model.complex_dimension >= 2 else 0,
    )


def h01_characters(classes: Classification) -> List[str]:
    """H^{0,1}(E_ρ) ≠ 0 的类：平凡类与 σ_{s+t+k} 的类"""
    return [
        bundle_class.id
        for bundle_class in classes
        if dolbeault_dim(classes, bundle_class, 0, 1) > 0
    ]


def expected_h01_characters(classes: Classification) -> List[str]:
    """由平凡类与 (∅, ∅, {k}) 所在类得到的预期集合，按类的顺序排列"""
    model = classes.model
    expected = {classes.trivial_class.id}
    for k in range(1, model.t + 1):
        expected.add(classes.class_of_triple(IndexTriple(L=(k,))).id)
    return [bundle_class.id for bundle_class in classes if bundle_class.id in expected]


def euler_characteristic(table: HodgeTable) -> int:
    """Σ (−1)^{p+q} h^{p,q}"""
    return sum(
        (-1) ** (p + q) * table.dims[p][q]
        for p in range(table.size)
        for q in range(table.size)
    )
