"""平坦线丛 E_ρ 的特征表示、格上相等判定与丛类划分

约定：I 对应实嵌入 σ_i（泛函 x_i），K 对应 ψ_k（σ_{s+k}），L 对应 ψ̄_l（σ_{s+t+l}），
记作 Ψ_{IK L̄}。
"""

import itertools
import logging
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import mpmath
from mpmath import mp
from pydantic import BaseModel, ConfigDict, field_validator
from sympy import Matrix, Rational

from .exceptions import AmbiguousCharacters, BackendUnavailable, IndexOutOfRange, MalformedSpec
from .expressions import CharacterExpressionParser
from .numberfield import Ball
from .solvmodel import SolvModel, Vector
from .utils import format_subset, to_fraction

logger = logging.getLogger(__name__)

# 数值后端的保护带：差值落在 [τ, GUARD_BAND·τ] 内判为不确定
GUARD_BAND = 10


class Backend(str, Enum):
    """特征比较后端"""

    NUMERIC = "numeric"
    GENERIC = "generic"


class Equality(str, Enum):
    """三值相等判定"""

    YES = "yes"
    NO = "no"
    AMBIGUOUS = "ambiguous"


class IndexTriple(BaseModel):
    """多重指标三元组 (I, K, L)，I ⊂ [s]，K, L ⊂ [t]"""

    model_config = ConfigDict(frozen=True)

    I: Tuple[int, ...] = ()
    K: Tuple[int, ...] = ()
    L: Tuple[int, ...] = ()

    @field_validator("I", "K", "L", mode="before")
    def sort_indices(cls, v):
        """指标升序存储"""
        return tuple(sorted(set(int(i) for i in v)))

    @property
    def p_degree(self) -> int:
        return len(self.I) + len(self.K)

    @property
    def l_weight(self) -> int:
        return len(self.L)

    @property
    def sort_key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]:
        return (self.I, self.K, self.L)

    @property
    def label(self) -> str:
        return f"({format_subset(self.I)},{format_subset(self.K)},{format_subset(self.L)})"

    def check_bounds(self, s: int, t: int) -> None:
        """Raises: IndexOutOfRange"""
        if any(not 1 <= i <= s for i in self.I):
            raise IndexOutOfRange(f"I = {self.I} 超出 [{s}]")
        if any(not 1 <= k <= t for k in self.K + self.L):
            raise IndexOutOfRange(f"K = {self.K}, L = {self.L} 超出 [{t}]")

    def exponent(self, s: int, t: int) -> Vector:
        """在泛函基 x, ψ, ψ̄ 上的 0/1 指数向量"""
        self.check_bounds(s, t)
        vector = [Fraction(0)] * (s + 2 * t)
        for i in self.I:
            vector[i - 1] = Fraction(1)
        for k in self.K:
            vector[s + k - 1] = Fraction(1)
        for l in self.L:
            vector[s + t + l - 1] = Fraction(1)
        return tuple(vector)

    def complement(self, s: int, t: int) -> "IndexTriple":
        """(Ǐ, Ǩ, Ľ)"""
        return IndexTriple(
            I=[i for i in range(1, s + 1) if i not in self.I],
            K=[k for k in range(1, t + 1) if k not in self.K],
            L=[l for l in range(1, t + 1) if l not in self.L],
        )

    def conjugate(self) -> "IndexTriple":
        """交换 K 与 L"""
        return IndexTriple(I=self.I, K=self.L, L=self.K)

    def union(self, other: "IndexTriple") -> "IndexTriple":
        return IndexTriple(I=self.I + other.I, K=self.K + other.K, L=self.L + other.L)

    def is_disjoint(self, other: "IndexTriple") -> bool:
        return not (set(self.I) & set(other.I) or set(self.K) & set(other.K) or set(self.L) & set(other.L))


def _subsets(n: int) -> List[Tuple[int, ...]]:
    result = []
    for size in range(n + 1):
        result.extend(itertools.combinations(range(1, n + 1), size))
    return result


def all_triples(s: int, t: int) -> List[IndexTriple]:
    """全部 2^{s+2t} 个三元组，按 (I, K, L) 字典序排列"""
    triples = [
        IndexTriple(I=I, K=K, L=L)
        for I in _subsets(s)
        for K in _subsets(t)
        for L in _subsets(t)
    ]
    return sorted(triples, key=lambda triple: triple.sort_key)


class Character(BaseModel):
    """特征 ρ ∈ Hom(U, C*)

    values[j] = ρ(u_j)（数值模型）；exponent 为泛函基上的指数向量（来自三元组或 sigma 乘积时存在）。
    precision 为模型的目标精度，求逆与乘积在 precision + 32 位下进行。
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    label: str
    values: Optional[Tuple[Ball, ...]] = None
    exponent: Optional[Vector] = None
    precision: Optional[int] = None

    @property
    def working_precision(self) -> int:
        return (self.precision or mp.prec) + 32

    def inverse(self) -> "Character":
        values = None
        if self.values is not None:
            with mp.workprec(self.working_precision):
                values = tuple(
                    Ball(value=1 / ball.value, radius=2 * ball.radius / abs(ball.value) ** 2)
                    for ball in self.values
                )
        exponent = tuple(-e for e in self.exponent) if self.exponent is not None else None
        return Character(label=f"({self.label})^-1", values=values, exponent=exponent, precision=self.precision)

    def __mul__(self, other: "Character") -> "Character":
        precision = max(self.precision or 0, other.precision or 0) or None
        values = None
        if self.values is not None and other.values is not None:
            with mp.workprec((precision or mp.prec) + 32):
                values = tuple(
                    Ball(
                        value=a.value * b.value,
                        radius=abs(a.value) * b.radius + abs(b.value) * a.radius + a.radius * b.radius,
                    )
                    for a, b in zip(self.values, other.values)
                )
        exponent = None
        if self.exponent is not None and other.exponent is not None:
            exponent = tuple(a + b for a, b in zip(self.exponent, other.exponent))
        return Character(label=f"{self.label}*{other.label}", values=values, exponent=exponent, precision=precision)


def character_from_exponent(model: SolvModel, exponent: Sequence[Any], label: str) -> Character:
    """由指数向量构造特征；数值模型下 ρ(u_j) = ∏_i σ_i(u_j)^{e_i}（仅整数指数有数值）"""
    exponent = tuple(to_fraction(e) for e in exponent)
    if len(exponent) != model.n_functionals:
        raise MalformedSpec(f"指数向量长度必须是 {model.n_functionals}")

    values = None
    if model.unit_values is not None and all(e.denominator == 1 for e in exponent):
        with mp.workprec(model.precision + 32):
            rows = []
            for unit_row in model.unit_values:
                value = mp.mpc(1)
                relative = mp.mpf(0)
                for ball, e in zip(unit_row, exponent):
                    if e:
                        value *= ball.value ** int(e)
                        relative += abs(int(e)) * ball.radius / abs(ball.value)
                rows.append(Ball(value=value, radius=2 * relative * abs(value)))
            values = tuple(rows)
    return Character(label=label, values=values, exponent=exponent, precision=model.precision)


def char_of_triple(model: SolvModel, triple: IndexTriple) -> Character:
    """e^{Ψ_{IK L̄}}：∏_{i∈I} σ_i(u) ∏_{k∈K} σ_{s+k}(u) ∏_{l∈L} conj(σ_{s+l}(u))

    Raises:
        IndexOutOfRange: 指标越界

    """
    return character_from_exponent(model, triple.exponent(model.s, model.t), triple.label)


class RelationLattice:
    """关系向量张成的有理子空间，用精确 RREF 给出规范代表元"""

    def __init__(self, vectors: Sequence[Vector]):
        self.pivots: List[Tuple[int, Vector]] = []
        if not vectors:
            return
        matrix = Matrix([[Rational(v.numerator, v.denominator) for v in row] for row in vectors])
        reduced, pivot_columns = matrix.rref()
        for row, column in enumerate(pivot_columns):
            entries = tuple(to_fraction(reduced[row, j]) for j in range(matrix.cols))
            self.pivots.append((column, entries))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, vector: Sequence[Fraction]) -> Vector:
        """模子空间的规范代表元（主元列清零）"""
        result = list(vector)
        for column, row in self.pivots:
            factor = result[column]
            if factor:
                result = [a - factor * b for a, b in zip(result, row)]
        return tuple(result)

    def contains(self, vector: Sequence[Fraction]) -> bool:
        return all(v == 0 for v in self.reduce(vector))


def relation_lattice(model: SolvModel) -> RelationLattice:
    """Raises: BackendUnavailable（模型没有声明关系）"""
    if model.relations is None:
        raise BackendUnavailable("generic 后端需要声明的精确关系（数域模型请在 relations 中给出）")
    return RelationLattice(model.relation_vectors())


def numeric_distance(a: Character, b: Character):
    """max_j |a(u_j) − b(u_j)|"""
    if a.values is None or b.values is None:
        raise BackendUnavailable(f"特征 {a.label} 或 {b.label} 没有数值，numeric 后端不可用")
    with mp.workprec(max(a.working_precision, b.working_precision)):
        return max(abs(x.value - y.value) for x, y in zip(a.values, b.values))


def equal_on_lattice(
    model: SolvModel,
    a: Character,
    b: Character,
    backend: Union[Backend, str] = Backend.NUMERIC,
    lattice: Optional[RelationLattice] = None,
) -> Equality:
    """判定 a|_Λ = b|_Λ

    numeric：所有生成元处差值 < τ 为 yes，落在 [τ, 10τ] 为 ambiguous；
    generic：指数差属于关系张成的子空间为 yes。

    Raises:
        BackendUnavailable: 后端所需数据缺失

    """
    backend = Backend(backend)
    if backend == Backend.GENERIC:
        if a.exponent is None or b.exponent is None:
            raise BackendUnavailable(f"特征 {a.label} 或 {b.label} 没有指数向量，generic 后端不可用")
        lattice = lattice or relation_lattice(model)
        difference = [x - y for x, y in zip(a.exponent, b.exponent)]
        return Equality.YES if lattice.contains(difference) else Equality.NO

    distance = numeric_distance(a, b)
    tau = model.tolerance
    if distance < tau:
        return Equality.YES
    if distance <= GUARD_BAND * tau:
        return Equality.AMBIGUOUS
    return Equality.NO


class BundleClass(BaseModel):
    """在 Λ 上特征相同的三元组构成的丛类"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    id: str
    members: Tuple[IndexTriple, ...]
    character: Character
    trivial: bool = False

    @property
    def representative(self) -> IndexTriple:
        return self.members[0]


class Classification:
    """classify_all 的结果：有序的丛类列表以及特征到类的解析"""

    def __init__(self, model: SolvModel, backend: Backend, classes: List[BundleClass]):
        self.model = model
        self.backend = backend
        self.classes = classes
        self._lattice = relation_lattice(model) if backend == Backend.GENERIC else None
        self._by_normal_form: Dict[Vector, BundleClass] = {}
        self._by_triple: Dict[IndexTriple, BundleClass] = {}
        for bundle_class in classes:
            for member in bundle_class.members:
                self._by_triple[member] = bundle_class
            if self._lattice is not None:
                self._by_normal_form[self._lattice.reduce(bundle_class.character.exponent)] = bundle_class

    def __iter__(self) -> Iterator[BundleClass]:
        return iter(self.classes)

    def __len__(self) -> int:
        return len(self.classes)

    def __getitem__(self, index: int) -> BundleClass:
        return self.classes[index]

    @property
    def trivial_class(self) -> BundleClass:
        return self.classes[0]

    def class_of_triple(self, triple: IndexTriple) -> BundleClass:
        return self._by_triple[triple]

    def get(self, class_id: str) -> Optional[BundleClass]:
        """根据 id 获取类"""
        for bundle_class in self.classes:
            if bundle_class.id == class_id:
                return bundle_class
        return None

    def resolve(self, character: Character) -> Optional[BundleClass]:
        """找到特征所在的类；不属于任何类时返回 None

        Raises:
            AmbiguousCharacters: 数值后端无法判定

        """
        if self._lattice is not None:
            if character.exponent is None:
                raise BackendUnavailable(f"特征 {character.label} 没有指数向量，generic 后端不可用")
            return self._by_normal_form.get(self._lattice.reduce(character.exponent))

        for bundle_class in self.classes:
            verdict = equal_on_lattice(self.model, character, bundle_class.character, self.backend)
            if verdict == Equality.YES:
                return bundle_class
            if verdict == Equality.AMBIGUOUS:
                raise AmbiguousCharacters(
                    f"无法判定 {character.label} 是否属于类 {bundle_class.id}",
                    pairs=[f"{character.label} ~ {bundle_class.id}"],
                    suggested_precision=2 * self.model.precision,
                )
        return None


def _class_id(representative: IndexTriple) -> str:
    if representative == IndexTriple():
        return "trivial"
    return representative.label


def classify_all(model: SolvModel, backend: Union[Backend, str] = Backend.NUMERIC) -> Classification:
    """把全部 2^{s+2t} 个三元组划分为丛类

    类按代表元（字典序最小成员）排序，平凡类在最前。

    Raises:
        AmbiguousCharacters: 数值后端出现近似重合
        BackendUnavailable: 后端所需数据缺失

    """
    backend = Backend(backend)
    triples = all_triples(model.s, model.t)
    characters = {triple: char_of_triple(model, triple) for triple in triples}

    groups: List[List[IndexTriple]] = []
    if backend == Backend.GENERIC:
        lattice = relation_lattice(model)
        by_form: Dict[Vector, List[IndexTriple]] = {}
        for triple in triples:
            by_form.setdefault(lattice.reduce(characters[triple].exponent), []).append(triple)
        groups = list(by_form.values())
    else:
        if model.unit_values is None:
            raise BackendUnavailable("generic 合成模型没有数值，请使用 generic 后端")
        ambiguous: List[str] = []
        for triple in triples:
            placed = False
            for group in groups:
                verdict = equal_on_lattice(model, characters[triple], characters[group[0]], backend)
                if verdict == Equality.YES:
                    group.append(triple)
                    placed = True
                    break
                if verdict == Equality.AMBIGUOUS:
                    distance = numeric_distance(characters[triple], characters[group[0]])
                    ambiguous.append(f"{triple.label} ~ {group[0].label}: |Δ| = {mpmath.nstr(distance, 5)}")
            if not placed:
                groups.append([triple])
        if ambiguous:
            raise AmbiguousCharacters(
                f"{len(ambiguous)} 对特征落在保护带 [τ, {GUARD_BAND}τ] 内，τ = {model.tolerance:g}",
                pairs=ambiguous,
                suggested_precision=2 * model.precision,
            )

    groups = [sorted(group, key=lambda triple: triple.sort_key) for group in groups]
    groups.sort(key=lambda group: group[0].sort_key)
    classes = [
        BundleClass(
            id=_class_id(group[0]),
            members=tuple(group),
            character=characters[group[0]],
            trivial=group[0] == IndexTriple(),
        )
        for group in groups
    ]
    logger.debug("%s 后端划分出 %d 个丛类", backend.value, len(classes))
    return Classification(model, backend, classes)


def char_from_user(model: SolvModel, spec: Union[str, IndexTriple, Sequence[complex]]) -> Character:
    """由用户输入构造特征

    Args:
        model: 模型
        spec: 三元组、生成元处的复数值列表，或表达式（见 expressions 模块）

    Raises:
        MalformedSpec: 输入不合法

    """
    if isinstance(spec, IndexTriple):
        return char_of_triple(model, spec)

    if not isinstance(spec, str):
        values = list(spec)
        if len(values) != model.s:
            raise MalformedSpec(f"需要 {model.s} 个值（每个生成元一个），实际 {len(values)} 个")
        return _character_from_values(values, "values", model.precision)

    parsed = CharacterExpressionParser(model.s, model.t).parse(spec)
    if parsed.kind == "triple":
        triple = IndexTriple(**parsed.triple)
        return char_of_triple(model, triple)
    if parsed.kind == "values":
        return _character_from_values(list(parsed.values), parsed.text, model.precision)
    return character_from_exponent(model, parsed.exponent, parsed.text)


def _character_from_values(values: Sequence[complex], label: str, precision: int) -> Character:
    balls = []
    for value in values:
        value = complex(value)
        if value == 0:
            raise MalformedSpec("特征值不能为 0")
        balls.append(Ball(value=mp.mpc(value.real, value.imag), radius=mp.mpf(0)))
    return Character(label=label, values=tuple(balls), precision=precision)
