"""OT 流形的可解流形模型 G = R^s ⋉_φ (R^s ⊕ C^t)

由数域数据（f 与全正单位组 U）或直接由 B、关系与 C 构造 SolvModel：

- λ_j = p(l(u_j)) 为格 Λ 的生成元
- B、C 满足 σ_{s+k}(u_j) = exp(ψ_k(λ_j))，其中
  ψ_k(x) = ½ Σ_i b_ik x_i + √−1 Σ_i c_ik x_i（c 项带 √−1，ψ̄_k 为其共轭）
"""

import logging
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Sequence, Tuple, Union

import mpmath
from mpmath import mp
from pydantic import BaseModel, ConfigDict, Field

from .exceptions import (
    InconsistentRelation,
    MalformedSpec,
    NotALattice,
    NotAUnit,
    NotTotallyPositive,
    NotUnimodular,
    PrecisionExhausted,
    WrongRank,
)
from .numberfield import (
    Ball,
    EmbeddingSet,
    FieldElement,
    Polynomial,
    evaluate,
    find_embeddings,
    is_unit,
)
from .utils import format_fraction, to_fraction

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 256
DEFAULT_TOLERANCE = 1e-9

Vector = Tuple[Fraction, ...]


def effective_tolerance(tolerance: float, precision: int) -> float:
    """模型容差 τ：高于 256 位时按 2^{-(precision-256)/4} 收紧，低于 256 位时保持 tolerance 不放宽"""
    if precision <= DEFAULT_PRECISION:
        return tolerance
    return tolerance * 2.0 ** ((DEFAULT_PRECISION - precision) / 4)


class UnitSystem(BaseModel):
    """单位组 u_1, …, u_s"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    units: Tuple[FieldElement, ...]

    def __len__(self) -> int:
        return len(self.units)


class LogLattice(BaseModel):
    """对数格：行向量 l(u_j) 与其前 s 个坐标组成的矩阵 P"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    vectors: Tuple[Tuple[Any, ...], ...]
    P: Any

    @property
    def determinant(self):
        return mpmath.det(self.P)


class SolvModel(BaseModel):
    """可解流形模型

    b、c 为数值矩阵（s×t，行 i 列 k）；合成模型另存精确的 b_exact / c_exact。
    unit_values[j][i-1] = σ_i(u_j)；generic 合成模型没有数值，只能用 generic 后端比较。
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    s: int = Field(..., ge=1)
    t: int = Field(..., ge=1)
    source: Literal["field", "synthetic"]
    lattice_generators: Tuple[Tuple[Any, ...], ...]
    b: Tuple[Tuple[Any, ...], ...]
    c: Optional[Tuple[Tuple[Any, ...], ...]] = None
    b_exact: Optional[Tuple[Tuple[Fraction, ...], ...]] = None
    c_exact: Optional[Tuple[Tuple[Fraction, ...], ...]] = None
    unit_values: Optional[Tuple[Tuple[Ball, ...], ...]] = None
    relations: Optional[Tuple[Vector, ...]] = None
    precision: int = DEFAULT_PRECISION
    tolerance: float = DEFAULT_TOLERANCE
    residuals: Dict[str, float] = Field(default_factory=dict)

    # 数域来源的附加数据
    polynomial: Optional[Polynomial] = None
    embeddings: Optional[EmbeddingSet] = None
    units: Optional[UnitSystem] = None
    log_lattice: Optional[LogLattice] = None
    # Δ = σ(O_K) 只记录幂基的像，任何维数计算都不用它
    fiber_basis: Optional[Tuple[Tuple[Ball, ...], ...]] = None

    @property
    def generic(self) -> bool:
        """是否只有符号数据（无单位数值）"""
        return self.unit_values is None

    @property
    def n_functionals(self) -> int:
        """泛函基 x_1..x_s, ψ_1..ψ_t, ψ̄_1..ψ̄_t 的长度"""
        return self.s + 2 * self.t

    @property
    def complex_dimension(self) -> int:
        return self.s + self.t

    def unimodular_vector(self) -> Vector:
        """x_[s] + ψ_[t] + ψ̄_[t] 的指数向量"""
        return tuple(Fraction(1) for _ in range(self.n_functionals))

    def b_relation_vectors(self) -> List[Vector]:
        """精确 B 给出的 t 个恒等式 ψ_k + ψ̄_k − Σ_i b_ik x_i = 0；只有数值 B 时为空

        它们之和即幺模向量。
        """
        if self.b_exact is None:
            return []
        s, t = self.s, self.t
        vectors = []
        for k in range(t):
            vector = [-self.b_exact[i][k] for i in range(s)] + [Fraction(0)] * (2 * t)
            vector[s + k] = Fraction(1)
            vector[s + t + k] = Fraction(1)
            vectors.append(tuple(vector))
        return vectors

    def relation_vectors(self) -> List[Vector]:
        """声明的关系、B 确定的恒等式与恒成立的幺模关系"""
        return list(self.relations or ()) + self.b_relation_vectors() + [self.unimodular_vector()]

    def psi(self, k: int, x: Sequence[Any]):
        """ψ_k(x)（k 从 1 开始；需要数值 C）"""
        if self.c is None:
            raise MalformedSpec("generic 模型没有数值 C，无法计算 ψ_k")
        with mp.workprec(self.precision + 32):
            re_part = sum(self.b[i][k - 1] * x[i] for i in range(self.s)) / 2
            im_part = sum(self.c[i][k - 1] * x[i] for i in range(self.s))
            return mp.mpc(re_part, im_part)


def _check_unit(u: FieldElement) -> None:
    if not is_unit(u):
        raise NotAUnit(f"{u} 不是单位")


def log_vector(u: FieldElement, embeddings: EmbeddingSet) -> Tuple[Any, ...]:
    """l(u) = (log σ_1(u), …, log σ_s(u), 2log|σ_{s+1}(u)|, …, 2log|σ_{s+t}(u)|)

    Raises:
        NotAUnit: u 不是单位
        NotTotallyPositive: 某个实嵌入下 σ_i(u) 不为正

    """
    _check_unit(u)
    s, t = embeddings.s, embeddings.t
    values = [evaluate(u, i, embeddings) for i in range(1, s + t + 1)]
    with mp.workprec(embeddings.working_precision):
        coords = []
        for i, ball in enumerate(values[:s], start=1):
            if ball.value.real - ball.radius <= 0:
                raise NotTotallyPositive(f"σ_{i}({u}) = {mpmath.nstr(ball.value.real, 10)} 不为正")
            coords.append(mpmath.log(ball.value.real))
        for ball in values[s:]:
            coords.append(2 * mpmath.log(abs(ball.value)))
    return tuple(coords)


def log_lattice(units: UnitSystem, embeddings: EmbeddingSet) -> LogLattice:
    """计算 l(U) 与 P"""
    vectors = tuple(log_vector(u, embeddings) for u in units.units)
    s = embeddings.s
    with mp.workprec(embeddings.working_precision):
        P = mpmath.matrix([list(v[:s]) for v in vectors])
    return LogLattice(vectors=vectors, P=P)


def _matrix_rows(m, rows: int, cols: int) -> Tuple[Tuple[Any, ...], ...]:
    return tuple(tuple(m[i, j] for j in range(cols)) for i in range(rows))


def build_model(
    f: Polynomial,
    units: Union[UnitSystem, Sequence[FieldElement]],
    precision: int = DEFAULT_PRECISION,
    tolerance: float = DEFAULT_TOLERANCE,
    relations: Optional[Sequence[Sequence[Any]]] = None,
    branch_shifts: Optional[Sequence[Sequence[int]]] = None,
    check_irreducible: bool = True,
) -> SolvModel:
    """由数域数据构造 SolvModel

    Args:
        f: 定义多项式
        units: 全正单位组，个数必须等于 s
        precision: 根的精度（二进制位）
        tolerance: 默认精度下的模型容差
        relations: 可选的声明关系（泛函基上的有理向量）
        branch_shifts: 可选 s×t 整数矩阵，辐角加上 2π·n_jk 后再解 C
        check_irreducible: 是否验证 f 不可约

    Returns:
        SolvModel: source="field" 的模型

    Raises:
        WrongRank: 单位个数不等于 s
        NotALattice: det(P) 低于容差
        NotUnimodular: 1 + Σ_k b_ik 偏离 0
        PrecisionExhausted: 单位取值的误差半径不小于容差

    """
    if not isinstance(units, UnitSystem):
        units = UnitSystem(units=tuple(units))

    if check_irreducible:
        f.check_irreducible()
    else:
        logger.warning("跳过不可约性检查；求逆失败将作为 f 可约的证据")

    embeddings = find_embeddings(f, precision)
    s, t = embeddings.s, embeddings.t
    if len(units) != s:
        raise WrongRank(f"单位个数 {len(units)} 不等于 s = {s}")

    if not all(u.is_integral for u in units.units):
        raise MalformedSpec("单位必须在 Z[θ] 中（幂基整数坐标）")

    tau = effective_tolerance(tolerance, precision)
    lattice = log_lattice(units, embeddings)

    with mp.workprec(embeddings.working_precision):
        P = lattice.P
        scale = max(mpmath.mnorm(P, 1), mp.mpf(1))
        det = mpmath.det(P)
        if abs(det) <= tau * scale ** s:
            raise NotALattice(f"det(P) = {mpmath.nstr(det, 5)} 低于容差，单位乘法相关")

        M = mpmath.matrix([[lattice.vectors[j][s + k] for k in range(t)] for j in range(s)])
        A = mpmath.matrix(s, t)
        for j, u in enumerate(units.units):
            for k in range(t):
                value = evaluate(u, s + k + 1, embeddings).value
                shift = branch_shifts[j][k] if branch_shifts else 0
                A[j, k] = mpmath.arg(value) + 2 * mp.pi * shift

        P_inv = P ** -1
        B = P_inv * M
        C = P_inv * A

        b = _matrix_rows(B, s, t)
        c = _matrix_rows(C, s, t)
        generators = tuple(tuple(lattice.vectors[j][:s]) for j in range(s))

        unit_values = tuple(
            tuple(evaluate(u, i, embeddings) for i in range(1, s + 2 * t + 1))
            for u in units.units
        )
        worst_radius = max(ball.radius for row in unit_values for ball in row)
        if worst_radius >= tau:
            raise PrecisionExhausted(
                f"σ_i(u_j) 的误差半径 {mpmath.nstr(worst_radius, 5)} 不小于容差 {tau}，请提高 --precision"
            )
        theta_powers = [f.element([0] * k + [1]) for k in range(f.degree)]
        fiber_basis = tuple(
            tuple(evaluate(a, i, embeddings) for i in range(1, s + t + 1))
            for a in theta_powers
        )

        unimodular_residual = max(abs(1 + sum(b[i])) for i in range(s))
        log_norm_residual = max(abs(sum(v)) for v in lattice.vectors)
        psi_residual = mp.mpf(0)
        for j in range(s):
            for k in range(t):
                exponent = mp.mpc(
                    sum(b[i][k] * generators[j][i] for i in range(s)) / 2,
                    sum(c[i][k] * generators[j][i] for i in range(s)),
                )
                residual = abs(mpmath.exp(exponent) - unit_values[j][s + k].value)
                psi_residual = max(psi_residual, residual)

    if unimodular_residual > tau:
        raise NotUnimodular(f"幺模残差 {mpmath.nstr(unimodular_residual, 5)} 超过容差 {tau}")

    logger.debug("构造数域模型 s=%d t=%d det(P)=%s", s, t, mpmath.nstr(det, 8))

    model = SolvModel(
        s=s,
        t=t,
        source="field",
        lattice_generators=generators,
        b=b,
        c=c,
        unit_values=unit_values,
        relations=None,
        precision=precision,
        tolerance=tau,
        residuals={
            "unimodularity": float(unimodular_residual),
            "log_norm": float(log_norm_residual),
            "psi_reconstruction": float(psi_residual),
        },
        polynomial=f,
        embeddings=embeddings,
        units=units,
        log_lattice=lattice,
        fiber_basis=fiber_basis,
    )
    if relations:
        model = model.model_copy(update={"relations": normalize_relations(model, relations)})
    return model


def _parse_matrix(rows: Sequence[Sequence[Any]], n_rows: int, n_cols: int, name: str) -> Tuple[Tuple[Fraction, ...], ...]:
    if len(rows) != n_rows or any(len(row) != n_cols for row in rows):
        raise MalformedSpec(f"矩阵 {name} 的形状必须是 {n_rows}×{n_cols}")
    try:
        return tuple(tuple(to_fraction(v) for v in row) for row in rows)
    except ValueError as e:
        raise MalformedSpec(f"矩阵 {name}: {e!s}")


def synthetic_model(
    s: int,
    t: int,
    B: Sequence[Sequence[Any]],
    relations: Sequence[Sequence[Any]] = (),
    generator_args: Union[str, Sequence[Sequence[Any]]] = "generic",
    precision: int = DEFAULT_PRECISION,
    tolerance: float = DEFAULT_TOLERANCE,
) -> SolvModel:
    """只由泛函数据构造模型，用于只给出 σ_i(u) 乘法关系、未给出数域的例子

    Args:
        s, t: 签名
        B: s×t 精确有理矩阵，每行满足 1 + Σ_k b_ik = 0
        relations: 泛函 x、ψ、ψ̄ 之间的精确线性关系
        generator_args: "generic"，或显式 s×t 有理矩阵 C
        precision: 数值精度
        tolerance: 默认精度下的容差

    Returns:
        SolvModel: source="synthetic"，格生成元取 R^s 标准基

    Raises:
        NotUnimodular: B 不满足幺模条件

    """
    if s < 1 or t < 1:
        raise MalformedSpec(f"签名 (s={s}, t={t}) 不满足 s >= 1 且 t >= 1")
    b_exact = _parse_matrix(B, s, t, "B")
    for i, row in enumerate(b_exact, start=1):
        if 1 + sum(row) != 0:
            raise NotUnimodular(f"B 的第 {i} 行: 1 + Σ_k b_ik = {format_fraction(1 + sum(row))} ≠ 0")

    c_exact = None
    if isinstance(generator_args, str):
        if generator_args != "generic":
            raise MalformedSpec(f"未知的 C 模式: {generator_args}")
    else:
        c_exact = _parse_matrix(generator_args, s, t, "C")

    wp = precision + 32
    with mp.workprec(wp):
        b = tuple(tuple(mp.mpf(v.numerator) / v.denominator for v in row) for row in b_exact)
        generators = tuple(tuple(mp.mpf(1 if i == j else 0) for i in range(s)) for j in range(s))
        c = None
        unit_values = None
        if c_exact is not None:
            c = tuple(tuple(mp.mpf(v.numerator) / v.denominator for v in row) for row in c_exact)
            radius = mp.mpf(2) ** (-precision)
            rows = []
            for j in range(s):
                real = [Ball(value=mp.mpc(mpmath.exp(generators[j][i]), 0), radius=radius) for i in range(s)]
                upper = [
                    Ball(value=mpmath.exp(mp.mpc(b[j][k] / 2, c[j][k])), radius=radius)
                    for k in range(t)
                ]
                rows.append(tuple(real + upper + [ball.conjugate() for ball in upper]))
            unit_values = tuple(rows)

    model = SolvModel(
        s=s,
        t=t,
        source="synthetic",
        lattice_generators=generators,
        b=b,
        c=c,
        b_exact=b_exact,
        c_exact=c_exact,
        unit_values=unit_values,
        relations=(),
        precision=precision,
        tolerance=effective_tolerance(tolerance, precision),
        residuals={"unimodularity": 0.0},
    )
    return model.model_copy(update={"relations": normalize_relations(model, relations)})


def normalize_relations(model: SolvModel, relations: Sequence[Sequence[Any]]) -> Tuple[Vector, ...]:
    """解析并验证声明的关系

    长度为 1+s+2t 且首项为 0 的向量会去掉常数项。每个关系必须是泛函恒等式：
    实部 r_i + ½ Σ_k (r_ψk + r_ψ̄k) b_ik = 0，虚部 Σ_k (r_ψk − r_ψ̄k) c_ik = 0；
    generic C 时要求 r_ψk = r_ψ̄k。

    Raises:
        MalformedSpec: 长度或数值格式错误
        InconsistentRelation: 不是恒等式

    """
    s, t, n = model.s, model.t, model.n_functionals
    parsed: List[Vector] = []
    for index, relation in enumerate(relations, start=1):
        try:
            vector = [to_fraction(v) for v in relation]
        except ValueError as e:
            raise MalformedSpec(f"关系 {index}: {e!s}")
        if len(vector) == n + 1:
            if vector[0] != 0:
                raise InconsistentRelation(f"关系 {index} 的常数项必须为 0")
            vector = vector[1:]
        if len(vector) != n:
            raise MalformedSpec(f"关系 {index} 的长度必须是 {n}（或 {n + 1}）")
        _check_relation(model, tuple(vector), index)
        parsed.append(tuple(vector))
    return tuple(parsed)


def _check_relation(model: SolvModel, r: Vector, index: int) -> None:
    s, t = model.s, model.t
    x_part, psi_part, psibar_part = r[:s], r[s:s + t], r[s + t:]

    if model.b_exact is not None:
        for i in range(s):
            real = x_part[i] + sum((psi_part[k] + psibar_part[k]) * model.b_exact[i][k] for k in range(t)) / 2
            if real != 0:
                raise InconsistentRelation(f"关系 {index} 的实部在 x_{i + 1} 方向不为零")
        if model.c_exact is None:
            if any(psi_part[k] != psibar_part[k] for k in range(t)):
                raise InconsistentRelation(f"关系 {index}: generic C 下要求 ψ_k 与 ψ̄_k 的系数相等")
        else:
            for i in range(s):
                imag = sum((psi_part[k] - psibar_part[k]) * model.c_exact[i][k] for k in range(t))
                if imag != 0:
                    raise InconsistentRelation(f"关系 {index} 的虚部在 x_{i + 1} 方向不为零")
        return

    # 数域模型：对数值 B、C 做容差检查
    with mp.workprec(model.precision + 32):
        for i in range(s):
            real = float(x_part[i]) + sum(
                float(psi_part[k] + psibar_part[k]) * model.b[i][k] for k in range(t)
            ) / 2
            imag = sum(float(psi_part[k] - psibar_part[k]) * model.c[i][k] for k in range(t))
            if abs(real) > model.tolerance or abs(imag) > model.tolerance:
                raise InconsistentRelation(f"关系 {index} 在 x_{i + 1} 方向的残差超过容差")
