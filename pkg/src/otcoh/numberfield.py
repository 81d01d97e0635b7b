"""数域 K = Q[x]/(f) 的精确算术与带误差半径的复嵌入
"""

import logging
from fractions import Fraction
from typing import Any, List, Sequence, Tuple

import mpmath
from mpmath import mp
from pydantic import BaseModel, ConfigDict, field_validator, model_validator
from sympy import Poly, Rational, Symbol
from sympy.polys.domains import QQ

from .exceptions import (
    NonIntegralElement,
    NonSeparableRoots,
    NotInvertible,
    PrecisionExhausted,
    ReduciblePolynomial,
    WrongSignature,
)
from .utils import to_fraction

logger = logging.getLogger(__name__)

X = Symbol("x")

# 精度最多翻倍的次数
MAX_DOUBLINGS = 4


def _to_rational(value: Fraction) -> Rational:
    return Rational(value.numerator, value.denominator)


def _from_rational(value: Any) -> Fraction:
    value = Rational(value)
    return Fraction(int(value.p), int(value.q))


def _to_mpf(value: Fraction):
    return mp.mpf(value.numerator) / value.denominator


class Polynomial(BaseModel):
    """首一、无平方因子的有理系数多项式 f（系数从低次到高次）"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    coeffs: Tuple[Fraction, ...]

    @field_validator("coeffs", mode="before")
    def parse_coeffs(cls, v):
        """接受整数、Fraction 或 "p/q" 字符串"""
        return tuple(to_fraction(c) for c in v)

    @model_validator(mode="after")
    def validate_polynomial(self):
        """验证首一与无平方因子"""
        if len(self.coeffs) < 4:
            raise WrongSignature(f"多项式次数必须至少为 3，实际为 {len(self.coeffs) - 1}")
        if self.coeffs[-1] != 1:
            raise ReduciblePolynomial(f"多项式必须首一，首项系数为 {self.coeffs[-1]}")

        f = self.to_sympy()
        if f.gcd(f.diff(X)).degree() != 0:
            raise ReduciblePolynomial("多项式有重根（gcd(f, f') 非常数）")
        return self

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def to_sympy(self) -> Poly:
        """转换为 QQ 上的 sympy 多项式"""
        return Poly([_to_rational(c) for c in reversed(self.coeffs)], X, domain=QQ)

    def check_irreducible(self) -> None:
        """验证 f 在 Q 上不可约

        Raises:
            ReduciblePolynomial: f 可约

        """
        if not self.to_sympy().is_irreducible:
            raise ReduciblePolynomial(f"多项式在 Q 上可约: {self.to_sympy().as_expr()}")

    def element(self, coords: Sequence[Any]) -> "FieldElement":
        """由幂基坐标构造域元素（不足 n 位时补零）"""
        coords = [to_fraction(c) for c in coords]
        if len(coords) > self.degree:
            return FieldElement.from_poly(self, Poly([_to_rational(c) for c in reversed(coords)], X, domain=QQ))
        coords += [Fraction(0)] * (self.degree - len(coords))
        return FieldElement(modulus=self, coords=tuple(coords))

    def one(self) -> "FieldElement":
        return self.element([1])

    def theta(self) -> "FieldElement":
        """生成元 θ = x mod f"""
        return self.element([0, 1])

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr())


class FieldElement(BaseModel):
    """幂基 1, θ, …, θ^{n-1} 下的约化表示"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    modulus: Polynomial
    coords: Tuple[Fraction, ...]

    @classmethod
    def from_poly(cls, modulus: Polynomial, poly: Poly) -> "FieldElement":
        """对 f 取余后构造元素"""
        reduced = poly.rem(modulus.to_sympy())
        coeffs = [_from_rational(c) for c in reversed(reduced.all_coeffs())]
        coeffs += [Fraction(0)] * (modulus.degree - len(coeffs))
        return cls(modulus=modulus, coords=tuple(coeffs[: modulus.degree]))

    def to_sympy(self) -> Poly:
        return Poly([_to_rational(c) for c in reversed(self.coords)], X, domain=QQ)

    def _check_same_field(self, other: "FieldElement") -> None:
        if other.modulus.coeffs != self.modulus.coeffs:
            raise ValueError("两个元素不属于同一个数域")

    def __add__(self, other: "FieldElement") -> "FieldElement":
        self._check_same_field(other)
        return FieldElement(modulus=self.modulus, coords=tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "FieldElement":
        return FieldElement(modulus=self.modulus, coords=tuple(-a for a in self.coords))

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return mul(self, other)

    def __pow__(self, k: int) -> "FieldElement":
        return power(self, k)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.modulus.coeffs == other.modulus.coeffs and self.coords == other.coords

    def __hash__(self) -> int:
        return hash((self.modulus.coeffs, self.coords))

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    @property
    def is_integral(self) -> bool:
        """坐标是否全为整数（即属于 Z[θ]）"""
        return all(c.denominator == 1 for c in self.coords)

    def inverse(self) -> "FieldElement":
        return inv(self)

    def __str__(self) -> str:
        return str(self.to_sympy().as_expr()).replace("x", "θ")


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """模 f 的精确乘法"""
    a._check_same_field(b)
    return FieldElement.from_poly(a.modulus, a.to_sympy() * b.to_sympy())


def inv(a: FieldElement) -> FieldElement:
    """用 Q[x] 上的扩展欧几里得算法求逆

    Raises:
        NotInvertible: a = 0 或 gcd(a, f) 非常数

    """
    if a.is_zero:
        raise NotInvertible("零元素不可逆")
    s, _, h = a.to_sympy().gcdex(a.modulus.to_sympy())
    if h.degree() != 0:
        raise NotInvertible(f"gcd(a, f) = {h.as_expr()} 非常数，f 可约")
    return FieldElement.from_poly(a.modulus, s.quo_ground(h.LC()))


def power(a: FieldElement, k: int) -> FieldElement:
    """整数次幂，负指数先求逆"""
    if k < 0:
        return power(inv(a), -k)
    result = a.modulus.one()
    base = a
    while k:
        if k & 1:
            result = mul(result, base)
        base = mul(base, base)
        k >>= 1
    return result


def norm(a: FieldElement) -> Fraction:
    """N(a) = Res(f, a(x))（f 首一）"""
    return _from_rational(a.modulus.to_sympy().resultant(a.to_sympy()))


def is_unit(a: FieldElement) -> bool:
    """判断 Z[θ] 中的元素是否为单位

    Raises:
        NonIntegralElement: 坐标不是整数

    """
    if not a.is_integral:
        raise NonIntegralElement(f"元素 {a} 的幂基坐标不是整数")
    return abs(norm(a)) == 1


class Ball(BaseModel):
    """复数中心与误差半径"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    value: Any
    radius: Any

    def conjugate(self) -> "Ball":
        """共轭（在当前 mp 精度下取整，调用方负责设置工作精度）"""
        return Ball(value=mpmath.conj(self.value), radius=self.radius)

    def __complex__(self) -> complex:
        return complex(self.value)


class EmbeddingSet(BaseModel):
    """按约定排序的嵌入 σ_1, …, σ_{s+2t}

    实根升序在前；每对共轭复根取虚部为正者为代表，按 (实部, 虚部) 排序；
    最后是代表的共轭，顺序相同，因此 σ_{s+i} = conj(σ_{s+i+t})。
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    polynomial: Polynomial
    roots: Tuple[Ball, ...]
    s: int
    t: int
    order: Tuple[int, ...]
    precision: int
    working_precision: int

    @property
    def degree(self) -> int:
        return len(self.roots)

    def root(self, i: int) -> Ball:
        """第 i 个嵌入下 θ 的像（1 起始）"""
        if not 1 <= i <= self.degree:
            raise IndexError(f"嵌入编号越界: {i}")
        return self.roots[i - 1]


def _isolate(coeffs: List[Fraction], wp: int):
    """在工作精度 wp 下求根并给出包含圆盘；失败返回 None"""
    n = len(coeffs) - 1
    with mp.workprec(wp):
        high_first = [_to_mpf(c) for c in reversed(coeffs)]
        deriv = [high_first[k] * (n - k) for k in range(n)]
        try:
            raw = mpmath.polyroots(high_first, maxsteps=100 + 20 * n, extraprec=64)
        except mp.NoConvergence:
            logger.debug("polyroots 在 %d 位精度下未收敛", wp)
            return None

        slack = mp.mpf(2) ** (-wp + 16)
        discs = []
        for z in raw:
            z = mp.mpc(z)
            dfz = mpmath.polyval(deriv, z)
            if dfz == 0:
                return None
            radius = n * abs(mpmath.polyval(high_first, z)) / abs(dfz) + slack * max(1, abs(z))
            if abs(z.imag) <= radius:
                # 以实轴为中心的圆盘在共轭下不变，圆盘内唯一的根必为实根
                radius = radius + abs(z.imag)
                center = mp.mpc(z.real, 0)
                left = mpmath.polyval(high_first, z.real - radius)
                right = mpmath.polyval(high_first, z.real + radius)
                if left * right >= 0:
                    return None
                discs.append((center, radius, True))
            else:
                discs.append((z, radius, False))

        for i in range(len(discs)):
            for j in range(i + 1, len(discs)):
                if abs(discs[i][0] - discs[j][0]) <= discs[i][1] + discs[j][1]:
                    return None
    return discs


def find_embeddings(f: Polynomial, precision: int = 256) -> EmbeddingSet:
    """求 f 的全部复根并按约定排序

    Args:
        f: 首一无平方因子多项式
        precision: 目标精度（二进制位），误差半径 < 2^{-precision/2}

    Returns:
        EmbeddingSet: 带误差半径的嵌入

    Raises:
        NonSeparableRoots: 精度翻倍后仍无法分离根
        WrongSignature: s = 0 或 t = 0

    """
    coeffs = list(f.coeffs)
    target = mp.mpf(2) ** (-(precision // 2))
    wp = precision + 32
    discs = None
    for attempt in range(MAX_DOUBLINGS + 1):
        discs = _isolate(coeffs, wp)
        if discs is not None and all(r < target for _, r, _ in discs):
            break
        logger.debug("第 %d 次根隔离失败，精度由 %d 位翻倍", attempt + 1, wp)
        discs = None
        wp *= 2
    if discs is None:
        raise NonSeparableRoots(f"在 {wp // 2} 位精度下无法分离 {f} 的根")

    indexed = list(enumerate(discs))
    real = sorted((item for item in indexed if item[1][2]), key=lambda item: item[1][0].real)
    upper = sorted(
        (item for item in indexed if not item[1][2] and item[1][0].imag > 0),
        key=lambda item: (item[1][0].real, item[1][0].imag),
    )
    lower = [item for item in indexed if not item[1][2] and item[1][0].imag < 0]

    s, t = len(real), len(upper)
    if s == 0 or t == 0 or len(lower) != t:
        raise WrongSignature(f"签名 (s={s}, t={t}) 不满足 s >= 1 且 t >= 1")

    # 共轭根取代表的精确共轭，使 σ_{s+i} = conj(σ_{s+i+t}) 严格成立；须在工作精度下取共轭
    lower_matched = []
    with mp.workprec(wp):
        for _, (z, _, _) in upper:
            partner = min(lower, key=lambda item: abs(item[1][0] - mpmath.conj(z)))
            lower_matched.append(partner)

        roots = [Ball(value=z, radius=r) for _, (z, r, _) in real]
        roots += [Ball(value=z, radius=r) for _, (z, r, _) in upper]
        roots += [Ball(value=mpmath.conj(z), radius=r) for _, (z, r, _) in upper]
    order = tuple(idx for idx, _ in real + upper + lower_matched)

    return EmbeddingSet(
        polynomial=f,
        roots=tuple(roots),
        s=s,
        t=t,
        order=order,
        precision=precision,
        working_precision=wp,
    )


def evaluate(a: FieldElement, i: int, embeddings: EmbeddingSet) -> Ball:
    """σ_i(a)：在第 i 个根处按 Horner 求值并传播误差半径

    Raises:
        PrecisionExhausted: 半径溢出

    """
    root = embeddings.root(i)
    with mp.workprec(embeddings.working_precision):
        z, r = root.value, root.radius
        value = mp.mpc(0)
        for c in reversed(a.coords):
            value = value * z + _to_mpf(c)

        # |a(w) - a(z)| <= r * sum_k k |c_k| (|z| + r)^{k-1}
        bound = abs(z) + r
        deriv_bound = mp.mpf(0)
        for k, c in enumerate(a.coords):
            if k and c:
                deriv_bound += k * abs(_to_mpf(c)) * bound ** (k - 1)
        radius = r * deriv_bound
        if deriv_bound:
            radius += mp.mpf(2) ** (-embeddings.working_precision + 16) * (1 + abs(value))
        if not mpmath.isfinite(radius) or radius > 1:
            raise PrecisionExhausted(f"σ_{i}({a}) 的误差半径溢出: {radius}")
    return Ball(value=value, radius=radius)
