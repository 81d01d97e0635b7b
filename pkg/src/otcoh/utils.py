"""OT 流形上同调计算器工具函数
"""

import hashlib
import re
from fractions import Fraction
from math import comb
from typing import Any, Iterable


_RATIONAL_PATTERN = re.compile(r"^\s*[+-]?\d+(\s*/\s*[+-]?\d+)?\s*$")


def to_fraction(value: Any) -> Fraction:
    """把整数、Fraction 或 "p/q" 字符串转换为精确有理数

    Args:
        value: 待转换的值

    Returns:
        Fraction: 精确有理数

    Raises:
        ValueError: 值不是精确有理数（浮点数会被拒绝）

    """
    if isinstance(value, bool):
        raise ValueError(f"不是有理数: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str) and _RATIONAL_PATTERN.match(value):
        return Fraction(value.replace(" ", ""))
    if hasattr(value, "p") and hasattr(value, "q"):
        # sympy Rational
        return Fraction(int(value.p), int(value.q))
    raise ValueError(f"需要精确有理数（整数或 \"p/q\" 字符串）: {value!r}")


def format_fraction(value: Fraction) -> str:
    """格式化为 "p/q"（整数不带分母）"""
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def format_subset(indices: Iterable[int]) -> str:
    """格式化多重指标，空集写作 ∅"""
    indices = list(indices)
    if not indices:
        return "∅"
    return "{" + ",".join(str(i) for i in indices) + "}"


def binomial(n: int, k: int) -> int:
    """组合数 C(n, k)，k 越界时为 0"""
    if k < 0 or k > n:
        return 0
    return comb(n, k)


def calculate_text_hash(text: str, algorithm: str = "sha256") -> str:
    """计算文本的哈希值"""
    hash_func = hashlib.new(algorithm)
    hash_func.update(text.encode("utf-8"))
    return hash_func.hexdigest()

