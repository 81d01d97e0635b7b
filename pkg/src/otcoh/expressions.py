"""特征表达式解析器

语法：
- `1`：平凡特征
- `sigma(i)`：第 i 个嵌入，可用 `*` 相乘，`^k` 取幂（如 `sigma(1)^-1`）
- `triple I=1,2;K=1;L=`：多重指标三元组
- `values(1.0, 0.5+0.2j)`：直接给出在各生成元处的值
"""

import re
from fractions import Fraction
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict

from .exceptions import MalformedSpec


class ParsedCharacter(BaseModel):
    """解析结果"""

    model_config = ConfigDict(frozen=True)

    kind: Literal["exponent", "triple", "values"]
    text: str
    exponent: Optional[Tuple[Fraction, ...]] = None
    triple: Optional[Dict[str, Tuple[int, ...]]] = None
    values: Optional[Tuple[complex, ...]] = None


class CharacterExpressionParser:
    """特征表达式解析器

    支持：
    - 平凡特征与嵌入的乘积、幂
    - 多重指标三元组
    - 显式数值
    """

    _FACTOR = re.compile(r"^sigma\(\s*(\d+)\s*\)(?:\^\(?([+-]?\d+)\)?)?$")
    _TRIPLE = re.compile(r"^triple\s+(.*)$")
    _VALUES = re.compile(r"^values\((.*)\)$")

    def __init__(self, s: int, t: int):
        self.s = s
        self.t = t

    @property
    def n(self) -> int:
        return self.s + 2 * self.t

    def parse(self, text: str) -> ParsedCharacter:
        """解析表达式

        Args:
            text: 表达式

        Returns:
            ParsedCharacter: 解析结果

        Raises:
            MalformedSpec: 语法错误或指标越界

        """
        source = text.strip()
        if not source:
            raise MalformedSpec("特征表达式为空")

        match = self._TRIPLE.match(source)
        if match:
            return ParsedCharacter(kind="triple", text=source, triple=self._parse_triple(match.group(1)))

        match = self._VALUES.match(source)
        if match:
            return ParsedCharacter(kind="values", text=source, values=self._parse_values(match.group(1)))

        return ParsedCharacter(kind="exponent", text=source, exponent=self._parse_word(source))

    def _parse_word(self, source: str) -> Tuple[Fraction, ...]:
        exponent = [Fraction(0)] * self.n
        for factor in source.split("*"):
            factor = factor.strip()
            if factor == "1":
                continue
            match = self._FACTOR.match(factor)
            if not match:
                raise MalformedSpec(f"无法解析的因子: {factor!r}")
            index = int(match.group(1))
            if not 1 <= index <= self.n:
                raise MalformedSpec(f"sigma({index}) 越界，嵌入编号应在 1..{self.n}")
            power = int(match.group(2)) if match.group(2) else 1
            exponent[index - 1] += power
        return tuple(exponent)

    def _parse_triple(self, body: str) -> Dict[str, Tuple[int, ...]]:
        bounds = {"I": self.s, "K": self.t, "L": self.t}
        parts: Dict[str, Tuple[int, ...]] = {}
        for item in body.split(";"):
            item = item.strip()
            if not item:
                continue
            if "=" not in item:
                raise MalformedSpec(f"三元组片段缺少 '=': {item!r}")
            key, _, raw = item.partition("=")
            key = key.strip()
            if key not in bounds:
                raise MalformedSpec(f"三元组只能包含 I、K、L: {key!r}")
            try:
                indices = tuple(sorted({int(v) for v in raw.split(",") if v.strip()}))
            except ValueError:
                raise MalformedSpec(f"三元组指标必须是整数: {raw!r}")
            if any(not 1 <= i <= bounds[key] for i in indices):
                raise MalformedSpec(f"{key} 的指标越界（1..{bounds[key]}）: {raw!r}")
            parts[key] = indices
        for key in bounds:
            parts.setdefault(key, ())
        return parts

    def _parse_values(self, body: str) -> Tuple[complex, ...]:
        values: List[complex] = []
        for raw in body.split(","):
            raw = raw.strip().replace(" ", "")
            try:
                values.append(complex(raw))
            except ValueError:
                raise MalformedSpec(f"无法解析的复数: {raw!r}")
        if len(values) != self.s:
            raise MalformedSpec(f"需要 {self.s} 个值（每个生成元一个），实际 {len(values)} 个")
        return tuple(values)
