"""输入规格与计算报告的数据模型
"""

from enum import Enum
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .characters import Backend
from .solvmodel import DEFAULT_PRECISION, DEFAULT_TOLERANCE
from .utils import to_fraction

Rational = Union[int, str]


class OutputFormat(str, Enum):
    """报告格式枚举"""

    JSON = "json"
    CSV = "csv"
    MD = "md"


def _check_rationals(rows):
    for row in rows:
        for value in row:
            to_fraction(value)
    return rows


class FieldSpec(BaseModel):
    """数域数据：f 的系数（低次在前）与单位的幂基坐标"""

    model_config = ConfigDict(extra="forbid")

    poly: List[Rational] = Field(..., min_length=2)
    units: List[List[Rational]] = Field(..., min_length=1)
    relations: Optional[List[List[Rational]]] = None
    branch_shifts: Optional[List[List[int]]] = None

    @field_validator("poly")
    def validate_poly(cls, v):
        """系数必须是精确有理数"""
        _check_rationals([v])
        return v

    @field_validator("units", "relations")
    def validate_rows(cls, v):
        """坐标必须是精确有理数"""
        if v is not None:
            _check_rationals(v)
        return v

    @model_validator(mode="after")
    def validate_field(self):
        """单位坐标长度等于 f 的次数"""
        degree = len(self.poly) - 1
        for j, unit in enumerate(self.units, start=1):
            if len(unit) != degree:
                raise ValueError(f"第 {j} 个单位的坐标个数必须是 {degree}")
        return self


class SyntheticSpec(BaseModel):
    """合成数据：签名、B、关系与 C（generic 或显式矩阵）"""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    s: int = Field(..., ge=1)
    t: int = Field(..., ge=1)
    B: List[List[Rational]]
    relations: List[List[Rational]] = Field(default_factory=list)
    mode: Optional[str] = None
    C: Optional[List[List[Rational]]] = None

    @field_validator("B", "C", "relations")
    def validate_rows(cls, v):
        """矩阵元素必须是精确有理数"""
        if v is not None:
            _check_rationals(v)
        return v

    @model_validator(mode="after")
    def validate_mode(self):
        """mode = "generic" 与显式 C 二选一"""
        if self.C is not None and self.mode not in (None, "explicit"):
            raise ValueError("给出 C 时 mode 只能省略或为 explicit")
        if self.C is None and self.mode not in (None, "generic"):
            raise ValueError(f"未知的 mode: {self.mode}")
        return self

    @property
    def generator_args(self):
        return self.C if self.C is not None else "generic"


class Options(BaseModel):
    """计算选项"""

    model_config = ConfigDict(extra="forbid")

    precision: int = Field(default=DEFAULT_PRECISION, ge=53, le=8192)
    tolerance: float = Field(default=DEFAULT_TOLERANCE, gt=0, lt=1)
    backend: Backend = Backend.NUMERIC
    format: OutputFormat = OutputFormat.JSON
    check_irreducible: bool = True


class ModelSpec(BaseModel):
    """输入规格文档"""

    model_config = ConfigDict(extra="forbid")

    field: Optional[FieldSpec] = None
    synthetic: Optional[SyntheticSpec] = None
    options: Options = Field(default_factory=Options)

    @model_validator(mode="after")
    def validate_source(self):
        """[field] 与 [synthetic] 恰好出现一个"""
        if (self.field is None) == (self.synthetic is None):
            raise ValueError("[field] 与 [synthetic] 必须恰好给出一个")
        return self


class ModelSummary(BaseModel):
    """模型摘要"""

    source: str
    s: int
    t: int
    polynomial: Optional[str] = None
    lattice_generators: List[List[float]]
    B: List[List[float]]
    relations: List[List[str]]
    residuals: Dict[str, float]


class ClassEntry(BaseModel):
    """一个丛类的计算结果"""

    id: str
    members: List[str]
    trivial: bool
    hodge: List[List[int]]
    derham: List[int]
    euler_characteristic: int
    inverse: Optional[str] = None


class VerificationEntry(BaseModel):
    """一项不变量检查"""

    name: str
    passed: bool
    residual: float = 0.0
    detail: str = ""


class TangentSummary(BaseModel):
    """切丛与余切丛上同调"""

    tangent: List[List[int]]
    cotangent: List[List[int]]
    rigid: bool
    poisson_free: bool
    h01_classes: List[str]
    hodge_symmetry_defects: List[List[int]]


class Provenance(BaseModel):
    """来源信息（不含时间戳）"""

    input_hash: str
    precision: int
    tolerance: float
    effective_tolerance: float
    backend: str
    tool_version: str


class Report(BaseModel):
    """完整报告"""

    model: ModelSummary
    classes: List[ClassEntry]
    tangent: Optional[TangentSummary] = None
    verification: List[VerificationEntry] = Field(default_factory=list)
    provenance: Provenance
    notes: List[str] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(entry.passed for entry in self.verification)

    def get_class(self, class_id: str) -> Optional[ClassEntry]:
        """根据 id 获取类"""
        for entry in self.classes:
            if entry.id == class_id:
                return entry
        return None
