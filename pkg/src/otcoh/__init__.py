"""OT (Oeljeklaus–Toma) 流形平坦线丛上同调计算器
"""

__version__ = "0.1.0"

from .characters import (
    Backend,
    BundleClass,
    Character,
    Classification,
    Equality,
    IndexTriple,
    all_triples,
    char_from_user,
    char_of_triple,
    classify_all,
    equal_on_lattice,
)
from .cohomology import (
    DeRhamVector,
    HodgeTable,
    NonVanishing,
    all_tables,
    cotangent_cohomology,
    derham_dim,
    derham_vector,
    dolbeault_dim,
    euler_characteristic,
    h01_characters,
    hodge_symmetry_defects,
    hodge_table,
    nonvanishing,
    rigidity_summary,
    serre_check,
    tangent_cohomology,
)
from .exceptions import (
    AmbiguousCharacters,
    BackendUnavailable,
    InconsistentRelation,
    IndexOutOfRange,
    MalformedSpec,
    MissingInverseClass,
    NonIntegralElement,
    NonSeparableRoots,
    NotALattice,
    NotAUnit,
    NotInvertible,
    NotTotallyPositive,
    NotUnimodular,
    NumericalError,
    OTCohomologyError,
    ParseError,
    PrecisionExhausted,
    ReduciblePolynomial,
    SpecError,
    VerificationError,
    WrongRank,
    WrongSignature,
)
from .exterior import (
    FormExpr,
    Generator,
    d_invariant,
    dbar,
    star_closure_check,
    wedge,
)
from .loader import SpecLoader
from .models import ModelSpec, Options, OutputFormat, Report
from .numberfield import (
    EmbeddingSet,
    FieldElement,
    Polynomial,
    evaluate,
    find_embeddings,
    inv,
    is_unit,
    mul,
    norm,
    power,
)
from .report import ReportWriter, build_report
from .solvmodel import SolvModel, build_model, synthetic_model
from .verifier import OTVerifier

# CLI 入口点
from .cli import cli

__all__ = [
    # 主要类
    "SpecLoader",
    "OTVerifier",
    "ReportWriter",
    "cli",

    # 数域与模型
    "Polynomial",
    "FieldElement",
    "EmbeddingSet",
    "SolvModel",
    "mul",
    "inv",
    "power",
    "norm",
    "is_unit",
    "find_embeddings",
    "evaluate",
    "build_model",
    "synthetic_model",

    # 特征与上同调
    "Backend",
    "Equality",
    "IndexTriple",
    "Character",
    "BundleClass",
    "Classification",
    "all_triples",
    "char_of_triple",
    "char_from_user",
    "equal_on_lattice",
    "classify_all",
    "HodgeTable",
    "DeRhamVector",
    "NonVanishing",
    "dolbeault_dim",
    "hodge_table",
    "all_tables",
    "derham_dim",
    "derham_vector",
    "nonvanishing",
    "serre_check",
    "tangent_cohomology",
    "cotangent_cohomology",
    "hodge_symmetry_defects",
    "rigidity_summary",
    "h01_characters",
    "euler_characteristic",

    # 外代数
    "Generator",
    "FormExpr",
    "wedge",
    "dbar",
    "d_invariant",
    "star_closure_check",

    # 报告
    "ModelSpec",
    "Options",
    "OutputFormat",
    "Report",
    "build_report",

    # 异常类
    "OTCohomologyError",
    "SpecError",
    "ParseError",
    "MalformedSpec",
    "WrongSignature",
    "WrongRank",
    "NotALattice",
    "NotUnimodular",
    "NotAUnit",
    "NotTotallyPositive",
    "NonIntegralElement",
    "NotInvertible",
    "ReduciblePolynomial",
    "IndexOutOfRange",
    "InconsistentRelation",
    "BackendUnavailable",
    "NumericalError",
    "NonSeparableRoots",
    "PrecisionExhausted",
    "AmbiguousCharacters",
    "VerificationError",
    "MissingInverseClass",
]
