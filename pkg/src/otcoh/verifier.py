"""OT 流形上同调计算结果的不变量校验
"""

import itertools
import logging
from typing import Dict, List, Tuple

import mpmath

from .characters import (
    Classification,
    Equality,
    IndexTriple,
    all_triples,
    char_of_triple,
    equal_on_lattice,
)
from .cohomology import (
    all_tables,
    cotangent_cohomology,
    derham_vector,
    dolbeault_dim,
    expected_h01_characters,
    euler_characteristic,
    h01_characters,
    nonvanishing,
    serre_check,
    total_table,
)
from .exceptions import MissingInverseClass
from .exterior import (
    harmonic_closure_check,
    invariant_closure_check,
    oracle_derham_tally,
    oracle_dolbeault_tally,
    square_zero_check,
    star_closure_check,
)
from .models import VerificationEntry
from .utils import binomial

logger = logging.getLogger(__name__)

# 枚举型检查的规模上限（生成元个数 2s+2t）
MAX_ORACLE_GENERATORS = 8


class OTVerifier:
    """不变量校验器

    功能：
    - 求和恒等式、Euler 示性数与对偶
    - 非零判据与全纯截面
    - 单项式枚举与符号外代数检查
    - 模型残差
    """

    def __init__(self, classes: Classification, symbolic: bool = True, random_forms: int = 200):
        self.classes = classes
        self.model = classes.model
        self.symbolic = symbolic
        self.random_forms = random_forms
        self.entries: List[VerificationEntry] = []
        self.errors: List[str] = []
        self.warnings: List[str] = []

    def _record(self, name: str, passed: bool, residual: float = 0.0, detail: str = "") -> None:
        self.entries.append(VerificationEntry(name=name, passed=passed, residual=residual, detail=detail))
        if not passed:
            self.errors.append(f"{name}: {detail}" if detail else name)

    def verify(self) -> List[VerificationEntry]:
        """运行全部检查

        Returns:
            List[VerificationEntry]: 每项检查一条记录

        """
        self.entries = []
        self.errors.clear()
        self.warnings.clear()

        self._verify_model_residuals()
        self._verify_partition()
        self._verify_sum_identities()
        self._verify_nonvanishing()
        self._verify_characters()
        self._verify_duality()
        self._verify_tangent()

        small = 2 * self.model.complex_dimension <= MAX_ORACLE_GENERATORS
        if small:
            self._verify_oracle()
        else:
            self.warnings.append(f"2s+2t > {MAX_ORACLE_GENERATORS}，跳过单项式枚举检查")

        star = star_closure_check(self.classes)
        self._record("star_closure", star.passed, star.max_residual, "; ".join(star.failures))

        if self.symbolic:
            checks = [square_zero_check(self.model, self.random_forms)]
            if small:
                checks += [harmonic_closure_check(self.model), invariant_closure_check(self.model)]
            else:
                self.warnings.append("生成元过多，跳过 ⋀W 与 ⋀V 的全部单项式检查")
            for check in checks:
                detail = f"{check.checked} 项" + (f"，失败: {', '.join(check.failures[:5])}" if check.failures else "")
                self._record(check.name, check.passed, detail=detail)

        logger.debug("校验完成：%d 项，失败 %d 项", len(self.entries), len(self.errors))
        return self.entries

    def _verify_model_residuals(self) -> None:
        tau = self.model.tolerance
        for name, residual in sorted(self.model.residuals.items()):
            self._record(f"residual.{name}", residual < tau, residual, f"τ = {tau:.3e}")

    def _verify_partition(self) -> None:
        model = self.model
        triples = all_triples(model.s, model.t)
        seen = [member for bundle_class in self.classes for member in bundle_class.members]
        passed = sorted(seen, key=lambda t: t.sort_key) == triples
        self._record("partition", passed, detail=f"{len(self.classes)} 类，{len(seen)} 个三元组")

        full = IndexTriple(I=range(1, model.s + 1), K=range(1, model.t + 1), L=range(1, model.t + 1))
        merged = self.classes.class_of_triple(full).trivial
        self._record("unimodular_merge", merged, detail=f"{full.label} 所在类")

    def _verify_sum_identities(self) -> None:
        model = self.model
        n = model.complex_dimension
        tables = all_tables(self.classes)
        total = total_table(tables)
        mismatches = [
            (p, q)
            for p in range(n + 1)
            for q in range(n + 1)
            if total[p][q] != binomial(n, p) * binomial(n, q)
        ]
        self._record("binomial_hodge_identity", not mismatches, detail=f"不一致位置: {mismatches}" if mismatches else "")

        vectors = [derham_vector(self.classes, bundle_class) for bundle_class in self.classes]
        derham_mismatches = [
            r
            for r in range(2 * n + 1)
            if sum(vector.dims[r] for vector in vectors) != binomial(2 * n, r)
        ]
        self._record("derham_identity", not derham_mismatches, detail=f"不一致次数: {derham_mismatches}" if derham_mismatches else "")

        euler = sum(euler_characteristic(table) for table in tables)
        self._record("euler_total_zero", euler == 0, float(abs(euler)), f"Σχ = {euler}")

    def _verify_nonvanishing(self) -> None:
        n = self.model.complex_dimension
        failures: List[str] = []
        for bundle_class in self.classes:
            for p in range(n + 1):
                for q in range(n + 1):
                    result = nonvanishing(self.classes, bundle_class, p, q)
                    dim = dolbeault_dim(self.classes, bundle_class, p, q)
                    if result.nonzero != (dim > 0) or result.lower_bound > dim:
                        failures.append(f"{bundle_class.id}@({p},{q})")
            has_section = dolbeault_dim(self.classes, bundle_class, 0, 0) > 0
            if has_section != bundle_class.trivial:
                failures.append(f"{bundle_class.id}: H^0,0")
        self._record("nonvanishing_consistency", not failures, detail=", ".join(failures[:10]))

    def _verify_characters(self) -> None:
        """共轭对称与乘法性"""
        model = self.model
        backend = self.classes.backend
        failures: List[str] = []
        residual = mpmath.mpf(0)
        for triple in all_triples(model.s, model.t):
            a = char_of_triple(model, triple)
            b = char_of_triple(model, triple.conjugate())
            if a.values is not None:
                with mpmath.mp.workprec(a.working_precision):
                    for x, y in zip(a.values, b.values):
                        residual = max(residual, abs(x.value - mpmath.conj(y.value)))
        if residual >= 2 * model.tolerance:
            failures.append("conjugation")
        self._record("conjugation_symmetry", not failures, float(residual))

        singles = (
            [IndexTriple(I=(i,)) for i in range(1, model.s + 1)]
            + [IndexTriple(K=(k,)) for k in range(1, model.t + 1)]
            + [IndexTriple(L=(k,)) for k in range(1, model.t + 1)]
        )
        broken: List[str] = []
        for a, b in itertools.combinations(singles, 2):
            product = char_of_triple(model, a) * char_of_triple(model, b)
            union = char_of_triple(model, a.union(b))
            if equal_on_lattice(model, union, product, backend) != Equality.YES:
                broken.append(f"{a.label}·{b.label}")
        self._record("multiplicativity", not broken, detail=", ".join(broken))

    def _verify_duality(self) -> None:
        try:
            report = serre_check(self.classes)
        except MissingInverseClass as e:
            self._record("serre_duality", False, detail=str(e))
            return
        detail = ", ".join(f"{v.class_id}@({v.p},{v.q})" for v in report.violations[:10])
        self._record("serre_duality", report.passed, detail=detail)

    def _verify_tangent(self) -> None:
        n = self.model.complex_dimension
        trivial = all_tables(self.classes)[0]
        mismatches = [
            (p, q)
            for p in range(n + 1)
            for q in range(n + 1)
            if cotangent_cohomology(self.classes, p, q) != trivial.dims[p][q]
        ]
        self._record("cotangent_matches_trivial_table", not mismatches, detail=str(mismatches) if mismatches else "")

        found = h01_characters(self.classes)
        expected = expected_h01_characters(self.classes)
        self._record("h01_characterization", found == expected, detail=f"{found} vs {expected}")

    def _verify_oracle(self) -> None:
        tables: Dict[str, Tuple[Tuple[int, ...], ...]] = {
            table.class_id: table.dims for table in all_tables(self.classes)
        }
        tally = oracle_dolbeault_tally(self.classes)
        mismatched = sorted(
            class_id
            for class_id in set(tables) | set(tally)
            if tuple(tuple(row) for row in tally.get(class_id, [])) != tables.get(class_id, ())
        )
        self._record("oracle_dolbeault", not mismatched, detail=", ".join(mismatched))

        vectors = {
            bundle_class.id: derham_vector(self.classes, bundle_class).dims for bundle_class in self.classes
        }
        derham_tally = oracle_derham_tally(self.classes)
        derham_mismatched = sorted(
            class_id
            for class_id in set(vectors) | set(derham_tally)
            if tuple(derham_tally.get(class_id, ())) != vectors.get(class_id, ())
        )
        self._record("oracle_derham", not derham_mismatched, detail=", ".join(derham_mismatched))

    def get_errors(self) -> List[str]:
        """获取所有错误"""
        return self.errors

    def get_warnings(self) -> List[str]:
        """获取所有警告"""
        return self.warnings

    def get_validation_report(self) -> Dict[str, object]:
        """获取验证报告"""
        return {
            "errors": self.errors,
            "warnings": self.warnings,
            "passed": len(self.errors) == 0,
        }
