"""报告生成与持久化
"""

import csv
import io
import logging
import os
import tempfile
from pathlib import Path
from typing import List, Optional

from . import __version__
from .characters import Backend, Classification
from .cohomology import (
    all_tables,
    cotangent_cohomology,
    derham_vector,
    euler_characteristic,
    h01_characters,
    hodge_symmetry_defects,
    inverse_class,
    rigidity_summary,
    tangent_cohomology,
)
from .exceptions import MissingInverseClass
from .models import (
    ClassEntry,
    ModelSummary,
    OutputFormat,
    Provenance,
    Report,
    TangentSummary,
    VerificationEntry,
)
from .solvmodel import SolvModel
from .utils import format_fraction

logger = logging.getLogger(__name__)

NOTES = [
    "ψ_k(x) = ½ Σ_i b_ik x_i + √−1 Σ_i c_ik x_i（虚部带 √−1 的读法）",
    "单位按幂基 Z[θ] 坐标给出；O_K ≠ Z[θ] 时只覆盖 Z[θ] 中的单位",
    "Hodge 表按行 p、列 q 排列，p 自上而下递增",
]


def summarize_model(model: SolvModel) -> ModelSummary:
    """模型摘要（数值转为 float）"""
    return ModelSummary(
        source=model.source,
        s=model.s,
        t=model.t,
        polynomial=str(model.polynomial) if model.polynomial is not None else None,
        lattice_generators=[[float(v) for v in row] for row in model.lattice_generators],
        B=[[float(v) for v in row] for row in model.b],
        relations=[[format_fraction(v) for v in row] for row in (model.relations or ())],
        residuals=dict(sorted(model.residuals.items())),
    )


def build_report(
    classes: Classification,
    input_hash: str,
    precision: int,
    tolerance: float,
    verification: Optional[List[VerificationEntry]] = None,
    notes: Optional[List[str]] = None,
) -> Report:
    """汇总模型、各丛类的上同调与校验结果"""
    model = classes.model
    n = model.complex_dimension
    entries: List[ClassEntry] = []
    tables = all_tables(classes)
    for bundle_class, table in zip(classes, tables):
        try:
            inverse = inverse_class(classes, bundle_class).id
        except MissingInverseClass:
            inverse = None
        entries.append(
            ClassEntry(
                id=bundle_class.id,
                members=[member.label for member in bundle_class.members],
                trivial=bundle_class.trivial,
                hodge=[list(row) for row in table.dims],
                derham=list(derham_vector(classes, bundle_class).dims),
                euler_characteristic=euler_characteristic(table),
                inverse=inverse,
            )
        )

    rigidity = rigidity_summary(classes)
    tangent = TangentSummary(
        tangent=[[tangent_cohomology(classes, p, q) for q in range(n + 1)] for p in range(n + 1)],
        cotangent=[[cotangent_cohomology(classes, p, q) for q in range(n + 1)] for p in range(n + 1)],
        rigid=rigidity.rigid,
        poisson_free=rigidity.poisson_free,
        h01_classes=h01_characters(classes),
        hodge_symmetry_defects=[list(pq) for pq in hodge_symmetry_defects(tables[0])],
    )

    return Report(
        model=summarize_model(model),
        classes=entries,
        tangent=tangent,
        verification=list(verification or []),
        provenance=Provenance(
            input_hash=input_hash,
            precision=precision,
            tolerance=tolerance,
            effective_tolerance=model.tolerance,
            backend=Backend(classes.backend).value,
            tool_version=__version__,
        ),
        notes=NOTES + list(notes or []),
    )


class ReportWriter:
    """报告渲染与写出

    功能：
    - 渲染 json / csv / md
    - 原子写入，出错时不留下部分文件
    - 输出路径为目录时按输入哈希命名
    """

    def __init__(self, output_format: OutputFormat = OutputFormat.JSON):
        self.output_format = OutputFormat(output_format)

    def render(self, report: Report) -> str:
        if self.output_format == OutputFormat.CSV:
            return self._render_csv(report)
        if self.output_format == OutputFormat.MD:
            return self._render_markdown(report)
        return report.model_dump_json(indent=2) + "\n"

    def _render_csv(self, report: Report) -> str:
        """每行一个维数：class,kind,p,q,dim（de Rham 行 q 为空，p 为次数 r）"""
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["class", "kind", "p", "q", "dim"])
        for entry in report.classes:
            for p, row in enumerate(entry.hodge):
                for q, dim in enumerate(row):
                    writer.writerow([entry.id, "hodge", p, q, dim])
            for r, dim in enumerate(entry.derham):
                writer.writerow([entry.id, "derham", r, "", dim])
        for check in report.verification:
            writer.writerow(["", f"check:{check.name}", "", "", int(check.passed)])
        return buffer.getvalue()

    def _render_markdown(self, report: Report) -> str:
        lines = [
            "# OT 流形线丛上同调报告",
            "",
            f"- 签名: s = {report.model.s}, t = {report.model.t}",
            f"- 来源: {report.model.source}" + (f"（f = {report.model.polynomial}）" if report.model.polynomial else ""),
            f"- 丛类个数: {len(report.classes)}",
            f"- 后端: {report.provenance.backend}，精度 {report.provenance.precision} 位，τ = {report.provenance.effective_tolerance:.3e}",
            f"- 输入哈希: `{report.provenance.input_hash}`",
            "",
        ]
        for entry in report.classes:
            size = len(entry.hodge)
            lines.append(f"## {entry.id}")
            lines.append("")
            lines.append(f"成员: {', '.join(entry.members)}")
            lines.append("")
            lines.append("| p \\ q | " + " | ".join(str(q) for q in range(size)) + " |")
            lines.append("|---" * (size + 1) + "|")
            for p, row in enumerate(entry.hodge):
                lines.append(f"| {p} | " + " | ".join(str(v) for v in row) + " |")
            lines.append("")
            lines.append("de Rham: " + ", ".join(str(v) for v in entry.derham))
            lines.append("")
        if report.tangent is not None:
            lines.append("## 切丛")
            lines.append("")
            lines.append(f"- 刚性: {'是' if report.tangent.rigid else '否'}")
            lines.append(f"- 无全纯 Poisson 结构: {'是' if report.tangent.poisson_free else '否'}")
            lines.append(f"- H^0,1 非零的类: {', '.join(report.tangent.h01_classes)}")
            lines.append("")
        if report.verification:
            lines.append("## 校验")
            lines.append("")
            lines.append("| 检查 | 结果 | 残差 |")
            lines.append("|---|---|---|")
            for check in report.verification:
                lines.append(f"| {check.name} | {'通过' if check.passed else '失败'} | {check.residual:.3e} |")
            lines.append("")
        if report.notes:
            lines.append("## 说明")
            lines.append("")
            lines.extend(f"- {note}" for note in report.notes)
            lines.append("")
        return "\n".join(lines)

    def output_path(self, out: Path, input_hash: str) -> Path:
        """输出路径；out 为目录时文件名取输入哈希"""
        if out.is_dir():
            return out / f"{input_hash[:16]}.{self.output_format.value}"
        return out

    def write(self, report: Report, out: Path) -> Path:
        """原子写入报告

        Args:
            report: 报告
            out: 文件或目录

        Returns:
            Path: 实际写入的文件

        """
        target = self.output_path(Path(out), report.provenance.input_hash)
        content = self.render(report)
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, temp_name = tempfile.mkstemp(prefix=".otcoh-", dir=target.parent)
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(content)
            os.replace(temp_name, target)
        except BaseException:
            if os.path.exists(temp_name):
                os.unlink(temp_name)
            raise
        logger.debug("报告已写入 %s", target)
        return target
