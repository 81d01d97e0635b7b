#!/usr/bin/env python3
"""OT 流形上同调命令行工具"""

import json
import logging
import sys
from pathlib import Path
from typing import List, Optional, Tuple

import click

from . import __version__
from .characters import Backend, Classification, char_from_user, classify_all
from .cohomology import dolbeault_dim, hodge_table, nonvanishing
from .exceptions import (
    AmbiguousCharacters,
    NumericalError,
    OTCohomologyError,
    SpecError,
    VerificationError,
)
from .loader import LoadedSpec, SpecLoader
from .models import Options, OutputFormat, Report, VerificationEntry
from .report import ReportWriter, build_report
from .verifier import OTVerifier

EXIT_SPEC_ERROR = 2
EXIT_AMBIGUOUS = 3
EXIT_VERIFICATION_FAILED = 4


class CliContext:
    """全局选项"""

    def __init__(
        self,
        precision: Optional[int],
        tolerance: Optional[float],
        output_format: Optional[str],
        out: Optional[str],
        backend: Optional[str],
        strict: bool,
        verbose: bool,
    ):
        self.precision = precision
        self.tolerance = tolerance
        self.output_format = output_format
        self.out = Path(out) if out else None
        self.backend = backend
        self.strict = strict
        self.verbose = verbose


def _prepare(ctx: CliContext, spec_path: str) -> Tuple[SpecLoader, LoadedSpec, Options, Classification]:
    """读取规格、合并选项、构造模型并划分丛类"""
    loader = SpecLoader(strict=ctx.strict)
    loaded = loader.load(spec_path)
    options = loader.merge_options(
        loaded,
        precision=ctx.precision,
        tolerance=ctx.tolerance,
        format=ctx.output_format,
        backend=ctx.backend,
    )
    backend = loader.resolve_backend(loaded.spec, options)
    options = options.model_copy(update={"backend": backend})
    model = loader.build(loaded, options)
    classes = classify_all(model, backend)
    return loader, loaded, options, classes


def _echo_messages(title: str, messages: List[str], color: str) -> None:
    if messages:
        click.echo(click.style(title, fg=color), err=True)
        for message in messages:
            click.echo(f"  {click.style('!', fg=color)} {message}", err=True)


def _fail(error: Exception) -> None:
    """按异常类型打印诊断并退出"""
    if isinstance(error, AmbiguousCharacters):
        click.echo(click.style(f"特征无法判定: {error!s}", fg="yellow"), err=True)
        for pair in error.pairs:
            click.echo(f"  ~ {pair}", err=True)
        if error.suggested_precision:
            click.echo(f"建议使用 --precision {error.suggested_precision} 重新运行", err=True)
        sys.exit(EXIT_AMBIGUOUS)
    if isinstance(error, NumericalError):
        click.echo(click.style(f"数值错误: {error!s}", fg="yellow"), err=True)
        sys.exit(EXIT_AMBIGUOUS)
    if isinstance(error, VerificationError):
        click.echo(click.style(f"校验失败: {error!s}", fg="red"), err=True)
        sys.exit(EXIT_VERIFICATION_FAILED)
    if isinstance(error, SpecError):
        click.echo(click.style(f"规格错误 [{type(error).__name__}]: {error!s}", fg="red"), err=True)
        sys.exit(EXIT_SPEC_ERROR)
    click.echo(click.style(f"错误: {error!s}", fg="red"), err=True)
    sys.exit(1)


def _emit(ctx: CliContext, report: Report, output_format: OutputFormat) -> None:
    writer = ReportWriter(output_format)
    if ctx.out is None:
        click.echo(writer.render(report), nl=False)
        return
    target = writer.write(report, ctx.out)
    click.echo(f"报告已写入: {target}", err=True)


def _print_summary(entries: List[VerificationEntry]) -> None:
    """校验摘要表（安装了 rich 时用表格输出）"""
    try:
        from rich.console import Console
        from rich.table import Table
    except ImportError:
        for entry in entries:
            mark = click.style("✓", fg="green") if entry.passed else click.style("✗", fg="red")
            click.echo(f"  {mark} {entry.name}  残差 {entry.residual:.3e}  {entry.detail}")
        return

    table = Table(title="不变量校验")
    table.add_column("检查")
    table.add_column("结果")
    table.add_column("残差", justify="right")
    table.add_column("说明")
    for entry in entries:
        table.add_row(
            entry.name,
            "[green]通过[/green]" if entry.passed else "[red]失败[/red]",
            f"{entry.residual:.3e}",
            entry.detail,
        )
    Console().print(table)


@click.group()
@click.version_option(version=__version__)
@click.option("--precision", type=int, default=None, help="根与特征值的精度（二进制位，默认 256）")
@click.option("--tol", "tolerance", type=float, default=None, help="默认精度下的容差（默认 1e-9）")
@click.option("--format", "output_format", type=click.Choice(["json", "csv", "md"]), default=None, help="输出格式")
@click.option("--out", type=click.Path(), default=None, help="输出文件或目录（目录时按输入哈希命名）")
@click.option("--backend", type=click.Choice(["numeric", "generic"]), default=None, help="特征比较后端")
@click.option("--strict/--no-strict", default=False, help="严格模式：后端不匹配时报错而不是自动切换")
@click.option("--verbose", "-v", is_flag=True, help="详细输出")
@click.pass_context
def cli(ctx, precision, tolerance, output_format, out, backend, strict, verbose):
    """OT 流形平坦线丛上同调计算器"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = CliContext(precision, tolerance, output_format, out, backend, strict, verbose)


@cli.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--symbolic/--no-symbolic", default=True, help="是否运行外代数符号检查")
@click.pass_obj
def analyze(ctx: CliContext, spec: str, symbolic: bool):
    """构造模型、划分丛类并输出完整报告"""
    try:
        loader, loaded, options, classes = _prepare(ctx, spec)
        verifier = OTVerifier(classes, symbolic=symbolic)
        entries = verifier.verify()
        report = build_report(
            classes,
            loaded.input_hash,
            options.precision,
            options.tolerance,
            verification=entries,
            notes=verifier.get_warnings(),
        )
        _emit(ctx, report, options.format)
        if ctx.verbose:
            _echo_messages("警告:", loader.get_warnings(), "yellow")
        if not report.passed:
            _echo_messages("失败的检查:", verifier.get_errors(), "red")
            sys.exit(EXIT_VERIFICATION_FAILED)
    except OTCohomologyError as e:
        _fail(e)


@cli.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--bundle", required=True, help="特征表达式，如 1、sigma(1)、sigma(2)*sigma(3)、triple I=1;K=;L=1")
@click.option("--p", "p", type=int, required=True, help="全纯次数 p")
@click.option("--q", "q", type=int, required=True, help="反全纯次数 q")
@click.pass_obj
def hodge(ctx: CliContext, spec: str, bundle: str, p: int, q: int):
    """计算 dim H^{p,q}(X, E_ρ) 与非零见证"""
    try:
        _, _, options, classes = _prepare(ctx, spec)
        character = char_from_user(classes.model, bundle)
        bundle_class = classes.resolve(character)
        dim = dolbeault_dim(classes, bundle_class, p, q)
        result = nonvanishing(classes, bundle_class, p, q)
    except OTCohomologyError as e:
        _fail(e)
        return
    except ValueError as e:
        click.echo(click.style(f"错误: {e!s}", fg="red"), err=True)
        sys.exit(EXIT_SPEC_ERROR)

    witnesses = [triple.label for triple in result.witnesses]
    if options.format == OutputFormat.JSON:
        payload = {
            "bundle": bundle,
            "class": bundle_class.id if bundle_class is not None else None,
            "p": p,
            "q": q,
            "dim": dim,
            "nonzero": result.nonzero,
            "witnesses": witnesses,
            "lower_bound": result.lower_bound,
        }
        click.echo(json.dumps(payload, ensure_ascii=False, indent=2))
        return

    click.echo(f"类: {bundle_class.id if bundle_class is not None else '（不属于任何类）'}")
    click.echo(f"dim H^{p},{q} = {dim}")
    click.echo(f"见证: {', '.join(witnesses) if witnesses else '无'}")
    click.echo(f"下界: {result.lower_bound}")


@cli.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--nonvanishing", "bidegree", type=(int, int), default=None, help="只列出 H^{p,q} 非零的类")
@click.pass_obj
def bundles(ctx: CliContext, spec: str, bidegree: Optional[Tuple[int, int]]):
    """列出丛类（可按 H^{p,q} 非零筛选）"""
    try:
        _, _, options, classes = _prepare(ctx, spec)
        rows = []
        for bundle_class in classes:
            entry = {"id": bundle_class.id, "members": [m.label for m in bundle_class.members]}
            if bidegree is not None:
                p, q = bidegree
                result = nonvanishing(classes, bundle_class, p, q)
                if not result.nonzero:
                    continue
                entry.update(
                    dim=hodge_table(classes, bundle_class).dims[p][q],
                    witnesses=[w.label for w in result.witnesses],
                    lower_bound=result.lower_bound,
                )
            rows.append(entry)
    except OTCohomologyError as e:
        _fail(e)
        return
    except ValueError as e:
        click.echo(click.style(f"错误: {e!s}", fg="red"), err=True)
        sys.exit(EXIT_SPEC_ERROR)

    if options.format == OutputFormat.JSON:
        click.echo(json.dumps(rows, ensure_ascii=False, indent=2))
        return
    for entry in rows:
        line = f"{entry['id']}: {', '.join(entry['members'])}"
        if "dim" in entry:
            line += f"  dim = {entry['dim']}，下界 {entry['lower_bound']}"
        click.echo(line)
    click.echo(f"共 {len(rows)} 个类")


@cli.command()
@click.argument("spec", type=click.Path(exists=True, dir_okay=False))
@click.option("--random-forms", type=int, default=200, help="∂̄² 检查使用的随机形式个数")
@click.pass_obj
def verify(ctx: CliContext, spec: str, random_forms: int):
    """运行全部不变量检查"""
    try:
        loader, _, _, classes = _prepare(ctx, spec)
        verifier = OTVerifier(classes, random_forms=random_forms)
        entries = verifier.verify()
    except OTCohomologyError as e:
        _fail(e)
        return

    _print_summary(entries)
    _echo_messages("警告:", loader.get_warnings() + verifier.get_warnings(), "yellow")
    report = verifier.get_validation_report()
    if report["passed"]:
        click.echo(click.style("✓ 全部通过", fg="green"))
        sys.exit(0)
    click.echo(click.style(f"✗ {len(report['errors'])} 项失败", fg="red"))
    sys.exit(EXIT_VERIFICATION_FAILED)


def main():
    """主函数入口"""
    cli()


if __name__ == "__main__":
    cli()
