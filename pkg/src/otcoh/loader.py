"""模型规格文件加载器
"""

import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import rtoml
from pydantic import ValidationError

from .characters import Backend
from .exceptions import BackendUnavailable, MalformedSpec, ParseError
from .models import ModelSpec, Options
from .numberfield import Polynomial
from .solvmodel import SolvModel, build_model, synthetic_model
from .utils import calculate_text_hash

logger = logging.getLogger(__name__)


class LoadedSpec:
    """已解析的规格文档及其原文哈希"""

    def __init__(self, spec: ModelSpec, text: str, path: Optional[Path] = None):
        self.spec = spec
        self.text = text
        self.path = path
        self.input_hash = calculate_text_hash(text)

    @property
    def options(self) -> Options:
        return self.spec.options


class SpecLoader:
    """规格文件加载器

    支持：
    - 读取 TOML 规格文件并校验结构
    - 合并命令行覆盖的选项
    - 构造 SolvModel
    """

    def __init__(self, strict: bool = True):
        """初始化加载器

        Args:
            strict: 严格模式，为 True 时后端不匹配直接抛出异常，否则改用可用后端并记录警告

        """
        self.strict = strict
        self.errors: List[str] = []
        self.warnings: List[str] = []

    def load(self, spec_path: str) -> LoadedSpec:
        """读取规格文件

        Args:
            spec_path: 文件路径

        Returns:
            LoadedSpec: 规格文档

        Raises:
            ParseError: 文件不存在或不是合法 TOML
            MalformedSpec: 结构校验失败

        """
        path = Path(spec_path)
        if not path.is_file():
            raise ParseError(f"规格文件不存在: {path}")

        self.clear_messages()
        text = path.read_text(encoding="utf-8")
        return LoadedSpec(self.parse_text(text), text, path)

    def loads(self, text: str) -> LoadedSpec:
        """从字符串读取规格"""
        self.clear_messages()
        return LoadedSpec(self.parse_text(text), text)

    def parse_text(self, text: str) -> ModelSpec:
        data = self._parse_toml(text)
        try:
            return ModelSpec(**data)
        except ValidationError as e:
            messages = [f"{'.'.join(str(p) for p in error['loc'])}: {error['msg']}" for error in e.errors()]
            self.errors.extend(messages)
            raise MalformedSpec("规格校验失败: " + "; ".join(messages))
        except ValueError as e:
            self.errors.append(str(e))
            raise MalformedSpec(f"规格校验失败: {e!s}")

    def _parse_toml(self, text: str) -> Dict[str, Any]:
        """解析 TOML 文本

        Raises:
            ParseError: 解析失败

        """
        try:
            return rtoml.loads(text)
        except Exception as e:
            raise ParseError(f"解析 TOML 失败: {e!s}")

    def merge_options(self, loaded: LoadedSpec, **overrides: Any) -> Options:
        """命令行选项覆盖文件中的 [options]（值为 None 的项忽略）"""
        data = loaded.options.model_dump()
        data.update({key: value for key, value in overrides.items() if value is not None})
        try:
            return Options(**data)
        except ValidationError as e:
            raise MalformedSpec(f"选项不合法: {e!s}")

    def resolve_backend(self, spec: ModelSpec, options: Options) -> Backend:
        """检查后端与模型数据是否匹配

        Raises:
            BackendUnavailable: 严格模式下后端不可用

        """
        backend = options.backend
        if spec.synthetic is not None and spec.synthetic.C is None and backend == Backend.NUMERIC:
            message = "generic 合成模型没有数值特征，numeric 后端不可用"
            if self.strict:
                raise BackendUnavailable(message)
            self.warnings.append(message + "，改用 generic 后端")
            return Backend.GENERIC
        if spec.field is not None and not spec.field.relations and backend == Backend.GENERIC:
            raise BackendUnavailable("数域模型使用 generic 后端时必须在 [field] 中声明 relations")
        return backend

    def build(self, loaded: LoadedSpec, options: Optional[Options] = None) -> SolvModel:
        """按规格构造模型

        Args:
            loaded: 规格文档
            options: 合并后的选项，缺省用文件中的 [options]

        Returns:
            SolvModel: 模型

        """
        spec = loaded.spec
        options = options or spec.options
        if spec.field is not None:
            field = spec.field
            try:
                polynomial = Polynomial(coeffs=field.poly)
                units = [polynomial.element(coords) for coords in field.units]
            except ValueError as e:
                raise MalformedSpec(f"[field] 数据不合法: {e!s}")
            self.warnings.append("单位按幂基 Z[θ] 坐标读取；O_K ≠ Z[θ] 时只覆盖 Z[θ] 中的单位")
            logger.debug("单位必须位于 Z[θ]，未处理 O_K ≠ Z[θ] 的情形")
            return build_model(
                polynomial,
                units,
                precision=options.precision,
                tolerance=options.tolerance,
                relations=field.relations,
                branch_shifts=field.branch_shifts,
                check_irreducible=options.check_irreducible,
            )

        synthetic = spec.synthetic
        return synthetic_model(
            synthetic.s,
            synthetic.t,
            synthetic.B,
            relations=synthetic.relations,
            generator_args=synthetic.generator_args,
            precision=options.precision,
            tolerance=options.tolerance,
        )

    def get_errors(self) -> List[str]:
        """获取所有错误"""
        return self.errors

    def get_warnings(self) -> List[str]:
        """获取所有警告"""
        return self.warnings

    def clear_messages(self):
        """清除错误和警告"""
        self.errors.clear()
        self.warnings.clear()
