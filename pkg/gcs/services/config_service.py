"""
运行配置服务。

读取链路：schema defaults + JSON 配置文件 → RunConfigPatch 命令行覆盖 → 校验。
错误统一转换为带行号/字段路径的 ConfigValidationError。
"""

from __future__ import annotations

import json
import logging
import re
from pathlib import Path

from pydantic import ValidationError

from gcs.config import RunConfig, RunConfigPatch, WeightSpec
from gcs.exceptions import ConfigValidationError, InvalidLadderError
from gcs.physics.ladder import LadderSpec, oscillator_ladder, table_weight
from gcs.utils.file_utils import read_weight_table

logger = logging.getLogger(__name__)


def _locate_line(text: str, location: tuple[str | int, ...]) -> int | None:
    """字段路径最后一个键名在文件中首次出现的行号。"""
    for key in reversed(location):
        if isinstance(key, str):
            match = re.search(rf'"{re.escape(key)}"\s*:', text)
            if match:
                return text.count("\n", 0, match.start()) + 1
    return None


class RunConfigService:
    """
    运行配置管理。

    - load(): 文件 + 覆盖合并、校验，结果缓存
    - get(): 返回缓存（未加载时为默认配置）
    """

    def __init__(self) -> None:
        self._cache: RunConfig | None = None

    def load(self, path: str | Path | None = None, patch: RunConfigPatch | None = None) -> RunConfig:
        text = ""
        data: dict = {}
        if path is not None:
            path = Path(path)
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as e:
                raise ConfigValidationError(
                    message=f"无法读取配置文件: {path}",
                    field="",
                    reason=str(e),
                ) from e
            try:
                data = json.loads(text)
            except json.JSONDecodeError as e:
                raise ConfigValidationError(
                    message=f"{path} 第 {e.lineno} 行 JSON 语法错误: {e.msg}",
                    field="",
                    line=e.lineno,
                    reason=e.msg,
                ) from e
            if not isinstance(data, dict):
                raise ConfigValidationError(message=f"{path} 顶层必须是 JSON 对象", line=1, reason="not_object")

        if patch is not None:
            data = patch.apply_to(data)

        try:
            config = RunConfig(**data)
        except ValidationError as e:
            first = e.errors()[0]
            location = tuple(first["loc"])
            dotted = ".".join(str(part) for part in location)
            line = _locate_line(text, location) if text else None
            where = f"第 {line} 行 " if line is not None else ""
            raise ConfigValidationError(
                message=f"配置字段 {dotted or '<root>'} {where}校验失败: {first['msg']}",
                field=dotted,
                line=line,
                reason=first["msg"],
            ) from e

        logger.info(
            "run config loaded: source=%s kind=%s definition=%s",
            path or "<defaults>",
            config.kind,
            config.definition,
        )
        self._cache = config
        return config

    def get(self) -> RunConfig:
        if self._cache is None:
            return RunConfig()
        return self._cache


def build_ladder(weights: WeightSpec) -> LadderSpec:
    """由 WeightSpec 构造振子序列上的阶梯；表文件中 n 超出表尾时取最后一个值。"""
    try:
        if weights.source == "one":
            return oscillator_ladder(roots=tuple(weights.roots))
        table = read_weight_table(weights.path or "")
        return oscillator_ladder(f=table_weight(table), roots=tuple(weights.roots))
    except InvalidLadderError as e:
        raise ConfigValidationError(
            message=f"f_spec 与权函数表不一致: {e.message}",
            field="f_spec",
            reason=e.reason,
        ) from e


run_config_service = RunConfigService()
