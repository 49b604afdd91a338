"""
文件工具函数。

CSV/JSON 原子导出、输出路径解析、f(n) 表读取。
"""

from __future__ import annotations

import os
import re
from collections.abc import Callable
from pathlib import Path
from typing import IO

import numpy as np
from pydantic import BaseModel

from gcs.config import get_settings
from gcs.exceptions import ExportWriteError, WeightTableError

CSV_FORMAT = "%.17g"

_SPLIT = re.compile(r"[,\s]+")


def resolve_output_path(name: str) -> Path:
    """相对路径落在 output_dir 下。"""
    path = Path(name)
    if path.is_absolute():
        return path
    return Path(get_settings().output_dir) / path


def _atomic_write(final_path: Path, writer: Callable[[IO[str]], None]) -> Path:
    """先写 *.tmp 再 os.replace；失败时清理临时文件并抛 ExportWriteError。"""
    tmp_path = final_path.with_suffix(final_path.suffix + ".tmp")
    try:
        final_path.parent.mkdir(parents=True, exist_ok=True)
        with open(tmp_path, "w", encoding="utf-8", newline="\n") as f:
            writer(f)
        os.replace(tmp_path, final_path)
    except OSError as e:
        if tmp_path.exists():
            try:
                tmp_path.unlink()
            except OSError:
                pass
        raise ExportWriteError(
            message=f"写出文件失败: {final_path}",
            path=str(final_path),
            reason=str(e),
        ) from e
    return final_path


def write_csv(path: Path, header: list[str], rows: np.ndarray) -> Path:
    """按列名写 CSV，浮点统一 17 位有效数字。"""
    table = np.atleast_2d(np.asarray(rows, dtype=float))
    if table.shape[1] != len(header):
        raise ExportWriteError(
            message=f"列数 {table.shape[1]} 与表头 {header} 不符",
            path=str(path),
            reason="shape",
        )

    def writer(f: IO[str]) -> None:
        np.savetxt(f, table, fmt=CSV_FORMAT, delimiter=",", header=",".join(header), comments="")

    return _atomic_write(path, writer)


def write_json(path: Path, document: BaseModel) -> Path:
    def writer(f: IO[str]) -> None:
        f.write(document.model_dump_json(indent=2))
        f.write("\n")

    return _atomic_write(path, writer)


def read_weight_table(path: str | Path) -> dict[int, float]:
    """
    读取两列文本 (n, f(n))。

    - 空行与 # 开头的行忽略
    - 分隔符为空白或逗号
    - n 重复、非整数或数值非法时抛 WeightTableError（带行号）
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise WeightTableError(message=f"无法读取权函数表: {path}", path=str(path)) from e

    table: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = _SPLIT.split(line)
        try:
            if len(parts) != 2:
                raise ValueError(line)
            index = int(parts[0])
            value = float(parts[1])
        except ValueError as e:
            raise WeightTableError(
                message=f"{path} 第 {lineno} 行格式错误，应为 'n f(n)'",
                path=str(path),
                line=lineno,
            ) from e
        if index < 0 or index in table or not np.isfinite(value):
            raise WeightTableError(
                message=f"{path} 第 {lineno} 行的 n 重复、为负或 f(n) 非有限值",
                path=str(path),
                line=lineno,
            )
        table[index] = value
    if not table:
        raise WeightTableError(message=f"权函数表为空: {path}", path=str(path))
    return table
