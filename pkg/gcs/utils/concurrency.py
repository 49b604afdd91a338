"""
格点并行工具。

只把逐列（逐 x）独立的计算切块分发到线程池，
每一列上的运算顺序与串行完全相同，结果逐位一致。
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from gcs.config import get_settings

logger = logging.getLogger(__name__)

# 每块最少列数，避免线程开销大于计算本身
MIN_CHUNK = 256

ColumnTask = Callable[[slice], np.ndarray]


def resolve_threads(threads: int | None) -> int:
    """显式参数优先，否则取 GCS_THREADS。"""
    if threads is None:
        threads = get_settings().gcs_threads
    return max(1, int(threads))


def map_columns(task: ColumnTask, n_columns: int, threads: int | None = None) -> np.ndarray:
    """
    在 [0, n_columns) 的连续列块上执行 task，按原顺序拼接结果。

    task(slice) 返回该块各列的结果（最后一维为列）。
    """
    workers = min(resolve_threads(threads), max(1, n_columns // MIN_CHUNK))
    if workers <= 1:
        return task(slice(0, n_columns))

    bounds = np.linspace(0, n_columns, workers + 1).astype(int)
    chunks = [slice(int(lo), int(hi)) for lo, hi in zip(bounds[:-1], bounds[1:])]
    logger.debug("column split: columns=%d workers=%d", n_columns, workers)
    with ThreadPoolExecutor(max_workers=workers) as executor:
        parts = list(executor.map(task, chunks))
    return np.concatenate(parts, axis=-1)
