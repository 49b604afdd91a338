"""测试格点并行工具"""

import numpy as np

from gcs.config import get_settings
from gcs.utils.concurrency import MIN_CHUNK, map_columns, resolve_threads


class TestResolveThreads:
    def test_explicit_wins(self):
        assert resolve_threads(3) == 3

    def test_falls_back_to_env(self, monkeypatch):
        monkeypatch.setenv("GCS_THREADS", "5")
        get_settings.cache_clear()
        assert resolve_threads(None) == 5

    def test_clamped_to_one(self):
        assert resolve_threads(0) == 1


class TestMapColumns:
    def test_order_preserved(self):
        columns = 4 * MIN_CHUNK + 7
        result = map_columns(lambda cols: np.arange(columns)[cols] * 2.0, columns, threads=4)
        assert np.array_equal(result, np.arange(columns) * 2.0)

    def test_leading_axes_kept(self):
        columns = 2 * MIN_CHUNK
        grid = np.arange(3 * columns, dtype=float).reshape(3, columns)
        result = map_columns(lambda cols: grid[:, cols], columns, threads=2)
        assert np.array_equal(result, grid)

    def test_small_inputs_run_serially(self):
        seen = []

        def task(cols):
            seen.append(cols)
            return np.zeros(cols.stop - cols.start)

        map_columns(task, 10, threads=8)
        assert seen == [slice(0, 10)]
