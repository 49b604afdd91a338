"""测试配置管理模块"""

import pytest
from pydantic import ValidationError


class TestAppSettings:
    """静态配置测试"""

    def test_default_values(self):
        """验证 AppSettings 的所有默认值"""
        from gcs.config import AppSettings

        settings = AppSettings(_env_file=None)
        assert settings.log_level == "INFO"
        assert settings.gcs_threads == 1
        assert settings.default_tol == 1e-12
        assert settings.quadrature_half_steps == 2000
        assert settings.output_dir == "."

    def test_env_override(self, monkeypatch):
        """验证环境变量可覆盖默认值"""
        from gcs.config import AppSettings

        monkeypatch.setenv("GCS_THREADS", "4")
        monkeypatch.setenv("LOG_LEVEL", "DEBUG")

        settings = AppSettings(_env_file=None)
        assert settings.gcs_threads == 4
        assert settings.log_level == "DEBUG"

    def test_invalid_threads_rejected(self, monkeypatch):
        """GCS_THREADS 必须 ≥ 1"""
        from gcs.config import AppSettings

        monkeypatch.setenv("GCS_THREADS", "0")
        with pytest.raises(ValidationError):
            AppSettings(_env_file=None)

    def test_get_settings_returns_singleton(self):
        """验证 get_settings() 返回缓存实例"""
        from gcs.config import get_settings

        assert get_settings() is get_settings()


class TestRunConfig:
    """运行配置 Schema 测试"""

    def test_default_values(self):
        """默认 ω = k = 1 的单层 BG 态"""
        from gcs.config import RunConfig

        cfg = RunConfig()
        assert cfg.kind == "monolayer"
        assert cfg.omega == 1.0
        assert cfg.k == 1.0
        assert cfg.definition == "BG"
        assert cfg.alpha.r == 1.0
        assert cfg.tol == 1e-12
        assert cfg.grid.points == 4001
        assert cfg.time.threshold == 0.8
        assert cfg.f_spec.source == "one"
        assert cfg.output == "out.csv"

    def test_tol_default_follows_settings(self, monkeypatch):
        """tol 缺省值取 DEFAULT_TOL"""
        from gcs.config import RunConfig, get_settings

        monkeypatch.setenv("DEFAULT_TOL", "1e-9")
        get_settings.cache_clear()
        assert RunConfig().tol == 1e-9

    def test_unknown_field_rejected(self):
        """extra='forbid'：拼写错误立刻报错"""
        from gcs.config import RunConfig

        with pytest.raises(ValidationError):
            RunConfig(omgea=2.0)

    def test_omega_must_be_positive(self):
        from gcs.config import RunConfig

        with pytest.raises(ValidationError):
            RunConfig(omega=0.0)

    def test_branch_literal(self):
        from gcs.config import RunConfig

        assert RunConfig(branch=-1).branch == -1
        with pytest.raises(ValidationError):
            RunConfig(branch=0)

    def test_sweep_requires_upper_bound(self):
        """r_points > 1 时必须给出 r_max > r"""
        from gcs.config import AlphaSpec

        with pytest.raises(ValidationError):
            AlphaSpec(r=1.0, r_points=3)
        with pytest.raises(ValidationError):
            AlphaSpec(r=1.0, r_max=0.5, r_points=3)
        assert AlphaSpec(r=1.0, r_max=5.0, r_points=3).r_points == 3

    def test_grid_bounds_paired(self):
        """x_min/x_max 必须同时给出且有序"""
        from gcs.config import GridSpec

        with pytest.raises(ValidationError):
            GridSpec(x_min=-1.0)
        with pytest.raises(ValidationError):
            GridSpec(x_min=1.0, x_max=-1.0)

    def test_table_requires_path(self):
        from gcs.config import WeightSpec

        with pytest.raises(ValidationError):
            WeightSpec(source="table")


class TestRunConfigPatch:
    """命令行覆盖模型测试"""

    def test_all_none_by_default(self):
        from gcs.config import RunConfigPatch

        assert RunConfigPatch().model_dump(exclude_none=True) == {}

    def test_flat_fields_nested_on_apply(self):
        """扁平覆盖项写入嵌套位置，不影响同节其余字段"""
        from gcs.config import RunConfigPatch

        patch = RunConfigPatch(r=3.0, points=11, kind="bilayer")
        merged = patch.apply_to({"alpha": {"theta": 0.5}, "omega": 2.0})
        assert merged["alpha"] == {"theta": 0.5, "r": 3.0}
        assert merged["grid"] == {"points": 11}
        assert merged["kind"] == "bilayer"
        assert merged["omega"] == 2.0

    def test_apply_does_not_mutate_input(self):
        from gcs.config import RunConfigPatch

        data = {"alpha": {"r": 1.0}}
        RunConfigPatch(r=2.0).apply_to(data)
        assert data == {"alpha": {"r": 1.0}}

    def test_f_table_switches_source(self):
        """--f-table 隐含 source=table"""
        from gcs.config import RunConfigPatch

        merged = RunConfigPatch(f_table="f.txt").apply_to({})
        assert merged["f_spec"] == {"path": "f.txt", "source": "table"}

    def test_invalid_values_rejected(self):
        from gcs.config import RunConfigPatch

        with pytest.raises(ValidationError):
            RunConfigPatch(tol=2.0)
        with pytest.raises(ValidationError):
            RunConfigPatch(definition="XX")
