"""测试统一异常模块。"""

from gcs.exceptions import (
    AppError,
    CheckFailedError,
    ConfigError,
    ConfigValidationError,
    DegenerateEtaError,
    DivergenceError,
    ExportError,
    ExportWriteError,
    InvalidLadderError,
    NotHWAlgebraError,
    OracleMismatchError,
    PhysicsError,
    WeightTableError,
)


class TestAppErrorBase:
    """AppError 基类测试"""

    def test_str_returns_message(self):
        err = AppError(message="出错了")
        assert str(err) == "出错了"

    def test_is_exception(self):
        assert issubclass(AppError, Exception)


class TestPhysicsErrors:
    """物理构造异常层级测试"""

    def test_degenerate_eta_fields(self):
        err = DegenerateEtaError(message="η≈0", x=-2.0, eta=0.0)
        assert isinstance(err, PhysicsError)
        assert isinstance(err, AppError)
        assert err.x == -2.0

    def test_invalid_ladder_fields(self):
        err = InvalidLadderError(message="q 非正", reason="q_nonpositive", index=3)
        assert err.reason == "q_nonpositive"
        assert err.index == 3

    def test_divergence_fields(self):
        err = DivergenceError(message="发散", alpha_abs=2.0, terms=51)
        assert err.alpha_abs == 2.0
        assert err.terms == 51

    def test_not_hw_and_oracle(self):
        assert issubclass(NotHWAlgebraError, PhysicsError)
        err = OracleMismatchError(message="不一致", quantity="mean_z", closed_form=1.0, oracle=1.1)
        assert err.quantity == "mean_z"


class TestConfigErrors:
    """配置异常层级测试"""

    def test_validation_error_defaults(self):
        err = ConfigValidationError(message="bad")
        assert isinstance(err, ConfigError)
        assert err.field == ""
        assert err.line is None

    def test_weight_table_error(self):
        err = WeightTableError(message="bad", path="f.txt", line=4)
        assert isinstance(err, ConfigError)
        assert err.line == 4


class TestExportAndCheckErrors:
    def test_export_write_error(self):
        err = ExportWriteError(message="写失败", path="/x.csv", reason="denied")
        assert isinstance(err, ExportError)
        assert err.path == "/x.csv"

    def test_check_failed_default_list_not_shared(self):
        """failed 默认值为独立列表"""
        a = CheckFailedError(message="a")
        b = CheckFailedError(message="b")
        a.failed.append("x")
        assert b.failed == []
