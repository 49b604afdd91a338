"""
统一异常定义。

所有模块的自定义异常集中定义在此文件。
各异常类使用 @dataclass 定义，继承公共基类 AppError。
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class AppError(Exception):
    """所有应用异常的公共基类。"""

    message: str

    def __str__(self) -> str:
        return self.message


@dataclass
class PhysicsError(AppError):
    """数值/物理构造异常基类。"""


@dataclass
class DegenerateEtaError(PhysicsError):
    """双层场量在 η(x)≈0 处奇异。"""

    x: float = 0.0
    eta: float = 0.0


@dataclass
class InvalidLadderError(PhysicsError):
    """阶梯算子序列不合法（q_n≤0、p_0≠0、根表不一致等）。"""

    reason: str = ""
    index: int = -1


@dataclass
class DivergenceError(PhysicsError):
    """相干态级数比值检验失败。"""

    alpha_abs: float = 0.0
    terms: int = 0


@dataclass
class NotHWAlgebraError(PhysicsError):
    """无根 GP 构造要求 f 满足 Heisenberg-Weyl 递推。"""

    index: int = -1
    deviation: float = 0.0


@dataclass
class OracleMismatchError(PhysicsError):
    """闭式级数与矩阵元 oracle 不一致。"""

    quantity: str = ""
    closed_form: float = 0.0
    oracle: float = 0.0


@dataclass
class ConfigError(AppError):
    """配置异常基类。"""


@dataclass
class ConfigValidationError(ConfigError):
    """运行配置校验失败。"""

    field: str = ""
    line: int | None = None
    reason: str = ""


@dataclass
class WeightTableError(ConfigError):
    """f(n) 表文件无法解析。"""

    path: str = ""
    line: int | None = None


@dataclass
class ExportError(AppError):
    """导出异常基类。"""


@dataclass
class ExportWriteError(ExportError):
    """写出 CSV/JSON 失败。"""

    path: str = ""
    reason: str = ""


@dataclass
class CheckFailedError(AppError):
    """不变量检查套件存在失败项。"""

    failed: list[str] = field(default_factory=list)
