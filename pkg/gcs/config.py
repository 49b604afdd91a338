"""
配置管理模块

双层配置架构：
- 静态配置 (AppSettings): 从 .env 文件 + 环境变量加载，进程级参数（日志、线程数）
- 运行配置 (RunConfig): 单次 CLI 运行的物理参数，JSON 文件默认值 + 命令行覆盖
"""

from __future__ import annotations

from functools import lru_cache
from typing import Annotated, Literal

from annotated_types import Ge, Gt, Lt
from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

LayerKind = Literal["monolayer", "bilayer"]
Definition = Literal["BG", "GP", "MU"]
OutputFormat = Literal["csv", "json"]


class AppSettings(BaseSettings):
    """静态配置：从 .env 文件 + 环境变量加载。"""

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    log_level: str = "INFO"
    # 环境变量 GCS_THREADS：格点并行的 worker 上限
    gcs_threads: Annotated[int, Ge(1)] = 1
    default_tol: Annotated[float, Gt(0), Lt(1)] = 1e-12
    quadrature_half_steps: Annotated[int, Ge(100)] = 2000
    output_dir: str = "."


@lru_cache
def get_settings() -> AppSettings:
    """获取静态配置单例。"""
    return AppSettings()


class AlphaSpec(BaseModel):
    """相干态标签 α=r·e^{iθ}；r_points/theta_points>1 时扫描。"""

    model_config = ConfigDict(extra="forbid")

    r: Annotated[float, Ge(0)] = 1.0
    theta: float = 0.0
    r_max: Annotated[float, Ge(0)] | None = None
    r_points: Annotated[int, Ge(1)] = 1
    theta_max: float | None = None
    theta_points: Annotated[int, Ge(1)] = 1

    @model_validator(mode="after")
    def _check_sweep(self) -> AlphaSpec:
        if self.r_points > 1 and (self.r_max is None or self.r_max <= self.r):
            raise ValueError("r_points>1 需要 r_max > r")
        if self.theta_points > 1 and (self.theta_max is None or self.theta_max <= self.theta):
            raise ValueError("theta_points>1 需要 theta_max > theta")
        return self


class GridSpec(BaseModel):
    """x 网格；x_min/x_max 缺省时取振子求积窗口。"""

    model_config = ConfigDict(extra="forbid")

    x_min: float | None = None
    x_max: float | None = None
    points: Annotated[int, Ge(2)] = 4001

    @model_validator(mode="after")
    def _check_bounds(self) -> GridSpec:
        if (self.x_min is None) != (self.x_max is None):
            raise ValueError("x_min 与 x_max 必须同时给出")
        if self.x_min is not None and self.x_max is not None and self.x_min >= self.x_max:
            raise ValueError("x_min 必须小于 x_max")
        return self


class TimeSpec(BaseModel):
    """保真度采样与演化时刻（无量纲 t₁/t₂）。"""

    model_config = ConfigDict(extra="forbid")

    t_max: Annotated[float, Gt(0)] = 25.0
    samples: Annotated[int, Ge(2)] = 2001
    threshold: float = 0.8
    times: list[float] = Field(default_factory=list)
    linear_n: Annotated[int, Ge(1)] = 10


class WeightSpec(BaseModel):
    """权函数 f(n)：内置 one 或两列表文件 (n, f(n))。"""

    model_config = ConfigDict(extra="forbid")

    source: Literal["one", "table"] = "one"
    path: str | None = None
    roots: list[Annotated[int, Ge(1)]] = Field(default_factory=list)
    extremal: Annotated[int, Ge(0)] | None = None

    @model_validator(mode="after")
    def _check_path(self) -> WeightSpec:
        if self.source == "table" and not self.path:
            raise ValueError("source=table 需要 path")
        return self


class RunConfig(BaseModel):
    """单次运行配置 Schema：默认值源 + 字段约束。"""

    model_config = ConfigDict(extra="forbid")

    kind: LayerKind = "monolayer"
    omega: Annotated[float, Gt(0)] = 1.0
    k: float = 1.0
    branch: Literal[1, -1] = 1
    alpha: AlphaSpec = Field(default_factory=AlphaSpec)
    definition: Definition = "BG"
    f_spec: WeightSpec = Field(default_factory=WeightSpec)
    tol: Annotated[float, Gt(0), Lt(1)] = Field(default_factory=lambda: get_settings().default_tol)
    grid: GridSpec = Field(default_factory=GridSpec)
    time: TimeSpec = Field(default_factory=TimeSpec)
    n_max: Annotated[int, Ge(0)] = 10
    eps1: float = 0.0
    eps2: float | None = None
    output: str = Field(default="out.csv", min_length=1)
    format: OutputFormat = "csv"


# RunConfigPatch 扁平字段 → RunConfig 中的嵌套位置
_PATCH_NESTING: dict[str, tuple[str, str]] = {
    "r": ("alpha", "r"),
    "theta": ("alpha", "theta"),
    "r_max": ("alpha", "r_max"),
    "r_points": ("alpha", "r_points"),
    "theta_max": ("alpha", "theta_max"),
    "theta_points": ("alpha", "theta_points"),
    "f_table": ("f_spec", "path"),
    "extremal": ("f_spec", "extremal"),
    "x_min": ("grid", "x_min"),
    "x_max": ("grid", "x_max"),
    "points": ("grid", "points"),
    "t_max": ("time", "t_max"),
    "samples": ("time", "samples"),
    "threshold": ("time", "threshold"),
    "linear_n": ("time", "linear_n"),
}


class RunConfigPatch(BaseModel):
    """命令行覆盖：所有字段 Optional，白名单锁死。"""

    model_config = ConfigDict(extra="forbid")

    kind: LayerKind | None = None
    omega: Annotated[float, Gt(0)] | None = None
    k: float | None = None
    branch: Literal[1, -1] | None = None
    r: Annotated[float, Ge(0)] | None = None
    theta: float | None = None
    r_max: Annotated[float, Ge(0)] | None = None
    r_points: Annotated[int, Ge(1)] | None = None
    theta_max: float | None = None
    theta_points: Annotated[int, Ge(1)] | None = None
    definition: Definition | None = None
    f_table: str | None = None
    extremal: Annotated[int, Ge(0)] | None = None
    tol: Annotated[float, Gt(0), Lt(1)] | None = None
    x_min: float | None = None
    x_max: float | None = None
    points: Annotated[int, Ge(2)] | None = None
    t_max: Annotated[float, Gt(0)] | None = None
    samples: Annotated[int, Ge(2)] | None = None
    threshold: float | None = None
    linear_n: Annotated[int, Ge(1)] | None = None
    n_max: Annotated[int, Ge(0)] | None = None
    eps1: float | None = None
    eps2: float | None = None
    output: str | None = Field(default=None, min_length=1)
    format: OutputFormat | None = None

    def apply_to(self, data: dict) -> dict:
        """把非空覆盖项写入嵌套配置 dict（返回新 dict）。"""
        merged = {key: (dict(value) if isinstance(value, dict) else value) for key, value in data.items()}
        for key, value in self.model_dump(exclude_none=True).items():
            if key in _PATCH_NESTING:
                section, name = _PATCH_NESTING[key]
                merged.setdefault(section, {})
                merged[section] = {**merged[section], name: value}
                if key == "f_table":
                    merged[section]["source"] = "table"
            else:
                merged[key] = value
        return merged
