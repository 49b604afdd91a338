"""
Pydantic 数据模型（导出层 Schemas）。

相干态系数、网格与保真度轨迹的 JSON 文档。
浮点数以最短往返表示输出，读回后逐位相等。
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

LayerKind = Literal["monolayer", "bilayer"]
Definition = Literal["BG", "GP", "MU"]


class ComplexValue(BaseModel):
    """复数 {re, im}。"""

    model_config = ConfigDict(extra="forbid")

    re: float
    im: float

    @classmethod
    def of(cls, value: complex) -> "ComplexValue":
        return cls(re=value.real, im=value.imag)

    def to_complex(self) -> complex:
        return complex(self.re, self.im)


class SeriesDocument(BaseModel):
    """CoherentSeries 的 JSON 表示。"""

    model_config = ConfigDict(extra="forbid")

    kind: LayerKind
    definition: Definition
    alpha: ComplexValue
    base_index: int = Field(ge=0)
    coefficients: list[ComplexValue] = Field(min_length=1)
    tail_bound: float = Field(ge=0.0)
    canonical: bool = False


class GridDocument(BaseModel):
    """x 网格上的一条曲线。"""

    quantity: str
    xs: list[float]
    values: list[float]
    meta: dict[str, str | float | int] = Field(default_factory=dict)


class FidelityDocument(BaseModel):
    """保真度轨迹与检测到的准周期。"""

    ts: list[float]
    values: list[float]
    quasiperiods: list[float]
