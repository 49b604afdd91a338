"""
物理层 typed 数据结构。

所有数据结构使用 @dataclass 定义；自然单位 ħ=v_F=c=e=m*=1。
"""

from __future__ import annotations

import cmath
import math
from collections.abc import Callable
from dataclasses import dataclass, field, replace
from typing import Any, Literal

import numpy as np

from gcs.exceptions import PhysicsError

LayerKind = Literal["monolayer", "bilayer"]
Definition = Literal["BG", "GP", "MU"]
Direction = Literal["down", "up"]
ProfileKind = Literal["constant", "custom"]

RealMap = Callable[[float], float]


@dataclass(frozen=True)
class UnitSystem:
    """ω≡2e𝔅₀/cħ、波数 k 与能带分支（+1 电子 / −1 空穴）。"""

    omega: float = 1.0
    k: float = 0.0
    branch: int = 1

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise PhysicsError(message=f"omega 必须为正: {self.omega}")
        if self.branch not in (1, -1):
            raise PhysicsError(message=f"branch 只能取 ±1: {self.branch}")

    @property
    def center(self) -> float:
        """振子中心 x_c=−2k/ω。"""
        return -2.0 * self.k / self.omega

    def z(self, x: Any) -> Any:
        """z(x)=√(ω/2)(x+2k/ω)，支持标量与 ndarray。"""
        return math.sqrt(self.omega / 2.0) * (np.asarray(x, dtype=float) - self.center)


@dataclass(frozen=True)
class MagneticProfile:
    """矢势幅值 𝒜(x) 及其一、二阶解析导数。"""

    a: RealMap
    a1: RealMap
    a2: RealMap
    kind: ProfileKind = "custom"
    b0: float | None = None

    @classmethod
    def constant(cls, b0: float) -> MagneticProfile:
        """恒定磁场 𝒜(x)=𝔅₀x。"""
        return cls(
            a=lambda x: b0 * x,
            a1=lambda x: b0 + 0.0 * x,
            a2=lambda x: 0.0 * x,
            kind="constant",
            b0=b0,
        )

    @classmethod
    def for_units(cls, units: UnitSystem) -> MagneticProfile:
        """自然单位下 ω=2𝔅₀。"""
        return cls.constant(units.omega / 2.0)


@dataclass(frozen=True)
class MonolayerFields:
    w: float
    v_minus: float
    v_plus: float


@dataclass(frozen=True)
class BilayerFields:
    eta: float
    beta: float
    gamma: float
    v_minus: float
    v_plus: float


@dataclass(frozen=True)
class SpinorSample:
    """
    旋量在 x 处的取值。

    e^{iky} 平面波因子不存储；单层 bottom 分量携带的 i 只记为标志。
    """

    top: float
    bottom: float
    bottom_has_i: bool = False


@dataclass(frozen=True)
class Truncation:
    n_max: int
    tail_bound: float


@dataclass(frozen=True, eq=False)
class CoherentSeries:
    """
    截断相干态系数 {a_n}，n = base_index..N。

    canonical=True 表示 f≡1 的振子族（闭式级数可用）。
    radius 记录构造时的 |α|，闭式级数以它为准。
    """

    kind: LayerKind
    alpha: complex
    definition: Definition
    base_index: int
    coefficients: np.ndarray
    truncation: Truncation
    canonical: bool = False
    radius: float | None = None

    def __post_init__(self) -> None:
        coeffs = np.array(self.coefficients, dtype=complex)
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def r(self) -> float:
        return abs(self.alpha) if self.radius is None else self.radius

    @property
    def theta(self) -> float:
        return cmath.phase(self.alpha)

    @property
    def n_max(self) -> int:
        return self.base_index + len(self.coefficients) - 1

    def dense(self) -> np.ndarray:
        """0..N 的稠密复系数向量（base_index 之前补零）。"""
        out = np.zeros(self.n_max + 1, dtype=complex)
        out[self.base_index :] = self.coefficients
        return out

    def probabilities(self) -> np.ndarray:
        """0..N 上的 |a_n|²。"""
        dense = self.dense()
        return dense.real**2 + dense.imag**2

    def norm_squared(self) -> float:
        return math.fsum(self.probabilities())

    def with_coefficients(self, coefficients: np.ndarray) -> CoherentSeries:
        return replace(self, coefficients=np.asarray(coefficients, dtype=complex))


@dataclass(frozen=True, eq=False)
class DensityGrid:
    """x 网格上的 ρ 或 J 分量。"""

    xs: np.ndarray
    values: np.ndarray
    meta: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ZPMoments:
    """无量纲 z、p_z 的一、二阶矩。"""

    mean_z: float
    mean_z2: float
    mean_p: float
    mean_p2: float

    @property
    def delta_z(self) -> float:
        return math.sqrt(max(self.mean_z2 - self.mean_z**2, 0.0))

    @property
    def delta_p(self) -> float:
        return math.sqrt(max(self.mean_p2 - self.mean_p**2, 0.0))


@dataclass(frozen=True)
class QuadratureSpread:
    """广义正交分量 Q𝒢、P𝒢 的涨落与 ½|⟨[Q,P]⟩|。"""

    delta_q: float
    delta_p: float
    half_commutator: float


@dataclass(frozen=True, eq=False)
class FidelityTrace:
    ts: np.ndarray
    values: np.ndarray
    quasiperiods: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class LinearizationReport:
    """双层能级线性化后保真度的分解项。"""

    t: float
    n_linear: int
    envelope: float
    residual_norm: float
    residual_fidelity: float
    cross_term: float
