"""
谐振子本征函数 ψ_n⁻(x) 与一维阶梯算子 θ±。

ψ_n⁻ 用归一化三项递推求值（不经过 Hermite 多项式乘阶乘），
n 可到数百而不溢出；所有 x 积分统一走 quadrature_window + 梯形公式。
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import trapezoid

from gcs.exceptions import PhysicsError
from gcs.physics.types import Direction, UnitSystem


def psi_table(n_max: int, xs: float | np.ndarray, units: UnitSystem) -> np.ndarray:
    """
    ψ_0⁻..ψ_{n_max}⁻ 在 xs 上的取值，形状 (n_max+1, *xs.shape)。

    φ_{n+1} = z√(2/(n+1))φ_n − √(n/(n+1))φ_{n−1}，φ_0 为归一化高斯。
    """
    if n_max < 0:
        raise PhysicsError(message=f"n_max 不能为负: {n_max}")
    z = units.z(xs)
    table = np.empty((n_max + 1,) + z.shape, dtype=float)
    table[0] = (units.omega / (2.0 * math.pi)) ** 0.25 * np.exp(-0.5 * z * z)
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * z * table[0]
    for n in range(1, n_max):
        table[n + 1] = (
            z * math.sqrt(2.0 / (n + 1)) * table[n]
            - math.sqrt(n / (n + 1)) * table[n - 1]
        )
    return table


def eval_psi(n: int, x: float | np.ndarray, units: UnitSystem) -> float | np.ndarray:
    """ψ_n⁻(x)。"""
    if n < 0:
        raise PhysicsError(message=f"能级指标不能为负: {n}")
    value = psi_table(n, x, units)[n]
    return float(value) if np.ndim(value) == 0 else value


def theta_action(direction: Direction, n: int) -> tuple[float, int | None]:
    """θ⁻ψ_n=√n ψ_{n−1}（n=0 湮灭，目标为 None），θ⁺ψ_n=√(n+1) ψ_{n+1}。"""
    if n < 0:
        raise PhysicsError(message=f"能级指标不能为负: {n}")
    if direction == "down":
        if n == 0:
            return 0.0, None
        return math.sqrt(n), n - 1
    return math.sqrt(n + 1), n + 1


def zp_matrix_elements(m: int, n: int) -> tuple[float, complex]:
    """⟨m|z|n⟩ 与 ⟨m|p_z|n⟩，z=(θ⁺+θ⁻)/√2，p_z=i(θ⁺−θ⁻)/√2。"""
    z_elem = 0.0
    p_elem = 0.0
    if m == n + 1:
        z_elem = math.sqrt(n + 1) / math.sqrt(2.0)
        p_elem = math.sqrt(n + 1) / math.sqrt(2.0)
    elif m == n - 1:
        z_elem = math.sqrt(n) / math.sqrt(2.0)
        p_elem = -math.sqrt(n) / math.sqrt(2.0)
    return z_elem, complex(0.0, p_elem)


def quadrature_window(
    units: UnitSystem,
    r: float = 0.0,
    half_steps: int = 2000,
) -> np.ndarray:
    """
    求积网格 [x_c−L, x_c+L]，步长 h=L/half_steps。

    L = max(30/√ω, 4r + 20/√ω)，足以覆盖 |α|=r 的相干态包络。
    """
    scale = 1.0 / math.sqrt(units.omega)
    half_width = max(30.0 * scale, 4.0 * r + 20.0 * scale)
    return np.linspace(
        units.center - half_width,
        units.center + half_width,
        2 * half_steps + 1,
    )


def integrate(values: np.ndarray, xs: np.ndarray) -> float:
    """复合梯形公式。"""
    return float(trapezoid(values, xs))
