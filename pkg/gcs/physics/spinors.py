"""
恒定场下的旋量本征态、能级，以及概率密度/电流密度的成对核函数。

约定：
- e^{iky} 平面波因子不存储（在所有可观测量中相消）
- 单层下分量的 i 只作为 bottom_has_i 标志，数值只存实部
- 核函数全部为实数
"""

from __future__ import annotations

import math

import numpy as np

from gcs.exceptions import PhysicsError
from gcs.physics.oscillator import psi_table
from gcs.physics.types import LayerKind, SpinorSample, UnitSystem

# 上分量相对下分量的指标平移：单层 ψ_{n−1}，双层 ψ_{n−2}
_SHIFT: dict[str, int] = {"monolayer": 1, "bilayer": 2}


def _check_kind(kind: LayerKind) -> None:
    if kind not in _SHIFT:
        raise PhysicsError(message=f"未知层类型: {kind}")


def top_gate(kind: LayerKind, n: int) -> int:
    """上分量门控：单层 1−δ_{n0}，双层 1−δ_{n0}−δ_{n1}。"""
    return 1 if n >= _SHIFT[kind] else 0


def normalization(kind: LayerKind, n: int) -> float:
    """c_n = 2^{−g_n/2}。"""
    return math.sqrt(0.5) if top_gate(kind, n) else 1.0


def eigenstate(kind: LayerKind, n: int, x: float, units: UnitSystem) -> SpinorSample:
    """Ψ_n(x) 的两个分量（去掉 e^{iky}）。"""
    _check_kind(kind)
    if n < 0:
        raise PhysicsError(message=f"能级指标不能为负: {n}")
    psi = psi_table(n, x, units)
    c_n = normalization(kind, n)
    top = c_n * float(psi[n - _SHIFT[kind]]) if top_gate(kind, n) else 0.0
    return SpinorSample(
        top=top,
        bottom=c_n * float(psi[n]),
        bottom_has_i=(kind == "monolayer"),
    )


def energy(kind: LayerKind, n: int, units: UnitSystem) -> float:
    """单层 ±√(nω)，双层 ±(ω/2)√(n(n−1))。"""
    _check_kind(kind)
    if n < 0:
        raise PhysicsError(message=f"能级指标不能为负: {n}")
    if kind == "monolayer":
        magnitude = math.sqrt(n * units.omega)
    else:
        magnitude = 0.5 * units.omega * math.sqrt(n * (n - 1)) if n >= 2 else 0.0
    return units.branch * magnitude


def energy_levels(kind: LayerKind, n_max: int, units: UnitSystem) -> np.ndarray:
    return np.array([energy(kind, n, units) for n in range(n_max + 1)])


def spinor_tables(
    kind: LayerKind,
    psi: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """
    由 ψ 表构造全部旋量分量表 (top, bottom)，形状同 psi。

    psi 的第 n 行是 ψ_n⁻ 在网格上的值。
    """
    _check_kind(kind)
    shift = _SHIFT[kind]
    top = np.zeros_like(psi)
    bottom = np.empty_like(psi)
    for n in range(psi.shape[0]):
        c_n = normalization(kind, n)
        bottom[n] = c_n * psi[n]
        if top_gate(kind, n):
            top[n] = c_n * psi[n - shift]
    return top, bottom


def rho_kernel(kind: LayerKind, n: int, m: int, x: float, units: UnitSystem) -> float:
    """ρ_{n,m}(x) = Ψ_m†Ψ_n，关于 n↔m 对称。"""
    _check_kind(kind)
    if n < 0 or m < 0:
        raise PhysicsError(message=f"能级指标不能为负: n={n} m={m}")
    top, bottom = spinor_tables(kind, psi_table(max(n, m), x, units))
    return float(top[n] * top[m] + bottom[n] * bottom[m])


def current_kernel_rows(
    kind: LayerKind,
    sign: int,
    n: int,
    m: int,
    psi: np.ndarray,
) -> np.ndarray | float:
    """
    电流核 j±_{n,m}（单层）或 𝔧±_{n,m}（双层），psi 为 ψ 表。

    单层: [g_n ψ_{n−1}ψ_m ± g_m ψ_n ψ_{m−1}] / √(2^{g_n+g_m})
    双层: [g_m √n ψ_{m−2}ψ_{n−1} ± g_n √(n−1) ψ_m ψ_{n−1}] / √(2^{g_n+g_m})
    """
    g_n = top_gate(kind, n)
    g_m = top_gate(kind, m)
    scale = normalization(kind, n) * normalization(kind, m)
    first = 0.0
    second = 0.0
    if kind == "monolayer":
        if g_n:
            first = psi[n - 1] * psi[m]
        if g_m:
            second = psi[n] * psi[m - 1]
    else:
        if g_m and n >= 1:
            first = math.sqrt(n) * psi[m - 2] * psi[n - 1]
        if g_n:
            second = math.sqrt(n - 1) * psi[m] * psi[n - 1]
    return scale * (first + sign * second)


def current_kernel(
    kind: LayerKind,
    sign: int,
    n: int,
    m: int,
    x: float,
    units: UnitSystem,
) -> float:
    """单点电流核；sign=+1 给 Jy 核，sign=−1 给 Jx 核。"""
    _check_kind(kind)
    if sign not in (1, -1):
        raise PhysicsError(message=f"sign 只能取 ±1: {sign}")
    if n < 0 or m < 0:
        raise PhysicsError(message=f"能级指标不能为负: n={n} m={m}")
    psi = psi_table(max(n, m), x, units)
    return float(current_kernel_rows(kind, sign, n, m, psi))
