"""
相干态可观测量：概率密度、电流密度、平均能量、z/p_z 矩与不确定度乘积。

每个量都有两条独立路径：
- 主路径（核函数双重求和，或 f≡1 族的闭式级数）
- 校验路径（展开三角级数 / 分量向量上的算子作用 / 矩阵元）
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable

import numpy as np
from scipy.special import gammaln

from gcs.config import get_settings
from gcs.exceptions import OracleMismatchError
from gcs.physics.coherent import truncation_order
from gcs.physics.oscillator import integrate as integrate_values
from gcs.physics.oscillator import psi_table, quadrature_window, theta_action, zp_matrix_elements
from gcs.physics.spinors import (
    current_kernel_rows,
    energy_levels,
    normalization,
    spinor_tables,
    top_gate,
)
from gcs.physics.types import (
    CoherentSeries,
    DensityGrid,
    Direction,
    LayerKind,
    UnitSystem,
    ZPMoments,
)
from gcs.utils.concurrency import map_columns

logger = logging.getLogger(__name__)

MOMENT_TOL = 1e-8
SQRT2 = math.sqrt(2.0)

PairKernel = Callable[[int, int, slice], np.ndarray]


def default_grid(units: UnitSystem, r: float, half_steps: int | None = None) -> np.ndarray:
    """振子求积窗口，half_steps 缺省取配置 quadrature_half_steps。"""
    if half_steps is None:
        half_steps = get_settings().quadrature_half_steps
    return quadrature_window(units, r, half_steps)


def integrate(grid: DensityGrid) -> float:
    return integrate_values(grid.values, grid.xs)


def _meta(series: CoherentSeries, quantity: str) -> dict[str, object]:
    return {
        "kind": series.kind,
        "r": series.r,
        "theta": series.theta,
        "definition": series.definition,
        "quantity": quantity,
    }


def _compensated_pair_sum(weights: np.ndarray, kernel: PairKernel, columns: slice, width: int) -> np.ndarray:
    """
    Σ_{n,m} weights[n,m]·kernel(n,m)，n 外层升序、m 内层升序，Kahan 补偿。

    权重恰为零的项跳过。
    """
    total = np.zeros(width)
    compensation = np.zeros(width)
    size = weights.shape[0]
    for n in range(size):
        for m in range(size):
            weight = weights[n, m]
            if weight == 0.0:
                continue
            term = weight * kernel(n, m, columns) - compensation
            updated = total + term
            compensation = (updated - total) - term
            total = updated
    return total


def _pair_weights(series: CoherentSeries) -> np.ndarray:
    """M[n,m] = a_n·conj(a_m)。"""
    dense = series.dense()
    return np.outer(dense, dense.conj())


def probability_density(
    series: CoherentSeries,
    xs: np.ndarray,
    units: UnitSystem,
    threads: int | None = None,
) -> DensityGrid:
    """ρ(x;α) = Σ_{n,m} Re(a_m* a_n)·ρ_{n,m}(x)。"""
    xs = np.asarray(xs, dtype=float)
    top, bottom = spinor_tables(series.kind, psi_table(series.n_max, xs, units))
    weights = _pair_weights(series).real

    def kernel(n: int, m: int, cols: slice) -> np.ndarray:
        return top[n, cols] * top[m, cols] + bottom[n, cols] * bottom[m, cols]

    def task(cols: slice) -> np.ndarray:
        return _compensated_pair_sum(weights, kernel, cols, len(xs[cols]))

    values = map_columns(task, len(xs), threads)
    logger.debug("density evaluated: kind=%s n_max=%d points=%d", series.kind, series.n_max, len(xs))
    return DensityGrid(xs=xs, values=values, meta=_meta(series, "rho"))


def _canonical_weights(alpha: complex, n_max: int) -> np.ndarray:
    """e^{−r²/2} rⁿ/√(n!)，n=0..n_max。"""
    r = abs(alpha)
    if r == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    n = np.arange(n_max + 1)
    return np.exp(-0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1))


def probability_density_series(
    kind: LayerKind,
    alpha: complex,
    xs: np.ndarray,
    units: UnitSystem,
    n_max: int,
) -> DensityGrid:
    """
    f≡1 族的展开三角级数 e^{−r²}Σ r^{n+m}cos[(n−m)θ]/√(n!m!)·ρ_{n,m}。

    利用 cos[(n−m)θ] = cos nθ cos mθ + sin nθ sin mθ 化成平方和。
    """
    xs = np.asarray(xs, dtype=float)
    top, bottom = spinor_tables(kind, psi_table(n_max, xs, units))
    weights = _canonical_weights(alpha, n_max)
    phases = np.arange(n_max + 1) * np.angle(alpha)
    cos_w = weights * np.cos(phases)
    sin_w = weights * np.sin(phases)
    values = (cos_w @ top) ** 2 + (sin_w @ top) ** 2 + (cos_w @ bottom) ** 2 + (sin_w @ bottom) ** 2
    meta = {"kind": kind, "r": abs(alpha), "theta": float(np.angle(alpha)), "quantity": "rho_series"}
    return DensityGrid(xs=xs, values=values, meta=meta)


def _current_prefactors(kind: LayerKind, units: UnitSystem) -> tuple[float, float]:
    """(Jx, Jy) 前置因子：单层 (1, 1)，双层 (√ω, −√ω)。"""
    if kind == "monolayer":
        return 1.0, 1.0
    root = math.sqrt(units.omega)
    return root, -root


def current_density(
    series: CoherentSeries,
    xs: np.ndarray,
    units: UnitSystem,
    threads: int | None = None,
) -> tuple[DensityGrid, DensityGrid]:
    """
    Jx = pref_x·Σ Im(a_m* a_n)·j⁻_{n,m}，Jy = pref_y·Σ Re(a_m* a_n)·j⁺_{n,m}。
    """
    xs = np.asarray(xs, dtype=float)
    psi = psi_table(series.n_max, xs, units)
    pairs = _pair_weights(series)
    pref_x, pref_y = _current_prefactors(series.kind, units)

    def component(sign: int, weights: np.ndarray) -> np.ndarray:
        def kernel(n: int, m: int, cols: slice) -> np.ndarray:
            return current_kernel_rows(series.kind, sign, n, m, psi[:, cols])

        def task(cols: slice) -> np.ndarray:
            return _compensated_pair_sum(weights, kernel, cols, len(xs[cols]))

        return map_columns(task, len(xs), threads)

    jx = pref_x * component(-1, pairs.imag)
    jy = pref_y * component(1, pairs.real)
    return (
        DensityGrid(xs=xs, values=jx, meta=_meta(series, "jx")),
        DensityGrid(xs=xs, values=jy, meta=_meta(series, "jy")),
    )


def _component_vectors(series: CoherentSeries) -> tuple[np.ndarray, np.ndarray]:
    """旋量上/下分量在 ψ⁻ 基上的展开系数 (u, v)，长度 N+1。"""
    dense = series.dense()
    shift = 1 if series.kind == "monolayer" else 2
    u = np.zeros_like(dense)
    v = np.zeros_like(dense)
    for n, a_n in enumerate(dense):
        c_n = normalization(series.kind, n)
        v[n] = c_n * a_n
        if top_gate(series.kind, n):
            u[n - shift] += c_n * a_n
    return u, v


def _theta_apply(direction: Direction, coefficients: np.ndarray) -> np.ndarray:
    """θ± 作用在 ψ⁻ 展开系数上，结果长度 N+2。"""
    out = np.zeros(len(coefficients) + 1, dtype=complex)
    for n, value in enumerate(coefficients):
        coefficient, target = theta_action(direction, n)
        if target is not None:
            out[target] += coefficient * value
    return out


def current_density_oracle(
    series: CoherentSeries,
    xs: np.ndarray,
    units: UnitSystem,
) -> tuple[DensityGrid, DensityGrid]:
    """
    算子层面的电流：由分量函数 U、V 直接组装。

    单层 Ψ=(U, iV)：Jx=−2Im(U*V)，Jy=2Re(U*V)
    双层 Ψ=(U, V)：Jx=√ω·Im(U*θ⁻V − V*θ⁺U)，Jy=−√ω·Re(U*θ⁻V + V*θ⁺U)
    """
    xs = np.asarray(xs, dtype=float)
    u, v = _component_vectors(series)
    psi = psi_table(series.n_max + 1, xs, units)
    u_x = np.append(u, 0.0) @ psi
    v_x = np.append(v, 0.0) @ psi
    if series.kind == "monolayer":
        product = u_x.conj() * v_x
        jx = -2.0 * product.imag
        jy = 2.0 * product.real
    else:
        lowered_v = _theta_apply("down", v) @ psi
        raised_u = _theta_apply("up", u) @ psi
        root = math.sqrt(units.omega)
        jx = root * (u_x.conj() * lowered_v - v_x.conj() * raised_u).imag
        jy = -root * (u_x.conj() * lowered_v + v_x.conj() * raised_u).real
    return (
        DensityGrid(xs=xs, values=jx, meta=_meta(series, "jx_oracle")),
        DensityGrid(xs=xs, values=jy, meta=_meta(series, "jy_oracle")),
    )


def _closed_form_terms(r: float) -> tuple[np.ndarray, float]:
    """闭式级数的求和指标 0..K 与 log r。"""
    n_terms = truncation_order(r, 1e-17) + 8
    log_r = math.log(r) if r > 0 else -math.inf
    return np.arange(n_terms + 1, dtype=float), log_r


def _fsum_exp(log_terms: np.ndarray) -> float:
    return math.fsum(np.exp(log_terms))


def mean_energy_oracle(series: CoherentSeries, units: UnitSystem) -> float:
    """Σ|a_n|²E_n。"""
    levels = energy_levels(series.kind, series.n_max, units)
    return math.fsum(series.probabilities() * levels)


def _mean_energy_closed_form(kind: LayerKind, r: float, units: UnitSystem) -> float:
    n, log_r = _closed_form_terms(r)
    if r == 0.0:
        return 0.0
    if kind == "monolayer":
        logs = -r * r + (2 * n + 2) * log_r - gammaln(n + 1) - 0.5 * np.log(n + 1)
        return units.branch * math.sqrt(units.omega) * _fsum_exp(logs)
    logs = -r * r + (2 * n + 4) * log_r - gammaln(n + 1) - 0.5 * np.log((n + 1) * (n + 2))
    return units.branch * 0.5 * units.omega * _fsum_exp(logs)


def mean_energy(series: CoherentSeries, units: UnitSystem) -> float:
    """f≡1 族用闭式级数，其他情形退回 Σ|a_n|²E_n。"""
    if series.canonical:
        return _mean_energy_closed_form(series.kind, series.r, units)
    return mean_energy_oracle(series, units)


def _zp_closed_form(kind: LayerKind, alpha: complex, r: float) -> ZPMoments:
    n, log_r = _closed_form_terms(r)
    decay = math.exp(-r * r)
    re_alpha2 = (alpha * alpha).real
    if kind == "monolayer":
        first = 1.0 + decay * (SQRT2 - 1.0) + _fsum_exp(
            -r * r + (2 * n + 2) * log_r - 0.5 * (gammaln(n + 1) + gammaln(n + 3))
        )
        second = 1.0 + decay * (SQRT2 - 1.0) + _fsum_exp(
            -r * r + 0.5 * np.log(n + 2) + (2 * n + 2) * log_r - 0.5 * (gammaln(n + 1) + gammaln(n + 4))
        )
        base = decay + 2.0 * r * r
    else:
        first = 1.0 + decay * (1.0 + (SQRT2 - 1.0) * r * r) + _fsum_exp(
            -r * r + 0.5 * np.log(n + 1) + (2 * n + 4) * log_r - 0.5 * (gammaln(n + 3) + gammaln(n + 4))
        )
        second = 1.0 + decay * (SQRT2 - 1.0) * (1.0 + r * r) + _fsum_exp(
            -r * r + (2 * n + 4) * log_r - 0.5 * (gammaln(n + 1) + gammaln(n + 5))
        )
        base = 2.0 * decay * (r * r + 1.0) + 2.0 * r * r - 1.0
    return ZPMoments(
        mean_z=alpha.real / SQRT2 * first,
        mean_z2=0.5 * (base + re_alpha2 * second),
        mean_p=alpha.imag / SQRT2 * first,
        mean_p2=0.5 * (base - re_alpha2 * second),
    )


def _zp_operators(size: int) -> tuple[np.ndarray, np.ndarray]:
    """z、p_z 在 ψ⁻ 基上的矩阵，形状 (size+1, size)。"""
    z_op = np.zeros((size + 1, size))
    p_op = np.zeros((size + 1, size), dtype=complex)
    for n in range(size):
        for m in (n - 1, n + 1):
            if m < 0:
                continue
            z_op[m, n], p_op[m, n] = zp_matrix_elements(m, n)
    return z_op, p_op


def zp_moments_oracle(series: CoherentSeries) -> ZPMoments:
    """Σ_{m,n} a_m* a_n ⟨Ψ_m|O|Ψ_n⟩，z、p_z 对两个分量作用相同。"""
    u, v = _component_vectors(series)
    z_op, p_op = _zp_operators(len(u))
    totals = np.zeros(4)
    for component in (u, v):
        padded = np.append(component, 0.0)
        z_state = z_op @ component
        p_state = p_op @ component
        totals += [
            np.vdot(padded, z_state).real,
            np.vdot(z_state, z_state).real,
            np.vdot(padded, p_state).real,
            np.vdot(p_state, p_state).real,
        ]
    return ZPMoments(*map(float, totals))


def zp_moments(series: CoherentSeries) -> ZPMoments:
    """
    f≡1 族用闭式级数并与矩阵元校验对照；其他情形只走矩阵元路径。
    """
    oracle = zp_moments_oracle(series)
    if not series.canonical:
        return oracle
    closed = _zp_closed_form(series.kind, series.alpha, series.r)
    for name in ("mean_z", "mean_z2", "mean_p", "mean_p2"):
        closed_value = getattr(closed, name)
        oracle_value = getattr(oracle, name)
        if abs(closed_value - oracle_value) > MOMENT_TOL:
            logger.error(
                "moment mismatch: quantity=%s closed=%.17g oracle=%.17g",
                name,
                closed_value,
                oracle_value,
            )
            raise OracleMismatchError(
                message=f"{name} 闭式级数与矩阵元结果不一致",
                quantity=name,
                closed_form=closed_value,
                oracle=oracle_value,
            )
    return closed


def uncertainty_product(series: CoherentSeries) -> float:
    """ΔzΔp_z（以 ħ 为单位）。"""
    moments = zp_moments(series)
    return moments.delta_z * moments.delta_p
