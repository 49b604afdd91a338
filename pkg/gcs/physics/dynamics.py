"""
时间演化、量子保真度、准周期检测与双层能级线性化分析。

公开时间变量为无量纲 t₁=v_F√ω·t（单层）与 t₂=ħωt/2m*（双层）。
"""

from __future__ import annotations

import logging
import math
from dataclasses import replace

import numpy as np
from scipy.optimize import minimize_scalar

from gcs.physics.types import CoherentSeries, FidelityTrace, LayerKind, LinearizationReport
from gcs.utils.concurrency import map_columns

logger = logging.getLogger(__name__)

REFINE_TOL = 1e-8


def level_rate(kind: LayerKind, n: int) -> float:
    """h(n)：单层 √n，双层 √(n(n−1))。"""
    if kind == "monolayer":
        return math.sqrt(n)
    return math.sqrt(n * (n - 1)) if n >= 2 else 0.0


def approx_bilayer_level(n: int) -> float:
    """线性化双层能级（以 ħ²ω/2m* 为单位）：n≥2 取 n−1/2，零能双重态为 0。"""
    return n - 0.5 if n >= 2 else 0.0


def _rates(series: CoherentSeries) -> np.ndarray:
    return np.array([level_rate(series.kind, n) for n in range(series.n_max + 1)])


def evolve(series: CoherentSeries, t: float) -> CoherentSeries:
    """
    a_n → a_n·e^{−i h(n) t}。

    演化后不再是 α 的本征态，结果标记为非 canonical，矩量走矩阵元路径。
    """
    rates = _rates(series)[series.base_index :]
    return replace(series, coefficients=series.coefficients * np.exp(-1j * rates * t), canonical=False)


def fidelity(series: CoherentSeries, t: float) -> float:
    """
    F = |Σ|a_n|² e^{−ih(n)t}|² / (Σ|a_n|²)²。

    实部虚部分别 fsum，t=0 时恰为 1。
    """
    probabilities = series.probabilities()
    phases = _rates(series) * t
    norm = math.fsum(probabilities)
    real = math.fsum(probabilities * np.cos(phases))
    imag = math.fsum(probabilities * np.sin(phases))
    return (real * real + imag * imag) / (norm * norm)


def fidelity_double_sum(series: CoherentSeries, t: float) -> float:
    """Σ_{n,m} |a_n|²|a_m|² cos[(h(n)−h(m))t]，O(N²) 校验路径。"""
    probabilities = series.probabilities()
    rates = _rates(series)
    weights = np.outer(probabilities, probabilities)
    terms = weights * np.cos(np.subtract.outer(rates, rates) * t)
    return math.fsum(terms.ravel()) / math.fsum(probabilities) ** 2


def fidelity_envelope(r: float, t2: float) -> float:
    """e^{−4r² sin²(t₂/2)}。"""
    return math.exp(-4.0 * r * r * math.sin(0.5 * t2) ** 2)


def _linear_residual_vector(series: CoherentSeries, t: float, n_linear: int) -> np.ndarray:
    dense = series.dense()[:n_linear]
    n = np.arange(len(dense))
    exact = np.exp(-1j * _rates(series)[: len(dense)] * t)
    linear = np.exp(-1j * (n - 0.5) * t)
    return dense * (exact - linear)


def linear_residual(series: CoherentSeries, t: float, n_linear: int) -> float:
    """‖γ_α(t;N)‖：分量 a_n(e^{−i√(n(n−1))t} − e^{−i(n−1/2)t})，n<N。"""
    return float(np.linalg.norm(_linear_residual_vector(series, t, n_linear)))


def linearization_report(series: CoherentSeries, t: float, n_linear: int) -> LinearizationReport:
    """
    Ψ(t) = Ψ′(t) + γ(t;N) 分解下保真度的三项。

    Ψ′ 的系数为 a_n e^{−i(n−1/2)t}；交叉项 2Re(⟨Ψ′|Ψα⟩⟨Ψα|γ⟩)。
    """
    dense = series.dense()
    probabilities = series.probabilities()
    residual = _linear_residual_vector(series, t, n_linear)
    overlap_residual = np.vdot(dense[: len(residual)], residual)
    n = np.arange(len(dense))
    overlap_linear = complex(np.sum(probabilities * np.exp(1j * (n - 0.5) * t)))
    return LinearizationReport(
        t=t,
        n_linear=n_linear,
        envelope=fidelity_envelope(series.r, t),
        residual_norm=float(np.linalg.norm(residual)),
        residual_fidelity=abs(overlap_residual) ** 2,
        cross_term=2.0 * (overlap_linear * overlap_residual).real,
    )


def fidelity_trace(series: CoherentSeries, ts: np.ndarray, threads: int | None = None) -> np.ndarray:
    ts = np.asarray(ts, dtype=float)

    def task(cols: slice) -> np.ndarray:
        return np.array([fidelity(series, t) for t in ts[cols]])

    return map_columns(task, len(ts), threads)


def _refine_peak(series: CoherentSeries, left: float, centre: float, right: float) -> float:
    """黄金分割细化局部极大；括号不成立时退回采样点。"""
    try:
        result = minimize_scalar(
            lambda t: -fidelity(series, t),
            bracket=(left, centre, right),
            method="golden",
            tol=REFINE_TOL,
        )
    except ValueError:
        return centre
    if not left <= result.x <= right or -result.fun < fidelity(series, centre):
        return centre
    return float(result.x)


def quasiperiod_scan(
    series: CoherentSeries,
    t_max: float,
    samples: int,
    threshold: float = 0.8,
    threads: int | None = None,
) -> FidelityTrace:
    """[0, t_max] 均匀采样 F，取 F ≥ threshold 的内部局部极大并细化。"""
    ts = np.linspace(0.0, t_max, samples)
    values = fidelity_trace(series, ts, threads)
    quasiperiods = []
    for i in range(1, samples - 1):
        if values[i] > values[i - 1] and values[i] >= values[i + 1] and values[i] >= threshold:
            quasiperiods.append(_refine_peak(series, ts[i - 1], ts[i], ts[i + 1]))
    logger.info(
        "quasiperiod scan: kind=%s r=%.6g t_max=%.6g found=%d",
        series.kind,
        series.r,
        t_max,
        len(quasiperiods),
    )
    return FidelityTrace(ts=ts, values=values, quasiperiods=quasiperiods)
