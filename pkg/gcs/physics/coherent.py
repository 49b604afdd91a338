"""
相干态系数级数的构造：Barut–Girardello、Gilmore–Perelomov、最小不确定度。

系数模长用比值递推 |a_{n+1}|/|a_n| 在对数空间累积后归一化，
相位统一由 cmath.rect(|a_n|, nθ) 给出，保证 θ→−θ 时系数精确共轭。
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable
from dataclasses import replace

import numpy as np
from scipy.special import gammaln

from gcs.exceptions import DivergenceError, InvalidLadderError, NotHWAlgebraError
from gcs.models.schemas import ComplexValue, SeriesDocument
from gcs.physics.ladder import (
    ROOT_EPS,
    LadderSpec,
    WeightMap,
    apply_down,
    apply_up,
    commutator_diagonal,
    extremal_indices,
    hw_f_sequence,
    is_oscillator,
)
from gcs.physics.types import (
    CoherentSeries,
    Definition,
    LayerKind,
    QuadratureSpread,
    Truncation,
)

logger = logging.getLogger(__name__)

MIN_ORDER = 32
DIVERGENCE_STREAK = 50
MAX_TERMS = 20000
HW_TOL = 1e-10
# 截断误差界不低于双精度舍入水平
ROUNDING_FLOOR = np.finfo(float).eps

# 比值递推因子：b_{n+1} = b_n·α·factor(n)，n 为相对 base_index 的偏移
RatioFactor = Callable[[int], float]


def generalized_factorial(f: WeightMap, k: int) -> float:
    """[f(k)]! = f(1)···f(k)，k=0 时为 1。"""
    if k < 0:
        raise InvalidLadderError(message=f"k 不能为负: {k}", reason="index", index=k)
    return math.prod(f(j) for j in range(1, k + 1))


def _log_poisson(lam: float, n: int) -> float:
    if lam == 0.0:
        return 0.0 if n == 0 else -math.inf
    return -lam + n * math.log(lam) - float(gammaln(n + 1))


def _poisson_tail_bound(lam: float, n_max: int) -> float:
    """Σ_{n>N} e^{−λ}λⁿ/n! 的几何优界 t_{N+1}/(1 − λ/(N+2))；λ/(N+2) ≥ 1 时返回 inf。"""
    ratio = lam / (n_max + 2)
    if ratio >= 1.0:
        return math.inf
    return math.exp(_log_poisson(lam, n_max + 1)) / (1.0 - ratio)


def truncation_order(r: float, tol: float) -> int:
    """Poisson 尾部 Σ_{n>N} r^{2n}e^{−r²}/n! < tol 的最小 N（不小于 32）。"""
    if r < 0 or not 0 < tol < 1:
        raise InvalidLadderError(message=f"r ≥ 0 且 0 < tol < 1: r={r} tol={tol}", reason="args")
    lam = r * r
    n_max = MIN_ORDER
    while _poisson_tail_bound(lam, n_max) >= tol:
        n_max += 1
    return n_max


def _build_series(
    *,
    kind: LayerKind,
    alpha: complex,
    definition: Definition,
    base_index: int,
    factor: RatioFactor,
    tol: float,
    radius: float | None = None,
    fixed_order: int | None = None,
    fixed_tail: float = 0.0,
    canonical: bool = False,
) -> CoherentSeries:
    """
    由比值因子构造归一化级数。

    fixed_order 给定时直接截断到该（相对）阶数；否则在 ≥32 项后，
    当几何优界 w_{N+1}/(1−ρ²) 小于 tol·Σw 时停止。
    factor 恰为零（下一个根）时级数自然终止。
    """
    r = abs(alpha) if radius is None else radius
    theta = cmath.phase(alpha)
    log_moduli = [0.0]
    signs = [1.0]
    log_total = 0.0
    tail = fixed_tail if fixed_order is not None else 0.0
    streak = 0
    prev_rho = 0.0
    n = 0
    while True:
        if fixed_order is not None and n >= fixed_order:
            break
        fac = factor(n)
        if abs(fac) < ROOT_EPS:
            break
        rho = r * abs(fac)
        log_next = log_moduli[-1] + math.log(rho) if rho > 0 else -math.inf

        streak = streak + 1 if (rho >= 1.0 and rho >= prev_rho) else 0
        if streak >= DIVERGENCE_STREAK or n >= MAX_TERMS:
            logger.warning("series divergence: r=%.6g terms=%d rho=%.6g", r, n + 1, rho)
            raise DivergenceError(
                message=f"|α|={r:.6g} 时相干态级数不收敛（比值检验失败）",
                alpha_abs=r,
                terms=n + 1,
            )

        if fixed_order is None and n >= MIN_ORDER and rho < 1.0:
            log_majorant = 2.0 * log_next - math.log1p(-rho * rho)
            if log_majorant < math.log(tol) + log_total:
                tail = math.exp(log_majorant - log_total)
                break

        log_moduli.append(log_next)
        signs.append(signs[-1] * math.copysign(1.0, fac))
        log_total = float(np.logaddexp(log_total, 2.0 * log_next))
        prev_rho = rho
        n += 1

    log_moduli_arr = np.array(log_moduli)
    moduli = np.exp(log_moduli_arr - log_moduli_arr.max())
    moduli /= math.sqrt(math.fsum(moduli * moduli))
    coefficients = np.array(
        [sign * cmath.rect(mod, offset * theta) for offset, (sign, mod) in enumerate(zip(signs, moduli))]
    )
    n_max = base_index + len(coefficients) - 1
    tail_bound = max(tail, (len(coefficients) + 1) * ROUNDING_FLOOR)
    return CoherentSeries(
        kind=kind,
        alpha=complex(alpha),
        definition=definition,
        base_index=base_index,
        coefficients=coefficients,
        truncation=Truncation(n_max=n_max, tail_bound=tail_bound),
        canonical=canonical,
        radius=r,
    )


def _canonical_order(spec: LadderSpec, r: float, tol: float) -> int | None:
    """振子族（f≡1、无根）直接用 Poisson 截断阶数。"""
    if spec.roots:
        return None
    n_max = truncation_order(r, tol)
    return n_max if is_oscillator(spec, n_max + 1) else None


def bgcs(
    spec: LadderSpec,
    kind: LayerKind,
    alpha: complex,
    tol: float = 1e-12,
    radius: float | None = None,
) -> CoherentSeries:
    """
    A⁻ 的本征态。

    f 有根时以最大根 m 为起点：a_n=0 (n<m)，a_{n+m} ∝ αⁿ/(√[p̂_n]!·[f̂(n)]!)。
    radius 给定时覆盖 |α|（同一半径的不同相位共享闭式结果）。
    """
    base = max(spec.roots) if spec.roots else 0

    def factor(n: int) -> float:
        index = base + n + 1
        return 1.0 / (math.sqrt(spec.p(index)) * spec.f(index))

    r = abs(alpha) if radius is None else radius
    order = _canonical_order(spec, r, tol)
    series = _build_series(
        kind=kind,
        alpha=alpha,
        radius=r,
        definition="BG",
        base_index=base,
        factor=factor,
        tol=tol,
        fixed_order=order,
        fixed_tail=_poisson_tail_bound(r**2, order) if order is not None else 0.0,
        canonical=order is not None,
    )
    logger.debug(
        "bgcs built: kind=%s r=%.6g base=%d n_max=%d tail=%.3g",
        kind,
        series.r,
        base,
        series.n_max,
        series.truncation.tail_bound,
    )
    return series


def _check_hw(spec: LadderSpec, n_max: int) -> None:
    expected = hw_f_sequence(spec.p, spec.q, n_max)
    for n in range(1, n_max + 1):
        deviation = abs(spec.f(n) - expected[n])
        if deviation > HW_TOL:
            raise NotHWAlgebraError(
                message=f"无根 GP 相干态要求 f 满足 Heisenberg-Weyl 递推，n={n} 处偏差 {deviation:.3g}",
                index=n,
                deviation=deviation,
            )


def gpcs(
    spec: LadderSpec,
    kind: LayerKind,
    alpha: complex,
    tol: float = 1e-12,
    extremal: int = 0,
    radius: float | None = None,
) -> CoherentSeries:
    """
    位移算子作用在极值态 Ψ_m 上（m ∈ {0} ∪ roots）。

    a_{m+n} ∝ αⁿ·√(q_m···q_{m+n−1})·f(m+1)···f(m+n)/n!，
    在下一个根之前自然截止；无根时要求 f 为 HW 序列。
    """
    if extremal not in extremal_indices(spec):
        raise InvalidLadderError(
            message=f"m={extremal} 不是极值态指标 {extremal_indices(spec)}",
            reason="not_extremal",
            index=extremal,
        )

    def factor(n: int) -> float:
        index = extremal + n
        return math.sqrt(spec.q(index)) * spec.f(index + 1) / (n + 1)

    r = abs(alpha) if radius is None else radius
    order = _canonical_order(spec, r, tol)
    series = _build_series(
        kind=kind,
        alpha=alpha,
        radius=r,
        definition="GP",
        base_index=extremal,
        factor=factor,
        tol=tol,
        fixed_order=order,
        fixed_tail=_poisson_tail_bound(r**2, order) if order is not None else 0.0,
        canonical=order is not None,
    )
    if not spec.roots:
        _check_hw(spec, series.n_max)
    logger.debug(
        "gpcs built: kind=%s r=%.6g extremal=%d n_max=%d",
        kind,
        series.r,
        extremal,
        series.n_max,
    )
    return series


def mucs(
    spec: LadderSpec,
    kind: LayerKind,
    alpha: complex,
    tol: float = 1e-12,
    radius: float | None = None,
) -> CoherentSeries:
    """λ=1 的最小不确定度相干态，与 BG 逐系数相同。"""
    return replace(bgcs(spec, kind, alpha, tol, radius=radius), definition="MU")


def build_series(
    definition: Definition,
    spec: LadderSpec,
    kind: LayerKind,
    alpha: complex,
    tol: float = 1e-12,
    extremal: int | None = None,
    radius: float | None = None,
) -> CoherentSeries:
    """按定义分派；extremal 只对 GP 有意义。"""
    if definition == "GP":
        return gpcs(spec, kind, alpha, tol, extremal=extremal or 0, radius=radius)
    if definition == "MU":
        return mucs(spec, kind, alpha, tol, radius=radius)
    return bgcs(spec, kind, alpha, tol, radius=radius)


def eigen_residual(spec: LadderSpec, series: CoherentSeries) -> float:
    """max_{n<N} |(A⁻a)_n − α a_n|；截断边界项不计入。"""
    dense = series.dense()
    lowered = apply_down(spec, dense)
    return float(np.max(np.abs(lowered[:-1] - series.alpha * dense[:-1]), initial=0.0))


def quadrature_uncertainty(spec: LadderSpec, series: CoherentSeries) -> QuadratureSpread:
    """
    Q=(A⁺+A⁻)/√2、P=i(A⁺−A⁻)/√2 的涨落，以及 ½|⟨[Q,P]⟩| = ½⟨[A⁻,A⁺]⟩。
    """
    dense = series.dense()
    extended = np.append(dense, 0.0)
    raised = apply_up(spec, dense)
    lowered = np.append(apply_down(spec, dense), 0.0)

    q_state = (raised + lowered) / math.sqrt(2.0)
    p_state = 1j * (raised - lowered) / math.sqrt(2.0)
    mean_q = np.vdot(extended, q_state).real
    mean_p = np.vdot(extended, p_state).real
    var_q = max(np.vdot(q_state, q_state).real - mean_q**2, 0.0)
    var_p = max(np.vdot(p_state, p_state).real - mean_p**2, 0.0)

    commutator = commutator_diagonal(spec, series.n_max)
    half = 0.5 * abs(math.fsum(series.probabilities() * commutator))
    return QuadratureSpread(delta_q=math.sqrt(var_q), delta_p=math.sqrt(var_p), half_commutator=half)


def series_to_document(series: CoherentSeries) -> SeriesDocument:
    return SeriesDocument(
        kind=series.kind,
        definition=series.definition,
        alpha=ComplexValue.of(series.alpha),
        base_index=series.base_index,
        coefficients=[ComplexValue.of(complex(c)) for c in series.coefficients],
        tail_bound=series.truncation.tail_bound,
        canonical=series.canonical,
    )


def series_from_document(document: SeriesDocument) -> CoherentSeries:
    coefficients = np.array([c.to_complex() for c in document.coefficients])
    return CoherentSeries(
        kind=document.kind,
        alpha=document.alpha.to_complex(),
        definition=document.definition,
        base_index=document.base_index,
        coefficients=coefficients,
        truncation=Truncation(
            n_max=document.base_index + len(coefficients) - 1,
            tail_bound=document.tail_bound,
        ),
        canonical=document.canonical,
    )
