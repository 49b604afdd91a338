"""
不变量检查套件：注册/工厂机制。

每个检查是一个无副作用函数 (CheckContext) -> CheckResult，
通过 register_check 注册，run_checks 按注册顺序执行全部或指定子集。
"""

from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from gcs.exceptions import AppError, CheckFailedError
from gcs.physics import coherent, dynamics, fields, ladder, observables
from gcs.physics.oscillator import eval_psi
from gcs.physics.types import LayerKind, UnitSystem

logger = logging.getLogger(__name__)

KINDS: tuple[LayerKind, ...] = ("monolayer", "bilayer")
EQUIVALENCE_RADII = (0.5, 1.0, 3.0, 5.0)
EQUIVALENCE_PHASES = (0.0, math.pi / 4)
SYMMETRY_RADII = (1.0, 3.0, 5.0)
CHECK_HALF_STEPS = 1000


@dataclass
class CheckContext:
    """检查参数：系数比较容差与物理单位。"""

    tol: float = 1e-12
    units: UnitSystem = field(default_factory=lambda: UnitSystem(omega=1.0, k=1.0))


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


CheckFunction = Callable[[CheckContext], CheckResult]

_registry: dict[str, CheckFunction] = {}


def register_check(name: str) -> Callable[[CheckFunction], CheckFunction]:
    """注册检查函数。"""

    def decorator(func: CheckFunction) -> CheckFunction:
        _registry[name] = func
        return func

    return decorator


def list_checks() -> list[str]:
    return list(_registry)


def get_check(name: str) -> CheckFunction:
    if name not in _registry:
        raise CheckFailedError(message=f"未知检查项: {name}", failed=[name])
    return _registry[name]


def run_checks(context: CheckContext, names: list[str] | None = None) -> list[CheckResult]:
    """执行检查；单项抛出的 AppError 记为失败，不中断其余检查。"""
    results = []
    for name in names or list_checks():
        check = get_check(name)
        try:
            result = check(context)
        except AppError as e:
            result = CheckResult(name=name, passed=False, detail=f"{type(e).__name__}: {e}")
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, "check finished: name=%s passed=%s detail=%s", name, result.passed, result.detail)
        results.append(result)
    return results


def raise_on_failure(results: list[CheckResult]) -> None:
    failed = [result.name for result in results if not result.passed]
    if failed:
        raise CheckFailedError(message=f"{len(failed)} 项检查失败: {', '.join(failed)}", failed=failed)


def _result(name: str, worst: float, bound: float) -> CheckResult:
    return CheckResult(name=name, passed=bool(worst <= bound), detail=f"worst={worst:.3g} bound={bound:.3g}")


@register_check("hw_recursion")
def check_hw_recursion(context: CheckContext) -> CheckResult:
    """振子序列的 HW 权函数恒为 1，且 γ_{n+1}−γ_n = 1。"""
    n_max = 500
    sequence = ladder.hw_f_sequence(lambda n: float(n), lambda n: float(n + 1), n_max)
    deviation = float(np.max(np.abs(sequence[1:] - 1.0)))
    spec = ladder.hw_ladder(lambda n: float(n), lambda n: float(n + 1), n_max + 1)
    commutator = ladder.commutator_diagonal(spec, n_max - 1)
    worst = max(deviation, float(np.max(np.abs(commutator - 1.0))))
    return _result("hw_recursion", worst, 1e-10)


@register_check("spectral_actions")
def check_spectral_actions(context: CheckContext) -> CheckResult:
    """原始分段作用与统一作用系数一致。"""
    spec = ladder.oscillator_ladder(f=lambda n: 1.0 + 0.1 * n)
    worst = 0.0
    for kind in KINDS:
        for direction in ("down", "up"):
            for n in range(12):
                raw, _ = ladder.spectral_action(kind, spec, direction, n)
                unified, _ = ladder.action_coefficient(spec, direction, n)
                worst = max(worst, abs(raw - unified))
    return _result("spectral_actions", worst, 1e-13)


@register_check("definition_equivalence")
def check_definition_equivalence(context: CheckContext) -> CheckResult:
    """f≡1 时 BG = GP = MU（逐系数）。"""
    spec = ladder.oscillator_ladder()
    worst = 0.0
    for kind in KINDS:
        for r in EQUIVALENCE_RADII:
            for theta in EQUIVALENCE_PHASES:
                alpha = cmath.rect(r, theta)
                bg = coherent.bgcs(spec, kind, alpha)
                gp = coherent.gpcs(spec, kind, alpha)
                mu = coherent.mucs(spec, kind, alpha)
                worst = max(
                    worst,
                    float(np.max(np.abs(bg.dense() - gp.dense()))),
                    float(np.max(np.abs(bg.dense() - mu.dense()))),
                )
    return _result("definition_equivalence", worst, context.tol)


@register_check("eigenvector")
def check_eigenvector(context: CheckContext) -> CheckResult:
    """A⁻ 作用在 BG 系数上给出 α 倍系数（误差 < 10·tail_bound）。"""
    spec = ladder.oscillator_ladder()
    worst_ratio = 0.0
    for kind in KINDS:
        for r in EQUIVALENCE_RADII:
            for theta in EQUIVALENCE_PHASES:
                series = coherent.bgcs(spec, kind, cmath.rect(r, theta), radius=r)
                residual = coherent.eigen_residual(spec, series)
                worst_ratio = max(worst_ratio, residual / series.truncation.tail_bound)
    return _result("eigenvector", worst_ratio, 10.0)


@register_check("density_current_symmetry")
def check_density_current_symmetry(context: CheckContext) -> CheckResult:
    """∫ρ=1；ρ 在 θ→−θ 下不变；Jx 为奇、Jy 为偶。"""
    spec = ladder.oscillator_ladder()
    units = context.units
    worst_norm = 0.0
    worst_sym = 0.0
    for kind in KINDS:
        for r in SYMMETRY_RADII:
            xs = observables.default_grid(units, r, CHECK_HALF_STEPS)
            plus = coherent.bgcs(spec, kind, cmath.rect(r, 1.0), radius=r)
            minus = coherent.bgcs(spec, kind, cmath.rect(r, -1.0), radius=r)
            rho_plus = observables.probability_density(plus, xs, units)
            rho_minus = observables.probability_density(minus, xs, units)
            jx_plus, jy_plus = observables.current_density(plus, xs, units)
            jx_minus, jy_minus = observables.current_density(minus, xs, units)
            worst_norm = max(worst_norm, abs(observables.integrate(rho_plus) - 1.0))
            worst_sym = max(
                worst_sym,
                float(np.max(np.abs(rho_plus.values - rho_minus.values))),
                float(np.max(np.abs(jx_plus.values + jx_minus.values))),
                float(np.max(np.abs(jy_plus.values - jy_minus.values))),
            )
    passed = worst_norm <= 1e-6 and worst_sym <= 1e-12
    return CheckResult(
        name="density_current_symmetry",
        passed=passed,
        detail=f"norm={worst_norm:.3g} symmetry={worst_sym:.3g}",
    )


@register_check("current_oracle")
def check_current_oracle(context: CheckContext) -> CheckResult:
    """核函数电流与算子层面电流一致。"""
    spec = ladder.oscillator_ladder()
    units = context.units
    worst = 0.0
    for kind in KINDS:
        series = coherent.bgcs(spec, kind, complex(1.5, 0.8))
        xs = observables.default_grid(units, series.r, 200)
        kernel = observables.current_density(series, xs, units)
        oracle = observables.current_density_oracle(series, xs, units)
        for a, b in zip(kernel, oracle):
            worst = max(worst, float(np.max(np.abs(a.values - b.values))))
    return _result("current_oracle", worst, 1e-10)


@register_check("moments")
def check_moments(context: CheckContext) -> CheckResult:
    """闭式矩与矩阵元一致（不一致时 zp_moments 抛错），ΔzΔp ≥ 1/2。"""
    spec = ladder.oscillator_ladder()
    lowest = math.inf
    at_origin = 0.0
    at_five = 0.0
    for kind in KINDS:
        for r in (0.0, 0.5, 1.0, 3.0, 5.0):
            for theta in EQUIVALENCE_PHASES:
                series = coherent.bgcs(spec, kind, cmath.rect(r, theta), radius=r)
                product = observables.uncertainty_product(series)
                lowest = min(lowest, product)
                if r == 0.0:
                    at_origin = max(at_origin, abs(product - 0.5))
                if r == 5.0:
                    at_five = max(at_five, abs(product - 0.5))
    passed = lowest >= 0.5 - 1e-10 and at_origin <= 1e-10 and at_five <= 2e-2
    return CheckResult(
        name="moments",
        passed=passed,
        detail=f"min_product={lowest:.12g} origin={at_origin:.3g} r5={at_five:.3g}",
    )


@register_check("mean_energy")
def check_mean_energy(context: CheckContext) -> CheckResult:
    """闭式平均能量等于 Σ|a_n|²E_n，且与 θ 无关。"""
    spec = ladder.oscillator_ladder()
    units = context.units
    worst_oracle = 0.0
    worst_phase = 0.0
    for kind in KINDS:
        for r in (0.0, 1.0, 3.0, 5.0):
            values = []
            for theta in (0.0, math.pi / 3, math.pi):
                series = coherent.bgcs(spec, kind, cmath.rect(r, theta), radius=r)
                closed = observables.mean_energy(series, units)
                worst_oracle = max(worst_oracle, abs(closed - observables.mean_energy_oracle(series, units)))
                values.append(closed)
            worst_phase = max(worst_phase, max(values) - min(values))
    passed = worst_oracle <= 1e-10 and worst_phase <= 1e-14
    return CheckResult(
        name="mean_energy",
        passed=passed,
        detail=f"oracle={worst_oracle:.3g} phase={worst_phase:.3g}",
    )


@register_check("fidelity")
def check_fidelity(context: CheckContext) -> CheckResult:
    """F(0)=1；单求和等于双求和；双层 r=5 在 2π 附近准复现。"""
    spec = ladder.oscillator_ladder()
    worst_sum = 0.0
    exact_start = True
    for kind in KINDS:
        series = coherent.bgcs(spec, kind, complex(3.0, 1.0))
        exact_start = exact_start and dynamics.fidelity(series, 0.0) == 1.0
        for t in np.linspace(0.0, 20.0, 41):
            worst_sum = max(worst_sum, abs(dynamics.fidelity(series, t) - dynamics.fidelity_double_sum(series, t)))
    bilayer = coherent.bgcs(spec, "bilayer", 5.0)
    trace = dynamics.quasiperiod_scan(bilayer, 25.0, 2001, 0.8)
    near = [t for t in trace.quasiperiods if abs(t - 2 * math.pi) <= 0.1]
    window = np.linspace(5.8, 6.5, 71)
    envelope_gap = max(abs(dynamics.fidelity(bilayer, t) - dynamics.fidelity_envelope(5.0, t)) for t in window)
    passed = exact_start and worst_sum <= 1e-10 and bool(near) and envelope_gap <= 0.05
    return CheckResult(
        name="fidelity",
        passed=passed,
        detail=f"start_exact={exact_start} double_sum={worst_sum:.3g} "
        f"revival={near[0] if near else None} envelope_gap={envelope_gap:.3g}",
    )


@register_check("susy_structure")
def check_susy_structure(context: CheckContext) -> CheckResult:
    """有限差分残差的收敛阶 ≥ 1.8（哈密顿量与一阶缠绕算子），n ≤ 10。"""
    units = context.units
    profile = fields.constant_profile(units.omega)
    xs = np.linspace(units.center - 6.0, units.center + 6.0, 241)
    steps = (1e-2, 5e-3, 2.5e-3)

    def potential(x: np.ndarray) -> np.ndarray:
        return fields.monolayer_fields(profile, x, units.k).v_minus

    worst_order = math.inf
    for n in range(11):
        def psi(x: np.ndarray, n: int = n) -> np.ndarray:
            return eval_psi(n, x, units)

        energy = n * units.omega
        residuals = [
            float(np.max(np.abs(fields.hamiltonian_residual(potential, psi, xs, energy, h)))) for h in steps
        ]
        worst_order = min(worst_order, *fields.observed_order(residuals))
        if n >= 1:
            target = math.sqrt(n * units.omega) * eval_psi(n - 1, xs, units)
            errors = [
                float(np.max(np.abs(fields.first_order_intertwiner(profile, psi, xs, units.k, h) - target)))
                for h in steps
            ]
            worst_order = min(worst_order, *fields.observed_order(errors))
    return CheckResult(name="susy_structure", passed=worst_order >= 1.8, detail=f"min_order={worst_order:.3f}")


@register_check("root_cases")
def check_root_cases(context: CheckContext) -> CheckResult:
    """f 在 {2,5} 有根：BG 从 n=5 起，GP(m=2) 支撑于 {2,3,4} 且归一。"""
    spec = ladder.oscillator_ladder(f=lambda n: 0.0 if n in (2, 5) else 1.0, roots=(2, 5))
    bg = coherent.bgcs(spec, "monolayer", complex(1.0, 0.5))
    gp = coherent.gpcs(spec, "monolayer", complex(1.0, 0.5), extremal=2)
    support = [n for n, value in enumerate(gp.dense()) if value != 0]
    bg_start = min(n for n, value in enumerate(bg.dense()) if value != 0)
    passed = bg_start == 5 and support == [2, 3, 4] and abs(gp.norm_squared() - 1.0) <= 1e-12
    return CheckResult(name="root_cases", passed=passed, detail=f"bg_start={bg_start} gp_support={support}")
