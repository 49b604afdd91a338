"""
广义阶梯算子框架。

A𝒢∓ 以能量本征基上的作用系数实现：
    A⁻Ψ_n = √p_n f(n) Ψ_{n−1}，A⁺Ψ_n = √q_n f(n+1) Ψ_{n+1}
单层/双层的 2·{…} 前置因子由 case_map_f 吸收，spectral_action 给出未吸收前的原始形式。
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np

from gcs.exceptions import InvalidLadderError
from gcs.physics.types import Direction, LayerKind

logger = logging.getLogger(__name__)

SequenceMap = Callable[[int], float]
WeightMap = Callable[[int], float]

ROOT_EPS = 1e-14
DEFAULT_SCAN = 512

# 原始作用的分段前置因子：{n: 因子}，缺省为 1
_DOWN_PREFACTOR: dict[str, dict[int, float]] = {
    "monolayer": {0: 0.0, 1: 1.0 / math.sqrt(2.0)},
    "bilayer": {0: 0.0, 1: 0.5, 2: 1.0 / math.sqrt(2.0)},
}
_UP_PREFACTOR: dict[str, dict[int, float]] = {
    "monolayer": {0: 1.0 / math.sqrt(2.0)},
    "bilayer": {0: 0.5, 1: 1.0 / math.sqrt(2.0)},
}
# f₁/f₂ 的 case map：{n: 因子}，n 超出表时取 tail
_CASE_MAP: dict[str, tuple[dict[int, float], float]] = {
    "monolayer": ({1: 1.0 / math.sqrt(2.0)}, 0.5),
    "bilayer": ({1: 1.0, 2: 1.0 / math.sqrt(2.0)}, 0.5),
}


def unit_weight(n: int) -> float:
    return 1.0


@dataclass(frozen=True)
class LadderSpec:
    """
    序列 p_n、q_n 与权函数 f(n)。

    构造时检查 p_0=0、q_n>0、p_n≥0，并在 1..scan_limit 上
    核对 |f(n)|<1e−14 的位置与声明的 roots 一致。
    """

    p: SequenceMap
    q: SequenceMap
    f: WeightMap = unit_weight
    roots: tuple[int, ...] = ()
    name: str = "custom"
    scan_limit: int = DEFAULT_SCAN

    def __post_init__(self) -> None:
        roots = tuple(sorted({int(m) for m in self.roots}))
        object.__setattr__(self, "roots", roots)
        if roots and roots[0] < 1:
            raise InvalidLadderError(message="根必须 ≥ 1", reason="root_below_one", index=roots[0])
        if self.p(0) != 0:
            raise InvalidLadderError(message="p_0 必须为 0", reason="p0_nonzero", index=0)

        limit = max(self.scan_limit, roots[-1] if roots else 0)
        for n in range(limit + 1):
            if not self.q(n) > 0:
                raise InvalidLadderError(message=f"q_{n} 必须为正", reason="q_nonpositive", index=n)
            if self.p(n) < 0:
                raise InvalidLadderError(message=f"p_{n} 不能为负", reason="p_negative", index=n)
        declared = set(roots)
        for n in range(1, limit + 1):
            if (abs(self.f(n)) < ROOT_EPS) != (n in declared):
                raise InvalidLadderError(
                    message=f"f 的零点与声明的根表在 n={n} 处不一致",
                    reason="roots_mismatch",
                    index=n,
                )


def oscillator_ladder(f: WeightMap = unit_weight, roots: tuple[int, ...] = ()) -> LadderSpec:
    """谐振子序列 p_n=n、q_n=n+1。"""
    return LadderSpec(
        p=lambda n: float(n),
        q=lambda n: float(n + 1),
        f=f,
        roots=roots,
        name="oscillator",
    )


def table_weight(table: Mapping[int, float]) -> WeightMap:
    """
    查表权函数；n 超过表尾时取最后一个值。

    表必须从 0 或 1 开始连续。
    """
    if not table:
        raise InvalidLadderError(message="权函数表为空", reason="empty_table")
    keys = sorted(table)
    if keys[0] not in (0, 1) or keys != list(range(keys[0], keys[-1] + 1)):
        raise InvalidLadderError(
            message="权函数表的 n 必须从 0 或 1 开始连续",
            reason="table_gap",
            index=keys[0],
        )
    values = {n: float(table[n]) for n in keys}
    last = values[keys[-1]]
    first = keys[0]

    def weight(n: int) -> float:
        if n < first:
            return values[first]
        return values.get(n, last)

    return weight


def detect_roots(f: WeightMap, limit: int = DEFAULT_SCAN) -> tuple[int, ...]:
    """1..limit 上 |f(n)|<1e−14 的位置。"""
    return tuple(n for n in range(1, limit + 1) if abs(f(n)) < ROOT_EPS)


def is_oscillator(spec: LadderSpec, n_max: int, tol: float = 1e-12) -> bool:
    """p_n=n、q_n=n+1 且 f≡1（0..n_max 上，容差 tol）。"""
    for n in range(n_max + 1):
        if spec.p(n) != n or spec.q(n) != n + 1:
            return False
        if n >= 1 and abs(spec.f(n) - 1.0) > tol:
            return False
    return True


def case_map_f(kind: LayerKind, f: WeightMap, n: int) -> float:
    """f₁(𝓔_n)（单层）或 f₂(𝓔_n)（双层）。"""
    if n < 1:
        raise InvalidLadderError(message=f"case map 要求 n ≥ 1: {n}", reason="index", index=n)
    head, tail = _CASE_MAP[kind]
    return f(n) * head.get(n, tail)


def action_coefficient(
    spec: LadderSpec,
    direction: Direction,
    n: int,
) -> tuple[float, int | None]:
    """统一作用系数；down 在 n=0 处返回 (0, None)。"""
    if n < 0:
        raise InvalidLadderError(message=f"能级指标不能为负: {n}", reason="index", index=n)
    if direction == "down":
        if n == 0:
            return 0.0, None
        return math.sqrt(spec.p(n)) * spec.f(n), n - 1
    return math.sqrt(spec.q(n)) * spec.f(n + 1), n + 1


def spectral_action(
    kind: LayerKind,
    spec: LadderSpec,
    direction: Direction,
    n: int,
) -> tuple[float, int | None]:
    """原始作用 2√p_n f𝒢(𝓔_n)·{…}（down）或 2√q_n f𝒢(𝓔_{n+1})·{…}（up）。"""
    if n < 0:
        raise InvalidLadderError(message=f"能级指标不能为负: {n}", reason="index", index=n)
    if direction == "down":
        prefactor = _DOWN_PREFACTOR[kind].get(n, 1.0)
        if prefactor == 0.0:
            return 0.0, None
        return 2.0 * math.sqrt(spec.p(n)) * case_map_f(kind, spec.f, n) * prefactor, n - 1
    prefactor = _UP_PREFACTOR[kind].get(n, 1.0)
    return 2.0 * math.sqrt(spec.q(n)) * case_map_f(kind, spec.f, n + 1) * prefactor, n + 1


def gamma_n(spec: LadderSpec, n: int) -> float:
    """γ_n = √(q_{n−1} p_n)·f(n)²，A⁺A⁻ 在 Ψ_n 上的本征值。"""
    if n < 1:
        raise InvalidLadderError(message=f"γ_n 要求 n ≥ 1: {n}", reason="index", index=n)
    return math.sqrt(spec.q(n - 1) * spec.p(n)) * spec.f(n) ** 2


def commutator_diagonal(spec: LadderSpec, n_max: int) -> np.ndarray:
    """[A⁻, A⁺] 的对角元 γ_{n+1} − γ_n，n=0..n_max（γ₀=0）。"""
    gammas = [0.0] + [gamma_n(spec, n) for n in range(1, n_max + 2)]
    return np.diff(np.array(gammas))


def hw_f_sequence(p: SequenceMap, q: SequenceMap, n_max: int) -> np.ndarray:
    """
    使 [A⁻, A⁺]=1 成立的权函数，返回 f(0..n_max)，f(0) 不使用（置 0）。

    f(1) = (q₀p₁)^{−1/4}
    f(n+1) = √((1 + √(q_{n−1}p_n) f(n)²) / √(q_n p_{n+1}))
    """
    if n_max < 1:
        raise InvalidLadderError(message=f"n_max 必须 ≥ 1: {n_max}", reason="index", index=n_max)
    out = np.zeros(n_max + 1)
    for n in range(n_max):
        product = q(n) * p(n + 1)
        if not product > 0:
            raise InvalidLadderError(
                message=f"q_{n}·p_{n + 1} 必须为正",
                reason="hw_nonpositive",
                index=n,
            )
        if n == 0:
            out[1] = product**-0.25
        else:
            gamma = math.sqrt(q(n - 1) * p(n)) * out[n] ** 2
            out[n + 1] = math.sqrt((1.0 + gamma) / math.sqrt(product))
    logger.debug("hw sequence: n_max=%d f_last=%.17g", n_max, out[n_max])
    return out


def hw_ladder(p: SequenceMap, q: SequenceMap, n_max: int = DEFAULT_SCAN) -> LadderSpec:
    """以 hw_f_sequence 为权函数的阶梯（表尾之后取最后一个值）。"""
    sequence = hw_f_sequence(p, q, n_max)
    weight = table_weight({n: float(sequence[n]) for n in range(1, n_max + 1)})
    return LadderSpec(p=p, q=q, f=weight, roots=detect_roots(weight, n_max), name="hw", scan_limit=n_max)


def down_coefficients(spec: LadderSpec, n_max: int) -> np.ndarray:
    """A⁻ 系数 c_n（n=0..n_max），c_0=0。"""
    return np.array([action_coefficient(spec, "down", n)[0] for n in range(n_max + 1)])


def up_coefficients(spec: LadderSpec, n_max: int) -> np.ndarray:
    """A⁺ 系数 (n=0..n_max)。"""
    return np.array([action_coefficient(spec, "up", n)[0] for n in range(n_max + 1)])


def apply_down(spec: LadderSpec, coefficients: np.ndarray) -> np.ndarray:
    """A⁻ 作用在稠密系数向量（0..N）上，结果同长度（末位补零）。"""
    coefficients = np.asarray(coefficients, dtype=complex)
    n_max = len(coefficients) - 1
    out = np.zeros_like(coefficients)
    out[:-1] = down_coefficients(spec, n_max)[1:] * coefficients[1:]
    return out


def apply_up(spec: LadderSpec, coefficients: np.ndarray) -> np.ndarray:
    """A⁺ 作用在稠密系数向量（0..N）上，结果长度 N+2。"""
    coefficients = np.asarray(coefficients, dtype=complex)
    n_max = len(coefficients) - 1
    out = np.zeros(n_max + 2, dtype=complex)
    out[1:] = up_coefficients(spec, n_max) * coefficients
    return out


def extremal_indices(spec: LadderSpec) -> list[int]:
    """被 A⁻ 湮灭的本征态指标 {0} ∪ roots。"""
    return [0, *spec.roots]
