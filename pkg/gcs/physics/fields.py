"""
SUSY-QM 场量的逐点求值。

单层：超势 W 与伙伴势 V±；双层：η、β、γ 与 V±。
另提供一阶/二阶缠绕算子的有限差分作用，用于恒定场下的交叉验证。
"""

from __future__ import annotations

import logging
from collections.abc import Callable

import numpy as np

from gcs.exceptions import DegenerateEtaError
from gcs.physics.types import BilayerFields, MagneticProfile, MonolayerFields

logger = logging.getLogger(__name__)

ETA_EPS = 1e-12

ArrayLike = float | np.ndarray
WaveFunction = Callable[[np.ndarray], np.ndarray]


def monolayer_fields(profile: MagneticProfile, x: ArrayLike, k: float) -> MonolayerFields:
    """W=𝒜(x)+k，V±=W²±𝒜′(x)。"""
    w = profile.a(x) + k
    slope = profile.a1(x)
    return MonolayerFields(w=w, v_minus=w * w - slope, v_plus=w * w + slope)


def bilayer_fields(
    profile: MagneticProfile,
    x: ArrayLike,
    k: float,
    eps1: float,
    eps2: float,
) -> BilayerFields:
    """
    η=2(k+𝒜)，β、γ 由 η 及其导数给出，V⁺=V⁻+2η′。

    |η| < ETA_EPS 时抛 DegenerateEtaError。
    """
    eta = 2.0 * (k + profile.a(x))
    d1 = 2.0 * profile.a1(x)
    d2 = 2.0 * profile.a2(x)

    eta_arr = np.asarray(eta, dtype=float)
    near_zero = np.abs(eta_arr) < ETA_EPS
    if np.any(near_zero):
        x_arr = np.broadcast_to(np.asarray(x, dtype=float), eta_arr.shape)
        x_bad = float(x_arr[near_zero].flat[0])
        logger.debug("degenerate eta: x=%.17g", x_bad)
        raise DegenerateEtaError(
            message=f"η(x) 在 x={x_bad:.6g} 处过小，SUSY 构造奇异",
            x=x_bad,
            eta=float(eta_arr[near_zero].flat[0]),
        )

    split = eps1 - eps2
    beta = (d1 * d1 - 2.0 * eta * d2 - split * split) / (4.0 * eta * eta)
    gamma = (
        eta * eta / 4.0
        + d1 / 2.0
        - d2 / (2.0 * eta)
        + (d1 / (2.0 * eta)) ** 2
        - (split / (2.0 * eta)) ** 2
    )
    v_minus = -gamma + eta * eta / 2.0 - d1 / 2.0 + (eps1 + eps2) / 2.0
    return BilayerFields(
        eta=eta,
        beta=beta,
        gamma=gamma,
        v_minus=v_minus,
        v_plus=v_minus + 2.0 * d1,
    )


def hamiltonian_residual(
    potential: Callable[[np.ndarray], np.ndarray],
    psi: WaveFunction,
    xs: np.ndarray,
    energy: float,
    h: float,
) -> np.ndarray:
    """(−D²+V)ψ − Eψ，D² 用三点中心差分。"""
    xs = np.asarray(xs, dtype=float)
    centre = psi(xs)
    second = (psi(xs + h) - 2.0 * centre + psi(xs - h)) / (h * h)
    return -second + potential(xs) * centre - energy * centre


def first_order_intertwiner(
    profile: MagneticProfile,
    psi: WaveFunction,
    xs: np.ndarray,
    k: float,
    h: float,
) -> np.ndarray:
    """L1⁻ψ = ψ′ + Wψ（中心差分）。"""
    xs = np.asarray(xs, dtype=float)
    derivative = (psi(xs + h) - psi(xs - h)) / (2.0 * h)
    return derivative + monolayer_fields(profile, xs, k).w * psi(xs)


def second_order_intertwiner(
    profile: MagneticProfile,
    psi: WaveFunction,
    xs: np.ndarray,
    k: float,
    eps1: float,
    eps2: float,
    h: float,
) -> np.ndarray:
    """L2⁻ψ = ψ″ + ηψ′ + γψ（中心差分）。"""
    xs = np.asarray(xs, dtype=float)
    fields = bilayer_fields(profile, xs, k, eps1, eps2)
    centre = psi(xs)
    first = (psi(xs + h) - psi(xs - h)) / (2.0 * h)
    second = (psi(xs + h) - 2.0 * centre + psi(xs - h)) / (h * h)
    return second + fields.eta * first + fields.gamma * centre


def observed_order(residuals: list[float]) -> list[float]:
    """步长逐次减半时的收敛阶 log2(r_i / r_{i+1})。"""
    return [float(np.log2(a / b)) for a, b in zip(residuals, residuals[1:])]


def constant_profile(omega: float) -> MagneticProfile:
    """恒定磁场剖面 𝒜(x)=(ω/2)x（自然单位下 𝔅₀=ω/2）。"""
    return MagneticProfile.constant(omega / 2.0)
