"""测试谐振子本征函数与 θ± 作用"""

import math

import numpy as np
import pytest
from scipy.special import eval_hermite, gammaln

from gcs.exceptions import PhysicsError
from gcs.physics.oscillator import (
    eval_psi,
    integrate,
    psi_table,
    quadrature_window,
    theta_action,
    zp_matrix_elements,
)
from gcs.physics.types import UnitSystem


def _hermite_psi(n: int, x: np.ndarray, units: UnitSystem) -> np.ndarray:
    z = units.z(x)
    log_norm = 0.25 * math.log(units.omega / (2.0 * math.pi)) - 0.5 * (n * math.log(2.0) + gammaln(n + 1))
    return math.exp(log_norm) * eval_hermite(n, z) * np.exp(-0.5 * z * z)


class TestPsi:
    def test_ground_state_at_origin(self):
        """ω=1、k=0：ψ₀(0) = (2π)^{−1/4}"""
        assert eval_psi(0, 0.0, UnitSystem(omega=1.0, k=0.0)) == pytest.approx(0.631619, abs=1e-6)

    def test_matches_hermite_closed_form(self, units):
        """递推与 Hermite 闭式一致（n ≤ 20）"""
        xs = np.linspace(units.center - 6.0, units.center + 6.0, 121)
        table = psi_table(20, xs, units)
        for n in range(21):
            assert np.allclose(table[n], _hermite_psi(n, xs, units), rtol=1e-10, atol=1e-12)

    def test_table_shape(self, units):
        xs = np.zeros((3, 4))
        assert psi_table(5, xs, units).shape == (6, 3, 4)

    def test_high_order_stays_finite(self, units):
        """n = 400 时递推不溢出"""
        xs = quadrature_window(units, 0.0, 200)
        assert np.all(np.isfinite(psi_table(400, xs, units)))

    def test_bounded_by_one(self):
        """n ≤ 200、|x| ≤ 50、ω=1 时 |ψ_n| < 1"""
        units = UnitSystem(omega=1.0, k=0.0)
        xs = np.linspace(-50.0, 50.0, 4001)
        assert np.max(np.abs(psi_table(200, xs, units))) < 1.0

    def test_orthonormal_on_window(self, units):
        xs = quadrature_window(units, 0.0, 2000)
        table = psi_table(8, xs, units)
        gram = np.array([[integrate(table[m] * table[n], xs) for n in range(9)] for m in range(9)])
        assert np.allclose(gram, np.eye(9), atol=1e-10)

    def test_negative_index_rejected(self, units):
        with pytest.raises(PhysicsError):
            eval_psi(-1, 0.0, units)


class TestThetaActions:
    def test_lowering(self):
        assert theta_action("down", 0) == (0.0, None)
        assert theta_action("down", 4) == (2.0, 3)

    def test_raising(self):
        coef, target = theta_action("up", 3)
        assert coef == pytest.approx(2.0)
        assert target == 4


class TestZPMatrixElements:
    def test_hermitian(self):
        """z 实对称，p_z 厄米"""
        for n in range(6):
            for m in range(6):
                z_mn, p_mn = zp_matrix_elements(m, n)
                z_nm, p_nm = zp_matrix_elements(n, m)
                assert z_mn == z_nm
                assert p_mn == p_nm.conjugate()

    def test_values(self):
        z, p = zp_matrix_elements(3, 2)
        assert z == pytest.approx(math.sqrt(1.5))
        assert p == pytest.approx(1j * math.sqrt(1.5))
        assert zp_matrix_elements(0, 0) == (0.0, 0j)


class TestQuadratureWindow:
    def test_centered_and_odd_length(self, units):
        xs = quadrature_window(units, 2.0, 100)
        assert len(xs) == 201
        assert xs[100] == pytest.approx(units.center)

    def test_widens_with_r(self, units):
        narrow = quadrature_window(units, 0.0, 10)
        wide = quadrature_window(units, 10.0, 10)
        assert wide[-1] - wide[0] > narrow[-1] - narrow[0]
