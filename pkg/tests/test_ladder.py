"""测试广义阶梯算子框架"""

import math

import numpy as np
import pytest

from gcs.exceptions import InvalidLadderError
from gcs.physics.ladder import (
    LadderSpec,
    action_coefficient,
    apply_down,
    apply_up,
    case_map_f,
    commutator_diagonal,
    detect_roots,
    extremal_indices,
    gamma_n,
    hw_f_sequence,
    hw_ladder,
    is_oscillator,
    oscillator_ladder,
    spectral_action,
    table_weight,
)


def _p(n):
    return float(n)


def _q(n):
    return float(n + 1)


class TestLadderSpec:
    def test_oscillator_defaults(self, oscillator):
        assert oscillator.name == "oscillator"
        assert oscillator.roots == ()
        assert is_oscillator(oscillator, 50)

    def test_p0_must_vanish(self):
        with pytest.raises(InvalidLadderError) as exc_info:
            LadderSpec(p=lambda n: n + 1.0, q=_q)
        assert exc_info.value.reason == "p0_nonzero"

    def test_q_must_be_positive(self):
        with pytest.raises(InvalidLadderError) as exc_info:
            LadderSpec(p=_p, q=lambda n: 3.0 - n)
        assert exc_info.value.reason == "q_nonpositive"
        assert exc_info.value.index == 3

    def test_roots_must_match_zeros(self):
        """声明的根必须恰为 f 的零点"""
        with pytest.raises(InvalidLadderError) as exc_info:
            oscillator_ladder(f=lambda n: 0.0 if n == 2 else 1.0)
        assert exc_info.value.reason == "roots_mismatch"
        with pytest.raises(InvalidLadderError):
            oscillator_ladder(roots=(3,))

    def test_root_zero_rejected(self):
        with pytest.raises(InvalidLadderError):
            oscillator_ladder(f=lambda n: 0.0 if n == 0 else 1.0, roots=(0,))

    def test_roots_sorted(self):
        spec = oscillator_ladder(f=lambda n: 0.0 if n in (2, 5) else 1.0, roots=(5, 2))
        assert spec.roots == (2, 5)

    def test_is_oscillator_false_for_weighted(self):
        assert not is_oscillator(oscillator_ladder(f=lambda n: 1.0 + 0.1 * n), 10)


class TestWeights:
    def test_table_extends_with_last_value(self):
        weight = table_weight({1: 0.5, 2: 2.0})
        assert weight(1) == 0.5
        assert weight(2) == 2.0
        assert weight(100) == 2.0

    def test_table_gap_rejected(self):
        with pytest.raises(InvalidLadderError):
            table_weight({1: 1.0, 3: 1.0})
        with pytest.raises(InvalidLadderError):
            table_weight({})

    def test_detect_roots(self, rooted):
        assert detect_roots(rooted.f, 10) == (2, 5)
        assert extremal_indices(rooted) == [0, 2, 5]

    def test_case_map(self):
        assert case_map_f("monolayer", lambda n: 1.0, 1) == pytest.approx(1.0 / math.sqrt(2.0))
        assert case_map_f("monolayer", lambda n: 1.0, 4) == 0.5
        assert case_map_f("bilayer", lambda n: 1.0, 1) == 1.0
        assert case_map_f("bilayer", lambda n: 1.0, 2) == pytest.approx(1.0 / math.sqrt(2.0))
        with pytest.raises(InvalidLadderError):
            case_map_f("bilayer", lambda n: 1.0, 0)


class TestActions:
    def test_down_annihilates_ground(self, oscillator):
        assert action_coefficient(oscillator, "down", 0) == (0.0, None)

    def test_oscillator_coefficients(self, oscillator):
        assert action_coefficient(oscillator, "down", 4) == (2.0, 3)
        coef, target = action_coefficient(oscillator, "up", 3)
        assert coef == pytest.approx(2.0)
        assert target == 4

    @pytest.mark.parametrize("kind", ["monolayer", "bilayer"])
    @pytest.mark.parametrize("direction", ["down", "up"])
    def test_spectral_matches_unified(self, kind, direction):
        """分段原始作用吸收前置因子后与统一系数相同"""
        spec = oscillator_ladder(f=lambda n: 1.0 + 0.1 * n)
        for n in range(12):
            raw, raw_target = spectral_action(kind, spec, direction, n)
            unified, target = action_coefficient(spec, direction, n)
            assert raw == pytest.approx(unified, abs=1e-13)
            assert raw_target == target

    def test_negative_index_rejected(self, oscillator):
        with pytest.raises(InvalidLadderError):
            action_coefficient(oscillator, "up", -1)

    def test_apply_down_and_up(self, oscillator):
        coeffs = np.array([1.0, 2.0, 3.0], dtype=complex)
        assert np.allclose(apply_down(oscillator, coeffs), [2.0, 3.0 * math.sqrt(2.0), 0.0])
        assert np.allclose(apply_up(oscillator, coeffs), [0.0, 1.0, 2.0 * math.sqrt(2.0), 3.0 * math.sqrt(3.0)])

    def test_down_then_up_gives_gamma(self):
        """A⁺A⁻Ψ_n = γ_n Ψ_n"""
        spec = oscillator_ladder(f=lambda n: 1.0 + 0.1 * n)
        for n in range(1, 12):
            basis = np.zeros(13, dtype=complex)
            basis[n] = 1.0
            result = apply_up(spec, apply_down(spec, basis))
            expected = np.zeros(14, dtype=complex)
            expected[n] = gamma_n(spec, n)
            assert np.allclose(result, expected, rtol=0.0, atol=1e-12)

    def test_ladder_completeness(self):
        """f 处处非零时从 Ψ_0 反复上升可到达每个能级"""
        spec = oscillator_ladder(f=lambda n: 1.0 + 0.1 * n)
        state = np.array([1.0], dtype=complex)
        for n in range(1, 40):
            state = apply_up(spec, state)
            assert np.count_nonzero(state) == 1
            assert state[n] != 0.0

    def test_root_blocks_ascent(self, rooted):
        """f(2)=0 时自 Ψ_1 上升被截断"""
        assert action_coefficient(rooted, "up", 1) == (0.0, 2)


class TestHeisenbergWeyl:
    def test_oscillator_sequence_is_one(self):
        sequence = hw_f_sequence(_p, _q, 500)
        assert sequence[0] == 0.0
        assert np.allclose(sequence[1:], 1.0, atol=1e-10)

    def test_commutator_is_identity_for_hw_weight(self):
        """p_n=n²、q_n=(n+1)² 的 HW 权函数给出 [A⁻,A⁺]=1"""
        spec = hw_ladder(lambda n: float(n * n), lambda n: float((n + 1) ** 2), 100)
        assert np.allclose(commutator_diagonal(spec, 80), 1.0, atol=1e-10)

    def test_gamma_requires_positive_index(self, oscillator):
        assert gamma_n(oscillator, 3) == pytest.approx(3.0)
        with pytest.raises(InvalidLadderError):
            gamma_n(oscillator, 0)

    def test_nonpositive_product_rejected(self):
        with pytest.raises(InvalidLadderError):
            hw_f_sequence(lambda n: 0.0, _q, 5)
