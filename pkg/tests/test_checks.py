"""测试不变量检查套件"""

import math

import pytest

from gcs.exceptions import CheckFailedError, PhysicsError
from gcs.services import checks
from gcs.services.checks import (
    CheckContext,
    CheckResult,
    get_check,
    list_checks,
    raise_on_failure,
    run_checks,
)


class TestRegistry:
    def test_all_checks_registered(self):
        assert list_checks() == [
            "hw_recursion",
            "spectral_actions",
            "definition_equivalence",
            "eigenvector",
            "density_current_symmetry",
            "current_oracle",
            "moments",
            "mean_energy",
            "fidelity",
            "susy_structure",
            "root_cases",
        ]

    def test_unknown_check(self):
        with pytest.raises(CheckFailedError) as exc_info:
            get_check("nope")
        assert exc_info.value.failed == ["nope"]

    def test_app_error_recorded_as_failure(self, monkeypatch):
        """单项抛 AppError 记为失败，其余检查继续"""

        def broken(context):
            raise PhysicsError(message="坏了")

        monkeypatch.setitem(checks._registry, "broken", broken)
        results = run_checks(CheckContext(), ["broken", "spectral_actions"])
        assert [r.passed for r in results] == [False, True]
        assert "PhysicsError" in results[0].detail


class TestRaiseOnFailure:
    def test_passes_silently(self):
        raise_on_failure([CheckResult(name="a", passed=True)])

    def test_lists_failures(self):
        with pytest.raises(CheckFailedError) as exc_info:
            raise_on_failure([CheckResult(name="a", passed=False), CheckResult(name="b", passed=True)])
        assert exc_info.value.failed == ["a"]


class TestChecksPass:
    @pytest.mark.parametrize(
        "name",
        [
            "hw_recursion",
            "spectral_actions",
            "definition_equivalence",
            "eigenvector",
            "current_oracle",
            "moments",
            "mean_energy",
            "susy_structure",
            "root_cases",
        ],
    )
    def test_check_passes(self, name):
        (result,) = run_checks(CheckContext(), [name])
        assert result.passed, result.detail

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["density_current_symmetry", "fidelity"])
    def test_slow_check_passes(self, name):
        (result,) = run_checks(CheckContext(), [name])
        assert result.passed, result.detail

    @pytest.mark.slow
    def test_full_suite_passes(self):
        """默认上下文下整套检查全部通过（gcs check 退出码 0）"""
        results = run_checks(CheckContext())
        assert [r.name for r in results if not r.passed] == []


class TestMeanEnergyPhase:
    @pytest.mark.parametrize("kind", ["monolayer", "bilayer"])
    @pytest.mark.parametrize("r", [1.0, 3.0, 5.0])
    def test_closed_form_identical_across_theta(self, kind, r, units):
        """同一构造半径下闭式平均能量逐位与 θ 无关"""
        import cmath

        from gcs.physics import coherent, ladder, observables

        spec = ladder.oscillator_ladder()
        values = {
            observables.mean_energy(coherent.bgcs(spec, kind, cmath.rect(r, theta), radius=r), units)
            for theta in (0.0, 0.4, math.pi / 3, 2.0, math.pi)
        }
        assert len(values) == 1
