"""全局测试配置与 fixtures"""

from collections.abc import Iterator

import pytest

from gcs.config import get_settings
from gcs.physics.ladder import LadderSpec, oscillator_ladder
from gcs.physics.types import UnitSystem


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    """每个测试使用纯默认的静态配置（不继承宿主环境变量）"""
    for name in ("LOG_LEVEL", "GCS_THREADS", "DEFAULT_TOL", "QUADRATURE_HALF_STEPS", "OUTPUT_DIR"):
        monkeypatch.delenv(name, raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def units() -> UnitSystem:
    """ω = k = 1 的电子分支"""
    return UnitSystem(omega=1.0, k=1.0)


@pytest.fixture
def oscillator() -> LadderSpec:
    """f ≡ 1 的谐振子阶梯"""
    return oscillator_ladder()


@pytest.fixture
def rooted() -> LadderSpec:
    """f 在 n = 2, 5 处为零"""
    return oscillator_ladder(f=lambda n: 0.0 if n in (2, 5) else 1.0, roots=(2, 5))


@pytest.fixture
def output_dir(tmp_path, monkeypatch: pytest.MonkeyPatch):
    """把 OUTPUT_DIR 指向临时目录"""
    monkeypatch.setenv("OUTPUT_DIR", str(tmp_path))
    get_settings.cache_clear()
    return tmp_path
