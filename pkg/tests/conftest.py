import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT))

from processors.scatter_core import SystemParams  # noqa: E402

CONFIG_DIR = ROOT / "configs"


def zeeman_params(eta: float, **changes) -> SystemParams:
    """ω1 = 2, ω2 = 3.5, θ = π, g = h = 1, γ = 0.2 GHz with the given η"""
    fields = dict(eta=eta, g=1.0, h=1.0, omega1=2.0, omega2=3.5, gamma=0.2, theta=np.pi)
    fields.update(changes)
    return SystemParams(**fields)


@pytest.fixture
def fig2a():
    return zeeman_params(1.0)


@pytest.fixture
def fig2b():
    return zeeman_params(3.8)


@pytest.fixture
def fig2c():
    return zeeman_params(6.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def config_dir():
    return CONFIG_DIR
