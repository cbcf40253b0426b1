from __future__ import annotations

import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parents[1]
PROJECT_ROOT = ROOT
if str(PROJECT_ROOT) not in sys.path:
    sys.path.insert(0, str(PROJECT_ROOT))

SRC_PATH = PROJECT_ROOT / "src"
if str(SRC_PATH) not in sys.path:
    sys.path.insert(0, str(SRC_PATH))


@pytest.fixture
def rng():
    import numpy as np

    return np.random.default_rng(20240517)


@pytest.fixture
def half_space():
    """D = 1, α = 1/2, Right sector with a = 0."""
    from fracfield.space import SpaceSpec

    return SpaceSpec.uniform(1, 0.5, "right", 0.0, inner_offset=0.1)


@pytest.fixture
def oscillator_L():
    from fracfield.variational import LagrangianSpec

    return LagrangianSpec.parse("0.5*g_1^2 - 0.5*phi^2", "right", 1)
