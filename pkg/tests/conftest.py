import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from benchmarks import make_problem  # noqa: E402
from harness import make_config  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def sphere2():
    return make_problem("sphere", 2)


@pytest.fixture
def small_config():
    """几毫秒就能跑完的小实验"""
    def build(**fields):
        base = dict(problem="sphere", dims=2, swarm_size=10, steps=30, runs=3, lhs_candidates=4, seed=7)
        base.update(fields)
        return make_config(**base)

    return build
