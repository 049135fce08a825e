import sys
from pathlib import Path

import numpy as np
import pytest

# make tests/oracles.py importable as a plain module
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def make_nonsingular(rng, n: int, min_abs_det: float = 0.1) -> np.ndarray:
    """Random square matrix with |det| bounded away from zero."""
    from matleg import backend

    for _ in range(200):
        a = rng.uniform(-1.0, 1.0, (n, n))
        t = float(backend.det(a))
        if abs(t) >= 0.01:
            return a * (min_abs_det * 10.0 / abs(t)) ** (1.0 / n)
    raise AssertionError("could not draw a nonsingular matrix")
