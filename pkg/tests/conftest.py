import sys
from pathlib import Path

import numpy as np
import pytest

# make the sibling oracle module importable regardless of invocation dir
sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_surrogate_input(rng, n, p):
    """A corrupted-looking (Z, y) pair plus a random PSD noise covariance."""
    Z = rng.standard_normal((n, p))
    y = rng.standard_normal(n)
    A = rng.standard_normal((p, p)) / np.sqrt(p)
    sigma_A = A @ A.T
    return Z, y, sigma_A
