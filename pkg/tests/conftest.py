import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from oclust.divergence import Distribution, Support

settings.register_profile(
    "suite",
    deadline=None,
    max_examples=50,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def random_distribution(rng: np.random.Generator, q: int, allow_zeros=True) -> Distribution:
    """Random pmf on the support 0..q-1, occasionally with hard zeros."""
    w = rng.gamma(1.0, 1.0, size=q)
    if allow_zeros and q > 2 and rng.random() < 0.3:
        kill = rng.integers(1, q - 1)
        w[rng.choice(q, size=kill, replace=False)] = 0.0
    if w.sum() == 0:
        w[0] = 1.0
    return Distribution(Support(tuple(range(q))), w / w.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
