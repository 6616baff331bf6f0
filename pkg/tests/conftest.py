import warnings

import mpmath
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def mp_ml(alpha, beta, z, gamma=1, dps=40):
    """High-precision Mittag-Leffler reference by direct mpmath summation."""
    with mpmath.workdps(dps):
        z = mpmath.mpc(z)
        total = mpmath.mpf(0)
        k = 0
        while True:
            term = mpmath.rf(gamma, k) * z**k / (mpmath.gamma(alpha * k + beta) * mpmath.factorial(k))
            total += term
            if k > 10 and abs(term) < mpmath.mpf(10) ** (-dps + 5) * max(1, abs(total)):
                return complex(total)
            k += 1


def random_stable(rng, m=2, margin=0.05):
    """Random real matrix with all eigenvalues in Re < -margin."""
    while True:
        A = rng.normal(size=(m, m))
        if np.all(np.linalg.eigvals(A).real < -margin):
            return A


@pytest.fixture
def rng():
    return np.random.default_rng(20240617)


@pytest.fixture
def no_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        yield
