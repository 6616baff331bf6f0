import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import gamma as G
from scipy.special import wofz

from conftest import mp_ml
from mifde.errors import DomainError, NoConvergence, OverflowDomain
from mifde.special_functions import EvalReport, MLParams, ml, ml_matrix, ml_value

ZS = [0.5, -0.5, 1.0, -1.0, 2.0, -2.0]
EPS = np.finfo(float).eps


def rounding_bound(rep) -> float:
    # alternating-sign sums lose about eps * (largest term); a few ulp per term on top
    return 8 * EPS * rep.max_term_magnitude


@pytest.mark.parametrize("z", ZS)
def test_exponential(z):
    assert abs(ml_value(1, 1, z) - math.exp(z)) <= 1e-12 * math.exp(abs(z))


@pytest.mark.parametrize("z", ZS)
def test_beta_two(z):
    assert abs(ml_value(1, 2, z) - math.expm1(z) / z) <= 1e-12


@pytest.mark.parametrize("z", ZS)
def test_pochhammer_two(z):
    assert abs(ml_value(1, 1, z, gamma=2) - (1 + z) * math.exp(z)) <= 1e-12 * max(1, abs((1 + z) * math.exp(z)))


def test_examples_at_one():
    assert ml_value(1, 1, 1) == pytest.approx(2.718281828459045, abs=1e-15)
    assert ml_value(1, 2, 1) == pytest.approx(1.718281828459045, abs=1e-15)
    assert ml_value(1, 1, 1, gamma=2) == pytest.approx(5.436563656918090, abs=1e-14)


@pytest.mark.parametrize("x", [-3.0, -1.0, -0.3, 0.4, 1.5, 2.5])
def test_half_order_against_faddeeva(x):
    # E_{1/2}(z) = exp(z^2) erfc(-z) = w(iz) with w the Faddeeva function
    ref = wofz(-1j * x)
    rep = ml(MLParams(0.5, 1), x)
    assert abs(rep.value - ref) <= 1e-13 * max(1, abs(ref)) + rounding_bound(rep)


@pytest.mark.parametrize("alpha,beta,z", [(0.3, 0.7, 1 + 1j), (0.8, 1.3, -2.5), (1.7, 0.4, 3j), (0.5, 2.0, -4.0)])
def test_against_high_precision(alpha, beta, z):
    ref = mp_ml(alpha, beta, z)
    rep = ml(MLParams(alpha, beta), z)
    assert abs(rep.value - ref) <= 1e-13 * max(1, abs(ref)) + rounding_bound(rep)


@given(st.floats(0.05, 1.0), st.floats(0.05, 3.0))
def test_value_at_zero(alpha, beta):
    assert abs(ml_value(alpha, beta, 0.0) - 1 / G(beta)) <= 1e-14


def test_value_at_zero_pole_of_gamma():
    # 1/Gamma(0) = 0
    assert ml(MLParams(0.5, 0.0), 0.0).value == 0


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
@pytest.mark.parametrize("beta", [0.5, 1.0, 1.7])
@pytest.mark.parametrize("z", [-2.0, -0.7, 0.4, 1.9])
def test_derivative_identity(alpha, beta, z):
    # d/dz E_{a,b}(z) = E^2_{a,a+b}(z); the difference quotient also carries
    # the value rounding divided by the step
    h = 1e-5
    lo, hi = ml(MLParams(alpha, beta), z - h), ml(MLParams(alpha, beta), z + h)
    fd = (hi.value - lo.value) / (2 * h)
    ref = ml_value(alpha, alpha + beta, z, gamma=2)
    assert abs(fd - ref) <= 1e-6 * abs(ref) + (rounding_bound(hi) + rounding_bound(lo)) / (2 * h)


@pytest.mark.parametrize("alpha,beta,z", [(0.3, 0.5, -2.0), (0.3, 1.0, -2.0)])
def test_derivative_identity_exact_values(alpha, beta, z):
    # where double-precision differencing is too noisy, the identity still holds on exact values
    h = 1e-5
    fd = (mp_ml(alpha, beta, z + h) - mp_ml(alpha, beta, z - h)) / (2 * h)
    ref = mp_ml(alpha, alpha + beta, z, gamma=2)
    assert abs(fd - ref) <= 1e-6 * abs(ref)


@pytest.mark.parametrize("lam", [-1.0, -0.5])
@pytest.mark.parametrize("alpha", [0.4, 0.75])
@pytest.mark.parametrize("t", [0.1, 0.8, 2.0])
def test_integrated_kernel(lam, alpha, t):
    # 1 + int_0^t lam s^(a-1) E_{a,a}(lam s^a) ds = E_a(lam t^a)
    f = lambda s: lam * s ** (alpha - 1) * ml_value(alpha, alpha, lam * s**alpha).real
    val, _ = quad(f, 0, t, epsabs=1e-12, epsrel=1e-10, limit=200)
    assert abs(1 + val - ml_value(alpha, 1, lam * t**alpha)) <= 1e-8


def test_report_fields():
    rep = ml(MLParams(0.5), -1.0)
    assert isinstance(rep, EvalReport)
    assert rep.terms_used >= 1
    assert rep.max_term_magnitude >= 1.0
    assert not rep.precision_warning


def test_cancellation_flagged():
    # plain series at z = -20 keeps no correct digits; the report must say so
    rep = ml(MLParams(0.5), -20.0)
    assert rep.precision_warning
    ref = wofz(20j).real
    assert abs(rep.value - ref) > 1e-6 or rep.precision_warning


def test_moderate_negative_argument_usable():
    rep = ml(MLParams(1.0), -15.0)
    assert abs(rep.value - math.exp(-15)) <= 1e-6


def test_errors():
    with pytest.raises(DomainError):
        MLParams(0.0)
    with pytest.raises(DomainError):
        MLParams(0.5, gamma=0)
    with pytest.raises(DomainError):
        ml(MLParams(0.5), 60.0)
    with pytest.raises(NoConvergence):
        ml(MLParams(0.5), 10.0, max_terms=5)
    with pytest.raises(OverflowDomain):
        ml(MLParams(0.05), 49.0, max_terms=100_000)


def test_matrix_examples():
    assert np.allclose(ml_matrix(1, np.zeros((2, 2))), np.eye(2), atol=0)
    E = ml_matrix(1, np.diag([1.0, -1.0]))
    assert np.allclose(E, np.diag([math.e, 1 / math.e]), atol=1e-14, rtol=0)


@given(st.floats(0.3, 1.0), st.floats(-3, 3))
def test_matrix_scalar_consistency(alpha, x):
    assert abs(ml_matrix(alpha, [[x]])[0, 0] - ml_value(alpha, 1, x)) <= 1e-15 * max(1, abs(ml_value(alpha, 1, x)))


def test_matrix_against_eigendecomposition(rng):
    for _ in range(10):
        M = rng.normal(size=(3, 3))
        w, V = np.linalg.eig(M)
        ref = V @ np.diag([ml_value(0.6, 1, x) for x in w]) @ np.linalg.inv(V)
        assert np.abs(ml_matrix(0.6, M) - ref).max() <= 1e-11 * max(1, np.abs(ref).max())


def test_matrix_overflow_reported():
    # E_{0.1}(2) ~ 10 exp(2^10) does not fit in a double
    with pytest.raises(OverflowDomain):
        ml_matrix(0.1, [[2.0]])


def test_matrix_dimension_cap():
    with pytest.raises(DomainError):
        ml_matrix(0.5, np.eye(3), max_dim=2)
