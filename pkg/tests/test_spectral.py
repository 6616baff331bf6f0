import math
from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import quad

from mifde.errors import ConjugacyViolation, DomainError, MethodInapplicable, ZeroRoot
from mifde.series import solve_series
from mifde.spectral import (
    SpectralForm,
    decompose,
    decompose_commensurate,
    eval_spectral,
    imaginary_residual,
    solve_spectral,
)
from mifde.special_functions import ml_matrix, ml_value
from mifde.stability import rational_index_stable
from mifde.systems import MixedSystem

F = Fraction
THIRDS = (F(1, 3), F(2, 3))


def stable_systems(rng, orders, count):
    out = []
    while len(out) < count:
        A = rng.normal(size=(2, 2))
        if rational_index_stable(A, orders).margin > 0.05:
            out.append(MixedSystem(A, orders[0], orders[1], rng.uniform(-1, 1, 2)))
    return out


def match_poles(found, expected, tol=1e-10):
    idx = []
    for lam in expected:
        j = int(np.argmin(np.abs(found - lam)))
        assert abs(found[j] - lam) <= tol
        idx.append(j)
    return idx


def test_decoupled_commensurate():
    sys_ = MixedSystem(-np.eye(2), F(1, 3), F(2, 3), [1.0, 0.0])
    form = decompose_commensurate(sys_, 2)
    assert form.ml_alpha == pytest.approx(1 / 3) and form.ml_beta == 1
    idx = match_poles(form.poles, [-1, 1j, -1j])
    assert np.abs(form.residues[0, idx] - [1, 0, 0]).max() <= 1e-12
    y = eval_spectral(form, 1.0)
    assert y[0] == pytest.approx(ml_value(1 / 3, 1, -1.0).real, abs=1e-12)
    assert y[0] == pytest.approx(solve_series(sys_, [0.0, 1.0]).states[1, 0], abs=1e-12)


def test_decoupled_general_form():
    sys_ = MixedSystem(-np.eye(2), F(1, 3), F(2, 3), [1.0, 0.5])
    form = decompose(sys_)
    assert len(form.poles) == 9 and form.ml_alpha == pytest.approx(1 / 9)
    ref = solve_series(sys_, [0.0, 0.3, 1.0]).states
    got = solve_spectral(form, [0.0, 0.3, 1.0]).states
    assert np.abs(got - ref).max() <= 1e-9


def test_s_matrix_oracle(rng):
    for sys_ in stable_systems(rng, THIRDS, 5):
        form = decompose_commensurate(sys_, 2)
        (a1, a2), (b1, b2) = sys_.A
        x1, x2 = sys_.y0
        l1, l2, l3 = form.poles
        S = np.array(
            [[1, -(l2 + l3), l2 * l3], [1, -(l1 + l3), l1 * l3], [1, -(l1 + l2), l1 * l2]]
        )
        rhs = np.column_stack([[x1, x2], [a2 * x2, -a1 * x2], [-b2 * x1, b1 * x1]])
        assert np.abs(rhs @ np.linalg.inv(S) - form.residues).max() <= 1e-10


def test_k1_is_eigendecomposition(rng):
    for _ in range(5):
        A = rng.normal(size=(2, 2))
        y0 = rng.normal(size=2)
        form = decompose_commensurate(MixedSystem(A, F(1, 2), F(1, 2), y0), 1)
        assert len(form.poles) == 2
        assert np.sort_complex(form.poles) == pytest.approx(np.sort_complex(np.linalg.eigvals(A)), abs=1e-12)
        for t in (0.4, 1.0):
            ref = (ml_matrix(0.5, t**0.5 * A) @ y0).real
            assert np.abs(eval_spectral(form, t) - ref).max() <= 1e-10


def test_equal_orders_general_form(rng):
    A = np.array([[-1.0, 0.4], [-0.3, -0.6]])
    y0 = np.array([1.0, -2.0])
    form = decompose(MixedSystem(A, F(1, 2), F(1, 2), y0))
    for t in (0.5, 1.0):
        assert np.abs(eval_spectral(form, t) - (ml_matrix(0.5, t**0.5 * A) @ y0).real).max() <= 1e-10


def test_zero_initial_state():
    form = decompose(MixedSystem([[-1.0, 0.5], [0.2, -1.0]], F(1, 3), F(2, 3), [0.0, 0.0]))
    assert not np.any(form.residues)


def test_zero_determinant_rejected():
    with pytest.raises(ZeroRoot):
        decompose(MixedSystem([[1.0, 2.0], [2.0, 4.0]], F(1, 3), F(2, 3), [1.0, 0.0]))


def test_inapplicable():
    with pytest.raises(MethodInapplicable):
        decompose(MixedSystem(-np.eye(3), F(1, 3), F(2, 3), [1, 1, 1], m1=1))
    with pytest.raises(MethodInapplicable):
        decompose_commensurate(MixedSystem(-np.eye(2), F(1, 3), F(1, 2), [1, 1]), 2)
    with pytest.raises(DomainError):
        decompose_commensurate(MixedSystem(-np.eye(2), F(1, 3), F(2, 3), [1, 1]), 0)


def test_swapped_labels(rng):
    A = np.array([[-1.0, 0.5], [-0.4, -0.8]])
    t = np.linspace(0, 1, 6)
    a = solve_spectral(decompose(MixedSystem(A, F(2, 3), F(1, 3), [1.0, 0.3])), t).states
    P = np.array([[0, 1], [1, 0]])
    b = solve_spectral(decompose(MixedSystem(P @ A @ P, F(1, 3), F(2, 3), [0.3, 1.0])), t).states
    assert np.abs(a - b[:, ::-1]).max() <= 1e-10
    assert decompose(MixedSystem(A, F(2, 3), F(1, 3), [1.0, 0.3])).swapped


def test_reconstruction(rng):
    for sys_ in stable_systems(rng, THIRDS, 5):
        for form in (decompose(sys_), decompose_commensurate(sys_, 2)):
            z = rng.normal(size=20) + 1j * rng.normal(size=20)
            pf = (form.residues[:, :, None] / (z[None, None, :] - form.poles[None, :, None])).sum(axis=1)
            direct = np.array([p(z) / form.denominator(z) for p in form.numerators])
            assert np.abs(pf - direct).max() <= 1e-10 * np.abs(direct).max()


def test_conjugate_closure(rng):
    for sys_ in stable_systems(rng, THIRDS, 5):
        form = decompose(sys_)
        for j, lam in enumerate(form.poles):
            k = int(np.argmin(np.abs(form.poles - np.conj(lam))))
            assert abs(form.poles[k] - np.conj(lam)) <= 1e-10
            assert np.abs(form.residues[:, k] - np.conj(form.residues[:, j])).max() <= 1e-10


def test_initial_value(rng):
    for orders in (THIRDS, (F(1, 2), F(3, 4)), (F(1, 4), F(1)), (F(2, 3), F(1, 3))):
        for sys_ in stable_systems(rng, orders, 4):
            assert np.abs(eval_spectral(decompose(sys_), 0.0) - sys_.y0).max() <= 1e-10
            lo, hi = sorted(orders)
            if (hi / lo).denominator == 1:
                form = decompose_commensurate(sys_, int(hi / lo))
                assert np.abs(eval_spectral(form, 0.0) - sys_.y0).max() <= 1e-10


def test_singular_moments_vanish(rng):
    sys_ = stable_systems(rng, (F(1, 2), F(3, 4)), 1)[0]
    form = decompose(sys_)
    assert form.shift > 0
    recomputed = SpectralForm(form.poles, form.residues, form.ml_alpha, form.ml_beta)
    assert np.abs(recomputed.singular_moments()).max() <= 1e-10 * np.abs(form.residues).sum()


def test_against_series(rng):
    t = np.linspace(0, 1, 11)
    worst_c = worst_g = 0.0
    for sys_ in stable_systems(rng, THIRDS, 20):
        ref = solve_series(sys_, t).states
        worst_c = max(worst_c, np.abs(solve_spectral(decompose_commensurate(sys_, 2), t).states - ref).max())
        worst_g = max(worst_g, np.abs(solve_spectral(decompose(sys_), t).states - ref).max())
    assert worst_c <= 1e-6 and worst_g <= 1e-6


def test_conjugacy_residual_along_trajectory(rng):
    for sys_ in stable_systems(rng, THIRDS, 5):
        form = decompose(sys_)
        for t in np.linspace(0.05, 1, 8):
            assert imaginary_residual(form, t) < 1e-8


def test_conjugacy_violation():
    form = SpectralForm(np.array([-1 + 1j]), np.array([[1.0], [1.0]], dtype=complex), 0.5, 1.0)
    with pytest.raises(ConjugacyViolation):
        eval_spectral(form, 1.0)


def test_laplace_of_single_pole():
    # int_0^inf e^(-s t) t^(b-1) E_{a,b}(lam t^a) dt = s^(a-b) / (s^a - lam)
    a, b, lam = 1 / 3, 2 / 3, -0.7
    form = SpectralForm(np.array([lam + 0j]), np.array([[1.0], [0.0]], dtype=complex), a, b)
    assert form.shift == 1
    for s in (1.0, 2.0, 4.0):
        val, _ = quad(lambda t: math.exp(-s * t) * eval_spectral(form, t)[0], 0, 50, limit=400, epsabs=1e-9, epsrel=1e-9)
        assert val == pytest.approx(s ** (a - b) / (s**a - lam), abs=1e-4)


def test_singular_form_at_zero():
    form = SpectralForm(np.array([-0.7 + 0j]), np.array([[1.0], [0.0]], dtype=complex), 1 / 3, 2 / 3)
    with pytest.raises(DomainError):
        eval_spectral(form, 0.0)
    with pytest.raises(DomainError):
        eval_spectral(form, -1.0)
