import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from core.funcspace import (
    TrigPoly,
    circle_derivative,
    eval_on_contraction,
    eval_on_matrix,
    fn_norm,
    split_pm,
)
from core.instances import haar_unitary, random_trig_poly, rng_for, strict_contraction
from core.linalg import defect, op_norm
from utils.error_handler import ValidationError

z = TrigPoly.monomial(1)
z_inv = TrigPoly.monomial(-1)


def test_split_symmetric_pair():
    plus, minus = split_pm(z + z_inv)
    assert dict(plus.coeffs) == {1: 1}
    assert dict(minus.coeffs) == {1: 1}


def test_split_constant():
    plus, minus = split_pm(TrigPoly.constant(1))
    assert dict(plus.coeffs) == {0: 1}
    assert not minus.coeffs


def test_split_reflects_negative_index():
    plus, minus = split_pm(TrigPoly.monomial(-3, 2))
    assert not plus.coeffs
    assert dict(minus.coeffs) == {3: 2}


def test_zero_coefficients_dropped():
    phi = TrigPoly({0: 0, 2: 1, -1: 0})
    assert list(phi.coeffs) == [2]
    assert phi.degree == 2


def test_from_triples_accumulates():
    phi = TrigPoly.from_triples([[1, 1.0, 0.0], [1, 0.0, 2.0], [-2, 3.0, 0.0]])
    assert phi.coeffs[1] == 1 + 2j
    assert phi.to_triples() == [[-2, 3.0, 0.0], [1, 1.0, 2.0]]
    with pytest.raises(ValidationError):
        TrigPoly.from_triples([[1, 2.0]])


def test_reassembly_on_circle(rng):
    phi = random_trig_poly(rng, 6)
    plus, minus = split_pm(phi)
    t = np.linspace(0, 2 * np.pi, 50, endpoint=False)
    assert np.max(np.abs(phi(t) - plus(t) - minus(-t))) <= 1e-12


def test_eval_monomials(rng):
    T = strict_contraction(rng, 3)
    np.testing.assert_allclose(eval_on_contraction(z, defect(T)), T)
    np.testing.assert_allclose(eval_on_contraction(z_inv, T), T.conj().T)
    np.testing.assert_allclose(eval_on_contraction(TrigPoly.constant(2.5), T), 2.5 * np.eye(3))


def test_eval_matches_normal_calculus_on_unitary(rng):
    U = haar_unitary(rng, 4)
    phi = random_trig_poly(rng, 5)
    R, Q = scipy.linalg.schur(U, output="complex")
    theta = np.angle(np.diag(R))
    spectral = (Q * phi(theta)) @ Q.conj().T
    assert op_norm(eval_on_matrix(phi, U) - spectral) <= 1e-9


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2 ** 32 - 1))
def test_eval_is_linear(seed):
    rng = rng_for(seed)
    T = strict_contraction(rng, 3)
    a, b = random_trig_poly(rng, 4), random_trig_poly(rng, 4)
    gap = eval_on_matrix(a + b.scale(2j), T) - eval_on_matrix(a, T) - 2j * eval_on_matrix(b, T)
    assert op_norm(gap) <= 1e-12


def test_circle_derivative_examples(rng):
    assert dict(circle_derivative(z, 1).coeffs) == {1: 1j}
    assert dict(circle_derivative(TrigPoly.monomial(2), 2).coeffs) == {2: -4}
    phi = random_trig_poly(rng, 3)
    assert dict(circle_derivative(phi, 0).coeffs) == dict(phi.coeffs)


def test_fn_norm_examples():
    assert fn_norm(TrigPoly.constant(1), 3) == 0
    assert fn_norm(z + z_inv, 2) == 2
    assert fn_norm(TrigPoly.monomial(2, 3), 1) == 6


def test_at_points_matches_call():
    phi = TrigPoly({-2: 1j, 0: 1, 3: 2})
    t = np.linspace(0, 6, 7)
    np.testing.assert_allclose(phi.at_points(np.exp(1j * t)), phi(t), atol=1e-13)
