import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.instances import haar_unitary, rng_for, strict_contraction
from core.linalg import (
    abs_op,
    as_cmatrix,
    defect,
    herm_eig,
    hermitian_generator,
    op_norm,
    pairwise_sum,
    polar_unitary,
    principal_log_unitary,
    psd_sqrt,
    schatten_norm,
    trace,
    unitarity_residual,
    unitary_exp,
)
from tests.conftest import random_hermitian_matrix
from utils.error_handler import NotAContractionError, ValidationError

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def test_herm_eig_identity():
    w, Q = herm_eig(np.eye(3))
    np.testing.assert_allclose(w, [1, 1, 1])
    assert unitarity_residual(Q) <= 1e-12


def test_herm_eig_sorts_ascending():
    w, _ = herm_eig(np.diag([2.0, -1.0]))
    np.testing.assert_allclose(w, [-1.0, 2.0])


def test_herm_eig_reconstructs_random_matrix(rng):
    M = random_hermitian_matrix(rng, 5)
    w, Q = herm_eig(M)
    assert op_norm((Q * w) @ Q.conj().T - M) <= 1e-10


def test_herm_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError):
        herm_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_herm_eig_asymmetry_bound_is_absolute():
    M = np.diag([1e4, -1e4]).astype(complex)
    M[0, 1] = 2e-8
    with pytest.raises(ValidationError):
        herm_eig(M)
    M[0, 1] = 5e-9
    w, _ = herm_eig(M)
    np.testing.assert_allclose(w, [-1e4, 1e4])


def test_defect_of_unitary_is_zero(rng):
    op = defect(haar_unitary(rng, 4))
    assert op_norm(op.defect) <= 1e-7
    assert op.rank == 0


def test_defect_of_zero_is_identity():
    op = defect(np.zeros((3, 3)))
    np.testing.assert_allclose(op.defect, np.eye(3), atol=1e-15)
    assert op.rank == 3


def test_defect_scalar_half():
    op = defect([[0.5]])
    assert op.defect[0, 0] == pytest.approx(np.sqrt(3) / 2, abs=1e-15)


def test_defect_rejects_expansion():
    with pytest.raises(NotAContractionError):
        defect([[1.1]])


def test_defect_commutes_with_modulus_squared(rng):
    T = strict_contraction(rng, 4)
    op = defect(T)
    TT = T.conj().T @ T
    assert op_norm(op.defect @ TT - TT @ op.defect) <= 1e-10


def test_input_is_read_only():
    op = defect(np.zeros((2, 2)))
    with pytest.raises(ValueError):
        op.matrix[0, 0] = 1.0


def test_as_cmatrix_rejects_non_finite():
    with pytest.raises(ValidationError):
        as_cmatrix([[np.nan]])


def test_polar_of_unitary_is_itself(rng):
    U = haar_unitary(rng, 3)
    assert op_norm(polar_unitary(U) - U) <= 1e-10


def test_polar_of_zero_scalar_is_one():
    np.testing.assert_allclose(polar_unitary([[0.0]]), [[1.0]])


def test_polar_of_signed_diagonal():
    np.testing.assert_allclose(polar_unitary(np.diag([0.5, -0.5])), np.diag([1.0, -1.0]), atol=1e-15)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_polar_decomposition_reconstructs(seed):
    T = strict_contraction(rng_for(seed), 4)
    V = polar_unitary(T)
    assert unitarity_residual(V) <= 1e-10
    assert op_norm(T - V @ abs_op(T)) <= 1e-10


def test_principal_log_of_identity():
    A = principal_log_unitary(np.eye(2))
    assert op_norm(A.matrix) <= 1e-15


def test_principal_log_minus_one_maps_to_pi():
    A = principal_log_unitary([[-1.0]])
    assert A.spectrum[0] == pytest.approx(np.pi)


def test_principal_log_scalar_phase():
    A = principal_log_unitary([[np.exp(1j * np.pi / 3)]])
    assert A.matrix[0, 0].real == pytest.approx(np.pi / 3, abs=1e-14)


@pytest.mark.parametrize("delta", [5e-9, 1e-10])
def test_principal_log_near_branch_angle_stays_principal(caplog, delta):
    U = np.array([[np.exp(1j * (-np.pi + delta))]])
    A = principal_log_unitary(U)
    assert -np.pi < A.spectrum[0] <= np.pi
    assert A.spectrum[0] == pytest.approx(-np.pi + delta, abs=1e-13)
    np.testing.assert_allclose(unitary_exp(A, 1.0), U, atol=1e-9)
    assert "[LOG]" in caplog.text


def test_principal_log_numerical_minus_pi_maps_to_pi():
    U = np.array([[np.exp(1j * (-np.pi + 1e-14))]])
    A = principal_log_unitary(U)
    assert A.spectrum[0] == np.pi
    np.testing.assert_allclose(unitary_exp(A, 1.0), U, atol=1e-9)


def test_principal_log_rejects_non_unitary():
    with pytest.raises(ValidationError):
        principal_log_unitary([[0.5]])


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=8))
def test_principal_log_reconstructs_unitary(seed, d):
    U = haar_unitary(rng_for(seed), d)
    A = principal_log_unitary(U)
    assert op_norm(unitary_exp(A, 1.0) - U) <= 1e-9
    assert np.all(A.spectrum > -np.pi) and np.all(A.spectrum <= np.pi)


def test_unitary_exp_trivial_cases(rng):
    zero = hermitian_generator(np.zeros((2, 2)))
    np.testing.assert_allclose(unitary_exp(zero, 3.7), np.eye(2))
    A = hermitian_generator(random_hermitian_matrix(rng, 3) / 10)
    np.testing.assert_allclose(unitary_exp(A, 0.0), np.eye(3), atol=1e-15)


def test_unitary_exp_scalar():
    A = hermitian_generator([[np.pi / 2]])
    assert unitary_exp(A, 1.0)[0, 0] == pytest.approx(1j, abs=1e-15)


def test_hermitian_generator_branch_check():
    with pytest.raises(ValidationError):
        hermitian_generator([[-np.pi]])
    assert hermitian_generator([[-np.pi]], check_branch=False).spectrum[0] == pytest.approx(-np.pi)


def test_schatten_and_trace_examples():
    assert schatten_norm(np.eye(4), 1) == pytest.approx(4.0)
    assert schatten_norm(np.diag([3.0, 4.0]), 2) == pytest.approx(5.0)
    assert trace(np.diag([1 + 1j, 2])) == 3 + 1j
    with pytest.raises(ValidationError):
        schatten_norm(np.eye(2), 0)


def test_psd_sqrt_clamps_rounding_noise():
    M = np.diag([4.0, -1e-17])
    root, eig_root, _ = psd_sqrt(M)
    np.testing.assert_allclose(eig_root, [0.0, 2.0])
    np.testing.assert_allclose(root, np.diag([2.0, 0.0]), atol=1e-15)


def test_pairwise_sum_handles_empty_and_odd():
    assert np.all(pairwise_sum([], (2, 2)) == 0)
    terms = [np.full((1, 1), float(i)) for i in range(5)]
    assert pairwise_sum(terms, (1, 1))[0, 0] == 10.0
