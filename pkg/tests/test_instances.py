import numpy as np
import pytest

from core.cayley import dissipative
from core.instances import (
    child_rng,
    ginibre,
    haar_unitary,
    positive_generator,
    random_dissipative,
    random_trig_poly,
    rank_deficient_contraction,
    rng_for,
    scalar_unitary,
    strict_contraction,
)
from core.linalg import op_norm, unitarity_residual
from utils.error_handler import ValidationError


def test_child_streams_are_reproducible_and_distinct():
    a = child_rng(5, 1, 2).standard_normal(4)
    np.testing.assert_array_equal(a, child_rng(5, 1, 2).standard_normal(4))
    assert not np.array_equal(a, child_rng(5, 1, 3).standard_normal(4))
    assert not np.array_equal(a, child_rng(6, 1, 2).standard_normal(4))


def test_rng_for_is_reproducible():
    np.testing.assert_array_equal(rng_for(11).integers(0, 100, 5), rng_for(11).integers(0, 100, 5))


def test_strict_contraction_norm(rng):
    T = strict_contraction(rng, 4)
    assert op_norm(T) == pytest.approx(1 / 1.05)


def test_haar_unitary(rng):
    assert unitarity_residual(haar_unitary(rng, 5)) <= 1e-13


def test_rank_deficient_singular_values(rng):
    T = rank_deficient_contraction(rng, 3, sigma_min=0.25)
    np.testing.assert_allclose(np.linalg.svd(T, compute_uv=False), [1.0, 1.0, 0.25], atol=1e-13)
    with pytest.raises(ValidationError):
        rank_deficient_contraction(rng, 3, sigma_min=1.0)


def test_positive_generator_spectrum(rng):
    A = positive_generator(rng, 4)
    assert np.all(A.spectrum >= 0.2 - 1e-12) and np.all(A.spectrum <= 1.0 + 1e-12)
    with pytest.raises(ValidationError):
        positive_generator(rng, 2, low=0.0)
    with pytest.raises(ValidationError):
        positive_generator(rng, 2, low=1.0, high=4.0)


def test_scalar_unitary(rng):
    U = scalar_unitary(rng, 3)
    assert abs(abs(U[0, 0]) - 1) <= 1e-15
    np.testing.assert_array_equal(U, U[0, 0] * np.eye(3))


def test_random_dissipative_imaginary_part(rng):
    A = dissipative(random_dissipative(rng, 4, rank=1))
    w = np.linalg.eigvalsh(A.im_part)
    assert w.min() == pytest.approx(-0.5)
    assert np.sum(np.abs(w) > 1e-12) == 1


def test_random_trig_poly_degree(rng):
    assert random_trig_poly(rng, 3).degree == 3
    assert random_trig_poly(rng, 0).degree == 0
    with pytest.raises(ValidationError):
        random_trig_poly(rng, -1)


def test_dimension_must_be_positive(rng):
    with pytest.raises(ValidationError):
        ginibre(rng, 0)
