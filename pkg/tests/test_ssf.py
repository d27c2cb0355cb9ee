import numpy as np
import pytest

from core.dilation import dilate_pair
from core.funcspace import TrigPoly
from core.instances import (
    haar_unitary,
    positive_generator,
    random_generator,
    random_trig_poly,
    rng_for,
    scalar_unitary,
    strict_contraction,
)
from core.linalg import hermitian_generator
from core.pairs import build_cc_pair, build_cu_pair
from core.ssf import (
    SpectralShiftFn,
    koplienko_check,
    ordered_map,
    remainder_traces,
    scaling_study,
    ssf_eval,
    ssf_fourier,
    trace_formula_check,
)
from utils.error_handler import IllConditionedFitError, ValidationError


def test_identical_pairs_have_zero_shift(rng):
    T, V = strict_contraction(rng, 3), haar_unitary(rng, 3)
    for frame in (build_cc_pair(T, T), build_cu_pair(V, V)):
        for n in (2, 3):
            xi = ssf_fourier(frame, n, 6)
            assert max(abs(c) for c in xi.coeffs.values()) <= 1e-12


def test_coefficients_cover_nonzero_indices(frame):
    xi = ssf_fourier(frame, 2, 4)
    assert list(xi.coeffs) == [-4, -3, -2, -1, 1, 2, 3, 4]


@pytest.mark.parametrize("q", [1, -1, 2, 4, -3])
@pytest.mark.parametrize("n", [2, 3])
def test_trace_formula_monomial(frame, q, n):
    xi = ssf_fourier(frame, n, 4)
    assert trace_formula_check(frame, TrigPoly.monomial(q), n, xi) <= 1e-12


def test_trace_formula_random_polynomials(frame, rng):
    for n in (2, 3, 4):
        xi = ssf_fourier(frame, n, 6)
        for _ in range(5):
            assert trace_formula_check(frame, random_trig_poly(rng, 6), n, xi) <= 1e-8


def test_trace_formula_half_identity_against_identity():
    frame = build_cu_pair(0.5 * np.eye(2), np.eye(2))
    xi = ssf_fourier(frame, 2, 5)
    phi = TrigPoly({-2: 0.5, 1: 1 - 1j, 5: 0.25j})
    assert trace_formula_check(frame, phi, 2, xi) <= 1e-10


def test_trace_formula_constant_function(frame):
    xi = ssf_fourier(frame, 2, 3)
    assert trace_formula_check(frame, TrigPoly.constant(4.0), 2, xi) == 0


def test_trace_formula_argument_errors(cc_frame):
    xi = ssf_fourier(cc_frame, 2, 3)
    with pytest.raises(ValidationError):
        trace_formula_check(cc_frame, TrigPoly.monomial(4), 2, xi)
    with pytest.raises(ValidationError):
        trace_formula_check(cc_frame, TrigPoly.monomial(1), 3, xi)
    with pytest.raises(ValidationError):
        remainder_traces(cc_frame, 1, 3)
    with pytest.raises(ValidationError):
        remainder_traces(cc_frame, 2, 0)


def test_threads_do_not_change_coefficients(cu_frame):
    serial = ssf_fourier(cu_frame, 3, 5, threads=1)
    pooled = ssf_fourier(cu_frame, 3, 5, threads=4)
    assert dict(serial.coeffs) == dict(pooled.coeffs)


def test_ordered_map_keeps_input_order():
    assert ordered_map(lambda x: x * x, range(10), threads=4) == [x * x for x in range(10)]
    assert ordered_map(str, [], threads=3) == []


def test_dilated_pair_gives_same_shift(frame):
    n, qmax = 2, 3
    compressed = ssf_fourier(frame, n, qmax)
    dilated = ssf_fourier(dilate_pair(frame, qmax + n + 2), n, qmax)
    for q in compressed.coeffs:
        assert abs(compressed.coeffs[q] - dilated.coeffs[q]) <= 1e-8


def test_eval_cosine_example():
    xi = SpectralShiftFn(order=2, qmax=1, coeffs={1: 1, -1: 1})
    values = ssf_eval(xi, [0.0, np.pi / 2, np.pi])
    np.testing.assert_allclose(values, [2, 0, -2], atol=1e-15)
    assert xi.l1_proxy() == pytest.approx(8.0, rel=1e-4)
    assert xi.conjugate_symmetry_defect() == 0


def test_eval_rejects_grid_outside_circle():
    xi = SpectralShiftFn(order=2, qmax=1, coeffs={1: 1})
    with pytest.raises(ValidationError):
        ssf_eval(xi, [-0.5, 1.0])
    with pytest.raises(ValidationError):
        ssf_eval(xi, [7.0])


def test_conjugate_symmetry_defect():
    assert SpectralShiftFn(2, 1, {1: 1j, -1: -1j}).conjugate_symmetry_defect() == 0
    assert SpectralShiftFn(2, 1, {1: 1.0}).conjugate_symmetry_defect() == 1.0


def test_shift_function_validation():
    with pytest.raises(ValidationError):
        SpectralShiftFn(order=1, qmax=2)
    with pytest.raises(ValidationError):
        SpectralShiftFn(order=2, qmax=2, coeffs={0: 1.0})
    with pytest.raises(ValidationError):
        SpectralShiftFn(order=2, qmax=2, coeffs={3: 1.0})
    with pytest.raises(ValidationError):
        SpectralShiftFn(order=2, qmax=2, coeffs={1: np.nan})


def test_json_form(cc_frame):
    xi = ssf_fourier(cc_frame, 2, 2)
    data = xi.to_json()
    assert data["order"] == 2 and data["qmax"] == 2
    assert [row[0] for row in data["coeffs"]] == [-2, -1, 1, 2]
    restored = SpectralShiftFn.from_json(data)
    assert dict(restored.coeffs) == dict(xi.coeffs)


def test_koplienko_form_matches_general_remainder(frame, rng):
    for _ in range(3):
        assert koplienko_check(frame, random_trig_poly(rng, 4)) <= 1e-12


@pytest.mark.parametrize("n", [2, 3])
def test_scaling_slope(rng, n):
    result = scaling_study(scalar_unitary(rng, 3), positive_generator(rng, 3), n, [1e-1, 1e-2, 1e-3], 1)
    assert abs(result.slope - n) <= 0.3
    assert len(result.magnitudes) == 3


@pytest.mark.parametrize("seed", range(6))
@pytest.mark.parametrize("n", [2, 3])
def test_scaling_slope_generic_inputs(seed, n):
    rng = rng_for(seed)
    U0, A = haar_unitary(rng, 3), random_generator(rng, 3)
    result = scaling_study(U0, A, n, [1e-1, 1e-2, 1e-3], 1)
    assert abs(result.slope - n) <= 0.3


def test_scaling_negative_power(rng):
    result = scaling_study(scalar_unitary(rng, 2), positive_generator(rng, 2), 2, [1e-1, 1e-2, 1e-3], -2)
    assert abs(result.slope - 2) <= 0.3


def test_scaling_zero_generator_is_ill_conditioned():
    with pytest.raises(IllConditionedFitError):
        scaling_study(np.eye(2), hermitian_generator(np.zeros((2, 2))), 2, [1e-1, 1e-2, 1e-3], 1)


def test_scaling_argument_errors(rng):
    A = positive_generator(rng, 2)
    with pytest.raises(ValidationError):
        scaling_study(np.eye(2), A, 2, [1e-1, 1e-2], 1)
    with pytest.raises(ValidationError):
        scaling_study(np.eye(2), A, 2, [1e-3, 1e-2, 1e-1], 1)
    with pytest.raises(ValidationError):
        scaling_study(0.5 * np.eye(2), A, 2, [1e-1, 1e-2, 1e-3], 1)
    with pytest.raises(ValidationError):
        scaling_study(np.eye(2), A, 2, [1e-1, 1e-2, 1e-3], 0)
