import numpy as np
import pytest

from core.instances import child_rng, haar_unitary, rng_for, strict_contraction
from core.pairs import build_cc_pair, build_cu_pair


@pytest.fixture
def rng():
    return rng_for(20240611)


@pytest.fixture
def cu_frame():
    rng = child_rng(7, 0)
    return build_cu_pair(strict_contraction(rng, 3), haar_unitary(rng, 3))


@pytest.fixture
def cc_frame():
    rng = child_rng(7, 1)
    return build_cc_pair(strict_contraction(rng, 3), strict_contraction(rng, 3))


@pytest.fixture(params=["cu", "cc"])
def frame(request, cu_frame, cc_frame):
    return cu_frame if request.param == "cu" else cc_frame


def random_hermitian_matrix(rng, d):
    G = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (G + G.conj().T) / 2


def assert_small(value, tol):
    assert np.all(np.asarray(value) <= tol), f"{value} > {tol}"
