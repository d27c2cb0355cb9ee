"""
재현 가능한 무작위 인스턴스 생성기.

모든 난수는 numpy.random.Generator(PCG64) 에서 나오며, 인스턴스별 시드는
SeedSequence([seed, *keys]) 로 파생한다.
"""
import logging
from typing import Optional

import numpy as np
from numpy.random import PCG64, Generator, SeedSequence

from core.funcspace import TrigPoly
from core.linalg import CMatrix, HermitianGenerator, hermitian_generator
from utils.error_handler import ValidationError

logger = logging.getLogger(__name__)

STRICT_MARGIN = 1.05


def rng_for(seed: int) -> Generator:
    return Generator(PCG64(seed))


def child_rng(seed: int, *keys: int) -> Generator:
    """(seed, check, instance) 처럼 키를 덧붙인 독립 생성기"""
    return Generator(PCG64(SeedSequence([int(seed), *[int(k) for k in keys]])))


def ginibre(rng: Generator, d: int) -> CMatrix:
    if d < 1:
        raise ValidationError("dimension must be at least 1", dim=d)
    return ginibre_rect(rng, d, d)


def ginibre_rect(rng: Generator, rows: int, cols: int) -> np.ndarray:
    # 실수부와 허수부 각각 분산 1/2
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(rng: Generator, d: int) -> CMatrix:
    """Ginibre 행렬의 QR (R 대각 위상 보정)"""
    Q, R = np.linalg.qr(ginibre(rng, d))
    phases = np.diagonal(R) / np.abs(np.diagonal(R))
    return Q * phases


def strict_contraction(rng: Generator, d: int) -> CMatrix:
    """G / (1.05 ‖G‖), ‖T‖ < 1"""
    G = ginibre(rng, d)
    return G / (np.linalg.norm(G, 2) * STRICT_MARGIN)


def rank_deficient_contraction(rng: Generator, d: int, sigma_min: Optional[float] = None) -> CMatrix:
    """
    U diag(1, …, 1, σ) W*  형태의 축약 (rank D_T = 1).

    Args:
        rng (Generator): 난수 생성기
        d (int): 차원
        sigma_min (float | None): 마지막 특이값. None 이면 [0, 0.95] 균등 추출
    """
    if sigma_min is None:
        sigma_min = float(rng.uniform(0.0, 0.95))
    if not 0 <= sigma_min < 1:
        raise ValidationError("sigma_min must lie in [0, 1)", sigma_min=sigma_min)
    sigma = np.ones(d)
    sigma[-1] = sigma_min
    return (haar_unitary(rng, d) * sigma) @ haar_unitary(rng, d).conj().T


def random_hermitian(rng: Generator, d: int, norm: float = 1.0) -> CMatrix:
    G = ginibre(rng, d)
    H = (G + G.conj().T) / 2
    return H * (norm / max(np.linalg.norm(H, 2), np.finfo(float).tiny))


def random_generator(rng: Generator, d: int, norm: float = 1.0) -> HermitianGenerator:
    """‖A‖ ≤ norm (< π) 인 Hermitian 생성자"""
    return hermitian_generator(random_hermitian(rng, d, norm))


def positive_generator(rng: Generator, d: int, low: float = 0.2, high: float = 1.0) -> HermitianGenerator:
    """고유값이 [low, high] 균등, 고유벡터가 Haar 인 생성자 (tr A^j > 0)"""
    if not 0 < low < high < np.pi:
        raise ValidationError("need 0 < low < high < pi", low=low, high=high)
    Q = haar_unitary(rng, d)
    w = rng.uniform(low, high, d)
    return hermitian_generator((Q * w) @ Q.conj().T)


def scalar_unitary(rng: Generator, d: int) -> CMatrix:
    """e^{iθ}I, θ 균등"""
    return np.exp(1j * rng.uniform(0.0, 2 * np.pi)) * np.eye(d, dtype=np.complex128)


def random_dissipative(rng: Generator, d: int, rank: int = 1) -> CMatrix:
    """H₀ − i c P*P, H₀ Hermitian, P 는 rank×d 복소 Gaussian, c = 1/(2‖P*P‖)"""
    H = random_hermitian(rng, d)
    P = ginibre_rect(rng, rank, d)
    PP = P.conj().T @ P
    return H - 1j * PP / (2 * np.linalg.norm(PP, 2))


def random_trig_poly(rng: Generator, degree: int) -> TrigPoly:
    """계수 ~ 복소 Gaussian / (1 + |k|)², |k| ≤ degree"""
    if degree < 0:
        raise ValidationError("degree must be nonnegative", degree=degree)
    coeffs = {}
    for k in range(-degree, degree + 1):
        z = complex(rng.standard_normal(), rng.standard_normal())
        coeffs[k] = z / (1 + abs(k)) ** 2
    return TrigPoly(coeffs)

