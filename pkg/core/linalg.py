"""
복소 밀집 선형대수 기본 연산.

Hermitian 고유분해, defect 연산자, polar 분해, 주 유니터리 로그,
행렬 지수, trace / Schatten 노름. 모든 값은 complex128 dense 행렬이다.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple

import numpy as np
import numpy.typing as npt
import scipy.linalg

from config import SSF_RANK_TOL
from utils.error_handler import NotAContractionError, ValidationError

logger = logging.getLogger(__name__)

CMatrix = npt.NDArray[np.complex128]

CONTRACTION_TOL = 1e-12
HERMITIAN_TOL = 1e-8
GENERATOR_HERMITIAN_TOL = 1e-10
UNITARY_LOG_TOL = 1e-8
BRANCH_TIE_TOL = 1e-8
BRANCH_LEFT_TOL = 1e-12
EIG_NOISE_FACTOR = 32.0


def as_cmatrix(x, name: str = "matrix", square: bool = False) -> CMatrix:
    """입력을 읽기 전용 complex128 2차원 배열로 변환하고 유한성을 검사합니다."""
    a = np.array(x, dtype=np.complex128, copy=True)
    if a.ndim != 2 or a.shape[0] == 0 or a.shape[1] == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D matrix", shape=str(a.shape))
    if square and a.shape[0] != a.shape[1]:
        raise ValidationError(f"{name} must be square", shape=str(a.shape))
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{name} has non-finite entries")
    a.setflags(write=False)
    return a


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def adjoint(X: np.ndarray) -> np.ndarray:
    return X.conj().T


def op_norm(X: np.ndarray) -> float:
    if X.size == 0:
        return 0.0
    return float(np.linalg.norm(X, 2))


def unitarity_residual(U: np.ndarray) -> float:
    """max(‖U*U − I‖, ‖UU* − I‖)"""
    if U.size == 0:
        return 0.0
    eye = np.eye(U.shape[0])
    return max(op_norm(adjoint(U) @ U - eye), op_norm(U @ adjoint(U) - eye))


def herm_eig(M: np.ndarray) -> Tuple[np.ndarray, CMatrix]:
    """
    Hermitian 행렬의 고유분해.

    Args:
        M (np.ndarray): 정사각 Hermitian 행렬 (‖M − M*‖ ≤ 1e-8)

    Returns:
        Tuple[np.ndarray, CMatrix]: 오름차순 고유값, 유니터리 고유벡터 행렬 Q (M = Q diag(λ) Q*)
    """
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValidationError("herm_eig requires a square matrix", shape=str(M.shape))
    asym = op_norm(M - adjoint(M))
    if asym > HERMITIAN_TOL:
        raise ValidationError("herm_eig requires a Hermitian matrix", asymmetry=asym)
    w, Q = np.linalg.eigh((M + adjoint(M)) / 2)
    return w, Q


def _clamp_noise(w: np.ndarray, scale: float) -> np.ndarray:
    # 반올림 수준의 고유값은 0으로 본다
    floor = EIG_NOISE_FACTOR * np.finfo(float).eps * max(1.0, scale)
    return np.where(w > floor, w, 0.0)


def psd_sqrt(M: np.ndarray) -> Tuple[CMatrix, np.ndarray, CMatrix]:
    """PSD 제곱근. (루트 행렬, 루트 고유값, 고유벡터)를 돌려준다."""
    w, Q = herm_eig(M)
    root = np.sqrt(_clamp_noise(w, float(np.max(np.abs(w), initial=0.0))))
    return (Q * root) @ adjoint(Q), root, Q


def abs_op(X: np.ndarray) -> CMatrix:
    """|X| = (X*X)^{1/2}"""
    X = np.asarray(X, dtype=np.complex128)
    root, _, _ = psd_sqrt(adjoint(X) @ X)
    return root


@dataclass(frozen=True, eq=False)
class ContractionOp:
    """검증된 축약 연산자와 defect 연산자 D_T, defect 공간의 정규직교 기저."""

    matrix: CMatrix
    defect: CMatrix
    defect_basis: CMatrix
    rank_tol: float = SSF_RANK_TOL

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return self.defect_basis.shape[1]

    @cached_property
    def star(self) -> "ContractionOp":
        """T*의 ContractionOp (D_{T*} 와 그 기저)"""
        return defect(adjoint(self.matrix), self.rank_tol)

    @cached_property
    def polar(self) -> CMatrix:
        """V_T"""
        return polar_unitary(self.matrix)

    @cached_property
    def modulus(self) -> CMatrix:
        """|T|"""
        return abs_op(self.matrix)


def defect(T, rank_tol: float = SSF_RANK_TOL) -> ContractionOp:
    """
    축약 T의 defect 연산자 D_T = (I − T*T)^{1/2} 를 계산합니다.

    Args:
        T: 정사각 행렬 (‖T‖ ≤ 1 + 1e-12)
        rank_tol (float): defect basis에 포함할 D_T 고유값의 하한

    Returns:
        ContractionOp: 행렬, D_T, d×r defect basis
    """
    T = as_cmatrix(T, "T", square=True)
    norm = op_norm(T)
    if norm > 1.0 + CONTRACTION_TOL:
        raise NotAContractionError(f"operator norm {norm:.17g} exceeds 1", norm=norm)

    # 1. I − T*T 의 고유분해 (음수 및 잡음 수준 고유값은 0으로 절단)
    root, eig_root, Q = psd_sqrt(np.eye(T.shape[0]) - adjoint(T) @ T)

    # 2. rank_tol 보다 큰 고유값의 고유벡터가 ran D_T 의 기저
    basis = Q[:, eig_root > rank_tol]
    return ContractionOp(
        matrix=T,
        defect=_frozen((root + adjoint(root)) / 2),
        defect_basis=_frozen(basis),
        rank_tol=rank_tol,
    )


def polar_unitary(T) -> CMatrix:
    """
    T = V_T |T| 를 만족하는 유니터리 V_T.

    SVD T = U Σ W* 에서 V_T = U W*. 영 특이값 방향도 SVD가 고른
    정규직교 완성으로 결정적으로 채워진다 (T = 0 이면 V_T = I).
    """
    T = as_cmatrix(T, "T", square=True)
    U, _, Wh = np.linalg.svd(T)
    return _frozen(U @ Wh)


@dataclass(frozen=True, eq=False)
class HermitianGenerator:
    matrix: CMatrix
    spectrum: np.ndarray
    eigenvectors: CMatrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _check_branch(spectrum: np.ndarray) -> None:
    if spectrum.size == 0:
        return
    if spectrum.min() <= -np.pi + BRANCH_LEFT_TOL or spectrum.max() > np.pi + BRANCH_LEFT_TOL:
        raise ValidationError(
            "generator spectrum must lie in (-pi, pi]",
            min_eig=float(spectrum.min()), max_eig=float(spectrum.max()),
        )


def hermitian_generator(M, check_branch: bool = True) -> HermitianGenerator:
    M = as_cmatrix(M, "generator", square=True)
    asym = op_norm(M - adjoint(M))
    if asym > GENERATOR_HERMITIAN_TOL * max(1.0, op_norm(M)):
        raise ValidationError("generator must be Hermitian", asymmetry=asym)
    w, Q = herm_eig(M)
    if check_branch:
        _check_branch(w)
    return HermitianGenerator(matrix=_frozen((M + adjoint(M)) / 2), spectrum=_frozen(w), eigenvectors=_frozen(Q))


def principal_log_unitary(U) -> HermitianGenerator:
    """
    e^{iA} = U 이고 σ(A) ⊆ (−π, π] 인 Hermitian A.

    복소 Schur 분해 U = Z R Z* 의 대각 원소 각도를 주 가지로 잡는다.
    −1 은 +π 로 보낸다. 각도가 −π 에서 1e-8 이내면 경고하고, 1e-12 이내(수치적으로 −π)면 정확히 +π 로 둔다.
    """
    U = as_cmatrix(U, "U", square=True)
    residual = op_norm(adjoint(U) @ U - np.eye(U.shape[0]))
    if residual > UNITARY_LOG_TOL:
        raise ValidationError("principal_log_unitary requires a unitary matrix", residual=residual)

    R, Z = scipy.linalg.schur(U, output="complex")
    theta = np.angle(np.diag(R))
    tie = theta <= -np.pi + BRANCH_TIE_TOL
    if np.any(tie):
        logger.warning(f"[LOG] 고유값 {int(tie.sum())}개가 각도 -π 근처에 있음")
    theta = np.where(theta <= -np.pi + BRANCH_LEFT_TOL, np.pi, theta)

    order = np.argsort(theta, kind="stable")
    theta, Z = theta[order], Z[:, order]
    A = (Z * theta) @ adjoint(Z)
    return HermitianGenerator(
        matrix=_frozen((A + adjoint(A)) / 2),
        spectrum=_frozen(theta),
        eigenvectors=_frozen(Z),
    )


def unitary_exp(A: HermitianGenerator, s: float) -> CMatrix:
    """e^{isA} (고유분해 이용)"""
    Q = A.eigenvectors
    return (Q * np.exp(1j * s * A.spectrum)) @ adjoint(Q)


def pad_generator(A: HermitianGenerator, dim: int, index: Sequence[int]) -> HermitianGenerator:
    """A 를 dim 차원 공간의 좌표 index 위에 올리고 나머지는 0으로 채운다."""
    index = np.asarray(index, dtype=int)
    if index.size != A.dim:
        raise ValidationError("index size must match generator dimension", index=index.size, dim=A.dim)
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    matrix[np.ix_(index, index)] = A.matrix
    vectors = np.eye(dim, dtype=np.complex128)
    vectors[np.ix_(index, index)] = A.eigenvectors
    spectrum = np.zeros(dim)
    spectrum[index] = A.spectrum
    return HermitianGenerator(matrix=_frozen(matrix), spectrum=_frozen(spectrum), eigenvectors=_frozen(vectors))


def schatten_norm(X, n: int) -> float:
    """(Σ σᵢⁿ)^{1/n}"""
    if n is None or int(n) < 1:
        raise ValidationError("Schatten index must be a positive integer", n=n)
    X = np.asarray(X, dtype=np.complex128)
    if X.size == 0:
        return 0.0
    sigma = np.linalg.svd(X, compute_uv=False)
    return float(np.sum(sigma ** int(n)) ** (1.0 / int(n)))


def trace(X) -> complex:
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValidationError("trace requires a square matrix", shape=str(X.shape))
    return complex(np.trace(X))


def pairwise_sum(terms: List[np.ndarray], shape: Tuple[int, int]) -> CMatrix:
    """고정된 쌍별 누적 순서로 행렬 목록을 더한다."""
    if not terms:
        return np.zeros(shape, dtype=np.complex128)
    level = list(terms)
    while len(level) > 1:
        paired = [level[i] + level[i + 1] for i in range(0, len(level) - 1, 2)]
        if len(level) % 2:
            paired.append(level[-1])
        level = paired
    return level[0]
