"""
보간 유니터리와 생성자.

(축약, 유니터리) 쌍에는 ℋ⊕𝒟_T 위의 𝓛, (축약, 축약) 쌍에는
ℋ⊕𝒟_{T₀}⊕𝒟_{T₁} 위의 블록 K 를 만든다. 결손 공간은 정규직교 기저로 표현한다.
"""
import dataclasses
import logging
from dataclasses import dataclass
from types import MappingProxyType
from typing import Any, Dict, Mapping, Union

import numpy as np

from core.linalg import (
    CMatrix,
    ContractionOp,
    HermitianGenerator,
    _frozen,
    adjoint,
    as_cmatrix,
    defect,
    op_norm,
    principal_log_unitary,
    schatten_norm,
    unitarity_residual,
    unitary_exp,
)
from core.paths import CONNECTION_TOL, MultiplicativePath, make_path, path_value
from utils.error_handler import PathConnectionError, ValidationError

logger = logging.getLogger(__name__)

UNITARY_INPUT_TOL = 1e-10
UNITARITY_TOL = 1e-10
LOG_RECONSTRUCTION_TOL = 1e-9
KERNEL_TOL = 1e-10
IDENTICAL_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class PairFrame:
    start: ContractionOp
    end: ContractionOp
    interp_unitary: CMatrix
    generator: HermitianGenerator
    path: MultiplicativePath
    extended_dim: int
    kind: str
    residuals: Mapping[str, float]
    trivial: bool = False

    @property
    def end_matrix(self) -> CMatrix:
        return self.end.matrix


def _as_contraction(T: Union[ContractionOp, np.ndarray]) -> ContractionOp:
    return T if isinstance(T, ContractionOp) else defect(T)


def _finish(
    kind: str, start: ContractionOp, end: ContractionOp, W: np.ndarray, base: np.ndarray, trivial: bool = False
) -> PairFrame:
    # 1. 주 로그 생성자
    generator = principal_log_unitary(W)

    # 2. 압축 경로 (embed = 앞 d 좌표)
    path = make_path(generator, base, start=start.matrix)

    residuals = {
        "unitarity": unitarity_residual(W),
        "log_reconstruction": op_norm(unitary_exp(generator, 1.0) - W),
        "start_gap": op_norm(path_value(path, 0.0) - start.matrix),
        "end_gap": op_norm(path_value(path, 1.0) - end.matrix),
    }
    if residuals["unitarity"] > UNITARITY_TOL:
        logger.warning(f"[PAIR] {kind} 보간 유니터리 잔차 {residuals['unitarity']:.3e} > {UNITARITY_TOL:g}")
    if residuals["end_gap"] > CONNECTION_TOL:
        raise PathConnectionError(f"{kind} path does not reach the end operator", gap=residuals["end_gap"])

    logger.debug(f"[PAIR] {kind} 쌍 생성: 확장 차원 {W.shape[0]}, 잔차 {residuals}")
    return PairFrame(
        start=start,
        end=end,
        interp_unitary=_frozen(W),
        generator=generator,
        path=path,
        extended_dim=W.shape[0],
        kind=kind,
        residuals=MappingProxyType(residuals),
        trivial=trivial,
    )


def build_cu_pair(T: Union[ContractionOp, np.ndarray], V) -> PairFrame:
    """
    (축약 T, 유니터리 V) 쌍의 𝓛 을 만듭니다.

    𝓛 = [[T V*, −D_{T*} V_T Q], [Q* D_T V*, Q* T* V_T Q]]  (Q: D_T 의 defect basis)

    Args:
        T (ContractionOp | np.ndarray): 끝점 축약
        V: 시작점 유니터리 (같은 차원)

    Returns:
        PairFrame: 경로 V_s = P_H e^{isL} V 를 담은 프레임
    """
    T = _as_contraction(T)
    V = as_cmatrix(V, "V", square=True)
    if V.shape != T.matrix.shape:
        raise ValidationError("T and V must have the same dimension", T=T.dim, V=V.shape[0])
    residual = unitarity_residual(V)
    if residual > UNITARY_INPUT_TOL:
        raise ValidationError("V must be unitary", residual=residual)

    Q = T.defect_basis
    Vs = adjoint(V)
    VT = T.polar
    L = np.block([
        [T.matrix @ Vs, -T.star.defect @ VT @ Q],
        [adjoint(Q) @ T.defect @ Vs, adjoint(Q) @ adjoint(T.matrix) @ VT @ Q],
    ])
    base = np.vstack([V, np.zeros((T.rank, T.dim))])
    return _finish("cu", defect(V, T.rank_tol), T, L, base)


def build_cc_pair(
    T0: Union[ContractionOp, np.ndarray],
    T1: Union[ContractionOp, np.ndarray],
    collapse_identical: bool = True,
) -> PairFrame:
    """
    (축약 T₀, 축약 T₁) 쌍의 블록 K 를 ℋ⊕𝒟_{T₀}⊕𝒟_{T₁} 위에 만듭니다.
    경로의 base 는 [T₀; Q₀* D_{T₀}; 0].

    collapse_identical 이면 T₁ = T₀ 일 때 K = I (상수 경로) 를 쓴다.
    """
    T0 = _as_contraction(T0)
    T1 = _as_contraction(T1)
    if T0.dim != T1.dim:
        raise ValidationError("T0 and T1 must have the same dimension", T0=T0.dim, T1=T1.dim)

    Q0, Q1 = T0.defect_basis, T1.defect_basis
    A0, A1 = T0.matrix, T1.matrix
    r0, r1 = T0.rank, T1.rank
    K = np.block([
        [A1 @ adjoint(A0), A1 @ T0.defect @ Q0, -T1.star.defect @ T1.polar @ Q1],
        [-adjoint(Q0) @ adjoint(T0.polar) @ T0.star.defect, adjoint(Q0) @ T0.modulus @ Q0, np.zeros((r0, r1))],
        [adjoint(Q1) @ T1.defect @ adjoint(A0), adjoint(Q1) @ T1.defect @ T0.defect @ Q0,
         adjoint(Q1) @ adjoint(A1) @ T1.polar @ Q1],
    ])
    base = np.vstack([A0, adjoint(Q0) @ T0.defect, np.zeros((r1, T0.dim))])
    trivial = collapse_identical and op_norm(A1 - A0) <= IDENTICAL_TOL
    if trivial:
        logger.info("[PAIR] T1 = T0 → 항등 보간 (상수 경로)")
        K = np.eye(K.shape[0], dtype=np.complex128)
    return _finish("cc", T0, T1, K, base, trivial=trivial)


def rotate_basis(T: ContractionOp, omega) -> ContractionOp:
    """defect basis Q 를 QΩ 로 바꾼 ContractionOp"""
    omega = as_cmatrix(omega, "omega", square=True) if T.rank else np.zeros((0, 0), dtype=np.complex128)
    if omega.shape[0] != T.rank:
        raise ValidationError("gauge rotation must be r×r", rank=T.rank, omega=omega.shape[0])
    return dataclasses.replace(T, defect_basis=_frozen(T.defect_basis @ omega))


def regauge(frame: PairFrame, omega_start=None, omega_end=None) -> PairFrame:
    """defect basis 를 회전한 같은 쌍의 프레임 (경로 값은 변하지 않아야 한다)"""
    end = frame.end if omega_end is None else rotate_basis(frame.end, omega_end)
    if frame.kind == "cu":
        return build_cu_pair(end, frame.start.matrix)
    start = frame.start if omega_start is None else rotate_basis(frame.start, omega_start)
    return build_cc_pair(start, end)


def _kernel_dim(X: np.ndarray) -> int:
    sigma = np.linalg.svd(X, compute_uv=False)
    return int(np.sum(sigma < KERNEL_TOL))


def check_hypotheses(T0: Union[ContractionOp, np.ndarray], T1: Union[ContractionOp, np.ndarray], n: int) -> Dict[str, Any]:
    """
    (T₀, T₁) 쌍의 가정 보고서.

    Returns:
        Dict[str, Any]: 각 T_j, T_j* 의 kernel 차원, 차원 일치 여부,
        ‖T₁ − T₀‖_n, ‖D_{T_j}‖_n
    """
    T0 = _as_contraction(T0)
    T1 = _as_contraction(T1)
    report = {"n": n}
    for name, T in (("T0", T0), ("T1", T1)):
        report[f"dim_ker_{name}"] = _kernel_dim(T.matrix)
        report[f"dim_ker_{name}_star"] = _kernel_dim(adjoint(T.matrix))
        report[f"schatten_defect_{name}"] = schatten_norm(T.defect, n)
    report["kernel_dims_equal"] = all(
        report[f"dim_ker_{name}"] == report[f"dim_ker_{name}_star"] for name in ("T0", "T1")
    )
    report["schatten_difference"] = schatten_norm(T1.matrix - T0.matrix, n)
    return report
