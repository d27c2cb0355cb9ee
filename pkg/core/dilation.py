"""
절단된 벡터값 Hardy 공간 위의 유니터리 팽창과 그 확장, trace 이전 검증.

좌표 배치: [minus: N·r₋ (모드 우선)] [H: d] [plus: N·r₊]
minus 블록은 후진 이동 S*, plus 블록은 전진 이동 S 로 움직이며,
H 열은 minus 블록으로 들어가지 않고 plus 블록은 H 로 돌아오지 않는다.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Dict, NamedTuple, Union

import numpy as np

from core.funcspace import TrigPoly
from core.linalg import (
    CMatrix,
    ContractionOp,
    _frozen,
    abs_op,
    adjoint,
    as_cmatrix,
    defect,
    op_norm,
    pad_generator,
    polar_unitary,
    psd_sqrt,
    trace,
    unitarity_residual,
)
from core.pairs import PairFrame
from core.paths import MultiplicativePath, first_coordinates, make_path, remainder
from utils.error_handler import ValidationError

logger = logging.getLogger(__name__)

UNITARY_INPUT_TOL = 1e-10
INVERTIBLE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class HardyFrame:
    modes: int
    contraction: ContractionOp
    fiber_minus: CMatrix
    fiber_plus: CMatrix

    @property
    def d(self) -> int:
        return self.contraction.dim

    @property
    def r_minus(self) -> int:
        return self.fiber_minus.shape[1]

    @property
    def r_plus(self) -> int:
        return self.fiber_plus.shape[1]

    @property
    def total_dim(self) -> int:
        return self.modes * (self.r_minus + self.r_plus) + self.d

    def minus_index(self, mode: int) -> np.ndarray:
        return np.arange(mode * self.r_minus, (mode + 1) * self.r_minus)

    def h_index(self) -> np.ndarray:
        offset = self.modes * self.r_minus
        return np.arange(offset, offset + self.d)

    def plus_index(self, mode: int) -> np.ndarray:
        offset = self.modes * self.r_minus + self.d
        return np.arange(offset + mode * self.r_plus, offset + (mode + 1) * self.r_plus)

    def minus_block(self) -> np.ndarray:
        return np.arange(self.modes * self.r_minus)

    def plus_block(self) -> np.ndarray:
        offset = self.modes * self.r_minus + self.d
        return np.arange(offset, offset + self.modes * self.r_plus)

    def complement_index(self) -> np.ndarray:
        """𝓕 ⊖ ℋ 좌표"""
        return np.concatenate([self.minus_block(), self.plus_block()])

    def outside_modes(self, max_mode: int) -> np.ndarray:
        """Hardy 모드 번호가 max_mode 이상인 좌표"""
        upper = range(max(max_mode, 0), self.modes)
        parts = [self.minus_index(m) for m in upper] + [self.plus_index(m) for m in upper]
        return np.concatenate(parts) if parts else np.zeros(0, dtype=int)

    def h_embedding(self) -> CMatrix:
        E = np.zeros((self.total_dim, self.d), dtype=np.complex128)
        E[self.h_index(), np.arange(self.d)] = 1.0
        return E

    @cached_property
    def shift_plus(self) -> CMatrix:
        """plus 블록 위의 전진 이동 S (모드 m → m+1, 최상위 모드는 사라짐)"""
        return np.kron(np.eye(self.modes, k=-1), np.eye(self.r_plus))

    @cached_property
    def shift_minus_adjoint(self) -> CMatrix:
        """minus 블록 위의 후진 이동 S* (모드 m+1 → m)"""
        return np.kron(np.eye(self.modes, k=1), np.eye(self.r_minus))


def hardy_frame(T: Union[ContractionOp, np.ndarray], N: int) -> HardyFrame:
    if N < 1:
        raise ValidationError("truncation level must be at least 1", N=N)
    T = T if isinstance(T, ContractionOp) else defect(T)
    return HardyFrame(
        modes=int(N),
        contraction=T,
        fiber_minus=T.star.defect_basis,
        fiber_plus=T.defect_basis,
    )


def _assemble(frame: HardyFrame, middle, h_from_minus, plus_from_minus, plus_from_h) -> CMatrix:
    U = np.zeros((frame.total_dim, frame.total_dim), dtype=np.complex128)
    minus, plus, h = frame.minus_block(), frame.plus_block(), frame.h_index()
    m0, p0 = frame.minus_index(0), frame.plus_index(0)

    U[np.ix_(minus, minus)] = frame.shift_minus_adjoint
    U[np.ix_(plus, plus)] = frame.shift_plus
    U[np.ix_(h, h)] = middle
    U[np.ix_(h, m0)] = h_from_minus
    U[np.ix_(p0, m0)] = plus_from_minus
    U[np.ix_(p0, h)] = plus_from_h
    return _frozen(U)


def dilation_matrix(frame: HardyFrame) -> CMatrix:
    T = frame.contraction
    Qm, Qp = frame.fiber_minus, frame.fiber_plus
    return _assemble(
        frame,
        middle=T.matrix,
        h_from_minus=T.star.defect @ Qm,
        plus_from_minus=-adjoint(Qp) @ adjoint(T.matrix) @ Qm,
        plus_from_h=adjoint(Qp) @ T.defect,
    )


def dilate(T: Union[ContractionOp, np.ndarray], N: int) -> CMatrix:
    """
    축약 T 의 절단 유니터리 팽창 U_T.

    [[S*₋, 0, 0], [D_{T*}P₋, T, 0], [−T*P₋, D_T, S₊]]

    Args:
        T (ContractionOp | np.ndarray): 축약
        N (int): Hardy 절단 모드 수 (≥ 1)

    Returns:
        CMatrix: HardyFrame 좌표의 total_dim × total_dim 행렬
    """
    return dilation_matrix(hardy_frame(T, N))


def extend_unitary(V, frame: HardyFrame) -> CMatrix:
    """U₀ = [[S*₋, 0, 0], [0, V, 0], [−V_T* P₋, 0, S₊]]"""
    V = as_cmatrix(V, "V", square=True)
    if V.shape[0] != frame.d:
        raise ValidationError("V must have the frame's dimension", V=V.shape[0], d=frame.d)
    residual = unitarity_residual(V)
    if residual > UNITARY_INPUT_TOL:
        raise ValidationError("V must be unitary", residual=residual)
    VT = frame.contraction.polar
    return _assemble(
        frame,
        middle=V,
        h_from_minus=np.zeros((frame.d, frame.r_minus)),
        plus_from_minus=-adjoint(frame.fiber_plus) @ adjoint(VT) @ frame.fiber_minus,
        plus_from_h=np.zeros((frame.r_plus, frame.d)),
    )


def extend_contraction(T1: Union[ContractionOp, np.ndarray], frame: HardyFrame) -> CMatrix:
    """𝓕 위에서 T₁ 을 확장한 축약 [[S*₋, 0, 0], [0, T₁, 0], [−V_{T₀}* P₋, 0, S₊]]"""
    T1 = as_cmatrix(T1.matrix if isinstance(T1, ContractionOp) else T1, "T1", square=True)
    if T1.shape[0] != frame.d:
        raise ValidationError("T1 must have the frame's dimension", T1=T1.shape[0], d=frame.d)
    VT0 = frame.contraction.polar
    return _assemble(
        frame,
        middle=T1,
        h_from_minus=np.zeros((frame.d, frame.r_minus)),
        plus_from_minus=-adjoint(frame.fiber_plus) @ adjoint(VT0) @ frame.fiber_minus,
        plus_from_h=np.zeros((frame.r_plus, frame.d)),
    )


def power_compression_gap(frame: HardyFrame, max_power: int, use_adjoint: bool = False) -> float:
    """max_{0≤n≤max_power} ‖P_H U_Tⁿ|_H − Tⁿ‖ (use_adjoint 이면 U_T*, T*)"""
    U = dilation_matrix(frame)
    T = frame.contraction.matrix
    if use_adjoint:
        U, T = adjoint(U), adjoint(T)
    h = frame.h_index()
    Un = np.eye(frame.total_dim, dtype=np.complex128)
    Tn = np.eye(frame.d, dtype=np.complex128)
    worst = 0.0
    for _ in range(max_power + 1):
        worst = max(worst, op_norm(Un[np.ix_(h, h)] - Tn))
        Un, Tn = U @ Un, T @ Tn
    return worst


def extension_defect_report(T1: Union[ContractionOp, np.ndarray], frame: HardyFrame) -> Dict[str, Any]:
    """
    𝓕 위 확장 축약 T 의 결손 구조.

    D_T 중간 블록 = D_{T₁}, 나머지 (plus 최상위 모드 제외) 는 0,
    |T| 중간 블록 = |T₁|, |T*| 중간 블록 = |T₁*|,
    T₁ 이 가역이면 V_T 중간 블록 = V_{T₁}.
    """
    T1 = T1 if isinstance(T1, ContractionOp) else defect(T1)
    T = extend_contraction(T1, frame)
    h = frame.h_index()
    interior = np.setdiff1d(np.arange(frame.total_dim), frame.plus_index(frame.modes - 1))
    off = np.setdiff1d(interior, h)

    D, _, _ = psd_sqrt(np.eye(frame.total_dim) - adjoint(T) @ T)
    modulus = abs_op(T)
    modulus_star = abs_op(adjoint(T))

    report = {
        "defect_middle": op_norm(D[np.ix_(h, h)] - T1.defect),
        "defect_outside": op_norm(D[np.ix_(off, off)]) if off.size else 0.0,
        "modulus_middle": op_norm(modulus[np.ix_(h, h)] - T1.modulus),
        "modulus_star_middle": op_norm(modulus_star[np.ix_(h, h)] - T1.star.modulus),
        "polar_middle": None,
    }
    sigma_min = float(np.linalg.svd(T1.matrix, compute_uv=False).min())
    if sigma_min > INVERTIBLE_TOL:
        report["polar_middle"] = op_norm(polar_unitary(T)[np.ix_(h, h)] - T1.polar)
    return report


@dataclass(frozen=True, eq=False)
class DilatedPair:
    """팽창 공간 위의 쌍: 경로 s ↦ P_𝓕 e^{isA} base 는 start 에서 end 로 간다."""

    end: CMatrix
    start: CMatrix
    path: MultiplicativePath
    frame: HardyFrame
    kind: str

    @property
    def end_matrix(self) -> CMatrix:
        return self.end


def dilate_cu_pair(pair: PairFrame, N: int) -> DilatedPair:
    """(U_T, U₀) 쌍과 𝓛 의 0-확장 생성자"""
    if pair.kind != "cu":
        raise ValidationError("dilate_cu_pair requires a contraction-unitary frame", kind=pair.kind)
    frame = hardy_frame(pair.end, N)
    U1 = dilation_matrix(frame)
    U0 = extend_unitary(pair.start.matrix, frame)
    index = np.concatenate([frame.h_index(), frame.plus_index(0)])
    generator = pad_generator(pair.generator, frame.total_dim, index)
    path = make_path(generator, U0, embed=np.eye(frame.total_dim), start=U0)
    logger.debug(f"[DILATE] cu 팽창: N={N}, 차원 {frame.total_dim}")
    return DilatedPair(end=U1, start=U0, path=path, frame=frame, kind="cu")


def dilate_cc_pair(pair: PairFrame, N: int) -> DilatedPair:
    """
    (T₀, T₁) 쌍의 팽창: T₀ 의 프레임 𝓕 위에서 U_{T₀} 에서 확장 축약 T 로 가는 경로.
    K 는 H ⊕ plus 모드 0 ⊕ 𝒟_{T₁} 좌표에 놓이며 두 번째 단계 공간은 만들지 않는다.
    """
    if pair.kind != "cc":
        raise ValidationError("dilate_cc_pair requires a contraction-contraction frame", kind=pair.kind)
    frame = hardy_frame(pair.start, N)
    r1 = pair.end.rank
    total = frame.total_dim
    start = dilation_matrix(frame)
    # 항등 보간이면 팽창 경로도 상수
    end = start if pair.trivial else extend_contraction(pair.end, frame)

    index = np.concatenate([frame.h_index(), frame.plus_index(0), np.arange(total, total + r1)])
    generator = pad_generator(pair.generator, total + r1, index)
    base = np.vstack([start, np.zeros((r1, total))])
    path = make_path(generator, base, embed=first_coordinates(total + r1, total), start=start)
    logger.debug(f"[DILATE] cc 팽창: N={N}, 차원 {total} + {r1}")
    return DilatedPair(end=end, start=start, path=path, frame=frame, kind="cc")


def dilate_pair(pair: PairFrame, N: int) -> DilatedPair:
    return dilate_cu_pair(pair, N) if pair.kind == "cu" else dilate_cc_pair(pair, N)


class TraceTransfer(NamedTuple):
    lhs: complex
    rhs: complex
    gap: float
    corner_trace: float
    corner_block_norm: float
    support_leak: float


def required_modes(phi: TrigPoly, n: int) -> int:
    return phi.degree + n + 2


def remainder_support_leak(R: np.ndarray, frame: HardyFrame, max_mode: int) -> float:
    """모드 ≥ max_mode 좌표의 행 또는 열에 있는 잔차 항목의 최대 크기"""
    outside = frame.outside_modes(max_mode)
    if outside.size == 0:
        return 0.0
    return float(max(np.abs(R[outside, :]).max(), np.abs(R[:, outside]).max()))


def verify_trace_transfer(
    compressed: PairFrame,
    dilated: DilatedPair,
    phi: TrigPoly,
    n: int,
    method: str = "auto",
) -> TraceTransfer:
    """
    압축 잔차의 trace 와 팽창 쌍 잔차의 trace 를 비교합니다.

    Args:
        compressed (PairFrame): ℋ 위의 쌍
        dilated (DilatedPair): dilate_pair 로 만든 팽창 쌍
        phi (TrigPoly): 삼각다항식
        n (int): 잔차 차수 (≥ 2)

    Returns:
        TraceTransfer: lhs, rhs, gap 과 (𝓕⊖ℋ) 구석 블록 진단값
    """
    frame = dilated.frame
    needed = required_modes(phi, n)
    if frame.modes < needed:
        raise ValidationError("insufficient truncation", modes=frame.modes, required=needed)

    R_c = remainder(compressed.path, compressed.end_matrix, phi, n, method)
    R_f = remainder(dilated.path, dilated.end, phi, n, method)
    lhs, rhs = trace(R_c), trace(R_f)

    minus, plus = frame.minus_block(), frame.plus_block()
    comp = frame.complement_index()
    corner_trace = abs(trace(R_f[np.ix_(comp, comp)])) if comp.size else 0.0
    corner_block_norm = max(
        op_norm(R_f[np.ix_(minus, minus)]) if minus.size else 0.0,
        op_norm(R_f[np.ix_(plus, plus)]) if plus.size else 0.0,
    )
    return TraceTransfer(
        lhs=lhs,
        rhs=rhs,
        gap=abs(lhs - rhs),
        corner_trace=float(corner_trace),
        corner_block_norm=float(corner_block_norm),
        support_leak=remainder_support_leak(R_f, frame, phi.degree + n),
    )
