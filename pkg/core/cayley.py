"""
소산 행렬과 축약 사이의 Cayley 변환 계층.

T = −(A+i)(A−i)^{-1}, A = i − 2i(T+1)^{-1}. 원에서 실수축으로의 변수 변환
λ = −tan(t/2) 에 대한 p_{k,q} 다항식 점화식, 실수축 SSF η_n, ζ_n 구성.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import hermite
from scipy.integrate import cumulative_trapezoid, trapezoid

from core.funcspace import TrigPoly, eval_on_matrix
from core.linalg import (
    CMatrix,
    ContractionOp,
    _frozen,
    abs_op,
    adjoint,
    as_cmatrix,
    defect,
    herm_eig,
    op_norm,
    psd_sqrt,
    schatten_norm,
)
from core.pairs import build_cc_pair, check_hypotheses
from core.paths import path_series, path_value, remainder, CONTRACTIVE_SAMPLES
from core.ssf import SpectralShiftFn, ssf_eval
from utils.error_handler import ConditioningError, SpectrumError, ValidationError

logger = logging.getLogger(__name__)

RealPolynomial = Polynomial
PkqTable = Dict[Tuple[int, int], RealPolynomial]

DISSIPATIVE_TOL = 1e-10
RESOLVENT_TOL = 1e-12
MINUS_ONE_TOL = 1e-10
POLE_DISTANCE = 0.1
GRID_UNIFORM_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class DissipativeOp:
    matrix: CMatrix
    im_part: CMatrix

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _sigma_min(X: np.ndarray) -> float:
    return float(np.linalg.svd(X, compute_uv=False).min())


def dissipative(A) -> DissipativeOp:
    """
    소산 행렬 검증: Im A = (A − A*)/2i 의 고유값 ≤ 1e-10, (A − i) 가역.

    Args:
        A: 정사각 복소 행렬

    Returns:
        DissipativeOp: 행렬과 허수부
    """
    A = as_cmatrix(A, "A", square=True)
    im_part = (A - adjoint(A)) / 2j
    w, _ = herm_eig(im_part)
    if w.max() > DISSIPATIVE_TOL:
        raise ValidationError("matrix is not dissipative (Im A has a positive eigenvalue)", max_eig=float(w.max()))
    smin = _sigma_min(A - 1j * np.eye(A.shape[0]))
    if smin <= RESOLVENT_TOL:
        raise ConditioningError("A - i is numerically singular", sigma_min=smin)
    return DissipativeOp(matrix=A, im_part=_frozen((im_part + adjoint(im_part)) / 2))


def _as_dissipative(A: Union[DissipativeOp, np.ndarray]) -> DissipativeOp:
    return A if isinstance(A, DissipativeOp) else dissipative(A)


def _cayley_matrix(A: np.ndarray) -> np.ndarray:
    eye = np.eye(A.shape[0])
    # X (A − i) = (A + i)
    return -np.linalg.solve((A - 1j * eye).T, (A + 1j * eye).T).T


def cayley(A: Union[DissipativeOp, np.ndarray]) -> ContractionOp:
    """T = −(A+i)(A−i)^{-1}"""
    A = _as_dissipative(A)
    smin = _sigma_min(A.matrix - 1j * np.eye(A.dim))
    if smin <= RESOLVENT_TOL:
        raise ConditioningError("A - i is numerically singular", sigma_min=smin)
    return defect(_cayley_matrix(A.matrix))


def inverse_cayley(T: Union[ContractionOp, np.ndarray]) -> DissipativeOp:
    """A = i − 2i(T+1)^{-1}. −1 ∈ σ(T) 이면 SpectrumError."""
    T = T if isinstance(T, ContractionOp) else defect(T)
    eye = np.eye(T.dim)
    smin = _sigma_min(T.matrix + eye)
    if smin <= MINUS_ONE_TOL:
        raise SpectrumError("-1 is (numerically) in the spectrum of T", sigma_min=smin)
    A = 1j * eye - 2j * np.linalg.inv(T.matrix + eye)
    return dissipative(A)


def defect_identities_check(A: Union[DissipativeOp, np.ndarray]) -> Dict[str, float]:
    """
    D_T = 2|(−Im A)^{1/2}(A−i)^{-1}|, D_{T*} = 2|(−Im A)^{1/2}(A*+i)^{-1}| 잔차.
    """
    A = _as_dissipative(A)
    T = cayley(A)
    eye = np.eye(A.dim)
    root, _, _ = psd_sqrt(-A.im_part)
    rhs = 2 * abs_op(root @ np.linalg.inv(A.matrix - 1j * eye))
    rhs_star = 2 * abs_op(root @ np.linalg.inv(adjoint(A.matrix) + 1j * eye))
    return {
        "defect": op_norm(T.defect - rhs),
        "defect_star": op_norm(T.star.defect - rhs_star),
    }


def pkq_polynomials(nmax: int) -> PkqTable:
    """
    p_{k,q} (1 ≤ q ≤ nmax, 0 ≤ k ≤ q−1) 점화식 표.

    d^q/dt^q φ(e^{it}) = Σ_k p_{k,q}(λ) ψ^{(q−k)}(λ) · dλ/dt,  λ = −tan(t/2)
    계수는 모두 dyadic 유리수라 반올림 없이 계산된다.
    """
    if nmax < 1:
        raise ValidationError("nmax must be at least 1", nmax=nmax)
    one_plus = Polynomial([1.0, 0.0, 1.0])
    lam = Polynomial([0.0, 1.0])
    table = {(0, 1): Polynomial([1.0])}
    for q in range(2, nmax + 1):
        for k in range(q):
            if k == 0:
                p = -0.5 * one_plus * table[(0, q - 1)]
            elif k < q - 1:
                prev, prev_low = table[(k, q - 1)], table[(k - 1, q - 1)]
                p = -0.5 * (one_plus * (prev + prev_low.deriv()) + 2 * lam * prev_low)
            else:
                prev_low = table[(q - 2, q - 1)]
                p = -0.5 * (one_plus * prev_low.deriv() + 2 * lam * prev_low)
            table[(k, q)] = p.trim()
    return table


def poly_degree(p: RealPolynomial) -> int:
    coef = p.trim().coef
    if len(coef) == 1 and coef[0] == 0:
        return -1
    return len(coef) - 1


def pkq_table_json(table: PkqTable) -> List[Dict[str, Any]]:
    return [
        {"q": q, "k": k, "coefficients": [float(c) for c in table[(k, q)].coef]}
        for (k, q) in sorted(table, key=lambda kq: (kq[1], kq[0]))
    ]


def _mobius_laurent(m: int) -> Tuple[complex, List[complex]]:
    # ψ(λ) = ((i+λ)/(i−λ))^m = Σ_j c_j (λ − center)^{−j}
    M = abs(m)
    center, shift = (1j, 2j) if m >= 0 else (-1j, -2j)
    coeffs = [(-1) ** M * math.comb(M, j) * shift ** j for j in range(M + 1)]
    return center, coeffs


def psi_derivative(m: int, order: int, lam) -> np.ndarray:
    """ψ(λ) = ((i+λ)/(i−λ))^m 의 order 계 도함수 (Laurent 전개의 항별 미분)"""
    lam = np.asarray(lam, dtype=float)
    center, coeffs = _mobius_laurent(m)
    u = lam - center
    out = np.zeros(lam.shape, dtype=np.complex128)
    for j, c in enumerate(coeffs):
        if j == 0:
            if order == 0:
                out += c
            continue
        # d^p/du^p u^{-j} = (−1)^p j(j+1)…(j+p−1) u^{−j−p}
        rising = math.prod(range(j, j + order))
        out += c * (-1) ** order * rising * u ** (-j - order)
    return out


def chain_rule_check(m: int, q: int, ts: Sequence[float], table=None) -> float:
    """
    d^q/dt^q e^{imt} 와 Σ_k p_{k,q}(λ) ψ^{(q−k)}(λ) dλ/dt 의 최대 상대 잔차.

    Args:
        m (int): φ(z) = z^m 의 지수
        q (int): 미분 차수 (≥ 1)
        ts (Sequence[float]): 표본점 (|t − π| ≥ 0.1)

    Returns:
        float: max |lhs − rhs| / max(1, |lhs|)
    """
    if q < 1:
        raise ValidationError("derivative order must be at least 1", q=q)
    t = np.asarray(ts, dtype=float)
    near = np.abs(np.mod(t, 2 * np.pi) - np.pi)
    if np.any(near < POLE_DISTANCE):
        raise ValidationError("sample too close to t = pi (lambda pole)", min_distance=float(near.min()))
    table = table if table is not None else pkq_polynomials(q)
    if (0, q) not in table:
        raise ValidationError("p table does not cover the requested order", q=q)

    lam = -np.tan(t / 2)
    dlam = -(1 + lam ** 2) / 2
    lhs = (1j * m) ** q * np.exp(1j * m * t)
    rhs = np.zeros(t.shape, dtype=np.complex128)
    for k in range(q):
        rhs += table[(k, q)](lam) * psi_derivative(m, q - k, lam)
    rhs *= dlam
    return float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs)), initial=0.0))


def real_line_ssf(xi: SpectralShiftFn, lambdas: Sequence[float]) -> np.ndarray:
    """η_n(λ) = ξ_n(−2 arctan λ mod 2π)"""
    lam = np.asarray(lambdas, dtype=float)
    return ssf_eval(xi, np.mod(-2 * np.arctan(lam), 2 * np.pi))


def _check_grid(lambdas: np.ndarray) -> int:
    if lambdas.ndim != 1 or lambdas.size < 2:
        raise ValidationError("lambda grid must be a 1-D array with at least 2 points")
    steps = np.diff(lambdas)
    if steps[0] <= 0 or not np.allclose(steps, steps[0], rtol=GRID_UNIFORM_RTOL, atol=0.0):
        raise ValidationError("lambda grid must be uniform and increasing")
    zero = np.flatnonzero(np.abs(lambdas) <= 1e-9 * steps[0])
    if zero.size == 0:
        raise ValidationError("lambda grid must contain 0")
    return int(zero[0])


def _integrate_from_zero(values: np.ndarray, lambdas: np.ndarray, i0: int) -> np.ndarray:
    F = cumulative_trapezoid(values, lambdas, initial=0)
    return F - F[i0]


def zeta_n(
    eta: Sequence[complex],
    lambdas: Sequence[float],
    p_table: PkqTable,
    n: int,
    base_case: str = "printed",
) -> np.ndarray:
    """
    ζ_n = Σ_{k=0}^{n−1} (−1)^k η^n_{k,k}.

    η^n_{1,k} = ∫_0^λ p_{k,n} η_n, η^n_{j,k} = ∫_0^λ η^n_{j−1,k} (사다리꼴 누적 적분).
    k = 0 항은 base_case="printed" 이면 p_{0,n}, "weighted" 이면 p_{0,n}·η_n.

    Args:
        eta: λ 격자 위의 η_n 표본
        lambdas: 0 을 포함하는 균일 격자
        p_table: pkq_polynomials 결과 (n 까지)
        n (int): 차수 (≥ 2)
        base_case (str): "printed" 또는 "weighted"

    Returns:
        np.ndarray: ζ_n 표본 (complex)
    """
    if n < 2:
        raise ValidationError("zeta order must be at least 2", n=n)
    if base_case not in ("printed", "weighted"):
        raise ValidationError(f"unknown base case '{base_case}'")
    lam = np.asarray(lambdas, dtype=float)
    i0 = _check_grid(lam)
    eta = np.asarray(eta, dtype=np.complex128)
    if eta.shape != lam.shape:
        raise ValidationError("eta samples must match the lambda grid", eta=eta.size, grid=lam.size)
    if (0, n) not in p_table:
        raise ValidationError("p table does not cover the requested order", n=n)

    p0 = p_table[(0, n)](lam)
    zeta = (p0 if base_case == "printed" else p0 * eta).astype(np.complex128)
    for k in range(1, n):
        g = _integrate_from_zero(p_table[(k, n)](lam) * eta, lam, i0)
        for _ in range(k - 1):
            g = _integrate_from_zero(g, lam, i0)
        zeta = zeta + (-1) ** k * g
    return zeta


def gaussian_test_function(lambdas: Sequence[float], order: int) -> Callable[[int], np.ndarray]:
    """ψ(λ) = e^{−λ²} 의 도함수 j ↦ ψ^{(j)} (Hermite 다항식 이용)"""
    lam = np.asarray(lambdas, dtype=float)
    weight = np.exp(-lam ** 2)
    cache = {j: (-1) ** j * hermite.hermval(lam, [0] * j + [1]) * weight for j in range(order + 1)}
    return cache.__getitem__


def integration_by_parts_gap(
    eta: Sequence[complex],
    lambdas: Sequence[float],
    p_table: PkqTable,
    n: int,
    psi_derivs: Callable[[int], np.ndarray],
    base_case: str = "printed",
) -> Dict[str, Any]:
    """
    ∫ ψ^{(n)} ζ_n 와 ∫ (Σ_k p_{k,n} ψ^{(n−k)}) η_n 의 차이.

    상대 차이는 우변 피적분 함수의 절댓값 적분으로 나눈다.
    """
    lam = np.asarray(lambdas, dtype=float)
    eta = np.asarray(eta, dtype=np.complex128)
    zeta = zeta_n(eta, lam, p_table, n, base_case)
    lhs = complex(trapezoid(psi_derivs(n) * zeta, lam))
    integrand = sum(p_table[(k, n)](lam) * psi_derivs(n - k) for k in range(n)) * eta
    rhs = complex(trapezoid(integrand, lam))
    scale = max(abs(lhs), abs(rhs), float(trapezoid(np.abs(integrand), lam)))
    return {
        "lhs": lhs,
        "rhs": rhs,
        "relative_gap": abs(lhs - rhs) / scale if scale > 0 else 0.0,
        "base_case": base_case,
    }


def psi_scalar(phi: TrigPoly, lambdas) -> np.ndarray:
    """ψ(λ) = φ((i+λ)/(i−λ))"""
    lam = np.asarray(lambdas, dtype=float)
    return phi.at_points((1j + lam) / (1j - lam))


def psi_on_dissipative(phi: TrigPoly, A: Union[DissipativeOp, np.ndarray]) -> CMatrix:
    """ψ(A) := φ(T), T = cayley(A)"""
    return eval_on_matrix(phi, cayley(A).matrix)


def hermitian_psi_check(phi: TrigPoly, eigenvalues: Sequence[float]) -> float:
    """대각 Hermitian A 에서 Cayley 경유 ψ(A) 와 diag ψ(λ_j) 의 차이"""
    lam = np.asarray(eigenvalues, dtype=float)
    A = np.diag(lam).astype(np.complex128)
    return op_norm(psi_on_dissipative(phi, A) - np.diag(psi_scalar(phi, lam)))


def _check_clear_of_minus_one(matrices: Sequence[np.ndarray]) -> None:
    for X in matrices:
        smin = _sigma_min(X + np.eye(X.shape[0]))
        if smin <= MINUS_ONE_TOL:
            raise SpectrumError("path value has -1 in its spectrum", sigma_min=smin)


def dissipative_remainder_check(
    A0: Union[DissipativeOp, np.ndarray],
    A1: Union[DissipativeOp, np.ndarray],
    n: int,
    q: int,
) -> Dict[str, float]:
    """
    ψ 쪽 잔차와 φ 쪽 잔차 비교.

    1. (T₀, T₁) = (cayley A₀, cayley A₁) 로 (축약, 축약) 쌍을 만든다.
    2. φ 쪽: 경로 T_s 위 조합식 잔차.
    3. ψ 쪽: A_s = i − 2i(T_s+1)^{-1} 의 Taylor 급수를 만들고 ψ(A_s) = φ(cayley(A_s)) 를
       급수 연산으로 전개한다.
    """
    if n < 2:
        raise ValidationError("remainder order must be at least 2", n=n)
    if q == 0:
        raise ValidationError("monomial index must be nonzero", q=q)
    A0, A1 = _as_dissipative(A0), _as_dissipative(A1)
    T0, T1 = cayley(A0), cayley(A1)
    frame = build_cc_pair(T0, T1)
    _check_clear_of_minus_one([path_value(frame.path, s) for s in CONTRACTIVE_SAMPLES])

    phi = TrigPoly.monomial(q)
    R_phi = remainder(frame.path, T1.matrix, phi, n)

    # A_s 급수와 그 Cayley 변환 급수
    S_T = path_series(frame.path, n - 1)
    S_A = S_T.shift(1.0).inverse().scale(-2j).shift(1j)
    S_back = (S_A.shift(1j) * S_A.shift(-1j).inverse()).scale(-1.0)
    if q < 0:
        S_back = S_back.adjoint()
    S_psi = S_back.power(abs(q))

    psi_end = psi_on_dissipative(phi, A1)
    psi_start = psi_on_dissipative(phi, A0)
    R_psi = psi_end - psi_start - sum(S_psi.coeffs[k] for k in range(1, n))

    residual = float(np.max(np.abs(R_psi - R_phi)))
    logger.debug(f"[CAYLEY] ψ/φ 잔차 차이 {residual:.3e} (n={n}, q={q})")
    return {
        "residual": residual,
        "remainder_norm": op_norm(R_phi),
        "series_roundtrip": op_norm(S_back.coeffs[0] - T0.matrix),
    }


def dissipative_hypotheses(
    A0: Union[DissipativeOp, np.ndarray],
    A1: Union[DissipativeOp, np.ndarray],
    n: int,
) -> Dict[str, Any]:
    """‖Im A_j‖_{⌈n/2⌉}, 레졸벤트 차이의 Schatten-n 노름, Cayley 변환의 kernel 보고서"""
    A0, A1 = _as_dissipative(A0), _as_dissipative(A1)
    index = math.ceil(n / 2)
    eye = np.eye(A0.dim)
    resolvent_gap = np.linalg.inv(A1.matrix - 1j * eye) - np.linalg.inv(A0.matrix - 1j * eye)
    report = {
        "schatten_index": index,
        "im_A0": schatten_norm(A0.im_part, index),
        "im_A1": schatten_norm(A1.im_part, index),
        "resolvent_difference": schatten_norm(resolvent_gap, n),
    }
    report["cayley"] = check_hypotheses(cayley(A0), cayley(A1), n)
    return report
