"""
잔차 trace, n차 스펙트럼 이동 함수 ξ_n 의 Fourier 복원, trace 공식 자체 일관성,
섭동 크기 스케일링 연구.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Dict, Iterable, List, Mapping, NamedTuple, Sequence, TypeVar

import numpy as np

from core.funcspace import TrigPoly, eval_on_matrix
from core.linalg import (
    HermitianGenerator,
    _frozen,
    adjoint,
    as_cmatrix,
    pairwise_sum,
    trace,
    unitarity_residual,
    unitary_exp,
)
from core.paths import check_connection, make_path, remainder
from utils.error_handler import IllConditionedFitError, ValidationError

logger = logging.getLogger(__name__)

FIT_FLOOR = 1e-14
GRID_TOL = 1e-12
UNITARY_INPUT_TOL = 1e-10

_T = TypeVar("_T")


def ordered_map(fn: Callable[[Any], _T], items: Iterable[Any], threads: int = 1) -> List[_T]:
    """작업 풀에서 실행하되 입력 순서대로 결과를 모은다."""
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(fn, items))


@dataclass(frozen=True, eq=False)
class SpectralShiftFn:
    """\\hatξ_n(q), 0 < |q| ≤ qmax. \\hatξ_n(0) 은 게이지로 0."""

    order: int
    qmax: int
    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.order < 2:
            raise ValidationError("spectral shift order must be at least 2", n=self.order)
        if self.qmax < 1:
            raise ValidationError("qmax must be at least 1", qmax=self.qmax)
        cleaned = {}
        for q, c in sorted(dict(self.coeffs).items()):
            if q == 0 or abs(q) > self.qmax:
                raise ValidationError("coefficient index outside 0 < |q| <= qmax", q=q)
            c = complex(c)
            if not np.isfinite(c):
                raise ValidationError("coefficient must be finite", q=q)
            cleaned[int(q)] = c
        object.__setattr__(self, "coeffs", MappingProxyType(cleaned))

    def to_json(self) -> Dict[str, Any]:
        return {
            "order": self.order,
            "qmax": self.qmax,
            "coeffs": [[q, c.real, c.imag] for q, c in self.coeffs.items()],
        }

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "SpectralShiftFn":
        coeffs = {int(q): complex(float(re), float(im)) for q, re, im in data["coeffs"]}
        return cls(order=int(data["order"]), qmax=int(data["qmax"]), coeffs=coeffs)

    def conjugate_symmetry_defect(self) -> float:
        """max_q |\\hatξ(q) − conj(\\hatξ(−q))| (실수값 여부 진단)"""
        return max(
            (abs(c - np.conj(self.coeffs.get(-q, 0))) for q, c in self.coeffs.items()),
            default=0.0,
        )

    def l1_proxy(self, points: int = 4096) -> float:
        """부분합의 격자 L¹ 적분 근사"""
        grid = 2 * np.pi * np.arange(points) / points
        return float(2 * np.pi * np.mean(np.abs(ssf_eval(self, grid))))


def remainder_traces(frame, n: int, qmax: int, threads: int = 1, method: str = "auto") -> Dict[int, complex]:
    """
    φ = z^q (0 < |q| ≤ qmax) 각각에 대한 n차 잔차의 trace.

    Args:
        frame: PairFrame 또는 DilatedPair (path, end_matrix 를 가진 쌍)
        n (int): 잔차 차수
        qmax (int): 최대 |q|
        threads (int): 작업자 수

    Returns:
        Dict[int, complex]: q → trace(R_n(z^q)), q 오름차순
    """
    if n < 2:
        raise ValidationError("spectral shift order must be at least 2", n=n)
    if qmax < 1:
        raise ValidationError("qmax must be at least 1", qmax=qmax)
    check_connection(frame.path, frame.end_matrix)
    qs = [q for q in range(-qmax, qmax + 1) if q != 0]

    def one(q: int) -> complex:
        return trace(remainder(frame.path, frame.end_matrix, TrigPoly.monomial(q), n, method))

    values = ordered_map(one, qs, threads)
    return dict(zip(qs, values))


def ssf_fourier(frame, n: int, qmax: int, threads: int = 1, method: str = "auto") -> SpectralShiftFn:
    """\\hatξ_n(−q) = trace(R_n(z^q)) / (2π (iq)^n)"""
    traces = remainder_traces(frame, n, qmax, threads, method)
    coeffs = {-q: t / (2 * np.pi * (1j * q) ** n) for q, t in traces.items()}
    logger.info(f"[SSF] n={n}, qmax={qmax} 계수 {len(coeffs)}개 복원")
    return SpectralShiftFn(order=n, qmax=qmax, coeffs=coeffs)


def trace_formula_check(frame, phi: TrigPoly, n: int, xi: SpectralShiftFn, method: str = "auto") -> float:
    """|trace R_n(φ) − 2π Σ_q \\hatφ(q)(iq)^n \\hatξ_n(−q)|"""
    if phi.degree > xi.qmax:
        raise ValidationError("trig poly degree exceeds qmax", degree=phi.degree, qmax=xi.qmax)
    if n != xi.order:
        raise ValidationError("remainder order differs from the SSF order", n=n, order=xi.order)
    lhs = trace(remainder(frame.path, frame.end_matrix, phi, n, method))
    rhs = 2 * np.pi * sum(
        c * (1j * q) ** n * xi.coeffs.get(-q, 0) for q, c in phi.coeffs.items() if q != 0
    )
    return abs(lhs - rhs)


def ssf_eval(xi: SpectralShiftFn, grid: Sequence[float]) -> np.ndarray:
    """Σ_{0<|q|≤qmax} \\hatξ(q) e^{iqt}"""
    t = np.asarray(grid, dtype=float)
    if t.size and (t.min() < -GRID_TOL or t.max() >= 2 * np.pi + GRID_TOL):
        raise ValidationError("grid must lie in [0, 2pi)")
    out = np.zeros(t.shape, dtype=np.complex128)
    for q, c in xi.coeffs.items():
        out += c * np.exp(1j * q * t)
    return out


def koplienko_remainder(frame, phi: TrigPoly) -> np.ndarray:
    """n = 2 잔차를 1차 도함수 Σ_j V^{q−1−j} W V^j 로 직접 계산"""
    p, end = frame.path, np.asarray(frame.end_matrix)
    check_connection(p, end)
    V = np.asarray(p.start)
    W = adjoint(p.embed) @ (1j * p.generator.matrix) @ p.base
    d = V.shape[0]
    terms = [eval_on_matrix(phi, end), -eval_on_matrix(phi, V)]
    for q, c in phi.coeffs.items():
        if q == 0:
            continue
        X, Y = (V, W) if q > 0 else (adjoint(V), adjoint(W))
        powers = [np.eye(d, dtype=np.complex128)]
        for _ in range(abs(q) - 1):
            powers.append(powers[-1] @ X)
        first = pairwise_sum([powers[abs(q) - 1 - j] @ Y @ powers[j] for j in range(abs(q))], (d, d))
        terms.append(-c * first)
    return pairwise_sum(terms, (d, d))


def koplienko_check(frame, phi: TrigPoly) -> float:
    """n = 2 직접 계산과 일반 잔차의 차이"""
    general = remainder(frame.path, frame.end_matrix, phi, 2)
    return float(np.max(np.abs(koplienko_remainder(frame, phi) - general), initial=0.0))


class ScalingResult(NamedTuple):
    slope: float
    eps: List[float]
    magnitudes: List[float]


def _scaled(A: HermitianGenerator, eps: float) -> HermitianGenerator:
    return HermitianGenerator(
        matrix=_frozen(eps * np.asarray(A.matrix)),
        spectrum=_frozen(eps * np.asarray(A.spectrum)),
        eigenvectors=A.eigenvectors,
    )


def scaling_study(U0, A: HermitianGenerator, n: int, eps: Sequence[float], q: int, method: str = "auto") -> ScalingResult:
    """
    (e^{iεA}U₀, U₀) 쌍의 |trace R_n(z^q)| 의 log-log 기울기.

    Args:
        U0: 유니터리 행렬
        A (HermitianGenerator): 섭동 생성자
        n (int): 잔차 차수
        eps (Sequence[float]): 양수, 감소, 3개 이상
        q (int): 단항식 지수

    Returns:
        ScalingResult: 최소제곱 기울기와 (ε, |trace|) 표
    """
    U0 = as_cmatrix(U0, "U0", square=True)
    if unitarity_residual(U0) > UNITARY_INPUT_TOL:
        raise ValidationError("U0 must be unitary")
    if A.dim != U0.shape[0]:
        raise ValidationError("generator and U0 dimensions differ", A=A.dim, U0=U0.shape[0])
    eps = [float(e) for e in eps]
    if len(eps) < 3 or any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValidationError("eps must be at least 3 positive strictly decreasing values")
    if q == 0:
        raise ValidationError("monomial index must be nonzero", q=q)

    phi = TrigPoly.monomial(q)
    magnitudes = []
    for e in eps:
        gen = _scaled(A, e)
        path = make_path(gen, U0, embed=np.eye(U0.shape[0]), start=U0)
        end = unitary_exp(A, e) @ U0
        magnitudes.append(abs(trace(remainder(path, end, phi, n, method))))

    if min(magnitudes) < FIT_FLOOR:
        raise IllConditionedFitError("remainder magnitudes below fit floor", floor=FIT_FLOOR, smallest=min(magnitudes))
    slope = float(np.polyfit(np.log(eps), np.log(magnitudes), 1)[0])
    logger.info(f"[SCALING] n={n}, q={q} 기울기 {slope:.4f}")
    return ScalingResult(slope=slope, eps=eps, magnitudes=magnitudes)
