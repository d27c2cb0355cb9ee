"""
곱셈 경로 s ↦ P_H e^{isG} B 와 그 Gateaux 도함수, Taylor 잔차.

조합식(합성 분해 합)과 독립적인 Taylor 급수 오라클 두 가지로
d^k/ds^k|₀ φ_q(경로) 를 계산한다.
"""
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Tuple

import numpy as np

from core.funcspace import TrigPoly, eval_on_matrix
from core.linalg import (
    CMatrix,
    HermitianGenerator,
    _frozen,
    adjoint,
    as_cmatrix,
    op_norm,
    pairwise_sum,
    unitary_exp,
)
from utils.error_handler import PathConnectionError, ValidationError

logger = logging.getLogger(__name__)

ISOMETRY_TOL = 1e-10
START_TOL = 1e-10
CONTRACTIVE_TOL = 1e-10
CONNECTION_TOL = 1e-8

# 조합식 사용 한계 (이를 넘으면 Taylor 오라클로 계산)
COMBINATORIAL_MAX_ORDER = 6
COMBINATORIAL_MAX_POWER = 16

CONTRACTIVE_SAMPLES = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True, eq=False)
class MultiplicativePath:
    """경로 값 path(s) = embed* e^{isG} base (d×d)."""

    generator: HermitianGenerator
    base: CMatrix
    embed: CMatrix

    @property
    def dim(self) -> int:
        return self.embed.shape[1]

    @property
    def ext_dim(self) -> int:
        return self.embed.shape[0]

    @cached_property
    def start(self) -> CMatrix:
        return _frozen(adjoint(self.embed) @ self.base)


def first_coordinates(D: int, d: int) -> CMatrix:
    """ℂ^d 를 ℂ^D 의 앞 d 좌표로 보내는 등거리 사상"""
    embed = np.zeros((D, d), dtype=np.complex128)
    embed[:d, :d] = np.eye(d)
    return _frozen(embed)


def make_path(
    generator: HermitianGenerator,
    base,
    embed=None,
    start=None,
    check_contractive: bool = True,
) -> MultiplicativePath:
    """
    MultiplicativePath 를 검증하여 생성합니다.

    Args:
        generator (HermitianGenerator): 확장 공간 E (차원 D) 위의 생성자
        base: D×d 행렬 B
        embed: D×d 등거리 사상 (None 이면 앞 d 좌표)
        start: 선언된 시작 연산자 (embed*·base 와 1e-10 이내로 같아야 함)
        check_contractive (bool): s ∈ [0,1] 표본에서 ‖path(s)‖ ≤ 1 검사 여부

    Returns:
        MultiplicativePath: 검증된 경로
    """
    base = as_cmatrix(base, "base")
    D, d = base.shape
    if generator.dim != D:
        raise ValidationError("generator and base dimensions differ", generator=generator.dim, base=D)
    embed = first_coordinates(D, d) if embed is None else as_cmatrix(embed, "embed")
    if embed.shape != (D, d):
        raise ValidationError("embed must have the shape of base", embed=str(embed.shape), base=str(base.shape))

    iso = op_norm(adjoint(embed) @ embed - np.eye(d))
    if iso > ISOMETRY_TOL:
        raise ValidationError("embed is not an isometry", residual=iso)

    path = MultiplicativePath(generator=generator, base=base, embed=embed)
    if start is not None:
        gap = op_norm(path.start - np.asarray(start))
        if gap > START_TOL:
            raise ValidationError("path start does not match the declared start operator", gap=gap)

    if check_contractive:
        for s in CONTRACTIVE_SAMPLES:
            norm = op_norm(path_value(path, s))
            if norm > 1.0 + CONTRACTIVE_TOL:
                raise ValidationError("path is not contractive", s=s, norm=norm)
    return path


def path_value(p: MultiplicativePath, s: float) -> CMatrix:
    return adjoint(p.embed) @ unitary_exp(p.generator, s) @ p.base


@dataclass(frozen=True, eq=False)
class TaylorMatrixSeries:
    """Σ_{j≤m} C_j s^j + O(s^{m+1}). 곱/합은 차수 m 에서 절단된다."""

    coeffs: Tuple[np.ndarray, ...]

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def shape(self) -> Tuple[int, int]:
        return self.coeffs[0].shape

    @classmethod
    def constant(cls, C: np.ndarray, order: int) -> "TaylorMatrixSeries":
        C = np.asarray(C, dtype=np.complex128)
        return cls(tuple([C] + [np.zeros_like(C) for _ in range(order)]))

    def _check(self, other: "TaylorMatrixSeries") -> None:
        if other.order != self.order:
            raise ValidationError("series orders differ", left=self.order, right=other.order)

    def __add__(self, other: "TaylorMatrixSeries") -> "TaylorMatrixSeries":
        self._check(other)
        return TaylorMatrixSeries(tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "TaylorMatrixSeries") -> "TaylorMatrixSeries":
        self._check(other)
        return TaylorMatrixSeries(tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __mul__(self, other: "TaylorMatrixSeries") -> "TaylorMatrixSeries":
        self._check(other)
        out = []
        for j in range(self.order + 1):
            out.append(pairwise_sum(
                [self.coeffs[i] @ other.coeffs[j - i] for i in range(j + 1)],
                (self.shape[0], other.shape[1]),
            ))
        return TaylorMatrixSeries(tuple(out))

    def scale(self, a: complex) -> "TaylorMatrixSeries":
        return TaylorMatrixSeries(tuple(a * C for C in self.coeffs))

    def shift(self, a: complex) -> "TaylorMatrixSeries":
        """상수항에 a·I 를 더한다"""
        coeffs = list(self.coeffs)
        coeffs[0] = coeffs[0] + a * np.eye(self.shape[0])
        return TaylorMatrixSeries(tuple(coeffs))

    def adjoint(self) -> "TaylorMatrixSeries":
        # s 는 실수
        return TaylorMatrixSeries(tuple(adjoint(C) for C in self.coeffs))

    def power(self, p: int) -> "TaylorMatrixSeries":
        if p < 0:
            raise ValidationError("series power must be nonnegative", p=p)
        result = TaylorMatrixSeries.constant(np.eye(self.shape[0]), self.order)
        for _ in range(p):
            result = result * self
        return result

    def inverse(self) -> "TaylorMatrixSeries":
        """상수항이 가역인 급수의 역급수"""
        C0 = self.coeffs[0]
        B0 = np.linalg.inv(C0)
        out = [B0]
        for j in range(1, self.order + 1):
            acc = pairwise_sum([self.coeffs[i] @ out[j - i] for i in range(1, j + 1)], C0.shape)
            out.append(-B0 @ acc)
        return TaylorMatrixSeries(tuple(out))

    def derivative_at_zero(self, k: int) -> np.ndarray:
        return math.factorial(k) * self.coeffs[k]


def path_series(p: MultiplicativePath, order: int) -> TaylorMatrixSeries:
    """path(s) 의 Taylor 급수: C_j = embed* (iG)^j base / j!"""
    iG = 1j * p.generator.matrix
    Y = np.asarray(p.base)
    coeffs = [adjoint(p.embed) @ Y]
    for j in range(1, order + 1):
        Y = iG @ Y
        coeffs.append(adjoint(p.embed) @ Y / math.factorial(j))
    return TaylorMatrixSeries(tuple(coeffs))


def _compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    # 양의 정수 합성, 사전식 순서
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _weak_compositions(total: int, parts: int) -> Iterator[Tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _weak_compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_terms(q: int, k: int) -> Iterator[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    """(l₁..l_r, α₀..α_r) 항을 r, l, α 의 사전식 순서로 나열한다. |q| − r < 0 인 항은 없다."""
    q = abs(q)
    for r in range(1, min(k, q) + 1):
        for ls in _compositions(k, r):
            for alphas in _weak_compositions(q - r, r + 1):
                yield ls, alphas


def count_terms(q: int, k: int) -> int:
    q = abs(q)
    return sum(math.comb(k - 1, r - 1) * math.comb(q, r) for r in range(1, k + 1))


class _FactorCache:
    """경로마다 한 번 계산하는 W_l = embed*(iG)^l base 와 시작 연산자의 거듭제곱"""

    def __init__(self, p: MultiplicativePath):
        self._path = p
        self._W: List[np.ndarray] = [np.asarray(p.start)]
        self._Y = np.asarray(p.base)
        self._powers: List[np.ndarray] = [np.eye(p.dim, dtype=np.complex128)]

    def W(self, l: int) -> np.ndarray:
        iG = 1j * self._path.generator.matrix
        while len(self._W) <= l:
            self._Y = iG @ self._Y
            self._W.append(adjoint(self._path.embed) @ self._Y)
        return self._W[l]

    def power(self, a: int) -> np.ndarray:
        while len(self._powers) <= a:
            self._powers.append(self._powers[-1] @ self._path.start)
        return self._powers[a]


def gateaux_monomial(p: MultiplicativePath, q: int, k: int) -> CMatrix:
    """
    d^k/ds^k|₀ φ_q(path(s)) 를 조합식으로 계산합니다.

    Σ_r Σ_{l 합성} k!/(l₁!…l_r!) Σ_{α 약합성} U^{α₀} W_{l₁} U^{α₁} … W_{l_r} U^{α_r},
    U = 시작 연산자, W_l = P_H (iG)^l base. q < 0 이면 −q 결과의 수반.

    Args:
        p (MultiplicativePath): 경로
        q (int): 0 이 아닌 거듭제곱 지수
        k (int): 미분 차수 (≥ 1)

    Returns:
        CMatrix: d×d 도함수 행렬
    """
    if k < 1:
        raise ValidationError("derivative order must be positive (use path_value for k = 0)", k=k)
    if q == 0:
        raise ValidationError("monomial index must be nonzero", q=q)
    if q < 0:
        return adjoint(gateaux_monomial(p, -q, k))

    cache = _FactorCache(p)
    k_fact = math.factorial(k)
    terms = []
    for ls, alphas in enumerate_terms(q, k):
        weight = k_fact / math.prod(math.factorial(l) for l in ls)
        prod = cache.power(alphas[0])
        for l, a in zip(ls, alphas[1:]):
            prod = prod @ cache.W(l) @ cache.power(a)
        terms.append(weight * prod)
    return pairwise_sum(terms, (p.dim, p.dim))


def taylor_oracle(p: MultiplicativePath, q: int, k: int) -> CMatrix:
    """급수 곱으로 계산한 k!·[s^k] path(s)^q (q < 0 이면 수반 급수 사용)"""
    if k < 1:
        raise ValidationError("derivative order must be positive", k=k)
    if q == 0:
        raise ValidationError("monomial index must be nonzero", q=q)
    series = path_series(p, k)
    if q < 0:
        series = series.adjoint()
    return series.power(abs(q)).derivative_at_zero(k)


def gateaux_derivative(p: MultiplicativePath, q: int, k: int, method: str = "auto") -> CMatrix:
    if method == "auto":
        method = "combinatorial" if k <= COMBINATORIAL_MAX_ORDER and abs(q) <= COMBINATORIAL_MAX_POWER else "taylor"
    if method == "combinatorial":
        return gateaux_monomial(p, q, k)
    if method == "taylor":
        return taylor_oracle(p, q, k)
    raise ValidationError(f"unknown derivative method '{method}'")


def check_connection(p: MultiplicativePath, end) -> float:
    gap = op_norm(path_value(p, 1.0) - np.asarray(end))
    if gap > CONNECTION_TOL:
        raise PathConnectionError("path does not connect start to end", gap=gap)
    return gap


def remainder(p: MultiplicativePath, end, phi: TrigPoly, n: int, method: str = "auto") -> CMatrix:
    """
    φ(end) − φ(start) − Σ_{k=1}^{n−1} (1/k!) d^k/ds^k|₀ φ(path(s)).

    q = 0 항은 도함수에 기여하지 않는다.
    """
    if n < 2:
        raise ValidationError("remainder order must be at least 2", n=n)
    end = np.asarray(end, dtype=np.complex128)
    check_connection(p, end)

    terms = [eval_on_matrix(phi, end), -eval_on_matrix(phi, p.start)]
    for k in range(1, n):
        for q, c in phi.coeffs.items():
            if q == 0:
                continue
            terms.append((-c / math.factorial(k)) * gateaux_derivative(p, q, k, method))
    return pairwise_sum(terms, (p.dim, p.dim))


def finite_difference_check(p: MultiplicativePath, q: int, h: float = 1e-3) -> float:
    """φ_q(path(s)) 의 중심차분 (Richardson 1회) 과 1차 Gateaux 도함수의 차이"""
    phi = TrigPoly.monomial(q)

    def central(step: float) -> np.ndarray:
        return (eval_on_matrix(phi, path_value(p, step)) - eval_on_matrix(phi, path_value(p, -step))) / (2 * step)

    richardson = (4 * central(h / 2) - central(h)) / 3
    return op_norm(richardson - gateaux_monomial(p, q, 1))
