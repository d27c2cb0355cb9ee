"""
원 위의 삼각다항식 φ(e^{it}) = Σ \\hatφ(k) e^{ikt} 와 축약 연산자에 대한 함수 계산.
"""
import logging
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from core.linalg import CMatrix, ContractionOp, adjoint
from utils.error_handler import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TrigPoly:
    """유한 지지 Fourier 계수 {k: \\hatφ(k)}. 0 계수는 저장하지 않는다."""

    coeffs: Mapping[int, complex] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for k, c in sorted(dict(self.coeffs).items()):
            if int(k) != k:
                raise ValidationError("Fourier index must be an integer", index=k)
            c = complex(c)
            if not np.isfinite(c):
                raise ValidationError("Fourier coefficient must be finite", index=k)
            if c != 0:
                cleaned[int(k)] = c
        object.__setattr__(self, "coeffs", MappingProxyType(cleaned))

    @classmethod
    def monomial(cls, k: int, c: complex = 1.0) -> "TrigPoly":
        return cls({k: c})

    @classmethod
    def constant(cls, c: complex) -> "TrigPoly":
        return cls({0: c})

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[float]]) -> "TrigPoly":
        """JSON [[k, re, im], ...] 형식에서 생성"""
        coeffs = {}
        for item in triples:
            if len(item) != 3:
                raise ValidationError("trig poly entries must be [k, re, im] triples", entry=str(item))
            k, re, im = item
            coeffs[int(k)] = coeffs.get(int(k), 0) + complex(float(re), float(im))
        return cls(coeffs)

    def to_triples(self) -> List[List[float]]:
        return [[k, c.real, c.imag] for k, c in self.coeffs.items()]

    @property
    def degree(self) -> int:
        return max((abs(k) for k in self.coeffs), default=0)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        merged = dict(self.coeffs)
        for k, c in other.coeffs.items():
            merged[k] = merged.get(k, 0) + c
        return TrigPoly(merged)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + other.scale(-1)

    def scale(self, a: complex) -> "TrigPoly":
        return TrigPoly({k: a * c for k, c in self.coeffs.items()})

    def __call__(self, t) -> np.ndarray:
        """t (라디안) 에서 φ(e^{it}) 값"""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=np.complex128)
        for k, c in self.coeffs.items():
            out += c * np.exp(1j * k * t)
        return out

    def at_points(self, z) -> np.ndarray:
        """단위원 위의 점 z 에서 Σ \\hatφ(k) z^k"""
        z = np.asarray(z, dtype=np.complex128)
        out = np.zeros(z.shape, dtype=np.complex128)
        for k, c in self.coeffs.items():
            out += c * (z ** k if k >= 0 else np.conj(z) ** (-k))
        return out


def split_pm(phi: TrigPoly) -> Tuple[TrigPoly, TrigPoly]:
    """
    φ(e^{it}) = φ₊(e^{it}) + φ₋(e^{-it}) 분해.

    Returns:
        Tuple[TrigPoly, TrigPoly]: φ₊ (k ≥ 0 계수), φ₋ (k ↦ \\hatφ(−k), k ≥ 1)
    """
    plus = {k: c for k, c in phi.coeffs.items() if k >= 0}
    minus = {-k: c for k, c in phi.coeffs.items() if k < 0}
    return TrigPoly(plus), TrigPoly(minus)


def _horner(coeffs: Sequence[complex], X: np.ndarray) -> CMatrix:
    # Σ_{j≥0} coeffs[j] X^j
    d = X.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    acc = np.zeros((d, d), dtype=np.complex128)
    for c in reversed(coeffs):
        acc = acc @ X + c * eye
    return acc


def eval_on_matrix(phi: TrigPoly, X: np.ndarray) -> CMatrix:
    """φ(X) = φ₊(X) + φ₋(X*). 축약이 아닌 확장 공간 행렬에도 쓰인다."""
    X = np.asarray(X, dtype=np.complex128)
    d = X.shape[0]
    plus, minus = split_pm(phi)
    result = np.zeros((d, d), dtype=np.complex128)
    if plus.coeffs:
        result += _horner([plus.coeffs.get(k, 0) for k in range(plus.degree + 1)], X)
    if minus.coeffs:
        Xs = adjoint(X)
        tail = _horner([minus.coeffs.get(k, 0) for k in range(1, minus.degree + 1)], Xs)
        result += Xs @ tail
    return result


def eval_on_contraction(phi: TrigPoly, T: Union[ContractionOp, np.ndarray]) -> CMatrix:
    matrix = T.matrix if isinstance(T, ContractionOp) else T
    return eval_on_matrix(phi, matrix)


def circle_derivative(phi: TrigPoly, m: int) -> TrigPoly:
    """d^m/dt^m φ(e^{it}): 계수 k ↦ (ik)^m \\hatφ(k)"""
    if m < 0:
        raise ValidationError("derivative order must be nonnegative", m=m)
    return TrigPoly({k: (1j * k) ** m * c for k, c in phi.coeffs.items()})


def fn_norm(phi: TrigPoly, n: int) -> float:
    """Σ |k|^n |\\hatφ(k)|"""
    if n < 0:
        raise ValidationError("F_n index must be nonnegative", n=n)
    return float(sum(abs(k) ** n * abs(c) for k, c in phi.coeffs.items()))
