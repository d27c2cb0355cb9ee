import logging
from typing import Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import SSF_SEED

logger = logging.getLogger(__name__)

# verify 모드의 검사 이름 (실행 순서)
CHECK_NAMES = (
    "oracle",
    "unitarity",
    "endpoints",
    "compression",
    "trace_transfer",
    "trace_formula",
    "scaling",
    "pkq",
    "cayley",
    "gauge",
    "determinism",
)

DEFAULT_INSTANCES = {
    "oracle": 100,
    "unitarity": 100,
    "endpoints": 100,
    "compression": 20,
    "trace_transfer": 50,
    "trace_formula": 4,
    "scaling": 10,
    "pkq": 1,
    "cayley": 30,
    "gauge": 5,
    "determinism": 1,
}


class ExperimentConfig(BaseModel):
    """
    실험 설정. JSON 설정 파일과 CLI 옵션에서 만들어진다.

    행렬은 [[[re, im], ...], ...] 형태로 주고, 비어 있으면 seed 로 무작위 인스턴스를 만든다.
    """

    model_config = ConfigDict(extra="forbid")

    mode: Literal["verify", "ssf", "dilate", "cayley", "scaling"]
    matrices: Dict[str, List[List[List[float]]]] = Field(default_factory=dict)
    n: int = Field(2, ge=2)
    qmax: int = Field(8, ge=1)
    truncation: Optional[int] = Field(None, ge=1)
    seed: int = Field(default_factory=lambda: SSF_SEED, ge=0, lt=2 ** 64)
    dim: int = Field(3, ge=1, le=64)
    pair: Literal["auto", "cu", "cc"] = "auto"
    q: int = 1
    eps: List[float] = Field(default_factory=lambda: [1e-1, 1e-2, 1e-3])
    grid_points: int = Field(256, ge=1)
    lambda_min: float = -8.0
    lambda_max: float = 8.0
    lambda_step: float = Field(1e-3, gt=0)
    m_values: List[int] = Field(default_factory=lambda: [1, 2, 3, 4, 5])
    t_samples: int = Field(20, ge=1)
    instances: Dict[str, int] = Field(default_factory=dict)
    base_case: Literal["printed", "weighted"] = "printed"
    output: Dict[str, str] = Field(default_factory=dict)

    @field_validator("q")
    @classmethod
    def _nonzero_q(cls, v: int) -> int:
        if v == 0:
            raise ValueError("q must be nonzero")
        return v

    @field_validator("eps")
    @classmethod
    def _decreasing_eps(cls, v: List[float]) -> List[float]:
        if len(v) < 3:
            raise ValueError("eps needs at least 3 values")
        if any(e <= 0 for e in v) or any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("eps must be positive and strictly decreasing")
        return v

    @field_validator("instances")
    @classmethod
    def _known_checks(cls, v: Dict[str, int]) -> Dict[str, int]:
        unknown = sorted(set(v) - set(CHECK_NAMES))
        if unknown:
            raise ValueError(f"unknown checks: {', '.join(unknown)}")
        if any(count < 0 for count in v.values()):
            raise ValueError("instance counts must be nonnegative")
        return v

    @model_validator(mode="after")
    def _grid_contains_zero(self) -> "ExperimentConfig":
        if not self.lambda_min < 0 < self.lambda_max:
            raise ValueError("lambda grid must satisfy lambda_min < 0 < lambda_max")
        ratio = -self.lambda_min / self.lambda_step
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ValueError("lambda_min must be an integer multiple of lambda_step")
        return self

    def instance_count(self, check: str) -> int:
        return self.instances.get(check, DEFAULT_INSTANCES[check])

    def lambda_grid(self) -> np.ndarray:
        """0 을 정확히 포함하는 균일 격자"""
        lo = int(round(-self.lambda_min / self.lambda_step))
        hi = int(np.floor(self.lambda_max / self.lambda_step + 1e-9))
        return np.arange(-lo, hi + 1) * self.lambda_step

    def output_name(self, key: str, default: str) -> str:
        return self.output.get(key, default)
