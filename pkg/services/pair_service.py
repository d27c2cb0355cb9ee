import logging
from typing import Any, Dict, Tuple

from core.instances import child_rng, haar_unitary, strict_contraction
from core.linalg import unitarity_residual
from core.pairs import UNITARY_INPUT_TOL, PairFrame, build_cc_pair, build_cu_pair
from models.experiment import ExperimentConfig
from utils.error_handler import ConfigError
from utils.io_utils import config_matrix

logger = logging.getLogger(__name__)

# 설정 행렬로 만드는 인스턴스와 구분되는 시드 키
PAIR_SEED_KEY = 0


def resolve_pair(config: ExperimentConfig) -> Tuple[PairFrame, Dict[str, Any]]:
    """
    설정에서 쌍을 만듭니다.

    1. matrices 에 T, V 가 있으면 (축약, 유니터리) 쌍
    2. T0, T1 이 있으면 pair 설정에 따라 선택 (auto: T0 이 유니터리면 cu)
    3. 행렬이 없으면 seed 로 무작위 쌍 생성

    Returns:
        Tuple[PairFrame, Dict[str, Any]]: 프레임과 출처 정보
    """
    T, V = config_matrix(config, "T"), config_matrix(config, "V")
    T0, T1 = config_matrix(config, "T0"), config_matrix(config, "T1")

    if T is not None or V is not None:
        if T is None or V is None:
            raise ConfigError("contraction-unitary input needs both 'T' and 'V'")
        if config.pair == "cc":
            raise ConfigError("pair 'cc' needs matrices 'T0' and 'T1'")
        return build_cu_pair(T, V), {"kind": "cu", "source": "config", "dim": int(T.shape[0])}

    if T0 is not None or T1 is not None:
        if T0 is None or T1 is None:
            raise ConfigError("contraction pair input needs both 'T0' and 'T1'")
        start_unitary = unitarity_residual(T0) <= UNITARY_INPUT_TOL
        kind = config.pair if config.pair != "auto" else ("cu" if start_unitary else "cc")
        logger.info(f"[PAIR] 설정 행렬 사용: kind={kind}")
        frame = build_cu_pair(T1, T0) if kind == "cu" else build_cc_pair(T0, T1)
        return frame, {"kind": kind, "source": "config", "dim": int(T0.shape[0])}

    rng = child_rng(config.seed, PAIR_SEED_KEY)
    d = config.dim
    if config.pair == "cu":
        V = haar_unitary(rng, d)
        frame = build_cu_pair(strict_contraction(rng, d), V)
    else:
        T0 = strict_contraction(rng, d)
        frame = build_cc_pair(T0, strict_contraction(rng, d))
    logger.info(f"[PAIR] seed={config.seed} 무작위 {frame.kind} 쌍 (d={d})")
    return frame, {"kind": frame.kind, "source": "random", "dim": d, "seed": config.seed}
