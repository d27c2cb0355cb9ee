import json
import logging
import os
from typing import Any, Dict, List, Mapping, Optional, Sequence

import numpy as np
import pandas as pd
from pydantic import ValidationError as PydanticValidationError

from models.experiment import ExperimentConfig
from utils.error_handler import ConfigError

logger = logging.getLogger(__name__)

CSV_FLOAT_FORMAT = "%.17g"


def to_jsonable(value: Any) -> Any:
    """numpy / complex 값을 JSON 직렬화 가능한 값으로 변환합니다. 복소수는 [re, im]."""
    if isinstance(value, Mapping):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def dump_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def write_json(path: str, obj: Any) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dump_json(obj))
    logger.info(f"[OUTPUT] {path} 저장")
    return path


def write_csv(path: str, columns: Dict[str, Sequence[Any]]) -> str:
    """열 이름 → 값 목록을 17자리 고정 포맷 CSV 로 저장합니다."""
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    df = pd.DataFrame(columns)
    df.to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT)
    logger.info(f"[OUTPUT] {path} 저장 ({len(df)}행)")
    return path


def complex_columns(prefix: str, values: Sequence[complex]) -> Dict[str, np.ndarray]:
    values = np.asarray(values, dtype=np.complex128)
    return {f"{prefix}_re": values.real, f"{prefix}_im": values.imag}


def decode_matrix(raw: Any, name: str) -> np.ndarray:
    """
    [[[re, im], ...], ...] 중첩 배열을 복소 행렬로 변환합니다.

    Args:
        raw: 설정 파일의 행렬 값
        name (str): 오류 메시지에 쓸 행렬 이름

    Returns:
        np.ndarray: complex128 2차원 배열
    """
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError(f"matrix '{name}' is ragged or not numeric")
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise ConfigError(f"matrix '{name}' must be a nested array of [re, im] pairs", shape=str(arr.shape))
    if not np.all(np.isfinite(arr)):
        raise ConfigError(f"matrix '{name}' has non-finite entries")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_matrix(M: np.ndarray) -> list:
    M = np.asarray(M, dtype=np.complex128)
    return np.stack([M.real, M.imag], axis=-1).tolist()


def config_matrix(config: ExperimentConfig, name: str) -> Optional[np.ndarray]:
    raw = config.matrices.get(name)
    return None if raw is None else decode_matrix(raw, name)


def load_config(path: Optional[str], mode: str, overrides: Optional[Dict[str, Any]] = None) -> ExperimentConfig:
    """
    JSON 설정 파일을 읽어 ExperimentConfig 로 검증합니다. mode 는 CLI 가 채운다.

    Raises:
        ConfigError: 파일을 읽을 수 없거나 검증에 실패한 경우
    """
    data: Dict[str, Any] = {}
    if path:
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config: {e}", path=path)
        if not isinstance(data, dict):
            raise ConfigError("config root must be a JSON object", path=path)

    if data.get("mode", mode) != mode:
        raise ConfigError("config mode does not match the command", config_mode=data.get("mode"), command=mode)
    data["mode"] = mode
    data.update(overrides or {})

    try:
        config = ExperimentConfig.model_validate(data)
    except PydanticValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first.get("loc", ()))
        raise ConfigError(f"invalid config: {where}: {first.get('msg')}", errors=e.error_count())

    for name, raw in config.matrices.items():
        decode_matrix(raw, name)
    logger.info(f"[CONFIG] mode={mode}, seed={config.seed}, n={config.n}, qmax={config.qmax}")
    return config


def write_outputs(result: Dict[str, Any], out_dir: str) -> List[str]:
    """서비스 결과의 json / csv 출력물을 out_dir 에 씁니다."""
    paths = []
    for name, obj in sorted(result.get("json", {}).items()):
        paths.append(write_json(os.path.join(out_dir, name), obj))
    for name, columns in sorted(result.get("csv", {}).items()):
        paths.append(write_csv(os.path.join(out_dir, name), columns))
    return paths
