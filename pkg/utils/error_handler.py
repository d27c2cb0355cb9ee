import json
import logging
import sys
import traceback
from typing import Any, Dict

logger = logging.getLogger(__name__)

# 종료 코드
EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_TOLERANCE = 2


class LabError(Exception):
    """ssf-lab 공통 예외. code는 에러 JSON에 그대로 실린다."""

    code = "lab_error"
    exit_code = EXIT_VALIDATION

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.message = message
        self.details = details


class ValidationError(LabError):
    code = "validation_error"


class ConfigError(ValidationError):
    code = "config_error"


class NotAContractionError(ValidationError):
    code = "not_a_contraction"


class PathConnectionError(LabError):
    code = "path_connection_error"


class ConditioningError(LabError):
    code = "conditioning_error"


class SpectrumError(LabError):
    code = "spectrum_error"


class IllConditionedFitError(LabError):
    code = "ill_conditioned_fit"


class ToleranceFailure(LabError):
    code = "tolerance_failure"
    exit_code = EXIT_TOLERANCE


def error_payload(e: BaseException) -> Dict[str, Any]:
    """
    예외를 구조화된 에러 객체로 변환합니다.

    Args:
        e (BaseException): 처리할 예외

    Returns:
        Dict[str, Any]: {"error", "status", "code", "type"} 형태의 에러 정보
    """
    if isinstance(e, LabError):
        payload = {
            "error": e.message,
            "status": "error",
            "code": e.code,
            "type": type(e).__name__,
        }
        if e.details:
            payload["details"] = {k: _jsonable(v) for k, v in e.details.items()}
        return payload

    # 예상하지 못한 예외 (자세한 내용은 로그에만 남김)
    return {
        "error": "An unexpected error occurred",
        "status": "error",
        "code": "internal",
        "type": type(e).__name__,
        "message": str(e),
    }


def exit_code_for(e: BaseException) -> int:
    if isinstance(e, LabError):
        return e.exit_code
    return EXIT_VALIDATION


def error_result(e: BaseException) -> Dict[str, Any]:
    """서비스가 돌려주는 에러 결과: {"error": payload, "exit_code": 종료 코드}"""
    if isinstance(e, LabError):
        logger.warning(f"[{e.code}] {e.message}")
    else:
        logger.error(f"Unhandled Exception: {str(e)}")
        logger.debug(traceback.format_exc())
    return {"error": error_payload(e), "exit_code": exit_code_for(e)}


def emit_error(result: Dict[str, Any]) -> int:
    """에러 결과를 stderr에 JSON 한 줄로 출력하고 종료 코드를 돌려줍니다."""
    sys.stderr.write(json.dumps(result["error"], sort_keys=True) + "\n")
    return result["exit_code"]


def report_error(e: BaseException) -> int:
    return emit_error(error_result(e))


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, complex):
        return [value.real, value.imag]
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)
