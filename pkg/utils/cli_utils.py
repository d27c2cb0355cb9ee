import logging
import sys
from typing import Any, Callable, Dict, Optional

import click

from config import SSF_OUTPUT_DIR, SSF_THREADS
from models.experiment import ExperimentConfig
from utils.error_handler import ConfigError, ToleranceFailure, emit_error, report_error
from utils.io_utils import load_config, write_outputs

logger = logging.getLogger(__name__)

Service = Callable[[ExperimentConfig, int], Dict[str, Any]]


def common_options(fn):
    """모든 모드 공통 옵션: --config, --threads, --out"""
    fn = click.option("--out", "out_dir", default=SSF_OUTPUT_DIR, show_default=True, help="결과 디렉터리")(fn)
    fn = click.option("--threads", type=int, default=SSF_THREADS, show_default=True, help="작업자 수")(fn)
    fn = click.option("--config", "config_path", default=None, help="JSON 설정 파일")(fn)
    return fn


def execute_mode(mode: str, service: Service, config_path: Optional[str], threads: int, out_dir: str) -> Dict[str, Any]:
    """
    설정 로드 → 서비스 호출 → 출력 저장.

    검증 실패는 에러 JSON 을 stderr 에 쓰고 종료 코드 1 로 끝낸다.
    """
    try:
        if threads < 1:
            raise ConfigError("threads must be at least 1", threads=threads)
        config = load_config(config_path, mode)
    except Exception as e:
        sys.exit(report_error(e))

    result = service(config, threads)
    if "error" in result:
        sys.exit(emit_error(result))

    for path in write_outputs(result, out_dir):
        click.echo(path)
    return result


def finish(mode: str, result: Dict[str, Any]) -> None:
    """허용 오차 실패면 종료 코드 2"""
    if not result["passed"]:
        sys.exit(report_error(ToleranceFailure(f"{mode}: a check exceeded its tolerance")))
    logger.info(f"[{mode.upper()}] 완료")
