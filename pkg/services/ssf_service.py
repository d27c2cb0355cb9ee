import logging
from typing import Any, Dict

import numpy as np

from core.pairs import check_hypotheses
from core.ssf import ssf_eval, ssf_fourier
from models.experiment import ExperimentConfig
from services.pair_service import resolve_pair
from utils.error_handler import error_result
from utils.io_utils import complex_columns

logger = logging.getLogger(__name__)


def sample_grid(points: int) -> np.ndarray:
    """[0, 2π) 의 균일 표본점"""
    return 2 * np.pi * np.arange(points) / points


def run_ssf(config: ExperimentConfig, threads: int = 1) -> Dict[str, Any]:
    """
    쌍을 만들고 ξ_n 의 Fourier 계수를 복원합니다.

    Args:
        config (ExperimentConfig): mode="ssf" 설정
        threads (int): q 별 trace 계산 작업자 수

    Returns:
        Dict[str, Any]: json / csv 출력물과 보고서, 실패 시 error
    """
    try:
        # 1. 쌍 생성
        frame, source = resolve_pair(config)

        # 2. Fourier 계수 복원
        xi = ssf_fourier(frame, config.n, config.qmax, threads)

        # 3. 표본값
        grid = sample_grid(config.grid_points)
        samples = ssf_eval(xi, grid)

        report = {
            "pair": source,
            "n": config.n,
            "qmax": config.qmax,
            "l1_proxy": xi.l1_proxy(),
            "conjugate_symmetry_defect": xi.conjugate_symmetry_defect(),
            "residuals": dict(frame.residuals),
            "trivial_path": frame.trivial,
            "hypotheses": check_hypotheses(frame.start, frame.end, config.n),
        }
        logger.info(f"[SSF] {source['kind']} 쌍, L1 근사 {report['l1_proxy']:.6g}")
        return {
            "json": {
                config.output_name("ssf", "ssf.json"): xi.to_json(),
                config.output_name("ssf_report", "ssf_report.json"): report,
            },
            "csv": {
                config.output_name("ssf_samples", "ssf_samples.csv"): {"t": grid, **complex_columns("xi", samples)},
            },
            "report": report,
            "passed": True,
        }
    except Exception as e:
        return error_result(e)
