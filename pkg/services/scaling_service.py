import logging
from typing import Any, Dict

from core.instances import child_rng, positive_generator, scalar_unitary
from core.linalg import hermitian_generator
from core.ssf import scaling_study
from models.experiment import ExperimentConfig
from utils.error_handler import ConfigError, error_result
from utils.io_utils import config_matrix

logger = logging.getLogger(__name__)

SLOPE_TOL = 0.3
SCALING_SEED_KEY = 0


def run_scaling(config: ExperimentConfig, threads: int = 1) -> Dict[str, Any]:
    """
    (e^{iεA}U₀, U₀) 쌍의 |trace R_n(z^q)| 를 ε 에 대해 적합합니다.

    matrices 에 U0, A 가 없으면 seed 로 e^{iθ}I 와 양의 스펙트럼 생성자를 만든다.
    """
    try:
        U0, A = config_matrix(config, "U0"), config_matrix(config, "A")
        if (U0 is None) != (A is None):
            raise ConfigError("scaling input needs both 'U0' and 'A'")
        if U0 is None:
            rng = child_rng(config.seed, SCALING_SEED_KEY)
            U0 = scalar_unitary(rng, config.dim)
            generator = positive_generator(rng, config.dim)
        else:
            generator = hermitian_generator(A)

        result = scaling_study(U0, generator, config.n, config.eps, config.q)
        passed = abs(result.slope - config.n) <= SLOPE_TOL
        report = {
            "n": config.n,
            "q": config.q,
            "slope": result.slope,
            "expected": config.n,
            "tolerance": SLOPE_TOL,
            "eps": result.eps,
            "magnitudes": result.magnitudes,
            "passed": passed,
        }
        if not passed:
            logger.warning(f"[SCALING] 기울기 {result.slope:.4f} 가 {config.n} ± {SLOPE_TOL} 밖")
        return {
            "json": {config.output_name("scaling_report", "scaling_report.json"): report},
            "csv": {
                config.output_name("scaling", "scaling.csv"): {
                    "eps": result.eps,
                    "abs_trace": result.magnitudes,
                    "slope": [result.slope] * len(result.eps),
                },
            },
            "report": report,
            "passed": passed,
        }
    except Exception as e:
        return error_result(e)
