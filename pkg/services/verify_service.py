"""
verify 모드: 불변식 묶음을 seed 로 고정된 무작위 인스턴스에서 실행합니다.

인스턴스 i 의 난수는 SeedSequence([seed, 검사 번호, i]) 에서 나오므로
작업자 수와 실행 순서에 관계없이 보고서가 같다.
"""
import logging
import sys
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence

import numpy as np
from tqdm import tqdm

from config import SSF_SHOW_PROGRESS
from core.dilation import dilate_pair, hardy_frame, power_compression_gap, verify_trace_transfer
from core.funcspace import TrigPoly
from core.instances import (
    child_rng,
    haar_unitary,
    positive_generator,
    random_dissipative,
    random_generator,
    random_trig_poly,
    rank_deficient_contraction,
    scalar_unitary,
    strict_contraction,
)
from core.linalg import op_norm
from core.pairs import PairFrame, build_cc_pair, build_cu_pair
from core.paths import gateaux_monomial, make_path, taylor_oracle
from core.ssf import ordered_map, scaling_study, ssf_fourier, trace_formula_check
from models.experiment import CHECK_NAMES, ExperimentConfig
from services.cayley_service import TOLERANCES as CAYLEY_TOLERANCES
from services.cayley_service import cayley_metrics, pkq_metrics
from utils.error_handler import error_result
from utils.io_utils import dump_json

logger = logging.getLogger(__name__)

ORACLE_DIM = 4
ORACLE_MAX_POWER = 8
ORACLE_MAX_ORDER = 4
COMPRESSION_MODES = 16
TRANSFER_MAX_POWER = 8
FORMULA_QMAX = 10
FORMULA_POLYS = 20
GAUGE_QMAX = 8
SCALING_EPS = (1e-1, 1e-2, 1e-3)
DETERMINISM_CHECKS = ("oracle", "unitarity", "trace_formula")
DETERMINISM_INSTANCES = 2

TOLERANCES = {
    "oracle_gap": 1e-9,
    "interp_unitarity": 1e-10,
    "log_reconstruction": 1e-9,
    "endpoint_gap": 1e-8,
    "compression_gap": 1e-12,
    "trace_gap": 1e-8,
    "corner_trace": 1e-10,
    "support_leak": 1e-12,
    "formula_gap": 1e-8,
    "slope_deviation": 0.3,
    "max_coefficient": 1e-12,
    "report_mismatch": 0.0,
    **CAYLEY_TOLERANCES,
}

Metrics = Dict[str, float]


def _check_index(name: str) -> int:
    return CHECK_NAMES.index(name) + 1


def _pair_instance(seed: int, i: int) -> PairFrame:
    """unitarity, endpoints 검사가 공유하는 쌍 (d ∈ 2..6, 결손 rank 부족 포함)"""
    rng = child_rng(seed, _check_index("unitarity"), i)
    d = 2 + i % 5
    variant = i % 4
    if variant == 0:
        return build_cu_pair(strict_contraction(rng, d), haar_unitary(rng, d))
    if variant == 1:
        return build_cc_pair(strict_contraction(rng, d), strict_contraction(rng, d))
    if variant == 2:
        return build_cu_pair(rank_deficient_contraction(rng, d), haar_unitary(rng, d))
    return build_cc_pair(rank_deficient_contraction(rng, d), strict_contraction(rng, d))


def _mixed_pair(rng: np.random.Generator, i: int, d: int = 3) -> PairFrame:
    if i % 2 == 0:
        return build_cu_pair(strict_contraction(rng, d), haar_unitary(rng, d))
    return build_cc_pair(strict_contraction(rng, d), strict_contraction(rng, d))


def _oracle(seed: int, i: int) -> Metrics:
    rng = child_rng(seed, _check_index("oracle"), i)
    U0 = haar_unitary(rng, ORACLE_DIM)
    full = make_path(random_generator(rng, ORACLE_DIM), U0, embed=np.eye(ORACLE_DIM), start=U0)
    compressed = build_cc_pair(strict_contraction(rng, ORACLE_DIM), strict_contraction(rng, ORACLE_DIM)).path
    worst = 0.0
    for path in (full, compressed):
        for q in range(1, ORACLE_MAX_POWER + 1):
            for k in range(1, ORACLE_MAX_ORDER + 1):
                reference = taylor_oracle(path, q, k)
                gap = op_norm(gateaux_monomial(path, q, k) - reference)
                worst = max(worst, gap / max(1.0, op_norm(reference)))
    return {"oracle_gap": worst}


def _unitarity(seed: int, i: int) -> Metrics:
    frame = _pair_instance(seed, i)
    return {
        "interp_unitarity": frame.residuals["unitarity"],
        "log_reconstruction": frame.residuals["log_reconstruction"],
    }


def _endpoints(seed: int, i: int) -> Metrics:
    frame = _pair_instance(seed, i)
    return {"endpoint_gap": max(frame.residuals["start_gap"], frame.residuals["end_gap"])}


def _compression(seed: int, i: int) -> Metrics:
    rng = child_rng(seed, _check_index("compression"), i)
    frame = hardy_frame(strict_contraction(rng, 3), COMPRESSION_MODES)
    return {
        "compression_gap": max(
            power_compression_gap(frame, 2 * COMPRESSION_MODES),
            power_compression_gap(frame, 2 * COMPRESSION_MODES, use_adjoint=True),
        )
    }


def _trace_transfer(seed: int, i: int) -> Metrics:
    rng = child_rng(seed, _check_index("trace_transfer"), i)
    frame = _mixed_pair(rng, i)
    n = 2 + i % 2
    gap, corner, leak = 0.0, 0.0, 0.0
    for q in range(-TRANSFER_MAX_POWER, TRANSFER_MAX_POWER + 1):
        if q == 0:
            continue
        dilated = dilate_pair(frame, abs(q) + n + 2)
        result = verify_trace_transfer(frame, dilated, TrigPoly.monomial(q), n)
        gap, corner = max(gap, result.gap), max(corner, result.corner_trace)
        leak = max(leak, result.support_leak)
    return {"trace_gap": gap, "corner_trace": corner, "support_leak": leak}


def _trace_formula(seed: int, i: int) -> Metrics:
    rng = child_rng(seed, _check_index("trace_formula"), i)
    frame = _mixed_pair(rng, i)
    worst = 0.0
    for n in (2, 3):
        xi = ssf_fourier(frame, n, FORMULA_QMAX)
        for _ in range(FORMULA_POLYS):
            worst = max(worst, trace_formula_check(frame, random_trig_poly(rng, FORMULA_QMAX), n, xi))
    return {"formula_gap": worst}


def _scaling(seed: int, i: int) -> Metrics:
    rng = child_rng(seed, _check_index("scaling"), i)
    n = 2 + i % 2
    # i mod 4 ∈ {0, 1}: e^{iθ}I 와 양의 생성자, {2, 3}: Haar U₀ 와 일반 Hermitian 생성자
    if i % 4 < 2:
        U0, A = scalar_unitary(rng, 3), positive_generator(rng, 3)
    else:
        U0, A = haar_unitary(rng, 3), random_generator(rng, 3)
    result = scaling_study(U0, A, n, SCALING_EPS, 1)
    return {"slope_deviation": abs(result.slope - n)}


def _pkq(config: ExperimentConfig) -> Callable[[int, int], Metrics]:
    def run(seed: int, i: int) -> Metrics:
        return pkq_metrics(config.m_values, config.t_samples)

    return run


def _cayley(seed: int, i: int) -> Metrics:
    rng = child_rng(seed, _check_index("cayley"), i)
    A0, A1 = random_dissipative(rng, 3), random_dissipative(rng, 3)
    return cayley_metrics(A0, A1, rng, 2 + i % 2)


def _gauge(seed: int, i: int) -> Metrics:
    rng = child_rng(seed, _check_index("gauge"), i)
    T0, V = strict_contraction(rng, 3), haar_unitary(rng, 3)
    worst = 0.0
    for frame in (build_cc_pair(T0, T0), build_cu_pair(V, V)):
        for n in (2, 3):
            xi = ssf_fourier(frame, n, GAUGE_QMAX)
            worst = max([worst, *(abs(c) for c in xi.coeffs.values())])
    return {"max_coefficient": worst}


def _determinism(config: ExperimentConfig, threads: int) -> Callable[[int, int], Metrics]:
    def run(seed: int, i: int) -> Metrics:
        counts = {name: DETERMINISM_INSTANCES for name in DETERMINISM_CHECKS}
        serial = dump_json(run_checks(config, 1, DETERMINISM_CHECKS, counts))
        pooled = dump_json(run_checks(config, max(2, threads), DETERMINISM_CHECKS, counts))
        return {"report_mismatch": 0.0 if serial == pooled else 1.0}

    return run


def _instance_fn(name: str, config: ExperimentConfig, threads: int) -> Callable[[int, int], Metrics]:
    table = {
        "oracle": _oracle,
        "unitarity": _unitarity,
        "endpoints": _endpoints,
        "compression": _compression,
        "trace_transfer": _trace_transfer,
        "trace_formula": _trace_formula,
        "scaling": _scaling,
        "pkq": _pkq(config),
        "cayley": _cayley,
        "gauge": _gauge,
        "determinism": _determinism(config, threads),
    }
    return table[name]


def _rows(name: str, count: int, results: Sequence[Metrics]) -> List[Dict[str, Any]]:
    if not results:
        return [{"check": name, "metric": "-", "instances": 0, "worst": 0.0, "tolerance": 0.0, "passed": True}]
    rows = []
    for metric in results[0]:
        worst = max(r[metric] for r in results)
        tol = TOLERANCES[metric]
        rows.append({
            "check": name,
            "metric": metric,
            "instances": count,
            "worst": float(worst),
            "tolerance": tol,
            "passed": bool(worst <= tol),
        })
    return rows


def run_checks(
    config: ExperimentConfig,
    threads: int,
    names: Sequence[str] = CHECK_NAMES,
    counts: Optional[Mapping[str, int]] = None,
) -> List[Dict[str, Any]]:
    """
    지정한 검사들을 실행하고 지표별 행을 돌려줍니다.

    Args:
        config (ExperimentConfig): seed, m_values, t_samples, instances 를 쓴다
        threads (int): 인스턴스 작업자 수
        names (Sequence[str]): 실행할 검사 이름 (CHECK_NAMES 순서)
        counts (Mapping[str, int] | None): 인스턴스 수 덮어쓰기

    Returns:
        List[Dict[str, Any]]: check, metric, instances, worst, tolerance, passed
    """
    rows: List[Dict[str, Any]] = []
    progress = tqdm(names, desc="verify", file=sys.stderr, disable=not SSF_SHOW_PROGRESS)
    for name in progress:
        count = counts[name] if counts and name in counts else config.instance_count(name)
        fn = _instance_fn(name, config, threads)
        results = ordered_map(lambda i: fn(config.seed, i), range(count), threads)
        check_rows = _rows(name, count, results)
        failed = [r["metric"] for r in check_rows if not r["passed"]]
        if failed:
            logger.warning(f"[VERIFY] {name} 실패: {', '.join(failed)}")
        else:
            logger.info(f"[VERIFY] {name} 통과 ({count}개)")
        rows.extend(check_rows)
    return rows


def run_verify(config: ExperimentConfig, threads: int = 1) -> Dict[str, Any]:
    """전체 불변식 묶음을 실행합니다. 보고서에는 작업자 수가 들어가지 않는다."""
    try:
        rows = run_checks(config, threads)
        passed = all(r["passed"] for r in rows)
        report = {"seed": config.seed, "checks": rows, "passed": passed}
        return {
            "json": {config.output_name("verify_report", "verify_report.json"): report},
            "csv": {},
            "report": report,
            "rows": rows,
            "passed": passed,
        }
    except Exception as e:
        return error_result(e)
