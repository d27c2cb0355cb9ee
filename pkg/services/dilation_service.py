import logging
from typing import Any, Dict, List

from core.dilation import (
    dilate_pair,
    extension_defect_report,
    hardy_frame,
    power_compression_gap,
    required_modes,
    verify_trace_transfer,
)
from core.funcspace import TrigPoly
from core.ssf import ordered_map
from models.experiment import ExperimentConfig
from services.pair_service import resolve_pair
from utils.error_handler import error_result

logger = logging.getLogger(__name__)

TRACE_GAP_TOL = 1e-8
CORNER_TOL = 1e-10
COMPRESSION_TOL = 1e-12
SUPPORT_LEAK_TOL = 1e-12


def run_dilate(config: ExperimentConfig, threads: int = 1) -> Dict[str, Any]:
    """
    팽창 쌍으로 trace 이전과 구석 블록을 검증합니다.

    0 < |q| ≤ qmax 단항식마다 압축 잔차 trace 와 팽창 잔차 trace 를 비교한다.
    truncation 이 없으면 N = qmax + n + 2.
    """
    try:
        frame, source = resolve_pair(config)
        n = config.n
        N = config.truncation or required_modes(TrigPoly.monomial(config.qmax), n)
        dilated = dilate_pair(frame, N)
        qs = [q for q in range(-config.qmax, config.qmax + 1) if q != 0]

        def one(q: int) -> Dict[str, Any]:
            result = verify_trace_transfer(frame, dilated, TrigPoly.monomial(q), n)
            return {"q": q, **result._asdict()}

        rows: List[Dict[str, Any]] = ordered_map(one, qs, threads)

        # 팽창되는 축약: cu 는 끝점 T, cc 는 시작점 T₀
        base = frame.end if frame.kind == "cu" else frame.start
        hardy = hardy_frame(base, N)
        compression = max(
            power_compression_gap(hardy, 2 * N),
            power_compression_gap(hardy, 2 * N, use_adjoint=True),
        )

        report = {
            "pair": source,
            "n": n,
            "truncation": N,
            "dilated_dim": dilated.frame.total_dim,
            "transfer": rows,
            "max_gap": max(r["gap"] for r in rows),
            "max_corner_trace": max(r["corner_trace"] for r in rows),
            "max_support_leak": max(r["support_leak"] for r in rows),
            "compression_gap": compression,
        }
        if frame.kind == "cc":
            report["extension"] = extension_defect_report(frame.end, dilated.frame)
        report["passed"] = bool(
            report["max_gap"] <= TRACE_GAP_TOL
            and report["max_corner_trace"] <= CORNER_TOL
            and report["max_support_leak"] <= SUPPORT_LEAK_TOL
        )

        logger.info(f"[DILATE] N={N}, 최대 trace 차이 {report['max_gap']:.3e}, 구석 {report['max_corner_trace']:.3e}")
        return {
            "json": {config.output_name("dilate_report", "dilate_report.json"): report},
            "csv": {},
            "report": report,
            "passed": report["passed"],
        }
    except Exception as e:
        return error_result(e)
