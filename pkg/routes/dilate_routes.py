import logging

import click

from services.dilation_service import run_dilate
from utils.cli_utils import common_options, execute_mode, finish

logger = logging.getLogger(__name__)


@click.command("dilate")
@common_options
def dilate_command(config_path, threads, out_dir):
    """팽창 쌍의 trace 이전과 구석 블록을 검증합니다."""
    result = execute_mode("dilate", run_dilate, config_path, threads, out_dir)
    report = result["report"]
    click.echo(
        f"N={report['truncation']} max_gap={report['max_gap']:.3e} "
        f"max_corner_trace={report['max_corner_trace']:.3e} compression_gap={report['compression_gap']:.3e}"
    )
    finish("dilate", result)
