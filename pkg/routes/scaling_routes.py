import logging

import click

from services.scaling_service import run_scaling
from utils.cli_utils import common_options, execute_mode, finish

logger = logging.getLogger(__name__)


@click.command("scaling")
@common_options
def scaling_command(config_path, threads, out_dir):
    """|trace R_n| 의 ε 스케일링 기울기를 적합합니다."""
    result = execute_mode("scaling", run_scaling, config_path, threads, out_dir)
    report = result["report"]
    click.echo(f"n={report['n']} q={report['q']} slope={report['slope']:.4f}")
    finish("scaling", result)
