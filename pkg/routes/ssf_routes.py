import logging

import click

from services.ssf_service import run_ssf
from utils.cli_utils import common_options, execute_mode, finish

logger = logging.getLogger(__name__)


@click.command("ssf")
@common_options
def ssf_command(config_path, threads, out_dir):
    """쌍을 만들고 ξ_n 계수 JSON 과 표본 CSV 를 씁니다."""
    result = execute_mode("ssf", run_ssf, config_path, threads, out_dir)
    report = result["report"]
    click.echo(f"kind={report['pair']['kind']} n={report['n']} qmax={report['qmax']} l1_proxy={report['l1_proxy']:.6g}")
    finish("ssf", result)
