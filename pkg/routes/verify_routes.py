import logging

import click
import pandas as pd

from services.verify_service import run_verify
from utils.cli_utils import common_options, execute_mode, finish

logger = logging.getLogger(__name__)


@click.command("verify")
@common_options
def verify_command(config_path, threads, out_dir):
    """불변식 묶음을 실행하고 통과/실패 표를 출력합니다."""
    result = execute_mode("verify", run_verify, config_path, threads, out_dir)
    table = pd.DataFrame(result["rows"])
    table["passed"] = table["passed"].map({True: "PASS", False: "FAIL"})
    click.echo(table.to_string(index=False, float_format=lambda v: f"{v:.3e}"))
    finish("verify", result)
