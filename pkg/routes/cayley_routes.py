import logging

import click

from services.cayley_service import run_cayley
from utils.cli_utils import common_options, execute_mode, finish

logger = logging.getLogger(__name__)


@click.command("cayley")
@common_options
def cayley_command(config_path, threads, out_dir):
    """Cayley 계층 검사와 p_{k,q} 표, η_n, ζ_n 내보내기."""
    result = execute_mode("cayley", run_cayley, config_path, threads, out_dir)
    for name, check in sorted(result["report"]["checks"].items()):
        status = "PASS" if check["passed"] else "FAIL"
        click.echo(f"{status} {name} {check['value']:.3e} (tol {check['tolerance']:g})")
    finish("cayley", result)
