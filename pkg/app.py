import logging

from config import LOG_FILE, LOG_LEVEL

logging.basicConfig(
    level=getattr(logging, LOG_LEVEL.upper(), logging.INFO),
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    handlers=[
        logging.FileHandler(LOG_FILE),
        logging.StreamHandler()
    ]
)

import click
from routes.verify_routes import verify_command
from routes.ssf_routes import ssf_command
from routes.dilate_routes import dilate_command
from routes.cayley_routes import cayley_command
from routes.scaling_routes import scaling_command


@click.group(name="ssf-lab")
def cli():
    """고차 스펙트럼 이동 함수 수치 실험 도구"""


cli.add_command(verify_command)
cli.add_command(ssf_command)
cli.add_command(dilate_command)
cli.add_command(cayley_command)
cli.add_command(scaling_command)

if __name__ == '__main__':
    cli()
