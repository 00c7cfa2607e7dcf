# app/main.py
import click

from app import __version__
from app.api.router.references_router import references
from app.api.router.simulate_router import simulate
from app.core.config import settings
from app.core.logging import configure_logging


@click.group()
@click.version_option(__version__, prog_name="stbc-bp")
@click.option("--log-level", default=None, help="Overrides STBC_BP_LOG_LEVEL.")
@click.option("--log-json/--log-console", default=None)
def cli(log_level: str | None, log_json: bool | None) -> None:
    """Large STBC belief-propagation detection simulator."""
    configure_logging(
        level=log_level or settings.log_level,
        json=settings.log_json if log_json is None else log_json,
    )


cli.add_command(simulate)
cli.add_command(references)


if __name__ == "__main__":
    cli()
