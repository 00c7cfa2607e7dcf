# app/api/router/references_router.py
from pathlib import Path
from typing import Optional

import click

from app.api.exception_handling import handle_errors
from app.api.handler.references_handler import ReferencesHandler
from app.core.errors import ConfigError
from app.core.run_config import parse_snr_grid


@click.command("references")
@click.option("--awgn", "curve", flag_value="awgn", help="SISO AWGN BPSK.")
@click.option("--rayleigh", "curve", flag_value="rayleigh", help="SISO Rayleigh BPSK.")
@click.option("--snr", type=str, required=True, help="start:step:stop in dB.")
@click.option("--out", type=click.Path(path_type=Path), default=None)
@handle_errors
def references(curve: Optional[str], snr: str, out: Optional[Path]) -> None:
    """Analytical reference curves as snr_db,ber CSV."""
    if curve is None:
        raise ConfigError("Choose one of --awgn or --rayleigh")
    ReferencesHandler().do_process(curve, parse_snr_grid(snr), out)
