# app/api/router/simulate_router.py
from pathlib import Path
from typing import Any, Optional

import click

from app.api.exception_handling import handle_errors
from app.api.handler.simulate_handler import SimulateHandler
from app.core.run_config import build_sim_config, load_config_file
from app.models.channel_config import ChannelModel
from app.models.sim_config import CodeFamily, DetectorKind
from app.services.bp_detector import PsiForm


def _choices(enum: Any) -> click.Choice:
    return click.Choice([m.value for m in enum], case_sensitive=False)


@click.command("simulate")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--code", type=_choices(CodeFamily), default=None)
@click.option("--n", type=int, default=None, help="Code size, or antennas for vblast.")
@click.option("--nr", type=int, default=None, help="Receive antennas.")
@click.option("--detector", type=_choices(DetectorKind), default=None)
@click.option("--iters", type=int, default=None)
@click.option("--damping", type=float, default=None)
@click.option("--psi-form", type=_choices(PsiForm), default=None)
@click.option("--channel", type=_choices(ChannelModel), default=None)
@click.option("--corr-r", type=float, default=None)
@click.option("--snr", type=str, default=None, help="start:step:stop in dB.")
@click.option("--frames", type=int, default=None, help="Frame cap per SNR point.")
@click.option("--target-errors", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(path_type=Path), default=None)
@click.option("--noiseless/--with-noise", default=None)
@click.option("--workers", type=int, default=None, help="Worker processes.")
@handle_errors
def simulate(
    config_path: Optional[Path], workers: Optional[int], **flags: Any
) -> None:
    """Monte-Carlo BER sweep."""
    file_values = load_config_file(config_path) if config_path else None
    cfg = build_sim_config(file_values, flags)
    out, records = SimulateHandler().do_process(cfg, workers)
    click.echo(f"{len(records)} points written to {out}")
