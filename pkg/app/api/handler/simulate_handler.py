# app/api/handler/simulate_handler.py
from pathlib import Path
from typing import Iterator, Optional

from app.api.interface.abstract_handler import AbstractHandler
from app.core.config import Settings, settings
from app.core.logging import get_logger, set_run_context
from app.infra.results_writer import emit_results
from app.models.ber_record import BerRecord
from app.models.sim_config import SimConfig
from app.services.monte_carlo import iter_sweep
from app.utils.generate_id import generate_id

logger = get_logger("simulate_handler")


def default_output(cfg: SimConfig, source: Settings) -> Path:
    name = (
        f"{cfg.code.family.value}_{cfg.code.n}x{cfg.n_r}_"
        f"{cfg.detector.kind.value}_{cfg.channel.model.value}_seed{cfg.seed}.csv"
    )
    return source.results_dir / name


class SimulateHandler(AbstractHandler):
    def __init__(self, source: Settings = settings) -> None:
        super().__init__()
        self.settings = source

    def do_process(
        self, cfg: SimConfig, workers: Optional[int] = None
    ) -> tuple[Path, list[BerRecord]]:
        run_id = generate_id("RUN")
        set_run_context(run_id=run_id, seed=cfg.seed)
        out = cfg.output or default_output(cfg, self.settings)
        logger.info(
            "[%s] Processing simulate request", __class__.__name__, out=str(out)
        )

        records: list[BerRecord] = []

        def collected() -> Iterator[BerRecord]:
            for record in iter_sweep(cfg, workers or self.settings.workers):
                records.append(record)
                yield record

        emit_results(collected(), cfg, out, run_id)
        return out, records
