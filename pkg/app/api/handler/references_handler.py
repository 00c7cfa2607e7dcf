# app/api/handler/references_handler.py
import csv
import sys
from pathlib import Path
from typing import Optional

from app.api.interface.abstract_handler import AbstractHandler
from app.core.errors import ConfigError, ResultsIOError
from app.core.logging import get_logger
from app.models.sim_config import SnrSweep
from app.services.reference_curves import REFERENCE_CURVES, reference_curve

logger = get_logger("references_handler")


class ReferencesHandler(AbstractHandler):
    def do_process(
        self, curve: str, sweep: SnrSweep, out: Optional[Path] = None
    ) -> list[tuple[float, float]]:
        if curve not in REFERENCE_CURVES:
            raise ConfigError(f"Unknown reference curve {curve!r}")
        points = reference_curve(curve, sweep.grid())
        logger.info(
            "[%s] Reference curve computed",
            __class__.__name__,
            curve=curve,
            points=len(points),
        )
        rows = [["snr_db", "ber"], *([repr(s), repr(b)] for s, b in points)]
        if out is None:
            csv.writer(sys.stdout, lineterminator="\n").writerows(rows)
            return points
        try:
            out.parent.mkdir(parents=True, exist_ok=True)
            with out.open("w", newline="", encoding="utf-8") as fh:
                csv.writer(fh, lineterminator="\n").writerows(rows)
        except OSError as e:
            raise ResultsIOError(
                f"Cannot write reference curve ({e.strerror})", str(out)
            ) from e
        return points
