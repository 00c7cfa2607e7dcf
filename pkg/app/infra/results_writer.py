# app/infra/results_writer.py
import csv
import datetime as dt
import json
import subprocess
from pathlib import Path
from types import TracebackType
from typing import IO, Any, Iterable, Optional

from pydantic import ValidationError

from app import __version__
from app.core.errors import ConfigError, ResultsIOError
from app.core.logging import get_logger
from app.models.ber_record import CSV_COLUMNS, BerRecord
from app.models.sim_config import CodeFamily, SimConfig
from app.services.cda_stbc import CodeVariant, build_code

logger = get_logger("results_writer")


def format_row(record: BerRecord) -> list[str]:
    return [
        repr(float(record.snr_db)),
        str(record.frames),
        str(record.bits),
        str(record.bit_errors),
        repr(float(record.ber)),
        f"{record.wall_time_s:.6f}",
    ]


def manifest_path_for(csv_path: Path) -> Path:
    return csv_path.with_suffix(".manifest.json")


def version_string() -> str:
    """``git describe`` of the checkout, else the package version."""
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            capture_output=True,
            text=True,
            timeout=5,
            cwd=Path(__file__).resolve().parent,
        )
    except (OSError, subprocess.SubprocessError):
        return __version__
    described = out.stdout.strip()
    return described if out.returncode == 0 and described else __version__


def _pair(value: complex) -> list[float]:
    return [value.real, value.imag]


def code_parameters(cfg: SimConfig) -> dict[str, Any]:
    if cfg.code.family is CodeFamily.VBLAST:
        return {"family": "vblast", "n_t": cfg.code.n, "k": cfg.code.k}
    ill = cfg.code.family is CodeFamily.ILL
    variant = CodeVariant.ILL if ill else CodeVariant.FD_ILL
    code, _ = build_code(cfg.code.n, variant)
    return {
        "family": cfg.code.family.value,
        "variant": code.variant.value,
        "n": code.n,
        "k": code.k,
        "omega_n": _pair(code.omega_n),
        "delta": _pair(code.delta),
        "t": _pair(code.t),
    }


class ResultsWriter:
    """Appends one CSV row per finished SNR point, flushing as it goes."""

    def __init__(self, path: Path) -> None:
        self.path = Path(path)
        self._fh: Optional[IO[str]] = None
        self._writer: Any = None

    def __enter__(self) -> "ResultsWriter":
        try:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            self._fh = self.path.open("w", newline="", encoding="utf-8")
        except OSError as e:
            raise ResultsIOError(
                f"Cannot open results file ({e.strerror})", str(self.path)
            ) from e
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._write([*CSV_COLUMNS])
        return self

    def __exit__(
        self,
        exc_type: Optional[type[BaseException]],
        exc: Optional[BaseException],
        tb: Optional[TracebackType],
    ) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def _write(self, row: list[str]) -> None:
        assert self._fh is not None
        try:
            self._writer.writerow(row)
            self._fh.flush()
        except OSError as e:
            raise ResultsIOError(
                f"Cannot write results ({e.strerror})", str(self.path)
            ) from e

    def write(self, record: BerRecord) -> None:
        self._write(format_row(record))


def write_manifest(cfg: SimConfig, csv_path: Path, run_id: str) -> Path:
    path = manifest_path_for(Path(csv_path))
    payload = {
        "run_id": run_id,
        "version": version_string(),
        "created_at": dt.datetime.now(dt.timezone.utc).isoformat(),
        "seed": cfg.seed,
        "config": cfg.model_dump(mode="json"),
        "code": code_parameters(cfg),
        "records_file": Path(csv_path).name,
    }
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise ResultsIOError(f"Cannot write manifest ({e.strerror})", str(path)) from e
    logger.info("manifest written", path=str(path))
    return path


def load_manifest(path: Path) -> SimConfig:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ResultsIOError(f"Cannot read manifest ({e.strerror})", str(path)) from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"Manifest is not valid JSON: {path}: {e}") from e
    try:
        return SimConfig.model_validate(payload["config"])
    except (KeyError, ValidationError) as e:
        raise ConfigError(f"Manifest does not hold a valid run config: {path}") from e


def emit_results(
    records: Iterable[BerRecord], cfg: SimConfig, path: Path, run_id: str
) -> tuple[Path, Path]:
    """Write the manifest, then one CSV row per record as the iterable yields it.

    The manifest exists before the first row is written.
    """
    manifest = write_manifest(cfg, path, run_id)
    rows = 0
    with ResultsWriter(path) as writer:
        for record in records:
            writer.write(record)
            rows += 1
    logger.info("results written", path=str(path), points=rows)
    return Path(path), manifest
