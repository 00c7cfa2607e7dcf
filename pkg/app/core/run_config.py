# app/core/run_config.py
"""Assemble a SimConfig from settings defaults, a key=value file and CLI flags."""
from pathlib import Path
from typing import Any, Mapping, Optional

from dotenv import dotenv_values
from pydantic import ValidationError

from app.core.config import Settings, settings
from app.core.errors import ConfigError
from app.models.sim_config import DetectorKind, SimConfig, SnrSweep

# flat key -> path inside SimConfig
FLAT_KEYS: dict[str, tuple[str, ...]] = {
    "code": ("code", "family"),
    "n": ("code", "n"),
    "nr": ("n_r",),
    "detector": ("detector", "kind"),
    "iters": ("detector", "iters"),
    "damping": ("detector", "damping"),
    "psi_form": ("detector", "psi_form"),
    "channel": ("channel", "model"),
    "corr_r": ("channel", "r"),
    "snr": ("snr_sweep",),
    "frames": ("stopping", "max_frames"),
    "target_errors": ("stopping", "target_bit_errors"),
    "seed": ("seed",),
    "out": ("output",),
    "noiseless": ("noiseless",),
    "es": ("es",),
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def normalize_key(raw: str) -> str:
    return raw.strip().lstrip("-").replace("-", "_").lower()


def parse_snr_grid(text: str) -> SnrSweep:
    """``start:step:stop`` or a single value."""
    parts = [p.strip() for p in str(text).split(":")]
    try:
        if len(parts) == 1:
            value = float(parts[0])
            return SnrSweep(start_db=value, stop_db=value, step_db=1.0)
        if len(parts) == 3:
            start, step, stop = (float(p) for p in parts)
            return SnrSweep(start_db=start, stop_db=stop, step_db=step)
    except (ValueError, ValidationError) as e:
        raise ConfigError(f"Invalid SNR grid {text!r}: {e}") from e
    raise ConfigError(f"Invalid SNR grid {text!r}, expected start:step:stop")


def load_config_file(path: Path) -> dict[str, Optional[str]]:
    if not Path(path).is_file():
        raise ConfigError(f"Config file not found: {path}")
    values = dotenv_values(path)
    out: dict[str, Optional[str]] = {}
    for key, value in values.items():
        norm = normalize_key(key)
        if norm not in FLAT_KEYS:
            raise ConfigError(f"Unknown config key {key!r} in {path}")
        out[norm] = value
    return out


def _coerce(key: str, value: Any) -> Any:
    if key == "snr" and not isinstance(value, SnrSweep):
        return parse_snr_grid(value).model_dump()
    if key == "noiseless" and isinstance(value, str):
        lowered = value.strip().lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ConfigError(f"Invalid boolean for noiseless: {value!r}")
    if key in ("code", "detector", "channel", "psi_form") and isinstance(value, str):
        return value.strip().lower()
    return value


def _defaults(source: Settings) -> dict[str, Any]:
    return {
        "stopping": {
            "max_frames": source.max_frames,
            "target_bit_errors": source.target_bit_errors,
        }
    }


def build_sim_config(
    file_values: Optional[Mapping[str, Any]] = None,
    flag_values: Optional[Mapping[str, Any]] = None,
    source: Settings = settings,
) -> SimConfig:
    """Settings defaults < config file < flags. ``None`` flag values are ignored."""
    tree = _defaults(source)
    for layer in (file_values or {}, flag_values or {}):
        for raw_key, value in layer.items():
            if value is None:
                continue
            key = normalize_key(raw_key)
            if key not in FLAT_KEYS:
                raise ConfigError(f"Unknown config key {raw_key!r}")
            path = FLAT_KEYS[key]
            node = tree
            for part in path[:-1]:
                node = node.setdefault(part, {})
            node[path[-1]] = _coerce(key, value)
    try:
        cfg = SimConfig.model_validate(tree)
    except ValidationError as e:
        raise ConfigError(f"Invalid run configuration: {e}") from e
    if cfg.detector.kind is DetectorKind.ML and cfg.code.k > source.ml_max_k:
        raise ConfigError(
            f"ML detection over K={cfg.code.k} exceeds the limit of {source.ml_max_k}"
        )
    return cfg
