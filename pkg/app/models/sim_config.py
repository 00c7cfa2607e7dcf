# app/models/sim_config.py
from enum import Enum
from pathlib import Path
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.models.channel_config import ChannelModel
from app.services.bp_detector import PsiForm

_GRID_TOL = 1e-9


class CodeFamily(str, Enum):
    ILL = "ill"
    FD_ILL = "fdill"
    VBLAST = "vblast"


class DetectorKind(str, Enum):
    BP = "bp"
    ML = "ml"
    MMSE = "mmse"
    MF = "mf"


class Modulation(str, Enum):
    BPSK = "bpsk"


class CodeSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    family: CodeFamily = CodeFamily.FD_ILL
    # code size n for CDA codes, antenna count n_t for V-BLAST
    n: int = Field(default=4, ge=1)

    @property
    def k(self) -> int:
        return self.n if self.family is CodeFamily.VBLAST else self.n * self.n


class DetectorSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: DetectorKind = DetectorKind.BP
    iters: int = Field(default=5, ge=1)
    damping: float = Field(default=0.0, ge=0.0, lt=1.0)
    psi_form: PsiForm = PsiForm.AS_PRINTED


class ChannelSection(BaseModel):
    model_config = ConfigDict(frozen=True)

    model: ChannelModel = ChannelModel.IID
    r: float = Field(default=0.0, ge=0.0, lt=1.0)


class SnrSweep(BaseModel):
    model_config = ConfigDict(frozen=True)

    start_db: float = 0.0
    stop_db: float = 10.0
    step_db: float = Field(default=2.0, gt=0.0)

    def grid(self) -> list[float]:
        """Ascending points start, start + step, ... up to and including stop."""
        if self.start_db > self.stop_db + _GRID_TOL:
            return []
        span = (self.stop_db - self.start_db) / self.step_db
        count = int(np.floor(span + _GRID_TOL)) + 1
        return [round(self.start_db + i * self.step_db, 9) for i in range(count)]


class Stopping(BaseModel):
    model_config = ConfigDict(frozen=True)

    max_frames: int = Field(default=100_000, ge=1)
    target_bit_errors: int = Field(default=400, ge=1)


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: CodeSection = CodeSection()
    n_r: int = Field(default=4, ge=1)
    modulation: Modulation = Modulation.BPSK
    detector: DetectorSection = DetectorSection()
    channel: ChannelSection = ChannelSection()
    snr_sweep: SnrSweep = SnrSweep()
    stopping: Stopping = Stopping()
    seed: int = Field(default=0, ge=0, lt=2**64)
    noiseless: bool = False
    es: float = Field(default=1.0, gt=0.0)
    output: Optional[Path] = None

    @field_validator("output", mode="before")
    @classmethod
    def _empty_output(cls, value: object) -> object:
        return None if value in ("", None) else value

    @property
    def n_t(self) -> int:
        return self.code.n
