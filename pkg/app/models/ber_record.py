# app/models/ber_record.py
from pydantic import BaseModel, ConfigDict, Field, model_validator

CSV_COLUMNS = ("snr_db", "frames", "bits", "bit_errors", "ber", "wall_time_s")


class BerRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    snr_db: float
    frames: int = Field(ge=0)
    bits: int = Field(ge=0)
    bit_errors: int = Field(ge=0)
    wall_time_s: float = Field(default=0.0, ge=0.0)

    @model_validator(mode="after")
    def _errors_within_bits(self) -> "BerRecord":
        if self.bit_errors > self.bits:
            raise ValueError("bit_errors cannot exceed bits")
        return self

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits if self.bits else 0.0
