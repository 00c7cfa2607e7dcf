# app/models/channel_config.py
from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class ChannelModel(str, Enum):
    IID = "iid"
    KRONECKER = "kron"


class ChannelConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_t: int = Field(ge=1)
    n_r: int = Field(ge=1)
    snr_db: float
    es: float = Field(default=1.0, gt=0.0)
    model: ChannelModel = ChannelModel.IID
    r: float = Field(default=0.0, ge=0.0, lt=1.0)
