# app/services/channel.py
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import numpy.typing as npt
from scipy.linalg import eigh, toeplitz

from app.core.errors import DimensionMismatchError, InvalidModelError
from app.models.channel_config import ChannelConfig, ChannelModel
from app.services.cda_stbc import ComplexArray

FloatArray = npt.NDArray[np.float64]


@dataclass(frozen=True)
class ChannelRealization:
    h_c: ComplexArray  # (n_r, n_t)
    sigma2: float


def snr_to_sigma2(cfg: ChannelConfig) -> float:
    """sigma² = N_t E_s / gamma, gamma being the per-receive-antenna SNR."""
    if math.isnan(cfg.snr_db) or cfg.snr_db == -math.inf:
        raise InvalidModelError(f"SNR must be finite, got {cfg.snr_db}")
    if cfg.snr_db == math.inf:
        return 0.0
    return cfg.n_t * cfg.es / 10.0 ** (cfg.snr_db / 10.0)


def exponential_correlation(m: int, r: float) -> FloatArray:
    """[R]_{ab} = r^|a-b|."""
    return np.asarray(toeplitz(np.power(r, np.arange(m))), dtype=np.float64)


@lru_cache(maxsize=32)
def correlation_sqrt(m: int, r: float) -> FloatArray:
    """Symmetric square root of the exponential correlation matrix."""
    w, v = eigh(exponential_correlation(m, r))
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    root.setflags(write=False)
    return root


def complex_normal(
    rng: np.random.Generator, shape: tuple[int, ...], variance: float = 1.0
) -> ComplexArray:
    """Circularly-symmetric complex Gaussian, variance split across re/im."""
    scale = math.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def draw_channel(cfg: ChannelConfig, rng: np.random.Generator) -> ChannelRealization:
    h = complex_normal(rng, (cfg.n_r, cfg.n_t))
    if cfg.model is ChannelModel.KRONECKER and cfg.r > 0.0:
        h = correlation_sqrt(cfg.n_r, cfg.r) @ h @ correlation_sqrt(cfg.n_t, cfg.r)
    return ChannelRealization(h_c=h, sigma2=snr_to_sigma2(cfg))


def apply_channel(
    realization: ChannelRealization,
    x: npt.ArrayLike,
    rng: np.random.Generator,
    noise: bool = True,
) -> ComplexArray:
    """Y = H_c X + N with N ~ CN(0, sigma²) entry-wise."""
    xm = np.atleast_2d(np.asarray(x, dtype=np.complex128))
    h = realization.h_c
    if xm.shape[0] != h.shape[1]:
        raise DimensionMismatchError(
            f"Code matrix has {xm.shape[0]} rows, "
            f"channel has {h.shape[1]} transmit antennas"
        )
    y = h @ xm
    if noise and realization.sigma2 > 0.0:
        y = y + complex_normal(rng, y.shape, realization.sigma2)
    return y
