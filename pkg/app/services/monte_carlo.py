# app/services/monte_carlo.py
import time
from dataclasses import dataclass
from functools import partial
from typing import Iterator, Optional

import numpy as np
import numpy.typing as npt

from app.core.config import settings
from app.core.logging import get_logger
from app.infra.random_streams import frame_stream
from app.models.ber_record import BerRecord
from app.models.channel_config import ChannelConfig
from app.models.sim_config import DetectorKind, SimConfig
from app.services.bp_detector import build_mrf_from_stats, detect
from app.services.cda_stbc import ComplexArray, vec
from app.services.channel import apply_channel, draw_channel
from app.services.reference_detectors import (
    LinearSystem,
    mf_detect,
    ml_detect,
    mmse_detect,
)
from app.services.transmit import TransmitScheme, build_scheme
from app.worker.frame_pool import FramePool

logger = get_logger("monte_carlo")


@dataclass(frozen=True)
class FrameOutcome:
    frame: int
    bits: int
    bit_errors: int


def channel_config(cfg: SimConfig, snr_db: float) -> ChannelConfig:
    return ChannelConfig(
        n_t=cfg.n_t,
        n_r=cfg.n_r,
        snr_db=snr_db,
        es=cfg.es,
        model=cfg.channel.model,
        r=cfg.channel.r,
    )


def detect_frame(
    cfg: SimConfig,
    scheme: TransmitScheme,
    h_c: ComplexArray,
    y_c: ComplexArray,
    sigma2: float,
) -> npt.NDArray[np.int8]:
    """Hard decisions for one received code block with the configured detector."""
    det = cfg.detector
    if det.kind in (DetectorKind.BP, DetectorKind.MF):
        hy, hh = scheme.matched_filter_stats(h_c, y_c)
        model = build_mrf_from_stats(hy, hh, sigma2, psi_form=det.psi_form)
        if det.kind is DetectorKind.MF:
            return mf_detect(model)
        return detect(model, iters=det.iters, damping=det.damping).hard

    system = LinearSystem(y=vec(y_c), h=scheme.linearize(h_c), sigma2=sigma2)
    if det.kind is DetectorKind.ML:
        return ml_detect(system)
    return mmse_detect(system)


def simulate_frame(cfg: SimConfig, snr_db: float, frame: int) -> FrameOutcome:
    """One quasi-static frame: fresh symbols, fresh channel, fresh noise."""
    scheme = build_scheme(cfg.code.family, cfg.code.n)
    rng = frame_stream(cfg.seed, snr_db, frame)
    d = 1.0 - 2.0 * rng.integers(0, 2, size=scheme.k)
    x = scheme.encode(d)
    realization = draw_channel(channel_config(cfg, snr_db), rng)
    y_c = apply_channel(realization, x, rng, noise=not cfg.noiseless)

    sigma2 = realization.sigma2
    if cfg.noiseless or sigma2 <= 0.0:
        sigma2 = settings.noiseless_sigma2
    hard = detect_frame(cfg, scheme, realization.h_c, y_c, sigma2)
    errors = int(np.count_nonzero(hard != d))
    return FrameOutcome(frame=frame, bits=scheme.k, bit_errors=errors)


def run_point(
    cfg: SimConfig,
    snr_db: float,
    pool: Optional[FramePool] = None,
    frame_batch: Optional[int] = None,
) -> BerRecord:
    """Simulate frames until the error target or the frame cap is reached.

    Frames are scheduled in fixed batches but accumulated strictly in frame
    order, and the point ends on the exact frame that reaches the target.
    """
    if pool is None:
        with FramePool(settings.workers) as own_pool:
            return run_point(cfg, snr_db, own_pool, frame_batch)

    batch_size = frame_batch or settings.frame_batch
    max_frames = cfg.stopping.max_frames
    target = cfg.stopping.target_bit_errors
    task = partial(simulate_frame, cfg, snr_db)

    started = time.perf_counter()
    frames = bits = errors = 0
    stop_reason = "max_frames"
    next_frame = 0
    while next_frame < max_frames and stop_reason == "max_frames":
        upper = min(next_frame + batch_size, max_frames)
        for outcome in pool.map(task, range(next_frame, upper)):
            frames += 1
            bits += outcome.bits
            errors += outcome.bit_errors
            if errors >= target:
                stop_reason = "target_bit_errors"
                break
        next_frame = upper

    record = BerRecord(
        snr_db=snr_db,
        frames=frames,
        bits=bits,
        bit_errors=errors,
        wall_time_s=time.perf_counter() - started,
    )
    logger.info(
        "point finished",
        snr_db=snr_db,
        frames=frames,
        bit_errors=errors,
        ber=record.ber,
        stop_reason=stop_reason,
    )
    return record


def iter_sweep(cfg: SimConfig, workers: Optional[int] = None) -> Iterator[BerRecord]:
    """Yield one record per SNR point, in ascending SNR, as each finishes."""
    grid = cfg.snr_sweep.grid()
    logger.info(
        "sweep started",
        points=len(grid),
        family=cfg.code.family.value,
        n=cfg.code.n,
        n_r=cfg.n_r,
        detector=cfg.detector.kind.value,
    )
    with FramePool(workers or settings.workers) as pool:
        for snr_db in grid:
            yield run_point(cfg, snr_db, pool)


def run_sweep(cfg: SimConfig, workers: Optional[int] = None) -> list[BerRecord]:
    return list(iter_sweep(cfg, workers))
