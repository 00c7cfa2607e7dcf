# app/infra/random_streams.py
"""Counter-based random streams.

Every Monte-Carlo frame gets its own Philox generator keyed by
(seed, snr, frame), so no frame depends on how many frames ran before it or
on which worker ran it.
"""
import numpy as np


def snr_key(snr_db: float) -> int:
    """IEEE-754 bit pattern of the SNR value, as a non-negative integer."""
    return int(np.float64(snr_db).view(np.uint64))


def frame_stream(seed: int, snr_db: float, frame: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(seed, spawn_key=(snr_key(snr_db), frame))
    return np.random.Generator(np.random.Philox(sequence))
