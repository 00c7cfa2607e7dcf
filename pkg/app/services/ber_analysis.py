# app/services/ber_analysis.py
"""Read-offs from measured BER curves."""
import math
from typing import Optional, Sequence

import numpy as np

from app.models.ber_record import BerRecord
from app.services.reference_curves import awgn_snr_at_ber


def binomial_sigma(record: BerRecord) -> float:
    if not record.bits:
        return 0.0
    p = record.ber
    return math.sqrt(p * (1.0 - p) / record.bits)


def confidence_half_width(record: BerRecord, z: float = 1.96) -> float:
    return z * binomial_sigma(record)


def snr_at_ber(records: Sequence[BerRecord], target: float) -> Optional[float]:
    """First downward crossing of ``target``, log-BER interpolated linearly in SNR."""
    points = sorted((r for r in records if r.bits), key=lambda r: r.snr_db)
    for lo, hi in zip(points, points[1:]):
        if lo.ber >= target >= hi.ber and hi.ber > 0.0:
            if lo.ber == hi.ber:
                return lo.snr_db
            frac = (math.log10(lo.ber) - math.log10(target)) / (
                math.log10(lo.ber) - math.log10(hi.ber)
            )
            return lo.snr_db + frac * (hi.snr_db - lo.snr_db)
    return None


def gap_to_awgn_db(
    records: Sequence[BerRecord], target: float = 1e-3
) -> Optional[float]:
    snr = snr_at_ber(records, target)
    return None if snr is None else snr - awgn_snr_at_ber(target)


def diversity_order(records: Sequence[BerRecord], tail: int = 3) -> Optional[float]:
    """|slope| of log10(BER) against SNR/10 over the last ``tail`` nonzero points."""
    nonzero = (r for r in records if r.bit_errors)
    points = sorted(nonzero, key=lambda r: r.snr_db)[-tail:]
    if len(points) < 2:
        return None
    x = np.array([p.snr_db / 10.0 for p in points])
    y = np.log10([p.ber for p in points])
    slope = np.polyfit(x, y, 1)[0]
    return float(abs(slope))
