# app/services/reference_curves.py
"""Closed-form BPSK reference curves."""
import math
from typing import Callable, Iterable

from scipy.special import erfc, erfcinv


def _linear(snr_db: float) -> float:
    return 0.0 if snr_db == -math.inf else 10.0 ** (snr_db / 10.0)


def siso_awgn_ref(snr_db: float) -> float:
    """Q(sqrt(2 gamma)) = erfc(sqrt(gamma)) / 2."""
    if snr_db == math.inf:
        return 0.0
    return 0.5 * float(erfc(math.sqrt(_linear(snr_db))))


def siso_rayleigh_ref(snr_db: float) -> float:
    """Average BPSK error rate over flat Rayleigh fading with coherent detection."""
    if snr_db == math.inf:
        return 0.0
    gamma = _linear(snr_db)
    return 0.5 * (1.0 - math.sqrt(gamma / (1.0 + gamma)))


def awgn_snr_at_ber(target: float) -> float:
    """SNR in dB where the SISO AWGN curve reaches ``target``."""
    if not 0.0 < target < 0.5:
        raise ValueError(f"Target BER must lie in (0, 0.5), got {target}")
    gamma = float(erfcinv(2.0 * target)) ** 2
    return 10.0 * math.log10(gamma)


REFERENCE_CURVES: dict[str, Callable[[float], float]] = {
    "awgn": siso_awgn_ref,
    "rayleigh": siso_rayleigh_ref,
}


def reference_curve(name: str, grid: Iterable[float]) -> list[tuple[float, float]]:
    curve = REFERENCE_CURVES[name]
    return [(snr, curve(snr)) for snr in grid]
