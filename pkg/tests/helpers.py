# tests/helpers.py
import numpy as np


def complex_gaussian(rng, shape, variance=1.0):
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def bpsk(rng, k):
    return 1.0 - 2.0 * rng.integers(0, 2, size=k)
