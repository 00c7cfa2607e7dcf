# app/services/transmit.py
from dataclasses import dataclass
from functools import lru_cache
from typing import Protocol

import numpy as np
import numpy.typing as npt

from app.core.errors import DimensionMismatchError
from app.models.sim_config import CodeFamily
from app.services.cda_stbc import (
    CodeSpec,
    CodeVariant,
    ComplexArray,
    WeightMatrixSet,
    build_code,
    encode,
    linearize,
    structured_stats,
    vec,
)


class TransmitScheme(Protocol):
    """What the Monte-Carlo engine needs from a transmitter."""

    @property
    def k(self) -> int: ...

    @property
    def n_t(self) -> int: ...

    @property
    def time_slots(self) -> int: ...

    def encode(self, d: npt.ArrayLike) -> ComplexArray: ...

    def linearize(self, h_c: npt.ArrayLike) -> ComplexArray: ...

    def matched_filter_stats(
        self, h_c: npt.ArrayLike, y_c: npt.ArrayLike
    ) -> tuple[ComplexArray, ComplexArray]: ...


@dataclass(frozen=True)
class CdaScheme:
    code: CodeSpec
    weights: WeightMatrixSet

    @property
    def k(self) -> int:
        return self.code.k

    @property
    def n_t(self) -> int:
        return self.code.n

    @property
    def time_slots(self) -> int:
        return self.code.n

    def encode(self, d: npt.ArrayLike) -> ComplexArray:
        return encode(self.code, d)

    def linearize(self, h_c: npt.ArrayLike) -> ComplexArray:
        return linearize(self.code, h_c, self.weights)

    def matched_filter_stats(
        self, h_c: npt.ArrayLike, y_c: npt.ArrayLike
    ) -> tuple[ComplexArray, ComplexArray]:
        return structured_stats(self.code, self.weights, h_c, y_c)


@dataclass(frozen=True)
class VBlastScheme:
    """Spatial multiplexing: one independent symbol per antenna, one channel use."""

    antennas: int

    @property
    def k(self) -> int:
        return self.antennas

    @property
    def n_t(self) -> int:
        return self.antennas

    @property
    def time_slots(self) -> int:
        return 1

    def encode(self, d: npt.ArrayLike) -> ComplexArray:
        x = np.asarray(d, dtype=np.complex128).reshape(-1)
        if x.shape[0] != self.antennas:
            raise DimensionMismatchError(
                f"Symbol vector has length {x.shape[0]}, expected {self.antennas}"
            )
        return x.reshape(self.antennas, 1)

    def linearize(self, h_c: npt.ArrayLike) -> ComplexArray:
        h = np.atleast_2d(np.asarray(h_c, dtype=np.complex128))
        if h.shape[1] != self.antennas:
            raise DimensionMismatchError(
                f"Channel has {h.shape[1]} columns, expected {self.antennas}"
            )
        return h

    def matched_filter_stats(
        self, h_c: npt.ArrayLike, y_c: npt.ArrayLike
    ) -> tuple[ComplexArray, ComplexArray]:
        h = self.linearize(h_c)
        y = vec(np.asarray(y_c))
        return h.conj().T @ y, h.conj().T @ h


@lru_cache(maxsize=32)
def build_scheme(family: CodeFamily, n: int) -> TransmitScheme:
    if family is CodeFamily.VBLAST:
        return VBlastScheme(antennas=n)
    variant = CodeVariant.ILL if family is CodeFamily.ILL else CodeVariant.FD_ILL
    code, weights = build_code(n, variant)
    return CdaScheme(code=code, weights=weights)
