# app/services/cda_stbc.py
"""Full-rate square space-time block codes from cyclic division algebras.

Symbol indexing: the n² data symbols d_{u,v} (0 <= u, v < n) are carried in a
flat vector with ``i = u * n + v``. Entry (r, c) of the code matrix is

    delta^[c > r] * sum_v d_{(r - c) mod n, v} * omega_n^(c v) * t^v

so weight matrix A^(u,v) has its only nonzero entry of column c on row
``(u + c) mod n``.
"""
import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Optional, Sequence, Union

import numpy as np
import numpy.typing as npt

from app.core.errors import DimensionMismatchError, InvalidCodeError
from app.core.logging import get_logger

logger = get_logger("cda_stbc")

ComplexArray = npt.NDArray[np.complex128]
IntArray = npt.NDArray[np.int64]

FD_ILL_DELTA = cmath.exp(1j * math.sqrt(5.0))
FD_ILL_T = cmath.exp(1j)


class CodeVariant(str, Enum):
    ILL = "ILL"
    FD_ILL = "FD-ILL"

    @classmethod
    def parse(cls, raw: Union[str, "CodeVariant"]) -> "CodeVariant":
        if isinstance(raw, CodeVariant):
            return raw
        key = str(raw).strip().upper().replace("_", "-")
        if key in ("FDILL", "FD-ILL"):
            return cls.FD_ILL
        if key == "ILL":
            return cls.ILL
        raise InvalidCodeError(f"Unknown code variant: {raw!r}")


@dataclass(frozen=True)
class CodeSpec:
    n: int
    delta: complex
    t: complex
    omega_n: complex
    variant: CodeVariant

    @property
    def k(self) -> int:
        return self.n * self.n

    def flat_index(self, u: int, v: int) -> int:
        return u * self.n + v

    def grid_index(self, i: int) -> tuple[int, int]:
        return divmod(i, self.n)


@dataclass(frozen=True)
class WeightMatrixSet:
    matrices: ComplexArray  # (k, n, n)
    column_stack: ComplexArray  # (n², k), column i = vec(A^(i))
    # permutation structure: column c of A^(i) is nonzero only on rows[i, c]
    rows: IntArray = field(repr=False)
    phases: ComplexArray = field(repr=False)

    def __len__(self) -> int:
        return int(self.matrices.shape[0])


def vec(matrix: npt.NDArray[np.complexfloating]) -> ComplexArray:
    """Column-major vectorisation."""
    return np.asarray(matrix, dtype=np.complex128).reshape(-1, order="F")


def make_code_spec(
    n: int,
    variant: Union[str, CodeVariant],
    delta: Optional[complex] = None,
    t: Optional[complex] = None,
) -> CodeSpec:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 1:
        raise InvalidCodeError(f"Code size must be a positive integer, got {n!r}")
    variant = CodeVariant.parse(variant)
    if variant is CodeVariant.ILL:
        default_delta, default_t = 1.0 + 0.0j, 1.0 + 0.0j
    else:
        default_delta, default_t = FD_ILL_DELTA, FD_ILL_T
    delta = default_delta if delta is None else complex(delta)
    t = default_t if t is None else complex(t)
    unit = (math.isclose(abs(v), 1.0, abs_tol=1e-12) for v in (delta, t))
    if not all(unit):
        raise InvalidCodeError("delta and t must have unit modulus")
    omega = cmath.exp(2j * math.pi / n)
    return CodeSpec(n=int(n), delta=delta, t=t, omega_n=omega, variant=variant)


def _weight_structure(code: CodeSpec) -> tuple[IntArray, ComplexArray]:
    n = code.n
    u = np.arange(n)[:, None, None]
    v = np.arange(n)[None, :, None]
    c = np.arange(n)[None, None, :]
    rows = (u + c) % n
    powers = np.outer(np.arange(n), np.arange(n))  # c * v
    omega_pow = np.exp(2j * np.pi * (powers % n) / n).T  # (v, c)
    t_pow = np.power(code.t, np.arange(n))
    phases = omega_pow[None, :, :] * t_pow[None, :, None]
    phases = np.where(c > rows, code.delta * phases, phases)
    rows = np.broadcast_to(rows, (n, n, n)).reshape(n * n, n)
    return rows.astype(np.int64), phases.reshape(n * n, n).astype(np.complex128)


@lru_cache(maxsize=64)
def _build_code_cached(
    n: int, variant: CodeVariant, delta: complex, t: complex
) -> tuple[CodeSpec, WeightMatrixSet]:
    code = make_code_spec(n, variant, delta=delta, t=t)
    rows, phases = _weight_structure(code)
    k = code.k
    matrices = np.zeros((k, n, n), dtype=np.complex128)
    cols = np.arange(n)
    for i in range(k):
        matrices[i, rows[i], cols] = phases[i]
    column_stack = matrices.transpose(0, 2, 1).reshape(k, n * n).T.copy()
    for arr in (matrices, column_stack, rows, phases):
        arr.setflags(write=False)
    logger.debug("code built", n=n, variant=variant.value, k=k)
    return code, WeightMatrixSet(
        matrices=matrices, column_stack=column_stack, rows=rows, phases=phases
    )


def build_code(
    n: int,
    variant: Union[str, CodeVariant],
    delta: Optional[complex] = None,
    t: Optional[complex] = None,
) -> tuple[CodeSpec, WeightMatrixSet]:
    """Construct the code and its k = n² weight matrices.

    ``delta`` and ``t`` override the variant's defaults (used to check that an
    FD-ILL code with unit scalars collapses onto the ILL code).
    """
    spec = make_code_spec(n, variant, delta=delta, t=t)
    return _build_code_cached(spec.n, spec.variant, spec.delta, spec.t)


def _check_symbols(
    code: CodeSpec, d: Sequence[complex] | npt.ArrayLike
) -> ComplexArray:
    arr = np.asarray(d, dtype=np.complex128).reshape(-1)
    if arr.shape[0] != code.k:
        raise DimensionMismatchError(
            f"Symbol vector has length {arr.shape[0]}, code expects {code.k}"
        )
    return arr


def encode(code: CodeSpec, d: Sequence[complex] | npt.ArrayLike) -> ComplexArray:
    """Evaluate the code matrix directly from its closed form."""
    n = code.n
    grid = _check_symbols(code, d).reshape(n, n)  # grid[u, v] = d_{u,v}
    omega_pow = np.exp(2j * np.pi * (np.outer(np.arange(n), np.arange(n)) % n) / n)
    t_pow = np.power(code.t, np.arange(n))
    # layer[u, c] = sum_v d_{u,v} omega^(c v) t^v
    layer = (grid * t_pow[None, :]) @ omega_pow.T
    r = np.arange(n)[:, None]
    c = np.arange(n)[None, :]
    x = layer[(r - c) % n, c]
    return np.where(c > r, code.delta * x, x)


def encode_weighted(
    weights: WeightMatrixSet, d: Sequence[complex] | npt.ArrayLike
) -> ComplexArray:
    """Linear-dispersion form: sum_i d_i A^(i)."""
    arr = np.asarray(d, dtype=np.complex128).reshape(-1)
    if arr.shape[0] != len(weights):
        raise DimensionMismatchError(
            f"Symbol vector has length {arr.shape[0]}, code expects {len(weights)}"
        )
    return np.tensordot(arr, weights.matrices, axes=1)


def linearize(
    code: CodeSpec, h_c: npt.ArrayLike, weights: Optional[WeightMatrixSet] = None
) -> ComplexArray:
    """Equivalent V-BLAST matrix: column i is vec(H_c A^(i))."""
    h = np.atleast_2d(np.asarray(h_c, dtype=np.complex128))
    if h.shape[1] != code.n:
        raise DimensionMismatchError(
            f"Channel has {h.shape[1]} columns, code has {code.n} transmit antennas"
        )
    if weights is None:
        _, weights = build_code(code.n, code.variant, code.delta, code.t)
    n_r = h.shape[0]
    # H_c A^(i), column c = H_c[:, rows[i, c]] * phases[i, c]
    blocks = h[:, weights.rows] * weights.phases[None, :, :]  # (n_r, k, n)
    return blocks.transpose(2, 0, 1).reshape(n_r * code.n, code.k)


def structured_stats(
    code: CodeSpec,
    weights: WeightMatrixSet,
    h_c: npt.ArrayLike,
    y_c: npt.ArrayLike,
) -> tuple[ComplexArray, ComplexArray]:
    """H̃ᴴ vec(Y) and H̃ᴴ H̃ from the N_t x N_t products H_cᴴY and H_cᴴH_c.

    Uses the permutation structure of the weight matrices, never forms H̃.
    """
    h = np.atleast_2d(np.asarray(h_c, dtype=np.complex128))
    y = np.atleast_2d(np.asarray(y_c, dtype=np.complex128))
    if h.shape[1] != code.n or y.shape != (h.shape[0], code.n):
        raise DimensionMismatchError(
            f"Channel {h.shape} and received block {y.shape} "
            f"do not fit an n={code.n} code"
        )
    gram = h.conj().T @ h
    gy = h.conj().T @ y
    rows, phases = weights.rows, weights.phases
    cols = np.arange(code.n)[None, :]
    hy = np.sum(phases.conj() * gy[rows, cols], axis=1)

    hh = np.zeros((code.k, code.k), dtype=np.complex128)
    for c in range(code.n):
        r_c = rows[:, c]
        p_c = phases[:, c]
        hh += np.outer(p_c.conj(), p_c) * gram[np.ix_(r_c, r_c)]
    return hy, hh
