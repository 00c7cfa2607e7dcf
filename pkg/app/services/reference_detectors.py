# app/services/reference_detectors.py
"""Exact and baseline detectors for BPSK linear systems y = Hx + n.

Exhaustive searches order candidates lexicographically with +1 before -1,
x_0 being the most significant coordinate; ties go to the earliest candidate.
"""
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
import numpy.typing as npt
import scipy.linalg
from scipy.special import logsumexp

from app.core.config import settings
from app.core.errors import (
    DimensionMismatchError,
    EnumerationLimitError,
    InvalidModelError,
)
from app.core.logging import get_logger
from app.services.bp_detector import FloatArray, MrfModel, PsiForm, build_mrf
from app.services.cda_stbc import ComplexArray

logger = get_logger("reference_detectors")

HardDecision = npt.NDArray[np.int8]

# coordinates covered by one vectorised block of the ML search
_ML_BLOCK_BITS = 12


@dataclass(frozen=True)
class LinearSystem:
    y: ComplexArray
    h: ComplexArray
    sigma2: float

    def __post_init__(self) -> None:
        y = np.asarray(self.y, dtype=np.complex128).reshape(-1)
        h = np.atleast_2d(np.asarray(self.h, dtype=np.complex128))
        if h.shape[0] != y.shape[0]:
            raise DimensionMismatchError(
                f"Received vector has length {y.shape[0]}, "
                f"channel has {h.shape[0]} rows"
            )
        if not np.isfinite(self.sigma2) or self.sigma2 <= 0.0:
            raise InvalidModelError(
                f"Noise variance must be positive, got {self.sigma2}"
            )
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "h", h)

    @property
    def k(self) -> int:
        return int(self.h.shape[1])


def _lex_states(bits: int) -> npt.NDArray[np.int64]:
    """(2^bits, bits) table of state indices, 0 meaning +1, in lexicographic order."""
    idx = np.arange(2**bits, dtype=np.int64)
    shifts = np.arange(bits - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] >> shifts[None, :]) & 1


def _to_symbols(states: npt.NDArray[np.int64]) -> HardDecision:
    return (1 - 2 * states).astype(np.int8)


def _sign(values: FloatArray) -> HardDecision:
    return np.where(values >= 0.0, 1, -1).astype(np.int8)


def ml_detect(system: LinearSystem, max_k: Optional[int] = None) -> HardDecision:
    """argmin over x in {+-1}^K of ||y - Hx||².

    The leading coordinates are walked in Gray-code order with an incremental
    residual update; the trailing block is evaluated at once against a table
    of precomputed partial products.
    """
    limit = settings.ml_max_k if max_k is None else max_k
    k = system.k
    if k > limit:
        raise EnumerationLimitError(
            f"ML search over K={k} exceeds the limit of {limit}"
        )
    h, y = system.h, system.y
    low = min(k, _ML_BLOCK_BITS)
    high = k - low

    low_states = _lex_states(low)
    partial = h[:, high:] @ _to_symbols(low_states).T.astype(np.float64)
    x_high = np.ones(high)
    residual = y - h[:, :high] @ x_high

    best_metric = np.inf
    best_index = -1
    for g in range(2**high):
        if g:
            bit = (g & -g).bit_length() - 1
            q = high - 1 - bit
            x_high[q] = -x_high[q]
            residual = residual - 2.0 * x_high[q] * h[:, q]
        metrics = np.sum(np.abs(residual[:, None] - partial) ** 2, axis=0)
        j = int(np.argmin(metrics))
        index = ((g ^ (g >> 1)) << low) | j
        tied = metrics[j] == best_metric and index < best_index
        if metrics[j] < best_metric or tied:
            best_metric = float(metrics[j])
            best_index = index
    return _index_to_symbols(best_index, k)


def _index_to_symbols(index: int, k: int) -> HardDecision:
    shifts = np.arange(k - 1, -1, -1, dtype=np.int64)
    return _to_symbols((np.int64(index) >> shifts) & 1)


def _enumerate_log_joint(
    model: MrfModel, max_k: Optional[int]
) -> tuple[npt.NDArray[np.int64], FloatArray]:
    limit = settings.marginals_max_k if max_k is None else max_k
    k = model.k
    if k > limit:
        raise EnumerationLimitError(
            f"Enumeration over K={k} exceeds the limit of {limit}"
        )
    states = _lex_states(k)
    log_joint = model.log_phi[np.arange(k), states].sum(axis=1)
    iu, ju = np.triu_indices(k, 1)
    if iu.size:
        log_joint = log_joint + model.log_psi[iu, ju, states[:, iu], states[:, ju]].sum(
            axis=1
        )
    return states, log_joint


def exact_marginals(model: MrfModel, max_k: Optional[int] = None) -> FloatArray:
    """Marginals of p(x) ~ prod_{i<j} psi_ij prod_i phi_i over all 2^K states."""
    states, log_joint = _enumerate_log_joint(model, max_k)
    k = model.k
    log_marg = np.empty((k, 2))
    for i in range(k):
        for s in (0, 1):
            log_marg[i, s] = logsumexp(log_joint[states[:, i] == s])
    log_marg -= np.logaddexp(log_marg[:, 0], log_marg[:, 1])[:, None]
    return np.exp(log_marg)


def mrf_map_detect(model: MrfModel, max_k: Optional[int] = None) -> HardDecision:
    """Exhaustive argmax of the potential-product joint."""
    states, log_joint = _enumerate_log_joint(model, max_k)
    return _to_symbols(states[int(np.argmax(log_joint))])


def mf_detect(model: MrfModel) -> HardDecision:
    return _sign(model.z.real)


def mmse_detect(system: LinearSystem) -> HardDecision:
    h_herm = system.h.conj().T
    gram = h_herm @ system.h + system.sigma2 * np.eye(system.k)
    try:
        x = scipy.linalg.solve(gram, h_herm @ system.y, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
        raise InvalidModelError(f"Regularised Gram matrix is singular: {e}") from e
    return _sign(np.real(x))


@dataclass(frozen=True)
class AgreementReport:
    instances: int
    compared: int
    disagreements: int
    skipped_clamped: int

    @property
    def disagreement_rate(self) -> float:
        return self.disagreements / self.compared if self.compared else 0.0


def measure_ml_mrf_agreement(
    systems: Iterable[LinearSystem],
    psi_form: PsiForm = PsiForm.AS_PRINTED,
    max_k: int = 12,
) -> AgreementReport:
    """Compare ML decisions with the MRF joint's argmax on small instances.

    Instances whose edge potentials were clamped are skipped. Disagreements
    are logged and counted, never raised.
    """
    instances = compared = disagreements = skipped = 0
    for system in systems:
        instances += 1
        model = build_mrf(system.y, system.h, system.sigma2, psi_form=psi_form)
        if model.clamp_events:
            skipped += 1
            continue
        ml = ml_detect(system, max_k=max_k)
        mrf = mrf_map_detect(model, max_k=max_k)
        compared += 1
        if not np.array_equal(ml, mrf):
            disagreements += 1
            logger.warning(
                "ML and MRF argmax disagree",
                instance=instances - 1,
                k=system.k,
                positions=int(np.count_nonzero(ml != mrf)),
            )
    return AgreementReport(
        instances=instances,
        compared=compared,
        disagreements=disagreements,
        skipped_clamped=skipped,
    )
