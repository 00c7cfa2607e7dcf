# app/services/bp_detector.py
"""Belief propagation on the fully connected pairwise MRF of a BPSK linear system.

State axis convention for every (.., 2) table: index 0 is x = +1, index 1 is x = -1.
All potentials, messages and beliefs are carried as logarithms.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
import numpy.typing as npt

from app.core.config import settings
from app.core.errors import DimensionMismatchError, InvalidModelError
from app.core.logging import get_logger
from app.services.cda_stbc import ComplexArray

logger = get_logger("bp_detector")

FloatArray = npt.NDArray[np.float64]

STATES = np.array([1.0, -1.0])
_LOG_HALF = float(np.log(0.5))
_HERMITIAN_TOL = 1e-10
_SYMMETRY_TOL = 1e-12


class PsiForm(str, Enum):
    # max(Re exp(-x_i r_ij x_j), floor)
    AS_PRINTED = "as-printed"
    # exp(-Re(x_i r_ij x_j))
    REAL_EXPONENT = "real-exponent"


@dataclass(frozen=True)
class MrfModel:
    z: ComplexArray
    r_mat: ComplexArray
    log_phi: FloatArray  # (K, 2)
    log_psi: FloatArray  # (K, K, 2, 2), [i, j, a, b] = log psi_ij(x_i=a, x_j=b)
    prior: FloatArray  # (K, 2)
    psi_form: PsiForm = PsiForm.AS_PRINTED
    clamp_events: int = 0

    @property
    def k(self) -> int:
        return int(self.z.shape[0])

    @property
    def phi(self) -> FloatArray:
        return np.exp(self.log_phi)

    @property
    def psi(self) -> FloatArray:
        return np.exp(self.log_psi)


@dataclass(frozen=True)
class MessageState:
    log_messages: FloatArray  # (K, K, 2), [j, i, :] = log m_{j,i}
    iteration: int = 0
    beliefs: Optional[FloatArray] = None

    @classmethod
    def uniform(cls, k: int) -> "MessageState":
        return cls(log_messages=np.full((k, k, 2), _LOG_HALF))

    @property
    def k(self) -> int:
        return int(self.log_messages.shape[0])

    @property
    def messages(self) -> FloatArray:
        return np.exp(self.log_messages)


@dataclass(frozen=True)
class DetectionResult:
    hard: npt.NDArray[np.int8]
    beliefs: FloatArray
    llr: FloatArray
    iterations: int
    clamp_events: int


def _normalize_log(table: FloatArray) -> FloatArray:
    return table - np.logaddexp(table[..., 0], table[..., 1])[..., None]


def _log_prior(prior: Optional[npt.ArrayLike], k: int) -> tuple[FloatArray, FloatArray]:
    if prior is None:
        p = np.full((k, 2), 0.5)
    else:
        p = np.asarray(prior, dtype=np.float64)
        if p.shape != (k, 2):
            raise DimensionMismatchError(
                f"Prior has shape {p.shape}, expected {(k, 2)}"
            )
        if np.any(p < 0.0) or not np.allclose(p.sum(axis=1), 1.0, rtol=0.0, atol=1e-9):
            raise InvalidModelError("Prior rows must be non-negative and sum to 1")
    with np.errstate(divide="ignore"):
        log_p = np.log(np.clip(p, np.finfo(np.float64).tiny, None))
    return p, log_p


def _edge_log_potentials(
    r_mat: ComplexArray, psi_form: PsiForm, floor: float
) -> tuple[FloatArray, int]:
    k = r_mat.shape[0]
    ab = np.outer(STATES, STATES)[None, None, :, :]
    re = r_mat.real[:, :, None, None]
    exponent = -ab * re
    clamp_events = 0
    if psi_form is PsiForm.REAL_EXPONENT:
        log_psi = np.broadcast_to(exponent, (k, k, 2, 2)).copy()
    else:
        # Re exp(-ab r) = exp(-ab Re r) cos(Im r) for ab = +-1
        cos_im = np.cos(r_mat.imag)[:, :, None, None]
        log_cos = np.full(cos_im.shape, -np.inf)
        np.log(cos_im, out=log_cos, where=cos_im > 0.0)
        raw = exponent + log_cos
        log_floor = float(np.log(floor))
        clamped = raw < log_floor
        clamped[np.arange(k), np.arange(k)] = False
        clamp_events = int(np.count_nonzero(np.triu(clamped.any(axis=(2, 3)), 1)))
        log_psi = np.maximum(raw, log_floor)
    log_psi[np.arange(k), np.arange(k)] = 0.0
    return log_psi, clamp_events


def build_mrf_from_stats(
    hy: npt.ArrayLike,
    hh: npt.ArrayLike,
    sigma2: float,
    prior: Optional[npt.ArrayLike] = None,
    psi_form: PsiForm = PsiForm.AS_PRINTED,
    psi_floor: Optional[float] = None,
) -> MrfModel:
    """MRF from the matched-filter products Hᴴy and HᴴH."""
    hy_v = np.asarray(hy, dtype=np.complex128).reshape(-1)
    hh_m = np.asarray(hh, dtype=np.complex128)
    k = hy_v.shape[0]
    if hh_m.shape != (k, k):
        raise DimensionMismatchError(
            f"Gram matrix has shape {hh_m.shape}, expected {(k, k)}"
        )
    if not np.isfinite(sigma2) or sigma2 <= 0.0:
        raise InvalidModelError(f"Noise variance must be positive, got {sigma2}")

    z = hy_v / sigma2
    r_mat = hh_m / sigma2
    scale = max(1.0, float(np.max(np.abs(r_mat)))) if k else 1.0
    if np.max(np.abs(r_mat - r_mat.conj().T), initial=0.0) > _HERMITIAN_TOL * scale:
        raise InvalidModelError("Channel correlation matrix is not Hermitian")
    r_mat = 0.5 * (r_mat + r_mat.conj().T)

    p, log_p = _log_prior(prior, k)
    log_phi = STATES[None, :] * z.real[:, None] + log_p

    floor = settings.psi_floor if psi_floor is None else psi_floor
    log_psi, clamp_events = _edge_log_potentials(r_mat, PsiForm(psi_form), floor)
    if not np.allclose(
        log_psi, log_psi.transpose(1, 0, 3, 2), rtol=_SYMMETRY_TOL, atol=_SYMMETRY_TOL
    ):
        raise InvalidModelError("Edge potentials are not symmetric under index swap")
    if clamp_events:
        logger.debug("edge potentials clamped", edges=clamp_events, k=k)

    return MrfModel(
        z=z,
        r_mat=r_mat,
        log_phi=log_phi,
        log_psi=log_psi,
        prior=p,
        psi_form=PsiForm(psi_form),
        clamp_events=clamp_events,
    )


def build_mrf(
    y: npt.ArrayLike,
    h: npt.ArrayLike,
    sigma2: float,
    prior: Optional[npt.ArrayLike] = None,
    psi_form: PsiForm = PsiForm.AS_PRINTED,
    psi_floor: Optional[float] = None,
) -> MrfModel:
    y_v = np.asarray(y, dtype=np.complex128).reshape(-1)
    h_m = np.atleast_2d(np.asarray(h, dtype=np.complex128))
    if h_m.shape[0] != y_v.shape[0]:
        raise DimensionMismatchError(
            f"Received vector has length {y_v.shape[0]}, "
            f"channel has {h_m.shape[0]} rows"
        )
    h_herm = h_m.conj().T
    return build_mrf_from_stats(
        h_herm @ y_v, h_herm @ h_m, sigma2, prior, psi_form, psi_floor
    )


def _incoming_sum(log_messages: FloatArray) -> FloatArray:
    """sum over j != i of log m_{j,i}, shape (K, 2)."""
    k = log_messages.shape[0]
    diag = log_messages[np.arange(k), np.arange(k)]
    return log_messages.sum(axis=0) - diag


def _check_state(model: MrfModel, state: MessageState) -> None:
    if state.log_messages.shape != (model.k, model.k, 2):
        raise DimensionMismatchError(
            f"Message table {state.log_messages.shape} "
            f"does not match a {model.k}-node model"
        )


def iterate(model: MrfModel, state: MessageState, damping: float = 0.0) -> MessageState:
    """One synchronous flooding round computed from the previous-round snapshot.

    ``damping`` blends old and new messages in the probability domain:
    m <- damping * m_old + (1 - damping) * m_new.
    """
    _check_state(model, state)
    if not 0.0 <= damping <= 1.0:
        raise InvalidModelError(f"Damping must lie in [0, 1], got {damping}")
    k = model.k
    old = state.log_messages
    if damping == 1.0:
        return MessageState(log_messages=old.copy(), iteration=state.iteration + 1)

    total = model.log_phi + _incoming_sum(old)  # (K, 2) over x_j
    cavity = total[:, None, :] - old.transpose(1, 0, 2)  # [j, i, x_j]
    scores = cavity[:, :, :, None] + model.log_psi  # [j, i, x_j, x_i]
    new = _normalize_log(np.logaddexp(scores[:, :, 0, :], scores[:, :, 1, :]))
    if damping > 0.0:
        new = _normalize_log(
            np.logaddexp(np.log(damping) + old, np.log1p(-damping) + new)
        )
    new[np.arange(k), np.arange(k)] = _LOG_HALF
    return MessageState(log_messages=new, iteration=state.iteration + 1)


def log_beliefs(model: MrfModel, state: MessageState) -> FloatArray:
    _check_state(model, state)
    return _normalize_log(model.log_phi + _incoming_sum(state.log_messages))


def beliefs(model: MrfModel, state: MessageState) -> FloatArray:
    """b_i(x_i) proportional to phi_i(x_i) times all incoming messages."""
    return np.exp(log_beliefs(model, state))


def detect(model: MrfModel, iters: int = 5, damping: float = 0.0) -> DetectionResult:
    """Run ``iters`` rounds from uniform messages, then decide once on the beliefs."""
    if iters < 1:
        raise InvalidModelError(f"Need at least one BP iteration, got {iters}")
    state = MessageState.uniform(model.k)
    for _ in range(iters):
        state = iterate(model, state, damping)
    log_b = log_beliefs(model, state)
    llr = log_b[:, 0] - log_b[:, 1]
    hard = np.where(llr >= 0.0, 1, -1).astype(np.int8)
    return DetectionResult(
        hard=hard,
        beliefs=np.exp(log_b),
        llr=llr,
        iterations=state.iteration,
        clamp_events=model.clamp_events,
    )
