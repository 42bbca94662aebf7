"""CSI acquisition pipelines.

Estimate-and-quantize (EQ): each AP projects its pilots, applies the LMMSE
gain, scales the estimate by its known link gain and quantizes it for the
fronthaul. Quantize-and-estimate (QE): each AP quantizes the raw pilot
columns; the CPU linearizes the quantizer (Bussgang) and applies an LMMSE
gain built from the linearized model. The per-antenna scalar baselines run
the identical pipelines with diagonal covariances, diagonal Bussgang models
and per-antenna codebooks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .bussgang import BussgangModel
from .errors import NumericalError
from .pilots import PilotBook, ReceivedPilots

VQ_EQ = "VQ_EQ"
VQ_QE = "VQ_QE"
SQ_EQ = "SQ_EQ"
SQ_QE = "SQ_QE"
UNQUANTIZED = "UNQUANTIZED"
SCHEMES = (VQ_EQ, VQ_QE, SQ_EQ, SQ_QE, UNQUANTIZED)

_REG_SCALE = 1e-12

Quantizer = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class EqGain:
    """LMMSE gain of one AP-user link."""

    gamma: np.ndarray  # (N, N)


@dataclass(frozen=True, eq=False)
class QeGain:
    """Per-AP blocks of one user's quantized-pilot LMMSE gain.

    The global gain is block diagonal because the channel covariance, the
    Bussgang gain and the distortion covariance are all block diagonal over
    APs, so only the per-AP blocks are stored and inverted.
    """

    gamma: tuple  # L blocks, each (N, N)
    f_tilde: tuple  # L Bussgang gain blocks
    dist_cov: tuple  # L distortion covariance blocks


@dataclass(frozen=True, eq=False)
class CsiEstimate:
    g_hat: np.ndarray  # (M, K)
    scheme: str


def eq_gain(sigma: np.ndarray, tau_rho: float) -> EqGain:
    """LMMSE gain Sigma (Sigma + I / (tau rho_p))^-1 of the pilot projection."""
    sigma = np.asarray(sigma, dtype=np.complex128)
    omega = sigma + np.eye(sigma.shape[0]) / tau_rho
    gamma = np.linalg.solve(omega, sigma).conj().T
    return EqGain(gamma=gamma)


def estimate_eq(received: ReceivedPilots, pilots: PilotBook, gains: Sequence[EqGain]) -> np.ndarray:
    """Per-user LMMSE estimates at one AP, as the columns of an (N, K) matrix."""
    tau_rho = pilots.tau * received.rho_p
    projections = (received.y @ pilots.sequences) / np.sqrt(tau_rho)
    out = np.empty_like(projections)
    for k, gain in enumerate(gains):
        out[:, k] = gain.gamma @ projections[:, k]
    return out


def eq_quantize(
    estimates: Sequence[np.ndarray],
    quantizers: Sequence[Quantizer],
    beta: np.ndarray,
    scheme: str = VQ_EQ,
) -> CsiEstimate:
    """Quantize per-AP channel estimates for fronthaul transfer.

    Each user column is normalized by sqrt(beta_lk) before quantization and
    rescaled after, so one codebook per AP serves all users.
    """
    blocks = []
    for l, est in enumerate(estimates):
        scale = np.sqrt(beta[l])[None, :]
        blocks.append(quantizers[l](est / scale) * scale)
    return CsiEstimate(g_hat=np.concatenate(blocks, axis=0), scheme=scheme)


def qe_quantize_pilots(received: ReceivedPilots, quantizer: Quantizer) -> np.ndarray:
    """Quantize the received pilot block column by column."""
    return np.asarray(quantizer(received.y))


def qe_gain(
    sigma_blocks: Sequence[np.ndarray],
    bussgang_models: Sequence[BussgangModel],
    tau_rho: float,
) -> QeGain:
    """Per-AP LMMSE gain blocks for estimation from quantized pilots.

    Block l is Sigma F^H (F Sigma F^H + (F F^H + C_dd) / (tau rho_p))^-1;
    a near-singular block is regularized once and reported by AP index if it
    stays singular.
    """
    gammas, f_blocks, c_blocks = [], [], []
    for l, (sigma, model) in enumerate(zip(sigma_blocks, bussgang_models)):
        sigma = np.asarray(sigma, dtype=np.complex128)
        f = np.asarray(model.gain, dtype=np.complex128)
        c_dd = np.asarray(model.distortion_cov, dtype=np.complex128)
        omega = f @ sigma @ f.conj().T + (f @ f.conj().T + c_dd) / tau_rho
        omega = 0.5 * (omega + omega.conj().T)
        cross = sigma @ f.conj().T
        gamma = None
        for attempt in range(2):
            try:
                gamma = np.linalg.solve(omega, cross.conj().T).conj().T
            except np.linalg.LinAlgError:
                gamma = None
            if gamma is not None and np.all(np.isfinite(gamma)):
                break
            if attempt == 0:
                omega = omega + (_REG_SCALE * np.trace(omega).real / omega.shape[0]) * np.eye(omega.shape[0])
        else:
            raise NumericalError(f"AP {l}: quantized-pilot covariance is singular")
        gammas.append(gamma)
        f_blocks.append(f)
        c_blocks.append(c_dd)
    return QeGain(gamma=tuple(gammas), f_tilde=tuple(f_blocks), dist_cov=tuple(c_blocks))


def estimate_qe(
    y_q_all: np.ndarray,
    pilots: PilotBook,
    gains: Sequence[QeGain],
    rho_p: float,
    scheme: str = VQ_QE,
) -> CsiEstimate:
    """CPU-side estimation from the stacked quantized pilots of all APs."""
    y_q_all = np.asarray(y_q_all)
    n_aps = len(gains[0].gamma)
    n = y_q_all.shape[0] // n_aps
    tau_rho = pilots.tau * rho_p
    projections = (y_q_all @ pilots.sequences) / np.sqrt(tau_rho)
    g_hat = np.empty((y_q_all.shape[0], pilots.n_users), dtype=np.complex128)
    for k, gain in enumerate(gains):
        for l in range(n_aps):
            rows = slice(l * n, (l + 1) * n)
            g_hat[rows, k] = gain.gamma[l] @ projections[rows, k]
    return CsiEstimate(g_hat=g_hat, scheme=scheme)


def run_eq_pipeline(
    received_list: Sequence[ReceivedPilots],
    pilots: PilotBook,
    gains_grid: Sequence[Sequence[EqGain]],
    quantizers: Optional[Sequence[Quantizer]],
    beta: np.ndarray,
    scheme: str,
) -> CsiEstimate:
    """Full EQ chain over all APs; `quantizers=None` is the unquantized reference."""
    estimates = [
        estimate_eq(received, pilots, gains_grid[l]) for l, received in enumerate(received_list)
    ]
    if quantizers is None:
        return CsiEstimate(g_hat=np.concatenate(estimates, axis=0), scheme=scheme)
    return eq_quantize(estimates, quantizers, beta, scheme=scheme)


def run_qe_pipeline(
    received_list: Sequence[ReceivedPilots],
    pilots: PilotBook,
    gains: Sequence[QeGain],
    quantizers: Sequence[Quantizer],
    scheme: str,
) -> CsiEstimate:
    """Full QE chain: quantize pilots at each AP, then estimate at the CPU."""
    blocks = [
        qe_quantize_pilots(received, quantizers[l]) for l, received in enumerate(received_list)
    ]
    y_q_all = np.concatenate(blocks, axis=0)
    return estimate_qe(y_q_all, pilots, gains, received_list[0].rho_p, scheme=scheme)


def baseline_sq(
    scheme: str,
    received_list: Sequence[ReceivedPilots],
    pilots: PilotBook,
    sq_quantizers: Sequence[Quantizer],
    eq_gains_grid=None,
    beta=None,
    qe_gains=None,
) -> CsiEstimate:
    """Per-antenna scalar-quantization baselines, sharing the vector pipelines.

    The callers supply gains built from diagonal covariances (and, for SQ-QE,
    per-antenna Bussgang models), which is what reduces the pipelines to
    independent per-antenna processing.
    """
    if scheme == SQ_EQ:
        return run_eq_pipeline(received_list, pilots, eq_gains_grid, sq_quantizers, beta, scheme)
    if scheme == SQ_QE:
        return run_qe_pipeline(received_list, pilots, qe_gains, sq_quantizers, scheme)
    raise ValueError(f"baseline_sq handles SQ_EQ and SQ_QE, got {scheme!r}")
