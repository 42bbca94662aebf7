"""Linearization of an arbitrary quantizer from paired input/output samples.

Any quantizer acting on a (near-)Gaussian input can be written as
x_q = F x + d with d uncorrelated with x. F is the regression of the output
on the input, estimated from sample covariances; C_dd is the residual
covariance. Both are computed numerically because no closed form exists for
trained vector quantizers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import NumericalError

_REG_SCALE = 1e-12


@dataclass(frozen=True, eq=False)
class BussgangModel:
    """Linear gain and distortion covariance of a quantizer."""

    gain: np.ndarray  # (N, N) complex
    distortion_cov: np.ndarray  # (N, N) Hermitian PSD
    n_samples: int


def identity_bussgang(n: int) -> BussgangModel:
    """Degenerate model of a transparent (infinite-resolution) quantizer."""
    return BussgangModel(gain=np.eye(n, dtype=complex), distortion_cov=np.zeros((n, n), dtype=complex), n_samples=0)


def sample_covariance(samples_a, samples_b) -> np.ndarray:
    """Cross covariance (1/N_t) * sum_n a[n] b[n]^H from rows-as-samples arrays.

    Passing the same object twice yields the auto-covariance, hermitized so it
    is exactly equal to its conjugate transpose.
    """
    auto = samples_a is samples_b
    a = np.asarray(samples_a, dtype=np.complex128)
    b = a if auto else np.asarray(samples_b, dtype=np.complex128)
    if a.ndim == 1:
        a = a[:, None]
    if b.ndim == 1:
        b = b[:, None]
    if a.shape != b.shape or a.shape[0] == 0:
        raise ValueError(f"need equal, non-empty sample sets, got {a.shape} vs {b.shape}")
    out = a.T @ b.conj() / a.shape[0]
    if auto:
        out = 0.5 * (out + out.conj().T)
    return out


def estimate_bussgang(
    inputs,
    quantizer: Callable[[np.ndarray], np.ndarray],
    diagonal: bool = False,
) -> BussgangModel:
    """Estimate (F, C_dd) for `quantizer` from its behaviour on `inputs`.

    `inputs` holds one complex N-vector per row; `quantizer` maps an (N, T)
    column matrix to its reconstruction. With `diagonal=True` each antenna is
    regressed independently (the per-antenna scalar baseline), yielding
    diagonal F and C_dd.
    """
    x = np.asarray(inputs, dtype=np.complex128)
    if x.ndim == 1:
        x = x[:, None]
    if x.shape[0] == 0:
        raise ValueError("inputs must be non-empty")
    xq = np.asarray(quantizer(x.T)).T
    if xq.shape != x.shape:
        raise ValueError(f"quantizer changed the sample shape: {x.shape} -> {xq.shape}")

    if diagonal:
        var = np.mean(np.abs(x) ** 2, axis=0)
        var = np.maximum(var, _REG_SCALE * max(var.max(), 1.0))
        cross = np.mean(xq * x.conj(), axis=0)
        f = cross / var
        resid = np.mean(np.abs(xq) ** 2, axis=0) - np.abs(cross) ** 2 / var
        resid = np.clip(resid.real, 0.0, None)
        return BussgangModel(gain=np.diag(f), distortion_cov=np.diag(resid).astype(complex), n_samples=x.shape[0])

    c_xx = sample_covariance(x, x)
    c_qx = sample_covariance(xq, x)
    c_qq = sample_covariance(xq, xq)
    f = _solve_right(c_qx, c_xx)
    c_dd = c_qq - f @ c_qx.conj().T
    c_dd = _clamp_psd(c_dd)
    return BussgangModel(gain=f, distortion_cov=c_dd, n_samples=x.shape[0])


def _solve_right(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a @ inv(b) for Hermitian b, regularized once on singularity."""
    herm = 0.5 * (b + b.conj().T)
    for attempt in range(2):
        try:
            out = np.linalg.solve(herm, a.conj().T).conj().T
        except np.linalg.LinAlgError:
            out = None
        if out is not None and np.all(np.isfinite(out)):
            return out
        if attempt == 0:
            herm = herm + (_REG_SCALE * np.trace(herm).real / herm.shape[0]) * np.eye(herm.shape[0])
    raise NumericalError("input covariance is singular beyond regularization")


def _clamp_psd(m: np.ndarray) -> np.ndarray:
    """Project a Hermitian matrix onto the PSD cone (clamp eigenvalues at 0)."""
    herm = 0.5 * (m + m.conj().T)
    vals, vecs = np.linalg.eigh(herm)
    vals = np.clip(vals, 0.0, None)
    return (vecs * vals[None, :]) @ vecs.conj().T
