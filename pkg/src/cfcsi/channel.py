"""Spatially correlated channel model for a uniform linear array.

Multipath arrives around a nominal azimuth with a random angular deviation;
the resulting antenna correlation is the characteristic-function integral

    [R]_{a,b} = E{ exp(j 2 pi d_H (a - b) sin(angle)) },

evaluated by fixed quadrature rules so results are deterministic. Channel
realizations are synthesized through the eigen-factors of R.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import toeplitz

GH_NODES = 64  # Gauss-Hermite rule for the Gaussian angular distribution
SIMPSON_POINTS = 1025  # composite Simpson for the uniform distribution

_gh_t, _gh_w = np.polynomial.hermite.hermgauss(GH_NODES)
_gh_w = _gh_w / _gh_w.sum()


@dataclass(frozen=True)
class CorrelationSpec:
    nominal_angle_rad: float
    angular_spread_std_rad: float
    antenna_spacing: float = 0.5  # in wavelengths
    n_antennas: int = 1
    angular_distribution: str = "gaussian"

    def __post_init__(self):
        if self.angular_spread_std_rad < 0:
            raise ValueError("angular spread std must be non-negative")
        if self.antenna_spacing <= 0:
            raise ValueError("antenna spacing must be positive")
        if self.n_antennas < 1:
            raise ValueError("need at least one antenna")
        if self.angular_distribution not in ("gaussian", "uniform"):
            raise ValueError(f"unknown angular distribution {self.angular_distribution!r}")


@dataclass(frozen=True, eq=False)
class CovarianceModel:
    """Covariance beta * R of one AP-user link with its eigen-factors."""

    sigma: np.ndarray  # (N, N) Hermitian, includes beta
    corr: np.ndarray  # (N, N) Hermitian, unit diagonal
    eigvecs: np.ndarray  # (N, r)
    eigvals: np.ndarray  # (r,) descending, positive
    rank: int
    beta: float


def correlation_matrix(spec: CorrelationSpec) -> np.ndarray:
    """Antenna correlation matrix of the local scattering model.

    The matrix is Hermitian Toeplitz, so one lag value per antenna offset is
    integrated: Gauss-Hermite (64 nodes) for the Gaussian distribution,
    composite Simpson with 1025 points over the +/- sqrt(3)*std support for
    the uniform one. The zero lag is the integral of the density and is set
    to exactly one.
    """
    n = spec.n_antennas
    lags = np.empty(n, dtype=np.complex128)
    lags[0] = 1.0
    if n > 1:
        m = np.arange(1, n)
        theta = spec.nominal_angle_rad
        sd = spec.angular_spread_std_rad
        if sd == 0.0:
            sin_t = np.array([np.sin(theta)])
            weights = np.array([1.0])
        elif spec.angular_distribution == "gaussian":
            sin_t = np.sin(theta + np.sqrt(2.0) * sd * _gh_t)
            weights = _gh_w
        else:
            half = np.sqrt(3.0) * sd
            grid = np.linspace(theta - half, theta + half, SIMPSON_POINTS)
            w = np.ones(SIMPSON_POINTS)
            w[1:-1:2] = 4.0
            w[2:-1:2] = 2.0
            weights = w / w.sum()
            sin_t = np.sin(grid)
        phases = np.exp(2j * np.pi * spec.antenna_spacing * m[:, None] * sin_t[None, :])
        lags[1:] = phases @ weights
    r = toeplitz(lags, lags.conj())
    return 0.5 * (r + r.conj().T)


def kl_factors(R: np.ndarray, rank_tol: float = 1e-12, herm_tol: float = 1e-8):
    """Eigen-factors (U, lambda, r) of a Hermitian PSD matrix.

    Eigenvalues are clamped at zero; the retained rank counts eigenvalues
    above rank_tol times the largest one.
    """
    R = np.asarray(R, dtype=np.complex128)
    norm = np.linalg.norm(R)
    if np.linalg.norm(R - R.conj().T) > herm_tol * max(norm, 1.0):
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(0.5 * (R + R.conj().T))
    vals = np.clip(vals, 0.0, None)
    order = np.argsort(vals)[::-1]
    vals = vals[order]
    vecs = vecs[:, order]
    rank = int(np.count_nonzero(vals > rank_tol * vals[0])) if vals[0] > 0 else 0
    return vecs[:, :rank], vals[:rank], rank


def covariance_model(corr: np.ndarray, beta: float, rank_tol: float = 1e-12) -> CovarianceModel:
    if beta <= 0:
        raise ValueError("beta must be positive")
    U, lam, r = kl_factors(corr, rank_tol=rank_tol)
    return CovarianceModel(
        sigma=beta * corr,
        corr=np.asarray(corr, dtype=np.complex128),
        eigvecs=U,
        eigvals=lam,
        rank=r,
        beta=float(beta),
    )


def sample_channel(model: CovarianceModel, rng: np.random.Generator) -> np.ndarray:
    """One channel realization sqrt(beta) * U * diag(sqrt(lambda)) * h."""
    return sample_channels(model, rng, 1)[:, 0]


def sample_channels(model: CovarianceModel, rng: np.random.Generator, count: int) -> np.ndarray:
    """`count` i.i.d. realizations as the columns of an (N, count) matrix."""
    r = model.rank
    h = (rng.standard_normal((r, count)) + 1j * rng.standard_normal((r, count))) * np.sqrt(0.5)
    factor = np.sqrt(model.beta) * (model.eigvecs * np.sqrt(model.eigvals)[None, :])
    return factor @ h


def assemble_global(blocks) -> np.ndarray:
    """Stack an L x K grid of per-AP channel vectors into the (M, K) matrix."""
    arr = np.asarray(blocks)
    if arr.dtype == object or arr.ndim != 3:
        raise ValueError("blocks must form a dense (L, K, N) grid")
    L, K, N = arr.shape
    return arr.transpose(0, 2, 1).reshape(L * N, K)
