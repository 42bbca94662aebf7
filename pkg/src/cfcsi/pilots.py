"""Orthonormal pilot books and the uplink pilot phase."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class PilotBook:
    """Unit-norm orthonormal pilot sequences as the columns of a tau x K matrix."""

    sequences: np.ndarray
    tau: int

    @property
    def n_users(self) -> int:
        return self.sequences.shape[1]

    def scaled(self, tau_rho: float) -> np.ndarray:
        """Transmitted pilot matrix sqrt(tau * rho_p) * [phi_1 ... phi_K]."""
        return np.sqrt(tau_rho) * self.sequences


@dataclass(frozen=True, eq=False)
class ReceivedPilots:
    """One AP's received pilot block (N x tau) at normalized SNR rho_p."""

    y: np.ndarray
    rho_p: float


def generate_pilots(
    tau: int, n_users: int, rng: np.random.Generator, construction: str = "gaussian"
) -> PilotBook:
    """Orthonormal pilot book; random Gaussian + Gram-Schmidt by default.

    The "dft" construction takes the first columns of the unitary DFT matrix
    instead (useful for variance-reduction studies).
    """
    if tau < 1 or n_users < 1:
        raise ValueError("tau and n_users must be >= 1")
    if n_users > tau:
        raise ValueError(f"cannot orthogonalize {n_users} pilots of length {tau}")
    if construction == "gaussian":
        a = rng.standard_normal((tau, n_users)) + 1j * rng.standard_normal((tau, n_users))
        seq = _orthonormalize(a)
    elif construction == "dft":
        grid = np.arange(tau)
        seq = np.exp(-2j * np.pi * np.outer(grid, grid[:n_users]) / tau) / np.sqrt(tau)
    else:
        raise ValueError(f"unknown pilot construction {construction!r}")
    return PilotBook(sequences=seq, tau=tau)


def _orthonormalize(a: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt with one re-orthogonalization pass."""
    q = np.array(a, dtype=np.complex128)
    for k in range(q.shape[1]):
        v = q[:, k]
        for _ in range(2):
            for j in range(k):
                v = v - (q[:, j].conj() @ v) * q[:, j]
        norm = np.linalg.norm(v)
        if norm < 1e-12:
            raise ValueError("pilot draw was numerically degenerate")
        q[:, k] = v / norm
    return q


def receive_pilots(
    g_block: np.ndarray,
    pilots: PilotBook,
    rho_p: float,
    noise_enabled: bool = True,
    rng: np.random.Generator | None = None,
) -> ReceivedPilots:
    """One AP's pilot observation sqrt(tau*rho_p) * G_l * Phi^H + W.

    W has i.i.d. unit-variance circularly symmetric entries; disabling it is
    a hook for noise-free oracle tests only.
    """
    g_block = np.asarray(g_block)
    if rho_p <= 0:
        raise ValueError("rho_p must be positive")
    if g_block.ndim != 2 or g_block.shape[1] != pilots.n_users:
        raise ValueError(f"expected (N, {pilots.n_users}) channel block, got {g_block.shape}")
    tau_rho = pilots.tau * rho_p
    y = np.sqrt(tau_rho) * (g_block @ pilots.sequences.conj().T)
    if noise_enabled:
        if rng is None:
            raise ValueError("rng is required when noise is enabled")
        shape = (g_block.shape[0], pilots.tau)
        y = y + (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) * np.sqrt(0.5)
    return ReceivedPilots(y=y, rho_p=rho_p)


def project_pilot(y: np.ndarray, phi_k: np.ndarray, tau_rho: float) -> np.ndarray:
    """De-spread one user's pilot: (1/sqrt(tau*rho_p)) * Y * phi_k."""
    return (np.asarray(y) @ np.asarray(phi_k)) / np.sqrt(tau_rho)
