"""Network geometry and large-scale fading.

APs and users are dropped uniformly on a square that wraps around
(torus metric) to avoid edge effects. Link gains follow a three-slope
path-loss model with log-normal shadowing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NetworkLayout:
    area_side_km: float
    ap_positions: np.ndarray  # (L, 2) km
    ue_positions: np.ndarray  # (K, 2) km
    wrap_around: bool = True

    def __post_init__(self):
        for name in ("ap_positions", "ue_positions"):
            pos = np.asarray(getattr(self, name), dtype=np.float64)
            if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 1:
                raise ValueError(f"{name} must be a non-empty (n, 2) array")
            if np.any(pos < 0) or np.any(pos >= self.area_side_km):
                raise ValueError(f"{name} must lie in [0, side)^2")
            object.__setattr__(self, name, pos)

    @property
    def n_aps(self) -> int:
        return self.ap_positions.shape[0]

    @property
    def n_users(self) -> int:
        return self.ue_positions.shape[0]


@dataclass(frozen=True)
class PathLossParams:
    """Three-slope model parameters; the constant term is derived on build."""

    d0_km: float = 0.01
    d1_km: float = 0.05
    carrier_freq_mhz: float = 1900.0
    h_ap_m: float = 15.0
    h_ue_m: float = 1.65
    L_const_db: float = 0.0

    def __post_init__(self):
        if not 0 < self.d0_km < self.d1_km:
            raise ValueError("need 0 < d0_km < d1_km")
        object.__setattr__(
            self,
            "L_const_db",
            path_loss_constant(self.carrier_freq_mhz, self.h_ap_m, self.h_ue_m),
        )


@dataclass(frozen=True)
class LargeScaleFading:
    beta: np.ndarray  # (L, K) linear power gains
    pl_db: np.ndarray
    shadow_db: np.ndarray
    sigma_sh_db: float


def place_uniform(count: int, area_side_km: float, rng: np.random.Generator) -> np.ndarray:
    """Drop `count` points i.i.d. uniform on [0, side)^2."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if area_side_km <= 0:
        raise ValueError("area_side_km must be positive")
    return rng.uniform(0.0, area_side_km, size=(count, 2))


def wrap_distance(p, q, area_side_km: float) -> float:
    """Distance from p to the nearest of the 9 wrap-around copies of q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    best = math.inf
    for ox in (-area_side_km, 0.0, area_side_km):
        for oy in (-area_side_km, 0.0, area_side_km):
            d = math.hypot(p[0] - q[0] - ox, p[1] - q[1] - oy)
            best = min(best, d)
    return best


def pairwise_wrap_distances(a: np.ndarray, b: np.ndarray, area_side_km: float) -> np.ndarray:
    """All torus distances between point sets a (n, 2) and b (m, 2).

    The minimum over the 9 copies separates per coordinate, so only the
    per-axis minimum images are needed.
    """
    delta = np.abs(a[:, None, :] - b[None, :, :])
    delta = np.minimum(delta, area_side_km - delta)
    return np.hypot(delta[..., 0], delta[..., 1])


def path_loss_constant(f_mhz: float, h_ap_m: float, h_ue_m: float) -> float:
    """Constant term of the three-slope model (carrier frequency in MHz)."""
    if f_mhz <= 0 or h_ap_m <= 0 or h_ue_m <= 0:
        raise ValueError("frequency and antenna heights must be positive")
    lf = math.log10(f_mhz)
    return (
        46.3
        + 33.9 * lf
        - 13.83 * math.log10(h_ap_m)
        - (1.1 * lf - 0.7) * h_ue_m
        + (1.56 * lf - 0.8)
    )


def path_loss_db(d_km: float, params: PathLossParams) -> float:
    """Three-slope path loss in dB (negative); constant inside d0."""
    L = params.L_const_db
    if d_km > params.d1_km:
        return -L - 35.0 * math.log10(d_km)
    if d_km > params.d0_km:
        return -L - 15.0 * math.log10(params.d1_km) - 20.0 * math.log10(d_km)
    return -L - 15.0 * math.log10(params.d1_km) - 20.0 * math.log10(params.d0_km)


def large_scale_fading(
    layout: NetworkLayout,
    params: PathLossParams,
    sigma_sh_db: float,
    rng: np.random.Generator,
    shadow_inside_d1: bool = True,
) -> LargeScaleFading:
    """Per-link gains beta = 10^((PL + shadowing)/10).

    Shadowing draws are consumed for every link regardless of
    `shadow_inside_d1`, so disabling it for short links does not shift the
    stream seen by the remaining links.
    """
    if sigma_sh_db < 0:
        raise ValueError("sigma_sh_db must be non-negative")
    if layout.wrap_around:
        dist = pairwise_wrap_distances(layout.ap_positions, layout.ue_positions, layout.area_side_km)
    else:
        delta = layout.ap_positions[:, None, :] - layout.ue_positions[None, :, :]
        dist = np.hypot(delta[..., 0], delta[..., 1])
    pl = np.empty_like(dist)
    for l in range(dist.shape[0]):
        for k in range(dist.shape[1]):
            pl[l, k] = path_loss_db(dist[l, k], params)
    shadow = sigma_sh_db * rng.standard_normal(dist.shape)
    if not shadow_inside_d1:
        shadow[dist <= params.d1_km] = 0.0
    beta = 10.0 ** ((pl + shadow) / 10.0)
    return LargeScaleFading(beta=beta, pl_db=pl, shadow_db=shadow, sigma_sh_db=sigma_sh_db)
