"""Fixed-rate vector quantization with LBG-trained codebooks.

A codebook lives in real N-dimensional space; complex vectors are quantized
by applying the same codebook to the real and imaginary parts separately
(circular symmetry makes their statistics identical). The uniform mid-rise
scalar quantizer used by the per-antenna baselines is expressed as a dim-1
codebook so every scheme shares one encode path.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from ._kernels import assign_nearest


@dataclass(frozen=True)
class TrainingMeta:
    """Provenance of a trained codebook."""

    n_training_samples: int
    final_distortion: float
    iterations: int
    distortion_log: tuple = ()


@dataclass(frozen=True, eq=False)
class Codebook:
    """Set of reconstruction points plus the input normalization they assume.

    `input_scale` multiplies inputs before the nearest-point search and
    divides reconstructions on the way out, so the stored points live in
    normalized space.
    """

    points: np.ndarray  # (size, dim) float64
    dim: int
    size: int
    bits_per_dim: float
    input_scale: float = 1.0
    training_meta: Optional[TrainingMeta] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, order="C")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def encode(self, x: np.ndarray) -> np.ndarray:
        """Codeword indices for the rows of `x` (raw input units)."""
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.dim:
            raise ValueError(f"expected (n, {self.dim}) input, got {x.shape}")
        indices, _ = assign_nearest(x * self.input_scale, self.points)
        return indices

    def decode(self, indices: np.ndarray) -> np.ndarray:
        return self.points[np.asarray(indices)] / self.input_scale


@dataclass(frozen=True)
class QuantizedValue:
    index: int
    reconstruction: np.ndarray


def quantize(cb: Codebook, x: np.ndarray) -> QuantizedValue:
    """Nearest-codeword quantization of one real vector (ties to lowest index)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (cb.dim,):
        raise ValueError(f"expected shape ({cb.dim},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("input vector must be finite")
    idx = int(cb.encode(x[None, :])[0])
    return QuantizedValue(index=idx, reconstruction=cb.points[idx] / cb.input_scale)


def quantize_complex(cb: Codebook, x: np.ndarray) -> np.ndarray:
    """Quantize real and imaginary parts with the same real codebook."""
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (cb.dim,):
        raise ValueError(f"expected shape ({cb.dim},), got {x.shape}")
    re = quantize(cb, x.real).reconstruction
    im = quantize(cb, x.imag).reconstruction
    return re + 1j * im


def quantize_columns(cb: Codebook, y: np.ndarray) -> np.ndarray:
    """Column-wise `quantize_complex` for an (N, T) complex matrix."""
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 2 or y.shape[0] != cb.dim:
        raise ValueError(f"expected ({cb.dim}, T) input, got {y.shape}")
    parts = np.concatenate([y.real.T, y.imag.T], axis=0)  # (2T, N)
    recon = cb.decode(cb.encode(parts))
    t = y.shape[1]
    return recon[:t].T + 1j * recon[t:].T


def column_quantizer(cb: Codebook) -> Callable[[np.ndarray], np.ndarray]:
    """Encode-decode function over pilot-style column matrices."""

    def quantizer(y: np.ndarray) -> np.ndarray:
        return quantize_columns(cb, y)

    return quantizer


def scalar_bank_quantizer(bank: Sequence[Codebook]) -> Callable[[np.ndarray], np.ndarray]:
    """Per-antenna scalar quantization: codebook `bank[n]` handles row n."""
    books = list(bank)
    if any(cb.dim != 1 for cb in books):
        raise ValueError("scalar bank requires dim-1 codebooks")

    def quantizer(y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=np.complex128)
        if y.ndim != 2 or y.shape[0] != len(books):
            raise ValueError(f"expected ({len(books)}, T) input, got {y.shape}")
        out = np.empty_like(y)
        for n, cb in enumerate(books):
            out[n] = quantize_columns(cb, y[n : n + 1])[0]
        return out

    return quantizer


def passthrough_quantizer(y: np.ndarray) -> np.ndarray:
    """Infinite-resolution hook: used by the unquantized reference pipeline."""
    return np.asarray(y)


def lbg_train(
    samples: np.ndarray,
    target_size: int,
    split_epsilon: float = 0.01,
    rel_tol: float = 1e-6,
    max_iters: int = 100,
    input_scale: float = 1.0,
) -> Codebook:
    """Train a codebook by LBG binary splitting plus Lloyd iterations.

    Starting from the global centroid, the codebook is doubled by perturbing
    every point with +/- split_epsilon times the per-dimension sample spread,
    then refined by alternating nearest-neighbor partition and centroid
    updates until the relative distortion improvement drops below `rel_tol`.
    After the tolerance is met the partition is polished to an exact Lloyd
    fixed point (bounded by `max_iters` steps per phase) so the returned
    points satisfy the centroid and nearest-neighbor conditions exactly.
    Cells that empty out are re-seeded by splitting the cell with the largest
    distortion contribution; the whole procedure is deterministic in the
    training data.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] == 0:
        raise ValueError("samples must be a non-empty (n, dim) array")
    if not np.all(np.isfinite(x)):
        raise ValueError("training samples must be finite")
    n, dim = x.shape
    size = int(target_size)
    if size < 1 or (size & (size - 1)) != 0:
        raise ValueError(f"target_size must be a power of two, got {target_size}")
    if size > n:
        raise ValueError(f"target_size {size} exceeds sample count {n}")
    if input_scale <= 0:
        raise ValueError("input_scale must be positive")

    x = x * input_scale
    spread = x.std(axis=0)
    floor = max(float(np.sqrt(np.mean(x * x))), 1e-12)
    spread = np.where(spread > 0, spread, floor)
    perturb = split_epsilon * spread

    cb = x.mean(axis=0, keepdims=True)
    log: list[float] = []
    iters = 0
    while True:
        cb, iters = _lloyd(x, cb, rel_tol, max_iters, perturb, log, iters)
        if cb.shape[0] >= size:
            break
        cb = np.concatenate([cb + perturb, cb - perturb], axis=0)
    # polish the final phase to an exact partition fixed point
    cb, iters = _lloyd(x, cb, 0.0, max_iters, perturb, log, iters)

    meta = TrainingMeta(
        n_training_samples=n,
        final_distortion=log[-1] / (input_scale * input_scale),
        iterations=iters,
        distortion_log=tuple(log),
    )
    return Codebook(
        points=cb,
        dim=dim,
        size=size,
        bits_per_dim=math.log2(size) / dim,
        input_scale=input_scale,
        training_meta=meta,
    )


def _lloyd(x, cb, rel_tol, max_iters, perturb, log, iters):
    """Alternate partition and centroid update; log distortion per iteration.

    Stops when the partition repeats (exact fixed point: points equal their
    cell means bit-for-bit) or when the relative distortion improvement falls
    below `rel_tol`, whichever comes first, capped at `max_iters` steps.
    """
    assign, d2 = assign_nearest(x, cb)
    prev = float(d2.mean())
    if not log:
        log.append(prev)
    for _ in range(max_iters):
        cb = _centroid_update(x, assign, cb, d2, perturb)
        new_assign, d2 = assign_nearest(x, cb)
        dist = float(d2.mean())
        log.append(dist)
        iters += 1
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        improvement = (prev - dist) / max(prev, np.finfo(float).tiny)
        prev = dist
        if rel_tol > 0.0 and improvement < rel_tol:
            break
    return cb, iters


def _centroid_update(x, assign, cb, d2, perturb):
    """Means of the current cells; empty cells split the worst cell."""
    size, dim = cb.shape
    counts = np.bincount(assign, minlength=size).astype(float)
    sums = np.zeros((size, dim))
    for k in range(dim):
        sums[:, k] = np.bincount(assign, weights=x[:, k], minlength=size)
    new_cb = cb.copy()
    occupied = counts > 0
    new_cb[occupied] = sums[occupied] / counts[occupied, None]

    empties = np.flatnonzero(~occupied)
    if empties.size:
        cell_cost = np.bincount(assign, weights=d2, minlength=size)
        for e in empties:
            donor = int(np.argmax(cell_cost))
            new_cb[e] = new_cb[donor] + perturb
            new_cb[donor] = new_cb[donor] - perturb
            cell_cost[donor] = cell_cost[donor] / 2.0
    return new_cb


def uniform_scalar_codebook(bits: int, input_std: float, loading_factor: float) -> Codebook:
    """Uniform mid-rise scalar quantizer as a dim-1 codebook.

    Step size is 2*loading_factor*input_std / 2^bits; levels sit at
    +/-(i + 1/2) steps, so inputs beyond +/-loading_factor*input_std clip to
    the extreme level.
    """
    if bits < 1:
        raise ValueError("bits must be >= 1")
    if input_std <= 0:
        raise ValueError("input_std must be positive")
    n_levels = 2**int(bits)
    step = 2.0 * loading_factor * input_std / n_levels
    half = np.arange(n_levels // 2) + 0.5
    levels = np.concatenate([-half[::-1], half]) * step
    return Codebook(
        points=levels[:, None],
        dim=1,
        size=n_levels,
        bits_per_dim=float(bits),
        input_scale=1.0,
        training_meta=None,
    )


# Step sizes of the MSE-optimal uniform quantizer for a unit Gaussian
# (Max 1960), indexed by bits; beyond the table the 3.5-sigma load is used.
_OPT_UNIFORM_STEP = {1: 1.596, 2: 0.9957, 3: 0.5860, 4: 0.3352, 5: 0.1881, 6: 0.1041}


def gaussian_loading_factor(bits: int) -> float:
    """Loading factor giving the MSE-optimal uniform quantizer for Gaussian input."""
    step = _OPT_UNIFORM_STEP.get(int(bits))
    if step is None:
        return 3.5
    return step * 2 ** int(bits) / 2.0


def save_codebook(cb: Codebook, path) -> None:
    """Write a codebook as a self-describing JSON record (lossless floats)."""
    meta = None
    if cb.training_meta is not None:
        meta = {
            "n_training_samples": cb.training_meta.n_training_samples,
            "final_distortion": cb.training_meta.final_distortion,
            "iterations": cb.training_meta.iterations,
            "distortion_log": list(cb.training_meta.distortion_log),
        }
    record = {
        "format": "cfcsi-codebook-v1",
        "dim": cb.dim,
        "size": cb.size,
        "bits_per_dim": cb.bits_per_dim,
        "input_scale": cb.input_scale,
        "points": cb.points.tolist(),
        "training_meta": meta,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record, fh)


def load_codebook(path) -> Codebook:
    with open(path, encoding="utf-8") as fh:
        record = json.load(fh)
    if record.get("format") != "cfcsi-codebook-v1":
        raise ValueError(f"unrecognized codebook file format in {path}")
    meta = record["training_meta"]
    training_meta = None
    if meta is not None:
        training_meta = TrainingMeta(
            n_training_samples=meta["n_training_samples"],
            final_distortion=meta["final_distortion"],
            iterations=meta["iterations"],
            distortion_log=tuple(meta["distortion_log"]),
        )
    return Codebook(
        points=np.array(record["points"], dtype=np.float64),
        dim=record["dim"],
        size=record["size"],
        bits_per_dim=record["bits_per_dim"],
        input_scale=record["input_scale"],
        training_meta=training_meta,
    )
