"""Experiment orchestration: config, Monte Carlo loops, sweeps, CSV output.

The outer loop draws network realizations (placement, shadowing, arrival
angles); for each one the codebooks are trained, the quantizers linearized
and the LMMSE gains precomputed, after which the inner trials draw only
small-scale fading and noise. Every enabled scheme consumes the exact same
realizations within a trial, so scheme comparisons are paired.
"""

from __future__ import annotations

import hashlib
import io
import json
import time
from dataclasses import asdict, dataclass, replace
from typing import Callable, Optional, Sequence

import numpy as np

from . import bussgang as bg
from . import channel, estimation, pilots, topology
from .errors import ConfigError
from .quantizer import (
    Codebook,
    column_quantizer,
    gaussian_loading_factor,
    lbg_train,
    scalar_bank_quantizer,
    uniform_scalar_codebook,
)
from .rng import derive_seed, substream

BOLTZMANN = 1.381e-23

CSV_HEADER = (
    "axis,axis_value,scheme,mse_mean,mse_stderr,trials,"
    "large_scale_realizations,bits_per_dim,n_antennas,seed,config_digest"
)

SWEEP_AXES = ("tx_power", "sigma_delta", "antennas_per_ap")


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one simulation point (defaults follow the study setup)."""

    m_total: int = 120  # total antennas across all APs
    n_antennas: int = 4  # antennas per AP; L = m_total / n_antennas
    k_users: int = 20
    tau: int = 20  # pilot length (K <= tau)
    bits_per_dim: float = 2.0  # fronthaul bits per real dimension
    sigma_delta_deg: float = 10.0  # angular spread std
    angular_distribution: str = "gaussian"
    tx_power_dbw: float = -20.0
    power_unit: str = "dBW"
    bandwidth_hz: float = 20e6
    noise_figure_db: float = 9.0
    noise_temp_k: float = 290.0
    sigma_sh_db: float = 8.0
    shadow_inside_d1: bool = True
    area_side_km: float = 1.0
    d0_km: float = 0.01
    d1_km: float = 0.05
    carrier_freq_mhz: float = 1900.0
    h_ap_m: float = 15.0
    h_ue_m: float = 1.65
    antenna_spacing: float = 0.5  # wavelengths
    pilot_construction: str = "gaussian"
    n_training: int = 100  # training fading realizations per network draw
    bussgang_nt: Optional[int] = None  # pilot columns for linearization; None = reuse training
    trials: int = 20
    large_scale_realizations: int = 50
    master_seed: int = 1
    schemes: tuple = estimation.SCHEMES

    @property
    def n_aps(self) -> int:
        return self.m_total // self.n_antennas

    @property
    def tx_power_dbw_normalized(self) -> float:
        return self.tx_power_dbw - 30.0 if self.power_unit == "dBm" else self.tx_power_dbw

    def validate(self) -> None:
        errs = []
        if self.m_total < 1 or self.n_antennas < 1:
            errs.append("m_total and n_antennas must be >= 1")
        elif self.m_total % self.n_antennas != 0:
            errs.append(f"m_total={self.m_total} is not a multiple of n_antennas={self.n_antennas}")
        if self.k_users < 1:
            errs.append("k_users must be >= 1")
        if self.k_users > self.tau:
            errs.append(f"k_users={self.k_users} exceeds pilot length tau={self.tau}")
        bits_total = self.bits_per_dim * self.n_antennas
        if bits_total < 1 or abs(bits_total - round(bits_total)) > 1e-9:
            errs.append(f"bits_per_dim*n_antennas={bits_total} must be a positive integer")
        if any(s in (estimation.SQ_EQ, estimation.SQ_QE) for s in self.schemes):
            if abs(self.bits_per_dim - round(self.bits_per_dim)) > 1e-9 or self.bits_per_dim < 1:
                errs.append("scalar-quantization schemes need integer bits_per_dim >= 1")
        if self.angular_distribution not in ("gaussian", "uniform"):
            errs.append(f"unknown angular_distribution {self.angular_distribution!r}")
        if self.power_unit not in ("dBW", "dBm"):
            errs.append(f"power_unit must be 'dBW' or 'dBm', got {self.power_unit!r}")
        if self.sigma_delta_deg < 0:
            errs.append("sigma_delta_deg must be non-negative")
        if self.sigma_sh_db < 0:
            errs.append("sigma_sh_db must be non-negative")
        for name in ("bandwidth_hz", "noise_temp_k", "area_side_km", "carrier_freq_mhz", "h_ap_m", "h_ue_m", "antenna_spacing"):
            if getattr(self, name) <= 0:
                errs.append(f"{name} must be positive")
        if not 0 < self.d0_km < self.d1_km:
            errs.append("need 0 < d0_km < d1_km")
        if self.pilot_construction not in ("gaussian", "dft"):
            errs.append(f"unknown pilot_construction {self.pilot_construction!r}")
        if self.n_training < 1:
            errs.append("n_training must be >= 1")
        if self.bussgang_nt is not None and self.bussgang_nt < 1:
            errs.append("bussgang_nt must be >= 1 when set")
        if self.trials < 1 or self.large_scale_realizations < 1:
            errs.append("trials and large_scale_realizations must be >= 1")
        if self.master_seed < 0:
            errs.append("master_seed must be non-negative")
        if not self.schemes:
            errs.append("at least one scheme must be enabled")
        unknown = [s for s in self.schemes if s not in estimation.SCHEMES]
        if unknown:
            errs.append(f"unknown schemes {unknown}; valid: {list(estimation.SCHEMES)}")
        if len(set(self.schemes)) != len(self.schemes):
            errs.append("schemes must not repeat")
        if errs:
            raise ConfigError(errs)

    def digest(self) -> str:
        payload = json.dumps(asdict(self), sort_keys=True, default=list)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


def load_config(path) -> ExperimentConfig:
    """Read a JSON config; keys must match the ExperimentConfig fields."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    known = set(ExperimentConfig.__dataclass_fields__)
    unknown = sorted(set(raw) - known)
    if unknown:
        raise ConfigError([f"unknown config key {k!r}" for k in unknown])
    if "schemes" in raw:
        raw["schemes"] = tuple(raw["schemes"])
    cfg = ExperimentConfig(**raw)
    cfg.validate()
    return cfg


def noise_power_w(bandwidth_hz: float, noise_figure_db: float, noise_temp_k: float) -> float:
    """Receiver noise power B * k_B * T0 * noise factor in watts."""
    if bandwidth_hz <= 0 or noise_temp_k <= 0:
        raise ValueError("bandwidth and noise temperature must be positive")
    return bandwidth_hz * BOLTZMANN * noise_temp_k * 10 ** (noise_figure_db / 10)


def rho_p(tx_power_dbw: float, noise_power_watts: float) -> float:
    """Normalized transmit SNR: linear transmit power over noise power."""
    if noise_power_watts <= 0:
        raise ValueError("noise power must be positive")
    return 10 ** (tx_power_dbw / 10) / noise_power_watts


def mse(g: np.ndarray, g_hat: np.ndarray) -> float:
    """Squared Frobenius error normalized by the matrix size."""
    g = np.asarray(g)
    g_hat = np.asarray(g_hat)
    if g.shape != g_hat.shape:
        raise ValueError(f"shape mismatch {g.shape} vs {g_hat.shape}")
    return float(np.linalg.norm(g - g_hat) ** 2) / g.size


@dataclass(frozen=True, eq=False)
class LargeScaleContext:
    """Everything that stays fixed across the trials of one network draw."""

    config: ExperimentConfig
    index: int
    layout: topology.NetworkLayout
    fading: topology.LargeScaleFading
    models: list  # (L, K) grid of CovarianceModel
    pilot_book: pilots.PilotBook
    rho_p: float
    tau_rho: float
    eq_gains: list  # (L, K) grid of EqGain
    sq_eq_gains: list
    vq_eq_quantizers: Optional[list]  # per-AP column quantizers
    sq_eq_quantizers: Optional[list]
    vq_qe_quantizers: Optional[list]
    sq_qe_quantizers: Optional[list]
    qe_gains_vq: Optional[list]  # per-user QeGain
    qe_gains_sq: Optional[list]
    vq_eq_codebooks: Optional[list] = None
    vq_qe_codebooks: Optional[list] = None


@dataclass(frozen=True)
class TrialResult:
    """Per-scheme errors of one Monte Carlo repetition."""

    squared_error: dict  # scheme -> ||G - G_hat||_F^2
    mse: dict  # scheme -> normalized error
    seed: tuple
    config_digest: str


@dataclass(frozen=True)
class SweepRow:
    axis: str
    axis_value: float
    scheme: str
    mse_mean: float
    mse_stderr: float
    trials: int
    large_scale_realizations: int
    bits_per_dim: float
    n_antennas: int
    seed: int
    config_digest: str


@dataclass(frozen=True, eq=False)
class ExperimentResult:
    config: ExperimentConfig
    per_trial_mse: dict  # scheme -> (realizations * trials,) array
    rows: list


@dataclass(frozen=True, eq=False)
class SweepResult:
    axis: str
    values: list
    rows: list


def _draw_channel_blocks(ctx: LargeScaleContext, rng: np.random.Generator) -> np.ndarray:
    cfg = ctx.config
    blocks = np.empty((cfg.n_aps, cfg.k_users, cfg.n_antennas), dtype=np.complex128)
    for l in range(cfg.n_aps):
        for k in range(cfg.k_users):
            blocks[l, k] = channel.sample_channel(ctx.models[l][k], rng)
    return blocks


def _draw_realization(ctx: LargeScaleContext, rng: np.random.Generator):
    """One set of channels and received pilots, shared by every scheme."""
    blocks = _draw_channel_blocks(ctx, rng)
    received = [
        pilots.receive_pilots(blocks[l].T, ctx.pilot_book, ctx.rho_p, rng=rng)
        for l in range(ctx.config.n_aps)
    ]
    return blocks, received


def _needs(config: ExperimentConfig, *schemes: str) -> bool:
    return any(s in config.schemes for s in schemes)


def _diagonal_part(m: np.ndarray) -> np.ndarray:
    return np.diag(np.diag(m))


def build_context(config: ExperimentConfig, index: int) -> LargeScaleContext:
    """Draw one network realization and precompute its trial-invariant state."""
    cfg = config
    seed = cfg.master_seed
    L, K, N = cfg.n_aps, cfg.k_users, cfg.n_antennas

    # users drawn first so the user set (and the AP prefix) is shared across
    # antenna-sweep points that differ only in the AP count
    rng_place = substream(seed, "placement", index)
    ue_positions = topology.place_uniform(K, cfg.area_side_km, rng_place)
    layout = topology.NetworkLayout(
        area_side_km=cfg.area_side_km,
        ap_positions=topology.place_uniform(L, cfg.area_side_km, rng_place),
        ue_positions=ue_positions,
    )
    params = topology.PathLossParams(
        d0_km=cfg.d0_km,
        d1_km=cfg.d1_km,
        carrier_freq_mhz=cfg.carrier_freq_mhz,
        h_ap_m=cfg.h_ap_m,
        h_ue_m=cfg.h_ue_m,
    )
    fading = topology.large_scale_fading(
        layout, params, cfg.sigma_sh_db, substream(seed, "shadowing", index), cfg.shadow_inside_d1
    )

    angles = substream(seed, "angles", index).uniform(-np.pi, np.pi, size=(L, K))
    spread = np.radians(cfg.sigma_delta_deg)
    models = [
        [
            channel.covariance_model(
                channel.correlation_matrix(
                    channel.CorrelationSpec(
                        nominal_angle_rad=angles[l, k],
                        angular_spread_std_rad=spread,
                        antenna_spacing=cfg.antenna_spacing,
                        n_antennas=N,
                        angular_distribution=cfg.angular_distribution,
                    )
                ),
                fading.beta[l, k],
            )
            for k in range(K)
        ]
        for l in range(L)
    ]

    book = pilots.generate_pilots(cfg.tau, K, substream(seed, "pilots", index), cfg.pilot_construction)
    noise_w = noise_power_w(cfg.bandwidth_hz, cfg.noise_figure_db, cfg.noise_temp_k)
    rho = rho_p(cfg.tx_power_dbw_normalized, noise_w)
    tau_rho = cfg.tau * rho

    eq_gains = [[estimation.eq_gain(models[l][k].sigma, tau_rho) for k in range(K)] for l in range(L)]
    sq_eq_gains = [
        [estimation.eq_gain(_diagonal_part(models[l][k].sigma), tau_rho) for k in range(K)]
        for l in range(L)
    ]

    ctx = LargeScaleContext(
        config=cfg,
        index=index,
        layout=layout,
        fading=fading,
        models=models,
        pilot_book=book,
        rho_p=rho,
        tau_rho=tau_rho,
        eq_gains=eq_gains,
        sq_eq_gains=sq_eq_gains,
        vq_eq_quantizers=None,
        sq_eq_quantizers=None,
        vq_qe_quantizers=None,
        sq_qe_quantizers=None,
        qe_gains_vq=None,
        qe_gains_sq=None,
    )
    if not _needs(cfg, estimation.VQ_EQ, estimation.VQ_QE, estimation.SQ_EQ, estimation.SQ_QE):
        return ctx
    return _train_quantizers(ctx)


def _train_quantizers(ctx: LargeScaleContext) -> LargeScaleContext:
    """Collect training realizations, fit all codebooks, linearize the QE path.

    The VQ and SQ codebooks are deterministic functions of one shared set of
    training draws, so enabling or disabling a scheme never changes what the
    others see.
    """
    cfg = ctx.config
    L, K, N = cfg.n_aps, cfg.k_users, cfg.n_antennas
    rng = substream(cfg.master_seed, "training", ctx.index)
    est_samples = [[] for _ in range(L)]
    sq_est_samples = [[] for _ in range(L)]
    col_samples = [[] for _ in range(L)]
    for _ in range(cfg.n_training):
        _, received = _draw_realization(ctx, rng)
        for l in range(L):
            beta_scale = np.sqrt(ctx.fading.beta[l])[None, :]
            if estimation.VQ_EQ in cfg.schemes:
                est = estimation.estimate_eq(received[l], ctx.pilot_book, ctx.eq_gains[l])
                est_samples[l].append((est / beta_scale).T)
            if estimation.SQ_EQ in cfg.schemes:
                # the scalar bank must see the per-antenna pipeline's own estimates
                est = estimation.estimate_eq(received[l], ctx.pilot_book, ctx.sq_eq_gains[l])
                sq_est_samples[l].append((est / beta_scale).T)
            col_samples[l].append(received[l].y.T)

    bits_total = int(round(cfg.bits_per_dim * N))
    vq_size = 2**bits_total
    sq_bits = int(round(cfg.bits_per_dim))

    vq_eq_q = [] if _needs(cfg, estimation.VQ_EQ) else None
    sq_eq_q = [] if _needs(cfg, estimation.SQ_EQ) else None
    vq_qe_q = [] if _needs(cfg, estimation.VQ_QE) else None
    sq_qe_q = [] if _needs(cfg, estimation.SQ_QE) else None
    vq_eq_books = [] if vq_eq_q is not None else None
    vq_qe_books = [] if vq_qe_q is not None else None
    bussgang_vq, bussgang_sq = [], []

    for l in range(L):
        cols = np.concatenate(col_samples[l])
        if vq_eq_q is not None:
            book = _fit_vq(np.concatenate(est_samples[l]), vq_size)
            vq_eq_books.append(book)
            vq_eq_q.append(column_quantizer(book))
        if sq_eq_q is not None:
            sq_eq_q.append(scalar_bank_quantizer(_fit_sq_bank(np.concatenate(sq_est_samples[l]), sq_bits)))
        if vq_qe_q is not None or sq_qe_q is not None:
            bg_cols = _bussgang_columns(ctx, cols, l)
        if vq_qe_q is not None:
            book = _fit_vq(cols, vq_size)
            vq_qe_books.append(book)
            quantizer = column_quantizer(book)
            vq_qe_q.append(quantizer)
            bussgang_vq.append(bg.estimate_bussgang(bg_cols, quantizer))
        if sq_qe_q is not None:
            bank = scalar_bank_quantizer(_fit_sq_bank(cols, sq_bits))
            sq_qe_q.append(bank)
            bussgang_sq.append(bg.estimate_bussgang(bg_cols, bank, diagonal=True))

    qe_gains_vq = None
    if vq_qe_q is not None:
        qe_gains_vq = [
            estimation.qe_gain([ctx.models[l][k].sigma for l in range(L)], bussgang_vq, ctx.tau_rho)
            for k in range(K)
        ]
    qe_gains_sq = None
    if sq_qe_q is not None:
        qe_gains_sq = [
            estimation.qe_gain(
                [_diagonal_part(ctx.models[l][k].sigma) for l in range(L)], bussgang_sq, ctx.tau_rho
            )
            for k in range(K)
        ]
    return replace(
        ctx,
        vq_eq_quantizers=vq_eq_q,
        sq_eq_quantizers=sq_eq_q,
        vq_qe_quantizers=vq_qe_q,
        sq_qe_quantizers=sq_qe_q,
        qe_gains_vq=qe_gains_vq,
        qe_gains_sq=qe_gains_sq,
        vq_eq_codebooks=vq_eq_books,
        vq_qe_codebooks=vq_qe_books,
    )


def _fit_vq(complex_samples: np.ndarray, size: int) -> Codebook:
    reals = np.concatenate([complex_samples.real, complex_samples.imag])
    scale = 1.0 / max(float(reals.std()), 1e-300)
    return lbg_train(reals, size, input_scale=scale)


def _fit_sq_bank(complex_samples: np.ndarray, bits: int) -> list:
    bank = []
    for antenna in range(complex_samples.shape[1]):
        vals = np.concatenate([complex_samples[:, antenna].real, complex_samples[:, antenna].imag])
        std = max(float(vals.std()), 1e-300)
        bank.append(uniform_scalar_codebook(bits, std, gaussian_loading_factor(bits)))
    return bank


def _bussgang_columns(ctx: LargeScaleContext, training_cols: np.ndarray, ap: int) -> np.ndarray:
    """Quantizer-input samples for linearization (training columns by default)."""
    cfg = ctx.config
    if cfg.bussgang_nt is None:
        return training_cols
    if cfg.bussgang_nt <= training_cols.shape[0]:
        return training_cols[: cfg.bussgang_nt]
    rng = substream(cfg.master_seed, "bussgang", ctx.index, ap)
    extra = []
    have = training_cols.shape[0]
    while have < cfg.bussgang_nt:
        blocks = np.empty((cfg.k_users, cfg.n_antennas), dtype=complex)
        for k in range(cfg.k_users):
            blocks[k] = channel.sample_channel(ctx.models[ap][k], rng)
        rec = pilots.receive_pilots(blocks.T, ctx.pilot_book, ctx.rho_p, rng=rng)
        extra.append(rec.y.T)
        have += rec.y.shape[1]
    cols = np.concatenate([training_cols] + extra)
    return cols[: cfg.bussgang_nt]


def run_trial(config: ExperimentConfig, context: LargeScaleContext, trial_index: int) -> TrialResult:
    """One Monte Carlo repetition: every scheme sees the same realizations."""
    rng = substream(config.master_seed, "trial", context.index, trial_index)
    blocks, received = _draw_realization(context, rng)
    g = channel.assemble_global(blocks)

    sq_err: dict = {}
    results: dict = {}
    for scheme in config.schemes:
        if scheme == estimation.UNQUANTIZED:
            out = estimation.run_eq_pipeline(
                received, context.pilot_book, context.eq_gains, None, context.fading.beta, scheme
            )
        elif scheme == estimation.VQ_EQ:
            out = estimation.run_eq_pipeline(
                received,
                context.pilot_book,
                context.eq_gains,
                context.vq_eq_quantizers,
                context.fading.beta,
                scheme,
            )
        elif scheme == estimation.SQ_EQ:
            out = estimation.baseline_sq(
                scheme,
                received,
                context.pilot_book,
                context.sq_eq_quantizers,
                eq_gains_grid=context.sq_eq_gains,
                beta=context.fading.beta,
            )
        elif scheme == estimation.VQ_QE:
            out = estimation.run_qe_pipeline(
                received, context.pilot_book, context.qe_gains_vq, context.vq_qe_quantizers, scheme
            )
        elif scheme == estimation.SQ_QE:
            out = estimation.baseline_sq(
                scheme,
                received,
                context.pilot_book,
                context.sq_qe_quantizers,
                qe_gains=context.qe_gains_sq,
            )
        else:  # pragma: no cover - validated upstream
            raise ValueError(f"unknown scheme {scheme!r}")
        err = float(np.linalg.norm(g - out.g_hat) ** 2)
        sq_err[scheme] = err
        results[scheme] = err / g.size

    return TrialResult(
        squared_error=sq_err,
        mse=results,
        seed=(config.master_seed, context.index, trial_index),
        config_digest=config.digest(),
    )


def run_experiment(
    config: ExperimentConfig,
    axis: str = "none",
    axis_value: float = float("nan"),
    progress: Optional[Callable[[str], None]] = None,
) -> ExperimentResult:
    """All large-scale realizations and trials of one parameter point."""
    config.validate()
    per_trial = {scheme: [] for scheme in config.schemes}
    for i in range(config.large_scale_realizations):
        start = time.perf_counter()
        ctx = build_context(config, i)
        for j in range(config.trials):
            trial = run_trial(config, ctx, j)
            for scheme in config.schemes:
                per_trial[scheme].append(trial.mse[scheme])
        if progress is not None:
            progress(
                f"realization {i + 1}/{config.large_scale_realizations} "
                f"({time.perf_counter() - start:.1f}s)"
            )
    arrays = {scheme: np.asarray(vals) for scheme, vals in per_trial.items()}
    digest = config.digest()
    rows = []
    for scheme in config.schemes:
        vals = arrays[scheme]
        stderr = float(vals.std(ddof=1) / np.sqrt(vals.size)) if vals.size > 1 else 0.0
        rows.append(
            SweepRow(
                axis=axis,
                axis_value=axis_value,
                scheme=scheme,
                mse_mean=float(vals.mean()),
                mse_stderr=stderr,
                trials=config.trials,
                large_scale_realizations=config.large_scale_realizations,
                bits_per_dim=config.bits_per_dim,
                n_antennas=config.n_antennas,
                seed=config.master_seed,
                config_digest=digest,
            )
        )
    return ExperimentResult(config=config, per_trial_mse=arrays, rows=rows)


def apply_axis(config: ExperimentConfig, axis: str, value: float) -> ExperimentConfig:
    """Config for one sweep point, with a sub-seed derived from the value."""
    sub_seed = derive_seed(config.master_seed, "sweep", axis, repr(value))
    if axis == "tx_power":
        cfg = replace(config, tx_power_dbw=float(value), master_seed=sub_seed)
    elif axis == "sigma_delta":
        cfg = replace(config, sigma_delta_deg=float(value), master_seed=sub_seed)
    elif axis == "antennas_per_ap":
        n = int(value)
        if n != value:
            raise ConfigError([f"antennas_per_ap value {value} is not an integer"])
        cfg = replace(config, n_antennas=n, master_seed=sub_seed)
    else:
        raise ConfigError([f"unknown sweep axis {axis!r}; valid: {list(SWEEP_AXES)}"])
    try:
        cfg.validate()
    except ConfigError as exc:
        raise ConfigError([f"axis value {value}: {v}" for v in exc.violations]) from None
    return cfg


def sweep(
    config: ExperimentConfig,
    axis: str,
    values: Sequence[float],
    progress: Optional[Callable[[str], None]] = None,
) -> SweepResult:
    """Run one experiment per axis value (bits/dim stays fixed on the antenna axis)."""
    configs = [apply_axis(config, axis, v) for v in values]
    rows = []
    for value, cfg in zip(values, configs):
        if progress is not None:
            progress(f"{axis} = {value}")
        result = run_experiment(cfg, axis=axis, axis_value=float(value), progress=progress)
        rows.extend(result.rows)
    return SweepResult(axis=axis, values=list(values), rows=rows)


def _fmt(x: float) -> str:
    return format(float(x), ".17e")


def rows_to_csv(rows: Sequence[SweepRow]) -> str:
    """Render result rows with full-precision floats (byte-stable per config+seed)."""
    out = io.StringIO()
    out.write(CSV_HEADER + "\n")
    for r in rows:
        out.write(
            f"{r.axis},{_fmt(r.axis_value)},{r.scheme},{_fmt(r.mse_mean)},{_fmt(r.mse_stderr)},"
            f"{r.trials},{r.large_scale_realizations},{_fmt(r.bits_per_dim)},{r.n_antennas},"
            f"{r.seed},{r.config_digest}\n"
        )
    return out.getvalue()


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    deviation: float
    threshold: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name} {status} deviation={self.deviation:.3e} threshold={self.threshold:.3e}"


def check_one_bit_gain(n_samples: int = 100_000, seed: int = 2024, gain_value: Optional[float] = None) -> CheckResult:
    """Sign-quantizer linear gain against the closed form sqrt(2/pi)."""
    want = np.sqrt(2.0 / np.pi)
    if gain_value is None:
        x = substream(seed, "validate-onebit").standard_normal((n_samples, 1)).astype(complex)
        model = bg.estimate_bussgang(x, lambda y: np.sign(y.real).astype(complex))
        gain_value = float(model.gain[0, 0].real)
    deviation = abs(gain_value - want) / want
    return CheckResult("one_bit_bussgang_gain", deviation < 0.02, deviation, 0.02)


def check_scalar_lmmse(trials: int = 20_000, seed: int = 2024, tau_rho: float = 1.0) -> CheckResult:
    """Monte Carlo scalar LMMSE error against beta - beta^2/(beta + 1/(tau rho))."""
    beta = 1.0
    model = channel.covariance_model(np.eye(1, dtype=complex), beta)
    book = pilots.generate_pilots(1, 1, substream(seed, "validate-pilot"))
    gain = [estimation.eq_gain(model.sigma, tau_rho)]
    rng_ch = substream(seed, "validate-ch")
    rng_n = substream(seed, "validate-noise")
    err = 0.0
    for _ in range(trials):
        g = channel.sample_channel(model, rng_ch)[:, None]
        rec = pilots.receive_pilots(g, book, tau_rho / book.tau, rng=rng_n)
        est = estimation.estimate_eq(rec, book, gain)
        err += abs(est[0, 0] - g[0, 0]) ** 2
    closed = beta - beta**2 / (beta + 1.0 / tau_rho)
    deviation = abs(err / trials - closed) / closed
    return CheckResult("scalar_lmmse_mse", deviation < 0.03, deviation, 0.03)


def check_lbg(seed: int = 2024) -> CheckResult:
    """Monotone training distortion plus the centroid condition."""
    rng = substream(seed, "validate-lbg")
    samples = rng.normal(size=(2000, 2))
    cb = lbg_train(samples, 16)
    log = np.asarray(cb.training_meta.distortion_log)
    worst_rise = float(np.max(np.diff(log) / log[:-1])) if log.size > 1 else 0.0
    enc = cb.encode(samples)
    dev = 0.0
    for i in range(cb.size):
        cell = samples[enc == i] * cb.input_scale
        if cell.size:
            ref = max(np.abs(cb.points[i]).max(), 1e-30)
            dev = max(dev, float(np.abs(cell.mean(axis=0) - cb.points[i]).max() / ref))
    deviation = max(worst_rise, dev)
    return CheckResult("lbg_conditions", worst_rise <= 1e-12 and dev < 1e-9, deviation, 1e-9)


def check_covariance_reconstruction(seed: int = 2024) -> CheckResult:
    """Eigen-factor reconstruction error of a correlation matrix."""
    spec = channel.CorrelationSpec(0.3, np.radians(15), 0.5, 6)
    r = channel.correlation_matrix(spec)
    u, lam, _ = channel.kl_factors(r)
    recon = (u * lam[None, :]) @ u.conj().T
    deviation = float(np.linalg.norm(recon - r) / np.linalg.norm(r))
    return CheckResult("covariance_reconstruction", deviation < 1e-8, deviation, 1e-8)


def validate() -> list:
    """Closed-form oracle checks; returns one CheckResult per check."""
    return [
        check_one_bit_gain(),
        check_scalar_lmmse(),
        check_lbg(),
        check_covariance_reconstruction(),
    ]
