import json

import numpy as np
import pytest

from cfcsi import harness
from cfcsi.errors import ConfigError
from cfcsi.estimation import SCHEMES, UNQUANTIZED, VQ_EQ, run_eq_pipeline
from cfcsi.pilots import receive_pilots
from cfcsi.rng import substream


def _tiny_config(**overrides):
    base = dict(
        m_total=4,
        n_antennas=2,
        k_users=2,
        tau=2,
        bits_per_dim=1,
        trials=3,
        large_scale_realizations=2,
        n_training=20,
        master_seed=11,
    )
    base.update(overrides)
    return harness.ExperimentConfig(**base)


def test_noise_power_frozen_value():
    got = harness.noise_power_w(20e6, 9.0, 290.0)
    want = 20e6 * 1.381e-23 * 290.0 * 10**0.9  # direct evaluation
    assert got == pytest.approx(want, rel=1e-12)
    assert got == pytest.approx(6.36e-13, rel=1e-2)
    assert harness.noise_power_w(20e6, 0.0, 290.0) == pytest.approx(20e6 * 1.381e-23 * 290.0, rel=1e-12)
    assert harness.noise_power_w(40e6, 9.0, 290.0) == pytest.approx(2 * got, rel=1e-12)


def test_rho_p_cases():
    assert harness.rho_p(0.0, 1.0) == pytest.approx(1.0)
    noise = harness.noise_power_w(20e6, 9.0, 290.0)
    assert harness.rho_p(-20.0, noise) == pytest.approx(1.57e10, rel=1e-2)
    assert harness.rho_p(-10.0, noise) == pytest.approx(10 * harness.rho_p(-20.0, noise), rel=1e-12)
    with pytest.raises(ValueError):
        harness.rho_p(0.0, 0.0)


def test_mse_cases():
    g = np.array([[1.0 + 0j]])
    assert harness.mse(g, g) == 0.0
    assert harness.mse(g, np.array([[0.5 + 0j]])) == pytest.approx(0.25)

    rng = substream(1, "mse")
    a = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    b = rng.standard_normal((3, 4)) + 1j * rng.standard_normal((3, 4))
    brute = sum(abs(a[i, j] - b[i, j]) ** 2 for i in range(3) for j in range(4)) / 12
    assert harness.mse(a, b) == pytest.approx(brute, rel=1e-12)
    with pytest.raises(ValueError):
        harness.mse(a, b[:2])


def test_config_validation_collects_all_violations():
    cfg = harness.ExperimentConfig(m_total=7, n_antennas=2, k_users=9, tau=4, bits_per_dim=0.3)
    with pytest.raises(ConfigError) as err:
        cfg.validate()
    text = str(err.value)
    assert "multiple of" in text
    assert "exceeds pilot length" in text
    assert "integer" in text


def test_load_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"m_total": 4, "n_antennas": 2, "k_users": 2, "tau": 2, "frobnicate": 1}))
    with pytest.raises(ConfigError) as err:
        harness.load_config(path)
    assert "frobnicate" in str(err.value)


def test_load_config_round_trip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"m_total": 4, "n_antennas": 2, "k_users": 2, "tau": 2, "schemes": ["UNQUANTIZED"]}))
    cfg = harness.load_config(path)
    assert cfg.schemes == (UNQUANTIZED,)
    assert cfg.n_aps == 2


def test_run_trial_deterministic():
    cfg = _tiny_config()
    ctx = harness.build_context(cfg, 0)
    a = harness.run_trial(cfg, ctx, 1)
    b = harness.run_trial(cfg, ctx, 1)
    assert a.squared_error == b.squared_error
    assert a.mse == b.mse
    assert a.seed == (cfg.master_seed, 0, 1)
    assert a.config_digest == cfg.digest()


def test_unquantized_equals_eq_passthrough():
    cfg = _tiny_config(schemes=(UNQUANTIZED,))
    ctx = harness.build_context(cfg, 0)
    trial = harness.run_trial(cfg, ctx, 0)

    rng = substream(cfg.master_seed, "trial", 0, 0)
    blocks, received = harness._draw_realization(ctx, rng)
    from cfcsi.channel import assemble_global
    from cfcsi.quantizer import passthrough_quantizer

    g = assemble_global(blocks)
    out = run_eq_pipeline(
        received, ctx.pilot_book, ctx.eq_gains, [passthrough_quantizer] * cfg.n_aps, ctx.fading.beta, VQ_EQ
    )
    assert trial.mse[UNQUANTIZED] == pytest.approx(harness.mse(g, out.g_hat), rel=1e-12)


def test_unquantized_lower_bounds_vq_eq_on_average():
    cfg = _tiny_config(schemes=(UNQUANTIZED, VQ_EQ), trials=200, large_scale_realizations=1, n_training=50)
    res = harness.run_experiment(cfg)
    assert res.per_trial_mse[UNQUANTIZED].mean() <= res.per_trial_mse[VQ_EQ].mean()


def test_run_experiment_single_row_per_scheme():
    cfg = _tiny_config(trials=1, large_scale_realizations=1)
    res = harness.run_experiment(cfg)
    assert len(res.rows) == len(SCHEMES)
    for row in res.rows:
        assert row.mse_stderr == 0.0
        assert row.trials == 1


def test_stderr_scales_with_trial_count():
    small = harness.run_experiment(_tiny_config(trials=100, large_scale_realizations=1, schemes=(UNQUANTIZED,)))
    big = harness.run_experiment(_tiny_config(trials=400, large_scale_realizations=1, schemes=(UNQUANTIZED,)))
    ratio = big.rows[0].mse_stderr / small.rows[0].mse_stderr
    assert 0.5 * 0.7 < ratio < 0.5 * 1.3


def test_scheme_removal_leaves_other_schemes_untouched():
    full = harness.run_experiment(_tiny_config())
    reduced = harness.run_experiment(_tiny_config(schemes=("VQ_QE", "SQ_QE", "UNQUANTIZED")))
    for scheme in ("VQ_QE", "SQ_QE", "UNQUANTIZED"):
        np.testing.assert_array_equal(full.per_trial_mse[scheme], reduced.per_trial_mse[scheme])


def test_single_value_sweep_equals_run_experiment():
    cfg = _tiny_config()
    swept = harness.sweep(cfg, "tx_power", [-30.0])
    direct = harness.run_experiment(harness.apply_axis(cfg, "tx_power", -30.0), axis="tx_power", axis_value=-30.0)
    assert harness.rows_to_csv(swept.rows) == harness.rows_to_csv(direct.rows)


def test_sweep_row_count_and_determinism():
    cfg = _tiny_config(trials=2, large_scale_realizations=1)
    res = harness.sweep(cfg, "sigma_delta", [10.0, 40.0])
    assert len(res.rows) == 2 * len(SCHEMES)
    again = harness.sweep(cfg, "sigma_delta", [10.0, 40.0])
    assert harness.rows_to_csv(res.rows) == harness.rows_to_csv(again.rows)


def test_sweep_rejects_invalid_axis_values():
    cfg = _tiny_config()
    with pytest.raises(ConfigError) as err:
        harness.apply_axis(cfg, "antennas_per_ap", 3.0)  # m_total=4 not divisible
    assert "3" in str(err.value)
    with pytest.raises(ConfigError):
        harness.apply_axis(cfg, "carrier", 1.0)


def test_sweep_antenna_axis_keeps_bits_per_dim():
    cfg = _tiny_config(m_total=8, bits_per_dim=1)
    for value in (1.0, 2.0, 4.0):
        point = harness.apply_axis(cfg, "antennas_per_ap", value)
        assert point.bits_per_dim == cfg.bits_per_dim
        assert point.n_antennas == int(value)
        assert point.master_seed != cfg.master_seed  # derived sub-seed


def test_csv_format():
    cfg = _tiny_config(trials=1, large_scale_realizations=1, schemes=(UNQUANTIZED,))
    res = harness.run_experiment(cfg)
    text = harness.rows_to_csv(res.rows)
    lines = text.strip().split("\n")
    assert lines[0] == harness.CSV_HEADER
    fields = lines[1].split(",")
    assert fields[0] == "none" and fields[1] == "nan"
    assert fields[2] == UNQUANTIZED
    float(fields[3])  # full-precision scientific notation parses back
    assert "e" in fields[3]


def test_validate_checks_pass_and_negative_control():
    results = harness.validate()
    assert all(c.passed for c in results)
    names = [c.name for c in results]
    assert names == [
        "one_bit_bussgang_gain",
        "scalar_lmmse_mse",
        "lbg_conditions",
        "covariance_reconstruction",
    ]
    for c in results:
        line = c.line()
        assert line.split() == [c.name, "PASS", f"deviation={c.deviation:.3e}", f"threshold={c.threshold:.3e}"]
    corrupted = harness.check_one_bit_gain(gain_value=0.5)
    assert not corrupted.passed and corrupted.deviation > 0.02


def test_bussgang_nt_override():
    # fewer columns than training supplies: truncation; more: extra draws
    base = _tiny_config(schemes=("VQ_QE",), n_training=10)
    ctx_default = harness.build_context(base, 0)
    n_cols_default = base.n_training * base.tau

    small = _tiny_config(schemes=("VQ_QE",), n_training=10, bussgang_nt=6)
    ctx_small = harness.build_context(small, 0)

    big = _tiny_config(schemes=("VQ_QE",), n_training=10, bussgang_nt=n_cols_default + 7)
    ctx_big = harness.build_context(big, 0)

    # the codebooks themselves are untouched by the override
    for a, b in zip(ctx_default.vq_qe_codebooks, ctx_small.vq_qe_codebooks):
        np.testing.assert_array_equal(a.points, b.points)
    for a, b in zip(ctx_default.vq_qe_codebooks, ctx_big.vq_qe_codebooks):
        np.testing.assert_array_equal(a.points, b.points)

    # the linearization changes with the sample budget, deterministically
    g_def = ctx_default.qe_gains_vq[0].f_tilde[0]
    g_small = ctx_small.qe_gains_vq[0].f_tilde[0]
    g_big = ctx_big.qe_gains_vq[0].f_tilde[0]
    assert not np.array_equal(g_def, g_small)
    assert not np.array_equal(g_def, g_big)
    ctx_big2 = harness.build_context(big, 0)
    np.testing.assert_array_equal(g_big, ctx_big2.qe_gains_vq[0].f_tilde[0])


def test_context_skips_training_when_unquantized_only():
    cfg = _tiny_config(schemes=(UNQUANTIZED,))
    ctx = harness.build_context(cfg, 0)
    assert ctx.vq_eq_quantizers is None
    assert ctx.qe_gains_vq is None


def test_receive_noise_shared_across_schemes():
    # the same pilot noise realization feeds every scheme within a trial
    cfg = _tiny_config()
    ctx = harness.build_context(cfg, 0)
    rng1 = substream(cfg.master_seed, "trial", 0, 5)
    blocks1, received1 = harness._draw_realization(ctx, rng1)
    rng2 = substream(cfg.master_seed, "trial", 0, 5)
    blocks2, received2 = harness._draw_realization(ctx, rng2)
    np.testing.assert_array_equal(blocks1, blocks2)
    for a, b in zip(received1, received2):
        np.testing.assert_array_equal(a.y, b.y)
    assert isinstance(received1[0], type(receive_pilots(blocks1[0].T, ctx.pilot_book, ctx.rho_p, noise_enabled=False)))
