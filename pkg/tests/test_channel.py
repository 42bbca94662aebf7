import numpy as np
import pytest
from scipy.integrate import quad

from cfcsi.channel import (
    CorrelationSpec,
    assemble_global,
    correlation_matrix,
    covariance_model,
    kl_factors,
    sample_channel,
    sample_channels,
)
from cfcsi.rng import substream


def _quad_oracle(spec, a, b):
    """Adaptive-quadrature evaluation of the correlation integral."""
    theta, sd = spec.nominal_angle_rad, spec.angular_spread_std_rad
    if spec.angular_distribution == "gaussian":
        lo, hi = theta - 10 * sd, theta + 10 * sd
        def density(t):
            return np.exp(-0.5 * ((t - theta) / sd) ** 2) / (sd * np.sqrt(2 * np.pi))
    else:
        half = np.sqrt(3.0) * sd
        lo, hi = theta - half, theta + half
        def density(t):
            return 1.0 / (2 * half)

    def integrand(t, trig):
        return trig(2 * np.pi * spec.antenna_spacing * (a - b) * np.sin(t)) * density(t)

    re = quad(integrand, lo, hi, args=(np.cos,), limit=400, epsabs=1e-12)[0]
    im = quad(integrand, lo, hi, args=(np.sin,), limit=400, epsabs=1e-12)[0]
    return re + 1j * im


def test_unit_diagonal_exact():
    for dist in ("gaussian", "uniform"):
        spec = CorrelationSpec(0.4, np.radians(15), 0.5, 5, dist)
        r = correlation_matrix(spec)
        assert np.all(np.diag(r) == 1.0)


def test_zero_spread_steering_vector():
    spec = CorrelationSpec(np.pi / 6, 0.0, 0.5, 2)
    r = correlation_matrix(spec)
    assert r[0, 1] == pytest.approx(-1j, abs=1e-10)
    n = 5
    for dist in ("gaussian", "uniform"):
        spec = CorrelationSpec(0.7, 0.0, 0.5, n, dist)
        r = correlation_matrix(spec)
        m = np.arange(n)
        steer = np.exp(2j * np.pi * 0.5 * m * np.sin(0.7))
        np.testing.assert_allclose(r, np.outer(steer, steer.conj()), atol=1e-10)


@pytest.mark.parametrize("dist", ["gaussian", "uniform"])
def test_matches_adaptive_quadrature(dist):
    spec = CorrelationSpec(0.0, np.radians(10), 0.5, 4, dist)
    r = correlation_matrix(spec)
    for a in range(4):
        for b in range(4):
            assert abs(r[a, b] - _quad_oracle(spec, a, b)) < 1e-8


def test_toeplitz_hermitian_bounded():
    spec = CorrelationSpec(-0.9, np.radians(25), 0.5, 6)
    r = correlation_matrix(spec)
    np.testing.assert_allclose(r, r.conj().T, atol=1e-14)
    assert np.all(np.abs(r) <= 1.0 + 1e-12)
    for a in range(5):
        for b in range(5):
            assert abs(r[a, b] - r[a + 1, b + 1]) < 1e-10


def test_correlation_decreases_with_spread():
    mags = []
    for deg in (5, 10, 20, 40):
        spec = CorrelationSpec(0.0, np.radians(deg), 0.5, 2)
        mags.append(abs(correlation_matrix(spec)[0, 1]))
    assert all(b <= a + 1e-12 for a, b in zip(mags, mags[1:]))


def test_correlation_spec_validation():
    with pytest.raises(ValueError):
        CorrelationSpec(0.0, -0.1, 0.5, 2)
    with pytest.raises(ValueError):
        CorrelationSpec(0.0, 0.1, 0.5, 2, "triangular")


def test_kl_factors_identity():
    U, lam, r = kl_factors(np.eye(4, dtype=complex))
    assert r == 4
    np.testing.assert_allclose(lam, np.ones(4))
    np.testing.assert_allclose(U.conj().T @ U, np.eye(4), atol=1e-12)


def test_kl_factors_rank_one():
    spec = CorrelationSpec(0.3, 0.0, 0.5, 4)
    r_mat = correlation_matrix(spec)
    U, lam, r = kl_factors(r_mat)
    assert r == 1
    assert lam[0] == pytest.approx(4.0, rel=1e-10)


def test_kl_factors_reconstruction():
    rng = substream(3, "psd")
    a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
    r_mat = a @ a.conj().T
    U, lam, rank = kl_factors(r_mat)
    recon = (U * lam[None, :]) @ U.conj().T
    assert np.linalg.norm(recon - r_mat) < 1e-8 * np.linalg.norm(r_mat)
    assert np.all(np.diff(lam) <= 0)


def test_kl_factors_rejects_non_hermitian():
    with pytest.raises(ValueError):
        kl_factors(np.array([[1.0, 2.0], [0.0, 1.0]]))


def test_sample_covariance_matches_model():
    model = covariance_model(np.eye(3, dtype=complex), 1.0)
    draws = sample_channels(model, substream(11, "ch"), 100_000)
    cov = draws @ draws.conj().T / draws.shape[1]
    assert np.linalg.norm(cov - np.eye(3)) < 0.02 * 3
    assert np.linalg.norm(draws.mean(axis=1)) < 0.02 * np.sqrt(3)


def test_sample_channel_rank_one_colinear():
    spec = CorrelationSpec(0.3, 0.0, 0.5, 4)
    model = covariance_model(correlation_matrix(spec), 2.5)
    rng = substream(5, "ch")
    for _ in range(10):
        g = sample_channel(model, rng)
        u = model.eigvecs[:, 0]
        proj = u * (u.conj() @ g)
        assert np.linalg.norm(g - proj) < 1e-10 * np.linalg.norm(g)


def test_sample_channel_reproducible():
    spec = CorrelationSpec(0.1, np.radians(20), 0.5, 3)
    model = covariance_model(correlation_matrix(spec), 0.7)
    a = sample_channel(model, substream(9, "ch"))
    b = sample_channel(model, substream(9, "ch"))
    np.testing.assert_array_equal(a, b)


def test_assemble_global():
    one = assemble_global([[np.array([1 + 1j, 2.0])]])
    np.testing.assert_array_equal(one, np.array([[1 + 1j], [2.0]]))

    two = assemble_global([[np.array([1.0])], [np.array([2.0])]])
    np.testing.assert_array_equal(two, np.array([[1.0], [2.0]]))

    rng = substream(2, "blocks")
    blocks = rng.standard_normal((3, 4, 2)) + 1j * rng.standard_normal((3, 4, 2))
    g = assemble_global(blocks)
    assert g.shape == (6, 4)
    for l in range(3):
        for k in range(4):
            np.testing.assert_array_equal(g[2 * l : 2 * l + 2, k], blocks[l, k])

    with pytest.raises(ValueError):
        assemble_global([[np.array([1.0, 2.0])], [np.array([1.0])]])
