"""Deterministic data generation: one counter-based stream, band and
envelope shaping, amplitude normalization."""

import numpy as np
import pytest

from kglab.data import (
    envelope_field,
    gaussian_bump,
    make_rng,
    normalized_pair,
    random_band_field,
)
from kglab.grid import Field, make_grid
from kglab.spectral import lambda_power


def test_rng_is_philox_and_seed_pinned():
    a, b = make_rng(123), make_rng(123)
    assert type(a.bit_generator).__name__ == "Philox"
    assert np.array_equal(a.standard_normal(16), b.standard_normal(16))
    c = make_rng(124)
    assert not np.array_equal(make_rng(123).standard_normal(16), c.standard_normal(16))


def test_band_field_is_real_and_band_limited():
    g = make_grid(1, 256, 2 * np.pi)
    f = random_band_field(g, make_rng(80), k_lo=1, k_hi=2)
    assert f.is_real()
    mags = g.xi_mags
    live = np.abs(f.coeffs) > 1e-14
    assert np.all(mags[live] >= 1.25 * 2.0**0)  # below band 1's support
    assert np.all(mags[live] <= 1.6 * 2.0**2)
    assert not np.any(live & g.nyquist_mask)


def test_band_fraction_keeps_a_mode_box():
    g = make_grid(2, 32, np.pi)
    f = random_band_field(g, make_rng(81), band_fraction=1 / 4)
    live = np.abs(f.coeffs) > 1e-14
    m0, m1 = np.meshgrid(*g.mode_axes, indexing="ij")
    assert np.all(np.abs(m0[live]) <= 4) and np.all(np.abs(m1[live]) <= 4)


def test_complex_band_field_draws_differ_from_real():
    g = make_grid(1, 64, np.pi)
    f = random_band_field(g, make_rng(82), real=False)
    assert not f.is_real()


def test_gaussian_bump_shape():
    g = make_grid(1, 128, 8.0)
    f = gaussian_bump(g, 1.0, amplitude=3.0)
    assert f.is_real()
    center = float(f.values.real[np.argmin(g.x_mags)])
    assert center == pytest.approx(3.0, rel=1e-10)
    assert f.sup() == pytest.approx(3.0, rel=1e-10)


def test_envelope_field_spreads_mass_with_decay():
    g = make_grid(1, 512, 64.0)
    rng = make_rng(83)
    f = envelope_field(g, rng, decay=4.0, k_lo=0, k_hi=2)
    inner = np.abs(f.values[g.x_mags < 8.0])
    outer = np.abs(f.values[g.x_mags > 32.0])
    assert np.mean(outer) < 0.05 * np.mean(inner)
    slow = envelope_field(g, make_rng(83), decay=0.5, k_lo=0, k_hi=2)
    outer_slow = np.abs(slow.values[g.x_mags > 32.0])
    assert np.mean(outer_slow) > np.mean(outer)


def test_normalized_pair_hits_requested_size():
    g = make_grid(1, 128, 8.0)
    rng = make_rng(84)
    u0 = random_band_field(g, rng, k_lo=-1, k_hi=2)
    u1 = random_band_field(g, rng, k_lo=-1, k_hi=2)
    N = 6
    v0, v1 = normalized_pair(g, u0, u1, eps=0.25, smoothness=N)
    size = lambda_power(v0, N + 1).l2() + lambda_power(v1, N).l2()
    assert size == pytest.approx(0.25, rel=1e-12)
    # shared scale: shapes are preserved
    assert (v0 * (1.0 / 0.25) - u0 * (1.0 / size * 0.25 / 0.25)).grid.compatible(g)
    ratio = v0.coeffs[np.abs(u0.coeffs) > 1e-12] / u0.coeffs[np.abs(u0.coeffs) > 1e-12]
    assert np.allclose(ratio, ratio.flat[0])


def test_normalized_pair_rejects_zero_data():
    g = make_grid(1, 32, np.pi)
    z = Field.zero(g)
    with pytest.raises(ValueError, match="zero"):
        normalized_pair(g, z, z, eps=0.1, smoothness=4)
