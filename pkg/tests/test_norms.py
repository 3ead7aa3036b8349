"""Norm evaluations against closed forms and external quadrature, the
time-norm accumulator, and the fit helpers."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from kglab.data import gaussian_bump, make_rng, random_band_field
from kglab.grid import Field, make_grid
from kglab.norms import (
    NormSpec,
    StrichartzAccumulator,
    dyadic_composite,
    holder_sup,
    interpolation_check,
    linlog_fit,
    localized_estimates_check,
    loglog_fit,
    norm,
    sandwich_check,
    sobolev,
    weighted_l2,
)


def _cosine(g, m, amp=1.0):
    x = g.x_components()[0]
    return Field.from_values(g, amp * np.cos(m * g.dxi * x))


def test_sobolev_single_mode_closed_form():
    g = make_grid(1, 128, 2 * np.pi)
    c = np.zeros(g.shape, dtype=complex)
    c[3] = 1.0  # mode m = 3, frequency 3 * dxi
    f = Field.from_coeffs(g, c)
    xi = 3 * g.dxi
    for s in (0.0, 1.0, 4.5):
        want = math.sqrt(g.volume) * (1.0 + xi * xi) ** (s / 2.0)
        assert sobolev(f, s) == pytest.approx(want, rel=1e-13)


def test_holder_sup_cosine_derivatives():
    # sup |d^b cos(m xi0 x)| = (m xi0)^b: the max over b <= 2 is the
    # second derivative once the frequency exceeds one
    g = make_grid(1, 256, np.pi)  # dxi = 1, integer frequencies
    f = _cosine(g, 3)
    assert holder_sup(f, 0) == pytest.approx(1.0, rel=1e-12)
    assert holder_sup(f, 1) == pytest.approx(3.0, rel=1e-12)
    assert holder_sup(f, 2) == pytest.approx(9.0, rel=1e-12)


def test_weighted_l2_against_scipy_quadrature():
    g = make_grid(1, 256, 12.0)
    f = gaussian_bump(g, 1.0, amplitude=2.0)
    alpha = 0.8
    want2, err = quad(lambda x: (1.0 + x * x) ** alpha * 4.0 * np.exp(-x * x), -12.0, 12.0)
    assert err < 1e-7 * want2
    assert weighted_l2(f, alpha) == pytest.approx(math.sqrt(want2), rel=1e-7)


def test_sandwich_orders_the_three_quantities():
    g = make_grid(1, 256, 16.0)
    rng = make_rng(50)
    f = random_band_field(g, rng, k_lo=0, k_hi=3)
    out = sandwich_check(f, 0.7)
    assert out["ok"]
    assert out["largest_piece"] <= out["weighted"] * (1 + 1e-10)
    assert out["weighted"] <= out["composite"] * (1 + 1e-10)
    assert out["composite"] == pytest.approx(dyadic_composite(f, 0.7), rel=1e-13)


def test_norm_dispatch_matches_direct_calls():
    g = make_grid(1, 128, 8.0)
    f = gaussian_bump(g, 1.5)
    assert norm(f, NormSpec("sobolev", s=2.0)) == sobolev(f, 2.0)
    assert norm(f, NormSpec("holder_sup", m=1)) == holder_sup(f, 1)
    assert norm(f, NormSpec("weighted_l2", alpha=0.5)) == weighted_l2(f, 0.5)
    assert norm(f, NormSpec("dyadic_composite", alpha=0.5)) == dyadic_composite(f, 0.5)


def test_norm_spec_labels_are_stable():
    # these strings are CSV headers: changing them breaks re-run diffs
    assert NormSpec("sobolev", s=8.0).label == "sobolev_8"
    assert NormSpec("sobolev", s=2.5).label == "sobolev_2.5"
    assert NormSpec("holder_sup", m=2).label == "holdersup_2"
    assert NormSpec("weighted_l2", alpha=0.8).label == "weightedL2_0.8"
    assert NormSpec("dyadic_composite", alpha=0.8).label == "dyadic_0.8"


def test_norm_spec_validation():
    with pytest.raises(ValueError):
        NormSpec("energy")
    with pytest.raises(ValueError):
        NormSpec("sobolev", s=-1.0)
    with pytest.raises(ValueError):
        NormSpec("holder_sup", m=-1)
    with pytest.raises(ValueError):
        NormSpec("weighted_l2", alpha=0.0)
    with pytest.raises(ValueError):
        NormSpec("dyadic_composite", alpha=1.0)


# ---------------------------------------------------------------------------
# time-integrated norms


def test_accumulator_matches_hand_trapezoid():
    acc = StrichartzAccumulator(p=2.0, weight=0.5)
    vals = {1.0: 3.0, 2.0: 2.0, 4.0: 1.0}
    for t, v in vals.items():
        acc.update(t, v)
    g = {t: (t**0.5 * v) ** 2 for t, v in vals.items()}
    total = 0.5 * (g[1.0] + g[2.0]) * 1.0 + 0.5 * (g[2.0] + g[4.0]) * 2.0
    assert acc.value() == pytest.approx(math.sqrt(total), rel=1e-15)
    assert acc.label == "strichartz_p2_w0.5"


def test_accumulator_guards():
    with pytest.raises(ValueError):
        StrichartzAccumulator(p=1.5)
    acc = StrichartzAccumulator(p=2.0)
    acc.update(1.0, 1.0)
    with pytest.raises(ValueError):
        acc.update(1.0, 1.0)
    with pytest.raises(ValueError):
        acc.update(0.5, 1.0)


# ---------------------------------------------------------------------------
# fits


def test_loglog_fit_recovers_exact_power_law():
    ts = np.linspace(2.0, 40.0, 25)
    ys = 3.0 * ts**-2.0
    fit = loglog_fit(ts, ys)
    assert fit.slope == pytest.approx(-2.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-12)
    assert fit.r2 == pytest.approx(1.0, abs=1e-12)
    assert fit.ci95 == pytest.approx(0.0, abs=1e-10)
    assert fit.n_points == 25


def test_loglog_fit_window_and_noise():
    rng = make_rng(51)
    ts = np.linspace(1.0, 100.0, 60)
    ys = 5.0 * ts**-0.5 * np.exp(0.05 * rng.standard_normal(60))
    fit = loglog_fit(ts, ys, t_min=10.0, t_max=90.0)
    assert fit.window == (10.0, 90.0)
    assert fit.n_points == int(np.sum((ts >= 10.0) & (ts <= 90.0)))
    assert fit.slope == pytest.approx(-0.5, abs=0.1)
    assert fit.ci95 == 2.0 * fit.stderr > 0.0
    assert "slope=" in str(fit)


def test_linlog_fit_recovers_log_growth():
    ts = np.geomspace(1.0, 1000.0, 30)
    ys = 5.0 + 2.0 * np.log(ts)
    fit = linlog_fit(ts, ys)
    assert fit.slope == pytest.approx(2.0, abs=1e-12)
    assert fit.intercept == pytest.approx(5.0, abs=1e-12)


def test_fits_need_two_samples():
    with pytest.raises(ValueError):
        loglog_fit([1.0, 2.0, 3.0], [1.0, 1.0, 1.0], t_min=1.5, t_max=1.9)
    with pytest.raises(ValueError):
        linlog_fit([1.0], [1.0])
    with pytest.raises(ValueError):
        loglog_fit([1.0, 2.0], [0.0, -1.0])  # positivity filter empties it


# ---------------------------------------------------------------------------
# interpolated and localized shell estimates


def test_interpolation_zero_layer_is_sandwich_piece():
    g = make_grid(1, 128, 16.0)
    f = random_band_field(g, make_rng(52), k_lo=0, k_hi=2)
    alpha = 0.8
    out = interpolation_check(f, alpha, N=8.0, eps2=1.0, ns=(0.0,))
    assert out["constant"] == pytest.approx(sandwich_check(f, alpha)["largest_piece"], rel=1e-13)


def test_interpolation_check_guards():
    g = make_grid(1, 128, 16.0)
    f = gaussian_bump(g, 2.0)
    with pytest.raises(ValueError):
        interpolation_check(f, 0.8, N=8.0, eps2=0.0)
    with pytest.raises(ValueError):
        interpolation_check(f, 0.8, N=8.0, eps2=1.0, ns=(9.0,))


def test_localized_check_runs_and_guards():
    g = make_grid(1, 128, 16.0)
    rng = make_rng(53)
    V = random_band_field(g, rng, k_lo=0, k_hi=2) * 0.1
    snaps = [(1.0, V), (2.0, V), (4.0, V)]
    out = localized_estimates_check(snaps, k=1, j=0, alpha=0.8, N=8.0, eps2=0.1)
    assert np.isfinite(out["dispersive_ratio"]) and out["dispersive_ratio"] > 0
    assert np.isfinite(out["strichartz_ratio"]) and out["strichartz_ratio"] > 0
    assert out["params"]["beta2"] == 1.0
    with pytest.raises(ValueError):
        localized_estimates_check(snaps, k=1, j=0, alpha=0.8, N=8.0, eps2=0.1,
                                  beta1=0.5, beta2=0.5)
    with pytest.raises(ValueError):
        localized_estimates_check(snaps, k=1, j=0, alpha=0.8, N=8.0, eps2=0.1, n1=9.0)
    with pytest.raises(ValueError):
        localized_estimates_check([(2.0, V), (1.0, V)], k=1, j=0,
                                  alpha=0.8, N=8.0, eps2=0.1)
    with pytest.raises(ValueError):
        localized_estimates_check([], k=1, j=0, alpha=0.8, N=8.0, eps2=0.1)
