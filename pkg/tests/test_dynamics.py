"""Time stepping, the good unknown, the reduced-equation residual, and
the profile identities on small grids."""

import math

import numpy as np
import pytest

from kglab.data import gaussian_bump, make_rng, random_band_field
from kglab.dynamics import (
    KGState,
    cfl_limit,
    default_norm_order,
    duhamel_check,
    good_unknown,
    good_unknown_field,
    normal_form_boundary,
    reduced_equation_residual,
    run_to_time,
    scattering_limit,
    step,
)
from kglab.grid import Field, make_grid
from kglab.nonlinearity import default_spec, zero_spec
from kglab.oracles import fd_gradient_oracle
from kglab.spectral import derivative, semigroup


def _small_state(g, eps, seed=60, t=0.0):
    rng = make_rng(seed)
    u = random_band_field(g, rng, k_lo=-1, k_hi=1)
    w = random_band_field(g, rng, k_lo=-1, k_hi=1)
    return KGState(g, t, u * (eps / u.sup()), w * (eps / w.sup()))


def test_spectral_derivative_against_finite_differences():
    g = make_grid(1, 128, np.pi)
    f = gaussian_bump(g, 0.4)
    spectral = derivative(f, 0)
    fd = fd_gradient_oracle(f, 0)
    # fourth-order stencil at h = 2 pi / 128; the difference is the
    # stencil's truncation error, not the spectral side's
    assert (spectral - fd).sup() < 1e-4 * spectral.sup()
    g2 = make_grid(1, 256, np.pi)
    f2 = gaussian_bump(g2, 0.4)
    err2 = (derivative(f2, 0) - fd_gradient_oracle(f2, 0)).sup()
    err1 = (spectral - fd).sup()
    assert err2 < err1 / 12.0  # h -> h/2 gains about 2^4


def test_half_wave_round_trip():
    g = make_grid(1, 64, 2 * np.pi)
    st = _small_state(g, 0.3)
    back = KGState.from_half_wave(g, st.t, st.half_wave())
    assert (back.u - st.u).l2() < 1e-13
    assert (back.w - st.w).l2() < 1e-13


def test_step_rejects_super_cfl_dt():
    g = make_grid(1, 64, np.pi)
    st = _small_state(g, 0.1)
    with pytest.raises(ValueError, match="CFL"):
        step(st, zero_spec(1), 2.0 * cfl_limit(g))


def test_linear_flow_matches_semigroup_at_fourth_order():
    g = make_grid(1, 64, np.pi)
    st = _small_state(g, 0.5)
    spec = zero_spec(1)
    T = 0.5
    exact = semigroup(st.half_wave(), T, +1)

    def integrate(substeps):
        cur, h = st, T / substeps
        for _ in range(substeps):
            cur = step(cur, spec, h)
        return (cur.half_wave() - exact).l2()

    base = max(64, int(math.ceil(T / cfl_limit(g))))
    e1, e2 = integrate(base), integrate(2 * base)
    assert e1 / e2 == pytest.approx(16.0, rel=0.3)
    assert e2 < 1e-6 * exact.l2()


def test_nonlinear_step_preserves_reality():
    g = make_grid(1, 64, 2 * np.pi)
    st = _small_state(g, 0.05)
    spec = default_spec(1)
    cur = st
    for _ in range(5):
        cur = step(cur, spec, 0.8 * cfl_limit(g))
    assert cur.u.is_real() and cur.w.is_real()


def test_run_to_time_guards_and_rows():
    g = make_grid(1, 64, 2 * np.pi)
    st = _small_state(g, 0.05, t=1.0)
    spec = zero_spec(1)
    with pytest.raises(ValueError):
        run_to_time(st, spec, 0.5)
    with pytest.raises(ValueError):
        run_to_time(st, spec, 2.0, schedule="cubic")
    with pytest.raises(ValueError):
        run_to_time(KGState(g, 0.0, st.u, st.w), spec, 2.0, schedule="log")
    out = run_to_time(st, spec, 2.0, checkpoints=5,
                      monitors={"sup": lambda s: s.u.sup()})
    assert out.verdict == "survived"
    assert len(out.rows) == 5
    order = default_norm_order(1)
    for row in out.rows:
        assert set(row) == {"t", f"sobolev_{order:g}", "sup", "flag"}
        assert row["flag"] == "ok"
    assert out.t_final == pytest.approx(2.0, rel=1e-12)


def test_run_to_time_blow_up_verdict():
    # a conserved norm trips a sub-unity blow-up factor immediately;
    # exercises the early-stop path without needing actual blow-up
    g = make_grid(1, 64, 2 * np.pi)
    st = _small_state(g, 0.05, t=1.0)
    out = run_to_time(st, zero_spec(1), 4.0, checkpoints=9, blow_up_factor=0.99)
    assert out.verdict.startswith("blew-up-at-")
    assert out.blowup_time is not None
    assert out.rows[-1]["flag"] == "blow-up"
    assert len(out.rows) == 2


def test_good_unknown_is_half_wave_for_linear_equation():
    g = make_grid(1, 64, 2 * np.pi)
    st = _small_state(g, 0.4)
    ucal, q_bound = good_unknown_field(st, zero_spec(1))
    assert q_bound == 0.0
    assert (ucal - st.half_wave()).l2() < 1e-14


def test_good_unknown_difference_is_quadratic_in_amplitude():
    g = make_grid(1, 64, 4 * np.pi)
    spec = default_spec(1)
    r1 = good_unknown(_small_state(g, 0.1), spec)
    r2 = good_unknown(_small_state(g, 0.05), spec)
    assert r1.diff_norm > 0
    assert r1.diff_norm / r2.diff_norm == pytest.approx(4.0, rel=0.15)
    assert np.isfinite(r1.quadratic_ratio) and r1.quadratic_ratio > 0


def test_good_unknown_guard_on_large_data():
    g = make_grid(1, 64, 4 * np.pi)
    big = KGState(g, 0.0, gaussian_bump(g, 1.0, amplitude=5.0), Field.zero(g))
    spec = default_spec(1)
    with pytest.raises(ValueError, match="sup bound"):
        good_unknown_field(big, spec)
    ucal, q_bound = good_unknown_field(big, spec, q_guard=False)
    assert q_bound > 0.5
    assert np.isfinite(ucal.l2())


def test_reduced_residual_halves_like_dt_squared():
    g = make_grid(1, 64, 8 * np.pi)
    spec = default_spec(1)
    st = _small_state(g, 0.1, seed=61, t=1.0)

    def advance(s, span):
        n_sub = max(1, int(math.ceil(span / (0.8 * cfl_limit(g)))))
        cur, h = s, span / n_sub
        for _ in range(n_sub):
            cur = step(cur, spec, h)
        return cur

    res = []
    for span in (0.16, 0.08):
        res.append(reduced_equation_residual(st, advance(st, span), spec))
    assert res[0] / res[1] == pytest.approx(4.0, rel=0.25)


def test_reduced_residual_guards():
    g = make_grid(1, 64, 8 * np.pi)
    spec = default_spec(1)
    st = _small_state(g, 0.1, t=1.0)
    with pytest.raises(ValueError):
        reduced_equation_residual(st, st, spec)
    other = _small_state(make_grid(1, 128, 8 * np.pi), 0.1, t=2.0)
    with pytest.raises(ValueError):
        reduced_equation_residual(st, other, spec)


def test_duhamel_pieces_scale_and_close():
    g = make_grid(1, 32, 4 * np.pi)
    spec = default_spec(1)
    st = _small_state(g, 0.05, seed=62, t=1.0)
    run = run_to_time(st, spec, 2.0, checkpoints=5, schedule="linear",
                      keep_states=True)
    out = duhamel_check(run.states, spec, rule="simpson")
    assert out["nodes"] == 5
    assert out["mismatch"] < 0.2 * out["boundary"]
    assert out["cubic"] < out["boundary"]


def test_duhamel_quadrature_guards():
    g = make_grid(1, 32, 4 * np.pi)
    spec = default_spec(1)
    sts = [_small_state(g, 0.05, t=float(t)) for t in (1, 2, 3, 4)]
    with pytest.raises(ValueError, match="odd"):
        duhamel_check(sts, spec, rule="simpson")
    with pytest.raises(ValueError, match="quadrature rule"):
        duhamel_check(sts, spec, rule="midpoint")
    with pytest.raises(ValueError):
        duhamel_check(sts[:1], spec)
    with pytest.raises(ValueError):
        duhamel_check([sts[1], sts[0]], spec, rule="trapezoid")


def test_normal_form_boundary_sums_over_sign_pairs():
    g = make_grid(1, 16, 2 * np.pi)
    spec = default_spec(1)
    st = _small_state(g, 0.2, seed=63, t=1.5)
    total = normal_form_boundary(st, spec)
    parts = None
    for mu in (1, -1):
        for nu in (1, -1):
            piece = normal_form_boundary(st, spec, signs=(mu, nu))
            parts = piece if parts is None else parts + piece
    assert (total - parts).l2() < 1e-13 * max(total.l2(), 1e-30)


def test_scattering_limit_on_synthetic_cauchy_sequence():
    g = make_grid(1, 64, 4 * np.pi)
    rng = make_rng(64)
    v_inf = random_band_field(g, rng, k_lo=-1, k_hi=1)
    w = random_band_field(g, rng, k_lo=-1, k_hi=1)
    snaps = [(t, v_inf + w * (1.0 / t)) for t in np.geomspace(1.0, 200.0, 14)]
    out = scattering_limit(snaps, alpha=0.8, N=8.0)
    assert out["monotone"] and out["monotone_octave"]
    assert out["fit"].slope < -0.9
    assert out["target_exponent"] == pytest.approx(-0.7)
    assert out["band"][0] < out["target_exponent"] < out["band"][1]


def test_scattering_limit_guards():
    g = make_grid(1, 32, np.pi)
    v = gaussian_bump(g, 1.0)
    with pytest.raises(ValueError, match="ten"):
        scattering_limit([(float(t), v) for t in range(1, 6)])
    snaps = [(float(t), v) for t in range(1, 12)]
    snaps[5] = (snaps[4][0], v)
    with pytest.raises(ValueError, match="increasing"):
        scattering_limit(snaps)
