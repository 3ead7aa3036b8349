"""Resonance phases, their brute-force lower bounds, and the exact
pseudoproduct machinery against literal-sum oracles."""

import warnings

import numpy as np
import pytest

from kglab.data import make_rng, random_band_field
from kglab.grid import Field, make_grid
from kglab.nonlinearity import default_spec
from kglab.oracles import bilinear_oracle, trilinear_oracle
from kglab.resonance import (
    BilinearSymbol,
    a_kernel,
    b_kernel,
    bilinear_apply,
    in_interaction_pair,
    interaction_sets,
    lam,
    multiplier_bound_measure,
    phase,
    phase_bound_scan,
    phase_triple,
    phi_inv,
    quasilinear_symbol,
    resonant_kernel,
    semilinear_symbol,
    trilinear_apply,
)
from kglab.spectral import dealiased_product, lp_project


def _vecs(rng, n, d):
    return 4.0 * rng.standard_normal((n, d))


# ---------------------------------------------------------------------------
# phase conventions


def test_phase_sign_convention():
    rng = make_rng(31)
    z1, z2 = _vecs(rng, 40, 2), _vecs(rng, 40, 2)
    for mu in (1, -1):
        for nu in (1, -1):
            want = -lam(z1 + z2) + mu * lam(z1) + nu * lam(z2)
            assert np.allclose(phase(mu, nu, z1, z2), want, rtol=0, atol=0)


def test_phase_triple_sign_convention():
    rng = make_rng(32)
    z1, z2, z3 = (_vecs(rng, 25, 3) for _ in range(3))
    got = phase_triple(1, -1, 1, z1, z2, z3)
    want = -lam(z1 + z2 + z3) + lam(z1) - lam(z2) + lam(z3)
    assert np.allclose(got, want, rtol=0, atol=0)


def test_phase_rejects_bad_signs():
    with pytest.raises(ValueError):
        phase(0, 1, np.zeros(2), np.zeros(2))
    with pytest.raises(ValueError):
        phase_triple(1, 1, 2, np.zeros(1), np.zeros(1), np.zeros(1))


def test_minus_minus_phase_below_minus_three():
    # -lam(z1+z2) - lam(z1) - lam(z2) <= -3 with equality only at 0
    rng = make_rng(33)
    z1, z2 = _vecs(rng, 200, 2), _vecs(rng, 200, 2)
    assert np.all(phase(-1, -1, z1, z2) <= -3.0)
    assert phase(-1, -1, np.zeros(2), np.zeros(2)) == -3.0


def test_phi_inv_is_reciprocal_away_from_floor():
    rng = make_rng(34)
    z1, z2 = _vecs(rng, 50, 1), _vecs(rng, 50, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        got = phi_inv(-1, -1, z1, z2)
    assert np.allclose(got, 1.0 / phase(-1, -1, z1, z2), rtol=1e-15)


def test_phi_inv_floors_with_warning():
    z1 = np.array([[0.3]])
    z2 = np.array([[0.4]])
    with pytest.warns(UserWarning):
        out = phi_inv(1, 1, z1, z2, floor=10.0)
    assert out == 0.0


# ---------------------------------------------------------------------------
# brute-force phase bounds: frozen values, dimension independence


_FROZEN = {
    # (mu, nu): (min |Phi|, c_phi, c_grad) at radius 8, step 0.5
    (1, 1): (0.183954, 1.2992, 1.9846),
    (1, -1): (0.093296, 1.3984, 2.7622),
    (-1, -1): (3.0, 0.3333, 2.7753),
}


@pytest.mark.parametrize("signs", sorted(_FROZEN), ids=lambda s: f"{s[0]:+d}{s[1]:+d}")
def test_phase_scan_frozen_values_1d(signs):
    out = phase_bound_scan(1, *signs, radius=8.0, step=0.5)
    mn, cp, cg = _FROZEN[signs]
    assert out["floor_violations"] == 0
    assert out["min_abs_phase"] == pytest.approx(mn, rel=1e-3)
    assert out["c_phi"] == pytest.approx(cp, rel=1e-3)
    assert out["c_grad"] == pytest.approx(cg, rel=1e-3)


def test_phase_scan_dimension_independent():
    # the phase is radial in each argument; planar pairs can beat
    # collinear ones in principle, but measured bounds agree
    a = phase_bound_scan(1, 1, -1, radius=8.0, step=0.5)
    b = phase_bound_scan(2, 1, -1, radius=8.0, step=0.5)
    assert b["n_pairs"] > a["n_pairs"]
    assert b["min_abs_phase"] == pytest.approx(a["min_abs_phase"], rel=1e-6)
    assert b["c_phi"] == pytest.approx(a["c_phi"], rel=1e-3)
    assert b["c_grad"] == pytest.approx(a["c_grad"], rel=1e-3)


def test_phase_scan_refinement_is_monotone():
    # the step-0.25 lattice contains the step-0.5 lattice, so the
    # scanned minimum can only drop and c_phi can only rise
    coarse = phase_bound_scan(1, 1, 1, radius=4.0, step=0.5)
    fine = phase_bound_scan(1, 1, 1, radius=4.0, step=0.25)
    assert fine["min_abs_phase"] <= coarse["min_abs_phase"]
    assert fine["c_phi"] >= coarse["c_phi"]
    assert fine["min_abs_phase"] == pytest.approx(coarse["min_abs_phase"], rel=0.15)


def test_phase_scan_rejects_bad_lattice():
    with pytest.raises(ValueError):
        phase_bound_scan(1, 1, 1, radius=-2.0, step=0.5)
    with pytest.raises(ValueError):
        phase_bound_scan(1, 1, 1, radius=2.0, step=0.0)


# ---------------------------------------------------------------------------
# kernels


def test_resonant_kernel_is_phi_inv_times_base():
    rng = make_rng(35)
    z1, z2 = _vecs(rng, 60, 1), _vecs(rng, 60, 1)
    base = semilinear_symbol(1, -1)
    res = resonant_kernel(base, 1, -1)
    want = phi_inv(1, -1, z1, z2) * base(z1, z2)
    assert np.allclose(res(z1, z2), want, rtol=1e-14)


def test_quasilinear_symbol_vanishes_off_gap():
    # the ratio cutoff kills pairings with |z1| >= 1.6 * 2^-10 |z1+2z2|
    N = 8
    m = quasilinear_symbol(N)
    z1 = np.array([[1.0], [0.001]])
    z2 = np.array([[1.5], [30.0]])
    vals = m(z1, z2)
    assert vals[0] == 0.0  # comparable frequencies: cut
    assert vals[1] != 0.0  # ratio ~ 1.7e-5: live


def test_interaction_pair_predicts_product_support():
    # bands that the membership test excludes contribute nothing to
    # the band-k output of a product; live bands contribute
    g = make_grid(1, 256, 2 * np.pi)
    rng = make_rng(36)
    k = 2
    f5 = random_band_field(g, rng, k_lo=5, k_hi=5)
    h5 = random_band_field(g, rng, k_lo=5, k_hi=5)
    f2 = random_band_field(g, rng, k_lo=2, k_hi=2)
    h0 = random_band_field(g, rng, k_lo=-1, k_hi=0)
    assert in_interaction_pair(k, 5, 5)  # high-high cascade down
    assert in_interaction_pair(k, 2, 0)
    assert not in_interaction_pair(k, 5, 20)
    assert lp_project(dealiased_product(f2, h0), k).l2() > 0
    assert lp_project(dealiased_product(f5, h5), k).l2() > 0
    pairs, triples = interaction_sets(k, 4)
    assert all(in_interaction_pair(k, *pq) for pq in pairs)
    assert (5, 20) not in pairs
    assert len(triples) > 0


# ---------------------------------------------------------------------------
# pseudoproduct application against oracles


def test_unit_kernel_reproduces_product():
    g = make_grid(1, 64, np.pi)
    rng = make_rng(37)
    f = random_band_field(g, rng, band_fraction=1 / 6)
    h = random_band_field(g, rng, band_fraction=1 / 6)
    one = BilinearSymbol(lambda z1, z2: np.ones(z1.shape[:-1]), tag="1")
    out = bilinear_apply(one, f, h)
    assert (out - dealiased_product(f, h)).l2() < 1e-13 * f.l2() * h.l2()


def test_bilinear_apply_matches_oracle_1d():
    g = make_grid(1, 32, np.pi)
    rng = make_rng(38)
    spec = default_spec(1)
    m = a_kernel(spec, 1, -1)
    f = random_band_field(g, rng, real=False)
    h = random_band_field(g, rng, real=False)
    fast = bilinear_apply(m, f, h)
    slow = bilinear_oracle(m, f, h)
    assert (fast - slow).l2() <= 1e-12 * max(slow.l2(), 1e-30)


def test_bilinear_apply_matches_oracle_2d():
    g = make_grid(2, 8, np.pi)
    rng = make_rng(39)
    spec = default_spec(2)
    m = resonant_kernel(a_kernel(spec, 1, 1), 1, 1)
    f = random_band_field(g, rng, real=False)
    h = random_band_field(g, rng, real=False)
    fast = bilinear_apply(m, f, h)
    slow = bilinear_oracle(m, f, h)
    assert (fast - slow).l2() <= 1e-12 * max(slow.l2(), 1e-30)


def test_trilinear_apply_matches_oracle():
    g = make_grid(1, 16, np.pi)
    rng = make_rng(40)
    spec = default_spec(1, alpha=0.5, beta=0.0, gamma_u=1.0, gamma_t=0.3)
    b = b_kernel(spec, 1, 1, -1)
    f, h, w = (random_band_field(g, rng, real=False) for _ in range(3))
    fast = trilinear_apply(b, f, h, w)
    slow = trilinear_oracle(b, f, h, w)
    assert (fast - slow).l2() <= 1e-12 * max(slow.l2(), 1e-30)


def test_trilinear_unit_kernel_is_triple_product():
    g = make_grid(1, 64, np.pi)
    rng = make_rng(41)
    f, h, w = (random_band_field(g, rng, band_fraction=1 / 8) for _ in range(3))
    from kglab.resonance import TrilinearSymbol

    one = TrilinearSymbol(lambda z1, z2, z3: np.ones(z1.shape[:-1]), tag="1")
    out = trilinear_apply(one, f, h, w)
    want = dealiased_product(dealiased_product(f, h), w)
    assert (out - want).l2() < 1e-12 * max(want.l2(), 1e-30)


# ---------------------------------------------------------------------------
# measurement preconditions


def test_bound_measure_rejects_unknown_family():
    g = make_grid(1, 32, np.pi)
    with pytest.raises(ValueError, match="unknown bound family"):
        multiplier_bound_measure("nonsense", semilinear_symbol(1, 1), g, 0, 0)


def test_bound_measure_rejects_bad_holder_exponents():
    g = make_grid(1, 32, np.pi)
    m = semilinear_symbol(1, 1)
    with pytest.raises(ValueError, match="exponents"):
        multiplier_bound_measure("semilinear_energy", m, g, 0, 0, p=2.0, q=2.0, r=2.0)


def test_bound_measure_low_high_needs_band_gap():
    g = make_grid(1, 64, np.pi)
    m = resonant_kernel(quasilinear_symbol(4), 1, -1)
    with pytest.raises(ValueError, match="k1 <= k2 - 6"):
        multiplier_bound_measure("quasilinear_energy_low_high", m, g, 0, 3, N=4)


def test_bound_measure_trilinear_needs_third_band():
    g = make_grid(1, 32, np.pi)
    spec = default_spec(1)
    b = b_kernel(spec, 1, 1, 1)
    with pytest.raises(ValueError, match="k3"):
        multiplier_bound_measure("cubic_profile", b, g, 0, 0)
    with pytest.raises(ValueError, match="1/q3"):
        multiplier_bound_measure("cubic_profile", b, g, 0, 0, k3=0,
                                 p=2.0, q=6.0, r=6.0, q3=4.0)


def test_bound_measure_reports_finite_constant():
    g = make_grid(1, 256, 2 * np.pi)
    out = multiplier_bound_measure("semilinear_energy", semilinear_symbol(1, 1),
                                   g, 1, 1, rng=make_rng(42))
    assert out["trials"] == 6
    assert np.isfinite(out["constant"]) and out["constant"] > 0
    assert out["rhs_scale"] == 2.0 ** (5 * 1)
