"""Resonance phases, interaction sets, and pseudoproduct operators.

Phases of the quadratic and cubic frequency interactions,

    Phi_{mu nu}(z1, z2)       = -L(z1+z2) + mu L(z1) + nu L(z2)
    Psi_{mu s i}(z1, z2, z3)  = -L(z1+z2+z3) + mu L(z1) + s L(z2) + i L(z3)

with L(z) = sqrt(1+|z|^2), together with the bilinear operator

    B_m(f, g)^(xi) = sum_eta m(xi-eta, eta) f^(xi-eta) g^(eta)

and its trilinear analogue.  The normalization is fixed so that m = 1
reproduces the dealiased pointwise product: both input spectra are
truncated to the 2/3 box, mode sums are exact integer sums (no
wraparound), and the output is truncated to the same box.

Derived kernel families (the energy-functional multipliers, the
quadratic interaction kernels of a given nonlinearity, and the cubic
profile kernel built from them) are provided as symbol objects carrying
a tag, so measured operator constants can be reported per family.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .cutoffs import psi, psi_le
from .grid import Field, Grid
from .nonlinearity import NonlinearitySpec

__all__ = [
    "SIGN_PAIRS", "SIGN_TRIPLES", "PHASE_FLOOR",
    "lam", "phase", "phase_triple", "phi_inv",
    "phase_bound_scan",
    "in_interaction_pair", "in_interaction_triple", "interaction_sets",
    "BilinearSymbol", "TrilinearSymbol",
    "symbol_family_a", "a_kernel", "semilinear_symbol",
    "semilinear_plain_symbol", "quasilinear_symbol", "resonant_kernel",
    "symbol_family_b", "b_kernel",
    "bilinear_apply", "trilinear_apply", "BilinearKernel", "TrilinearKernel",
    "multiplier_bound_measure", "BOUND_FAMILIES",
]

SIGN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
SIGN_TRIPLES = tuple((m, s, i) for m in (1, -1) for s in (1, -1) for i in (1, -1))

# Lattice pairings with |Phi| below this are excluded from kernel
# evaluation (set to zero and warned about).  The scan shows the floor
# is never approached for this dispersion relation.
PHASE_FLOOR = 1e-8


def lam(z):
    """sqrt(1 + |z|^2) for an array of frequency vectors shaped (..., d)."""
    z = np.asarray(z, dtype=float)
    return np.sqrt(1.0 + np.sum(z * z, axis=-1))


def _check_sign(s):
    if s not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {s!r}")
    return s


def phase(mu: int, nu: int, z1, z2):
    """Quadratic interaction phase Phi_{mu nu}(z1, z2)."""
    _check_sign(mu), _check_sign(nu)
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    return -lam(z1 + z2) + mu * lam(z1) + nu * lam(z2)


def phase_triple(mu: int, sigma: int, iota: int, z1, z2, z3):
    """Cubic interaction phase Psi_{mu sigma iota}(z1, z2, z3)."""
    for s in (mu, sigma, iota):
        _check_sign(s)
    z1 = np.asarray(z1, dtype=float)
    z2 = np.asarray(z2, dtype=float)
    z3 = np.asarray(z3, dtype=float)
    return (-lam(z1 + z2 + z3) + mu * lam(z1)
            + sigma * lam(z2) + iota * lam(z3))


def phi_inv(mu: int, nu: int, z1, z2, floor: float = PHASE_FLOOR):
    """1 / Phi_{mu nu}, zeroing (and warning about) sub-floor pairings."""
    ph = phase(mu, nu, z1, z2)
    small = np.abs(ph) < floor
    if np.any(small):
        warnings.warn(
            f"phase below floor {floor:g} at {int(np.sum(small))} pairings; "
            "contributions excluded", stacklevel=2)
        ph = np.where(small, 1.0, ph)
        return np.where(small, 0.0, 1.0 / ph)
    return 1.0 / ph


# ---------------------------------------------------------------------------
# phase bound scan

def _ball_lattice(d: int, radius: float, step: float,
                  nonneg_axes: tuple = ()) -> np.ndarray:
    """All lattice points with |v| <= radius on the step-h grid.

    Axes listed in nonneg_axes are restricted to v >= 0 (used by the
    canonical reduced scan in three dimensions).
    """
    nsteps = int(round(radius / step))
    axis = step * np.arange(-nsteps, nsteps + 1)
    half = step * np.arange(0, nsteps + 1)
    axes = [half if a in nonneg_axes else axis for a in range(d)]
    pts = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, d)
    keep = np.sum(pts * pts, axis=1) <= radius * radius + 1e-12
    return pts[keep]


def _scan_points(d: int, radius: float, step: float):
    """Left (xi) and right (eta) point sets of the pair scan.

    Full lattice product for d <= 2.  For d = 3 the phase depends only
    on |xi|, |eta|, |xi - eta|, so every pair is rotation-equivalent to
    xi = (r, 0, 0), eta = (a, b, 0) with r, b >= 0; the scan runs over
    that canonical slice at the same resolution.
    """
    if d in (1, 2):
        pts = _ball_lattice(d, radius, step)
        return pts, pts
    if d == 3:
        nsteps = int(round(radius / step))
        r = step * np.arange(0, nsteps + 1)
        xi = np.zeros((r.size, 3))
        xi[:, 0] = r
        disc = _ball_lattice(2, radius, step, nonneg_axes=(1,))
        eta = np.zeros((disc.shape[0], 3))
        eta[:, :2] = disc
        return xi, eta
    raise ValueError(f"scan supports d in 1..3, got {d}")


def phase_bound_scan(d: int, mu: int, nu: int, radius: float = 8.0,
                     step: float = 0.25, *, fd_step: float | None = None,
                     grad_pair_budget: int = 4_000_000,
                     chunk: int = 512, floor: float = PHASE_FLOOR) -> dict:
    """Brute-force scan of the phase lower bound and derivative bound.

    Over lattice pairs (xi, eta) with |xi|, |eta| <= radius, measures

        c_phi  = max  1 / (|Phi_{mu nu}(xi-eta, eta)| (1 + min{|xi|,|eta|,|xi-eta|}))
        c_grad = max  |grad Phi_{mu nu}| / min{1, |Phi_{mu nu}|}

    with the gradient taken in the (z1, z2) arguments by central finite
    differences.  The gradient maximum is taken over a deterministic
    row subsample when the full pair count exceeds grad_pair_budget.
    Returns a report dict; finite constants are the verification.
    """
    _check_sign(mu), _check_sign(nu)
    if radius <= 0 or step <= 0:
        raise ValueError("radius and step must be positive")
    xi_pts, eta_pts = _scan_points(d, radius, step)
    nx, ne = xi_pts.shape[0], eta_pts.shape[0]
    delta = fd_step if fd_step is not None else step / 8.0

    eta2 = np.sum(eta_pts * eta_pts, axis=1)
    abs_eta = np.sqrt(eta2)
    lam_eta = np.sqrt(1.0 + eta2)
    xi2_all = np.sum(xi_pts * xi_pts, axis=1)

    # deterministic row subsample for the FD gradient pass
    row_stride = max(1, int(np.ceil(nx * ne / max(grad_pair_budget, 1))))
    grad_rows = np.zeros(nx, dtype=bool)
    grad_rows[::row_stride] = True

    min_abs = np.inf
    min_arg = (None, None)
    c_phi = 0.0
    c_phi_arg = (None, None)
    c_grad = 0.0
    n_grad = 0
    n_floor = 0

    for i0 in range(0, nx, chunk):
        i1 = min(i0 + chunk, nx)
        X = xi_pts[i0:i1]
        xi2 = xi2_all[i0:i1]
        abs_xi = np.sqrt(xi2)
        lam_xi = np.sqrt(1.0 + xi2)
        # |xi - eta|^2 via the inner-product expansion
        dots = X @ eta_pts.T
        d2 = xi2[:, None] + eta2[None, :] - 2.0 * dots
        np.maximum(d2, 0.0, out=d2)
        abs_diff = np.sqrt(d2)
        lam_diff = np.sqrt(1.0 + d2)

        ph = -lam_xi[:, None] + mu * lam_diff + nu * lam_eta[None, :]
        aph = np.abs(ph)
        n_floor += int(np.sum(aph < floor))

        flat = int(np.argmin(aph))
        if aph.flat[flat] < min_abs:
            min_abs = float(aph.flat[flat])
            r, c = divmod(flat, ne)
            min_arg = (xi_pts[i0 + r].copy(), eta_pts[c].copy())

        min3 = np.minimum(np.minimum(abs_xi[:, None], abs_eta[None, :]), abs_diff)
        ratio = 1.0 / (np.maximum(aph, floor) * (1.0 + min3))
        flat = int(np.argmax(ratio))
        if ratio.flat[flat] > c_phi:
            c_phi = float(ratio.flat[flat])
            r, c = divmod(flat, ne)
            c_phi_arg = (xi_pts[i0 + r].copy(), eta_pts[c].copy())

        rows = np.nonzero(grad_rows[i0:i1])[0]
        if rows.size == 0:
            continue
        Xs = X[rows]
        xi2s, dots_s, d2s = xi2[rows], dots[rows], d2[rows]
        lam_eta_b = lam_eta[None, :]
        gradsq = np.zeros_like(d2s)
        for c in range(d):
            diff_c = Xs[:, c][:, None] - eta_pts[:, c][None, :]
            lam_xi_p = np.sqrt(1.0 + xi2s + 2.0 * delta * Xs[:, c] + delta**2)
            lam_xi_m = np.sqrt(1.0 + xi2s - 2.0 * delta * Xs[:, c] + delta**2)
            # z1 perturbation: moves xi - eta and xi + ... = xi
            lam_dp = np.sqrt(1.0 + d2s + 2.0 * delta * diff_c + delta**2)
            lam_dm = np.sqrt(1.0 + d2s - 2.0 * delta * diff_c + delta**2)
            g1 = (-(lam_xi_p - lam_xi_m)[:, None]
                  + mu * (lam_dp - lam_dm)) / (2.0 * delta)
            gradsq += g1 * g1
            # z2 perturbation: moves eta and xi, leaves xi - eta fixed
            lam_eta_p = np.sqrt(1.0 + eta2 + 2.0 * delta * eta_pts[:, c] + delta**2)
            lam_eta_m = np.sqrt(1.0 + eta2 - 2.0 * delta * eta_pts[:, c] + delta**2)
            g2 = (-(lam_xi_p - lam_xi_m)[:, None]
                  + nu * (lam_eta_p - lam_eta_m)[None, :]) / (2.0 * delta)
            gradsq += g2 * g2
        aph_s = np.abs(-np.sqrt(1.0 + xi2s)[:, None] + mu * np.sqrt(1.0 + d2s)
                       + nu * lam_eta_b)
        denom = np.minimum(1.0, np.maximum(aph_s, floor))
        c_grad = max(c_grad, float(np.max(np.sqrt(gradsq) / denom)))
        n_grad += rows.size * ne

    return {
        "d": d, "mu": mu, "nu": nu, "radius": radius, "step": step,
        "n_pairs": nx * ne, "min_abs_phase": min_abs,
        "argmin_xi": min_arg[0], "argmin_eta": min_arg[1],
        "c_phi": c_phi, "c_phi_arg_xi": c_phi_arg[0],
        "c_phi_arg_eta": c_phi_arg[1],
        "c_grad": c_grad, "n_grad_pairs": n_grad, "fd_step": delta,
        "floor_violations": n_floor,
    }


# ---------------------------------------------------------------------------
# interaction sets

def in_interaction_pair(k: int, k1: int, k2: int) -> bool:
    """Membership of (k1, k2) in the bilinear interaction set of band k."""
    if k1 < -1 or k2 < -1:
        return False
    hi = max(k1, k2)
    return abs(hi - k) <= 8 or (hi >= k + 8 and abs(k1 - k2) <= 8)


def in_interaction_triple(k: int, k1: int, k2: int, k3: int) -> bool:
    """Membership of (k1, k2, k3) in the trilinear interaction set of band k."""
    if min(k1, k2, k3) < -1:
        return False
    ks = sorted((k1, k2, k3))
    hi, med = ks[2], ks[1]
    return abs(hi - k) <= 4 or (hi >= k + 4 and hi - med <= 4)


def interaction_sets(k: int, k_cap: int):
    """Explicit pair and triple lists for band k, entries in [-1, k_cap]."""
    if k < -1:
        raise ValueError("band index must be >= -1")
    rng = range(-1, k_cap + 1)
    pairs = [(k1, k2) for k1 in rng for k2 in rng
             if in_interaction_pair(k, k1, k2)]
    triples = [(k1, k2, k3) for k1 in rng for k2 in rng for k3 in rng
               if in_interaction_triple(k, k1, k2, k3)]
    return pairs, triples


# ---------------------------------------------------------------------------
# symbol families

@dataclass(frozen=True)
class BilinearSymbol:
    """Kernel m(z1, z2) with a family tag for reporting."""
    fn: Callable
    tag: str

    def __call__(self, z1, z2):
        return self.fn(z1, z2)


@dataclass(frozen=True)
class TrilinearSymbol:
    """Kernel b(z1, z2, z3) with a family tag for reporting."""
    fn: Callable
    tag: str

    def __call__(self, z1, z2, z3):
        return self.fn(z1, z2, z3)


def _safe_ratio(num, den):
    """num/den with 0/0 := 0 and x/0 := inf for x > 0."""
    num = np.asarray(num, dtype=float)
    den = np.asarray(den, dtype=float)
    out = np.full(np.broadcast(num, den).shape, np.inf)
    both = (num == 0) & (den == 0)
    ok = den > 0
    np.divide(num, den, out=out, where=ok)
    out[both] = 0.0
    return out


_A_FACTORS = ("one", "eta", "inv_lam_eta", "inv_lam_diff",
              "eta_eta_over_lam", "diff_over_lam")


def symbol_family_a(mu: int, nu: int, factors, coeff: complex = 1.0) -> BilinearSymbol:
    """Product of quadratic-kernel factors.

    Each factor is "one", "inv_lam_eta", "inv_lam_diff", ("eta", j),
    ("eta_eta_over_lam", j, l) or ("diff_over_lam", l), in the
    arguments z1 = xi - eta, z2 = eta.
    """
    _check_sign(mu), _check_sign(nu)
    parsed = []
    for f in factors:
        name, idx = (f, ()) if isinstance(f, str) else (f[0], tuple(f[1:]))
        if name not in _A_FACTORS:
            raise ValueError(f"unknown kernel factor {f!r}")
        parsed.append((name, idx))

    def fn(z1, z2):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        out = np.full(np.broadcast(z1[..., 0], z2[..., 0]).shape, coeff,
                      dtype=complex)
        for name, idx in parsed:
            if name == "one":
                continue
            elif name == "eta":
                out = out * z2[..., idx[0]]
            elif name == "inv_lam_eta":
                out = out / lam(z2)
            elif name == "inv_lam_diff":
                out = out / lam(z1)
            elif name == "eta_eta_over_lam":
                out = out * z2[..., idx[0]] * z2[..., idx[1]] / lam(z2)
            elif name == "diff_over_lam":
                out = out * z1[..., idx[0]] / lam(z1)
        return out

    names = ",".join(n if not i else f"{n}{list(i)}" for n, i in parsed)
    return BilinearSymbol(fn, tag=f"a[{mu:+d}{nu:+d}]({names})")


def _slot_weights(spec: NonlinearitySpec, sign: int, z):
    """Frequency weights mapping a half-wave to the field components.

    Component order (u, d_t u, d_1 u, ..., d_d u); weights are the
    coefficients of the sign-indexed half-wave at frequency z.
    """
    z = np.asarray(z, dtype=float)
    L = lam(z)
    w = np.empty((spec.nz,) + z.shape[:-1], dtype=complex)
    w[0] = -0.5j * sign / L
    w[1] = 0.5
    for j in range(spec.d):
        w[2 + j] = 0.5 * sign * z[..., j] / L
    return w


def a_kernel(spec: NonlinearitySpec, mu: int, nu: int) -> BilinearSymbol:
    """Quadratic interaction kernel of the nonlinearity, derived mechanically.

    Slot 1 carries the coefficient fields of the quasilinear terms (and
    the first factor of the quadratic form); slot 2 carries the
    second-derivative factor.
    """
    _check_sign(mu), _check_sign(nu)

    def fn(z1, z2):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        w1 = _slot_weights(spec, mu, z1)
        w2 = _slot_weights(spec, nu, z2)
        L2 = lam(z2)
        q0 = np.tensordot(spec.q0, w1, axes=(1, 0))        # (d, ...)
        qjl = np.tensordot(spec.qjl, w1, axes=(2, 0))      # (d, d, ...)
        out = np.zeros(np.broadcast(w1[0], w2[0]).shape, dtype=complex)
        for j in range(spec.d):
            out = out + 2.0 * q0[j] * (0.5j * z2[..., j])
            for l in range(spec.d):
                out = out + qjl[j, l] * (0.5j * nu * z2[..., j] * z2[..., l] / L2)
        out = out + np.einsum("c...,cd,d...->...", w1, spec.s, w2)
        return out

    return BilinearSymbol(fn, tag=f"a[{mu:+d}{nu:+d}](derived)")


def semilinear_symbol(mu: int, nu: int, amplitude: float = 1.0,
                      floor: float = PHASE_FLOOR) -> BilinearSymbol:
    """Energy-functional kernel with the near-diagonal cone removed.

    -i C Phi^{-1} [1 - cut(|z1| / |z1 + 2 z2|) - cut(|z2| / |2 z1 + z2|)]
    with cut the band-(-10) low cutoff; ratio conventions 0/0 := 0,
    x/0 := inf.
    """
    _check_sign(mu), _check_sign(nu)

    def fn(z1, z2):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        r1 = _safe_ratio(np.linalg.norm(z1, axis=-1),
                         np.linalg.norm(z1 + 2.0 * z2, axis=-1))
        r2 = _safe_ratio(np.linalg.norm(z2, axis=-1),
                         np.linalg.norm(2.0 * z1 + z2, axis=-1))
        bracket = 1.0 - psi_le(-10, r1) - psi_le(-10, r2)
        return -1j * amplitude * phi_inv(mu, nu, z1, z2, floor) * bracket

    return BilinearSymbol(fn, tag=f"m_S[{mu:+d}{nu:+d}]")


def semilinear_plain_symbol(mu: int, nu: int,
                            floor: float = PHASE_FLOOR) -> BilinearSymbol:
    """Plain energy-functional kernel -i Phi^{-1}."""
    _check_sign(mu), _check_sign(nu)

    def fn(z1, z2):
        return -1j * phi_inv(mu, nu, np.asarray(z1, float),
                             np.asarray(z2, float), floor)

    return BilinearSymbol(fn, tag=f"m_S1[{mu:+d}{nu:+d}]")


# scale below which the high-pass factor of the quasilinear kernel
# vanishes: equals 1 on the plateau of the innermost dyadic cutoff
_HIGHPASS_SCALE = 0.64


def quasilinear_symbol(N: int, split: tuple | None = None,
                       amplitude: float = 1.0) -> BilinearSymbol:
    """Commutator kernel of the weighted energy functional.

    cut(|z1| / |z1 + 2 z2|) n1(z1) n2(z2) n3(z1+z2)
        [n4(z1+z2) n5(z2) - n4((z1+2 z2)/2) n5((z1+2 z2)/2)]

    with n_l = <.>^{m_l}, sum m_l = 2N+1 (default split (0,0,0,N,N+1)),
    and n2, n3 high-passed so they vanish on the lowest dyadic block.
    """
    m = tuple(split) if split is not None else (0, 0, 0, N, N + 1)
    if len(m) != 5 or sum(m) != 2 * N + 1:
        raise ValueError(f"order split {m} must have five entries summing to {2*N+1}")

    def n(idx, z):
        w = lam(z) ** m[idx - 1]
        if idx in (2, 3):
            w = w * (1.0 - psi(np.linalg.norm(z, axis=-1) / _HIGHPASS_SCALE))
        return w

    def fn(z1, z2):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        cut = psi_le(-10, _safe_ratio(np.linalg.norm(z1, axis=-1),
                                      np.linalg.norm(z1 + 2.0 * z2, axis=-1)))
        mid = 0.5 * (z1 + 2.0 * z2)
        main = n(4, z1 + z2) * n(5, z2) - n(4, mid) * n(5, mid)
        return amplitude * cut * n(1, z1) * n(2, z2) * n(3, z1 + z2) * main

    return BilinearSymbol(fn, tag=f"m_Q[N={N},split={m}]")


def resonant_kernel(base: BilinearSymbol, mu: int, nu: int,
                    floor: float = PHASE_FLOOR) -> BilinearSymbol:
    """Phi^{-1}_{mu nu} times a bilinear kernel."""
    _check_sign(mu), _check_sign(nu)

    def fn(z1, z2):
        return phi_inv(mu, nu, np.asarray(z1, float),
                       np.asarray(z2, float), floor) * base(z1, z2)

    return BilinearSymbol(fn, tag=f"phi_inv[{mu:+d}{nu:+d}]*{base.tag}")


def symbol_family_b(mu: int, a_outer: BilinearSymbol, a_inner: BilinearSymbol,
                    floor: float = PHASE_FLOOR) -> TrilinearSymbol:
    """Cubic profile kernel assembled from two quadratic kernels.

    b(t1, t2, t3) = a_in(t2, t3) * sum_nu [ (Phi^{-1}_{mu nu} a_out)(t1, t2+t3)
                                          + (Phi^{-1}_{nu mu} a_out)(t2+t3, t1) ]

    The second piece is the relabeled boundary of the parts integration
    where the quadratic block sat in the first slot; its kernel argument
    is the inner-pair total t2+t3, which is what makes the cubic time
    integral close the profile identity to quadrature accuracy.
    """
    _check_sign(mu)

    def fn(z1, z2, z3):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        z3 = np.asarray(z3, dtype=float)
        eta = z2 + z3
        acc = 0.0
        for nu in (1, -1):
            acc = acc + phi_inv(mu, nu, z1, eta, floor) * a_outer(z1, eta)
            acc = acc + phi_inv(nu, mu, eta, z1, floor) * a_outer(eta, z1)
        return a_inner(z2, z3) * acc

    return TrilinearSymbol(fn, tag=f"b[mu={mu:+d};{a_outer.tag};{a_inner.tag}]")


def b_kernel(spec: NonlinearitySpec, mu: int, sigma: int, iota: int,
             floor: float = PHASE_FLOOR) -> TrilinearSymbol:
    """Cubic profile kernel of a nonlinearity, with sign-resolved quadratic kernels."""
    for s in (mu, sigma, iota):
        _check_sign(s)
    a_in = a_kernel(spec, sigma, iota)
    a_out = {(m, n): a_kernel(spec, m, n) for m in (1, -1) for n in (1, -1)}

    def fn(z1, z2, z3):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        z3 = np.asarray(z3, dtype=float)
        eta = z2 + z3
        acc = 0.0
        for nu in (1, -1):
            acc = acc + phi_inv(mu, nu, z1, eta, floor) * a_out[(mu, nu)](z1, eta)
            acc = acc + phi_inv(nu, mu, eta, z1, floor) * a_out[(nu, mu)](eta, z1)
        return a_in(z2, z3) * acc

    return TrilinearSymbol(fn, tag=f"b[{mu:+d}{sigma:+d}{iota:+d}](derived)")


# ---------------------------------------------------------------------------
# pseudoproduct application

def _shared_grid(*fields) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if not grid.compatible(f.grid):
            raise ValueError("fields must share a grid")
    return grid


def _box_support(grid: Grid, coeffs: np.ndarray):
    """Modes inside the 2/3 box carrying nonzero coefficients.

    Returns (modes (ns, d) ints, values (ns,) complex) in a fixed
    deterministic order.
    """
    mask = grid.dealias_mask & (coeffs != 0)
    idx = np.argwhere(mask)
    modes = np.stack([grid.mode_axes[a][idx[:, a]] for a in range(grid.d)],
                     axis=-1).astype(np.int64)
    return modes, coeffs[mask]


def _scatter(grid: Grid, target_modes: np.ndarray, values: np.ndarray,
             out: np.ndarray):
    """Accumulate values at integer mode vectors, dropping out-of-box targets."""
    cut = grid.n // 3
    keep = np.all(np.abs(target_modes) <= cut, axis=-1)
    if not np.any(keep):
        return
    tm = target_modes[keep] % grid.n
    flat = np.ravel_multi_index(tuple(tm.T), grid.shape)
    np.add.at(out.reshape(-1), flat, values[keep])


def bilinear_apply(m, f: Field, g: Field, *, pair_budget: int = 4_000_000) -> Field:
    """Apply the bilinear pseudoproduct B_m to two fields.

    Exact summation over the nonzero coefficients of the 2/3-truncated
    inputs, chunked to bound memory; m = 1 reproduces dealiased f*g.
    """
    grid = _shared_grid(f, g)
    fm, fv = _box_support(grid, f.coeffs)
    gm, gv = _box_support(grid, g.coeffs)
    out = np.zeros(grid.shape, dtype=complex)
    if fv.size == 0 or gv.size == 0:
        return Field.from_coeffs(grid, out)
    zg = gm * grid.dxi
    block = max(1, pair_budget // max(gv.size, 1))
    for i0 in range(0, fv.size, block):
        i1 = min(i0 + block, fv.size)
        z1 = np.broadcast_to((fm[i0:i1] * grid.dxi)[:, None, :],
                             (i1 - i0, gv.size, grid.d))
        z2 = np.broadcast_to(zg[None, :, :], (i1 - i0, gv.size, grid.d))
        mv = np.asarray(m(z1, z2), dtype=complex)
        vals = mv * fv[i0:i1, None] * gv[None, :]
        targets = fm[i0:i1, None, :] + gm[None, :, :]
        _scatter(grid, targets.reshape(-1, grid.d), vals.reshape(-1), out)
    return Field.from_coeffs(grid, out)


class BilinearKernel:
    """Cached bilinear kernel on fixed coefficient supports.

    Precomputes the kernel tensor and scatter plan so the operator can
    be re-applied cheaply to fields sharing the declared supports.
    """

    def __init__(self, m, grid: Grid, support_f: np.ndarray | None = None,
                 support_g: np.ndarray | None = None,
                 entry_budget: int = 40_000_000):
        self.grid = grid
        self._mask_f = grid.dealias_mask if support_f is None else (support_f & grid.dealias_mask)
        self._mask_g = grid.dealias_mask if support_g is None else (support_g & grid.dealias_mask)
        fm = self._modes(self._mask_f)
        gm = self._modes(self._mask_g)
        if fm.shape[0] * gm.shape[0] > entry_budget:
            raise ValueError("kernel tensor too large; restrict the supports")
        self._fm, self._gm = fm, gm
        z1 = np.broadcast_to((fm * grid.dxi)[:, None, :],
                             (fm.shape[0], gm.shape[0], grid.d))
        z2 = np.broadcast_to((gm * grid.dxi)[None, :, :], z1.shape)
        self._kernel = np.asarray(m(z1, z2), dtype=complex)
        targets = fm[:, None, :] + gm[None, :, :]
        cut = grid.n // 3
        self._keep = np.all(np.abs(targets) <= cut, axis=-1).reshape(-1)
        tm = targets.reshape(-1, grid.d)[self._keep] % grid.n
        self._flat = np.ravel_multi_index(tuple(tm.T), grid.shape)

    def _modes(self, mask):
        idx = np.argwhere(mask)
        return np.stack([self.grid.mode_axes[a][idx[:, a]]
                         for a in range(self.grid.d)], axis=-1).astype(np.int64)

    def apply(self, f: Field, g: Field) -> Field:
        grid = _shared_grid(f, g)
        if not grid.compatible(self.grid):
            raise ValueError("fields do not match the kernel grid")
        fv = f.coeffs[self._mask_f]
        gv = g.coeffs[self._mask_g]
        vals = (self._kernel * fv[:, None] * gv[None, :]).reshape(-1)[self._keep]
        out = np.zeros(grid.shape, dtype=complex)
        np.add.at(out.reshape(-1), self._flat, vals)
        return Field.from_coeffs(grid, out)


def trilinear_apply(b, f: Field, g: Field, h: Field, *,
                    entry_budget: int = 30_000_000) -> Field:
    """Apply the trilinear pseudoproduct T_b to three fields.

    The inner (g, h) pair frequency is truncated to the 2/3 box, then
    combined with f and truncated again, so b = 1 reproduces the
    right-associated dealiased product f*(g*h).
    """
    kern = TrilinearKernel(b, _shared_grid(f, g, h),
                           support_f=f.coeffs != 0, support_g=g.coeffs != 0,
                           support_h=h.coeffs != 0, entry_budget=entry_budget)
    return kern.apply(f, g, h)


class TrilinearKernel:
    """Cached trilinear kernel on fixed coefficient supports."""

    def __init__(self, b, grid: Grid, support_f: np.ndarray | None = None,
                 support_g: np.ndarray | None = None,
                 support_h: np.ndarray | None = None,
                 entry_budget: int = 30_000_000):
        self.grid = grid
        d, cut = grid.d, grid.n // 3
        self._mask_f = grid.dealias_mask if support_f is None else (support_f & grid.dealias_mask)
        self._mask_g = grid.dealias_mask if support_g is None else (support_g & grid.dealias_mask)
        self._mask_h = grid.dealias_mask if support_h is None else (support_h & grid.dealias_mask)
        fm = self._modes(self._mask_f)
        gm = self._modes(self._mask_g)
        hm = self._modes(self._mask_h)
        # inner pair list with the (g, h) sum confined to the box
        eta = gm[:, None, :] + hm[None, :, :]
        keep = np.all(np.abs(eta) <= cut, axis=-1)
        gi, hi = np.nonzero(keep)
        self._gi, self._hi = gi, hi
        eta = eta[keep]
        npair = eta.shape[0]
        nf = fm.shape[0]
        if nf * npair > entry_budget:
            raise ValueError("kernel tensor too large; restrict the supports")
        z1 = np.broadcast_to((fm * grid.dxi)[:, None, :], (nf, npair, d))
        z2 = np.broadcast_to((gm[gi] * grid.dxi)[None, :, :], z1.shape)
        z3 = np.broadcast_to((hm[hi] * grid.dxi)[None, :, :], z1.shape)
        self._kernel = np.asarray(b(z1, z2, z3), dtype=complex)
        targets = fm[:, None, :] + eta[None, :, :]
        self._keep = np.all(np.abs(targets) <= cut, axis=-1).reshape(-1)
        tm = targets.reshape(-1, d)[self._keep] % grid.n
        self._flat = np.ravel_multi_index(tuple(tm.T), grid.shape)

    def _modes(self, mask):
        idx = np.argwhere(mask)
        return np.stack([self.grid.mode_axes[a][idx[:, a]]
                         for a in range(self.grid.d)], axis=-1).astype(np.int64)

    def apply(self, f: Field, g: Field, h: Field) -> Field:
        grid = _shared_grid(f, g, h)
        if not grid.compatible(self.grid):
            raise ValueError("fields do not match the kernel grid")
        fv = f.coeffs[self._mask_f]
        pair = (g.coeffs[self._mask_g][self._gi]
                * h.coeffs[self._mask_h][self._hi])
        vals = (self._kernel * fv[:, None] * pair[None, :]).reshape(-1)[self._keep]
        out = np.zeros(grid.shape, dtype=complex)
        np.add.at(out.reshape(-1), self._flat, vals)
        return Field.from_coeffs(grid, out)


# ---------------------------------------------------------------------------
# multiplier bound measurement

# family -> exponent of the dyadic right-hand scale, as a function of
# (d, k1, k2[, k3], N)
BOUND_FAMILIES = {
    "semilinear_energy": lambda d, k1, k2, N: (2 * d + 3) * min(k1, k2),
    "semilinear_energy_plain": lambda d, k1, k2, N: (2 * d + 3) * min(k1, k2),
    "interaction_kernel": lambda d, k1, k2, N: k2,
    "quasilinear_energy": lambda d, k1, k2, N: (2 * d + 4) * k1 + 2 * N * k2,
    "quasilinear_energy_low_high": lambda d, k1, k2, N: k1 + (2 * N - 1) * k2,
    "resonant_kernel": lambda d, k1, k2, N: (2 * d + 3) * min(k1, k2) + k2,
    "holder": lambda d, k1, k2, N: 0,
}
TRILINEAR_FAMILY = "cubic_profile"


def _lp_norm(field: Field, p: float) -> float:
    v = np.abs(field.values)
    if np.isinf(p):
        return float(np.max(v))
    return float((np.sum(v ** p) * field.grid.quad_weight) ** (1.0 / p))


def _holder_ok(p, qs):
    lhs = 0.0 if np.isinf(p) else 1.0 / p
    rhs = sum(0.0 if np.isinf(q) else 1.0 / q for q in qs)
    return abs(lhs - rhs) < 1e-12


def multiplier_bound_measure(family: str, symbol, grid: Grid, k1: int, k2: int,
                             k3: int | None = None, *, p=2.0, q=2.0,
                             r=float("inf"), q3=None, N: int = 0,
                             trials: int = 6, rng=None) -> dict:
    """Measure the operator constant of a kernel family on dyadic bands.

    Randomized band-localized inputs; returns the max over trials of
    the output norm divided by the family's dyadic right-hand scale
    times the input norms.  Preconditions: the exponent relation
    1/p = 1/q + 1/r (+ 1/q3 for the trilinear family), and
    k1 <= k2 - 6 for the low-high quasilinear family.
    """
    from .data import make_rng, random_band_field
    from .spectral import lp_project

    if rng is None:
        rng = make_rng(0)
    trilinear = family == TRILINEAR_FAMILY
    if trilinear:
        if k3 is None or q3 is None:
            raise ValueError("trilinear family needs k3 and q3")
        if not _holder_ok(p, (q, r, q3)):
            raise ValueError("exponents must satisfy 1/p = 1/q + 1/r + 1/q3")
        scale = 2.0 ** (3 * max(k1, k2, k3) + 2 * (k1 + k2 + k3))
    else:
        if family not in BOUND_FAMILIES:
            raise ValueError(f"unknown bound family {family!r}")
        if not _holder_ok(p, (q, r)):
            raise ValueError("exponents must satisfy 1/p = 1/q + 1/r")
        if family == "quasilinear_energy_low_high" and k1 > k2 - 6:
            raise ValueError("low-high family requires k1 <= k2 - 6")
        scale = 2.0 ** BOUND_FAMILIES[family](grid.d, k1, k2, N)

    ratios = []
    for _ in range(trials):
        if family == "holder":
            f1 = random_band_field(grid, rng, real=False, band_fraction=1 / 6)
            f2 = random_band_field(grid, rng, real=False, band_fraction=1 / 6)
        else:
            f1 = lp_project(random_band_field(grid, rng, real=False), k1)
            f2 = lp_project(random_band_field(grid, rng, real=False), k2)
        if trilinear:
            f3 = lp_project(random_band_field(grid, rng, real=False), k3)
            outf = trilinear_apply(symbol, f1, f2, f3)
            denom = (scale * _lp_norm(f1, q) * _lp_norm(f2, r)
                     * _lp_norm(f3, q3))
        else:
            outf = bilinear_apply(symbol, f1, f2)
            denom = scale * _lp_norm(f1, q) * _lp_norm(f2, r)
        if denom == 0:
            continue
        ratios.append(_lp_norm(outf, p) / denom)

    return {
        "family": family, "tag": getattr(symbol, "tag", "?"),
        "d": grid.d, "k1": k1, "k2": k2, "k3": k3,
        "p": p, "q": q, "r": r, "q3": q3, "N": N,
        "trials": len(ratios), "rhs_scale": scale,
        "constant": max(ratios) if ratios else 0.0,
        "ratios": ratios,
    }
