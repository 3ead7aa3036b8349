"""Independent brute-force oracles.

Every nontrivial operator in the package has a second, slower
implementation here that follows the defining sum or integral
literally: explicit loops over output modes, explicit mode arithmetic,
no rolls, no convolution shortcuts, no shared code with the fast
paths.  Tests and the acceptance suite compare the two routes.

Guards are generous for correctness, not speed; keep oracle grids at
n^d <= a few hundred modes.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import quad

from .cutoffs import psi_le, psi_range
from .grid import Field, Grid
from .paradiff import PARA_CUT_BAND, Symbol

__all__ = [
    "weyl_oracle",
    "bilinear_oracle",
    "trilinear_oracle",
    "fd_gradient_oracle",
    "kernel_point_oracle",
]


def _mode_table(grid: Grid) -> np.ndarray:
    return grid.mode_tuples()  # (npts, d) integers, fft order


def weyl_oracle(a: Symbol, f: Field) -> Field:
    """T_a f as the literal double sum over (xi, eta) lattice pairs."""
    grid = f.grid
    modes = _mode_table(grid)
    npts = grid.npoints
    dxi = grid.dxi
    nyq = grid.nyquist_mask.ravel()
    fin = f.coeffs.reshape(-1).copy()
    fin[nyq] = 0.0
    bparts = [t.xpart.coeffs.reshape(-1) for t in a.terms]
    out = np.zeros(npts, dtype=complex)

    for i in range(npts):
        if nyq[i]:
            continue
        xi = modes[i]
        total = 0.0 + 0.0j
        for j in range(npts):
            if nyq[j] or fin[j] == 0.0:
                continue
            eta = modes[j]
            diff = xi - eta
            if np.any(np.abs(diff) > grid.n // 2 - 1):
                continue  # no wraparound: difference left the box
            dmag = dxi * float(np.sqrt(np.dot(diff, diff)))
            smag = dxi * float(np.sqrt(np.dot(xi + eta, xi + eta)))
            if dmag == 0.0:
                w = 1.0
            elif smag == 0.0:
                continue
            else:
                w = float(psi_le(PARA_CUT_BAND, dmag / smag))
                if w == 0.0:
                    continue
            zmid = 0.5 * dxi * (xi + eta).astype(float)
            val = 0.0 + 0.0j
            for term, bp in zip(a.terms, bparts):
                idx = int(np.ravel_multi_index(tuple(diff % grid.n), grid.shape))
                if bp[idx] == 0.0:
                    continue
                if np.dot(zmid, zmid) == 0.0:
                    g = 0.0 if term.zeta0 is None else complex(term.zeta0)
                else:
                    g = complex(term.zeta_fn(zmid[None, :])[0])
                val += bp[idx] * g
            total += w * val * fin[j]
        out[i] = total
    return Field.from_coeffs(grid, out.reshape(grid.shape))


def bilinear_oracle(m_fn, f: Field, g: Field) -> Field:
    """B_m(f, g) as the literal sum out(xi) = sum_eta m(xi-eta, eta) f^ g^.

    ``m_fn(z1, z2)`` takes frequency-vector arrays of shape (..., d).
    Inputs are 2/3-truncated and the output is 2/3-truncated, matching
    the product normalization (m = 1 gives the dealiased product).
    """
    grid = f.grid
    modes = _mode_table(grid)
    npts = grid.npoints
    deal = grid.dealias_mask.ravel()
    fc = np.where(deal, f.coeffs.reshape(-1), 0.0)
    gc = np.where(deal, g.coeffs.reshape(-1), 0.0)
    out = np.zeros(npts, dtype=complex)
    dxi = grid.dxi

    active = np.nonzero(gc)[0]
    for i in range(npts):
        if not deal[i]:
            continue
        xi = modes[i]
        total = 0.0 + 0.0j
        for j in active:
            eta = modes[j]
            diff = xi - eta
            if np.any(np.abs(diff) > grid.n // 3):
                continue  # first factor must also sit in the 2/3 box
            idx = int(np.ravel_multi_index(tuple(diff % grid.n), grid.shape))
            if fc[idx] == 0.0:
                continue
            mval = complex(m_fn(dxi * diff.astype(float)[None, :], dxi * eta.astype(float)[None, :])[0])
            total += mval * fc[idx] * gc[j]
        out[i] = total
    return Field.from_coeffs(grid, out.reshape(grid.shape))


def trilinear_oracle(b_fn, f: Field, g: Field, h: Field) -> Field:
    """T_b(f, g, h): literal double frequency sum with the inner (g, h)
    pair frequency kept inside the 2/3 box (right-associated products).
    """
    grid = f.grid
    modes = _mode_table(grid)
    deal = grid.dealias_mask.ravel()
    fc = np.where(deal, f.coeffs.reshape(-1), 0.0)
    gc = np.where(deal, g.coeffs.reshape(-1), 0.0)
    hc = np.where(deal, h.coeffs.reshape(-1), 0.0)
    out = np.zeros(grid.npoints, dtype=complex)
    dxi = grid.dxi
    cut = grid.n // 3

    f_active = np.nonzero(fc)[0]
    g_active = np.nonzero(gc)[0]
    h_active = np.nonzero(hc)[0]
    for jf in f_active:
        t1 = modes[jf]
        for jg in g_active:
            t2 = modes[jg]
            for jh in h_active:
                t3 = modes[jh]
                inner = t2 + t3
                if np.any(np.abs(inner) > cut):
                    continue  # intermediate (g h) frequency dealiased
                total_mode = t1 + inner
                if np.any(np.abs(total_mode) > cut):
                    continue
                bval = complex(
                    b_fn(
                        dxi * t1.astype(float)[None, :],
                        dxi * t2.astype(float)[None, :],
                        dxi * t3.astype(float)[None, :],
                    )[0]
                )
                idx = int(np.ravel_multi_index(tuple(total_mode % grid.n), grid.shape))
                out[idx] += bval * fc[jf] * gc[jg] * hc[jh]
    return Field.from_coeffs(grid, out.reshape(grid.shape))


def fd_gradient_oracle(f: Field, axis: int) -> Field:
    """Fourth-order centered finite-difference first derivative."""
    v = f.values
    h = f.grid.dx
    out = (
        -np.roll(v, -2, axis) + 8 * np.roll(v, -1, axis)
        - 8 * np.roll(v, 1, axis) + np.roll(v, 2, axis)
    ) / (12.0 * h)
    return Field.from_values(f.grid, out)


def kernel_point_oracle(
    k: int,
    t: float,
    x: np.ndarray,
    fhat,
    d: int,
    sign: int = +1,
    gl_nodes: int = 1200,
) -> complex:
    """Continuum propagator value (2 pi)^{-d} int e^{i(x.xi + sign t <xi>)}
    psi_range(k-1, k+1, |xi|) fhat(xi) dxi at a single point x.

    d = 1 uses adaptive quadrature; d = 2 a tensor Gauss-Legendre rule
    over the band's bounding square (the integrand is smooth and
    compactly supported, nodes sized to the phase gradient).
    """
    R = 1.6 * 2.0 ** (k + 1)

    if d == 1:
        def re_part(xi):
            amp = psi_range(k - 1, k + 1, abs(xi)) * fhat(np.array([xi]))
            return (np.exp(1j * (x[0] * xi + sign * t * np.sqrt(1 + xi**2))) * amp).real

        def im_part(xi):
            amp = psi_range(k - 1, k + 1, abs(xi)) * fhat(np.array([xi]))
            return (np.exp(1j * (x[0] * xi + sign * t * np.sqrt(1 + xi**2))) * amp).imag

        rr = quad(re_part, -R, R, limit=400, epsabs=1e-12, epsrel=1e-10)[0]
        ii = quad(im_part, -R, R, limit=400, epsabs=1e-12, epsrel=1e-10)[0]
        return (rr + 1j * ii) / (2 * np.pi)

    if d == 2:
        nodes, weights = np.polynomial.legendre.leggauss(gl_nodes)
        xi1 = R * nodes
        w1 = R * weights
        X1, X2 = np.meshgrid(xi1, xi1, indexing="ij")
        W = np.outer(w1, w1)
        mag = np.sqrt(X1**2 + X2**2)
        amp = psi_range(k - 1, k + 1, mag) * fhat(np.stack([X1, X2], axis=-1))
        phase = np.exp(1j * (x[0] * X1 + x[1] * X2 + sign * t * np.sqrt(1 + mag**2)))
        return complex(np.sum(W * amp * phase)) / (2 * np.pi) ** 2

    raise ValueError("kernel oracle implemented for d = 1, 2")
