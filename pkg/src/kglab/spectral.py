"""Dyadic projectors, Klein-Gordon multipliers, and spectral calculus.

Frequency-side operators act on the Fourier coefficients directly.
Conventions:

* Band projectors P_k multiply by psi_band(k, |xi|) and zero the
  Nyquist rows (those modes have no mirror partner, so they are
  excluded from every band).
* lambda_power and semigroup are even pure multipliers and keep the
  Nyquist rows; derivative has an odd symbol and zeroes them.
* Every pointwise product in the package goes through
  :func:`dealiased_product` (2/3 rule).
"""

from __future__ import annotations

import numpy as np

from .cutoffs import psi_band, psi_le, psi_range
from .grid import Field, Grid

__all__ = [
    "lp_project",
    "lp_low",
    "lp_interval",
    "q_shell",
    "lambda_power",
    "lambda_mag",
    "semigroup",
    "derivative",
    "laplacian",
    "dealias",
    "dealiased_product",
    "bernstein_ratio",
]


def _band_multiplier(grid: Grid, weights: np.ndarray) -> np.ndarray:
    out = np.array(weights, dtype=float)
    out[grid.nyquist_mask] = 0.0
    return out


def lp_project(f: Field, k: int) -> Field:
    """Littlewood-Paley piece P_k f (band index k >= -1)."""
    w = _band_multiplier(f.grid, psi_band(k, f.grid.xi_mags))
    return Field.from_coeffs(f.grid, f.coeffs * w)


def lp_low(f: Field, k: int) -> Field:
    """Low-frequency cut P_{<=k} f."""
    w = _band_multiplier(f.grid, psi_le(k, f.grid.xi_mags))
    return Field.from_coeffs(f.grid, f.coeffs * w)


def lp_interval(f: Field, k_lo: int, k_hi: int) -> Field:
    """P_I f for the integer band interval I = [k_lo, k_hi]."""
    w = _band_multiplier(f.grid, psi_range(k_lo, k_hi, f.grid.xi_mags))
    return Field.from_coeffs(f.grid, f.coeffs * w)


def q_shell(f: Field, j: int) -> Field:
    """Physical dyadic localization Q_j f = psi_band(j, |x|) * f.

    A smooth multiplication, not a projector: Q_j Q_j != Q_j.
    """
    w = psi_band(j, f.grid.x_mags)
    return Field.from_values(f.grid, f.values * w)


def lambda_mag(grid: Grid) -> np.ndarray:
    """<xi> = sqrt(1 + |xi|^2) on the frequency lattice."""
    return np.sqrt(1.0 + grid.xi_mags**2)


def lambda_power(f: Field, s: float) -> Field:
    """(1 - Laplacian)^(s/2) as the <xi>^s multiplier (even, keeps Nyquist)."""
    return Field.from_coeffs(f.grid, f.coeffs * lambda_mag(f.grid) ** s)


def semigroup(f: Field, t: float, sign: int = +1) -> Field:
    """Half Klein-Gordon flow e^{i sign t <D>} f; unitary on L2."""
    if sign not in (+1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    phase = np.exp(1j * sign * t * lambda_mag(f.grid))
    return Field.from_coeffs(f.grid, f.coeffs * phase)


def derivative(f: Field, axis: int, order: int = 1) -> Field:
    """Spectral partial derivative along one axis (odd symbol: Nyquist zeroed)."""
    grid = f.grid
    if not 0 <= axis < grid.d:
        raise ValueError(f"axis {axis} out of range for d={grid.d}")
    modes = grid.mode_axes[axis].astype(float)
    if order % 2 == 1:
        modes = np.where(np.abs(grid.mode_axes[axis]) == grid.n // 2, 0.0, modes)
    shape = [1] * grid.d
    shape[axis] = grid.n
    sym = (1j * grid.dxi * modes.reshape(shape)) ** order
    return Field.from_coeffs(grid, f.coeffs * sym)


def laplacian(f: Field) -> Field:
    return Field.from_coeffs(f.grid, f.coeffs * (-(f.grid.xi_mags**2)))


def dealias(f: Field) -> Field:
    """Truncate to the 2/3 box (also removes Nyquist rows)."""
    return Field.from_coeffs(f.grid, np.where(f.grid.dealias_mask, f.coeffs, 0.0))


def dealiased_product(f: Field, g: Field) -> Field:
    """Pointwise product with the 2/3 rule on inputs and output.

    Inputs are truncated to the 2/3 box, multiplied in physical space,
    and the result is truncated again, so quadratic aliasing images
    never land on retained modes.
    """
    if not f.grid.compatible(g.grid):
        raise ValueError("fields live on different grids")
    fv = dealias(f).values
    gv = dealias(g).values
    return dealias(Field.from_values(f.grid, fv * gv))


def bernstein_ratio(f: Field, k: int) -> float:
    """Measured sup-norm Bernstein constant ||P_k f||_inf / (2^{kd/2} ||P_k f||_2).

    Reported, never asserted against a theoretical value; stability
    across random fields is the testable property.
    """
    pk = lp_project(f, k)
    denom = 2.0 ** (k * f.grid.d / 2.0) * pk.l2()
    if denom == 0.0:
        raise ValueError(f"P_{k} f vanishes; ratio undefined")
    return pk.sup() / denom
