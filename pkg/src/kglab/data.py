"""Deterministic random fields and initial data families.

All randomness flows through :func:`make_rng` (counter-based Philox,
so a seed pins every draw independent of call order across platforms).
Generated fields are 2/3-band-limited and Nyquist-free by
construction, matching what every downstream operator preserves.
"""

from __future__ import annotations

import numpy as np

from .grid import Field, Grid
from .spectral import dealias, lambda_power, lp_interval

__all__ = [
    "make_rng",
    "random_band_field",
    "gaussian_bump",
    "envelope_field",
    "normalized_pair",
]


def make_rng(seed: int) -> np.random.Generator:
    """Philox (counter-based) generator with a fixed integer seed."""
    return np.random.Generator(np.random.Philox(seed))


def random_band_field(
    grid: Grid,
    rng: np.random.Generator,
    k_lo: int = -1,
    k_hi: int | None = None,
    real: bool = True,
    band_fraction: float | None = None,
) -> Field:
    """Gaussian random field band-limited to dyadic bands [k_lo, k_hi].

    ``band_fraction`` instead keeps modes with |m| <= band_fraction *
    n/2 per axis (useful when products must stay alias-free).  Real
    fields get Hermitian-symmetrized coefficients.
    """
    shape = grid.shape
    coeffs = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    f = Field.from_coeffs(grid, coeffs)
    if real:
        f = Field.from_values(grid, f.values.real)
    if band_fraction is not None:
        keep = np.ones(shape, dtype=bool)
        cut = band_fraction * grid.n / 2.0
        for axis, modes in enumerate(grid.mode_axes):
            sh = [1] * grid.d
            sh[axis] = grid.n
            keep &= np.abs(modes.reshape(sh)) <= cut
        f = Field.from_coeffs(grid, np.where(keep, f.coeffs, 0.0))
    else:
        k_hi = grid.k_top if k_hi is None else k_hi
        f = lp_interval(f, k_lo, k_hi)
    return dealias(f)


def gaussian_bump(grid: Grid, sigma: float, amplitude: float = 1.0) -> Field:
    """Centered Gaussian exp(-|x|^2 / (2 sigma^2)), dealiased."""
    vals = amplitude * np.exp(-(grid.x_mags**2) / (2.0 * sigma**2))
    return dealias(Field.from_values(grid, vals))


def envelope_field(
    grid: Grid,
    rng: np.random.Generator,
    decay: float,
    k_lo: int = 0,
    k_hi: int | None = None,
    core: float = 1.0,
) -> Field:
    """Band-limited random field shaped by a <x/core>^(-decay) envelope.

    The slow envelope models weakly decaying data: L2 mass spread over
    every spatial dyadic shell with prescribed power-law weight.
    """
    f = random_band_field(grid, rng, k_lo=k_lo, k_hi=k_hi, real=True)
    env = (1.0 + (grid.x_mags / core) ** 2) ** (-decay / 2.0)
    return dealias(Field.from_values(grid, f.values * env))


def normalized_pair(
    grid: Grid,
    u0: Field,
    u1: Field,
    eps: float,
    smoothness: int,
) -> tuple[Field, Field]:
    """Scale (u0, u1) so ||u0||_{H^{N+1}} + ||u1||_{H^N} = eps, N = smoothness.

    The shared scale factor keeps the shape of the pair; sweeps over
    eps therefore measure pure amplitude scaling.
    """
    size = lambda_power(u0, smoothness + 1).l2() + lambda_power(u1, smoothness).l2()
    if size == 0.0:
        raise ValueError("cannot normalize a zero data pair")
    scale = eps / size
    return u0 * scale, u1 * scale
