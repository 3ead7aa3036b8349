"""Scratch 3: 1D Strichartz fit window choice."""
import numpy as np
from kglab import make_grid, semigroup, make_rng, envelope_field

def fit_loglog(ts, vals):
    x = np.log(np.asarray(ts)); y = np.log(np.asarray(vals))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    ss = 1 - np.sum((y-yhat)**2)/np.sum((y-y.mean())**2)
    return coef[0], ss

for (n, Lf, tau, klo, khi, tfit) in [
    (2048, 256, 0.75, -1, 0, 6), (2048, 256, 0.75, -1, 0, 10),
    (4096, 512, 0.75, -1, 0, 10), (4096, 512, 0.75, -1, 0, 16),
    (4096, 512, 0.6, -1, 0, 10),
]:
    g = make_grid(1, n, Lf*np.pi)
    dat = envelope_field(g, make_rng(99), decay=tau, k_lo=klo, k_hi=khi, core=2.0)
    dat = dat * (1.0/dat.l2())
    T = g.L/4
    ss = np.geomspace(1.0, T, 80)
    sups = np.array([semigroup(dat, s).sup() for s in ss])
    acc = np.concatenate([[0], np.cumsum(0.5*(sups[1:]**2+sups[:-1]**2)*np.diff(ss))])
    m = ss >= tfit
    expo, r2 = fit_loglog(ss[m], acc[m])
    # seed robustness
    expos = []
    for seed in (7, 21, 42):
        d2 = envelope_field(g, make_rng(seed), decay=tau, k_lo=klo, k_hi=khi, core=2.0)
        d2 = d2 * (1.0/d2.l2())
        s2 = np.array([semigroup(d2, s).sup() for s in ss])
        a2 = np.concatenate([[0], np.cumsum(0.5*(s2[1:]**2+s2[:-1]**2)*np.diff(ss))])
        e2, _ = fit_loglog(ss[m], a2[m])
        expos.append(e2)
    print(f'n={n} L={Lf}pi tau={tau} fit[{tfit},{T:.0f}]: expo={expo:.4f} R2={r2:.4f} seeds={np.round(expos,3)}')
