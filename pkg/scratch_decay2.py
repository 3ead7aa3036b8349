"""Scratch 2: tune 1D decay band/window and 1D Strichartz envelope."""
import numpy as np
from kglab import make_grid, lp_interval, semigroup, gaussian_bump, make_rng, envelope_field

def fit_loglog(ts, vals):
    x = np.log(np.asarray(ts)); y = np.log(np.asarray(vals))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    ss = 1 - np.sum((y-yhat)**2)/np.sum((y-y.mean())**2)
    return coef[0], ss

# 1D dispersive decay: low bands, longer window
for (n, Lf, klo, khi, t1, t2) in [
    (2048, 256, -1, 0, 2, 16), (2048, 256, -1, 0, 4, 48),
    (2048, 256, 0, 1, 4, 48), (4096, 512, -1, 0, 4, 64),
    (2048, 256, -1, 1, 4, 48),
]:
    g = make_grid(1, n, Lf*np.pi)
    f = lp_interval(gaussian_bump(g, sigma=1.0), klo, khi)
    ts = np.geomspace(t1, t2, 11)
    sups = [semigroup(f, t).sup() for t in ts]
    sl, r2 = fit_loglog(ts, sups)
    print(f'1D decay n={n} L={Lf}pi band[{klo},{khi}] t[{t1},{t2}]: slope={sl:.4f} R2={r2:.4f}')

# 1D Strichartz: envelope scan, low band
for tau in (0.25, 0.4, 0.5, 0.75):
    g = make_grid(1, 2048, 256*np.pi)
    dat = envelope_field(g, make_rng(99), decay=tau, k_lo=-1, k_hi=0, core=2.0)
    dat = dat * (1.0/dat.l2())
    T = g.L/4
    ss = np.geomspace(1.0, T, 64)
    sups = np.array([semigroup(dat, s).sup() for s in ss])
    sls, _ = fit_loglog(ss, sups)
    acc = np.concatenate([[0], np.cumsum(0.5*(sups[1:]**2+sups[:-1]**2)*np.diff(ss))])
    m = ss >= 2.0
    expo, r2 = fit_loglog(ss[m], acc[m])
    print(f'1D strich tau={tau}: slice-slope={sls:.3f} accum-expo={expo:.4f} R2={r2:.4f}')
