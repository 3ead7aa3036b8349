"""Scratch: tune dispersive decay + Strichartz growth experiments."""
import numpy as np
from kglab import make_grid, Field, lp_interval, semigroup, gaussian_bump, make_rng, envelope_field
import time

def fit_loglog(ts, vals):
    x = np.log(np.asarray(ts)); y = np.log(np.asarray(vals))
    A = np.vstack([x, np.ones_like(x)]).T
    coef, res, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    ss = 1 - np.sum((y - yhat)**2) / np.sum((y - y.mean())**2)
    return coef[0], ss

def fit_lin(x, y):
    A = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    yhat = A @ coef
    ss = 1 - np.sum((y - yhat)**2) / np.sum((y - y.mean())**2)
    return coef[0], ss

# --- criterion 3: 2D dispersive decay, pinned params ---
t0 = time.time()
g = make_grid(2, 256, 64*np.pi)
print('2D grid: nyquist', g.nyquist, 'k_max', g.k_max, 'k_top', g.k_top)
f = gaussian_bump(g, sigma=1.0)
fb = lp_interval(f, 0, 3)
print('datum L2:', fb.l2(), 'sup:', fb.sup())
ts = np.geomspace(2, 16, 9)
sups = [semigroup(fb, t).sup() for t in ts]
sl, r2 = fit_loglog(ts, sups)
print('2D decay exponent: %.4f (want -1 +-0.15), R2=%.5f, time %.1fs' % (sl, r2, time.time()-t0))

# --- d=1 analogue ---
g1 = make_grid(1, 1024, 128*np.pi)
f1 = lp_interval(gaussian_bump(g1, sigma=1.0), 0, 3)
ts1 = np.geomspace(2, 16, 9)
sups1 = [semigroup(f1, t).sup() for t in ts1]
sl1, r21 = fit_loglog(ts1, sups1)
print('1D decay exponent: %.4f (want -0.5 +-0.15), R2=%.5f' % (sl1, r21))

# --- criterion 4: Strichartz growth ---
# 2D: envelope <x>^{-3/2}, accumulated L2_t Linf^2 vs ln t affine
t0 = time.time()
rng = make_rng(1234)
g2 = make_grid(2, 256, 64*np.pi)
dat = envelope_field(g2, rng, decay=1.5, k_lo=0, k_hi=2, core=2.0)
dat = dat * (1.0/dat.l2())
T = g2.L/4
print('T_box:', T)
ss = np.geomspace(1.0, T, 48)
sups = np.array([semigroup(dat, s).sup() for s in ss])
# per-slice decay check
sl_slice, _ = fit_loglog(ss, sups)
print('2D envelope per-slice sup exponent: %.3f (want ~ -0.5)' % sl_slice)
# accumulated square via trapezoid on subwindows
acc = np.concatenate([[0], np.cumsum(0.5*(sups[1:]**2 + sups[:-1]**2)*np.diff(ss))])
mask = ss >= 2.0
slope, r2a = fit_lin(np.log(ss[mask]), acc[mask])
print('2D accumulated^2 vs ln t: slope=%.4g R2=%.5f, time %.1fs' % (slope, r2a, time.time()-t0))

# 1D: envelope <x>^{-3/4}, accumulated square ~ t^{1/2}
g3 = make_grid(1, 4096, 256*np.pi)
dat1 = envelope_field(g3, make_rng(99), decay=0.75, k_lo=0, k_hi=3, core=2.0)
dat1 = dat1 * (1.0/dat1.l2())
T1 = g3.L/4
ss1 = np.geomspace(1.0, T1, 64)
sups1 = np.array([semigroup(dat1, s).sup() for s in ss1])
sl1s, _ = fit_loglog(ss1, sups1)
print('1D envelope per-slice sup exponent: %.3f (want ~ -0.25)' % sl1s)
acc1 = np.concatenate([[0], np.cumsum(0.5*(sups1[1:]**2 + sups1[:-1]**2)*np.diff(ss1))])
m1 = ss1 >= 2.0
expo, r2b = fit_loglog(ss1[m1], acc1[m1])
print('1D accumulated^2 t-exponent: %.4f (want 0.5 +- 0.15), R2=%.5f' % (expo, r2b))
