import numpy as np

from kglab.grid import make_grid, Field
from kglab.data import make_rng, random_band_field
from kglab.nonlinearity import default_spec, zero_spec
from kglab.norms import loglog_fit, sobolev
from kglab.dynamics import (
    KGState, step, cfl_limit, rhs, run_to_time, good_unknown,
    good_unknown_field, reduced_rhs, reduced_equation_residual, q_symbol,
    q_sup_bound, nonlinearity_value,
)
from kglab.spectral import lambda_mag

d, n, L = 1, 64, 8 * np.pi
grid = make_grid(d, n, L)
spec = default_spec(d)
rng = make_rng(11)


def small_state(eps, seed=11):
    r = make_rng(seed)
    u0 = random_band_field(grid, r, k_lo=-1, k_hi=0)
    w0 = random_band_field(grid, r, k_lo=-1, k_hi=0)
    return KGState(grid, 1.0, u0 * (eps / u0.sup()), w0 * (eps / w0.sup()))


# 1. rhs against 4th-order finite differences
state = small_state(0.1)
_, dw = rhs(state, spec)


def fd_deriv(vals, axis, dx):
    return (
        -np.roll(vals, -2, axis) + 8 * np.roll(vals, -1, axis)
        - 8 * np.roll(vals, 1, axis) + np.roll(vals, 2, axis)
    ) / (12 * dx)


uv, wv = state.u.values.real, state.w.values.real
ux = fd_deriv(uv, 0, grid.dx)
uxx = fd_deriv(ux, 0, grid.dx)
wx = fd_deriv(wv, 0, grid.dx)
F_fd = 2 * uv * wx + uv * uxx + uv**2 + wv**2
dw_fd = uxx - uv + F_fd
err = np.max(np.abs(dw.values.real - dw_fd)) / np.max(np.abs(dw.values.real))
print(f"1. rhs vs FD4: rel sup {err:.3e} (FD truncation limited)")

# 2. one-step error vs exact linear mode, halving ladder
lin = zero_spec(d)
xi1 = grid.dxi * 3
lam1 = np.sqrt(1 + xi1**2)
x = grid.x_components()[0]
u0 = Field.from_values(grid, np.cos(xi1 * x))
w0 = Field.zero(grid)
errs = []
for dt in (0.1, 0.05, 0.025):
    s1 = step(KGState(grid, 1.0, u0, w0), lin, dt)
    exact = Field.from_values(grid, np.cos(xi1 * x) * np.cos(lam1 * dt))
    errs.append((s1.u - exact).l2())
print(f"2. linear one-step errors {[f'{e:.3e}' for e in errs]} "
      f"ratios {[f'{errs[i]/errs[i+1]:.1f}' for i in range(2)]} (expect ~32)")

# 3. linear energy conservation, theta <= 0.034
xim = float(grid.xi_mags.max())
dt = 0.034 / np.sqrt(1 + xim**2)
s = small_state(0.2)
e0 = s.half_wave().l2()
for _ in range(1000):
    s = step(s, lin, dt)
drift = abs(s.half_wave().l2() - e0) / e0
print(f"3. linear energy drift over 1000 steps: {drift:.3e} (<= 1e-8)")

# 4. reality preservation with the quadratic spec
s = small_state(0.2)
for _ in range(100):
    s = step(s, spec, 0.05)
imag = max(np.max(np.abs(s.u.values.imag)), np.max(np.abs(s.w.values.imag)))
print(f"4. imaginary contamination after 100 steps: {imag:.3e} (<= 1e-10)")

# 5. good unknown: zero-spec exactness and eps-squared scaling
s = small_state(0.1)
ucal, qb = good_unknown_field(s, lin)
print(f"5a. zero spec: |Ucal - U| = {(ucal - s.half_wave()).l2():.3e}, q bound {qb}")
eps_list = np.geomspace(0.05, 0.4, 5)
diffs, qbs = [], []
for eps in eps_list:
    rep = good_unknown(small_state(eps), spec, N=8)
    diffs.append(rep.diff_norm)
    qbs.append(rep.q_bound)
fit = loglog_fit(eps_list, diffs)
print(f"5b. |Ucal-U|_H8 eps-exponent: {fit.slope:.3f} (expect 2 +- 0.1); "
      f"q bounds {[f'{q:.3f}' for q in qbs]}")

# 6. reduced-equation residual
# 6a. linear spec: residual is the time-differencing error alone
s0 = small_state(0.2)
dt = 0.02
s2 = step(step(s0, lin, dt), lin, dt)
res_lin = reduced_equation_residual(s0, s2, lin)
print(f"6a. linear residual: {res_lin:.3e}")

# 6b. with the quartic tail included the identity is exact: dt^2 only
eps = 0.3
base = small_state(eps)
print("6b. dt ladder, tail included (expect ratio ~4):")
prev_r = None
for dt in (0.08, 0.04, 0.02, 0.01):
    s2 = step(step(base, spec, dt), spec, dt)
    r = reduced_equation_residual(base, s2, spec, include_truncation_tail=True)
    line = f"    dt={dt:<6g} residual={r:.6e}"
    if prev_r is not None:
        line += f" ratio={prev_r / r:.2f}"
    prev_r = r
    print(line)

# 6c. without the tail the floor is the quartic Taylor error
print("6c. dt ladder, tail omitted (expect stall at the floor):")
for dt in (0.08, 0.04, 0.02, 0.01, 0.005):
    s2 = step(step(base, spec, dt), spec, dt)
    r = reduced_equation_residual(base, s2, spec)
    print(f"    dt={dt:<6g} residual={r:.6e}")
mid = KGState(grid, base.t, base.u, base.w)
tail = reduced_rhs(mid, spec, include_truncation_tail=True)["tail"].l2()
print(f"    direct tail size at eps={eps}: {tail:.6e}")

# 6d. floor eps-scaling (direct tail evaluation)
tails = []
for eps in eps_list:
    st = small_state(eps)
    tails.append(reduced_rhs(st, spec, include_truncation_tail=True)["tail"].l2())
fit = loglog_fit(eps_list, tails)
print(f"6d. tail eps-exponent: {fit.slope:.3f} (expect >= 3.5, ~4)")

# 7. run_to_time on the linear spec
rr = run_to_time(small_state(0.2), lin, 4.0, checkpoints=9)
key = [k for k in rr.rows[0] if k.startswith("sobolev")][0]
vals = [row[key] for row in rr.rows]
print(f"7. linear run verdict={rr.verdict}, norm spread "
      f"{(max(vals) - min(vals)) / vals[0]:.3e}")
