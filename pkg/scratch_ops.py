"""Smoke checks: paradiff/oracles/resonance mutual agreement."""
import numpy as np

from kglab.grid import make_grid, Field
from kglab.data import make_rng, random_band_field
from kglab.spectral import dealiased_product, lp_project, lp_low
from kglab import paradiff as pd
from kglab import oracles as orc
from kglab import resonance as rs
from kglab.nonlinearity import default_spec


def rel(a, b):
    den = max(np.max(np.abs(b.coeffs)), 1e-300)
    return np.max(np.abs(a.coeffs - b.coeffs)) / den


def report(name, val, tol):
    flag = "OK " if val <= tol else "FAIL"
    print(f"{flag} {name}: {val:.3e} (tol {tol:g})")


rng = make_rng(12345)

# --- 1. identity symbol ---
g1 = make_grid(1, 16, 4.0)
f = random_band_field(g1, rng, real=False)
one = pd.Symbol.one(g1)
report("T_1 = Id (1d n=16)", rel(pd.weyl_apply(one, f), f), 1e-14)

# --- 2. three-route agreement, separable symbol ---
for (d, n, L) in [(1, 16, 4.0), (2, 8, 3.0)]:
    g = make_grid(d, n, L)
    xp = random_band_field(g, rng, real=True)
    a = pd.Symbol.separable(xp, lambda z: 1.0 / (1.0 + np.sum(z * z, -1)), 1.0, "test")
    ff = random_band_field(g, rng, real=False)
    fast = pd.weyl_apply(a, ff)
    slow = orc.weyl_oracle(a, ff)
    M = pd.weyl_matrix(a)
    mat = pd.apply_matrix(M, ff)
    report(f"weyl fast vs oracle (d={d} n={n})", rel(fast, slow), 1e-12)
    report(f"weyl fast vs matrix (d={d} n={n})", rel(fast, mat), 1e-12)

# --- 2b. nontrivial theta band (1d n=1024) ---
g = make_grid(1, 1024, 4.0)
xp = random_band_field(g, rng, real=True, k_lo=-1, k_hi=4)
a = pd.Symbol.separable(xp, lambda z: np.exp(-0.01 * np.sum(z * z, -1)), 1.0, "wide")
ff = random_band_field(g, rng, real=False, k_lo=6, k_hi=7)
fast = pd.weyl_apply(a, ff)
slow = orc.weyl_oracle(a, ff)
report("weyl fast vs oracle (1d n=1024, banded)", rel(fast, slow), 1e-12)
nz = int(np.sum(np.abs(fast.coeffs) > 1e-14))
print(f"     output support {nz} modes (input {int(np.sum(np.abs(ff.coeffs) > 0))})")

# --- 3. multiplier exactness ---
g = make_grid(2, 8, 3.0)
mult = pd.Symbol.multiplier(g, lambda z: 1.0 / (1.0 + np.sum(z * z, -1)), 1.0, "mult")
ff = random_band_field(g, rng, real=False)
out = pd.weyl_apply(mult, ff)
xi2 = sum(c ** 2 for c in g.xi_components())
expect = ff.coeffs / (1.0 + xi2)
err = np.max(np.abs(out.coeffs - np.where(g.nyquist_mask, 0.0, expect)))
report("multiplier diagonal exact", err / np.max(np.abs(ff.coeffs)), 1e-14)

# --- 4. Hermitian ---
g = make_grid(1, 32, 4.0)
xp = random_band_field(g, rng, real=True)
a = pd.Symbol.separable(xp, lambda z: 1.0 / (1.0 + np.sum(z * z, -1)), 1.0, "herm")
M = pd.weyl_matrix(a)
report("Hermitian defect (real symbol)", np.max(np.abs(M - M.conj().T)) / np.max(np.abs(M)), 1e-12)

# --- 5. E(a, 1) = E(1, a) = 0 ---
ff = random_band_field(g, rng, real=False)
e1 = pd.error_op([a, pd.Symbol.one(g)], ff)
e2 = pd.error_op([pd.Symbol.one(g), a], ff)
den = max(np.max(np.abs(pd.weyl_apply(a, ff).coeffs)), 1e-300)
report("E(a,1) = 0", np.max(np.abs(e1.coeffs)) / den, 1e-13)
report("E(1,a) = 0", np.max(np.abs(e2.coeffs)) / den, 1e-13)

# --- 6. H(c, g) = -T_g c for constant c ---
c = Field.from_values(g, np.full(g.shape, 2.5 + 0.0j))
gg = random_band_field(g, rng, real=False)
H = pd.remainder(c, gg)
Tg_c = pd.weyl_apply(pd.Symbol.x_only(gg), c)
report("H(c,g) = -T_g c", rel(H, Field.from_coeffs(g, -Tg_c.coeffs)), 1e-12)

# --- 7. bilinear ---
g = make_grid(1, 16, 4.0)
f1 = random_band_field(g, rng, real=False)
f2 = random_band_field(g, rng, real=False)
one2 = rs.symbol_family_a(1, 1, ["one"])
prod = dealiased_product(f1, f2)
report("B_1 oracle = dealiased product", rel(orc.bilinear_oracle(one2, f1, f2), prod), 1e-13)
report("B_1 fast = dealiased product", rel(rs.bilinear_apply(one2, f1, f2), prod), 1e-13)

coef = rng.standard_normal(8) + 1j * rng.standard_normal(8)
def randm(z1, z2):
    s1 = np.sum(z1 * z1, -1); s2 = np.sum(z2 * z2, -1); cr = np.sum(z1 * z2, -1)
    return (coef[0] + coef[1] * s1 + coef[2] * s2 + coef[3] * cr
            + coef[4] * np.sin(s1 - s2) + coef[5] * np.cos(cr)
            + coef[6] * z1[..., 0] + coef[7] * z2[..., 0])
report("B_m fast vs oracle (1d n=16)", rel(rs.bilinear_apply(randm, f1, f2),
                                            orc.bilinear_oracle(randm, f1, f2)), 1e-12)
g2 = make_grid(2, 8, 3.0)
h1 = random_band_field(g2, rng, real=False)
h2 = random_band_field(g2, rng, real=False)
report("B_m fast vs oracle (2d n=8)", rel(rs.bilinear_apply(randm, h1, h2),
                                           orc.bilinear_oracle(randm, h1, h2)), 1e-12)

# --- 8. trilinear ---
g = make_grid(1, 8, 3.0)
t1 = random_band_field(g, rng, real=False)
t2 = random_band_field(g, rng, real=False)
t3 = random_band_field(g, rng, real=False)
def bone(z1, z2, z3):
    return np.ones(np.broadcast(z1[..., 0], z2[..., 0], z3[..., 0]).shape, complex)
tri_ref = dealiased_product(t1, dealiased_product(t2, t3))
report("T_1 oracle = f(gh) dealiased", rel(orc.trilinear_oracle(bone, t1, t2, t3), tri_ref), 1e-13)
report("T_1 fast = f(gh) dealiased", rel(rs.trilinear_apply(bone, t1, t2, t3), tri_ref), 1e-13)
def randb(z1, z2, z3):
    return (1.0 + 0.3j * np.sum(z1 * z2, -1) + np.cos(np.sum(z3 * z3, -1))
            + 0.1 * z2[..., 0])
report("T_b fast vs oracle (1d n=8)", rel(rs.trilinear_apply(randb, t1, t2, t3),
                                           orc.trilinear_oracle(randb, t1, t2, t3)), 1e-12)

# --- 9. interaction support ---
g = make_grid(1, 256, 4.0)
fA = lp_project(random_band_field(g, rng, real=False), 2)
fB = lp_project(random_band_field(g, rng, real=False), 2)
outp = rs.bilinear_apply(one2, fA, fB)
bad = 0.0
for k in range(-1, g.k_max + 1):
    if not rs.in_interaction_pair(k, 2, 2):
        bad = max(bad, lp_project(outp, k).l2())
report("X_k support violation", bad / max(outp.l2(), 1e-300), 1e-12)
print("     pairs X_5 examples:", rs.in_interaction_pair(5, 14, 14), rs.in_interaction_pair(5, 14, 0))

# --- 10. derived kernel vs hand formula (d=1 default) ---
spec = default_spec(1)
pts = rng.standard_normal((5, 1)) * 2
qts = rng.standard_normal((5, 1)) * 2
for (mu, nu) in rs.SIGN_PAIRS:
    ak = rs.a_kernel(spec, mu, nu)
    got = ak(pts, qts)
    l1 = np.sqrt(1 + pts[:, 0] ** 2); l2 = np.sqrt(1 + qts[:, 0] ** 2)
    hand = (0.5 * mu * qts[:, 0] / l1
            + 0.25 * mu * nu * qts[:, 0] ** 2 / (l1 * l2)
            - 0.25 * mu * nu / (l1 * l2) + 0.25)
    err = np.max(np.abs(got - hand))
    report(f"a_kernel[{mu:+d}{nu:+d}] vs hand", err, 1e-14)

# --- 11. phase spot values ---
z0 = np.zeros((1, 2))
print("phase(+,+)(0,0) =", rs.phase(1, 1, z0, z0)[0], " expect 1")
zx = np.array([[1.5, 0.5]])
print("phase(+,-)(z,-z) =", rs.phase(1, -1, zx, -zx)[0], " expect -1")
print("phase(-,-)(0,0) =", rs.phase(-1, -1, z0, z0)[0], " expect -3")
bb = rs.symbol_family_b(1, one2, one2)
print("b_origin (mu=+, all ones) =", bb(z0[:, :1] * 0, z0[:, :1] * 0, z0[:, :1] * 0)[0], " expect 0")

# --- 12. quick scan ---
rep = rs.phase_bound_scan(1, 1, 1, radius=4.0, step=0.5)
print(f"scan d=1 (+,+): min|Phi|={rep['min_abs_phase']:.4f} c_phi={rep['c_phi']:.4f} "
      f"c_grad={rep['c_grad']:.4f} pairs={rep['n_pairs']}")
rep = rs.phase_bound_scan(3, 1, -1, radius=4.0, step=0.5)
print(f"scan d=3 (+,-): min|Phi|={rep['min_abs_phase']:.4f} c_phi={rep['c_phi']:.4f} "
      f"c_grad={rep['c_grad']:.4f} pairs={rep['n_pairs']}")

# --- 13. holder sharpness ---
g = make_grid(1, 64, 4.0)
res = rs.multiplier_bound_measure("holder", one2, g, -1, -1, p=1.0, q=2.0, r=2.0,
                                  trials=6, rng=make_rng(7))
report("holder constant <= 1", max(res["constant"] - 1.0, 0.0), 1e-6)
print("done")
