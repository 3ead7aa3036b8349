import numpy as np

from kglab.grid import make_grid, Field
from kglab.data import make_rng, random_band_field
from kglab.nonlinearity import default_spec
from kglab.dynamics import (
    KGState, step, cfl_limit, nonlinearity_value, normal_form_boundary,
    cubic_profile_term, _quad_weights,
)
from kglab.resonance import (
    a_kernel, phi_inv, TrilinearSymbol, TrilinearKernel, SIGN_TRIPLES,
    SIGN_PAIRS, PHASE_FLOOR, bilinear_apply,
)
from kglab.spectral import semigroup

d, n, L = 1, 64, 8 * np.pi
grid = make_grid(d, n, L)
spec = default_spec(d)
rng = make_rng(7)
eps = 0.04

u0 = random_band_field(grid, rng, k_lo=-1, k_hi=0)
w0 = random_band_field(grid, rng, k_lo=-1, k_hi=0)
u0 = u0 * (eps / u0.sup())
w0 = w0 * (eps / w0.sup())
state = KGState(grid, 1.0, u0, w0)

# 1. F reconstruction through the sign-resolved quadratic kernels
U = state.half_wave()
fields = {+1: U, -1: U.conj()}
acc = Field.zero(grid)
for mu, nu in SIGN_PAIRS:
    acc = acc + bilinear_apply(a_kernel(spec, mu, nu), fields[mu], fields[nu])
F = nonlinearity_value(state, spec)
err = (acc - F).l2() / F.l2()
print(f"F vs sum B_a: rel {err:.3e}")

# 2. trajectory for the Duhamel audit
print("cfl:", cfl_limit(grid))
nodes = [state]
n_nodes, sub = 9, 16
gap = 1.0 / (n_nodes - 1)
cur = state
for k in range(n_nodes - 1):
    for _ in range(sub):
        cur = step(cur, spec, gap / sub)
    nodes.append(cur)
print("t range:", nodes[0].t, nodes[-1].t)


def b_variant(spec, mu, sigma, iota, first_arg, floor=PHASE_FLOOR):
    a_in = a_kernel(spec, sigma, iota)
    a_out = {(m, nn): a_kernel(spec, m, nn) for m in (1, -1) for nn in (1, -1)}

    def fn(z1, z2, z3):
        z1 = np.asarray(z1, float)
        z2 = np.asarray(z2, float)
        z3 = np.asarray(z3, float)
        eta = z2 + z3
        p = eta if first_arg == "eta" else z1 + eta
        out = 0.0
        for nu in (1, -1):
            out = out + phi_inv(mu, nu, z1, eta, floor) * a_out[(mu, nu)](z1, eta)
            out = out + phi_inv(nu, mu, p, z1, floor) * a_out[(nu, mu)](p, z1)
        return a_in(z2, z3) * out

    return TrilinearSymbol(fn, tag=f"b-{first_arg}")


ts = np.array([s.t for s in nodes])
wts = _quad_weights(ts, "simpson")
lhs = nodes[-1].profile() - nodes[0].profile()
bnd = normal_form_boundary(nodes[-1], spec) - normal_form_boundary(nodes[0], spec)
for variant in ("eta", "xi"):
    kernels = {trip: TrilinearKernel(b_variant(spec, *trip, variant), grid)
               for trip in SIGN_TRIPLES}
    integral = Field.zero(grid)
    for wt, s in zip(wts, nodes):
        integral = integral + cubic_profile_term(s, spec, kernels) * wt
    mism = (lhs - bnd - integral).l2()
    print(f"variant {variant}: |dV|={lhs.l2():.3e} |bnd|={bnd.l2():.3e} "
          f"|cubic|={integral.l2():.3e} mismatch={mism:.3e} "
          f"mism/cubic={mism / integral.l2():.3e}")
