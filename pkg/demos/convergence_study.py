"""
Second-order convergence of the discrete solve
===============================================

On the mesh h_j = sin^2(pi j / 2N) the sum S_N(lambda) of trapezoidal
cell widths dz_j = 2 dh_j / (sqrt(psi_j) + sqrt(psi_{j+1})) replaces the
integral. The root of S_N(lambda) = 1 approaches lambda* like N^-2.
"""

from thermoneutronic import Kind, build_model, make_samples, solve_lambda
from thermoneutronic.cn import convergence_study, solve_lambda_discrete

samples = make_samples(8.0, 6.0, 3.0)
meshes = [40 * 2**k for k in range(6)]

for kind in (Kind.CONSTANT, Kind.QUADRATIC, Kind.PIECEWISE_AFFINE):
    model = build_model(samples, kind)
    exact = solve_lambda(model, n_profile=0).lam
    print(f"\n{kind.value}: lambda* = {exact:.12f}")
    for n, err, order in convergence_study(model, meshes, exact):
        print(f"  N={n:5d}  error={err:.3e}  order={'' if order is None else f'{order:.3f}'}")

# With two cells the sum is 2/sqrt(psi(1/2)), so lambda mu = 17 exactly
model = build_model(samples, Kind.CONSTANT)
print(f"\nN=2: lambda mu = {solve_lambda_discrete(model, 2).lam * model.mu:.12f}")

# The discrete solution gives the nodes z_j and fluxes phi_j directly
sol = solve_lambda_discrete(build_model(samples, Kind.QUADRATIC), 8)
print("\nquadratic, N=8 (z, h, phi):")
for z, h, phi in zip(sol.z, sol.h, sol.phi):
    print(f"  {z:.6f}  {h:.6f}  {phi:.6f}")
