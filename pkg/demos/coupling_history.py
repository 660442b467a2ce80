"""
Coupling a neutronics solver with an enthalpy solver
====================================================

Instead of the exact reduction, alternate two codes on a uniform grid:
solve (-phi'' + phi) = lambda Sigma(h) phi for the smallest eigenvalue,
then set h(z) = int_0^z phi. The loop is a contraction, and its fixed
point agrees with lambda* up to the O(dz^2) grid error.
"""

from thermoneutronic import Kind, build_model, make_samples, solve_lambda
from thermoneutronic.coupling import coupling_iterate

model = build_model(make_samples(8.0, 6.0, 3.0), Kind.QUADRATIC)
exact = solve_lambda(model, n_profile=0).lam

state = coupling_iterate(model, grid_m=800)
print(f"pass 0 (Sigma(0) everywhere): lambda = {state.lambda0:.10f}")
for n, (lam, dh, norm) in enumerate(zip(state.lambda_seq, state.h_delta_seq, state.psi_norms), 1):
    print(f"pass {n}: lambda = {lam:.10f}  |h_n+1 - h_n| = {dh:.2e}  |sqrt(Sigma) phi| = {norm:.6f}")
print("contraction ratios:", ", ".join(f"{r:.3f}" for r in state.ratios))
print(f"converged={state.converged}  k_eff={state.keff:.8f}")

# The remaining gap to lambda* is the grid error, quartered by each doubling
print(f"\nexact lambda* = {exact:.10f}")
for m in (100, 200, 400, 800):
    err = coupling_iterate(model, grid_m=m).lam - exact
    print(f"  M={m:4d}  lambda - lambda* = {err:+.3e}")
