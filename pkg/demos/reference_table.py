"""
Criticality eigenvalue for six cross-section representations
=============================================================

The cross section Sigma(h) is known only at h = 0, 1/2 and 1. Each
representation of Sigma gives a potential psi(h) = h(h-1) - 2 lambda V(h)
and the eigenvalue lambda* solves int_0^1 dh / sqrt(psi) = 1.
"""

import math

from thermoneutronic import Kind, build_model, make_samples, solve_lambda

samples = make_samples(8.0, 6.0, 3.0)

# The constant case has a closed form: lambda mu = 1 + pi^2
mu = build_model(samples, Kind.CONSTANT).mu
print(f"constant closed form: (1 + pi^2) / {mu} = {(1 + math.pi**2) / mu:.10f}")

# Every representation goes through the same bracketed solve
print(f"{'kind':16s} {'lambda*':>14s} {'k_eff':>10s}  branch")
for kind in Kind:
    res = solve_lambda(build_model(samples, kind))
    halves = "/".join(t.value for t in res.half_tags)
    print(f"{kind.value:16s} {res.lam:14.10f} {res.keff:10.6f}  {res.case_tag.value} {halves}")

# Scaling Sigma by c divides lambda by c, so with c = lambda*(quadratic)
# the quadratic case becomes exactly critical (k_eff = 1)
c = solve_lambda(build_model(samples, Kind.QUADRATIC), n_profile=0).lam
scaled = samples.scaled(c)
print(f"\nsamples scaled by c = {c:.6f}")
for kind in Kind:
    print(f"{kind.value:16s} k_eff = {solve_lambda(build_model(scaled, kind), n_profile=0).keff:.6f}")

# The solution also carries the profiles z(h), phi(h)
res = solve_lambda(build_model(samples, Kind.QUADRATIC), n_profile=5)
print("\nquadratic profile (z, h, phi):")
for z, h, phi in res.profile:
    print(f"  {z:.6f}  {h:.6f}  {phi:.6f}")
