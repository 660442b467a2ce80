"""
Which elliptic-integral formula applies
=======================================

The roots of psi decide how int dh / sqrt(psi) reduces to elliptic
integrals. This script walks through one sample set per branch and checks
each closed form against adaptive quadrature after the h = sin^2 substitution.
"""

from thermoneutronic import Kind, build_model, make_samples
from thermoneutronic.analytic import integral_I, integral_I_quadrature
from thermoneutronic.model import classify_psi

cases = [
    ("quadratic, real roots of opposite sign", (8, 6, 3), Kind.QUADRATIC, 1.9),
    ("quadratic, complex pair, symmetric", (1, 0.3, 1), Kind.QUADRATIC, 3.0),
    ("quadratic, complex pair, left", (1, 0.5, 2), Kind.QUADRATIC, 3.0),
    ("quadratic, complex pair, right", (2, 0.5, 1), Kind.QUADRATIC, 3.0),
    ("quadratic, both roots above 1", (1.5, 0.9, 0.5), Kind.QUADRATIC, 1.4),
    ("quadratic, both roots below 0", (0.5, 0.9, 1.5), Kind.QUADRATIC, 1.4),
    ("piecewise, flat half", (6, 6, 3), Kind.PIECEWISE_AFFINE, 1.9),
    ("piecewise, conjugate pairs", (11, 6, 11), Kind.PIECEWISE_AFFINE, 0.5),
    ("piecewise, negative pair", (2, 1, 50), Kind.PIECEWISE_AFFINE, 0.2),
]

for label, samples, kind, lam in cases:
    model = build_model(make_samples(*samples), kind)
    fact = classify_psi(model, lam)
    exact = integral_I(model, lam)
    oracle = integral_I_quadrature(model, lam, rtol=1e-12)
    halves = " / ".join(h.tag.value for h in fact.halves)
    print(f"{label}")
    print(f"  samples={samples} lambda={lam}  -> {fact.case_tag.value} {halves}")
    print(f"  I closed form = {exact:.15f}   quadrature = {oracle:.15f}   rel diff = {abs(exact / oracle - 1):.1e}")
