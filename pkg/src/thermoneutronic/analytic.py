"""Closed-form evaluation of I(lambda) and the criticality solve.

The coupled problem reduces to one scalar equation

    I(lambda) = int_0^1 dh / sqrt(psi_lambda(h)) = 1,

and I is strictly decreasing from +inf (at the feasibility bound) to 0.
:func:`integral_I` evaluates I exactly through elliptic integrals of the
first kind, dispatching on the root structure returned by
:func:`~thermoneutronic.model.classify_psi`. Quartic cases go through a
homographic change of variable T(h) = (h - d) / (h - c) that sends the
four roots onto {+-a, +-b} (or {+-a, +-ib}).

:func:`integral_I_quadrature` is an independent route used as an oracle
and as the fallback when two roots nearly collide.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .elliptic import ellik_complete, ellik_incomplete
from .errors import (
    BracketFailure,
    DegenerateMap,
    InfeasibleLambda,
    NearDegenerate,
    NoConvergence,
)
from .model import (
    CaseTag,
    HalfFactorization,
    HalfTag,
    Kind,
    PsiFactorization,
    SigmaModel,
    classify_psi,
)

__all__ = [
    "HomographicMap",
    "SolveResult",
    "build_homographic_map",
    "integral_I",
    "integral_I_quadrature",
    "half_integral",
    "solve_lambda",
    "reconstruct_profiles",
    "sin2_grid",
]

_DENOM_TOL = 1e-12


@dataclass(frozen=True)
class HomographicMap:
    """Parameters of T(h) = (h - d) / (h - c) and the resulting elliptic parameter."""

    a: float
    b: float
    c: float
    d: float
    m: float
    A: float = math.nan
    B: float = math.nan

    def __call__(self, h):
        return (h - self.d) / (h - self.c)


def _guard(value: float, what: str) -> float:
    if abs(value) < _DENOM_TOL:
        raise DegenerateMap(f"{what} vanishes ({value:.3e}); case is misclassified")
    return value


def build_homographic_map(fact: PsiFactorization) -> HomographicMap:
    """Construct the homography for a quartic factorization.

    Raises
    ------
    DegenerateMap
        If a denominator of the construction vanishes.
    ValueError
        If ``fact`` is not one of the homographic quartic cases.
    """
    tag = fact.case_tag
    if tag is CaseTag.QUARTIC_OPPOSITE_SIGNS:
        p, g = fact.roots
        A = -math.sqrt(g * (g - p) / _guard(1.0 - p, "1 - p"))
        B = math.sqrt((1.0 - p) * (g - p) / _guard(g, "g"))
        a = (A + 1.0) / _guard(A - 1.0, "A - 1")
        b = (B + 1.0) / _guard(B - 1.0, "B - 1")
        c = -(a + 1.0) / _guard(b - a, "b - a")
        return HomographicMap(a, b, c, -c * b, 1.0 - (a / b) ** 2, A, B)

    if tag in (CaseTag.QUARTIC_COMPLEX_LEFT, CaseTag.QUARTIC_COMPLEX_RIGHT):
        sigma, disc = fact.sum_sigma, fact.discriminant
        q = 0.25 * (sigma * sigma - disc)  # squared modulus of the complex roots
        reduced = q * (q + 1.0 - sigma)
        one_minus_sigma = _guard(1.0 - sigma, "1 - sigma")
        if tag is CaseTag.QUARTIC_COMPLEX_LEFT:
            c = -(math.sqrt(reduced) + q) / one_minus_sigma
        else:
            c = (math.sqrt(reduced) + q) / -one_minus_sigma
        a = 1.0 / _guard(1.0 - 2.0 * c, "1 - 2c")
        b = math.sqrt(-disc) / _guard(2.0 * c - sigma, "2c - sigma")
        return HomographicMap(a, b, c, -a * c, -(a * a) / (b * b))

    if tag in (CaseTag.QUARTIC_SAME_SIGN_ABOVE, CaseTag.QUARTIC_SAME_SIGN_BELOW):
        p, g = fact.roots
        root_disc = math.sqrt(4.0 * p * g * (p - 1.0) * (g - 1.0))
        num = p * (p - 1.0) + g * (g - 1.0) + root_disc
        if tag is CaseTag.QUARTIC_SAME_SIGN_ABOVE:
            b = num / _guard((g - p) * (g + p - 1.0), "(g - p)(g + p - 1)")
            a = b * (p - g) + p + g - 1.0
            c = (a + 1.0) / _guard(2.0 * a, "2a")
            d = a * c
        else:
            b = num / _guard((g - p) * (1.0 - g - p), "(g - p)(1 - g - p)")
            a = b * (p - g) + 1.0 - p - g
            c = -(1.0 - a) / _guard(2.0 * a, "2a")
            d = -a * c
        return HomographicMap(a, b, c, d, (a * a) / (b * b))

    raise ValueError(f"no homographic map for case {tag.value}")


def _quartic_integral(fact: PsiFactorization) -> float:
    tag = fact.case_tag
    lead = abs(fact.leading)
    if tag is CaseTag.QUARTIC_COMPLEX_SYMMETRIC:
        disc = fact.discriminant
        return 4.0 / (math.sqrt(lead) * math.sqrt(-disc)) * ellik_complete(1.0 / disc)
    hmap = build_homographic_map(fact)
    a, b, c, d = hmap.a, hmap.b, hmap.c, hmap.d
    if tag is CaseTag.QUARTIC_OPPOSITE_SIGNS:
        p, g = fact.roots
        k = ellik_complete(hmap.m, mc=(a / b) ** 2)
        return (1.0 - a / b) / (math.sqrt(lead) * math.sqrt(g - p)) * k
    if tag in (CaseTag.QUARTIC_COMPLEX_LEFT, CaseTag.QUARTIC_COMPLEX_RIGHT):
        # a < 0 when sigma > 1; only a^2 and |d - c| enter.
        scale = math.sqrt((1.0 - a * a) * (b * b + 1.0))
    else:
        scale = math.sqrt((1.0 - a * a) * (b * b - 1.0))
    return 2.0 * scale / (math.sqrt(lead) * abs(b) * abs(d - c)) * ellik_complete(hmap.m)


def half_integral(half: HalfFactorization) -> float:
    """Integral of 1 / sqrt(psi^0(u)) over u in [0, 1/2] for one cubic half."""
    tag, xi, beta = half.tag, half.xi, half.beta
    if tag is HalfTag.LINEAR_XI_EQ_1:
        return math.sqrt(24.0 / beta)
    if tag is HalfTag.LINEAR_XI_GT_1:
        phi0 = math.sqrt(1.0 + beta * xi / (6.0 * (xi - 1.0)))
        return 2.0 / math.sqrt(xi - 1.0) * math.atan(1.0 / phi0)
    if tag is HalfTag.LINEAR_XI_LT_1:
        b0 = beta * xi / 12.0 + xi - 1.0
        c = math.sqrt((1.0 - xi) / b0)
        # log((r + c) / (r - c)) with r = sqrt(c^2 + 2), written without cancellation
        return 2.0 * math.atanh(c / math.sqrt(c * c + 2.0)) / (c * math.sqrt(b0))

    a0 = half.leading
    if tag is HalfTag.OPPOSITE_ROOTS:
        r_minus, r_plus = half.roots
        phi0 = math.asin(min(1.0, 1.0 / math.sqrt(2.0 * r_plus)))
        return 2.0 / math.sqrt(a0 * -r_minus) * ellik_incomplete(phi0, r_plus / r_minus)
    if tag is HalfTag.POSITIVE_PAIR:
        r_minus, r_plus = half.roots
        phi0 = math.asin(min(1.0, 1.0 / math.sqrt(2.0 * r_minus)))
        return 2.0 / math.sqrt(a0 * r_plus) * ellik_incomplete(phi0, r_minus / r_plus)
    # CONJUGATE_PAIR or NEGATIVE_PAIR: the tangent half-angle reduction holds
    # whenever q1 > -2 zeta^2, which covers both (m < 0 for the negative pair).
    zeta2 = math.sqrt(half.q0)
    zeta = math.sqrt(zeta2)
    m = 0.5 - half.q1 / (4.0 * zeta2)
    phi0 = 2.0 * math.atan(1.0 / (zeta * math.sqrt(2.0)))
    if phi0 > 0.5 * math.pi:
        # amplitude in (pi/2, pi) when zeta^2 < 1/2: F(phi) = 2K - F(pi - phi)
        f = 2.0 * ellik_complete(m) - ellik_incomplete(math.pi - phi0, m)
    else:
        f = ellik_incomplete(phi0, m)
    return f / (zeta * math.sqrt(a0))


def integral_I(model: SigmaModel, lam: float) -> float:
    """Exact value of I(lambda) from the elliptic-integral case formulas.

    Raises
    ------
    InfeasibleLambda
        If ``lam`` is not above the feasibility bound.
    NearDegenerate, DegenerateMap
        When the closed form is unsafe; use :func:`integral_I_quadrature`.
    """
    fact = classify_psi(model, lam)
    return _integral_from_factorization(model, fact)


def _integral_from_factorization(model: SigmaModel, fact: PsiFactorization) -> float:
    tag = fact.case_tag
    xi = fact.xi
    if tag is CaseTag.QUADRATIC_CONSTANT:
        return math.pi / math.sqrt(xi - 1.0)
    if tag is CaseTag.CUBIC_AFFINE:
        abs_alpha = abs(model.alpha)
        at_zero = xi * (1.0 + abs_alpha / 3.0) - 1.0
        m = 2.0 * abs_alpha * xi / (3.0 * xi + abs_alpha * xi - 3.0)
        return 2.0 / math.sqrt(at_zero) * ellik_complete(m)
    if tag is CaseTag.PIECEWISE_CUBIC_PAIR:
        left, right = fact.halves
        return half_integral(left) + half_integral(right)
    return _quartic_integral(fact)


def sin2_grid(t):
    """h = sin^2(pi t / 2) together with sin(pi t / 2) and cos(pi t / 2).

    The cosine is computed as sin(pi (1 - t) / 2) so that it is exactly
    zero at t = 1 and 1 - h keeps full relative accuracy near h = 1.
    """
    t = np.asarray(t, dtype=float)
    s = np.sin(0.5 * np.pi * t)
    c = np.sin(0.5 * np.pi * (1.0 - t))
    return s * s, s, c


def integral_I_quadrature(model: SigmaModel, lam: float, rtol: float = 1e-10) -> float:
    """I(lambda) by adaptive quadrature after the substitution h = sin^2(pi t / 2).

    With psi = h (1 - h) R(h) the substitution gives dh / sqrt(psi) =
    pi dt / sqrt(R), so both inverse-square-root endpoint singularities
    disappear and the integrand is smooth (kinked at t = 1/2 for the
    piecewise representation).
    """
    if not lam > model.lambda_low:
        raise InfeasibleLambda(f"lambda={lam!r} is not above the feasibility bound {model.lambda_low!r}")

    def integrand(t):
        h, _, _ = sin2_grid(t)
        r = model.psi_reduced(lam, float(h))
        if not r > 0.0:
            raise InfeasibleLambda(f"psi_lambda <= 0 at h={float(h)!r}")
        return math.pi / math.sqrt(r)

    points = [0.5] if model.kind is Kind.PIECEWISE_AFFINE else None
    value, _ = quad(integrand, 0.0, 1.0, epsabs=0.0, epsrel=rtol, limit=500, points=points)
    return value


# ---------------------------------------------------------------------------
# solve


@dataclass(frozen=True)
class SolveResult:
    """Criticality eigenvalue and profiles for one Sigma representation.

    ``profile`` has one row (z, h, phi) per node of a sin^2-graded
    enthalpy grid. ``case_tag`` is the root structure at the solution, or
    ``QUADRATURE_FALLBACK`` when the closed form had to be bypassed there.
    """

    lam: float
    keff: float
    case_tag: CaseTag
    iterations: int
    residual: float
    method: str
    fallbacks: int = 0
    half_tags: tuple[HalfTag, ...] = ()
    profile: np.ndarray = field(default=None, repr=False, compare=False)


class _Evaluator:
    def __init__(self, model, method, quad_rtol):
        self.model = model
        self.method = method
        self.quad_rtol = quad_rtol
        self.fallbacks = 0

    def __call__(self, lam):
        if self.method == "quadrature":
            return integral_I_quadrature(self.model, lam, self.quad_rtol)
        try:
            return integral_I(self.model, lam)
        except (NearDegenerate, DegenerateMap):
            self.fallbacks += 1
            return integral_I_quadrature(self.model, lam, self.quad_rtol)


def _bracket(model: SigmaModel, func) -> tuple[float, float]:
    low = model.lambda_low
    left = None
    for eps in (1e-6, 1e-9, 1e-12):
        lam = low * (1.0 + eps)
        if func(lam) > 1.0:
            left = lam
            break
    if left is None:
        raise BracketFailure(f"I(lambda) <= 1 just above the feasibility bound {low!r}")
    right = low * 1.5
    for _ in range(200):
        if func(right) < 1.0:
            return left, right
        left = right
        right *= 2.0
    raise BracketFailure("could not find lambda with I(lambda) < 1")


def solve_lambda(
    model: SigmaModel,
    tol: float = 1e-12,
    method: str = "analytic",
    n_profile: int = 201,
    max_iter: int = 200,
    quad_rtol: float = 1e-13,
) -> SolveResult:
    """Solve I(lambda) = 1 for the criticality eigenvalue.

    Uses Brent's bracketed method on the strictly decreasing I. ``method``
    is ``"analytic"`` (closed forms, quadrature fallback near degenerate
    roots) or ``"quadrature"``.

    Raises
    ------
    BracketFailure
        If no sign change of I - 1 can be bracketed.
    NoConvergence
        If the root finder fails or the residual exceeds ``tol``.
    """
    if method not in ("analytic", "quadrature"):
        raise ValueError(f"unknown method {method!r}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    func = _Evaluator(model, method, quad_rtol)
    left, right = _bracket(model, func)
    try:
        lam, info = brentq(
            lambda x: func(x) - 1.0, left, right, xtol=1e-300, rtol=4.0 * np.finfo(float).eps,
            maxiter=max_iter, full_output=True, disp=False,
        )
    except RuntimeError as exc:
        raise NoConvergence(str(exc)) from exc
    if not info.converged:
        raise NoConvergence(f"Brent iteration did not converge: {info.flag}")

    fallbacks_before = func.fallbacks
    residual = abs(func(lam) - 1.0)
    if residual > tol:
        raise NoConvergence(f"residual {residual:.3e} exceeds tol {tol:.3e}")

    if method == "quadrature" or func.fallbacks > fallbacks_before:
        tag, half_tags = CaseTag.QUADRATURE_FALLBACK, ()
    else:
        fact = classify_psi(model, lam)
        tag = fact.case_tag
        half_tags = tuple(half.tag for half in fact.halves)

    profile = reconstruct_profiles(model, lam, n_profile) if n_profile else None
    return SolveResult(
        lam=lam,
        keff=1.0 / lam,
        case_tag=tag,
        iterations=info.iterations,
        residual=residual,
        method=method,
        fallbacks=func.fallbacks,
        half_tags=half_tags,
        profile=profile,
    )


_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(20)


def reconstruct_profiles(model: SigmaModel, lam: float, n_points: int = 201) -> np.ndarray:
    """Sample z(h), h and phi = sqrt(psi_lambda(h)) on a sin^2-graded grid.

    Returns an ``(n_points, 3)`` array of rows (z, h, phi) with
    h_k = sin^2(pi k / (2 (n_points - 1))) and z(h) = int_0^h dh' / sqrt(psi).
    The last z equals I(lambda), i.e. 1 at the criticality eigenvalue.
    """
    if n_points < 3:
        raise ValueError("n_points must be at least 3")
    if not lam > model.lambda_low:
        raise InfeasibleLambda(f"lambda={lam!r} is not above the feasibility bound {model.lambda_low!r}")
    t = np.linspace(0.0, 1.0, n_points)
    edges = np.union1d(t, [0.5]) if model.kind is Kind.PIECEWISE_AFFINE else t
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * _GAUSS_X[None, :]
    h_nodes, _, _ = sin2_grid(nodes)
    r = model.psi_reduced(lam, h_nodes)
    if np.any(r <= 0.0):
        raise InfeasibleLambda("psi_lambda <= 0 inside (0, 1)")
    seg = half * ((np.pi / np.sqrt(r)) @ _GAUSS_W)
    z_edges = np.concatenate([[0.0], np.cumsum(seg)])
    z = z_edges[np.searchsorted(edges, t)]

    h, s, c = sin2_grid(t)
    phi = s * c * np.sqrt(model.psi_reduced(lam, h))
    return np.column_stack([z, h, phi])
