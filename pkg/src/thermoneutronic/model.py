"""Cross-section representations, the potential psi_lambda and its root structure.

The normalized coupled problem is

    -phi'' + phi = lambda * Sigma(h) * phi,   h' = phi,   0 < z < 1,
    h(0) = 0, h(1) = 1, phi(0) = phi(1) = 0,

with Sigma known only through three samples at h = 0, 1/2, 1. Writing
phi as a function of h turns it into dh/dz = sqrt(psi_lambda(h)) with

    psi_lambda(h) = h (h - 1) - 2 lambda V(h),   V'' = Sigma,  V(0) = V(1) = 0.

Everything downstream (closed forms, quadrature, the discrete scheme,
the coupling loop) consumes the :class:`SigmaModel` built here.

Internally ``V`` is stored as exact polynomial pieces, and so is the
positive ratio ``w(h) = V(h) / (h (h - 1))``. With it

    psi_lambda(h) = h (1 - h) (2 lambda w(h) - 1),

which gives exact zeros at both endpoints and keeps full relative
accuracy near them.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.polynomial import Polynomial
from scipy.optimize import minimize_scalar

from .errors import (
    DomainError,
    InfeasibleLambda,
    InvalidShape,
    NearDegenerate,
    NonPositiveProjection,
    NonPositiveSample,
)

__all__ = [
    "Kind",
    "CaseTag",
    "HalfTag",
    "SigmaSamples",
    "SigmaModel",
    "HalfFactorization",
    "PsiFactorization",
    "make_samples",
    "build_model",
    "sigma_eval",
    "v_eval",
    "psi_eval",
    "classify_psi",
    "lambda_lower_bound",
    "stable_quadratic_roots",
]


class Kind(str, enum.Enum):
    CONSTANT = "constant"
    AFFINE = "affine"
    QUADRATIC = "quadratic"
    PIECEWISE_AFFINE = "piecewise"
    SEMI_ANALYTIC_QUADRATIC = "semi_quadratic"
    SEMI_ANALYTIC_PIECEWISE = "semi_piecewise"

    @property
    def affine_shaped(self) -> bool:
        return self in (Kind.AFFINE, Kind.SEMI_ANALYTIC_QUADRATIC, Kind.SEMI_ANALYTIC_PIECEWISE)


class CaseTag(str, enum.Enum):
    """Root structure of psi_lambda; selects the closed-form integral."""

    QUADRATIC_CONSTANT = "quadratic_constant"
    CUBIC_AFFINE = "cubic_affine"
    QUARTIC_OPPOSITE_SIGNS = "quartic_opposite_signs"
    QUARTIC_COMPLEX_SYMMETRIC = "quartic_complex_sigma_eq_1"
    QUARTIC_COMPLEX_LEFT = "quartic_complex_sigma_lt_1"
    QUARTIC_COMPLEX_RIGHT = "quartic_complex_sigma_gt_1"
    QUARTIC_SAME_SIGN_ABOVE = "quartic_same_sign_sigma_gt_2"
    QUARTIC_SAME_SIGN_BELOW = "quartic_same_sign_sigma_lt_0"
    PIECEWISE_CUBIC_PAIR = "piecewise_cubic_pair"
    QUADRATURE_FALLBACK = "quadrature_fallback"


class HalfTag(str, enum.Enum):
    """Root structure of one cubic half psi^0 (or the reflected psi^1)."""

    LINEAR_XI_EQ_1 = "slope_zero_xi_eq_1"
    LINEAR_XI_GT_1 = "slope_zero_xi_gt_1"
    LINEAR_XI_LT_1 = "slope_zero_xi_lt_1"
    OPPOSITE_ROOTS = "slope_positive"
    CONJUGATE_PAIR = "slope_negative_complex"
    NEGATIVE_PAIR = "slope_negative_real_negative"
    POSITIVE_PAIR = "slope_negative_real_positive"


_XI_ONE_TOL = 1e-14


@dataclass(frozen=True)
class SigmaSamples:
    """Three positive cross-section samples at h = 0, 1/2 and 1."""

    sigma0: float
    sigma_half: float
    sigma1: float

    def __post_init__(self):
        for name in ("sigma0", "sigma_half", "sigma1"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float, np.floating, np.integer)) and math.isfinite(value)):
                raise NonPositiveSample(f"{name} must be a finite real, got {value!r}")
            if value <= 0:
                raise NonPositiveSample(f"{name} must be strictly positive, got {value!r}")
            object.__setattr__(self, name, float(value))

    def reversed(self) -> SigmaSamples:
        return SigmaSamples(self.sigma1, self.sigma_half, self.sigma0)

    def scaled(self, c: float) -> SigmaSamples:
        return SigmaSamples(c * self.sigma0, c * self.sigma_half, c * self.sigma1)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.sigma0, self.sigma_half, self.sigma1)


def make_samples(s0: float, s_half: float, s1: float) -> SigmaSamples:
    """Validate and wrap the three cross-section samples."""
    return SigmaSamples(s0, s_half, s1)


@dataclass(frozen=True)
class _Piece:
    lo: float
    hi: float
    sigma: Polynomial
    v: Polynomial
    # w = w_num / w_den on the piece
    w_num: Polynomial
    w_den: Polynomial


_HH1 = Polynomial([0.0, -1.0, 1.0])  # h (h - 1)
_ONE = Polynomial([1.0])
_H = Polynomial([0.0, 1.0])
_HM1 = Polynomial([-1.0, 1.0])


@dataclass(frozen=True)
class SigmaModel:
    """One representation of Sigma built from three samples.

    ``mu``, ``alpha``, ``delta`` and ``beta`` follow the usual
    parameterizations: affine-shaped kinds use sigma(0) = mu (1 - alpha),
    sigma(1) = mu (1 + alpha); the quadratic kind additionally uses
    sigma(1/2) = mu (1 + delta); the piecewise kind uses mu = sigma(1/2),
    sigma(0) = mu (1 - alpha), sigma(1) = mu (1 + beta). The reduced
    eigenvalue is xi = lambda * mu in every case.
    """

    kind: Kind
    samples: SigmaSamples
    mu: float
    alpha: float = 0.0
    delta: float = 0.0
    beta: float = 0.0
    pieces: tuple[_Piece, ...] = field(default=(), repr=False, compare=False)

    @property
    def gamma(self) -> float:
        """1 - |alpha|/3 + 2 delta/3; positive for valid quadratic models."""
        return 1.0 - abs(self.alpha) / 3.0 + 2.0 * self.delta / 3.0

    @property
    def endpoint_values(self) -> tuple[float, float, float]:
        """Sigma at h = 0, 1/2, 1 for this representation."""
        return tuple(float(sigma_eval(self, x)) for x in (0.0, 0.5, 1.0))

    @property
    def mean_sigma(self) -> float:
        s0, sh, s1 = self.endpoint_values
        return 0.25 * (s0 + 2.0 * sh + s1)

    def xi(self, lam: float) -> float:
        return lam * self.mu

    def _eval(self, attr, h):
        h_arr = np.asarray(h, dtype=float)
        if len(self.pieces) == 1:
            out = getattr(self.pieces[0], attr)(h_arr)
        else:
            left, right = self.pieces
            out = np.where(h_arr <= 0.5, getattr(left, attr)(h_arr), getattr(right, attr)(h_arr))
        return out if np.ndim(out) else float(out)

    def w(self, h):
        """Positive ratio V(h) / (h (h - 1)), continuous on [0, 1]."""
        h_arr = np.asarray(h, dtype=float)
        if len(self.pieces) == 1:
            p = self.pieces[0]
            out = p.w_num(h_arr) / p.w_den(h_arr)
        else:
            left, right = self.pieces
            with np.errstate(divide="ignore", invalid="ignore"):
                wl = left.w_num(h_arr) / left.w_den(h_arr)
                wr = right.w_num(h_arr) / right.w_den(h_arr)
            out = np.where(h_arr <= 0.5, wl, wr)
        return out if np.ndim(out) else float(out)

    def psi_reduced(self, lam, h):
        """psi_lambda(h) / (h (1 - h)) = 2 lambda w(h) - 1."""
        return 2.0 * lam * self.w(h) - 1.0

    def v_prime(self, h):
        h_arr = np.asarray(h, dtype=float)
        if len(self.pieces) == 1:
            out = self.pieces[0].v.deriv()(h_arr)
        else:
            left, right = self.pieces
            out = np.where(h_arr <= 0.5, left.v.deriv()(h_arr), right.v.deriv()(h_arr))
        return out if np.ndim(out) else float(out)

    @cached_property
    def lambda_low(self) -> float:
        return _lambda_lower_bound(self)


def _affine_params(s0: float, s1: float) -> tuple[float, float]:
    mu = 0.5 * (s0 + s1)
    return mu, 1.0 - s0 / mu


def _single_piece(sigma: Polynomial) -> tuple[_Piece, ...]:
    p = sigma.integ(2)
    v = p - p(1.0) * _H
    w, _ = divmod(v, _HH1)
    return (_Piece(0.0, 1.0, sigma, v, w, _ONE),)


def _two_pieces(sigma_left: Polynomial, sigma_right: Polynomial) -> tuple[_Piece, ...]:
    # V_L = P_L + c1 h,  V_R = P_R + c2 (h - 1); match V and V' at h = 1/2.
    p_left = sigma_left.integ(2)
    p_right = sigma_right.integ(2, lbnd=1.0)
    mat = np.array([[0.5, 0.5], [1.0, -1.0]])
    rhs = np.array(
        [p_right(0.5) - p_left(0.5), p_right.deriv()(0.5) - p_left.deriv()(0.5)]
    )
    c1, c2 = np.linalg.solve(mat, rhs)
    v_left = p_left + c1 * _H
    v_right = p_right + c2 * _HM1
    wl_num, _ = divmod(v_left, _H)
    wr_num, _ = divmod(v_right, _HM1)
    return (
        _Piece(0.0, 0.5, sigma_left, v_left, wl_num, _HM1),
        _Piece(0.5, 1.0, sigma_right, v_right, wr_num, _H),
    )


def build_model(samples: SigmaSamples, kind: Kind | str) -> SigmaModel:
    """Build one of the six Sigma representations from three samples.

    Constant: mu is the mean of the piecewise-affine interpolant,
    (s0 + 2 s_half + s1) / 4. Affine: s_half is ignored (replaced by the
    chord midpoint). Quadratic: Lagrange interpolant. Piecewise: affine on
    [0, 1/2] and [1/2, 1]. The two semi-analytic kinds are affine models
    whose endpoint values come from the energy-norm projection of V onto
    cubics vanishing at 0 and 1 (applied to the quadratic and piecewise
    interpolants respectively).
    """
    kind = Kind(kind)
    s0, sh, s1 = samples.as_tuple()

    if kind is Kind.CONSTANT:
        mu = 0.25 * (s0 + 2.0 * sh + s1)
        return SigmaModel(kind, samples, mu, pieces=_single_piece(Polynomial([mu])))

    if kind.affine_shaped:
        if kind is Kind.AFFINE:
            left, right = s0, s1
        elif kind is Kind.SEMI_ANALYTIC_QUADRATIC:
            left = (3.0 * s0 + 4.0 * sh - 2.0 * s1) / 5.0
            right = (-2.0 * s0 + 4.0 * sh + 3.0 * s1) / 5.0
        else:
            left = (11.0 * s0 + 10.0 * sh - 5.0 * s1) / 16.0
            right = (-5.0 * s0 + 10.0 * sh + 11.0 * s1) / 16.0
        if left <= 0.0 or right <= 0.0:
            raise NonPositiveProjection(
                f"{kind.value}: projected endpoint values ({left:.6g}, {right:.6g}) must be positive"
            )
        mu, alpha = _affine_params(left, right)
        if not abs(alpha) < 1.0:
            raise InvalidShape(f"affine model needs |alpha| < 1, got {alpha}")
        sigma = Polynomial([mu * (1.0 - alpha), 2.0 * mu * alpha])
        return SigmaModel(kind, samples, mu, alpha=alpha, pieces=_single_piece(sigma))

    if kind is Kind.QUADRATIC:
        mu, alpha = _affine_params(s0, s1)
        delta = -(s0 - 2.0 * sh + s1) / (s0 + s1)
        if not (abs(alpha) < 1.0 and delta > -1.0):
            raise InvalidShape(f"quadratic model needs |alpha| < 1 and delta > -1, got {alpha}, {delta}")
        # Sigma = mu (1 - alpha + 2 alpha h + 4 delta h (1 - h))
        sigma = mu * Polynomial([1.0 - alpha, 2.0 * alpha + 4.0 * delta, -4.0 * delta])
        model = SigmaModel(kind, samples, mu, alpha=alpha, delta=delta, pieces=_single_piece(sigma))
        if not model.gamma > 0.0:
            raise InvalidShape(f"quadratic model needs gamma > 0, got {model.gamma}")
        return model

    # piecewise affine
    mu = sh
    alpha = 1.0 - s0 / mu
    beta = s1 / mu - 1.0
    if not (alpha < 1.0 and beta > -1.0):
        raise InvalidShape(f"piecewise model needs alpha < 1 and beta > -1, got {alpha}, {beta}")
    sigma_left = mu * Polynomial([1.0 - alpha, 2.0 * alpha])
    sigma_right = mu * Polynomial([1.0 - beta, 2.0 * beta])
    return SigmaModel(
        kind, samples, mu, alpha=alpha, beta=beta, pieces=_two_pieces(sigma_left, sigma_right)
    )


def _check_domain(h):
    h_arr = np.asarray(h, dtype=float)
    if np.any(~np.isfinite(h_arr)) or np.any(h_arr < 0.0) or np.any(h_arr > 1.0):
        raise DomainError(f"h must lie in [0, 1], got {h!r}")
    return h_arr


def sigma_eval(model: SigmaModel, h):
    """Evaluate Sigma(h) for the model's representation (scalar or array)."""
    _check_domain(h)
    return model._eval("sigma", h)


def v_eval(model: SigmaModel, h):
    """Evaluate V(h), the solution of V'' = Sigma with V(0) = V(1) = 0."""
    _check_domain(h)
    h_arr = np.asarray(h, dtype=float)
    # h (h - 1) w(h) is exact at both endpoints
    out = h_arr * (h_arr - 1.0) * model.w(h_arr)
    return out if np.ndim(out) else float(out)


def psi_eval(model: SigmaModel, lam: float, h):
    """Evaluate psi_lambda(h) = h (h - 1) - 2 lambda V(h)."""
    _check_domain(h)
    h_arr = np.asarray(h, dtype=float)
    out = h_arr * (1.0 - h_arr) * model.psi_reduced(lam, h_arr)
    return out if np.ndim(out) else float(out)


def _lambda_lower_bound(model: SigmaModel) -> float:
    # lambda_low = max h(h-1) / (2 V) = 1 / (2 min w); w is continuous on [0, 1].
    grid = np.linspace(0.0, 1.0, 4001)
    values = model.w(grid)
    k = int(np.argmin(values))
    best = float(values[k])
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(model.w, bounds=(lo, hi), method="bounded", options={"xatol": 1e-13})
    if res.success and res.fun < best:
        best = float(res.fun)
    return 1.0 / (2.0 * best)


def lambda_lower_bound(model: SigmaModel) -> float:
    """Smallest lambda for which psi_lambda > 0 on (0, 1) (exclusive bound).

    Returns ``max_h h (h - 1) / (2 V(h))`` including the endpoint limits.
    """
    return model.lambda_low


# ---------------------------------------------------------------------------
# root classification


@dataclass(frozen=True)
class HalfFactorization:
    """Root data of one cubic half ``h * (q2 h^2 + q1 h + q0)`` on [0, 1/2].

    For the right half the variable is ``1 - h`` and the parameters are the
    reflected ones (alpha -> -beta, beta -> -alpha).
    """

    tag: HalfTag
    alpha: float
    beta: float
    xi: float
    leading: float
    roots: tuple
    q1: float = math.nan  # monic quadratic factor h^2 + q1 h + q0 (negative-slope halves)
    q0: float = math.nan


@dataclass(frozen=True)
class PsiFactorization:
    """Root structure of psi_lambda for one model and one lambda.

    ``leading`` is the signed leading coefficient. For quartics
    ``psi = leading * h (h - 1) (h - p) (h - g)`` and ``sum_sigma``,
    ``prod_pi``, ``discriminant`` are p + g, p g and (p + g)^2 - 4 p g.
    """

    case_tag: CaseTag
    xi: float
    leading: float
    roots: tuple
    sum_sigma: float = math.nan
    prod_pi: float = math.nan
    discriminant: float = math.nan
    halves: tuple[HalfFactorization, ...] = ()

    def reconstruct(self, h):
        """Evaluate psi from the factorization (used for round-trip checks)."""
        h = np.asarray(h, dtype=float)
        tag = self.case_tag
        if tag is CaseTag.QUADRATIC_CONSTANT:
            return self.leading * h * (h - 1.0)
        if tag is CaseTag.CUBIC_AFFINE:
            if len(self.roots) == 2:
                return self.leading * h * (h - 1.0)
            return self.leading * h * (h - 1.0) * (h - self.roots[2])
        if tag is CaseTag.PIECEWISE_CUBIC_PAIR:
            left, right = self.halves
            return np.where(h <= 0.5, _half_reconstruct(left, h), _half_reconstruct(right, 1.0 - h))
        return self.leading * h * (h - 1.0) * (h * h - self.sum_sigma * h + self.prod_pi)


def _half_reconstruct(half: HalfFactorization, u):
    if half.tag in (HalfTag.LINEAR_XI_EQ_1, HalfTag.LINEAR_XI_GT_1, HalfTag.LINEAR_XI_LT_1):
        slope, const = half.roots
        return u * (slope * u + const)
    if half.tag is HalfTag.OPPOSITE_ROOTS:
        r_minus, r_plus = half.roots
        return half.leading * (u - r_minus) * u * (r_plus - u)
    return half.leading * u * (u * u + half.q1 * u + half.q0)


def stable_quadratic_roots(a: float, b: float, c: float) -> tuple[float, float]:
    """Real roots of a x^2 + b x + c (ascending), avoiding cancellation."""
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        raise ValueError("complex roots")
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    r1 = q / a
    r2 = c / q if q != 0.0 else -r1
    return (r1, r2) if r1 <= r2 else (r2, r1)


def _classify_half(alpha: float, beta: float, xi: float) -> HalfFactorization:
    # psi^0(u) = u * (-(2/3) alpha xi u^2 + c2 u + b0)
    c2 = alpha * xi - xi + 1.0
    b0 = (beta - 5.0 * alpha) / 12.0 * xi + xi - 1.0
    if alpha == 0.0:
        if abs(xi - 1.0) <= _XI_ONE_TOL:
            tag = HalfTag.LINEAR_XI_EQ_1
        elif xi > 1.0:
            tag = HalfTag.LINEAR_XI_GT_1
        else:
            tag = HalfTag.LINEAR_XI_LT_1
        return HalfFactorization(tag, alpha, beta, xi, c2, (c2, b0))
    a0 = 2.0 * abs(alpha) * xi / 3.0
    if alpha > 0.0:
        # a0 (u - r-) u (r+ - u): roots of a0 u^2 - c2 u - b0
        r_minus, r_plus = stable_quadratic_roots(a0, -c2, -b0)
        return HalfFactorization(HalfTag.OPPOSITE_ROOTS, alpha, beta, xi, a0, (r_minus, r_plus))
    q1 = c2 / a0
    q0 = b0 / a0
    disc = q1 * q1 - 4.0 * q0
    if disc < 0.0:
        return HalfFactorization(HalfTag.CONJUGATE_PAIR, alpha, beta, xi, a0, (), q1, q0)
    if abs(disc) <= 1e-12 * (q1 * q1 + abs(q0)) and q1 < 0.0:
        raise NearDegenerate(f"double root of a cubic half at u = {-q1 / 2}")
    r_lo, r_hi = stable_quadratic_roots(1.0, q1, q0)
    tag = HalfTag.POSITIVE_PAIR if q1 < 0.0 else HalfTag.NEGATIVE_PAIR
    return HalfFactorization(tag, alpha, beta, xi, a0, (r_lo, r_hi), q1, q0)


def near_degenerate_threshold(sigma: float) -> float:
    return 1e-9 * (1.0 + sigma * sigma)


def classify_psi(model: SigmaModel, lam: float) -> PsiFactorization:
    """Classify the roots of psi_lambda to select the closed-form integral.

    Raises
    ------
    InfeasibleLambda
        If ``lam`` does not exceed :func:`lambda_lower_bound`.
    NearDegenerate
        If two roots of the quartic (nearly) coincide.
    """
    if not lam > model.lambda_low:
        raise InfeasibleLambda(
            f"lambda={lam!r} is not above the feasibility bound {model.lambda_low!r}"
        )
    xi = model.xi(lam)
    kind = model.kind

    if kind is Kind.CONSTANT:
        return PsiFactorization(CaseTag.QUADRATIC_CONSTANT, xi, -(xi - 1.0), (0.0, 1.0))

    if kind.affine_shaped or (kind is Kind.QUADRATIC and model.delta == 0.0):
        alpha = model.alpha
        # psi = -(2/3) alpha xi * h (h - 1) (h - r),  r = (xi - 1 - alpha xi/3) / (-(2/3) alpha xi)
        if alpha == 0.0:
            return PsiFactorization(CaseTag.CUBIC_AFFINE, xi, -(xi - 1.0), (0.0, 1.0))
        lead = -2.0 * alpha * xi / 3.0
        r = (xi - 1.0 - alpha * xi / 3.0) / lead
        return PsiFactorization(CaseTag.CUBIC_AFFINE, xi, lead, (0.0, 1.0, r))

    if kind is Kind.QUADRATIC:
        alpha, delta = model.alpha, model.delta
        a0 = 2.0 * xi * delta / 3.0
        sigma = (2.0 * xi * (delta + alpha) / 3.0) / a0
        prod = (1.0 - xi + alpha * xi / 3.0 - 2.0 * delta * xi / 3.0) / a0
        disc = sigma * sigma - 4.0 * prod
        if abs(disc) < near_degenerate_threshold(sigma):
            raise NearDegenerate(f"discriminant {disc:.3e} too small at lambda={lam!r}")
        if disc < 0.0:
            im = 0.5 * math.sqrt(-disc)
            roots = (complex(0.5 * sigma, im), complex(0.5 * sigma, -im))
            if sigma == 1.0:
                tag = CaseTag.QUARTIC_COMPLEX_SYMMETRIC
            elif sigma < 1.0:
                tag = CaseTag.QUARTIC_COMPLEX_LEFT
            else:
                tag = CaseTag.QUARTIC_COMPLEX_RIGHT
            return PsiFactorization(tag, xi, a0, roots, sigma, prod, disc)
        p, g = stable_quadratic_roots(1.0, -sigma, prod)
        if delta > 0.0:
            tag = CaseTag.QUARTIC_OPPOSITE_SIGNS
            if not (p < 0.0 < 1.0 < g):
                raise InfeasibleLambda(f"expected p < 0 < 1 < g, got p={p}, g={g}")
        elif sigma > 2.0:
            tag = CaseTag.QUARTIC_SAME_SIGN_ABOVE
        elif sigma < 0.0:
            tag = CaseTag.QUARTIC_SAME_SIGN_BELOW
        else:
            raise InfeasibleLambda(f"real roots p={p}, g={g} straddle or enter (0, 1)")
        return PsiFactorization(tag, xi, a0, (p, g), sigma, prod, disc)

    # piecewise affine: classify each half on its own slope parameter
    xi = lam * model.mu
    left = _classify_half(model.alpha, model.beta, xi)
    right = _classify_half(-model.beta, -model.alpha, xi)
    return PsiFactorization(CaseTag.PIECEWISE_CUBIC_PAIR, xi, math.nan, (), halves=(left, right))
