"""Elliptic integrals of the first kind for every parameter m < 1.

The incomplete integral

    F(phi, m) = int_0^phi dtheta / sqrt(1 - m sin^2 theta)

is evaluated through Carlson's symmetric form R_F with the duplication
theorem; the complete integral K(m) = F(pi/2, m) is evaluated
independently with the arithmetic-geometric mean. Negative parameters
(which arise from complex-conjugate root pairs) need no special casing
in either route.

Argument order is always ``(phi, m)``: amplitude first, parameter second.
"""

import math

from .errors import ParameterOutOfRange

__all__ = ["carlson_rf", "ellik_incomplete", "ellik_complete"]

_EPS = 2.220446049250313e-16
# Carlson (1995): stopping when 4**-n * Q < |A_n| gives relative error ~ r.
_RF_SCALE = (3.0 * _EPS) ** (-1.0 / 6.0)


def carlson_rf(x, y, z):
    """Carlson's symmetric elliptic integral of the first kind R_F(x, y, z).

    At most one of the arguments may be zero; all must be non-negative.
    """
    if min(x, y, z) < 0.0 or (x == 0.0) + (y == 0.0) + (z == 0.0) > 1:
        raise ParameterOutOfRange(f"R_F needs non-negative arguments with at most one zero, got {(x, y, z)}")
    a0 = (x + y + z) / 3.0
    q = _RF_SCALE * max(abs(a0 - x), abs(a0 - y), abs(a0 - z))
    a = a0
    xn, yn, zn = x, y, z
    scale = 1.0
    while scale * q >= abs(a):
        sx, sy, sz = math.sqrt(xn), math.sqrt(yn), math.sqrt(zn)
        lam = sx * sy + sy * sz + sz * sx
        xn = 0.25 * (xn + lam)
        yn = 0.25 * (yn + lam)
        zn = 0.25 * (zn + lam)
        a = 0.25 * (a + lam)
        scale *= 0.25
    dx = (a0 - x) * scale / a
    dy = (a0 - y) * scale / a
    dz = -dx - dy
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    series = 1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0
    return series / math.sqrt(a)


def _check_parameter(m):
    if not m < 1.0:
        raise ParameterOutOfRange(f"elliptic parameter must satisfy m < 1, got {m!r}")


def ellik_incomplete(phi, m):
    """Incomplete elliptic integral of the first kind F(phi, m).

    Parameters
    ----------
    phi : float
        Amplitude in [0, pi/2].
    m : float
        Parameter, any real value below 1 (negative values allowed).

    Returns
    -------
    float
        The value of the defining integral.

    Raises
    ------
    ParameterOutOfRange
        If ``m >= 1`` or ``phi`` lies outside [0, pi/2].
    """
    _check_parameter(m)
    # Small slack so that amplitudes computed as pi/2 by arcsin/arctan pass.
    if not (0.0 <= phi <= 0.5 * math.pi * (1.0 + 4.0 * _EPS)):
        raise ParameterOutOfRange(f"amplitude must lie in [0, pi/2], got {phi!r}")
    if phi == 0.0:
        return 0.0
    s = math.sin(phi)
    c = math.cos(phi)
    return s * carlson_rf(c * c, 1.0 - m * s * s, 1.0)


def ellik_complete(m, mc=None):
    """Complete elliptic integral of the first kind K(m), via the AGM.

    ``mc`` optionally supplies 1 - m directly; near m = 1 this avoids the
    cancellation in forming it, which K amplifies logarithmically.
    """
    if mc is None:
        _check_parameter(m)
        mc = 1.0 - m
    elif not mc > 0.0:
        raise ParameterOutOfRange(f"complementary parameter must be positive, got {mc!r}")
    a, b = 1.0, math.sqrt(mc)
    for _ in range(64):  # quadratic convergence; the cap only guards last-bit cycling
        if abs(a - b) <= 2.0 * _EPS * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * math.pi / (0.5 * (a + b))
