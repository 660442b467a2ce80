"""Fixed-point coupling of a discrete neutronics eigensolve with the enthalpy update.

Each pass solves the generalized eigenproblem

    (-d^2/dz^2 + 1) phi = lambda Sigma(h) phi,   phi(0) = phi(1) = 0,

for its smallest eigenvalue, normalizes int_0^1 phi dz = 1 and sets
h(z) = int_0^z phi. Both steps share one uniform grid z_i = i / (M + 1):
a second-order central difference for the operator and the trapezoidal
rule for the integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.linalg import cho_solve_banded, cholesky_banded

from .errors import IterationStall, MaxIterExceeded
from .model import SigmaModel, sigma_eval

__all__ = ["CouplingState", "smallest_generalized_eigen", "coupling_iterate", "operator_residual"]


@dataclass(frozen=True)
class CouplingState:
    """History and final fields of one coupling run.

    ``h_delta_seq[n]`` is |h_{n+1} - h_n|_inf after pass n + 1, ``ratios``
    are consecutive quotients of it (the empirical contraction constant),
    and ``psi_norms`` the trapezoidal L2 norms of sqrt(Sigma(h_n)) phi_n.
    """

    grid_m: int
    z: np.ndarray
    h: np.ndarray
    phi: np.ndarray
    lambda0: float
    lambda_seq: tuple[float, ...]
    h_delta_seq: tuple[float, ...]
    psi_norms: tuple[float, ...]
    converged: bool

    @property
    def iterations(self) -> int:
        return len(self.lambda_seq)

    @property
    def lam(self) -> float:
        return self.lambda_seq[-1] if self.lambda_seq else self.lambda0

    @property
    def keff(self) -> float:
        return 1.0 / self.lam

    @property
    def ratios(self) -> tuple[float, ...]:
        d = self.h_delta_seq
        return tuple(d[i + 1] / d[i] for i in range(len(d) - 1) if d[i] > 0.0)

    @property
    def keff_steps(self) -> tuple[float, ...]:
        seq = (self.lambda0,) + self.lambda_seq
        return tuple(abs(1.0 / b - 1.0 / a) for a, b in zip(seq[:-1], seq[1:]))


def _interior(sigma_field, m):
    sig = np.asarray(sigma_field, dtype=float)
    if sig.ndim == 0:
        sig = np.full(m, float(sig))
    elif sig.size == m + 2:
        sig = sig[1:-1]
    elif sig.size != m:
        raise ValueError(f"sigma field must have M={m} or M+2={m + 2} values, got {sig.size}")
    if not np.all(sig > 0.0) or not np.all(np.isfinite(sig)):
        raise ValueError("sigma field must be positive and finite")
    return sig


def smallest_generalized_eigen(sigma_field, grid_m: int, rtol: float = 1e-12, max_iter: int = 500):
    """Smallest eigenvalue and eigenvector of (-D2 + I) phi = lambda diag(Sigma) phi.

    Works on the symmetric form D^{-1/2} A D^{-1/2} with D = diag(Sigma)
    by inverse power iteration with one banded Cholesky factorization.

    Returns
    -------
    lam : float
    phi : ndarray, shape (grid_m + 2,)
        Zero at both boundaries, positive inside, unit trapezoidal integral.

    Raises
    ------
    IterationStall
        If the iteration does not settle within ``max_iter`` steps.
    """
    m = int(grid_m)
    if m < 2:
        raise ValueError("grid_m must be at least 2")
    sig = _interior(sigma_field, m)
    dz = 1.0 / (m + 1)
    inv = 1.0 / np.sqrt(sig)
    diag = (2.0 / dz**2 + 1.0) * inv * inv
    off = -inv[:-1] * inv[1:] / dz**2
    upper = np.zeros((2, m))
    upper[0, 1:] = off
    upper[1] = diag
    factor = cholesky_banded(upper)

    def rayleigh(x):
        # energy form of x^T A x: sums of squares, no cancellation against 2/dz^2
        u = np.concatenate(([0.0], x * inv, [0.0]))
        return (np.sum(np.diff(u) ** 2) / dz**2 + np.sum(u[1:-1] ** 2)) / (x @ x)

    x = np.sqrt(sig) * np.sin(np.pi * dz * np.arange(1, m + 1))
    x /= np.linalg.norm(x)
    theta = rayleigh(x)
    prev_step = np.inf
    for _ in range(max_iter):
        y = cho_solve_banded((factor, False), x)
        y /= np.linalg.norm(y)
        if y[0] < 0.0:
            y = -y
        theta_new = rayleigh(y)
        step = np.max(np.abs(y - x))
        x = y
        # the vector lags the Rayleigh quotient (its error is the square
        # root), so require both to have settled; on fine grids rounding
        # may floor the step above rtol, detected as the step not shrinking
        settled = abs(theta_new - theta) <= rtol * theta_new
        theta = theta_new
        if settled and (step <= rtol or step > 0.5 * prev_step):
            break
        prev_step = step
    else:
        raise IterationStall(f"inverse iteration did not settle in {max_iter} steps")

    phi = np.zeros(m + 2)
    phi[1:-1] = x * inv
    phi /= dz * np.sum(phi)  # trapezoid with zero boundary values
    return float(theta), phi


def operator_residual(lam: float, sigma_field, phi) -> float:
    """|(-D2 + I) phi - lam Sigma phi|_inf relative to |phi|_inf on the interior nodes."""
    phi = np.asarray(phi, dtype=float)
    m = phi.size - 2
    sig = _interior(sigma_field, m)
    dz = 1.0 / (m + 1)
    lap = (2.0 * phi[1:-1] - phi[:-2] - phi[2:]) / dz**2
    res = lap + phi[1:-1] - lam * sig * phi[1:-1]
    return float(np.max(np.abs(res)) / np.max(np.abs(phi)))


def _integrate(phi, z):
    return cumulative_trapezoid(phi, z, initial=0.0)


def coupling_iterate(
    model: SigmaModel,
    grid_m: int = 800,
    tol: float = 1e-10,
    max_iter: int = 200,
    strict: bool = False,
) -> CouplingState:
    """Alternate eigensolves and enthalpy updates until h stops moving.

    Pass 0 uses the constant cross section Sigma(0); pass n >= 1 uses
    Sigma(h_n). Stops when |h_{n+1} - h_n|_inf <= tol. Non-convergence is
    reported through ``converged=False`` unless ``strict`` is set, in which
    case MaxIterExceeded is raised.
    """
    if grid_m < 10:
        raise ValueError("grid_m must be at least 10")
    if not tol > 0:
        raise ValueError("tol must be positive")
    z = np.linspace(0.0, 1.0, grid_m + 2)
    dz = 1.0 / (grid_m + 1)

    sigma0 = float(sigma_eval(model, 0.0))
    lambda0, phi = smallest_generalized_eigen(sigma0, grid_m)
    h = _integrate(phi, z)

    lams, deltas, norms = [], [], []
    converged = False
    for _ in range(max_iter):
        sig = sigma_eval(model, np.clip(h, 0.0, 1.0))
        lam, phi = smallest_generalized_eigen(sig, grid_m)
        h_next = _integrate(phi, z)
        lams.append(lam)
        deltas.append(float(np.max(np.abs(h_next - h))))
        norms.append(float(np.sqrt(dz * np.sum(sig * phi * phi))))
        h = h_next
        if deltas[-1] <= tol:
            converged = True
            break

    state = CouplingState(
        grid_m=grid_m,
        z=z,
        h=h,
        phi=phi,
        lambda0=lambda0,
        lambda_seq=tuple(lams),
        h_delta_seq=tuple(deltas),
        psi_norms=tuple(norms),
        converged=converged,
    )
    if strict and not converged:
        raise MaxIterExceeded(f"coupling did not converge in {max_iter} passes (last delta {deltas[-1]:.3e})")
    return state
