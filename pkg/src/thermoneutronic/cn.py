"""Direct discrete solve on a sin^2-graded enthalpy mesh.

Integrating dz/dh = 1 / sqrt(psi_lambda(h)) with the Crank-Nicolson rule
on a fixed enthalpy mesh turns the whole coupled problem into one scalar
equation

    S(lambda) = sum_j (h_{j+1} - h_j) / (0.5 (phi_j + phi_{j+1})) = 1,
    phi_j = sqrt(psi_lambda(h_j)).

The mesh h_j = sin^2(pi j / 2N) makes the endpoint singularities of
1/sqrt(psi) harmless and keeps the scheme second order; the space mesh z_j
is an output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import sin2_grid
from .errors import InfeasibleBracket, InfeasibleLambda, MeshTooSmall, NoConvergence
from .model import SigmaModel

__all__ = [
    "DiscreteSolution",
    "build_mesh",
    "discrete_sum",
    "solve_lambda_discrete",
    "convergence_study",
]


@dataclass(frozen=True)
class _Mesh:
    n: int
    h: np.ndarray
    dh: np.ndarray
    # sin(pi j / 2N) cos(pi j / 2N) = sqrt(h_j (1 - h_j)), exact zeros at both ends
    sc: np.ndarray


@dataclass(frozen=True)
class DiscreteSolution:
    n: int
    lam: float
    h: np.ndarray
    z: np.ndarray
    phi: np.ndarray
    residual: float
    iterations: int

    @property
    def keff(self) -> float:
        return 1.0 / self.lam


def _mesh(n: int) -> _Mesh:
    if n < 2:
        raise MeshTooSmall(f"mesh needs at least 2 cells, got {n}")
    j = np.arange(n + 1)
    h, s, c = sin2_grid(j / n)
    # h_{j+1} - h_j = sin(A + B) sin(A - B), no cancellation near the ends
    a = 0.5 * np.pi * (j[1:] + j[:-1]) / n
    b = 0.5 * np.pi / n
    dh = np.sin(a) * np.sin(b)
    return _Mesh(n, h, dh, s * c)


def build_mesh(n: int) -> np.ndarray:
    """Nodes h_j = sin^2(pi j / 2n), j = 0..n, with exact endpoints 0 and 1."""
    return _mesh(n).h


def _reduced(model, lam, mesh):
    r = model.psi_reduced(lam, mesh.h[1:-1])
    if np.any(r < 0.0):
        raise InfeasibleLambda(f"psi_lambda < 0 at a mesh node for lambda={lam!r}")
    return r


def _phi(model, lam, mesh):
    phi = np.zeros(mesh.n + 1)
    phi[1:-1] = mesh.sc[1:-1] * np.sqrt(_reduced(model, lam, mesh))
    return phi


def _sum_and_slope(model, lam, mesh):
    r = _reduced(model, lam, mesh)
    root = np.sqrt(r)
    phi = np.zeros(mesh.n + 1)
    phi[1:-1] = mesh.sc[1:-1] * root
    # d phi_j / d lambda = -V_j / phi_j = sc_j w_j / sqrt(R_j); zero at the ends
    dphi = np.zeros(mesh.n + 1)
    dphi[1:-1] = mesh.sc[1:-1] * model.w(mesh.h[1:-1]) / root
    avg = 0.5 * (phi[1:] + phi[:-1])
    davg = 0.5 * (dphi[1:] + dphi[:-1])
    return float(np.sum(mesh.dh / avg)), float(-np.sum(mesh.dh * davg / (avg * avg)))


def discrete_sum(model: SigmaModel, lam: float, mesh) -> float:
    """S(lambda) on ``mesh`` (a node count or the array from :func:`build_mesh`).

    Raises
    ------
    InfeasibleLambda
        If psi_lambda is negative at some interior node.
    """
    if not isinstance(mesh, _Mesh):
        mesh = _mesh(int(mesh) if np.ndim(mesh) == 0 else len(mesh) - 1)
    return _sum_and_slope(model, lam, mesh)[0]


def _node_threshold(model, mesh):
    w = model.w(mesh.h[1:-1])
    return 1.0 / (2.0 * float(np.min(w)))


def solve_lambda_discrete(model: SigmaModel, n: int, tol: float = 1e-12, max_iter: int = 100) -> DiscreteSolution:
    """Solve S(lambda) = 1 by safeguarded Newton on a bracket.

    Raises
    ------
    InfeasibleBracket
        If no sign change of S - 1 can be bracketed.
    NoConvergence
        If ``max_iter`` iterations do not reach ``|S - 1| <= tol``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    mesh = _mesh(n)

    def value(lam):
        return _sum_and_slope(model, lam, mesh)[0]

    # S stays finite at lambda_low when no node sits at the minimum of w,
    # so the root may lie below it; the node threshold is the true limit.
    left = None
    for base in (model.lambda_low, _node_threshold(model, mesh)):
        for eps in (1e-6, 1e-9, 1e-12):
            lam = base * (1.0 + eps)
            try:
                if value(lam) > 1.0:
                    left = lam
                    break
            except InfeasibleLambda:
                continue
        if left is not None:
            break
    if left is None:
        raise InfeasibleBracket("S(lambda) <= 1 just above the feasibility threshold")
    right = max(left, model.lambda_low) * 1.5
    for _ in range(200):
        if value(right) < 1.0:
            break
        left, right = right, 2.0 * right
    else:
        raise InfeasibleBracket("could not find lambda with S(lambda) < 1")

    lam = (1.0 + math.pi**2) / model.mean_sigma
    if not left < lam < right:
        lam = 0.5 * (left + right)
    for it in range(1, max_iter + 1):
        s, slope = _sum_and_slope(model, lam, mesh)
        res = s - 1.0
        if abs(res) <= tol:
            break
        if res > 0.0:
            left = lam
        else:
            right = lam
        step = lam - res / slope if slope < 0.0 else math.nan
        lam = step if left < step < right else 0.5 * (left + right)
    else:
        raise NoConvergence(f"discrete solve did not reach tol={tol:.1e} in {max_iter} iterations")

    phi = _phi(model, lam, mesh)
    z = np.concatenate([[0.0], np.cumsum(mesh.dh / (0.5 * (phi[1:] + phi[:-1])))])
    return DiscreteSolution(n, lam, mesh.h, z, phi, abs(res), it)


def convergence_study(model: SigmaModel, n_list, lambda_ref: float):
    """Errors |lambda_N - lambda_ref| and observed orders between consecutive meshes.

    Returns a list of ``(n, error, order)``; ``order`` is None for the first
    entry and whenever it is undefined (repeated n or zero error).
    """
    rows = []
    prev = None
    for n in n_list:
        err = abs(solve_lambda_discrete(model, n).lam - lambda_ref)
        order = None
        if prev is not None and n != prev[0] and err > 0.0 and prev[1] > 0.0:
            order = math.log(prev[1] / err) / math.log(n / prev[0])
        rows.append((n, err, order))
        prev = (n, err)
    return rows
