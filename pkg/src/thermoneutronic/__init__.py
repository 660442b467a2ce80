"""Criticality of a 1D neutronics/thermohydraulics coupled model.

The eigenvalue lambda = 1/k_eff of

    -phi'' + phi = lambda Sigma(h) phi,   h' = phi,
    h(0) = 0, h(1) = 1, phi(0) = phi(1) = 0,

is obtained three ways: exactly through elliptic integrals
(:mod:`.analytic`), through a Crank-Nicolson sum on an enthalpy mesh
(:mod:`.cn`), and through a fixed-point coupling of a finite-difference
eigensolve with the enthalpy update (:mod:`.coupling`).
"""

from .analytic import (
    HomographicMap,
    SolveResult,
    build_homographic_map,
    integral_I,
    integral_I_quadrature,
    reconstruct_profiles,
    solve_lambda,
)
from .cn import DiscreteSolution, build_mesh, convergence_study, discrete_sum, solve_lambda_discrete
from .coupling import CouplingState, coupling_iterate, smallest_generalized_eigen
from .elliptic import carlson_rf, ellik_complete, ellik_incomplete
from .errors import *  # noqa: F403
from .model import (
    CaseTag,
    HalfTag,
    Kind,
    PsiFactorization,
    SigmaModel,
    SigmaSamples,
    build_model,
    classify_psi,
    lambda_lower_bound,
    make_samples,
    psi_eval,
    sigma_eval,
    v_eval,
)

__version__ = "0.1.0"
