"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line (also collected in the pytest
terminal summary) and fails if the criterion is not met.
"""

import math
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from thermoneutronic.analytic import integral_I, integral_I_quadrature, reconstruct_profiles, solve_lambda
from thermoneutronic.cn import build_mesh, discrete_sum, solve_lambda_discrete
from thermoneutronic.coupling import coupling_iterate
from thermoneutronic.elliptic import ellik_complete, ellik_incomplete
from thermoneutronic.model import CaseTag, HalfTag, Kind, build_model, classify_psi, make_samples

SAMPLES = make_samples(8.0, 6.0, 3.0)
C = 1.86593
LAMBDA_TABLE = {
    Kind.CONSTANT: 1.89036,
    Kind.AFFINE: 1.99533,
    Kind.QUADRATIC: 1.86593,
    Kind.PIECEWISE_AFFINE: 1.89454,
    Kind.SEMI_ANALYTIC_QUADRATIC: 1.85769,
    Kind.SEMI_ANALYTIC_PIECEWISE: 1.88614,
}
KEFF_TABLE = {
    Kind.CONSTANT: 0.98708,
    Kind.AFFINE: 0.93515,
    Kind.QUADRATIC: 1.00000,
    Kind.PIECEWISE_AFFINE: 0.98490,
    Kind.SEMI_ANALYTIC_QUADRATIC: 1.00444,
    Kind.SEMI_ANALYTIC_PIECEWISE: 0.98928,
}
# one parameter set per dispatch branch: (samples, kind, lambda inside the branch)
BRANCH_SETS = [
    ((8, 6, 3), Kind.QUADRATIC, 1.9),  # opposite-sign real roots
    ((1, 0.3, 1), Kind.QUADRATIC, 3.0),  # complex pair, symmetric
    ((1, 0.5, 2), Kind.QUADRATIC, 3.0),  # complex pair, sigma < 1
    ((2, 0.5, 1), Kind.QUADRATIC, 3.0),  # complex pair, sigma > 1
    ((1.5, 0.9, 0.5), Kind.QUADRATIC, 1.4),  # same-sign roots above 1
    ((0.5, 0.9, 1.5), Kind.QUADRATIC, 1.4),  # same-sign roots below 0
    ((1, 1, 2), Kind.PIECEWISE_AFFINE, 1.0),  # flat half with xi = 1
    ((6, 6, 3), Kind.PIECEWISE_AFFINE, 1.9),  # flat half with xi > 1
    ((1, 1, 2), Kind.PIECEWISE_AFFINE, 0.95),  # flat half with xi < 1, conjugate pair
    ((2, 1, 1), Kind.PIECEWISE_AFFINE, 0.95),  # same, mirrored
    ((8, 6, 3), Kind.PIECEWISE_AFFINE, 1.9),  # positive pair, opposite roots
    ((1, 2, 1), Kind.PIECEWISE_AFFINE, 1.0),  # opposite roots on both halves
    ((11, 6, 11), Kind.PIECEWISE_AFFINE, 0.5),  # conjugate pair on both halves
    ((11, 6, 11), Kind.PIECEWISE_AFFINE, 1.2),  # positive pair on both halves
    ((2, 1, 50), Kind.PIECEWISE_AFFINE, 0.2),  # negative pair, left half
    ((50, 1, 2), Kind.PIECEWISE_AFFINE, 0.2),  # negative pair, right half
]


def _orders(errs, ns):
    return [math.log(e0 / e1) / math.log(n1 / n0) for e0, e1, n0, n1 in zip(errs, errs[1:], ns, ns[1:])]


def test_criterion_1_lambda_table(verdict):
    t0 = time.perf_counter()
    got = {k: solve_lambda(build_model(SAMPLES, k)).lam for k in Kind}
    elapsed = time.perf_counter() - t0
    worst = max(abs(got[k] - LAMBDA_TABLE[k]) for k in Kind)
    verdict(1, worst <= 2e-4 and elapsed < 1.0, f"lambda table max |diff| {worst:.2e} (tol 2e-4), {elapsed:.3f} s (< 1 s)")


def test_criterion_2_keff_table(verdict):
    scaled = make_samples(14.92744, 11.19558, 5.59779)
    keff = {k: solve_lambda(build_model(scaled, k)).keff for k in Kind}
    worst = max(abs(keff[k] - KEFF_TABLE[k]) for k in Kind)
    # homogeneity: lambda(c sigma) * c == lambda(sigma)
    homog = max(
        abs(solve_lambda(build_model(scaled, k), n_profile=0).lam * C / solve_lambda(build_model(SAMPLES, k), n_profile=0).lam - 1.0)
        for k in Kind
    )
    verdict(2, worst <= 1e-4 and homog <= 1e-10, f"k_eff max |diff| {worst:.2e} (tol 1e-4), homogeneity {homog:.1e} (tol 1e-10)")


def test_criterion_3_constant_closed_form(verdict):
    rng = np.random.default_rng(20240521)
    lam_err = prof_err = 0.0
    for mu in rng.uniform(0.5, 50.0, 20):
        model = build_model(make_samples(mu, mu, mu), Kind.CONSTANT)
        res = solve_lambda(model, n_profile=0)
        lam_err = max(lam_err, abs(res.lam * mu / (1.0 + math.pi**2) - 1.0))
        z, h, phi = reconstruct_profiles(model, res.lam, 257).T
        prof_err = max(prof_err, np.max(np.abs(h - 0.5 * (1.0 - np.cos(math.pi * z)))))
        prof_err = max(prof_err, np.max(np.abs(phi - 0.5 * math.pi * np.sin(math.pi * z))))
    verdict(3, lam_err <= 1e-10 and prof_err <= 1e-8, f"lambda mu = 1 + pi^2 rel err {lam_err:.1e} (tol 1e-10), profiles {prof_err:.1e} (tol 1e-8)")


def _integral(model, lam):
    # same fallback the solver uses at near-double roots
    try:
        return integral_I(model, lam)
    except ArithmeticError:
        return integral_I_quadrature(model, lam, rtol=1e-12)


def _ladder(model, lam_b):
    low = model.lambda_low * (1.0 + 1e-3)
    lo = max(low, 0.9 * lam_b)
    pts = np.geomspace(lo, 1.1 * lam_b, 24)
    return np.sort(np.append(pts, lam_b))


def test_criterion_4_oracle_equivalence(verdict):
    worst, count = 0.0, 0
    cases, halves = set(), set()

    def compare(model, lams):
        nonlocal worst, count
        for lam in lams:
            fact = classify_psi(model, lam)
            cases.add(fact.case_tag)
            halves.update(h.tag for h in fact.halves)
            exact = integral_I(model, lam)
            oracle = integral_I_quadrature(model, lam, rtol=1e-12)
            worst = max(worst, abs(exact / oracle - 1.0))
            count += 1

    for kind in Kind:
        model = build_model(SAMPLES, kind)
        compare(model, model.lambda_low * np.geomspace(1.01, 50.0, 25))
    for samples, kind, lam in BRANCH_SETS:
        model = build_model(make_samples(*samples), kind)
        compare(model, _ladder(model, lam))

    want_cases = set(CaseTag) - {CaseTag.QUADRATURE_FALLBACK}
    missing = sorted(t.value for t in (want_cases - cases) | (set(HalfTag) - halves))
    ok = worst <= 1e-8 and not missing
    verdict(4, ok, f"{count} ladder points, max rel diff {worst:.1e} (tol 1e-8), uncovered branches: {missing or 'none'}")


def test_criterion_5_cn_second_order(verdict):
    ns = [40 * 2**k for k in range(6)]
    t0 = time.perf_counter()
    orders = {}
    for kind in (Kind.CONSTANT, Kind.QUADRATIC, Kind.PIECEWISE_AFFINE):
        model = build_model(SAMPLES, kind)
        ref = solve_lambda(model, n_profile=0).lam
        errs = [abs(solve_lambda_discrete(model, n).lam - ref) for n in ns]
        orders[kind.value] = _orders(errs, ns)
    elapsed = time.perf_counter() - t0
    flat = [o for v in orders.values() for o in v]
    ok = all(1.8 <= o <= 2.2 for o in flat) and elapsed < 5.0
    verdict(5, ok, f"observed orders in [{min(flat):.3f}, {max(flat):.3f}] (need [1.8, 2.2]), {elapsed:.2f} s (< 5 s)")


def test_criterion_6_coupling(verdict):
    model = build_model(SAMPLES, Kind.QUADRATIC)
    ref = solve_lambda(model, n_profile=0).lam
    st800 = coupling_iterate(model, grid_m=800, tol=1e-10)
    errs = [abs(coupling_iterate(model, grid_m=m, tol=1e-10).lam - ref) for m in (200, 400)] + [abs(st800.lam - ref)]
    ratios = [e0 / e1 for e0, e1 in zip(errs, errs[1:])]
    ok = st800.converged and st800.h_delta_seq[-1] <= 1e-10 and errs[-1] <= 5e-3 and all(3.0 <= r <= 5.0 for r in ratios)
    verdict(
        6,
        ok,
        f"M=800 converged in {st800.iterations} passes, |lambda - lambda*| {errs[-1]:.2e} (tol 5e-3), "
        f"error ratios {', '.join(f'{r:.3f}' for r in ratios)} (about 4)",
    )


# quad flags roundoff near the 1e-14 request yet still meets it; the comparison is what counts
@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
def test_criterion_7_elliptic(verdict):
    rng = np.random.default_rng(7)
    phis = rng.uniform(0.0, 0.5 * math.pi, 200)
    ms = rng.uniform(-50.0, 0.999, 200)
    worst = 0.0
    for phi, m in zip(phis, ms):
        ref, _ = quad(lambda t: 1.0 / math.sqrt(1.0 - m * math.sin(t) ** 2), 0.0, phi, epsabs=1e-14, epsrel=1e-14, limit=200)
        worst = max(worst, abs(ellik_incomplete(phi, m) / ref - 1.0))
    k0 = abs(ellik_complete(0.0) - 0.5 * math.pi)
    verdict(7, worst <= 1e-12 and k0 <= 1e-15, f"F(phi|m) max rel err {worst:.1e} (tol 1e-12), |K(0) - pi/2| {k0:.1e} (tol 1e-15)")


positive = st.floats(0.3, 30.0)


def test_criterion_8_invariance(verdict):
    kinds = list(Kind)
    t0 = time.perf_counter()
    failures = []

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(positive, positive, positive, st.sampled_from(kinds))
    def reversal(s0, sh, s1, kind):
        try:
            a = solve_lambda(build_model(make_samples(s0, sh, s1), kind), n_profile=0).lam
            b = solve_lambda(build_model(make_samples(s1, sh, s0), kind), n_profile=0).lam
        except ValueError:  # non-positive semi-analytic projection
            return
        assert abs(a / b - 1.0) <= 1e-10

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(positive, positive, positive, st.floats(0.05, 20.0), st.sampled_from(kinds))
    def homogeneity(s0, sh, s1, c, kind):
        try:
            model = build_model(make_samples(s0, sh, s1), kind)
        except ValueError:
            return
        a = solve_lambda(model, n_profile=0).lam
        b = solve_lambda(build_model(make_samples(c * s0, c * sh, c * s1), kind), n_profile=0).lam
        assert abs(b * c / a - 1.0) <= 1e-12

    @settings(max_examples=20, deadline=None, derandomize=True)
    @given(positive, positive, positive, st.sampled_from(kinds))
    def monotone(s0, sh, s1, kind):
        try:
            model = build_model(make_samples(s0, sh, s1), kind)
        except ValueError:
            return
        lams = model.lambda_low * np.geomspace(1.001, 100.0, 30)
        vals = [_integral(model, x) for x in lams]
        assert np.all(np.diff(vals) < 0)
        mesh = build_mesh(64)
        sums = [discrete_sum(model, x, mesh) for x in lams]
        assert np.all(np.diff(sums) < 0)

    @settings(max_examples=15, deadline=None, derandomize=True)
    @given(positive, positive, st.sampled_from([Kind.CONSTANT, Kind.QUADRATIC, Kind.PIECEWISE_AFFINE]), st.integers(4, 200))
    def mesh_symmetry(s, sh, kind, n):
        sol = solve_lambda_discrete(build_model(make_samples(s, sh, s), kind), n)
        assert np.max(np.abs(sol.z + sol.z[::-1] - 1.0)) <= 1e-12
        assert np.max(np.abs(sol.phi - sol.phi[::-1])) <= 1e-12 * np.max(sol.phi)

    for prop in (reversal, homogeneity, monotone, mesh_symmetry):
        try:
            prop()
        except Exception as exc:  # report every failing property on the one line
            failures.append(f"{prop.__name__}: {type(exc).__name__}")
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 10.0
    verdict(8, ok, f"reversal, homogeneity, monotone I and S, mesh symmetry: {'; '.join(failures) or 'all hold'}, {elapsed:.2f} s (< 10 s)")
