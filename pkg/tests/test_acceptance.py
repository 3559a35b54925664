"""Acceptance criteria AC-1 ... AC-9, one test each.

Every test prints a single PASS/FAIL line (also listed in the terminal
summary) with the measured quantity next to its threshold, then asserts.
Runtime budgets are part of the criteria.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from fracwright import WrightParams, wright_phi, wright_type_e
from fracwright.cli import parse_problem
from fracwright.fundsol import ProblemSpec, QuadratureConfig, fundamental_G, phi_alpha_delta, phi_alpha_delta_grid, phi_bound
from fracwright.matfun import matrix_wright, matrix_wright_jordan, max_abs
from fracwright.solver import (
    BoundaryData,
    SourceTerm,
    residual_study,
    solve_on_grid,
    uniform_axes,
    verify_boundary_limit,
    verify_pde_residual,
    zero_data,
)
from fracwright.catalog import Polynomial, Zero
from fracwright.fraccalc import GridFunction1D, rl_derivative
from fracwright.wright import UNBOUNDED_SERIES, reciprocal_gamma
from acceptance_log import record
from checks import kernel_pde_residual, matrix_integral, moment, moment_exact, orders, random_jordan
from oracles import ml_kernel_m1, mp_mittag_leffler

PROBLEMS = Path(__file__).resolve().parent.parent / "demos" / "problems"
AC7_FILES = ("mittag_leffler_m1.json", "unit_source_m2.json", "coupled_system_m2n2.json")


class Clock:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start


def conclude(name, checks, detail, clock, budget):
    within = clock.seconds < budget if budget else True
    ok = all(checks) and within
    record(name, ok, detail + (f"; runtime {clock.seconds:.1f} s (< {budget:g} s)" if budget else ""), clock.seconds)
    assert all(checks), detail
    assert within, f"runtime {clock.seconds:.1f} s exceeds {budget} s"


def test_ac1_scalar_identities():
    rng = np.random.default_rng(11)
    with Clock() as clock:
        # value at zero
        zero_err = 0.0
        for _ in range(200):
            rho, mu = rng.uniform(-0.99, 2.0), rng.uniform(-3.0, 3.0)
            zero_err = max(zero_err, abs(wright_phi(WrightParams(rho, mu), 0.0) - reciprocal_gamma(mu)))
        # d/dz phi(rho, mu; z) = phi(rho, mu + rho; z) against central differences
        shift_err = 0.0
        for _ in range(200):
            rho, mu, z = rng.uniform(-0.95, 1.5), rng.uniform(-2.0, 2.0), rng.uniform(-5.0, 5.0)
            p, e = WrightParams(rho, mu), 1e-5
            fd = (wright_phi(p, z + e) - wright_phi(p, z - e)) / (2 * e)
            exact = wright_phi(WrightParams(rho, mu + rho), z)
            shift_err = max(shift_err, abs(fd - exact) / max(abs(exact), abs(wright_phi(p, z)), 1e-3))
        # moments
        mom_err = 0.0
        for beta in (0.3, 0.5, 0.7):
            for mu in (0.0, 0.5, 1.0):
                for n in range(4):
                    ref = moment_exact(beta, mu, n)
                    mom_err = max(mom_err, abs(moment(beta, mu, n) - ref) / abs(ref))
    detail = f"value at zero {zero_err:.1e} (<= 1e-14), derivative shift {shift_err:.1e} (<= 1e-6), moments rel {mom_err:.1e} (<= 1e-8)"
    conclude("AC-1", [zero_err <= 1e-14, shift_err <= 1e-6, mom_err <= 1e-8], detail, clock, 10)


def test_ac2_matrix_series_vs_jordan():
    with Clock() as clock:
        worst = 0.0
        for seed in range(50):
            rng = np.random.default_rng(seed)
            jf = random_jordan(rng, int(rng.integers(2, 7)))
            A = jf.matrix()
            p = WrightParams(-float(rng.uniform(0.2, 0.8)), float(rng.uniform(-0.5, 1.5)))
            for z in (-0.3, -2.0, -8.0):
                worst = max(worst, max_abs(matrix_wright(p, A, z) - matrix_wright_jordan(p, jf, z)))
    conclude("AC-2", [worst <= 1e-8], f"50 matrices, max-abs {worst:.1e} (<= 1e-8)", clock, 10)


def test_ac3_matrix_integral_identity():
    from fracwright.matfun import JordanForm

    mats = [
        np.diag([0.5, 1.7, 3.0]),
        np.array([[0.8, 1.0], [0.0, 0.8]]),
        JordanForm.from_blocks([(0.5, 2), (2.5, 1)], np.array([[1.0, 0.3, 0.0], [0.2, 1.0, 0.4], [0.0, 0.5, 1.0]])).matrix(),
    ]
    with Clock() as clock:
        worst, count = 0.0, 0
        for beta in (0.4, 0.6):
            for mu in (0.0, 1.0):
                for A in mats:
                    val, ref = matrix_integral(beta, mu, A)
                    worst = max(worst, max_abs(val - ref))
                    count += 1
    conclude("AC-3", [count == 12, worst <= 1e-6], f"{count} combinations, max-abs {worst:.1e} (<= 1e-6)", clock, 30)


def _scalar_equation_residuals(beta, mu, lam, pts, steps):
    p = WrightParams(-beta, mu)

    def K(z, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(y.shape)
        pos = y > 0
        out[pos] = y[pos] ** (mu - 1) * wright_phi(p, -lam * z * y[pos] ** -beta, UNBOUNDED_SERIES)
        return out

    res = []
    for h in steps:
        worst = 0.0
        for z, y in pts:
            n = int(round(y / h))
            D = rl_derivative(GridFunction1D.sample(lambda s: K(z, s), h, n), beta).values[-1]
            e = 1e-5
            dz = (K(z + e, [n * h])[0] - K(z - e, [n * h])[0]) / (2 * e)
            worst = max(worst, abs(dz + lam * D))
        res.append(worst)
    return res


def test_ac4_kernel_equations():
    steps = (4e-3, 2e-3, 1e-3)
    rng = np.random.default_rng(5)
    A = np.array([[1.5, 0.5], [0.5, 1.5]])
    with Clock() as clock:
        lines, checks = [], []
        for beta, mu in ((0.5, 1.0), (0.4, 0.5), (0.7, 1.2)):
            pts = list(zip(rng.uniform(0.2, 2.0, 10), rng.uniform(0.3, 1.0, 10)))
            res = [kernel_pde_residual(beta, mu, A, pts, h) for h in steps]
            o = orders(res)
            checks += [res[-1] <= 1e-2, bool(np.all(o >= 0.8))]
            lines.append(f"kernel({beta},{mu}) {res[-1]:.1e} order {o.min():.2f}")
        pts = list(zip(rng.uniform(0.2, 2.0, 10), rng.uniform(0.3, 1.0, 10)))
        res = _scalar_equation_residuals(0.5, 1.0, 1.3, pts, steps)
        o = orders(res)
        checks += [res[-1] <= 1e-2, bool(np.all(o >= 0.8))]
        lines.append(f"scalar {res[-1]:.1e} order {o.min():.2f}")
    conclude("AC-4", checks, "; ".join(lines) + " (residual <= 1e-2, order >= 0.8)", clock, None)


def _ml_phi1(alpha, B, x):
    """x**alpha E_{alpha, 1+alpha}(B x**alpha) for symmetric B."""
    w, V = np.linalg.eigh(np.atleast_2d(np.asarray(B, dtype=float)))
    d = [mp_mittag_leffler(alpha, 1 + alpha, lam * x**alpha) for lam in w]
    return x**alpha * (V @ np.diag(d) @ V.T)


def test_ac5_one_dimensional_closed_forms():
    cases = [(a, [[b]]) for a in (0.3, 0.5, 0.7) for b in (0.0, 0.5, -0.5)]
    cases.append((0.6, [[0.2, 0.3], [0.3, 0.2]]))
    with Clock() as clock:
        worst_phi, worst_G, zero_b = 0.0, 0.0, 0.0
        for alpha, B in cases:
            spec = ProblemSpec.build([alpha], B=B)
            if np.all(np.asarray(B) == 0):
                zero_b = max(zero_b, abs(phi_alpha_delta([1.0], (1.0,), spec)[0, 0] * math.gamma(1 + alpha) - 1))
            ref = _ml_phi1(alpha, B, 1.0)
            worst_phi = max(worst_phi, max_abs(phi_alpha_delta([1.0], (1.0,), spec) - ref) / max_abs(ref))
            for x in (0.1, 0.5, 1.0):
                ref = ml_kernel_m1(alpha, B, x)
                worst_G = max(worst_G, max_abs(fundamental_G([x], spec) - ref) / max_abs(ref))
    detail = f"Phi^(1)(1) Gamma(1+alpha) - 1 = {zero_b:.1e} at B = 0, Phi^(1) rel {worst_phi:.1e}, G rel {worst_G:.1e} (<= 1e-7)"
    conclude("AC-5", [zero_b <= 1e-7, worst_phi <= 1e-7, worst_G <= 1e-7], detail, clock, 20)


def test_ac6_two_dimensional_e_function():
    xs = (0.13, 0.33, 0.53, 0.73, 0.93)
    ys = (0.2, 0.4, 0.6, 0.8, 1.0)
    with Clock() as clock:
        worst, margin = 0.0, math.inf
        for alpha, beta in ((0.5, 0.5), (0.4, 0.7)):
            for lam in (1.0, 2.0):
                spec = ProblemSpec.build([alpha, beta], A=[[[1.0]], [[lam]]])
                for x in xs:
                    for y in ys:
                        z = -lam * x**alpha / y**beta
                        if alpha == beta:
                            margin = min(margin, abs(abs(z) - 1))
                        ref = x ** (alpha - 1) / y * wright_type_e(alpha, beta, alpha, 0.0, z)
                        got = fundamental_G([x, y], spec)[0, 0]
                        worst = max(worst, abs(got - ref) / abs(ref))
    detail = f"100 points, rel {worst:.1e} (<= 1e-5); closest |z| to 1 for alpha = beta: margin {margin:.3f}"
    conclude("AC-6", [worst <= 1e-5], detail, clock, 30)


def test_ac7_end_to_end():
    with Clock() as clock:
        lines, checks = [], []
        for name in AC7_FILES:
            p = parse_problem(PROBLEMS / name)
            spec, src, bd, qcfg = p
            sol = solve_on_grid(uniform_axes(spec, 128), spec, src, bd, qcfg)
            res = verify_pde_residual(sol, spec, src, collar=3).residual
            study = residual_study(spec, src, bd, (64, 128), qcfg)
            bnd = max(verify_boundary_limit(spec, src, bd, s, qcfg).error for s in range(spec.m))
            checks += [res <= 2e-2, study.order >= 0.8, bnd <= 1e-3]
            lines.append(f"{name}: residual {res:.1e}, order {study.order:.2f}, boundary {bnd:.1e}")
    detail = "; ".join(lines) + " (residual <= 2e-2, order >= 0.8, boundary <= 1e-3)"
    conclude("AC-7", checks, detail, clock, 300)


def _log_axes(rng, box, sizes):
    return [b * np.sort(10 ** rng.uniform(-3, 0, k)) for b, k in zip(box, sizes)]


def _mesh(axes):
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def _norms(values):
    return np.max(np.abs(values), axis=(-2, -1))


def _shifted_derivative(axes, s, spec, qcfg, rel=1e-4):
    """d/dx_s Phi with delta_s = 1 - alpha_s (that is D^{alpha_s} G) by central differences."""
    delta = [0.0] * spec.m
    delta[s] = 1 - spec.alphas[s]
    up, down = list(axes), list(axes)
    up[s], down[s] = axes[s] * (1 + rel), axes[s] * (1 - rel)
    diff = phi_alpha_delta_grid(up, delta, spec, qcfg) - phi_alpha_delta_grid(down, delta, spec, qcfg)
    shape = [1] * spec.m
    shape[s] = -1
    return diff / (2 * rel * axes[s].reshape(shape + [1, 1]))


def test_ac8_calibrated_bounds():
    scalar = ProblemSpec.build([0.5, 0.7], B=[[0.2]])
    system = ProblemSpec.build([0.6, 0.8], A=[np.eye(2), np.diag([1.0, 2.0])], B=0.3 * np.eye(2))
    one = ProblemSpec.build([0.4], B=[[-0.5]])
    # (label, spec, delta, theta): estimates for Phi; delta = 0 is G, delta_s = 1 - alpha_s is D^{alpha_s - 1} G
    cases = [
        ("Phi d=(1,1)", scalar, (1.0, 1.0), (0.5, 0.5)),
        ("Phi d=(.5,0)", scalar, (0.5, 0.0), (0.8, 0.2)),
        ("Phi system d=(1,1)", system, (1.0, 1.0), (0.3, 0.7)),
        ("Phi m=1 d=0", one, (0.0,), (1.0,)),
        ("G", scalar, (0.0, 0.0), (0.5, 0.5)),
        ("G theta=(1.4,-.4)", scalar, (0.0, 0.0), (1.4, -0.4)),
        ("G system", system, (0.0, 0.0), (0.5, 0.5)),
        ("D^(a1-1)G", scalar, (0.5, 0.0), (0.5, 0.5)),
        ("D^(a2-1)G system", system, (0.0, 0.2), (-0.5, 1.5)),
    ]
    rng = np.random.default_rng(8)
    with Clock() as clock:
        violations, total = {}, 0
        for label, spec, delta, theta in cases:
            axes = _log_axes(rng, spec.box, (500,) if spec.m == 1 else (20, 25))
            values = _norms(phi_alpha_delta_grid(axes, delta, spec)).reshape(-1)
            points = _mesh(axes).reshape(-1, spec.m)
            bounds = np.array([phi_bound(x, delta, theta, spec) for x in points])
            violations[label] = int(np.sum(values > bounds))
            total += values.size
        # |D^{alpha_s} G|_* <= C x_s**-alpha_s prod x_i**(alpha_i theta_i - 1), C fitted as for phi_bound
        qcfg = QuadratureConfig(rel_tol=1e-11)
        for label, spec, s, theta in (("D^(a1)G", scalar, 0, (0.5, 0.5)), ("D^(a2)G system", system, 1, (1.3, -0.3))):
            def profile(mesh):
                expo = np.array([a * t - 1 for a, t in zip(spec.alphas, theta)])
                expo[s] -= spec.alphas[s]
                return np.prod(mesh**expo, axis=-1)

            probe = [b * np.geomspace(1e-3, 1.0, 6) for b in spec.box]
            C = 1.5 * np.max(_norms(_shifted_derivative(probe, s, spec, qcfg)) / profile(_mesh(probe)))
            axes = _log_axes(rng, spec.box, (20, 25))
            values = _norms(_shifted_derivative(axes, s, spec, qcfg))
            violations[label] = int(np.sum(values > C * profile(_mesh(axes))))
            total += values.size
    bad = sum(violations.values())
    detail = f"{len(violations)} cases, {total} out-of-sample points, {bad} violations (== 0)"
    if bad:
        detail += " " + str({k: v for k, v in violations.items() if v})
    conclude("AC-8", [bad == 0], detail, clock, 60)


def test_ac9_zero_data_and_superposition():
    with Clock() as clock:
        zero_max = 0.0
        for name in AC7_FILES:
            spec = parse_problem(PROBLEMS / name).spec
            u = solve_on_grid(uniform_axes(spec, 16), spec, *zero_data(spec)).u
            zero_max = max(zero_max, float(np.max(np.abs(u))))
        # u(f1 + f2, phi) = u(f1, 0) + u(f2, 0) + u(0, phi)
        p = parse_problem(PROBLEMS / "coupled_system_m2n2.json")
        spec, _, bd, qcfg = p
        zero_bd = BoundaryData(tuple(Zero(spec.n, spec.m - 1) for _ in range(spec.m)))
        t1 = [{"coef": [1.0, -0.5], "powers": [1, 0]}, {"coef": [0.0, 0.7], "powers": [2, 3]}]
        t2 = [{"coef": [0.0, 2.0], "powers": [1, 1]}, {"coef": [1.0, 1.0], "powers": [0, 0]}]
        axes = uniform_axes(spec, 12)

        def u(terms, boundary):
            return solve_on_grid(axes, spec, SourceTerm(Polynomial(2, 2, terms)), boundary, qcfg).u

        u1, u2 = u(t1, zero_bd), u(t2, zero_bd)
        u3 = solve_on_grid(axes, spec, SourceTerm(Zero(2, 2)), bd, qcfg).u
        total = u(t1 + t2, bd)
        lin = float(np.max(np.abs(total - (u1 + u2 + u3))) / np.max(np.abs(total)))
        scaled = u([{"coef": [-3 * c for c in t["coef"]], "powers": t["powers"]} for t in t1], zero_bd)
        lin = max(lin, float(np.max(np.abs(scaled + 3 * u1)) / np.max(np.abs(scaled))))
    tol = 10 * qcfg.rel_tol
    detail = f"zero data max |u| {zero_max:.1e} (<= 1e-10), superposition rel {lin:.1e} (<= {tol:.0e})"
    conclude("AC-9", [zero_max <= 1e-10, lin <= tol], detail, clock, 60)

