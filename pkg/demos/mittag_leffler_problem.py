"""One-dimensional problem D^alpha u = B u with D^(alpha-1) u(0) = phi.

The solution is u(x) = x**(alpha-1) E_{alpha,alpha}(B x**alpha) phi; the
solver builds it from the fundamental solution and the checks recover the
equation and the boundary value numerically.

Run: python demos/mittag_leffler_problem.py
"""

from pathlib import Path

import numpy as np

from fracwright import mittag_leffler, solve_on_grid
from fracwright.cli import parse_problem
from fracwright.solver import residual_study, uniform_axes, verify_boundary_limit, verify_pde_residual

problem = parse_problem(Path(__file__).parent / "problems" / "mittag_leffler_m1.json")
spec, src, bd, qcfg = problem
alpha, b = spec.alphas[0], spec.B[0, 0]

sol = solve_on_grid(uniform_axes(spec, 128), spec, src, bd, qcfg)
x = sol.axes[0]
exact = x ** (alpha - 1) * mittag_leffler(alpha, alpha, b * x**alpha)
print(f"alpha = {alpha}, B = {b}, phi = 1")
for i in (0, 15, 63, 127):
    print(f"  u({x[i]:.4f}) = {sol.u[i, 0]:.12f}   closed form {exact[i]:.12f}")
print(f"max relative deviation from the closed form: {np.max(np.abs(sol.u[:, 0] / exact - 1)):.1e}")

rep = verify_pde_residual(sol, spec, src)
study = residual_study(spec, src, bd, (64, 128, 256), qcfg)
print(f"\nresidual of D^alpha u - B u at h = 1/128: {rep.residual:.2e}")
print("residuals on a fixed region, N = 64, 128, 256:", ", ".join(f"{r:.2e}" for r in study.residuals))
print("observed orders:", ", ".join(f"{o:.2f}" for o in study.orders))

lim = verify_boundary_limit(spec, src, bd, 0, qcfg)
print(f"\nD^(alpha-1) u near 0 extrapolates to {lim.limits[0, 0]:.8f} (target 1), error {lim.error:.1e}")
