"""Numerical checks shared by the unit and acceptance suites."""

from __future__ import annotations

import math

import numpy as np

from fracwright.fraccalc import GridFunction1D, rl_derivative
from fracwright.matfun import JordanForm, matrix_wright
from fracwright.wright import UNBOUNDED_SERIES, WrightParams, reciprocal_gamma, wright_phi


def random_jordan(rng, n):
    sizes = []
    while sum(sizes) < n:
        sizes.append(int(rng.integers(1, min(3, n - sum(sizes)) + 1)))
    blocks = [(float(rng.uniform(0.5, 3.0)), s) for s in sizes]
    # well-conditioned transform: orthogonal times a mild diagonal scaling
    Q, _ = np.linalg.qr(rng.normal(size=(n, n)))
    H = Q @ np.diag(rng.uniform(0.7, 1.4, n))
    return JordanForm.from_blocks(blocks, H)


def gauss_panels(lo, hi, panels, order=20):
    edges = np.linspace(lo, hi, panels + 1)
    g, w = np.polynomial.legendre.leggauss(order)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    return (mid[:, None] + half[:, None] * g).ravel(), (half[:, None] * w).ravel()


def decay_cutoff(beta, lam, digits=45.0):
    """t beyond which exp(-sigma (lam t)**(1/(1-beta))) < exp(-digits)."""
    sigma = 0.9 * (1 - beta) * beta ** (beta / (1 - beta))
    return (digits / sigma) ** (1 - beta) / lam


def matrix_integral(beta, mu, A):
    """int_0^T phi(-beta, mu; -A z) dz and the closed form A**-1 / Gamma(mu + beta)."""
    A = np.asarray(A, dtype=float)
    lam = float(np.min(np.linalg.eigvals(A).real))
    T = decay_cutoff(beta, lam)
    z, w = gauss_panels(0.0, T, 80)
    F = matrix_wright(WrightParams(-beta, mu), A, -z, UNBOUNDED_SERIES)
    return np.einsum("k,kij->ij", w, F), np.linalg.inv(A) * reciprocal_gamma(mu + beta)


def moment(beta, mu, n):
    """int_0^inf t**n phi(-beta, mu; -t) dt by composite Gauss up to the decay cutoff."""
    T = decay_cutoff(beta, 1.0)
    t, w = gauss_panels(0.0, T, 120)
    return float(w @ (t**n * wright_phi(WrightParams(-beta, mu), -t, UNBOUNDED_SERIES)))


def moment_exact(beta, mu, n):
    return math.factorial(n) / math.gamma(mu + (n + 1) * beta)


def _kernel(beta, mu, A, tau, y):
    """y**(mu-1) phi(-beta, mu; -A tau y**-beta) on an array of y, zero at y = 0."""
    y = np.asarray(y, dtype=float)
    out = np.zeros(y.shape + A.shape)
    pos = y > 0
    F = matrix_wright(WrightParams(-beta, mu), A, -tau * y[pos] ** -beta, UNBOUNDED_SERIES)
    out[pos] = F * (y[pos] ** (mu - 1))[:, None, None]
    return out


def kernel_pde_residual(beta, mu, A, points, h, dt=1e-5):
    """max over points of |d/dtau K + A D^beta_y K| at the grid node nearest y."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    worst = 0.0
    for tau, y in points:
        n = int(round(y / h))
        yy = n * h
        g = GridFunction1D.sample(lambda s: _kernel(beta, mu, A, tau, s), h, n)
        D = rl_derivative(g, beta).values[-1]
        ddt = (_kernel(beta, mu, A, tau + dt, [yy])[0] - _kernel(beta, mu, A, tau - dt, [yy])[0]) / (2 * dt)
        worst = max(worst, float(np.max(np.abs(ddt + A @ D))))
    return worst


def orders(values, ratio=2.0):
    v = np.asarray(values, dtype=float)
    return np.log(v[:-1] / v[1:]) / math.log(ratio)


def axis_derivative(u, axis, h, nu, exponent, smooth_power):
    """D^nu along ``axis`` of samples on nodes h, 2h, ... (the origin is implied)."""
    v = np.moveaxis(np.asarray(u, dtype=float), axis, 0)
    pad = np.concatenate([np.full((1,) + v.shape[1:], np.nan), v])
    g = GridFunction1D(h, pad, valid_from=1)
    d = rl_derivative(g, nu, singular_exponent=exponent, smooth_power=smooth_power).values[1:]
    return np.moveaxis(d, 0, axis)


def operator_residual(spec, delta, points, exponents, region, qcfg=None):
    """max-abs of (sum_i A_i D^alpha_i - B) Phi^delta - prod x_i**(delta_i-1)/Gamma(delta_i) I on a sub-box."""
    from fracwright.fundsol import QuadratureConfig, phi_alpha_delta_grid

    axes = [b * np.arange(1, points + 1) / points for b in spec.box]
    P = phi_alpha_delta_grid(axes, delta, spec, qcfg or QuadratureConfig())
    total = -np.einsum("kl,...lj->...kj", spec.B, P)
    for i, (a, Ai) in enumerate(zip(spec.alphas, spec.A)):
        D = axis_derivative(P, i, axes[i][0], a, exponents[i], a)
        total = total + np.einsum("kl,...lj->...kj", Ai, D)
    mesh = np.meshgrid(*axes, indexing="ij")
    rhs = np.ones(mesh[0].shape)
    for x, d in zip(mesh, delta):
        rhs = rhs * x ** (d - 1) * reciprocal_gamma(d)
    R = np.max(np.abs(total - rhs[..., None, None] * np.eye(spec.n)), axis=(-2, -1))
    keep = np.ones(R.shape, dtype=bool)
    for i, x in enumerate(axes):
        inside = (x >= region[0] * spec.box[i] - 1e-12) & (x <= region[1] * spec.box[i] + 1e-12)
        shape = [1] * len(axes)
        shape[i] = x.size
        keep &= inside.reshape(shape)
    return float(np.max(R[keep]))
