"""Solution of the boundary-value problem and its verification battery.

The solution is

    u(x) = int_{Omega_x} G(x - t) f(t) dt
           + sum_j int_{Omega^j_x} A_j G(x - t^j) phi_j(t_(j)) dt_(j),

with ``t^j`` the point ``t`` with ``t_j = 0``. For catalog data every term is
separable, and each one-dimensional convolution of a kernel factor with a
profile is again a kernel factor:

    int_0^x h_i^0(x - t, tau) t**p dt = Gamma(p + 1) h_i^{p+1}(x, tau),

while a ramp ``(t - c)_+`` gives ``h_i^2(x - c, tau)``. So ``u`` reduces to
tau integrals of the same kind as ``Phi_alpha^delta`` and is evaluated without
any multidimensional quadrature. A direct graded quadrature of the volume and
boundary integrals (``m <= 2``) is kept as an independent check.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from fracwright.catalog import CatalogFunction, PiecewiseLinear, Power, Zero
from fracwright.errors import SpecViolation
from fracwright.fraccalc import GridFunction1D, rl_derivative, rl_integral
from fracwright.fundsol import (
    ProblemSpec,
    QuadratureConfig,
    common_tau_rule,
    kernel_batch,
    phi_alpha_delta,
    phi_alpha_delta_grid,
    tensor_contract,
    weighted_exp,
)

__all__ = [
    "BoundaryData",
    "BoundaryLimitReport",
    "ResidualReport",
    "SolutionGrid",
    "SourceTerm",
    "residual_study",
    "solve_at_point",
    "solve_at_point_quadrature",
    "solve_on_grid",
    "uniform_axes",
    "v_function",
    "verify_boundary_limit",
    "verify_pde_residual",
]


@dataclass(frozen=True)
class SourceTerm:
    """Right-hand side ``f`` (``m`` arguments) with its declared Hoelder exponent."""

    f: CatalogFunction
    holder_q: float = 1.0

    def __post_init__(self) -> None:
        if not 0 < self.holder_q <= 1:
            raise SpecViolation("Hoelder exponent must lie in (0, 1]")


@dataclass(frozen=True)
class BoundaryData:
    """Boundary functions ``phi_j`` of the ``m - 1`` coordinates other than ``x_j``."""

    phis: tuple[CatalogFunction, ...]


def zero_data(spec: ProblemSpec) -> tuple[SourceTerm, BoundaryData]:
    return SourceTerm(Zero(spec.n, spec.m)), BoundaryData(tuple(Zero(spec.n, spec.m - 1) for _ in range(spec.m)))


def _others(j: int, m: int) -> list[int]:
    return [i for i in range(m) if i != j]


def _check_weights(fn: CatalogFunction, axes: list[int], spec: ProblemSpec, what: str) -> None:
    """``prod x_i**(1 - mu_i) * fn`` must stay bounded: powers ``p_i > mu_i - 1``."""
    for powers in fn.weight_exponents():
        for p, i in zip(powers, axes):
            if not p > spec.mu[i] - 1:
                raise SpecViolation(
                    f"{what}: power {p:g} on x_{i + 1} violates the weight condition p > mu - 1 = {spec.mu[i] - 1:g}"
                )
    for term in fn.terms():
        for prof, i in zip(term.profiles, axes):
            if isinstance(prof, PiecewiseLinear) and prof.knots[-1] < spec.box[i] * (1 - 1e-12):
                raise SpecViolation(f"{what}: sample grid on x_{i + 1} does not cover the box")


def holder_quotient(f: CatalogFunction, spec: ProblemSpec, q: float, samples: int = 200, seed: int = 0) -> float:
    """Largest sampled ``|f(x) - f(y)|_* / |x - y|**q`` over pairs away from the faces."""
    rng = np.random.default_rng(seed)
    lo = np.array(spec.box) / 10
    hi = np.array(spec.box)
    x = rng.uniform(lo, hi, size=(samples, spec.m))
    y = np.clip(x + rng.normal(scale=0.01, size=x.shape) * hi, lo, hi)
    num = np.max(np.abs(f(x) - f(y)), axis=-1)
    den = np.linalg.norm(x - y, axis=-1) ** q
    ok = den > 0
    return float(np.max(num[ok] / den[ok])) if ok.any() else 0.0


def validate_data(spec: ProblemSpec, src: SourceTerm, bd: BoundaryData) -> None:
    """Eager checks of the data hypotheses; raises :class:`SpecViolation`."""
    if src.f.n != spec.n or src.f.k != spec.m:
        raise SpecViolation(f"f must map {spec.m} coordinates to {spec.n}-vectors")
    if len(bd.phis) != spec.m:
        raise SpecViolation(f"need {spec.m} boundary functions, got {len(bd.phis)}")
    for j, phi in enumerate(bd.phis):
        if phi.n != spec.n or phi.k != spec.m - 1:
            raise SpecViolation(f"phi[{j}] must map {spec.m - 1} coordinates to {spec.n}-vectors")
        _check_weights(phi, _others(j, spec.m), spec, f"phi[{j}]")
    _check_weights(src.f, list(range(spec.m)), spec, "f")
    if not math.isfinite(holder_quotient(src.f, spec, src.holder_q)):
        raise SpecViolation("f: sampled Hoelder quotient is not finite")


@dataclass
class SolutionGrid:
    """``u`` on a tensor grid with its source and boundary layers kept apart."""

    axes: tuple[np.ndarray, ...]
    u: np.ndarray
    layers: dict[str, np.ndarray]
    metadata: dict = field(default_factory=dict)

    def weighted_sup(self, spec: ProblemSpec) -> float:
        """``max prod_i x_i**(1 - mu_i) |u(x)|_*`` over the grid."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        w = np.ones(mesh[0].shape)
        for xi, mu in zip(mesh, spec.mu):
            w = w * xi ** (1 - mu)
        return float(np.max(w * np.max(np.abs(self.u), axis=-1)))


def uniform_axes(spec: ProblemSpec, points) -> list[np.ndarray]:
    """Nodes ``j a_i / N_i``, ``j = 1..N_i`` (the origin face is excluded)."""
    points = [points] * spec.m if np.ndim(points) == 0 else list(points)
    return [b * np.arange(1, int(n) + 1) / int(n) for b, n in zip(spec.box, points)]


# ---------------------------------------------------------------------------
# exact route for separable data


class _FactorCache:
    """Per-axis kernel convolutions ``int_0^x h_i^0(x - t, tau) P(t) dt`` on fixed nodes."""

    def __init__(self, axes, tau, spec: ProblemSpec):
        self.axes, self.tau, self.spec = axes, tau, spec
        self._store = {}

    def kernel(self, i: int, delta: float, shift: float = 0.0) -> np.ndarray:
        key = ("k", i, delta, shift)
        if key not in self._store:
            x = self.axes[i] - shift
            live = x > 0
            out = np.zeros((x.size, self.tau.size, self.spec.n, self.spec.n))
            if live.any():
                out[live] = kernel_batch(i, delta, x[live, None], self.tau[None, :], self.spec)
            self._store[key] = out
        return self._store[key]

    def profile(self, i: int, prof) -> np.ndarray:
        if isinstance(prof, Power):
            return math.gamma(prof.p + 1) * self.kernel(i, prof.p + 1)
        v0, s0, kinks = prof.ramps()
        out = v0 * self.kernel(i, 1.0) + s0 * self.kernel(i, 2.0)
        for c, ds in kinks:
            out = out + ds * self.kernel(i, 2.0, c)
        return out


def _effective_range(axes, spec: ProblemSpec, src: SourceTerm, bd: BoundaryData):
    """Smallest and largest kernel arguments met on each axis (for the tau rule)."""
    lo = [float(np.min(a)) for a in axes]
    hi = [float(np.max(a)) for a in axes]
    fns = [(src.f, list(range(spec.m)))] + [(phi, _others(j, spec.m)) for j, phi in enumerate(bd.phis)]
    for fn, ax in fns:
        for term in fn.terms():
            for prof, i in zip(term.profiles, ax):
                if isinstance(prof, PiecewiseLinear):
                    for c, _ in prof.ramps()[2]:
                        gap = axes[i] - c
                        gap = gap[gap > 0]
                        if gap.size:
                            lo[i] = min(lo[i], max(float(gap.min()), 1e-6 * spec.box[i]))
    return lo, hi


def _solve_block(axes, spec: ProblemSpec, src: SourceTerm, bd: BoundaryData, rule) -> dict[str, np.ndarray]:
    acc = weighted_exp(rule, spec)
    cache = _FactorCache(axes, rule.nodes, spec)
    shape = tuple(a.size for a in axes) + (spec.n,)
    layers = {}
    uf = np.zeros(shape)
    for term in src.f.terms():
        factors = [cache.profile(i, prof) for i, prof in enumerate(term.profiles)]
        uf += tensor_contract(acc, factors) @ term.coef
    layers["f"] = uf
    for j, phi in enumerate(bd.phis):
        uj = np.zeros(shape)
        for term in phi.terms():
            profs = dict(zip(_others(j, spec.m), term.profiles))
            factors = [cache.kernel(i, 0.0) if i == j else cache.profile(i, profs[i]) for i in range(spec.m)]
            # A_j acts on the left of G: (A_j G c) = (G c) A_j^T in row form
            uj += (tensor_contract(acc, factors) @ term.coef) @ spec.A[j].T
        layers[f"phi{j + 1}"] = uj
    return layers


def _workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("FRACWRIGHT_THREADS")
    return max(1, int(env)) if env else 1


def solve_on_grid(
    axes,
    spec: ProblemSpec,
    src: SourceTerm,
    bd: BoundaryData,
    qcfg: QuadratureConfig = QuadratureConfig(),
    workers: int | None = None,
) -> SolutionGrid:
    """``u`` on the tensor grid ``axes`` (all coordinates in ``(0, a_i]``).

    One tau rule serves the whole grid, so splitting the first axis across
    ``workers`` threads (default: ``FRACWRIGHT_THREADS`` or 1) does not change
    any value.
    """
    start = time.perf_counter()
    validate_data(spec, src, bd)
    axes = [np.atleast_1d(np.asarray(a, dtype=float)) for a in axes]
    if len(axes) != spec.m:
        raise ValueError(f"need {spec.m} axes")
    for i, a in enumerate(axes):
        if np.any(a <= 0) or np.any(a > spec.box[i] * (1 + 1e-12)):
            raise ValueError(f"axis {i + 1} must lie in (0, a_{i + 1}]")
    lo, hi = _effective_range(axes, spec, src, bd)
    rule = common_tau_rule([np.array([l, h]) for l, h in zip(lo, hi)], (1.0,) * spec.m, spec, qcfg)
    nw = min(_workers(workers), axes[0].size)
    chunks = np.array_split(np.arange(axes[0].size), nw)
    jobs = [[axes[0][c]] + axes[1:] for c in chunks]
    if nw == 1:
        parts = [_solve_block(jobs[0], spec, src, bd, rule)]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(lambda ax: _solve_block(ax, spec, src, bd, rule), jobs))
    layers = {k: np.concatenate([p[k] for p in parts], axis=0) for k in parts[0]}
    u = sum(layers.values())
    meta = {
        "spec_key": hex(abs(hash(spec.key))),
        "rel_tol": qcfg.rel_tol,
        "tau_nodes": int(rule.nodes.size),
        "seconds": time.perf_counter() - start,
    }
    return SolutionGrid(tuple(axes), u, layers, meta)


def solve_at_point(x, spec: ProblemSpec, src: SourceTerm, bd: BoundaryData, qcfg: QuadratureConfig = QuadratureConfig()) -> np.ndarray:
    """``u(x)`` at one interior point; returns an ``n``-vector."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    sol = solve_on_grid([[v] for v in x], spec, src, bd, qcfg)
    return sol.u.reshape(spec.n)


# ---------------------------------------------------------------------------
# independent route: graded quadrature of the defining integrals


def _graded_rule(x: float, levels: int, per_panel: int, kinks=()):
    """Gauss nodes on ``(0, x)`` with dyadic grading toward both ends and breaks at ``kinks``."""
    inner = x * 0.5 ** np.arange(levels, 0, -1)
    cuts = [c for c in kinks if 0.0 < c < x]
    edges = np.unique(np.r_[0.0, inner, x - inner[::-1], cuts, x])
    g, w = np.polynomial.legendre.leggauss(per_panel)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    return ((0.5 * (hi + lo))[:, None] + half[:, None] * g).ravel(), (half[:, None] * w).ravel()


def solve_at_point_quadrature(
    x,
    spec: ProblemSpec,
    src: SourceTerm,
    bd: BoundaryData,
    qcfg: QuadratureConfig = QuadratureConfig(),
    levels: int = 40,
    per_panel: int = 10,
) -> np.ndarray:
    """``u(x)`` by direct product quadrature of the volume and boundary integrals (``m <= 2``).

    Offsets ``s = x - t`` run over graded Gauss rules; ``G`` is evaluated on
    the tensor grid of offsets in one call.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if spec.m > 2:
        raise ValueError("the quadrature route supports m <= 2")
    validate_data(spec, src, bd)
    # offsets s = x_i - t_i at which piecewise-linear data have kinks
    kinks = [set() for _ in range(spec.m)]
    for fn, axes in [(src.f, list(range(spec.m)))] + [(phi, _others(j, spec.m)) for j, phi in enumerate(bd.phis)]:
        for term in fn.terms():
            for prof, i in zip(term.profiles, axes):
                if isinstance(prof, PiecewiseLinear):
                    kinks[i].update(float(x[i] - c) for c in prof.knots)
    rules = [_graded_rule(float(v), levels, per_panel, sorted(k)) for v, k in zip(x, kinks)]
    s_axes = [r[0] for r in rules]
    G = phi_alpha_delta_grid(s_axes, (0.0,) * spec.m, spec, qcfg)
    u = np.zeros(spec.n)
    if spec.m == 1:
        s, w = rules[0]
        fv = src.f((x[0] - s)[:, None])
        u += np.einsum("q,qab,qb->a", w, G, fv)
        u += spec.A[0] @ phi_alpha_delta(x, (0.0,), spec, qcfg) @ bd.phis[0](np.zeros(0))
        return u
    (s1, w1), (s2, w2) = rules
    t = np.stack(np.meshgrid(x[0] - s1, x[1] - s2, indexing="ij"), axis=-1)
    u += np.einsum("k,l,klab,klb->a", w1, w2, G, src.f(t))
    for j in range(2):
        i = 1 - j
        s, w = rules[i]
        axes = [None, None]
        axes[j] = np.array([x[j]])
        axes[i] = s
        Gj = phi_alpha_delta_grid(axes, (0.0, 0.0), spec, qcfg).reshape(s.size, spec.n, spec.n)
        phi_vals = bd.phis[j]((x[i] - s)[:, None])
        u += spec.A[j] @ np.einsum("q,qab,qb->a", w, Gj, phi_vals)
    return u


def v_function(x, spec: ProblemSpec, qcfg: QuadratureConfig = QuadratureConfig()) -> np.ndarray:
    """``V(x) = Phi_alpha^{(1, ..., 1)}(x)``, the integral of ``G`` over ``Omega_x``."""
    return phi_alpha_delta(x, (1.0,) * spec.m, spec, qcfg)


# ---------------------------------------------------------------------------
# verification


@dataclass
class ResidualReport:
    """PDE residual on one or more grid levels and the boundary-limit errors."""

    residuals: list[float]
    steps: list[tuple[float, ...]]
    orders: list[float] = field(default_factory=list)
    boundary_errors: dict[int, float] = field(default_factory=dict)

    @property
    def residual(self) -> float:
        return self.residuals[-1]

    @property
    def order(self) -> float | None:
        return self.orders[-1] if self.orders else None

    def as_dict(self) -> dict:
        return {
            "residuals": list(self.residuals),
            "steps": [list(s) for s in self.steps],
            "orders": list(self.orders),
            "boundary_errors": {str(k + 1): v for k, v in self.boundary_errors.items()},
        }


def _axis_derivative(u: np.ndarray, axis: int, h: float, nu: float, exponent: float) -> np.ndarray:
    """``D^nu`` along ``axis`` of grid values on nodes ``h, 2h, ...`` (origin prepended)."""
    moved = np.moveaxis(u, axis, 0)
    pad = np.concatenate([np.full((1,) + moved.shape[1:], np.nan), moved])
    d = rl_derivative(GridFunction1D(h, pad, valid_from=1), nu, singular_exponent=exponent, smooth_power=nu)
    return np.moveaxis(d.values[1:], 0, axis)


def pde_residual_field(sol: SolutionGrid, spec: ProblemSpec, src: SourceTerm) -> np.ndarray:
    """Pointwise ``sum_i A_i D^{alpha_i} u - B u - f`` on the grid (``nan`` where undefined)."""
    u = sol.u
    total = -(u @ spec.B.T)
    for i, (a, Ai) in enumerate(zip(spec.alphas, spec.A)):
        xi = sol.axes[i]
        h = xi[0]
        if not np.allclose(xi, h * np.arange(1, xi.size + 1), rtol=1e-12, atol=0):
            raise ValueError("residual checks need uniform axes starting at one step from the origin")
        total = total + _axis_derivative(u, i, h, a, a - 1) @ Ai.T
    mesh = np.stack(np.meshgrid(*sol.axes, indexing="ij"), axis=-1)
    return total - src.f(mesh)


def verify_pde_residual(sol: SolutionGrid, spec: ProblemSpec, src: SourceTerm, collar: int = 3, cut=None) -> ResidualReport:
    """Max-abs residual over interior nodes.

    A collar of ``collar`` nodes is dropped at both ends of every axis; ``cut``
    (physical lengths per axis) replaces it by a fixed region so that grids of
    different step can be compared.
    """
    R = np.max(np.abs(pde_residual_field(sol, spec, src)), axis=-1)
    sl = []
    for i, xi in enumerate(sol.axes):
        if cut is None:
            keep = np.zeros(xi.size, dtype=bool)
            keep[collar - 1 : xi.size - collar] = True
        else:
            keep = (xi >= cut[i][0] - 1e-12) & (xi <= cut[i][1] + 1e-12)
        sl.append(keep)
    mask = np.ones(R.shape, dtype=bool)
    for i, keep in enumerate(sl):
        shape = [1] * R.ndim
        shape[i] = keep.size
        mask &= keep.reshape(shape)
    steps = tuple(float(xi[0]) for xi in sol.axes)
    return ResidualReport([float(np.max(R[mask]))], [steps])


def residual_study(
    spec: ProblemSpec,
    src: SourceTerm,
    bd: BoundaryData,
    points=(64, 128),
    qcfg: QuadratureConfig = QuadratureConfig(),
    collar: int = 3,
) -> ResidualReport:
    """Residuals on successively refined uniform grids over one fixed region.

    ``points`` lists the levels, each a node count or one count per axis. The
    region drops ``collar`` steps of the coarsest grid at both ends of every
    axis; orders are ``log2``-type slopes of successive residual ratios.
    """
    levels = [(int(p),) * spec.m if np.ndim(p) == 0 else tuple(int(v) for v in p) for p in points]
    coarse = min(levels, key=lambda lv: sum(lv))
    cut = [(collar * b / c, b - collar * b / c) for b, c in zip(spec.box, coarse)]
    res, steps = [], []
    for lv in levels:
        sol = solve_on_grid(uniform_axes(spec, lv), spec, src, bd, qcfg)
        rep = verify_pde_residual(sol, spec, src, cut=cut)
        res.append(rep.residual)
        steps.append(rep.steps[0])
    orders = []
    for k in range(1, len(res)):
        ratio = max(a / b for a, b in zip(steps[k - 1], steps[k]))
        orders.append(math.log(res[k - 1] / res[k]) / math.log(ratio) if res[k] > 0 and res[k - 1] > 0 else math.inf)
    return ResidualReport(res, steps, orders)


@dataclass
class BoundaryLimitReport:
    axis: int
    samples: np.ndarray
    limits: np.ndarray
    targets: np.ndarray
    distances: np.ndarray
    approach: np.ndarray
    rate: float

    @property
    def error(self) -> float:
        return float(np.max(np.abs(self.limits - self.targets)))


def _boundary_samples(spec: ProblemSpec, s: int, count: int) -> np.ndarray:
    """Points of the face ``x_s = 0`` kept ``a/10`` away from the other faces."""
    others = _others(s, spec.m)
    if not others:
        return np.zeros((1, 0))
    grids = [np.linspace(spec.box[i] / 10, spec.box[i], count) for i in others]
    return np.stack(np.meshgrid(*grids, indexing="ij"), axis=-1).reshape(-1, len(others))


def verify_boundary_limit(
    spec: ProblemSpec,
    src: SourceTerm,
    bd: BoundaryData,
    s: int,
    qcfg: QuadratureConfig = QuadratureConfig(),
    k_range=(8, 14),
    nodes: int = 256,
    samples_per_axis: int = 3,
    degree: int = 3,
) -> BoundaryLimitReport:
    """Limit of ``D^{alpha_s - 1}_{x_s} u`` as ``x_s -> 0`` against ``phi_s``.

    ``D^{alpha_s - 1} u`` is computed by the discrete fractional integral on
    ``nodes`` uniform steps of ``(0, x_s]`` for ``x_s = a_s 2**-k``; the values
    are fitted by a polynomial of ``degree`` in ``x_s**alpha_s`` whose constant
    term is the extrapolated limit. ``rate`` is the log-log slope of the
    distance to ``phi_s`` over the sampled ``x_s``.
    """
    a = spec.alphas[s]
    pts = _boundary_samples(spec, s, samples_per_axis)
    others = _others(s, spec.m)
    ks = np.arange(k_range[0], k_range[1] + 1)
    xs = spec.box[s] * 0.5**ks
    vals = np.zeros((ks.size, pts.shape[0], spec.n))
    for kk, xv in enumerate(xs):
        line = xv * np.arange(1, nodes + 1) / nodes
        axes = [None] * spec.m
        axes[s] = line
        for p, i in enumerate(others):
            axes[i] = np.unique(pts[:, p])
        sol = solve_on_grid(axes, spec, src, bd, qcfg)
        moved = np.moveaxis(sol.u, s, 0)
        pad = np.concatenate([np.full((1,) + moved.shape[1:], np.nan), moved])
        integ = rl_integral(GridFunction1D(xv / nodes, pad, valid_from=1), a - 1, singular_exponent=a - 1)
        last = integ.values[-1]
        for q, pt in enumerate(pts):
            idx = tuple(int(np.searchsorted(np.unique(pts[:, p]), pt[p])) for p in range(len(others)))
            vals[kk, q] = last[idx]
    t = xs**a
    V = np.vander(t, degree + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(V, vals.reshape(ks.size, -1), rcond=None)
    limits = coef[0].reshape(pts.shape[0], spec.n)
    targets = bd.phis[s](pts)
    dist = np.max(np.abs(vals - targets[None]), axis=(1, 2))
    good = dist > 0
    rate = float(np.polyfit(np.log(xs[good]), np.log(dist[good]), 1)[0]) if good.sum() >= 2 else math.inf
    return BoundaryLimitReport(s, pts, limits, targets, xs, dist, rate)
