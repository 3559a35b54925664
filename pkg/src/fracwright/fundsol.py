"""The function

    Phi_alpha^delta(x) = int_0^inf exp(B tau) h_1(x_1, tau) ... h_m(x_m, tau) dtau,
    h_i(x_i, tau) = x_i**(delta_i - 1) phi(-alpha_i, delta_i; -A_i tau x_i**(-alpha_i)),

its special case G(x) = Phi_alpha^0(x), and the power bounds it obeys.

The tau integral is truncated at a point T taken from the super-exponential
decay of each kernel factor (rate ``(lambda_i tau x_i**-alpha_i)**(1/(1-alpha_i))``)
against the growth ``exp(gamma tau)`` of the exponential factor, and the
finite part is integrated by adaptive Gauss-Legendre panels. A tensor-grid
variant shares one tau rule and all kernel evaluations across a whole grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate, optimize

from fracwright.errors import BadExponents, NoDecay, NonConvergent, SpecViolation
from fracwright.matfun import (
    _matrix_wright_array,
    as_square,
    eigen_bounds,
    matrix_exp_batch,
    matrix_wright,
    max_abs,
)
from fracwright.wright import UNBOUNDED_SERIES, WrightParams, _phi_array

__all__ = [
    "DeltaVector",
    "PhiBound",
    "ProblemSpec",
    "QuadratureConfig",
    "TailBound",
    "calibrate_phi_bound",
    "fundamental_G",
    "kernel_h",
    "kernel_batch",
    "phi_alpha_delta",
    "phi_alpha_delta_grid",
    "phi_bound",
    "tail_truncation",
]

COMMUTE_TOL = 1e-10
# fraction of the supremum of admissible decay constants used in tail bounds
SIGMA_FRACTION = 0.9


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """Dimensions, orders and coefficient matrices of the system.

    ``A`` holds one ``n x n`` matrix per axis, ``B`` the reaction matrix,
    ``box`` the side lengths ``a_i`` and ``mu`` the regularity weights.
    """

    alphas: tuple[float, ...]
    A: tuple[np.ndarray, ...]
    B: np.ndarray
    box: tuple[float, ...]
    mu: tuple[float, ...]

    def __post_init__(self) -> None:
        alphas = tuple(float(a) for a in self.alphas)
        m = len(alphas)
        if not 1 <= m <= 3:
            raise SpecViolation(f"m must lie in 1..3, got {m}")
        for i, a in enumerate(alphas):
            if not 0.0 < a < 1.0:
                raise SpecViolation(f"alphas[{i}] = {a} violates 0 < alpha_i < 1")
        try:
            B = as_square(self.B, name="B")
            A = tuple(as_square(Ai, name=f"A[{i}]") for i, Ai in enumerate(self.A))
        except ValueError as exc:
            raise SpecViolation(str(exc)) from None
        n = B.shape[0]
        if not 1 <= n <= 4:
            raise SpecViolation(f"n must lie in 1..4, got {n}")
        if len(A) != m:
            raise SpecViolation(f"expected {m} coefficient matrices, got {len(A)}")
        for i, Ai in enumerate(A):
            if Ai.shape != (n, n):
                raise SpecViolation(f"A[{i}] has shape {Ai.shape}, expected {(n, n)}")
            try:
                eigen_bounds(Ai, "coefficient")
            except SpecViolation as exc:
                raise type(exc)(f"A[{i}]: {exc}") from None
            gap = max_abs(Ai @ B - B @ Ai)
            if gap > COMMUTE_TOL:
                raise SpecViolation(f"A[{i}] and B do not commute (max-abs commutator {gap:.3g})")
        box = tuple(float(b) for b in self.box)
        if len(box) != m or not all(0 < b < math.inf for b in box):
            raise SpecViolation("box needs m finite positive lengths")
        mu = tuple(float(v) for v in self.mu)
        if len(mu) != m:
            raise SpecViolation("mu needs m weights")
        for i, (w, a) in enumerate(zip(mu, alphas)):
            if not 0.0 < w < a:
                raise SpecViolation(f"mu[{i}] = {w} violates 0 < mu_i < alpha_i = {a}")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "box", box)
        object.__setattr__(self, "mu", mu)
        for arr in (B,) + A:
            arr.setflags(write=False)

    @classmethod
    def build(cls, alphas, A=None, B=None, box=None, mu=None, n: int | None = None) -> ProblemSpec:
        """Convenience constructor: identity ``A_i``, zero ``B``, unit box, ``mu_i = alpha_i / 2``."""
        alphas = tuple(alphas)
        m = len(alphas)
        if n is None:
            if A is not None:
                n = np.atleast_2d(np.asarray(A[0], dtype=float)).shape[0]
            elif B is not None:
                n = np.atleast_2d(np.asarray(B, dtype=float)).shape[0]
            else:
                n = 1
        A = tuple(np.eye(n) for _ in range(m)) if A is None else tuple(np.atleast_2d(np.asarray(a, float)) for a in A)
        B = np.zeros((n, n)) if B is None else np.atleast_2d(np.asarray(B, dtype=float))
        box = (1.0,) * m if box is None else tuple(box)
        mu = tuple(a / 2 for a in alphas) if mu is None else tuple(mu)
        return cls(alphas, A, B, box, mu)

    @property
    def m(self) -> int:
        return len(self.alphas)

    @property
    def n(self) -> int:
        return self.B.shape[0]

    @cached_property
    def lambdas(self) -> tuple[float, ...]:
        """Smallest eigenvalue of each ``A_i``."""
        return tuple(eigen_bounds(Ai, "coefficient").min_eig for Ai in self.A)

    @cached_property
    def gamma(self) -> float:
        """Largest ``|Re|`` over the spectrum of ``B``."""
        return eigen_bounds(self.B, "source").gamma

    @cached_property
    def key(self) -> bytes:
        parts = [np.asarray(self.alphas), np.asarray(self.box), np.asarray(self.mu), self.B]
        parts.extend(self.A)
        return b"|".join(np.ascontiguousarray(p, dtype=float).tobytes() for p in parts)

    def __eq__(self, other) -> bool:
        return isinstance(other, ProblemSpec) and self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)


@dataclass(frozen=True)
class DeltaVector:
    """Shift parameters ``delta_i``, one per axis."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @classmethod
    def of(cls, delta) -> DeltaVector:
        return delta if isinstance(delta, DeltaVector) else cls(tuple(np.atleast_1d(delta)))

    def __iter__(self):
        return iter(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]

    def check_integrable(self, alphas) -> None:
        """Require ``delta_i + alpha_i > 0`` (integrable singularity at the faces)."""
        for i, (d, a) in enumerate(zip(self.values, alphas)):
            if not d + a > 0:
                raise BadExponents(f"delta[{i}] + alpha[{i}] = {d + a:g} must be positive")


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    max_panels: int = 4096
    tail_safety: float = 1.5

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_panels < 1:
            raise ValueError("max_panels must be at least 1")
        if not self.tail_safety >= 1:
            raise ValueError("tail_safety must be at least 1")


@dataclass(frozen=True)
class TailBound:
    """Truncation point ``T`` and the constants of the decay bound behind it."""

    T: float
    sigma: tuple[float, ...]
    gamma: float
    lam: tuple[float, ...]


def _check_point(x, spec: ProblemSpec) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (spec.m,):
        raise ValueError(f"point must have {spec.m} coordinates")
    if not np.all(x > 0):
        raise ValueError("point must be interior: all coordinates positive")
    return x


def _check_delta(delta, spec: ProblemSpec) -> DeltaVector:
    delta = DeltaVector.of(delta)
    if len(delta) != spec.m:
        raise ValueError(f"delta must have {spec.m} entries")
    return delta


def decay_constant(alpha: float) -> float:
    """``SIGMA_FRACTION`` times the supremum ``(1 - a) a**(a / (1 - a))``."""
    return SIGMA_FRACTION * (1 - alpha) * alpha ** (alpha / (1 - alpha))


def _log_envelope(tau, x, spec: ProblemSpec):
    out = spec.gamma * tau
    for a, lam, xi in zip(spec.alphas, spec.lambdas, x):
        out = out - decay_constant(a) * (lam * tau * xi ** (-a)) ** (1 / (1 - a))
    return out


def tail_truncation(x, delta, spec: ProblemSpec, qcfg: QuadratureConfig = QuadratureConfig()) -> TailBound:
    """Truncation point for the tau integral at ``x``.

    ``T0`` solves ``envelope(T0) = rel_tol * int_0^inf envelope`` with
    ``envelope(tau) = exp(gamma tau - sum_i sigma_i (lambda_i tau x_i**-alpha_i)**(1/(1-alpha_i)))``;
    the returned ``T`` is ``tail_safety * T0``. ``delta`` only enters through
    the validity checks: the power prefactors cancel in the relative bound.
    """
    x = _check_point(x, spec)
    _check_delta(delta, spec)
    # natural time scale: the decay exponents are O(1) at tau ~ scale
    scale = min(xi**a / lam for xi, a, lam in zip(x, spec.alphas, spec.lambdas))
    env = lambda u: _log_envelope(u * scale, x, spec)  # noqa: E731
    hi = 1.0
    while env(2 * hi) > env(hi) - 1.0:
        hi *= 2
        if hi > 1e12:
            raise NoDecay("tail_truncation: the growth of exp(B tau) is not dominated")
    peak = optimize.minimize_scalar(lambda u: -env(u), bounds=(0.0, 2 * hi), method="bounded").x
    peak_val = max(env(peak), env(0.0))
    total, _ = integrate.quad(lambda u: math.exp(env(u) - peak_val), 0.0, 2 * hi, limit=200)
    total += integrate.quad(lambda u: math.exp(env(u) - peak_val), 2 * hi, math.inf, limit=200)[0]
    target = math.log(qcfg.rel_tol) + math.log(total) + peak_val
    while env(hi) > target:
        hi *= 2
        if hi > 1e12:
            raise NoDecay("tail_truncation: the growth of exp(B tau) is not dominated")
    U0 = optimize.brentq(lambda u: env(u) - target, peak, hi, xtol=1e-14, rtol=1e-12)
    T0 = U0 * scale
    sigma = tuple(decay_constant(a) for a in spec.alphas)
    return TailBound(qcfg.tail_safety * T0, sigma, spec.gamma, spec.lambdas)


def kernel_batch(i: int, delta_i: float, xi, tau, spec: ProblemSpec) -> np.ndarray:
    """``h_i`` for arrays ``xi`` and ``tau`` broadcast together; shape ``(..., n, n)``."""
    a = spec.alphas[i]
    xi = np.asarray(xi, dtype=float)
    z = -np.asarray(tau, dtype=float) * xi ** (-a)
    Ai = spec.A[i]
    if spec.n == 1:
        vals = _phi_array(-a, delta_i, Ai[0, 0] * z, UNBOUNDED_SERIES)[..., None, None]
    else:
        vals = _matrix_wright_array(WrightParams(-a, delta_i), Ai, z, UNBOUNDED_SERIES)
    return vals * (xi ** (delta_i - 1))[..., None, None]


def kernel_h(i: int, delta_i: float, x_i: float, tau: float, spec: ProblemSpec) -> np.ndarray:
    """Kernel factor ``x_i**(delta_i-1) phi(-alpha_i, delta_i; -A_i tau x_i**(-alpha_i))``.

    Raises :class:`DomainExceeded` when ``tau x_i**(-alpha_i)`` times the
    spectral radius of ``A_i`` exceeds 50.
    """
    if not x_i > 0:
        raise ValueError("x_i must be positive")
    if tau < 0:
        raise ValueError("tau must be non-negative")
    a = spec.alphas[i]
    val = matrix_wright(WrightParams(-a, delta_i), spec.A[i], -tau * x_i ** (-a))
    return val * x_i ** (delta_i - 1)


def _exp_factor(tau: np.ndarray, spec: ProblemSpec) -> np.ndarray:
    if not np.any(spec.B):
        return np.broadcast_to(np.eye(spec.n), tau.shape + (spec.n, spec.n))
    if spec.n == 1:
        return np.exp(spec.B[0, 0] * tau)[..., None, None]
    return matrix_exp_batch(spec.B, tau)


def _integrand(tau: np.ndarray, x: np.ndarray, delta: DeltaVector, spec: ProblemSpec) -> np.ndarray:
    out = _exp_factor(tau, spec)
    for i in range(spec.m):
        out = out @ kernel_batch(i, delta[i], x[i], tau, spec)
    return out


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(20)


def _panel_rule(lo: np.ndarray, hi: np.ndarray):
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * _GL_NODES
    weights = half[:, None] * _GL_WEIGHTS
    return nodes, weights


def adaptive_panels(fn, breaks, rel_tol: float, max_panels: int, what: str = "quadrature"):
    """Integrate matrix-valued ``fn`` over ``[breaks[0], breaks[-1]]``.

    ``fn`` maps an array of nodes to values of shape ``nodes.shape + (n, n)``.
    Every panel is compared with the sum of its two halves (20-point
    Gauss-Legendre each); panels are bisected until the summed discrepancy is
    below ``rel_tol`` times the max-abs norm of the integral.
    Returns ``(integral, error_estimate, panel_count)``.
    """
    lo = np.asarray(breaks[:-1], dtype=float)
    hi = np.asarray(breaks[1:], dtype=float)

    def halves(lo, hi):
        mid = 0.5 * (lo + hi)
        n1, w1 = _panel_rule(np.r_[lo, mid], np.r_[mid, hi])
        vals = fn(n1)
        q = np.einsum("pk,pk...->p...", w1, vals)
        k = lo.size
        return q[:k], q[k:]

    def whole(lo, hi):
        n0, w0 = _panel_rule(lo, hi)
        return np.einsum("pk,pk...->p...", w0, fn(n0))

    coarse = whole(lo, hi)
    left, right = halves(lo, hi)
    while True:
        fine = left + right
        err = np.max(np.abs(coarse - fine), axis=(-2, -1))
        total = fine.sum(axis=0)
        scale = max_abs(total)
        if err.sum() <= rel_tol * scale or err.sum() == 0.0:
            return total, float(err.sum()), lo.size
        # bisect every panel carrying more than its share of the budget
        share = rel_tol * scale / lo.size
        bad = err > share
        if not bad.any():
            bad = err >= err.max()
        if lo.size + bad.sum() > max_panels:
            raise NonConvergent(f"{what}: panel budget of {max_panels} exhausted")
        mid = 0.5 * (lo[bad] + hi[bad])
        new_lo = np.r_[lo[bad], mid]
        new_hi = np.r_[mid, hi[bad]]
        new_coarse = np.concatenate([left[bad], right[bad]])
        nl, nr = halves(new_lo, new_hi)
        keep = ~bad
        lo = np.r_[lo[keep], new_lo]
        hi = np.r_[hi[keep], new_hi]
        coarse = np.concatenate([coarse[keep], new_coarse])
        left = np.concatenate([left[keep], nl])
        right = np.concatenate([right[keep], nr])


def _graded_breaks(T: float, levels: int = 6) -> np.ndarray:
    """``0, T/2**levels, ..., T/2, T``: geometric grading toward tau = 0."""
    return np.r_[0.0, T * 0.5 ** np.arange(levels, -1, -1)]


def phi_alpha_delta(x, delta, spec: ProblemSpec, qcfg: QuadratureConfig = QuadratureConfig()) -> np.ndarray:
    """``Phi_alpha^delta(x)`` as an ``n x n`` array.

    The factors are multiplied in the order ``exp(B tau) h_1 ... h_m``.
    """
    x = _check_point(x, spec)
    delta = _check_delta(delta, spec)
    tb = tail_truncation(x, delta, spec, qcfg)
    fn = lambda tau: _integrand(tau, x, delta, spec)  # noqa: E731
    value, _, _ = adaptive_panels(fn, _graded_breaks(tb.T), qcfg.rel_tol, qcfg.max_panels, "phi_alpha_delta")
    return value


def _shift_delta(orders, spec: ProblemSpec) -> DeltaVector:
    if orders is None:
        return DeltaVector((0.0,) * spec.m)
    orders = tuple(np.atleast_1d(np.asarray(orders, dtype=float)))
    if len(orders) != spec.m:
        raise ValueError(f"orders must have {spec.m} entries")
    delta = DeltaVector(tuple(-v for v in orders))
    delta.check_integrable(spec.alphas)
    return delta


def fundamental_G(x, spec: ProblemSpec, qcfg: QuadratureConfig = QuadratureConfig(), orders=None) -> np.ndarray:
    """Fundamental solution ``G(x) = Phi_alpha^0(x)``.

    ``orders`` (one ``nu_i`` per axis) returns the derivative
    ``D^{nu_1}_{x_1} ... D^{nu_m}_{x_m} G = Phi_alpha^{-nu}``; negative orders
    are fractional integrals. Each ``alpha_i - nu_i`` must stay positive.
    """
    return phi_alpha_delta(x, _shift_delta(orders, spec), spec, qcfg)


# ---------------------------------------------------------------------------
# tensor grids


@dataclass(frozen=True)
class TauRule:
    nodes: np.ndarray
    weights: np.ndarray


def common_tau_rule(axes, delta, spec: ProblemSpec, qcfg: QuadratureConfig = QuadratureConfig(), per_panel: int = 20) -> TauRule:
    """One tau rule serving every point of a tensor grid.

    Dyadic panels run from ``T_min / 64`` (``T_min``: truncation at the
    smallest coordinates) up to ``T_max`` (largest coordinates), plus the
    initial panel ``[0, T_min / 64]``; each carries ``per_panel`` Gauss nodes.
    """
    lo_pt = np.array([np.min(a) for a in axes])
    hi_pt = np.array([np.max(a) for a in axes])
    t_min = tail_truncation(lo_pt, delta, spec, qcfg).T
    t_max = tail_truncation(hi_pt, delta, spec, qcfg).T
    start = t_min / 64
    count = max(1, int(math.ceil(math.log2(t_max / start))))
    edges = np.r_[0.0, start * 2.0 ** np.arange(count + 1)]
    edges[-1] = max(edges[-1], t_max)
    x, w = np.polynomial.legendre.leggauss(per_panel)
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo))[:, None] + half[:, None] * x
    weights = half[:, None] * w
    return TauRule(nodes.ravel(), weights.ravel())


def phi_alpha_delta_grid(axes, delta, spec: ProblemSpec, qcfg: QuadratureConfig = QuadratureConfig(), per_panel: int = 20) -> np.ndarray:
    """``Phi_alpha^delta`` on the tensor grid ``axes[0] x ... x axes[m-1]``.

    Returns shape ``(len(axes[0]), ..., len(axes[m-1]), n, n)``. All points
    share one tau rule, so each kernel factor is evaluated once per
    ``(coordinate, node)`` pair.
    """
    delta = _check_delta(delta, spec)
    axes = [np.atleast_1d(np.asarray(a, dtype=float)) for a in axes]
    if len(axes) != spec.m:
        raise ValueError(f"need {spec.m} axes")
    if any(np.any(a <= 0) for a in axes):
        raise ValueError("grid coordinates must be positive")
    rule = common_tau_rule(axes, delta, spec, qcfg, per_panel)
    factors = [kernel_batch(i, delta[i], xi[:, None], rule.nodes[None, :], spec) for i, xi in enumerate(axes)]
    return tensor_contract(weighted_exp(rule, spec), factors)


def weighted_exp(rule: TauRule, spec: ProblemSpec) -> np.ndarray:
    """``w_q exp(B tau_q)`` for every node of ``rule``."""
    return rule.weights[:, None, None] * _exp_factor(rule.nodes, spec)


def tensor_contract(acc: np.ndarray, factors) -> np.ndarray:
    """``sum_q acc[q] F_1[i_1, q] ... F_m[i_m, q]`` over a tensor grid.

    ``acc`` has shape ``(Q, n, n)`` and ``factors[i]`` shape ``(N_i, Q, n, n)``;
    the result has shape ``(N_1, ..., N_m, n, n)``. Products keep the written
    factor order.
    """
    for i, H in enumerate(factors):
        if i == len(factors) - 1:
            acc = _contract_last(acc, H)
        else:
            acc = np.matmul(acc[..., None, :, :, :], H)
    return acc


def _contract_last(acc: np.ndarray, H: np.ndarray) -> np.ndarray:
    """``out[..., j, a, c] = sum_{q, b} acc[..., q, a, b] H[j, q, b, c]`` as one matrix product."""
    lead = acc.shape[:-3]
    q, n = acc.shape[-3], acc.shape[-1]
    J = H.shape[0]
    left = np.moveaxis(acc.reshape((-1, q, n, n)), 2, 1).reshape(-1, q * n)
    right = H.transpose(1, 2, 0, 3).reshape(q * n, J * n)
    out = (left @ right).reshape(-1, n, J, n).transpose(0, 2, 1, 3)
    return out.reshape(lead + (J, n, n))


# ---------------------------------------------------------------------------
# power bounds


def _check_theta(delta: DeltaVector, theta) -> tuple[float, ...]:
    theta = tuple(float(t) for t in theta)
    if len(theta) != len(delta):
        raise BadExponents("theta must have one entry per axis")
    if abs(sum(theta) - 1.0) > 1e-12:
        raise BadExponents(f"theta must sum to 1, got {sum(theta):.15g}")
    for i, (d, t) in enumerate(zip(delta, theta)):
        if d != 0 and not t > 0:
            raise BadExponents(f"theta[{i}] must be positive where delta[{i}] != 0")
        if d == 0 and not t > -1:
            raise BadExponents(f"theta[{i}] must exceed -1 where delta[{i}] == 0")
    return theta


def bound_profile(x, delta, theta, spec: ProblemSpec) -> np.ndarray:
    """``prod_i x_i**(delta_i + alpha_i theta_i - 1)``; ``x`` has shape ``(..., m)``."""
    x = np.asarray(x, dtype=float)
    expo = np.array([d + a * t - 1 for d, a, t in zip(delta, spec.alphas, theta)])
    return np.prod(x**expo, axis=-1)


@dataclass(frozen=True)
class PhiBound:
    """``C prod_i x_i**(delta_i + alpha_i theta_i - 1)`` with a calibrated ``C``."""

    C: float
    delta: DeltaVector
    theta: tuple[float, ...]
    spec: ProblemSpec = field(repr=False)

    def __call__(self, x) -> np.ndarray:
        return self.C * bound_profile(x, self.delta, self.theta, self.spec)


def probe_axes(spec: ProblemSpec, points: int = 6, lower: float = 1e-3) -> list[np.ndarray]:
    """Log-spaced coordinates in ``[lower * a_i, a_i]`` for each axis."""
    return [b * np.geomspace(lower, 1.0, points) for b in spec.box]


def calibrate_phi_bound(
    delta,
    theta,
    spec: ProblemSpec,
    qcfg: QuadratureConfig = QuadratureConfig(),
    axes=None,
    safety: float = 1.5,
) -> PhiBound:
    """Fit ``C`` as ``safety`` times the largest ratio ``|Phi|_* / profile`` on probe axes."""
    delta = _check_delta(delta, spec)
    theta = _check_theta(delta, theta)
    axes = probe_axes(spec) if axes is None else axes
    values = phi_alpha_delta_grid(axes, delta, spec, qcfg)
    norms = np.max(np.abs(values), axis=(-2, -1))
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
    ratio = norms / bound_profile(mesh, delta, theta, spec)
    return PhiBound(safety * float(np.max(ratio)), delta, theta, spec)


_BOUND_CACHE: dict = {}


def phi_bound(x, delta, theta, spec: ProblemSpec) -> float:
    """Bound ``C prod_i x_i**(delta_i + alpha_i theta_i - 1)`` on ``|Phi_alpha^delta(x)|_*``.

    ``C`` is calibrated once per ``(spec, delta, theta)`` on a probe grid and
    memoised. Raises :class:`BadExponents` for inadmissible ``theta``.
    """
    delta = _check_delta(delta, spec)
    theta = _check_theta(delta, theta)
    key = (spec.key, delta.values, theta)
    if key not in _BOUND_CACHE:
        _BOUND_CACHE[key] = calibrate_phi_bound(delta, theta, spec)
    return float(_BOUND_CACHE[key](_check_point(x, spec)))
