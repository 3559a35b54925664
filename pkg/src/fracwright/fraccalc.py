"""Riemann-Liouville fractional integrals and derivatives on uniform grids.

Grids start at the origin: node ``j`` sits at ``y = j h``. Values may be
scalars or arrays (vectors, matrices); the weights act on the leading axis.

Two integration rules are provided:

* product trapezoid: ``g`` is taken piecewise linear and the kernel
  ``(y - s)**(a - 1)`` is integrated exactly against it;
* weighted product rule for data ``g(y) = y**e * ghat(y)`` with a known
  singular exponent ``e > -1``: ``ghat`` is piecewise quadratic in
  ``y**p`` and the weight ``s**e (y - s)**(a - 1)`` is integrated exactly
  through incomplete beta functions. The origin node is never read, so ``g`` may be infinite there.

Derivatives of order ``nu`` in (0, 1) differentiate the integral of order
``nu - 1`` by centred differences; on the weighted route the known power of
``y`` is split off first and only the smooth factor is differenced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

__all__ = [
    "GridFunction1D",
    "gl_derivative",
    "rl_derivative",
    "rl_integral",
]


@dataclass(frozen=True)
class GridFunction1D:
    """Samples ``values[j] = g(j h)``, ``j = 0..N``.

    ``valid_from`` is 1 when the origin value is undefined (singular data or
    a derivative of it); node 0 then holds ``nan``.
    """

    h: float
    values: np.ndarray
    valid_from: int = 0

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if not self.h > 0:
            raise ValueError("grid step must be positive")
        if v.ndim == 0 or v.shape[0] < 3:
            raise ValueError("a grid function needs at least 3 nodes")
        if self.valid_from not in (0, 1):
            raise ValueError("valid_from must be 0 or 1")
        if not np.all(np.isfinite(v[self.valid_from :])):
            raise ValueError("grid values must be finite")

    @property
    def n_intervals(self) -> int:
        return self.values.shape[0] - 1

    @property
    def y(self) -> np.ndarray:
        return self.h * np.arange(self.values.shape[0])

    @classmethod
    def sample(cls, fn, h: float, n_intervals: int, skip_origin: bool = False) -> GridFunction1D:
        """Sample ``fn`` (vectorised over ``y``) on ``0, h, ..., n_intervals*h``."""
        y = h * np.arange(n_intervals + 1)
        if not skip_origin:
            return cls(h, np.asarray(fn(y), dtype=float))
        inner = np.asarray(fn(y[1:]), dtype=float)
        values = np.concatenate([np.full((1,) + inner.shape[1:], np.nan), inner])
        return cls(h, values, valid_from=1)


def _second_difference(p: float, d: np.ndarray) -> np.ndarray:
    """``(d+1)**p - 2 d**p + (d-1)**p`` for integers ``d >= 1``, without cancellation."""
    d = np.asarray(d, dtype=float)
    out = (d + 1) ** p - 2 * d**p + np.abs(d - 1) ** p
    far = d >= 8
    if far.any():
        x = 1.0 / d[far]
        acc = np.zeros_like(x)
        coef = 1.0
        for k in range(1, 24):
            coef *= (p - k + 1) / k
            if k % 2 == 0:
                acc += 2 * coef * x**k
        out[far] = d[far] ** p * acc
    return out


def _convolve_leading(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    """``out[j] = sum_{k<=j} weights[j-k] values[k]`` along the leading axis."""
    n = values.shape[0]
    flat = values.reshape(n, -1)
    out = np.empty_like(flat)
    for c in range(flat.shape[1]):
        out[:, c] = np.convolve(weights, flat[:, c])[:n]
    return out.reshape(values.shape)


def _trapezoid_integral(g: GridFunction1D, a: float) -> np.ndarray:
    n = g.n_intervals
    v = g.values
    d = np.arange(n + 1)
    w = np.empty(n + 1)
    w[0] = 1.0
    w[1:] = _second_difference(a + 1, d[1:])
    body = _convolve_leading(w, np.concatenate([np.zeros_like(v[:1]), v[1:]]))
    j = d.astype(float)
    first = np.zeros(n + 1)
    first[1:] = (j[1:] - 1) ** (a + 1) - (j[1:] - 1 - a) * j[1:] ** a
    shape = (n + 1,) + (1,) * (v.ndim - 1)
    out = body + first.reshape(shape) * v[0]
    return out * g.h**a / math.gamma(a + 2)


def _beta_segment(e: float, a: float, lo, hi, clo, chi) -> np.ndarray:
    """``int_lo^hi u**e (1-u)**(a-1) du`` for ``0 <= lo < hi <= 1``, elementwise.

    ``clo``, ``chi`` are ``1 - lo``, ``1 - hi`` supplied exactly by the caller;
    the upper tail is taken from the mirrored incomplete beta function.
    """
    scale = special.beta(e + 1, a)
    upper = lo >= 0.5
    diff = np.empty_like(lo)
    diff[upper] = special.betainc(a, e + 1, clo[upper]) - special.betainc(a, e + 1, chi[upper])
    low = ~upper
    diff[low] = special.betainc(e + 1, a, hi[low]) - special.betainc(e + 1, a, lo[low])
    return scale * diff


@lru_cache(maxsize=16)
def _weighted_matrix(n: int, a: float, e: float, p: float = 1.0) -> np.ndarray:
    """Lower-triangular weights ``W`` with ``int_0^{y_j} = h**(e+a) (W @ ghat)[j]``.

    Built on the unit grid (``h = 1``); row ``j`` integrates ``ghat`` against
    ``s**e (j - s)**(a - 1)``. On each cell ``ghat`` is quadratic in
    ``w = s**p`` through three nodes: ``k..k+2``, shifted to ``1..3`` on the
    first cell and to ``n-2..n`` on the last. Grids of two cells fall back to
    linear interpolation. The origin node is never used.
    """
    j_all, k_all = np.tril_indices(n + 1, -1)
    lo = k_all / j_all
    hi = (k_all + 1) / j_all
    clo = (j_all - k_all) / j_all
    chi = (j_all - k_all - 1) / j_all
    jf = j_all.astype(float)
    # moments int_cell s**(e + i p) (j - s)**(a - 1) ds on the unit grid
    mom = [_beta_segment(e + i * p, a, lo, hi, clo, chi) * jf ** (e + i * p + a) for i in range(3)]
    W = np.zeros((n + 1, n + 1))
    if n >= 3:
        first = np.clip(k_all, 1, n - 2)
        nodes = [first, first + 1, first + 2]
        w = [nd.astype(float) ** p for nd in nodes]
        m0, m1, m2 = mom
        for i in range(3):
            o1, o2 = (w[t] for t in range(3) if t != i)
            den = (w[i] - o1) * (w[i] - o2)
            np.add.at(W, (j_all, nodes[i]), (m2 - (o1 + o2) * m1 + o1 * o2 * m0) / den)
    else:
        wlo = k_all.astype(float) ** p
        whi = (k_all + 1.0) ** p
        gap = whi - wlo
        m0, m1 = mom[0], mom[1]
        np.add.at(W, (j_all, k_all), (whi * m0 - m1) / gap)
        np.add.at(W, (j_all, k_all + 1), (m1 - wlo * m0) / gap)
    W.setflags(write=False)
    return W


def _weighted_integral(g: GridFunction1D, a: float, e: float, p: float) -> np.ndarray:
    n = g.n_intervals
    v = g.values
    y = g.y
    ghat = np.empty_like(v)
    shape = (n,) + (1,) * (v.ndim - 1)
    ghat[1:] = v[1:] / (y[1:] ** e).reshape(shape)
    # linear extrapolation in y**p to the origin; only read on two-cell grids
    ghat[0] = ghat[1] - (ghat[2] - ghat[1]) / (2.0**p - 1.0)
    W = _weighted_matrix(n, float(a), float(e), float(p))
    out = (W @ ghat.reshape(n + 1, -1)) * g.h ** (e + a) / math.gamma(a)
    out[0] = 0.0 if e + a > 0 else np.nan
    return out.reshape(v.shape)


def rl_integral(
    g: GridFunction1D, nu: float, singular_exponent: float | None = None, smooth_power: float = 1.0
) -> GridFunction1D:
    """Fractional integral of order ``-nu`` (``nu < 0``) from the origin.

    Without ``singular_exponent`` the product trapezoid rule is used (second
    order for smooth ``g``). With it, ``g = y**e * ghat`` is integrated by the
    weighted rule with ``ghat`` quadratic in ``y**smooth_power`` on every cell;
    node 0 of ``g`` is then ignored. ``smooth_power = alpha`` suits data that
    expand in powers of ``y**alpha``.
    """
    if not nu < 0:
        raise ValueError("rl_integral needs nu < 0")
    a = -nu
    if singular_exponent is None and g.valid_from == 0:
        return GridFunction1D(g.h, _trapezoid_integral(g, a))
    e = 0.0 if singular_exponent is None else float(singular_exponent)
    if not e > -1:
        raise ValueError("singular exponent must exceed -1")
    if not smooth_power > 0:
        raise ValueError("smooth_power must be positive")
    vals = _weighted_integral(g, a, e, float(smooth_power))
    valid = 0 if np.all(np.isfinite(vals[0])) else 1
    return GridFunction1D(g.h, vals, valid_from=valid)


def rl_derivative(
    g: GridFunction1D, nu: float, singular_exponent: float | None = None, smooth_power: float = 1.0
) -> GridFunction1D:
    """Fractional derivative of order ``nu`` in (0, 1): ``d/dy`` of the order ``nu - 1`` integral."""
    if not 0 < nu < 1:
        raise ValueError("rl_derivative needs 0 < nu < 1")
    integral = rl_integral(g, nu - 1, singular_exponent, smooth_power)
    vals = integral.values
    out = np.full_like(vals, np.nan)
    if singular_exponent is None and g.valid_from == 0:
        out[:] = np.gradient(vals, g.h, axis=0, edge_order=2)
        return GridFunction1D(g.h, out)
    # the integral is y**q times a factor smooth in y**p: differentiate that factor
    q = float(0.0 if singular_exponent is None else singular_exponent) + 1.0 - nu
    p = float(smooth_power)
    y = g.y[1:]
    shape = (y.size,) + (1,) * (vals.ndim - 1)
    yq = (y**q).reshape(shape)
    smooth = vals[1:] / yq
    slope = np.gradient(smooth, y**p, axis=0, edge_order=2)
    out[1:] = q * vals[1:] / y.reshape(shape) + yq * slope * (p * y ** (p - 1)).reshape(shape)
    return GridFunction1D(g.h, out, valid_from=1)


def gl_weights(nu: float, count: int) -> np.ndarray:
    """Grunwald-Letnikov weights ``(-1)**k binom(nu, k)``, ``k < count``."""
    w = np.empty(count)
    w[0] = 1.0
    for k in range(1, count):
        w[k] = w[k - 1] * (1.0 - (nu + 1.0) / k)
    return w


def gl_derivative(g: GridFunction1D, nu: float) -> GridFunction1D:
    """First-order Grunwald-Letnikov approximation of the order ``nu`` derivative."""
    if not 0 < nu < 1:
        raise ValueError("gl_derivative needs 0 < nu < 1")
    if g.valid_from != 0:
        raise ValueError("gl_derivative needs a value at the origin")
    w = gl_weights(nu, g.values.shape[0])
    return GridFunction1D(g.h, _convolve_leading(w, g.values) * g.h ** (-nu))
