r"""Scalar Wright function and its relatives.

The Wright function

.. math::

    \phi(\rho, \mu; z) = \sum_{k=0}^\infty \frac{z^k}{k!\,\Gamma(\rho k + \mu)},
    \qquad \rho > -1,

is evaluated by compensated series summation near the origin. For the kernel
family :math:`\phi(-\beta, \mu; -x)`, :math:`0 < \beta < 1`, :math:`x > 0`, the
alternating series cancels catastrophically once :math:`x` is moderate, so for
:math:`x^{1/(1-\beta)} > 1.5` the Hankel representation is integrated along its
steepest-descent path instead (see :func:`_phi_negative_contour`). For
positive arguments with :math:`-1 < \rho < 0` the series cancels as well; there
the Hankel loop collapsed onto the unit circle and the cut is used
(:func:`_phi_positive_contour`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from fracwright.errors import DomainExceeded, NonConvergent

__all__ = [
    "SeriesConfig",
    "WrightParams",
    "mittag_leffler",
    "reciprocal_gamma",
    "wright_phi",
    "wright_phi_shifted",
    "wright_type_e",
]

# below this value of x**(1/(1-beta)) the series is tried first
CONTOUR_SWITCH = 1.5
# above it the series is never attempted
SERIES_CEILING = 12.0
# series result accepted when eps * sum|terms| / |sum| stays under this
CANCELLATION_LIMIT = 1e-13
# positive arguments above this are checked for cancellation
POSITIVE_SWITCH = 0.5
# term budget for the trial series there; longer sums cancel too much anyway
POSITIVE_TRIAL_TERMS = 2000


@dataclass(frozen=True)
class WrightParams:
    """Parameters :math:`(\\rho, \\mu)` of :math:`\\phi(\\rho, \\mu; z)`."""

    rho: float
    mu: float

    def __post_init__(self) -> None:
        if not self.rho > -1.0:
            raise ValueError(f"rho must exceed -1, got {self.rho}")

    @classmethod
    def kernel(cls, beta: float, mu: float) -> WrightParams:
        """Parameters ``(-beta, mu)`` of the fractional kernel family."""
        if not 0.0 < beta < 1.0:
            raise ValueError(f"kernel order must lie in (0, 1), got {beta}")
        return cls(-beta, mu)


@dataclass(frozen=True)
class SeriesConfig:
    rel_tol: float = 1e-14
    max_terms: int = 10000
    domain_radius: float = 50.0

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be at least 1")


DEFAULT_SERIES = SeriesConfig()
# internal callers (matrix functions, quadrature) rely on the contour route
# and must not be cut off by the public domain radius
UNBOUNDED_SERIES = SeriesConfig(domain_radius=math.inf)


def reciprocal_gamma(x):
    """Entire function :math:`1/\\Gamma(x)`; exactly zero at ``0, -1, -2, ...``."""
    out = special.rgamma(x)
    return float(out) if np.ndim(out) == 0 else out


def _log_rgamma(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """``log|1/Gamma(x)|`` and its sign, without overflow for large ``|x|``."""
    x = np.asarray(x, dtype=float)
    pole = (x <= 0) & (x == np.round(x))
    with np.errstate(divide="ignore", invalid="ignore"):
        # reflection: 1/Gamma(x) = Gamma(1 - x) sin(pi x) / pi for x < 0.5
        s = np.sin(np.pi * np.where(x < 0.5, x, 0.5))
        log_neg = special.gammaln(1.0 - x) + np.log(np.abs(s)) - math.log(math.pi)
        log_pos = -special.gammaln(x)
    logabs = np.where(x < 0.5, log_neg, log_pos)
    sign = np.where(x < 0.5, np.sign(s), special.gammasgn(x))
    logabs = np.where(pole, -np.inf, logabs)
    sign = np.where(pole, 0.0, sign)
    return logabs, sign


def _peak_index(rho: float, zabs: np.ndarray) -> np.ndarray:
    """Rough index of the largest series term; the stopping rule must pass it."""
    if rho < 0:
        b = -rho
        return (zabs * b**b) ** (1.0 / (1.0 - b))
    if rho > 0:
        return (zabs * rho ** (-rho)) ** (1.0 / (1.0 + rho))
    return zabs


def _sum_series(coef, rho, z, cfg: SeriesConfig, what: str):
    """Neumaier-compensated summation of ``sum_k c_k z**k`` over an array ``z``.

    ``coef(k)`` returns ``(log|c_k|, sign c_k)``. Stops for an entry once three
    consecutive terms fall below ``rel_tol * |partial sum|`` and ``k`` has
    passed both ``|z|`` and the peak of the term magnitudes. Finished entries
    leave the working set. Returns the sum and the sum of ``|term_k|``.
    """
    shape = z.shape
    z = z.reshape(-1)
    zabs = np.abs(z)
    total_out = np.zeros_like(z)
    abs_out = np.zeros_like(z)
    idx = np.arange(z.size)
    with np.errstate(divide="ignore"):
        logz = np.log(zabs)
    zsign = np.sign(z)
    guard = np.maximum(zabs, _peak_index(rho, zabs))
    total = np.zeros_like(z)
    comp = np.zeros_like(z)
    absum = np.zeros_like(z)
    quiet = np.zeros(z.size, dtype=int)
    for k in range(cfg.max_terms):
        lc, sc = coef(k)
        if k == 0:
            term = np.full(idx.size, sc * math.exp(lc) if sc else 0.0)
        else:
            with np.errstate(under="ignore", over="ignore", invalid="ignore"):
                term = sc * zsign**k * np.exp(k * logz + lc) if sc else np.zeros(idx.size)
        with np.errstate(over="ignore", invalid="ignore"):
            absum += np.abs(term)
        if not np.all(np.isfinite(absum)):
            # overflow: the partial sums can no longer settle
            raise NonConvergent(f"{what}: series terms overflowed at k = {k}")
        t = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
        total = t
        s = total + comp
        quiet = np.where(np.abs(term) <= cfg.rel_tol * np.abs(s), quiet + 1, 0)
        done = (quiet >= 3) & (k > guard)
        if done.any():
            total_out[idx[done]] = s[done]
            abs_out[idx[done]] = absum[done]
            keep = ~done
            if not keep.any():
                return total_out.reshape(shape), abs_out.reshape(shape)
            idx, logz, zsign, guard = idx[keep], logz[keep], zsign[keep], guard[keep]
            total, comp, absum, quiet = total[keep], comp[keep], absum[keep], quiet[keep]
    raise NonConvergent(f"{what}: series did not converge in {cfg.max_terms} terms")


def _phi_series(rho: float, mu: float, z: np.ndarray, cfg: SeriesConfig, with_abs: bool = False):
    """Series for ``phi``; with ``with_abs`` also ``sum |terms|`` and no loss check."""

    def coef(k):
        lr, sr = _log_rgamma(rho * k + mu)
        return float(lr) - math.lgamma(k + 1), float(sr)

    total, absum = _sum_series(coef, rho, np.asarray(z, dtype=float), cfg, "wright_phi")
    if with_abs:
        return total, absum
    _check_cancellation(total, absum, "wright_phi")
    return total


# relative rounding error above which a series result is refused
PRECISION_FLOOR = 1e-7


def _check_cancellation(total, absum, what: str) -> None:
    with np.errstate(invalid="ignore"):
        lost = np.finfo(float).eps * absum > PRECISION_FLOOR * np.abs(total)
    if np.any(lost):
        raise NonConvergent(f"{what}: series lost too many digits to cancellation")


# tanh-sinh rule on (0, pi); distances to both ends kept separately so that
# sin(theta) stays accurate next to pi
def _tanh_sinh(step: float, tmax: float):
    t = np.arange(-tmax, tmax + step / 2, step)
    u = 0.5 * np.pi * np.sinh(t)
    weight = step * 0.25 * np.pi**2 * np.cosh(t) / np.cosh(u) ** 2
    dist0 = np.pi / (1.0 + np.exp(2.0 * u))
    distpi = np.pi / (1.0 + np.exp(-2.0 * u))
    return weight, dist0, distpi


_TS_WEIGHT, _TS_THETA, _TS_PI_GAP = _tanh_sinh(1.0 / 32.0, 3.6)


def _phi_negative_contour(beta: float, mu: float, x: np.ndarray) -> np.ndarray:
    r"""``phi(-beta, mu; -x)`` for ``x > 0`` from the Hankel integral.

    With :math:`\Lambda = x^{1/(1-\beta)}` and :math:`\sigma = \Lambda s`,

    .. math::

        \phi(-\beta, \mu; -x) = \frac{\Lambda^{1-\mu}}{2\pi i}
            \int_{Ha} e^{\Lambda (s - s^\beta)} s^{-\mu} \, ds .

    On the path :math:`s = r(\theta) e^{i\theta}` with
    :math:`r^{1-\beta} = \sin\beta\theta / \sin\theta` the exponent is real and
    decreasing in :math:`|\theta|`, so the integrand has no oscillating
    exponential and the result keeps its relative accuracy where it is tiny.
    """
    th = _TS_THETA
    sin_th = np.where(th < 0.5 * np.pi, np.sin(th), np.sin(_TS_PI_GAP))
    cos_th = np.cos(th)
    b = beta
    r = (np.sin(b * th) / sin_th) ** (1.0 / (1.0 - b))
    # beta*cot(beta*theta) - cot(theta), series near 0 to avoid cancellation
    small = th < 0.02
    ser = th / 3 * (1 - b**2) + th**3 / 45 * (1 - b**4) + 2 * th**5 / 945 * (1 - b**6)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        direct = b / np.tan(b * th) - cos_th / sin_th
        # r overflows next to theta = pi; those nodes are dropped below
        dr = r / (1.0 - b) * np.where(small, ser, direct)
    expo = r * cos_th - r**b * np.cos(b * th)
    shape = (1.0 - mu) * th
    weight_fn = dr * np.sin(shape) + r * np.cos(shape)
    with np.errstate(divide="ignore"):
        logr = np.log(r)

    x = np.asarray(x, dtype=float)
    lam = x ** (1.0 / (1.0 - b))
    out = np.zeros(x.shape)
    flat_lam = lam.reshape(-1)
    flat = out.reshape(-1)
    # the exponent peaks at theta = 0 with value -rate * lam; beyond
    # exp(-800) the result underflows and is left at zero
    rate = (1.0 - b) * b ** (b / (1.0 - b))
    with np.errstate(divide="ignore"):
        live = rate * flat_lam - (abs(mu) + 2.0) * np.log(np.maximum(flat_lam, 1.0)) < 800.0
    idx = np.flatnonzero(live)
    idx = idx[np.argsort(flat_lam[idx])]
    drop = expo + rate
    # chunk to bound memory of the (points x nodes) work array; points are
    # sorted by lam so each chunk can drop the nodes where its integrand underflows
    step = 2048
    for i in range(0, idx.size, step):
        sel = idx[i : i + step]
        lm = flat_lam[sel, None]
        keep = lm[0, 0] * drop > -760.0
        with np.errstate(over="ignore", invalid="ignore", under="ignore"):
            e = (1.0 - mu) * np.log(lm) + lm * expo[keep] - mu * logr[keep]
            vals = np.exp(e) * weight_fn[keep]
        vals = np.where(np.isfinite(e) & (e < 709.0), vals, 0.0)
        flat[sel] = vals @ _TS_WEIGHT[keep] / np.pi
    return out


def _positive_rules(circle: int, ray: int):
    th, wth = np.polynomial.legendre.leggauss(circle)
    s, ws = np.polynomial.laguerre.laggauss(ray)
    return 0.5 * np.pi * (th + 1), 0.5 * np.pi * wth, 1.0 + s, ws


_POSITIVE_RULES = (_positive_rules(96, 120), _positive_rules(64, 90))
# agreement required between the two positive-argument rules
POSITIVE_RULE_TOL = 1e-11


def _phi_positive_contour(beta: float, mu: float, x: np.ndarray) -> np.ndarray:
    r"""``phi(-beta, mu; x)`` for ``x > 0`` from the Hankel integral.

    The loop is collapsed onto the unit circle and the two banks of the cut
    along the negative axis:

    .. math::

        \pi \phi = \int_0^\pi \mathrm{Re}\, e^{e^{i	heta} + x e^{ieta	heta}
            + i(1-\mu)	heta} d	heta
          + \int_1^\infty e^{-r + x r^eta \cos\pieta} r^{-\mu}
            \sin(\pi\mu - x r^eta \sin\pieta) \, dr .

    The integrand stays of size ``exp(O(x))`` where the series terms grow
    much faster, so far less is lost to cancellation. Gauss-Legendre on the
    arc and Gauss-Laguerre on the ray; two rule sizes must agree.
    """
    x = np.asarray(x, dtype=float).reshape(-1, 1)
    vals = []
    for th, wth, r, wr in _POSITIVE_RULES:
        arc = np.exp(np.exp(1j * th) + x * np.exp(1j * beta * th) + 1j * (1.0 - mu) * th).real
        ray = np.exp(-1.0 + x * r**beta * math.cos(math.pi * beta) - mu * np.log(r))
        ray = ray * np.sin(math.pi * mu - x * r**beta * math.sin(math.pi * beta))
        vals.append(((arc @ wth + ray @ wr) / math.pi, (np.abs(arc) @ wth + np.abs(ray) @ wr) / math.pi))
    (fine, size), (coarse, _) = vals
    with np.errstate(invalid="ignore"):
        bad = ~(np.abs(fine - coarse) <= POSITIVE_RULE_TOL * size) | (np.finfo(float).eps * size > PRECISION_FLOOR * np.abs(fine))
    if np.any(bad):
        raise NonConvergent("wright_phi: positive-argument contour did not reach the required accuracy")
    return fine


def _positive_series_trial(rho: float, mu: float, x: np.ndarray, terms: int, rel_tol: float):
    """Series at ``x > 0`` summed over a fixed number of terms at once.

    Returns the sums and a mask of entries that converged within ``terms``
    without overflow or loss to cancellation; the rest need the contour.
    """
    k = np.arange(terms)
    lr, sr = _log_rgamma(rho * k + mu)
    lc = lr - special.gammaln(k + 1.0)
    guard = np.maximum(x, _peak_index(rho, x))
    vals = np.empty(x.shape)
    ok = np.zeros(x.shape, dtype=bool)
    # rows in chunks keep the term matrix small
    for lo in range(0, x.size, 256):
        xs = x[lo : lo + 256]
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            t = sr[None, :] * np.exp(lc[None, :] + k[None, :] * np.log(xs)[:, None])
            v = np.array([math.fsum(row) if np.all(np.isfinite(row)) else math.nan for row in t])
            absum = np.sum(np.abs(t), axis=1)
            good = np.isfinite(v) & np.isfinite(absum) & (guard[lo : lo + 256] < terms - 3)
            good &= np.max(np.abs(t[:, -3:]), axis=1) <= rel_tol * np.abs(v)
            good &= np.finfo(float).eps * absum <= CANCELLATION_LIMIT * np.abs(v)
        vals[lo : lo + 256] = v
        ok[lo : lo + 256] = good
    return vals, ok


def _phi_array(rho: float, mu: float, z: np.ndarray, cfg: SeriesConfig) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if not -1.0 < rho < 0.0:
        return _phi_series(rho, mu, z, cfg)
    beta = -rho
    shape = z.shape
    z = z.reshape(-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(z < 0, np.abs(z) ** (1.0 / (1.0 - beta)), 0.0)
    use_contour = lam > SERIES_CEILING
    # positive arguments: the series cancels heavily once x is moderate
    positive = z > POSITIVE_SWITCH
    use_positive = np.zeros(z.shape, dtype=bool)
    trial = np.zeros(z.shape, dtype=bool)
    trial_vals = np.empty(z.shape)
    if positive.any():
        idx = np.flatnonzero(positive)
        vals, ok = _positive_series_trial(rho, mu, z[positive], min(cfg.max_terms, POSITIVE_TRIAL_TERMS), cfg.rel_tol)
        use_positive[idx[~ok]] = True
        trial[idx[ok]] = True
        trial_vals[idx[ok]] = vals[ok]
    # in the band between the two thresholds keep the series only while its
    # rounding error is negligible
    band = (lam > CONTOUR_SWITCH) & ~use_contour
    if band.any():
        vals, absum = _phi_series(rho, mu, z[band], cfg, with_abs=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            ok = np.finfo(float).eps * absum <= CANCELLATION_LIMIT * np.abs(vals)
        idx = np.flatnonzero(band)
        use_contour[idx[~ok]] = True
    if not use_contour.any() and not use_positive.any() and not trial.any():
        return _phi_series(rho, mu, z, cfg).reshape(shape)
    out = np.empty(z.shape)
    out[trial] = trial_vals[trial]
    if use_contour.any():
        out[use_contour] = _phi_negative_contour(beta, mu, -z[use_contour])
    if use_positive.any():
        out[use_positive] = _phi_positive_contour(beta, mu, z[use_positive])
    rest = ~use_contour & ~use_positive & ~trial
    if rest.any():
        out[rest] = _phi_series(rho, mu, z[rest], cfg)
    return out.reshape(shape)


def wright_phi(p: WrightParams, z, cfg: SeriesConfig = DEFAULT_SERIES):
    """Wright function :math:`\\phi(\\rho, \\mu; z)` for real ``z`` (scalar or array).

    Raises :class:`DomainExceeded` when ``|z| > cfg.domain_radius``.
    """
    za = np.asarray(z, dtype=float)
    if np.any(np.abs(za) > cfg.domain_radius):
        raise DomainExceeded(
            f"wright_phi: |z|={np.max(np.abs(za)):g} exceeds domain radius {cfg.domain_radius:g}"
        )
    out = _phi_array(p.rho, p.mu, za, cfg)
    return float(out) if out.ndim == 0 else out


def wright_phi_shifted(p: WrightParams, z, m: int, cfg: SeriesConfig = DEFAULT_SERIES):
    r"""Jordan-block entry :math:`\frac{z^m}{m!}\phi(\rho, \mu + \rho m; z)`.

    This is :math:`\frac{1}{m!}\partial_\lambda^m \phi(\rho,\mu;\lambda z)`
    at :math:`\lambda = 1`.
    """
    if m < 0:
        raise ValueError("m must be non-negative")
    za = np.asarray(z, dtype=float)
    base = wright_phi(WrightParams(p.rho, p.mu + p.rho * m), za, cfg)
    out = za**m / math.factorial(m) * base
    return float(out) if np.ndim(out) == 0 else out


def wright_type_e(alpha: float, beta: float, mu: float, nu: float, z, cfg: SeriesConfig = DEFAULT_SERIES):
    r"""Two-gamma Wright-type function

    .. math::

        e_{\alpha,\beta}^{\mu,\nu}(z) = \sum_{k\ge0}
            \frac{z^k}{\Gamma(\mu + \alpha k)\,\Gamma(\nu - \beta k)} .

    The series is entire for ``alpha > beta``. For ``alpha < beta``, and for
    ``alpha == beta`` with ``|z| > 1``, the value is taken from the continuation
    ``e(z) = -z**-1 * e_{beta,alpha}^{nu+beta, mu-alpha}(1/z)``, whose series
    converges there.
    """
    za = np.asarray(z, dtype=float)
    if np.any(np.abs(za) > cfg.domain_radius):
        raise DomainExceeded(f"wright_type_e: |z| exceeds domain radius {cfg.domain_radius:g}")
    out = np.empty(za.shape)
    if alpha > beta:
        direct = np.ones(za.shape, dtype=bool)
    elif alpha < beta:
        direct = za == 0
    else:
        if np.any(np.isclose(np.abs(za), 1.0, rtol=1e-3)):
            raise NonConvergent("wright_type_e: |z| = 1 is on the circle of convergence")
        direct = np.abs(za) < 1.0
    if direct.any():
        out[direct] = _e_series(alpha, beta, mu, nu, za[direct], cfg)
    inv = ~direct
    if inv.any():
        w = 1.0 / za[inv]
        out[inv] = -w * _e_series(beta, alpha, nu + beta, mu - alpha, w, cfg)
    return float(out) if out.ndim == 0 else out


def _e_series(alpha, beta, mu, nu, z, cfg):
    def coef(k):
        la, sa = _log_rgamma(mu + alpha * k)
        lb, sb = _log_rgamma(nu - beta * k)
        return float(la + lb), float(sa * sb)

    total, absum = _sum_series(coef, 0.0, np.asarray(z, dtype=float), cfg, "wright_type_e")
    _check_cancellation(total, absum, "wright_type_e")
    return total


def mittag_leffler(alpha: float, beta: float, z, rel_tol: float = 1e-15, max_terms: int = 20000):
    r"""Two-parameter Mittag-Leffler function :math:`E_{\alpha,\beta}(z)` by series.

    Used as an independent oracle. For negative ``z`` the alternating series
    loses digits; :class:`DomainExceeded` is raised when the cancellation
    estimate ``eps * sum|t_k| / |E|`` exceeds ``1e-12``, and for positive ``z``
    with ``z**(1/alpha) > 700``, where the value overflows.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    za = np.asarray(z, dtype=float)
    with np.errstate(divide="ignore"):
        logz = np.log(np.abs(za))
    zsign = np.sign(za)
    total = np.zeros(za.shape)
    comp = np.zeros(za.shape)
    absum = np.zeros(za.shape)
    quiet = np.zeros(za.shape, dtype=int)
    guard = np.abs(za) ** (1.0 / alpha)
    # E grows like exp(z**(1/alpha)) for z > 0
    if np.any((za > 0) & (guard > 700.0)):
        raise DomainExceeded("mittag_leffler: value overflows double precision")
    for k in range(max_terms):
        lr, sr = _log_rgamma(alpha * k + beta)
        with np.errstate(under="ignore"):
            if k == 0:
                term = np.broadcast_to(sr * np.exp(lr), za.shape).astype(float)
            else:
                term = sr * zsign**k * np.exp(k * logz + lr)
        absum += np.abs(term)
        t = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
        total = t
        s = total + comp
        quiet = np.where(np.abs(term) <= rel_tol * np.abs(s), quiet + 1, 0)
        if np.all(quiet >= 3) and k > guard.max():
            break
    else:
        raise NonConvergent(f"mittag_leffler: no convergence in {max_terms} terms")
    out = total + comp
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = np.finfo(float).eps * absum / np.abs(out)
    if np.any((cond > 1e-12) & (absum > 0)):
        raise DomainExceeded("mittag_leffler: cancellation too severe for double precision")
    return float(out) if out.ndim == 0 else out
