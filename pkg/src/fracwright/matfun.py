"""Functions of small square matrices: Wright function of a matrix argument,
the matrix exponential, Jordan-structure assembly and spectral bounds.

Two evaluation routes exist for :func:`matrix_wright`:

* the matrix power series, used while its terms stay small enough for double
  precision to hold the requested accuracy;
* a blocked Schur-Parlett evaluation otherwise. Eigenvalues are clustered,
  each diagonal cluster block is expanded in a Taylor series about the cluster
  centre (the derivatives of :math:`\\lambda \\mapsto \\phi(\\rho,\\mu;\\lambda z)`
  are shifted-parameter Wright functions), and off-diagonal blocks follow from
  the block Parlett recurrence. No Jordan decomposition is ever computed.

Every routine accepts a batch of scalar arguments ``z`` and returns an array of
shape ``z.shape + (n, n)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import linalg

from fracwright.errors import DomainExceeded, NonConvergent, NonPositiveSpectrum
from fracwright.wright import (
    DEFAULT_SERIES,
    UNBOUNDED_SERIES,
    SeriesConfig,
    WrightParams,
    _log_rgamma,
    _phi_array,
    reciprocal_gamma,
)

__all__ = [
    "JordanForm",
    "SpectrumInfo",
    "as_square",
    "eigen_bounds",
    "matrix_exp",
    "matrix_mittag_leffler",
    "matrix_wright",
    "matrix_wright_jordan",
    "max_abs",
]

MAX_ORDER = 8
# largest series term tolerated before switching to Schur-Parlett
SERIES_TERM_LIMIT = 1e3


def as_square(M, *, name: str = "matrix") -> np.ndarray:
    """Validate and return ``M`` as a float ``(n, n)`` array with ``1 <= n <= 8``."""
    A = np.array(M, dtype=float)
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"{name} must be square, got shape {A.shape}")
    if not 1 <= A.shape[0] <= MAX_ORDER:
        raise ValueError(f"{name} order must lie in 1..{MAX_ORDER}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} has non-finite entries")
    return A


def max_abs(M) -> float:
    """The ``|.|_*`` norm: largest modulus of the entries."""
    return float(np.max(np.abs(M)))


@dataclass(frozen=True)
class JordanForm:
    """``A = H J Hinv`` with ``J`` block diagonal of Jordan cells.

    ``blocks`` lists ``(eigenvalue, size)`` pairs in the order the cells appear
    along the diagonal of ``J``.
    """

    H: np.ndarray
    Hinv: np.ndarray
    blocks: tuple[tuple[float, int], ...]

    def __post_init__(self) -> None:
        n = self.H.shape[0]
        if sum(size for _, size in self.blocks) != n:
            raise ValueError("Jordan block sizes must add up to the matrix order")
        if any(size < 1 for _, size in self.blocks):
            raise ValueError("Jordan block sizes must be positive")

    @classmethod
    def from_blocks(cls, blocks, H=None) -> JordanForm:
        blocks = tuple((float(lam), int(size)) for lam, size in blocks)
        n = sum(size for _, size in blocks)
        H = np.eye(n) if H is None else as_square(H, name="H")
        return cls(H, np.linalg.inv(H), blocks)

    def jordan_matrix(self) -> np.ndarray:
        n = self.H.shape[0]
        J = np.zeros((n, n))
        i = 0
        for lam, size in self.blocks:
            J[i : i + size, i : i + size] = lam * np.eye(size) + np.eye(size, k=1)
            i += size
        return J

    def matrix(self) -> np.ndarray:
        return self.H @ self.jordan_matrix() @ self.Hinv


@dataclass(frozen=True)
class SpectrumInfo:
    """``min_eig``: smallest real part; ``gamma``: largest ``|Re|`` over the spectrum."""

    min_eig: float
    gamma: float
    eigenvalues: np.ndarray = field(repr=False, compare=False)


def _cluster_eigenvalues(eigs: np.ndarray, tol: float) -> list[list[int]]:
    """Connected components of the graph ``|l_i - l_j| <= tol``."""
    n = eigs.size
    label = list(range(n))

    def find(i):
        while label[i] != i:
            label[i] = label[label[i]]
            i = label[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(eigs[i] - eigs[j]) <= tol:
                label[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: (np.mean(eigs[g].real), np.mean(eigs[g].imag)))


def _cluster_tol(eigs: np.ndarray) -> float:
    return 1e-2 * max(1.0, float(np.max(np.abs(eigs))))


def eigen_bounds(M, role: str = "coefficient") -> SpectrumInfo:
    """Spectral data used by the tail bounds.

    For ``role="coefficient"`` every eigenvalue must be real and positive
    (checked on cluster means, so defective eigenvalues split by rounding are
    not rejected), else :class:`NonPositiveSpectrum` is raised.
    """
    if role not in ("coefficient", "source"):
        raise ValueError(f"unknown role {role!r}")
    A = as_square(M)
    eigs = np.linalg.eigvals(A)
    means = np.array([eigs[g].mean() for g in _cluster_eigenvalues(eigs, _cluster_tol(eigs))])
    gamma = float(np.max(np.abs(means.real)))
    if role == "coefficient":
        scale = max(1.0, float(np.max(np.abs(means))))
        bad = (np.abs(means.imag) > 1e-8 * scale) | (means.real <= 0)
        if bad.any():
            raise NonPositiveSpectrum(
                f"NonPositiveSpectrum: eigenvalue {means[bad][0]:.6g} is not real and positive"
            )
    return SpectrumInfo(float(np.min(means.real)), gamma, means)


# ---------------------------------------------------------------------------
# blocked Schur-Parlett


def _swap_schur(T: np.ndarray, Q: np.ndarray, k: int) -> None:
    """Swap diagonal entries ``k`` and ``k+1`` of complex triangular ``T`` in place."""
    a, b, c = T[k, k], T[k, k + 1], T[k + 1, k + 1]
    x = np.array([b, c - a])
    nrm = np.linalg.norm(x)
    if nrm == 0:
        return
    x = x / nrm
    G = np.array([[x[0], -np.conj(x[1])], [x[1], np.conj(x[0])]])
    T[:, k : k + 2] = T[:, k : k + 2] @ G
    T[k : k + 2, :] = G.conj().T @ T[k : k + 2, :]
    Q[:, k : k + 2] = Q[:, k : k + 2] @ G
    T[k + 1, k] = 0.0
    T[k, k], T[k + 1, k + 1] = c, a


class SpectralPlan:
    """Precomputed Schur data for evaluating many functions of one matrix."""

    def __init__(self, A: np.ndarray):
        A = np.asarray(A)
        self.real_input = np.isrealobj(A)
        T, Q = linalg.schur(A.astype(complex), output="complex")
        eigs = np.diag(T).copy()
        groups = _cluster_eigenvalues(eigs, _cluster_tol(eigs))
        owner = np.empty(eigs.size, dtype=int)
        for g, members in enumerate(groups):
            owner[members] = g
        # bubble the diagonal into cluster order
        order = list(owner)
        n = eigs.size
        for sweep in range(n):
            for k in range(n - 1):
                if order[k] > order[k + 1]:
                    _swap_schur(T, Q, k)
                    order[k], order[k + 1] = order[k + 1], order[k]
        self.T, self.Q, self.n = T, Q, n
        bounds = np.flatnonzero(np.diff(order)) + 1
        self.slices = [slice(s, e) for s, e in zip(np.r_[0, bounds], np.r_[bounds, n])]
        self.centers = np.array([np.mean(np.diag(T)[s]) for s in self.slices])
        self.nilpotent = [T[s, s] - c * np.eye(s.stop - s.start) for s, c in zip(self.slices, self.centers)]
        self._sylvester = {}
        for i, si in enumerate(self.slices):
            for j in range(i + 1, len(self.slices)):
                sj = self.slices[j]
                pi, pj = si.stop - si.start, sj.stop - sj.start
                op = np.kron(np.eye(pj), T[si, si]) - np.kron(T[sj, sj].T, np.eye(pi))
                self._sylvester[i, j] = np.linalg.inv(op)

    def evaluate(self, taylor, batch_shape) -> np.ndarray:
        """``f(A)`` for a batch of functions.

        ``taylor(c, k)`` returns ``f^{(k)}(c) / k!`` for every batch member as an
        array of shape ``batch_shape``.
        """
        nb = int(np.prod(batch_shape, dtype=int))
        T = self.T
        F = np.zeros((nb, self.n, self.n), dtype=complex)
        for s, c, N in zip(self.slices, self.centers, self.nilpotent):
            F[:, s, s] = self._cluster_block(taylor, c, N, nb)
        p = len(self.slices)
        for d in range(1, p):
            for i in range(p - d):
                j = i + d
                si, sj = self.slices[i], self.slices[j]
                rhs = F[:, si, si] @ T[si, sj] - T[si, sj] @ F[:, sj, sj]
                for k in range(i + 1, j):
                    sk = self.slices[k]
                    rhs += F[:, si, sk] @ T[sk, sj] - T[si, sk] @ F[:, sk, sj]
                pi, pj = si.stop - si.start, sj.stop - sj.start
                vec = rhs.transpose(0, 2, 1).reshape(nb, pi * pj)
                X = (vec @ self._sylvester[i, j].T).reshape(nb, pj, pi).transpose(0, 2, 1)
                F[:, si, sj] = X
        out = self.Q @ F @ self.Q.conj().T
        return out.reshape(tuple(batch_shape) + (self.n, self.n))

    @staticmethod
    def _cluster_block(taylor, c, N, nb):
        size = N.shape[0]
        first = np.asarray(taylor(c, 0), dtype=complex).reshape(nb)
        block = first[:, None, None] * np.eye(size)
        if size == 1 and N[0, 0] == 0:
            return block
        power = np.eye(size, dtype=complex)
        scale = np.maximum(np.abs(first), 1e-300)
        quiet = 0
        for k in range(1, 400):
            power = power @ N
            pn = np.max(np.abs(power))
            if pn == 0:
                return block
            coef = np.asarray(taylor(c, k), dtype=complex).reshape(nb)
            block = block + coef[:, None, None] * power
            scale = np.maximum(scale, np.max(np.abs(block), axis=(1, 2)))
            contribution = np.abs(coef) * pn
            if np.all(contribution <= 1e-17 * scale):
                quiet += 1
                if quiet >= 3 and k >= size:
                    return block
            else:
                quiet = 0
        raise NonConvergent("Taylor expansion on an eigenvalue cluster did not converge")


@lru_cache(maxsize=64)
def _plan_cached(key: bytes, n: int) -> SpectralPlan:
    return SpectralPlan(np.frombuffer(key, dtype=float).reshape(n, n))


def spectral_plan(A: np.ndarray) -> SpectralPlan:
    A = np.ascontiguousarray(A, dtype=float)
    return _plan_cached(A.tobytes(), A.shape[0])


# ---------------------------------------------------------------------------
# matrix Wright function


def _series_is_safe(rho: float, mu: float, x: float) -> bool:
    """Whether the scalar majorant ``sum x^k |1/Gamma(rho k + mu)| / k!`` stays small."""
    if x == 0:
        return True
    k = np.arange(0, 400)
    la, _ = _log_rgamma(rho * k + mu)
    from scipy.special import gammaln

    logs = k * math.log(x) - gammaln(k + 1) + la
    return bool(np.max(logs) <= math.log(SERIES_TERM_LIMIT))


def _matrix_series(p: WrightParams, A: np.ndarray, z: np.ndarray, cfg: SeriesConfig) -> np.ndarray:
    n = A.shape[0]
    zf = z.reshape(-1)
    Az = zf[:, None, None] * A
    power = np.broadcast_to(np.eye(n), Az.shape).copy()
    total = reciprocal_gamma(p.mu) * power
    comp = np.zeros_like(total)
    absum = np.max(np.abs(total), axis=(1, 2))
    guard = float(np.max(np.abs(zf))) * float(np.max(np.abs(np.linalg.eigvals(A))) + 1)
    quiet = 0
    for k in range(1, cfg.max_terms):
        power = power @ Az / k
        term = reciprocal_gamma(p.rho * k + p.mu) * power
        t = total + term
        comp += np.where(np.abs(total) >= np.abs(term), (total - t) + term, (term - t) + total)
        total = t
        s = total + comp
        size = np.max(np.abs(term), axis=(1, 2))
        absum = absum + size
        # against the absolute sum too, so that zeros of the function still terminate
        scale = np.maximum(np.max(np.abs(s), axis=(1, 2)), 1e-3 * absum)
        small = size <= cfg.rel_tol * scale
        quiet = quiet + 1 if np.all(small) else 0
        if quiet >= 3 and k > guard:
            return (total + comp).reshape(z.shape + (n, n))
    raise NonConvergent(f"matrix_wright: series did not converge in {cfg.max_terms} terms")


def _wright_taylor(p: WrightParams, z: np.ndarray, cfg: SeriesConfig):
    """Taylor coefficients of ``lam -> phi(rho, mu; lam z)`` about a real centre."""
    cache = {}
    zf = z.reshape(-1)

    def taylor(c, k):
        if abs(c.imag) > 1e-8 * max(1.0, abs(c)):
            raise DomainExceeded("matrix_wright: complex eigenvalues are outside the spectral route")
        if k not in cache:
            vals = _phi_array(p.rho, p.mu + p.rho * k, c.real * zf, cfg)
            with np.errstate(over="ignore", invalid="ignore"):
                coef = zf**k / math.factorial(k) * vals if k < 170 else np.exp(
                    k * np.log(np.abs(zf)) - math.lgamma(k + 1)
                ) * np.sign(zf) ** k * vals
            cache[k] = np.nan_to_num(coef, nan=0.0, posinf=0.0, neginf=0.0)
        return cache[k]

    return taylor


def _matrix_wright_array(p: WrightParams, A: np.ndarray, z, cfg: SeriesConfig) -> np.ndarray:
    """Batched matrix Wright function without the public domain check."""
    za = np.asarray(z, dtype=float)
    n = A.shape[0]
    norm = float(np.max(np.sum(np.abs(A), axis=1)))
    zmax = float(np.max(np.abs(za))) if za.size else 0.0
    if _series_is_safe(p.rho, p.mu, norm * zmax):
        return _matrix_series(p, A, za, cfg)
    plan = spectral_plan(A)
    # Taylor coefficients of the cluster expansion are indexed per centre
    taylors = {}

    def taylor(c, k):
        key = complex(c)
        if key not in taylors:
            taylors[key] = _wright_taylor(p, za, cfg)
        return taylors[key](c, k)

    out = plan.evaluate(taylor, za.shape)
    return out.real if plan.real_input else out


def matrix_wright(p: WrightParams, A, z, cfg: SeriesConfig = DEFAULT_SERIES) -> np.ndarray:
    """Wright function of a matrix argument, :math:`\\phi(\\rho, \\mu; Az)`.

    ``z`` may be a scalar or an array; the result has shape ``z.shape + (n, n)``.
    Raises :class:`DomainExceeded` when ``spectral_radius(A) * |z|`` exceeds
    ``cfg.domain_radius``.
    """
    A = as_square(A, name="A")
    za = np.asarray(z, dtype=float)
    radius = float(np.max(np.abs(np.linalg.eigvals(A))))
    if za.size and radius * float(np.max(np.abs(za))) > cfg.domain_radius:
        raise DomainExceeded(
            f"matrix_wright: spectral radius * |z| exceeds domain radius {cfg.domain_radius:g}"
        )
    return _matrix_wright_array(p, A, za, cfg)


def matrix_wright_jordan(p: WrightParams, jf: JordanForm, z, cfg: SeriesConfig = DEFAULT_SERIES) -> np.ndarray:
    """Assemble ``H phi(rho, mu; J z) Hinv`` block by block from known Jordan data.

    Entry ``m`` above the diagonal of the cell for eigenvalue ``lam`` is
    ``z**m / m! * phi(rho, mu + rho*m; lam*z)``.
    """
    za = np.asarray(z, dtype=float)
    n = jf.H.shape[0]
    Fj = np.zeros(za.shape + (n, n))
    start = 0
    for lam, size in jf.blocks:
        for m in range(size):
            entry = za**m / math.factorial(m) * _phi_array(p.rho, p.mu + p.rho * m, lam * za, cfg)
            for i in range(size - m):
                Fj[..., start + i, start + i + m] = entry
        start += size
    return jf.H @ Fj @ jf.Hinv


# ---------------------------------------------------------------------------
# exponential

_PADE13 = (
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
)
_THETA13 = 5.371920351148152
EXP_DOMAIN = 20.0


def matrix_exp(B, t: float = 1.0) -> np.ndarray:
    """``exp(B t)`` by scaling and squaring with the degree-13 Pade approximant.

    Raises :class:`DomainExceeded` when ``||B t||_1 > 20``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    M = as_square(B, name="B") * t
    n = M.shape[0]
    if not np.any(M):
        return np.eye(n)
    norm = float(np.max(np.sum(np.abs(M), axis=0)))
    if norm > EXP_DOMAIN:
        raise DomainExceeded(f"matrix_exp: ||B t||_1 = {norm:.3g} exceeds {EXP_DOMAIN}")
    s = max(0, int(math.ceil(math.log2(norm / _THETA13)))) if norm > _THETA13 else 0
    M = M / 2.0**s
    b = _PADE13
    I = np.eye(n)
    M2 = M @ M
    M4 = M2 @ M2
    M6 = M4 @ M2
    U = M @ (M6 @ (b[13] * M6 + b[11] * M4 + b[9] * M2) + b[7] * M6 + b[5] * M4 + b[3] * M2 + b[1] * I)
    V = M6 @ (b[12] * M6 + b[10] * M4 + b[8] * M2) + b[6] * M6 + b[4] * M4 + b[2] * M2 + b[0] * I
    E = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        E = E @ E
    return E


def matrix_exp_batch(B: np.ndarray, t) -> np.ndarray:
    """``exp(B t)`` for an array of times through the Schur-Parlett plan."""
    B = as_square(B, name="B")
    ta = np.asarray(t, dtype=float)
    if not np.any(B):
        return np.broadcast_to(np.eye(B.shape[0]), ta.shape + B.shape).copy()
    plan = spectral_plan(B)
    tf = ta.reshape(-1)

    def taylor(c, k):
        return tf**k / math.factorial(k) * np.exp(c * tf)

    out = plan.evaluate(taylor, ta.shape)
    return out.real if plan.real_input else out


def matrix_mittag_leffler(alpha: float, beta: float, M, rel_tol: float = 1e-16, max_terms: int = 5000) -> np.ndarray:
    """``E_{alpha,beta}(M)`` by the plain matrix power series (oracle use only)."""
    M = as_square(M)
    n = M.shape[0]
    total = np.zeros((n, n))
    power = np.eye(n)
    quiet = 0
    for k in range(max_terms):
        term = reciprocal_gamma(alpha * k + beta) * power
        total = total + term
        quiet = quiet + 1 if max_abs(term) <= rel_tol * max(max_abs(total), 1e-300) else 0
        if quiet >= 3:
            return total
        power = power @ M
    raise NonConvergent("matrix_mittag_leffler: series did not converge")
