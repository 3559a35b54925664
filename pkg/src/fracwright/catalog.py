"""Named data functions for sources ``f`` and boundary data ``phi_i``.

Every catalog function is a finite sum of separable terms
``c * P_1(t_1) * ... * P_k(t_k)`` with an ``n``-vector ``c`` and one-variable
profiles ``P`` that are either powers ``t**p`` or piecewise linear. Both
profile kinds have exact convolutions with the kernel factors, which is what
lets the solver evaluate the solution without multidimensional quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from fracwright.errors import ParseError, SpecViolation

__all__ = [
    "CatalogFunction",
    "Constant",
    "PiecewiseLinear",
    "Polynomial",
    "Power",
    "ProductPower",
    "SampleGrid",
    "Term",
    "Zero",
    "from_dict",
]


@dataclass(frozen=True)
class Power:
    """Profile ``t**p``."""

    p: float

    def __call__(self, t):
        return np.asarray(t, dtype=float) ** self.p


@dataclass(frozen=True)
class PiecewiseLinear:
    """Profile interpolating ``values`` at ``knots`` (``knots[0] == 0``), linear beyond the ends."""

    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        k, v = np.asarray(self.knots), np.asarray(self.values)
        out = np.interp(t, k, v)
        right = t > k[-1]
        if right.any():
            slope = (v[-1] - v[-2]) / (k[-1] - k[-2])
            out = np.where(right, v[-1] + slope * (t - k[-1]), out)
        return out

    def ramps(self) -> tuple[float, float, list[tuple[float, float]]]:
        """``(value at 0, initial slope, [(knot, slope change), ...])``."""
        k, v = np.asarray(self.knots), np.asarray(self.values)
        slopes = np.diff(v) / np.diff(k)
        kinks = [(float(k[i]), float(slopes[i] - slopes[i - 1])) for i in range(1, len(slopes))]
        return float(v[0]), float(slopes[0]), [(c, d) for c, d in kinks if d != 0.0]


@dataclass(frozen=True)
class Term:
    coef: np.ndarray
    profiles: tuple


class CatalogFunction:
    """Base class: ``n``-vector valued function of ``k`` arguments."""

    name = ""

    def __init__(self, n: int, k: int):
        self.n, self.k = n, k

    def terms(self) -> list[Term]:
        raise NotImplementedError

    def __call__(self, points) -> np.ndarray:
        """Values at ``points`` of shape ``(..., k)``; returns ``(..., n)``."""
        pts = np.asarray(points, dtype=float)
        if self.k == 0:
            pts = pts.reshape(pts.shape + (0,)) if pts.ndim == 0 else pts
        lead = pts.shape[:-1]
        out = np.zeros(lead + (self.n,))
        for term in self.terms():
            w = np.ones(lead)
            for i, prof in enumerate(term.profiles):
                w = w * prof(pts[..., i])
            out = out + w[..., None] * term.coef
        return out

    def weight_exponents(self) -> list[tuple[float, ...]]:
        """Leading power of each argument per term (0 for piecewise-linear profiles)."""
        return [tuple(p.p if isinstance(p, Power) else 0.0 for p in t.profiles) for t in self.terms()]

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.to_dict() == other.to_dict()


def _vector(c, n: int, what: str) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float))
    if c.shape != (n,) or not np.all(np.isfinite(c)):
        raise SpecViolation(f"{what}: expected {n} finite entries")
    return c


class Zero(CatalogFunction):
    name = "zero"

    def terms(self):
        return []

    def to_dict(self):
        return {"name": "zero"}


class ProductPower(CatalogFunction):
    """``coef * prod_i t_i**p_i``."""

    name = "product-power"

    def __init__(self, n: int, k: int, coef, powers):
        super().__init__(n, k)
        self.coef = _vector(coef, n, "coef")
        self.powers = tuple(float(p) for p in powers)
        if len(self.powers) != k:
            raise SpecViolation(f"powers: expected {k} entries, got {len(self.powers)}")

    def terms(self):
        return [Term(self.coef, tuple(Power(p) for p in self.powers))]

    def to_dict(self):
        return {"name": self.name, "coef": self.coef.tolist(), "powers": list(self.powers)}


class Constant(ProductPower):
    name = "constant"

    def __init__(self, n: int, k: int, value):
        super().__init__(n, k, value, (0.0,) * k)

    def to_dict(self):
        return {"name": self.name, "value": self.coef.tolist()}


class Polynomial(CatalogFunction):
    """Sum of monomials ``coef_j * prod_i t_i**e_ji`` with non-negative integer ``e_ji``."""

    name = "polynomial"

    def __init__(self, n: int, k: int, terms):
        super().__init__(n, k)
        self._terms = []
        for j, t in enumerate(terms):
            powers = tuple(t["powers"])
            if len(powers) != k or any(int(p) != p or p < 0 for p in powers):
                raise SpecViolation(f"terms[{j}].powers: need {k} non-negative integers")
            self._terms.append(Term(_vector(t["coef"], n, f"terms[{j}].coef"), tuple(Power(float(p)) for p in powers)))

    def terms(self):
        return list(self._terms)

    def to_dict(self):
        return {
            "name": self.name,
            "terms": [{"coef": t.coef.tolist(), "powers": [int(p.p) for p in t.profiles]} for t in self._terms],
        }


class SampleGrid(CatalogFunction):
    """Tensor-product piecewise-linear interpolant of node values.

    ``axes[i]`` are increasing nodes starting at 0; ``values`` has shape
    ``(len(axes[0]), ..., len(axes[k-1]), n)``.
    """

    name = "sample-grid"

    def __init__(self, n: int, k: int, axes, values):
        super().__init__(n, k)
        self.axes = tuple(tuple(float(v) for v in a) for a in axes)
        if len(self.axes) != k:
            raise SpecViolation(f"axes: expected {k} axes")
        for i, a in enumerate(self.axes):
            if len(a) < 2 or a[0] != 0.0 or any(b <= c for c, b in zip(a, a[1:])):
                raise SpecViolation(f"axes[{i}]: need at least 2 increasing nodes starting at 0")
        self.values = np.asarray(values, dtype=float)
        shape = tuple(len(a) for a in self.axes) + (n,)
        if self.values.shape != shape or not np.all(np.isfinite(self.values)):
            raise SpecViolation(f"values: expected finite array of shape {list(shape)}")
        self.values.setflags(write=False)

    def _hats(self, i):
        a = self.axes[i]
        return [PiecewiseLinear(a, tuple(float(j == k) for j in range(len(a)))) for k in range(len(a))]

    def terms(self):
        hats = [self._hats(i) for i in range(self.k)]
        out = []
        for idx in np.ndindex(*self.values.shape[:-1]):
            c = self.values[idx]
            if np.any(c):
                out.append(Term(c, tuple(hats[i][j] for i, j in enumerate(idx))))
        return out

    def to_dict(self):
        return {"name": self.name, "axes": [list(a) for a in self.axes], "values": self.values.tolist()}


def from_dict(d: dict, n: int, k: int, where: str = "f") -> CatalogFunction:
    """Build a catalog function of ``k`` arguments with ``n``-vector values.

    Malformed documents raise :class:`ParseError`; well-formed ones with
    inconsistent sizes raise :class:`SpecViolation`. ``where`` prefixes the
    key path in messages.
    """
    if not isinstance(d, dict) or "name" not in d:
        raise ParseError(f"{where}: expected an object with a 'name' key")
    allowed = {
        "zero": set(),
        "constant": {"value"},
        "product-power": {"coef", "powers"},
        "polynomial": {"terms"},
        "sample-grid": {"axes", "values"},
    }
    name = d["name"]
    if name not in allowed:
        raise ParseError(f"{where}.name: unknown catalog function {name!r}")
    extra = set(d) - allowed[name] - {"name"}
    missing = allowed[name] - set(d)
    if extra:
        raise ParseError(f"{where}: unknown keys {sorted(extra)}")
    if missing:
        raise ParseError(f"{where}: missing keys {sorted(missing)}")
    try:
        if name == "zero":
            return Zero(n, k)
        if name == "constant":
            return Constant(n, k, d["value"])
        if name == "product-power":
            return ProductPower(n, k, d["coef"], d["powers"])
        if name == "polynomial":
            return Polynomial(n, k, d["terms"])
        return SampleGrid(n, k, d["axes"], d["values"])
    except SpecViolation as exc:
        raise SpecViolation(f"{where}.{exc}") from None
    except (TypeError, ValueError, KeyError) as exc:
        raise ParseError(f"{where}: {exc}") from None
