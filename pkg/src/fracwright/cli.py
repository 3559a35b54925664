"""Command-line front end.

Problem files are JSON documents::

    {"version": 1, "m": 2, "n": 1, "alphas": [0.6, 0.8],
     "A": [[[1.0]], [[1.0]]], "B": [[0.0]], "box": [1.0, 1.0], "mu": [0.3, 0.4],
     "f": {"name": "constant", "value": [1.0]},
     "phi": [{"name": "zero"}, {"name": "zero"}],
     "quadrature": {"rel_tol": 1e-8, "max_panels": 4096},
     "grid": {"points": [64, 64]}}

Only ``m``, ``n`` and ``alphas`` are required. Exit codes: 0 on success,
1 for invalid input, 2 for a numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from fracwright.catalog import Zero, from_dict
from fracwright.errors import FracWrightError, NumericalError, ParseError, SpecViolation
from fracwright.fraccalc import GridFunction1D, rl_derivative, rl_integral
from fracwright.fundsol import ProblemSpec, QuadratureConfig, fundamental_G, phi_alpha_delta
from fracwright.matfun import matrix_wright
from fracwright.solver import (
    BoundaryData,
    SourceTerm,
    residual_study,
    solve_on_grid,
    uniform_axes,
    verify_boundary_limit,
    verify_pde_residual,
)
from fracwright.wright import SeriesConfig, WrightParams, wright_phi

__all__ = ["Problem", "load_problem", "main", "parse_problem", "problem_to_dict", "serialize_problem"]

FORMAT_VERSION = 1
KEY_ORDER = ("version", "m", "n", "alphas", "A", "B", "box", "mu", "f", "phi", "quadrature", "grid")
DEFAULT_POINTS = 64


@dataclass(frozen=True)
class Problem:
    """A parsed problem file; iterates as ``(spec, source, boundary, quadrature)``."""

    spec: ProblemSpec
    source: SourceTerm
    boundary: BoundaryData
    quadrature: QuadratureConfig
    points: tuple[int, ...]

    def __iter__(self):
        return iter((self.spec, self.source, self.boundary, self.quadrature))


# ---------------------------------------------------------------------------
# parsing


def _real(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(f"{where}: expected a number, got {type(v).__name__}")
    v = float(v)
    if not math.isfinite(v):
        raise ParseError(f"{where}: expected a finite number")
    return v


def _count(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise ParseError(f"{where}: expected an integer")
    return v


def _list(v, where: str, length: int | None = None) -> list:
    if not isinstance(v, list):
        raise ParseError(f"{where}: expected a list")
    if length is not None and len(v) != length:
        raise ParseError(f"{where}: expected {length} entries, got {len(v)}")
    return v


def _reals(v, where: str, length: int) -> tuple[float, ...]:
    return tuple(_real(x, f"{where}[{i}]") for i, x in enumerate(_list(v, where, length)))


def _matrix(v, where: str, n: int) -> np.ndarray:
    rows = _list(v, where, n)
    return np.array([_reals(r, f"{where}[{i}]", n) for i, r in enumerate(rows)])


def _object(v, where: str, allowed: set[str]) -> dict:
    if not isinstance(v, dict):
        raise ParseError(f"{where}: expected an object")
    extra = set(v) - allowed
    if extra:
        raise ParseError(f"{where}: unknown keys {sorted(extra)}")
    return v


def load_problem(doc) -> Problem:
    """Validate a decoded problem document and fill in defaults."""
    root = "problem"
    doc = _object(doc, root, set(KEY_ORDER))
    for key in ("m", "n", "alphas"):
        if key not in doc:
            raise ParseError(f"{key}: required key is missing")
    version = _count(doc.get("version", FORMAT_VERSION), "version")
    if version != FORMAT_VERSION:
        raise ParseError(f"version: unsupported format version {version}")
    m, n = _count(doc["m"], "m"), _count(doc["n"], "n")
    if not 1 <= m <= 3:
        raise SpecViolation(f"m: must lie in 1..3, got {m}")
    if not 1 <= n <= 4:
        raise SpecViolation(f"n: must lie in 1..4, got {n}")
    alphas = _reals(doc["alphas"], "alphas", m)
    A = (
        [_matrix(a, f"A[{i}]", n) for i, a in enumerate(_list(doc["A"], "A", m))]
        if "A" in doc
        else None
    )
    B = _matrix(doc["B"], "B", n) if "B" in doc else None
    box = _reals(doc["box"], "box", m) if "box" in doc else None
    mu = _reals(doc["mu"], "mu", m) if "mu" in doc else None
    spec = ProblemSpec.build(alphas, A=A, B=B, box=box, mu=mu, n=n)

    f = from_dict(doc["f"], n, m, "f") if "f" in doc else Zero(n, m)
    if "phi" in doc:
        phis = tuple(from_dict(p, n, m - 1, f"phi[{j}]") for j, p in enumerate(_list(doc["phi"], "phi", m)))
    else:
        phis = tuple(Zero(n, m - 1) for _ in range(m))

    q = _object(doc.get("quadrature", {}), "quadrature", {"rel_tol", "max_panels"})
    defaults = QuadratureConfig()
    rel_tol = _real(q.get("rel_tol", defaults.rel_tol), "quadrature.rel_tol")
    max_panels = _count(q.get("max_panels", defaults.max_panels), "quadrature.max_panels")
    if not 0 < rel_tol < 1:
        raise SpecViolation("quadrature.rel_tol: must lie in (0, 1)")
    if max_panels < 1:
        raise SpecViolation("quadrature.max_panels: must be positive")
    qcfg = QuadratureConfig(rel_tol=rel_tol, max_panels=max_panels)

    g = _object(doc.get("grid", {}), "grid", {"points"})
    raw = g.get("points", [DEFAULT_POINTS] * m)
    points = tuple(_count(p, f"grid.points[{i}]") for i, p in enumerate(_list(raw, "grid.points", m)))
    if any(p < 1 for p in points):
        raise SpecViolation("grid.points: need at least one node per axis")
    return Problem(spec, SourceTerm(f), BoundaryData(phis), qcfg, points)


def parse_problem(path) -> Problem:
    """Read and validate a JSON problem file."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc})") from None
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    return load_problem(doc)


# ---------------------------------------------------------------------------
# serialisation


def problem_to_dict(problem: Problem) -> dict:
    spec = problem.spec
    return {
        "version": FORMAT_VERSION,
        "m": spec.m,
        "n": spec.n,
        "alphas": list(spec.alphas),
        "A": [a.tolist() for a in spec.A],
        "B": spec.B.tolist(),
        "box": list(spec.box),
        "mu": list(spec.mu),
        "f": problem.source.f.to_dict(),
        "phi": [p.to_dict() for p in problem.boundary.phis],
        "quadrature": {"rel_tol": problem.quadrature.rel_tol, "max_panels": problem.quadrature.max_panels},
        "grid": {"points": list(problem.points)},
    }


def _encode(v) -> str:
    if isinstance(v, dict):
        lead = KEY_ORDER if "version" in v else ("name",)
        keys = [k for k in lead if k in v] + sorted(k for k in v if k not in lead)
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v[k])}" for k in keys) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_encode(x) for x in v) + "]"
    if isinstance(v, bool) or v is None:
        return json.dumps(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return _real17(float(v))
    return json.dumps(v)


def _real17(v: float) -> str:
    text = f"{v:.17g}"
    return text if any(c in text for c in ".en") else text + ".0"


def serialize_problem(problem: Problem) -> str:
    """Canonical JSON: fixed key order, reals with 17 significant digits."""
    return _encode(problem_to_dict(problem)) + "\n"


# ---------------------------------------------------------------------------
# commands


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_real17(float(v)) for v in r])
    return buf.getvalue()


def _series_cfg(args) -> SeriesConfig:
    return SeriesConfig(rel_tol=args.series_tol, max_terms=args.max_terms, domain_radius=args.domain_radius)


def _quad_cfg(args, base: QuadratureConfig) -> QuadratureConfig:
    return QuadratureConfig(
        rel_tol=base.rel_tol if args.rel_tol is None else args.rel_tol,
        max_panels=base.max_panels if args.max_panels is None else args.max_panels,
    )


def _cmd_eval_wright(args) -> int:
    vals = np.atleast_1d(wright_phi(WrightParams(args.rho, args.mu), np.array(args.z), _series_cfg(args)))
    _write("".join(_real17(float(v)) + "\n" for v in vals), args.out)
    return 0


def _cmd_eval_matrix_wright(args) -> int:
    try:
        M = np.array(json.loads(args.matrix), dtype=float)
    except (json.JSONDecodeError, ValueError, TypeError) as exc:
        raise ParseError(f"--matrix: {exc}") from None
    try:
        val = matrix_wright(WrightParams(args.rho, args.mu), M, args.z, _series_cfg(args))
    except ValueError as exc:
        raise SpecViolation(f"--matrix: {exc}") from None
    _write(_csv([f"c{j + 1}" for j in range(val.shape[1])], val), args.out)
    return 0


def _read_samples(path: str) -> tuple[np.ndarray, np.ndarray]:
    try:
        with open(path, encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from None
    if len(rows) < 4 or len(rows[0]) < 2:
        raise ParseError(f"{path}: need a header and at least 3 rows of y,g")
    try:
        data = np.array([[float(c) for c in r[:2]] for r in rows[1:] if r])
    except ValueError as exc:
        raise ParseError(f"{path}: {exc}") from None
    return data[:, 0], data[:, 1]


def _cmd_frac_deriv(args) -> int:
    y, g = _read_samples(args.input)
    h = y[1] - y[0]
    if abs(y[0]) > 1e-12 * max(1.0, abs(h)) or not h > 0 or np.max(np.abs(np.diff(y) - h)) > 1e-9 * h:
        raise ParseError(f"{args.input}: y must be a uniform grid starting at 0")
    singular = args.singular_exponent is not None
    valid = 1 if singular or not math.isfinite(g[0]) else 0
    if valid:
        g = g.copy()
        g[0] = np.nan
    grid = GridFunction1D(h, g, valid_from=valid)
    if args.nu < 0:
        res = rl_integral(grid, args.nu, args.singular_exponent, args.smooth_power)
    elif 0 < args.nu < 1:
        res = rl_derivative(grid, args.nu, args.singular_exponent, args.smooth_power)
    else:
        raise SpecViolation("--nu: need nu < 0 (integral) or 0 < nu < 1 (derivative)")
    rows = [(yy, vv) for yy, vv in zip(y[res.valid_from :], res.values[res.valid_from :])]
    _write(_csv(["y", "value"], rows), args.out)
    return 0


def _cmd_fundsol(args) -> int:
    problem = parse_problem(args.problem)
    qcfg = _quad_cfg(args, problem.quadrature)
    x = np.array(args.x, dtype=float)
    if args.delta is None:
        val = fundamental_G(x, problem.spec, qcfg)
    else:
        val = phi_alpha_delta(x, args.delta, problem.spec, qcfg)
    _write(_csv([f"c{j + 1}" for j in range(val.shape[1])], val), args.out)
    return 0


def _points(args, problem: Problem) -> tuple[int, ...]:
    if args.points is None:
        return problem.points
    pts = tuple(args.points)
    if len(pts) == 1:
        pts = pts * problem.spec.m
    if len(pts) != problem.spec.m or any(p < 1 for p in pts):
        raise SpecViolation(f"--points: need {problem.spec.m} positive counts")
    return pts


def _cmd_solve(args) -> int:
    problem = parse_problem(args.problem)
    spec = problem.spec
    qcfg = _quad_cfg(args, problem.quadrature)
    sol = solve_on_grid(uniform_axes(spec, _points(args, problem)), spec, problem.source, problem.boundary, qcfg, args.threads)
    mesh = np.stack(np.meshgrid(*sol.axes, indexing="ij"), axis=-1).reshape(-1, spec.m)
    u = sol.u.reshape(-1, spec.n)
    header = [f"x{i + 1}" for i in range(spec.m)] + [f"u{k + 1}" for k in range(spec.n)]
    _write(_csv(header, np.hstack([mesh, u])), args.out)
    return 0


def verify_report(problem: Problem, points: tuple[int, ...], qcfg: QuadratureConfig, workers=None) -> dict:
    """Residual on ``points``, residual study on ``points / 2`` and ``points``, boundary limits."""
    spec, src, bd = problem.spec, problem.source, problem.boundary
    sol = solve_on_grid(uniform_axes(spec, points), spec, src, bd, qcfg, workers)
    direct = verify_pde_residual(sol, spec, src)
    coarse = tuple(max(8, p // 2) for p in points)
    study = residual_study(spec, src, bd, (coarse, points), qcfg) if coarse != points else None
    limits = [verify_boundary_limit(spec, src, bd, s, qcfg) for s in range(spec.m)]
    return {
        "residual": direct.residual,
        "steps": list(direct.steps[0]),
        "study_residuals": [] if study is None else study.residuals,
        "orders": [] if study is None else study.orders,
        "boundary_errors": [b.error for b in limits],
        "boundary_rates": [b.rate for b in limits],
    }


def _text_report(rep: dict) -> str:
    lines = [f"residual = {_real17(rep['residual'])}", "steps = " + " ".join(_real17(h) for h in rep["steps"])]
    if rep["orders"]:
        lines.append("study_residuals = " + " ".join(_real17(r) for r in rep["study_residuals"]))
        lines.append("orders = " + " ".join(_real17(o) for o in rep["orders"]))
    for s, (e, r) in enumerate(zip(rep["boundary_errors"], rep["boundary_rates"])):
        lines.append(f"boundary_error[{s + 1}] = {_real17(e)}")
        lines.append(f"boundary_rate[{s + 1}] = {_real17(r)}")
    return "\n".join(lines) + "\n"


def _cmd_verify(args) -> int:
    problem = parse_problem(args.problem)
    qcfg = _quad_cfg(args, problem.quadrature)
    rep = verify_report(problem, _points(args, problem), qcfg, args.threads)
    if args.report == "json":
        text = json.dumps(rep, indent=2) + "\n"
    else:
        text = _text_report(rep)
    _write(text, args.out)
    return 0


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); exit 2 is kept for numerical failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fracwright", description="Wright functions and fractional boundary-value problems.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    series = SeriesConfig()
    quad = QuadratureConfig()

    def series_flags(p):
        p.add_argument("--series-tol", type=float, default=series.rel_tol, help="series stopping tolerance")
        p.add_argument("--max-terms", type=int, default=series.max_terms)
        p.add_argument("--domain-radius", type=float, default=series.domain_radius)

    def quad_flags(p):
        p.add_argument("--rel-tol", type=float, default=None, help=f"quadrature tolerance (default {quad.rel_tol:g} or the file)")
        p.add_argument("--max-panels", type=int, default=None, help=f"panel budget (default {quad.max_panels} or the file)")

    p = sub.add_parser("eval-wright", help="scalar Wright function phi(rho, mu; z)")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--z", type=float, nargs="+", required=True)
    p.add_argument("--out")
    series_flags(p)
    p.set_defaults(run=_cmd_eval_wright)

    p = sub.add_parser("eval-matrix-wright", help="matrix Wright function phi(rho, mu; z M)")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--z", type=float, default=1.0)
    p.add_argument("--matrix", required=True, help="JSON list of rows")
    p.add_argument("--out")
    series_flags(p)
    p.set_defaults(run=_cmd_eval_matrix_wright)

    p = sub.add_parser("frac-deriv", help="fractional integral (nu < 0) or derivative (0 < nu < 1) of CSV samples y,g")
    p.add_argument("--input", required=True)
    p.add_argument("--nu", type=float, required=True)
    p.add_argument("--singular-exponent", type=float, default=None)
    p.add_argument("--smooth-power", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(run=_cmd_frac_deriv)

    p = sub.add_parser("fundsol", help="fundamental solution G(x), or Phi_alpha^delta(x) with --delta")
    p.add_argument("--problem", required=True)
    p.add_argument("--x", type=float, nargs="+", required=True)
    p.add_argument("--delta", type=float, nargs="+", default=None)
    p.add_argument("--out")
    quad_flags(p)
    p.set_defaults(run=_cmd_fundsol)

    for name, fn, text in (
        ("solve", _cmd_solve, "solution on a uniform grid as CSV"),
        ("verify", _cmd_verify, "residual and boundary-limit report"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--problem", required=True)
        p.add_argument("--points", type=int, nargs="+", default=None, help="nodes per axis (default: the file)")
        p.add_argument("--threads", type=int, default=None, help="workers (default FRACWRIGHT_THREADS or 1)")
        p.add_argument("--out")
        if name == "verify":
            p.add_argument("--report", choices=("json", "text"), default="text")
        quad_flags(p)
        p.set_defaults(run=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except NumericalError as exc:
        print(f"fracwright {args.command}: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (SpecViolation, ParseError) as exc:
        print(f"fracwright {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except FracWrightError as exc:
        print(f"fracwright {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
