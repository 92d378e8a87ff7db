"""Command line interface: ``gacurves <command> [options]``.

Commands
--------
invariants   invariant records of a plane or space curve on a grid
reconstruct  integrate a curve from curvature data and check the round trip
extremal     residuals of the extremality equations
classify     catalog lookup for constant invariants (or ``--catalog`` self-test)
abel         graph with prescribed curvature through an Abel equation

Exit codes: 0 success, 1 usage error, 2 domain error (a JSON error report
is printed on stdout), 3 integration failure.  Relative output paths are
placed under ``$GACURVES_OUTPUT_DIR`` when that variable is set.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .abel import AbelProblem, abel_solve, closed_form_s
from .classify import (
    classify_plane_constant,
    classify_projective_constant,
    classify_space_constant,
    verify_catalog,
)
from .curves import (
    BUILTINS,
    CurveSpec,
    builtin,
    from_expressions,
    read_samples_csv,
    write_samples_csv,
)
from .errors import DegenerateCurveError, GACurveError, IntegrationError, UsageError
from .expr import parse_expression
from .extremal import (
    equiaffine_space_extremal_check,
    ga_plane_general_residual,
    ga_plane_residual,
    ga_space_residuals,
    linear_complex_extremal_check,
    projective_extremal_residuals,
)
from .io import dumps, emit_svg, error_report, records_csv, table_csv, write_text
from .plane import TOL_SINGULAR, PlaneInvariantRecord, scan_curve
from .profiles import as_profile, profile_value
from .reconstruct import plane_profile, reconstruct, space_profile, trace_identity_error
from .space import TOL_COMPLEX, SpaceInvariantRecord, scan_space

__all__ = ["main", "build_parser", "normalize_argv", "parse_grid", "EXIT_OK", "EXIT_USAGE",
           "EXIT_DOMAIN", "EXIT_INTEGRATION"]

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_INTEGRATION = 0, 1, 2, 3

#: options whose value may start with a minus sign
VALUE_OPTIONS = {
    "--k", "--M", "--k1", "--k2", "--f", "--eps", "--a", "--b", "--c", "--grid", "--x0", "--s0",
    "--x1", "--x", "--y", "--z", "--expr", "--tau", "--sigma", "--param", "--view", "--interval",
    "--branch", "--const",
}


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def normalize_argv(argv: Sequence[str]) -> list[str]:
    """Join ``--k -4`` into ``--k=-4`` so negative values and expressions
    such as ``-sqrt(2)`` are not mistaken for options."""
    out: list[str] = []
    i = 0
    argv = list(argv)
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_OPTIONS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and argv[i + 1] not in VALUE_OPTIONS and not argv[i + 1].startswith("--"):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def _number(src: str) -> float:
    """A number or a constant expression such as ``2*pi`` or ``-sqrt(2)``."""
    try:
        return float(src)
    except ValueError:
        pass
    try:
        v = parse_expression(src).evaluate({})
        return float(v)
    except GACurveError as exc:
        raise UsageError(f"not a number: {src!r} ({exc})") from exc
    except (TypeError, ValueError) as exc:
        raise UsageError(f"not a constant expression: {src!r}") from exc


def parse_grid(src: str) -> tuple[float, float, int]:
    """``t_min:t_max:n`` with constant expressions for the bounds."""
    parts = src.split(":")
    if len(parts) != 3:
        raise UsageError(f"grid must be t_min:t_max:n, got {src!r}")
    lo, hi = _number(parts[0]), _number(parts[1])
    try:
        n = int(parts[2])
    except ValueError:
        raise UsageError(f"grid point count must be an integer, got {parts[2]!r}") from None
    if not lo < hi:
        raise UsageError("grid needs t_min < t_max")
    if n < 2:
        raise UsageError("grid needs n >= 2")
    return lo, hi, n


def _eps(v: str) -> int:
    e = int(_number(v))
    if e not in (1, -1):
        raise UsageError("eps must be +1 or -1")
    return e


def _params(items: Sequence[str] | None) -> dict[str, float]:
    out = {}
    for item in items or []:
        if "=" not in item:
            raise UsageError(f"--param expects name=value, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = _number(v)
    return out


# ----------------------------------------------------------------------
# curve sources
def _add_curve_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("curve source")
    g.add_argument("--builtin", metavar="NAME", help=f"catalog curve ({', '.join(sorted(BUILTINS))})")
    g.add_argument("--param", action="append", metavar="NAME=VALUE", help="parameter (repeatable)")
    g.add_argument("--expr", help='vector expression such as "(cos(t), sin(t))"')
    g.add_argument("--x", help="first coordinate expression")
    g.add_argument("--y", help="second coordinate expression")
    g.add_argument("--z", help="third coordinate expression")
    g.add_argument("--samples", metavar="CSV", help="samples file with header t,x1,x2[,x3]")
    g.add_argument("--dim", type=int, choices=(2, 3), help="expected dimension")


def _curve(args, grid: tuple[float, float, int] | None) -> CurveSpec:
    sources = [args.builtin is not None, args.expr is not None, args.x is not None, args.samples is not None]
    if sum(sources) != 1:
        raise UsageError("give exactly one curve source: --builtin, --expr, --x/--y[/--z] or --samples")
    params = _params(args.param)
    if args.builtin:
        spec = builtin(args.builtin, **params)
        if grid is not None:
            spec = spec.with_interval(grid[0], grid[1])
    elif args.samples:
        spec = read_samples_csv(args.samples)
    else:
        interval = (grid[0], grid[1]) if grid else (0.0, 1.0)
        if args.expr is not None:
            spec = from_expressions(args.expr, interval, params)
        else:
            coords = [c for c in (args.x, args.y, args.z) if c is not None]
            if args.y is None:
                raise UsageError("--x needs --y (and optionally --z)")
            spec = from_expressions(coords, interval, params)
    if args.dim is not None and args.dim != spec.dimension:
        raise UsageError(f"--dim {args.dim} does not match the curve dimension {spec.dimension}")
    return spec


def _emit(text: str, path: str | None) -> None:
    if write_text(text, path) is None:
        sys.stdout.write(text)


# ----------------------------------------------------------------------
# invariants
def cmd_invariants(args) -> int:
    grid = parse_grid(args.grid) if args.grid else None
    spec = _curve(args, grid)
    lo, hi = spec.interval
    n = grid[2] if grid else 201
    if spec.source == "samples" and grid is None:
        ts = spec.samples_t[4:-4]
    else:
        ts = np.linspace(lo, hi, n) if grid is None else np.linspace(grid[0], grid[1], grid[2])
    tolerances = {"tol_singular": args.tol_singular}
    if spec.dimension == 2:
        scan = scan_curve(spec, ts, tol_singular=args.tol_singular)
        records, fields = scan.records, PlaneInvariantRecord.CSV_FIELDS
        report = {
            "kind": "plane",
            "curve": spec.describe(),
            "tolerances": {**tolerances, **scan.tolerances},
            "records": [r.as_dict() for r in records],
            "events": [{"kind": e.kind, "t": e.t, "bracket": list(e.bracket), "value": e.value}
                       for e in scan.events],
            "total_curvature": scan.total_curvature,
            "total_curvature_valid": scan.total_curvature_valid,
            "closed": scan.closed,
        }
    else:
        tolerances["tol_complex"] = args.tol_complex
        scan = scan_space(spec, ts, tol_singular=args.tol_singular, tol_complex=args.tol_complex)
        records, fields = scan.records, SpaceInvariantRecord.CSV_FIELDS
        report = {
            "kind": "space",
            "curve": spec.describe(),
            "tolerances": {**tolerances, **scan.tolerances},
            "records": [r.as_dict() for r in records],
            "events": [{"kind": "inflection", "t": t} for t in scan.inflections],
            "theta3_sup": scan.theta3_sup,
            "linear_complex": scan.linear_complex,
        }
    if records and all("degenerate" in r.flags for r in records):
        raise DegenerateCurveError("the curve is degenerate at every sample point")
    if args.format == "json":
        text = dumps(report)
    elif args.format == "csv":
        text = records_csv(records, fields)
    else:
        text = _invariants_svg(spec, ts, report, args)
    _emit(text, args.output)
    return EXIT_OK


def _invariants_svg(spec: CurveSpec, ts, report, args) -> str:
    fine = np.linspace(ts[0], ts[-1], max(len(ts), 400))
    pts = spec.points(fine)
    view = tuple(_number(v) for v in args.view.split(",")) if args.view else (30.0, 20.0)
    events = []
    for e in report["events"]:
        p = spec.points([e["t"]])[0]
        if spec.dimension == 3:
            from .io import project_3d

            p = project_3d(p[None, :], *view)[0]
        events.append((p[0], p[1], e["kind"]))
    dotted = []
    if spec.dimension == 2:
        eps = np.array([r["eps"] if r["eps"] is not None else 0 for r in report["records"]])
        if np.any(eps == 1) and np.any(eps == -1):
            # dot the stretches with eps = +1, mapped onto the fine grid
            pos = np.interp(fine, ts, (eps == 1).astype(float)) > 0.5
            idx = np.flatnonzero(pos)
            if idx.size:
                runs = np.split(idx, np.flatnonzero(np.diff(idx) > 1) + 1)
                dotted = [(int(r[0]), int(r[-1])) for r in runs]
    return emit_svg(pts, events, dotted=dotted, view=view, title=spec.describe())


# ----------------------------------------------------------------------
# reconstruct
def cmd_reconstruct(args) -> int:
    lo, hi, n = parse_grid(args.grid)
    eps = _eps(args.eps)
    if args.k is None:
        raise UsageError("reconstruct needs --k")
    k = as_profile(args.k)
    if args.space:
        if args.M is None:
            raise UsageError("--space needs --M")
        profile = space_profile(k, as_profile(args.M), eps, (lo, hi))
    else:
        if args.M is not None:
            raise UsageError("--M is only meaningful with --space")
        profile = plane_profile(k, eps, (lo, hi))
    result = reconstruct(profile, n, rtol=args.rtol, atol=args.atol)
    report = {
        "kind": profile.kind,
        "profile": profile.describe(),
        "tolerances": {"rtol": args.rtol, "atol": args.atol},
        "stats": result.stats,
        "roundtrip": result.roundtrip.as_dict(eps) if result.roundtrip else None,
        "trace_identity_error": trace_identity_error(result),
    }
    grid = (lo, hi, min(n, 401))
    if profile.kind == "plane":
        rep = ga_plane_residual(k, eps, grid)
        report["extremal"] = rep.as_dict()
    else:
        M = as_profile(args.M)
        th = []
        for t in np.linspace(lo, hi, grid[2]):
            try:
                th.append((profile_value(M, t) - eps * profile_value(k, t)) / 4.0)
            except GACurveError:
                continue
        sup = float(np.max(np.abs(th))) if th else None
        report["theta3_sup"] = sup
        report["linear_complex"] = bool(sup is not None and sup <= TOL_COMPLEX)
        r1, r2 = ga_space_residuals(k, M, eps, grid)
        report["extremal"] = [r1.as_dict(), r2.as_dict()]
    t, x = result.t, result.x
    if args.format == "csv":
        curve_text = write_samples_csv(t, x)
    elif args.format == "svg":
        curve_text = emit_svg(x, title=profile.describe())
    else:
        report["samples"] = {"t": t, "x": x}
        curve_text = None
    if curve_text is None:
        _emit(dumps(report), args.output)
    else:
        if args.output:
            write_text(curve_text, args.output)
            sys.stdout.write(dumps(report))
        else:
            sys.stdout.write(curve_text)
            sys.stderr.write(dumps(report))
    if args.report:
        write_text(dumps(report), args.report)
    return EXIT_OK


# ----------------------------------------------------------------------
# extremal
EXTREMAL_EQUATIONS = ("ga-plane", "ga-plane-general", "ga-space", "linear-complex", "equiaffine-space",
                      "proj-plane", "proj-space")


def cmd_extremal(args) -> int:
    eq = args.equation
    grid = parse_grid(args.grid)
    tau = args.tau

    def need(name):
        v = getattr(args, name)
        if v is None:
            raise UsageError(f"--equation {eq} needs --{name}")
        return v

    if eq == "ga-plane":
        reports = [ga_plane_residual(need("k"), _eps(need("eps")), grid, tau=tau)]
    elif eq == "ga-plane-general":
        reports = [ga_plane_general_residual(need("k"), _eps(need("eps")), need("f"), grid, tau=tau)]
    elif eq == "ga-space":
        reports = list(ga_space_residuals(need("k"), need("M"), _eps(need("eps")), grid, tau=tau))
    elif eq == "linear-complex":
        reports = [linear_complex_extremal_check(need("k"), _eps(need("eps")), grid, tau=tau)]
    elif eq == "proj-plane":
        reports = [projective_extremal_residuals("plane", need("k"), grid, tau=tau)]
    elif eq == "proj-space":
        reports = [projective_extremal_residuals("space", (need("k1"), need("k2")), grid, tau=tau)]
    else:
        spec = _curve(args, grid)
        reports = [equiaffine_space_extremal_check(spec, np.linspace(*spec.interval, grid[2]),
                                                   **({"tau": tau} if tau is not None else {}))]
    dicts = [r.as_dict() for r in reports]
    verdict = all(bool(r.verdict) for r in reports)
    if args.format == "csv":
        cols, rows = _residual_table(reports)
        text = table_csv(cols, rows)
    else:
        text = dumps({"equation": eq, "verdict": verdict, "reports": dicts})
    _emit(text, args.output)
    return EXIT_OK


def _residual_table(reports):
    series = []
    for r in reports:
        if hasattr(r, "residuals") and hasattr(r, "grid"):
            series.append((r.equation, r.grid, r.residuals))
        for name in ("plane", "space_1", "space_2", "residual_1", "residual_2"):
            sub = getattr(r, name, None)
            if sub is not None and hasattr(sub, "residuals"):
                series.append((sub.equation, sub.grid, sub.residuals))
        if hasattr(r, "ell") and hasattr(r, "m"):
            series.append(("ell", r.grid, r.ell))
            series.append(("m", r.grid, r.m))
    if not series:
        return ["t"], []
    t = series[0][1]
    cols = ["t"] + [s[0].lower() for s in series]
    rows = [[t[i]] + [s[2][i] for s in series] for i in range(len(t))]
    return cols, rows


# ----------------------------------------------------------------------
# classify
def cmd_classify(args) -> int:
    if args.catalog:
        rep = verify_catalog()
        text = dumps(rep.as_dict())
        _emit(text, args.output)
        return EXIT_OK if rep.passed else EXIT_DOMAIN
    modes = [args.plane, args.space, args.projective]
    if sum(modes) != 1:
        raise UsageError("choose one of --plane, --space, --projective (or --catalog)")
    if args.projective:
        vals = [args.a, args.b, args.c]
        if any(v is None for v in vals):
            raise UsageError("--projective needs --a, --b and --c")
        res = classify_projective_constant(*(_number(v) for v in vals))
    else:
        if args.k is None or args.eps is None:
            raise UsageError("classification needs --k and --eps")
        k, eps = _number(args.k), _eps(args.eps)
        if args.plane:
            res = classify_plane_constant(k, eps)
        else:
            if args.M is None:
                raise UsageError("--space needs --M")
            res = classify_space_constant(k, _number(args.M), eps)
    out = res.as_dict()
    out["summary"] = f"{res.family} family: {out['representative_expression']}"
    if args.format == "text":
        text = out["summary"] + "\n"
    else:
        text = dumps(out)
    _emit(text, args.output)
    return EXIT_OK


# ----------------------------------------------------------------------
# abel
def cmd_abel(args) -> int:
    eps = _eps(args.eps)
    if args.k is None:
        raise UsageError("abel needs --k (a function of x)")
    x0, x1 = _number(args.x0), _number(args.x1)
    if args.s0 is not None:
        s0 = _number(args.s0)
    else:
        k = _number(args.k)
        const = _number(args.const) if args.const is not None else None
        s0 = float(closed_form_s(k, eps, x0, reduction=args.reduction, branch=int(_number(args.branch)),
                                 a=const))
    sigma = int(_number(args.sigma)) if args.sigma is not None else None
    problem = AbelProblem(k=args.k, eps=eps, reduction=args.reduction, x0=x0, s0=s0, x1=x1, n=args.n,
                          sigma=sigma)
    result = abel_solve(problem)
    report = result.as_dict()
    report["k"] = str(problem.k)
    report["s0"] = s0
    if isinstance(problem.k, float) and args.s0 is None:
        report["closed_form_error"] = result.closed_form_error(
            branch=int(_number(args.branch)),
            **({"a": _number(args.const)} if args.const is not None else {}))
    if args.format == "csv":
        order = np.argsort(result.t)
        _emit(table_csv(["t", "f"], zip(result.t[order], result.f[order])), args.output)
        sys.stderr.write(dumps(report))
    else:
        report["samples"] = {"x": result.x, "s": result.s, "t": result.t, "f": result.f}
        _emit(dumps(report), args.output)
    return EXIT_OK


# ----------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="gacurves", description="Affine and projective invariants of plane and space curves.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    q = sub.add_parser("invariants", help="invariant records on a grid")
    _add_curve_options(q)
    q.add_argument("--grid", help="t_min:t_max:n (default: curve interval, 201 points)")
    q.add_argument("--tol-singular", type=float, default=TOL_SINGULAR)
    q.add_argument("--tol-complex", type=float, default=TOL_COMPLEX)
    q.add_argument("--format", choices=("csv", "json", "svg"), default="json")
    q.add_argument("--view", help="azimuth,elevation in degrees for 3D SVG output")
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_invariants)

    q = sub.add_parser("reconstruct", help="curve from curvature data")
    kind = q.add_mutually_exclusive_group()
    kind.add_argument("--plane", action="store_true", default=True)
    kind.add_argument("--space", action="store_true")
    q.add_argument("--k", help="curvature k(t)")
    q.add_argument("--M", help="second curvature M(t) (space)")
    q.add_argument("--eps", default="1")
    q.add_argument("--grid", default="0:1:201")
    q.add_argument("--rtol", type=float, default=1e-10)
    q.add_argument("--atol", type=float, default=1e-10)
    q.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    q.add_argument("--output", "-o")
    q.add_argument("--report", help="also write the JSON report here")
    q.set_defaults(func=cmd_reconstruct)

    q = sub.add_parser("extremal", help="extremality residuals")
    q.add_argument("--equation", choices=EXTREMAL_EQUATIONS, required=True)
    q.add_argument("--k")
    q.add_argument("--M")
    q.add_argument("--k1")
    q.add_argument("--k2")
    q.add_argument("--f", help="integrand f(k) for ga-plane-general")
    q.add_argument("--eps")
    q.add_argument("--grid", default="0:1:101")
    q.add_argument("--tau", type=float)
    _add_curve_options(q)
    q.add_argument("--format", choices=("csv", "json"), default="json")
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_extremal)

    q = sub.add_parser("classify", help="catalog lookup for constant invariants")
    q.add_argument("--plane", action="store_true")
    q.add_argument("--space", action="store_true")
    q.add_argument("--projective", action="store_true")
    q.add_argument("--catalog", action="store_true", help="verify the whole catalog")
    q.add_argument("--k")
    q.add_argument("--M")
    q.add_argument("--eps")
    q.add_argument("--a")
    q.add_argument("--b")
    q.add_argument("--c")
    q.add_argument("--format", choices=("json", "text"), default="json")
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_classify)

    q = sub.add_parser("abel", help="graph with prescribed curvature via an Abel equation")
    q.add_argument("--k", help="curvature as a function of x = mu")
    q.add_argument("--eps", default="1")
    q.add_argument("--reduction", choices=("first", "second"), default="first")
    q.add_argument("--x0", default="1")
    q.add_argument("--x1", default="2")
    q.add_argument("--s0", help="initial value; default: closed form for constant k")
    q.add_argument("--branch", default="1", help="sign in the closed-form constant")
    q.add_argument("--const", help="free constant a of the k = 0 closed form")
    q.add_argument("--sigma", help="sign of w (default: branch with curvature +k)")
    q.add_argument("--n", type=int, default=101)
    q.add_argument("--format", choices=("csv", "json"), default="json")
    q.add_argument("--output", "-o")
    q.set_defaults(func=cmd_abel)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    argv = normalize_argv(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = None
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            raise UsageError(parser.format_usage())
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        if "usage:" not in str(exc):
            sys.stderr.write(parser.format_usage())
        return EXIT_USAGE
    except IntegrationError as exc:
        sys.stdout.write(dumps(error_report(exc, getattr(args, "command", None))))
        sys.stderr.write(f"integration failed: {exc}\n")
        return EXIT_INTEGRATION
    except GACurveError as exc:
        code = EXIT_USAGE if exc.kind in ("syntax", "unknown-name", "unknown-function") else EXIT_DOMAIN
        if code == EXIT_DOMAIN:
            sys.stdout.write(dumps(error_report(exc, getattr(args, "command", None))))
        sys.stderr.write(f"error: {exc}\n")
        return code
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
