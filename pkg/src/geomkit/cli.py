"""Command-line front end.

Every subcommand writes canonical JSON (sorted keys, no whitespace, floats in
shortest round-trip form) to stdout or to ``--out``; ``geodesic`` can write
CSV instead.  Exit status is 0 on success, 1 when a reported residual
exceeds its tolerance and 2 on invalid input or numerical failure.

Examples
--------
::

    geomkit verify --suite all
    geomkit geodesic --model poincare_half_plane --p 0,1 --xi 1,0 --T 5 --out trace.csv
    geomkit topology --curve eight.json
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import traceback

import numpy as np

from . import lorentz, quaternion, surfaces, topology, verify
from .connection import geodesic_bvp, geodesic_ivp
from .curvature import riemann_at
from .errors import DegenerateError, GeometryError
from .gauss_bonnet import build_triangle, triangle_report
from .models import expected_sectional, make_model, parse_model

__all__ = ["main", "build_parser", "canonical_json", "resolve_seed"]

EXIT_OK, EXIT_RESIDUAL, EXIT_ERROR = 0, 1, 2


# -- output ----------------------------------------------------------------------------


def _plain(obj):
    """Recursively convert numpy values to JSON-ready Python values; non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


def canonical_json(obj) -> str:
    """Byte-stable JSON: sorted keys, compact separators, round-trip floats."""
    return json.dumps(_plain(obj), sort_keys=True, separators=(",", ":"), allow_nan=False)


def _emit(text: str, out):
    if out is None:
        sys.stdout.write(text + "\n")
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text + "\n")


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) for x in row])
    return buf.getvalue().rstrip("\n")


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(s) for s in text.split(",")])
    except ValueError as exc:
        raise GeometryError(f"malformed vector {text!r} (expected comma-separated numbers)") from exc


def resolve_seed(seed) -> int:
    """``GEOM_SEED`` from the environment wins over the configured seed."""
    env = os.environ.get("GEOM_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError as exc:
            raise GeometryError(f"GEOM_SEED must be an integer, got {env!r}") from exc
    return int(seed)


# -- subcommands --------------------------------------------------------------------------


def _coordinate_header(d):
    names = ["x", "y", "z"] if d <= 3 else [f"x_{i + 1}" for i in range(d)]
    names = names[:d]
    return ["t"] + names + [f"v{n}" if d <= 3 else f"v_{i + 1}" for i, n in enumerate(names)] + ["s"]


def cmd_geodesic(args):
    M = make_model(args.model)
    p = _vector(args.p)
    if args.q is not None:
        sol, dist = geodesic_bvp(M, p, _vector(args.q))
        summary = {"distance": dist}
    else:
        if args.xi is None:
            raise GeometryError("geodesic needs --xi (initial velocity) or --q (endpoint)")
        sol = geodesic_ivp(M, p, _vector(args.xi), args.T, step=args.step)
        summary = {}
    diag = sol.diagnostics
    fmt = args.format or ("csv" if args.out and args.out.endswith(".csv") else "json")
    if fmt == "csv":
        _emit(_csv_text(_coordinate_header(M.dim), sol.table()), args.out)
    else:
        summary.update({
            "t": sol.t, "x": sol.x, "v": sol.v, "s": sol.s,
            "arc_length": sol.arc_length,
            "diagnostics": {"method": diag.method, "flagged": diag.flagged, "notes": list(diag.notes)},
        })
        _emit(canonical_json(summary), args.out)
    return EXIT_OK


def cmd_curvature(args):
    desc = parse_model(args.model)
    M = make_model(desc)
    rep = riemann_at(M, _vector(args.x))
    out = rep.to_dict()
    status = EXIT_OK
    if M.dim == 2:
        out["gaussian_curvature"] = rep.gaussian_curvature()
    expected = expected_sectional(desc)
    if expected is not None and M.dim == 2:
        gap = abs(out["gaussian_curvature"] - expected)
        out["expected_gaussian_curvature"] = expected
        out["residual"] = gap
        status = EXIT_OK if gap <= args.tol else EXIT_RESIDUAL
    _emit(canonical_json(out), args.out)
    return status


def cmd_triangle(args):
    M = make_model(args.model)
    T = build_triangle(M, _vector(args.p), _vector(args.q), _vector(args.r))
    rep = triangle_report(M, T)
    out = rep.to_dict()
    out["angles"] = list(T.angles)
    out["lengths"] = list(T.lengths)
    _emit(canonical_json(out), args.out)
    return EXIT_OK if max(rep.residuals.values()) <= args.tol else EXIT_RESIDUAL


def _parse_surface(text):
    name, _, rest = text.partition(":")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise GeometryError(f"malformed surface parameter {item!r} (expected key=value)")
        try:
            params[key.strip()] = float(val)
        except ValueError as exc:
            raise GeometryError(f"surface parameter {key!r} must be numeric") from exc
    return surfaces.make_surface(name.strip(), **params)


def cmd_surface(args):
    S = _parse_surface(args.surface)
    u, v = args.u, args.v
    F = surfaces.fundamental_forms(S, u, v)
    c = surfaces.curvatures(S, u, v)
    r1, r2 = surfaces.codazzi_residuals(S, u, v)
    gap = abs(float(c.K_intrinsic) - float(c.K_extrinsic))
    codazzi = max(abs(float(r1)), abs(float(r2)))
    out = {
        "surface": S.name, "u": u, "v": v,
        "first_form": {"E": F.E, "F": F.F, "G": F.G},
        "second_form": {"L": F.L, "M": F.M, "N": F.N},
        "normal": F.normal,
        "K_extrinsic": c.K_extrinsic, "K_intrinsic": c.K_intrinsic,
        "principal": [c.k1, c.k2], "mean": c.H,
        "residuals": {"egregium": gap, "codazzi": codazzi},
    }
    _emit(canonical_json(out), args.out)
    return EXIT_OK if max(gap, codazzi) <= args.tol else EXIT_RESIDUAL


def _off_curve_point(c, p0):
    """``p0`` itself if it is off the curve, else ``p0`` nudged along +x until it is."""
    p = np.asarray(p0, float)
    scale = float(np.max(np.abs(c.points))) or 1.0
    step = 1e-3 * scale
    for _ in range(60):
        try:
            return p, topology.winding_number(c, p)
        except DegenerateError:
            p = p + np.array([step, 0.0])
    raise DegenerateError("could not find an off-curve reference point")


def cmd_topology(args):
    c = topology.PolyCurve.load(args.curve)
    point, w = _off_curve_point(c, _vector(args.point))
    R, total = topology.rotation_invariants(c)
    area, area_res = topology.signed_area(c)
    n, pts = topology.self_intersections(c)
    gauss_ok = n >= abs(abs(R) - 1)
    out = {
        "winding_origin": w, "winding_point": point,
        "rotation_number": R, "total_turning": total,
        "signed_area": area, "area_residual": area_res,
        "self_intersections": n, "intersection_points": pts,
        "gauss_inequality": gauss_ok,
    }
    _emit(canonical_json(out), args.out)
    return EXIT_OK if gauss_ok else EXIT_RESIDUAL


def cmd_linking(args):
    if args.hopf:
        c1, c2 = topology.hopf_link()
    else:
        if not (args.curve1 and args.curve2):
            raise GeometryError("linking needs --curve1 and --curve2 (or --hopf)")
        c1, c2 = topology.PolyCurve.load(args.curve1), topology.PolyCurve.load(args.curve2)
    m, raw = topology.linking_number(c1, c2)
    m_swapped, _ = topology.linking_number(c2, c1)
    out = {"linking_number": m, "integral": raw, "reciprocal": m == m_swapped}
    _emit(canonical_json(out), args.out)
    return EXIT_OK if m == m_swapped else EXIT_RESIDUAL


def cmd_quaternion(args):
    G = quaternion.binary_icosahedral()
    order = len({tuple(np.round(g, 9)) for g in G})
    closed = quaternion.closure_check(G)
    rotations = quaternion.distinct_rotations(G)
    out = {"group_order": order, "closed": closed, "rotations": rotations}
    if args.q is not None:
        A, normalized = quaternion.rotation_matrix(_vector(args.q))
        out["rotation_matrix"] = A
        out["normalized"] = normalized
    _emit(canonical_json(out), args.out)
    return EXIT_OK if (order == 120 and closed and rotations == 60) else EXIT_RESIDUAL


def cmd_lorentz(args):
    B = lorentz.boost_from_velocity(_vector(args.v), args.c)
    ev = _vector(args.event)
    if ev.shape != (4,):
        raise GeometryError("--event needs four numbers x,y,z,t")
    e = lorentz.Event(ev[:3], ev[3])
    img = lorentz.apply(B, e)
    origin = lorentz.Event(np.zeros(3), 0.0)
    before = lorentz.interval(origin, e, args.c)
    after = lorentz.interval(lorentz.apply(B, origin), img, args.c)
    res = abs(after - before) / max(1.0, abs(before))
    out = {
        "gamma": B.gamma, "image": {"x": img.x, "t": img.t},
        "interval": before, "interval_residual": res,
        "constraint_residual": B.constraint_residual(),
    }
    _emit(canonical_json(out), args.out)
    return EXIT_OK if res <= args.tol else EXIT_RESIDUAL


def cmd_verify(args):
    which = "all" if args.suite == "all" else [int(s) for s in args.suite.split(",")]
    for n in ([] if which == "all" else which):
        if n not in verify.CHECKS:
            raise GeometryError(f"unknown acceptance check {n}")
    results = verify.run_suite(which, seed=args.seed)
    for r in results:
        print(r.line(), file=sys.stderr)
    passed = all(r.passed for r in results)
    out = {"seed": args.seed, "passed": passed,
           "checks": [{k: v for k, v in r.to_dict().items() if k != "seconds"} for r in results]}
    _emit(canonical_json(out), args.out)
    return EXIT_OK if passed else EXIT_RESIDUAL


# -- parser --------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geomkit", description="Numerical differential geometry toolkit")
    parser.add_argument("--seed", type=int, default=verify.DEFAULT_SEED,
                        help="seed for randomized sampling (env GEOM_SEED overrides)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--out", default=None, help="output path (default stdout)")
        p.set_defaults(func=fn)
        return p

    p = add("geodesic", cmd_geodesic, "geodesic trace from initial data or between two points")
    p.add_argument("--model", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--xi")
    p.add_argument("--q", help="endpoint; solves the boundary value problem instead")
    p.add_argument("--T", type=float, default=1.0)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--format", choices=("json", "csv"), default=None)

    p = add("curvature", cmd_curvature, "curvature tensors at a point")
    p.add_argument("--model", required=True)
    p.add_argument("--x", required=True)
    p.add_argument("--tol", type=float, default=1e-5)

    p = add("triangle", cmd_triangle, "geodesic triangle report")
    p.add_argument("--model", required=True)
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--r", required=True)
    p.add_argument("--tol", type=float, default=1e-4)

    p = add("surface", cmd_surface, "fundamental forms and curvatures of a built-in surface")
    p.add_argument("--surface", required=True, help="name[:key=val,...]")
    p.add_argument("--u", type=float, required=True)
    p.add_argument("--v", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-5)

    p = add("topology", cmd_topology, "winding, rotation, area and self-intersections of a plane curve")
    p.add_argument("--curve", required=True, help="curve JSON file")
    p.add_argument("--point", default="0,0", help="winding reference point (default origin)")

    p = add("linking", cmd_linking, "Gauss linking number of two closed space curves")
    p.add_argument("--curve1")
    p.add_argument("--curve2")
    p.add_argument("--hopf", action="store_true", help="use the built-in Hopf link")

    p = add("quaternion", cmd_quaternion, "binary icosahedral group summary")
    p.add_argument("--q", default=None, help="optional quaternion a,b,c,d to convert to a rotation")

    p = add("lorentz", cmd_lorentz, "apply a boost to an event")
    p.add_argument("--v", required=True)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--event", required=True, help="x,y,z,t")
    p.add_argument("--tol", type=float, default=1e-10)

    p = add("verify", cmd_verify, "run the acceptance checks")
    p.add_argument("--suite", default="all", help="'all' or comma-separated check numbers")
    return parser


def _origin(exc) -> str:
    """Module of the innermost geomkit frame that raised ``exc``."""
    name = "geomkit"
    for frame in traceback.extract_tb(exc.__traceback__):
        parts = frame.filename.replace("\\", "/").split("/")
        if "geomkit" in parts:
            name = "geomkit." + os.path.splitext(parts[-1])[0]
    return name


def _attach_negative_values(argv):
    """Rewrite ``--opt -1,2`` as ``--opt=-1,2`` so argparse does not read the value as a flag."""
    out = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1]
                and len(tok) > 1 and tok[0] == "-" and (tok[1].isdigit() or tok[1] == ".")):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_attach_negative_values(argv))
    try:
        args.seed = resolve_seed(args.seed)
        return args.func(args)
    except (GeometryError, OSError) as exc:
        print(f"{_origin(exc)}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
