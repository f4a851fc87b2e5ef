"""Command-line interface.

Exit codes: 0 on success (JSON on stdout), 1 for a domain error (the error
class name is reported), 2 for unreadable input or bad arguments.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import io
from .bwpairs import (
    CYCLIC_TOL,
    SIGN_TOL,
    BWPair,
    act_orthogonal,
    cyclicity,
    is_cyclic,
    lift_distinct,
    normalized_cyclicity,
    project,
    random_orthogonal,
    relate,
)
from .errors import FormatError, NahmRatError
from .flow import DEFAULT_EPS, DEFAULT_LEVELS, DEFAULT_TOL, donaldson_flow, extract_map
from .monodromy import continue_loop
from .nahm import NoPole, builtin_k1, builtin_k2, nahm_residual, residue_fit
from .ratmaps import DEFAULT_DELTA, from_partial_fractions, poles_and_residues


class InputError(Exception):
    """Unreadable or malformed input; exit code 2."""


def _load(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: malformed JSON ({exc})") from exc


def _nahm(source: str):
    if source.startswith("k1:"):
        try:
            c = [float(x) for x in source[3:].split(",")]
        except ValueError as exc:
            raise InputError(f"bad k1 parameters {source!r}") from exc
        if len(c) != 3:
            raise InputError("k1 needs three comma-separated numbers")
        return builtin_k1(c)
    if source.startswith("k2:"):
        try:
            m = float(source[3:])
        except ValueError as exc:
            raise InputError(f"bad k2 parameter {source!r}") from exc
        if not 0 <= m < 1:
            raise InputError("k2 modulus must lie in [0, 1)")
        return builtin_k2(m)
    return io.nahm_from_json(_load(source))


def _finite(x):
    x = float(x)
    return x if np.isfinite(x) else None


def cmd_project(args):
    pair = io.pair_from_json(_load(args.pair))
    return io.map_to_json(project(pair, args.tol if args.tol is not None else CYCLIC_TOL))


def cmd_lift(args):
    f = io.map_from_json(_load(args.map), args.delta)
    return io.pair_to_json(lift_distinct(f, args.delta))


def cmd_cyclic(args):
    pair = io.pair_from_json(_load(args.pair))
    tol = args.tol if args.tol is not None else CYCLIC_TOL
    return {
        "det": io.encode_complex(cyclicity(pair)),
        "normalized": normalized_cyclicity(pair),
        "cyclic": is_cyclic(pair, tol),
    }


def cmd_relate(args):
    p1 = io.pair_from_json(_load(args.pair))
    p2 = io.pair_from_json(_load(args.pair2))
    g = relate(p1, p2, args.delta, args.tol if args.tol is not None else SIGN_TOL)
    return g.to_json()


def cmd_flow(args):
    data = _nahm(args.nahm)
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    if not 0 < args.eps < 0.1:
        raise InputError("--eps must lie in (0, 0.1)")
    result = donaldson_flow(data, args.eps, tol, args.levels)
    doc = {
        "k": data.k,
        "B": io.encode_matrix(result.B),
        "W": io.encode_vector(result.W),
        "epsilon_used": result.epsilon_used,
        "extrapolation_error": _finite(result.extrapolation_error),
        "endpoint_divergence_flag": result.endpoint_divergence_flag,
        "diagnostics": result.diagnostics,
        "map": None,
    }
    if result.endpoint_divergence_flag:
        print(f"flow: {result.diagnostics}", file=sys.stderr)
    else:
        doc["map"] = io.map_to_json(extract_map(result))
    return doc


def cmd_verify_nahm(args):
    data = _nahm(args.nahm)
    if args.grid < 1:
        raise InputError("--grid must be positive")
    if not 1e-3 <= args.margin < 1:
        raise InputError("--margin must lie in [1e-3, 1)")
    grid = np.linspace(-1 + args.margin, 1 - args.margin, args.grid)
    doc = {
        "k": data.k,
        "kind": data.kind,
        "grid": {"n": args.grid, "margin": args.margin},
        "residual": nahm_residual(data, grid),
        "relative_residual": nahm_residual(data, grid, relative=True),
    }
    for name, e in (("residue_minus", -1), ("residue_plus", 1)):
        try:
            fit = residue_fit(data, e)
        except NoPole as exc:
            doc[name] = {"pole": False, "message": str(exc)}
            continue
        doc[name] = {
            "pole": True,
            "t1": io.encode_matrix(fit.t[0]),
            "t2": io.encode_matrix(fit.t[1]),
            "t3": io.encode_matrix(fit.t[2]),
            "spectrum": [float(x) for x in fit.spectrum],
            "residue_error": float(fit.residue_error),
            "irreducible": fit.irreducible,
        }
    return doc


def cmd_monodromy(args):
    loop = io.loop_from_json(_load(args.loop), args.delta)
    g, trace = continue_loop(loop)
    if args.trace:
        with open(args.trace, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(trace.header())
            for row in trace.rows():
                writer.writerow([repr(float(x)) for x in row])
    return g.to_json()


def cmd_selftest(args):
    """Randomized roundtrip and equivariance checks."""
    rng = np.random.default_rng(args.seed)
    checks = {"roundtrip": [0, 0], "equivariance": [0, 0]}
    for _ in range(args.count):
        k = int(rng.integers(1, 7))
        while True:
            b = rng.uniform(-2, 2, k) + 1j * rng.uniform(-2, 2, k)
            if k == 1 or np.min(np.abs(b[:, None] - b[None, :]) + 10 * np.eye(k)) > 0.2:
                break
        W = rng.uniform(0.5, 1.5, k) * np.exp(1j * rng.uniform(0, 2 * np.pi, k))
        pair = BWPair(np.diag(b), W)
        f = project(pair)
        ok = from_partial_fractions(poles_and_residues(f)).allclose(f, 1e-8)
        try:
            relate(lift_distinct(f), pair)
        except NahmRatError:
            ok = False
        checks["roundtrip"][0 if ok else 1] += 1
        Q = random_orthogonal(k, rng)
        ok = project(act_orthogonal(Q, pair)).allclose(f, 1e-9)
        checks["equivariance"][0 if ok else 1] += 1
    doc = {
        "seed": args.seed,
        "count": args.count,
        "checks": {name: {"passed": p, "failed": q} for name, (p, q) in checks.items()},
    }
    doc["ok"] = all(q == 0 for _, q in checks.values())
    return doc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="override the command's tolerance")
    common.add_argument("--delta", type=float, default=DEFAULT_DELTA, help="pole separation margin")

    parser = argparse.ArgumentParser(prog="nahmrat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("project", parents=[common], help="pair -> rational map")
    p.add_argument("--pair", required=True)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("lift", parents=[common], help="map with distinct poles -> diagonal pair")
    p.add_argument("--map", required=True)
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("cyclic", parents=[common], help="Krylov determinant of a pair")
    p.add_argument("--pair", required=True)
    p.set_defaults(func=cmd_cyclic)

    p = sub.add_parser("relate", parents=[common], help="signed permutation between diagonal pairs")
    p.add_argument("--pair", required=True)
    p.add_argument("--pair2", required=True)
    p.set_defaults(func=cmd_relate)

    p = sub.add_parser("flow", parents=[common], help="scattering flow on Nahm data")
    p.add_argument("--nahm", required=True, help="k1:c1,c2,c3 | k2:m | FILE")
    p.add_argument("--eps", type=float, default=DEFAULT_EPS)
    p.add_argument("--levels", type=int, default=DEFAULT_LEVELS)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("verify-nahm", parents=[common], help="Nahm residual and pole residues")
    p.add_argument("--nahm", required=True, help="k1:c1,c2,c3 | k2:m | FILE")
    p.add_argument("--grid", type=int, default=1001)
    p.add_argument("--margin", type=float, default=0.05, help="grid distance to the endpoints")
    p.set_defaults(func=cmd_verify_nahm)

    p = sub.add_parser("monodromy", parents=[common], help="continue the diagonal lift around a loop")
    p.add_argument("--loop", required=True)
    p.add_argument("--trace", help="write the continuation trace as CSV")
    p.set_defaults(func=cmd_monodromy)

    p = sub.add_parser("selftest", parents=[common], help="randomized property checks")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    p.set_defaults(func=cmd_selftest)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        doc = args.func(args)
    except (InputError, FormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NahmRatError as exc:
        print(io.dumps({"error": exc.name, "message": str(exc)}))
        print(f"{exc.name}: {exc}", file=sys.stderr)
        return 1
    print(io.dumps(doc))
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
