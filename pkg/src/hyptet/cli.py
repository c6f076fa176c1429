"""Command-line front end.

Verbs: validate, tetra (single-cell queries), maximize, solve, gap,
rigidity, fixture, selftest.  Six-vectors are comma-separated in the fixed
slot order 12,13,14,23,24,34; angles are radians unless --degrees is
given, which converts inputs only.  JSON output prints floats with 17
significant digits, so identical invocations are byte-identical.

Exit codes: 0 success, 1 validation/solver error (machine-readable error
object on stderr), 2 usage error.
"""

import argparse
import json
import math
import os
import sys

import numpy as np

from . import optimize, selftest, tetra, triangulation
from .errors import HyptetError


def _render(obj):
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format(float(obj), ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(_render(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return _render(obj.tolist())
    if isinstance(obj, dict):
        return (
            "{"
            + ",".join(f"{json.dumps(str(k))}:{_render(v)}" for k, v in obj.items())
            + "}"
        )
    raise TypeError(f"cannot serialize {type(obj)!r}")


def _emit(obj):
    sys.stdout.write(_render(obj) + "\n")


def _load_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_render(obj) + "\n")


class _UsageError(Exception):
    pass


def _parse_six(text, name, degrees=False):
    if text is None:
        raise _UsageError(f"{name} is required for this query")
    parts = [p for p in text.split(",") if p != ""]
    if len(parts) != 6:
        raise _UsageError(f"{name} needs six comma-separated values")
    try:
        vals = np.array([float(p) for p in parts])
    except ValueError:
        raise _UsageError(f"{name} contains a non-numeric entry") from None
    if degrees:
        vals = vals * math.pi / 180.0
    return vals


def _load_problem(args):
    T = triangulation.validate(_load_json(args.triangulation))
    k = triangulation.ConeTarget.from_json(T, _load_json(args.k))
    return T, k


def _cmd_validate(args):
    T = triangulation.validate(_load_json(args.triangulation))
    _emit(T.summary())
    return 0


def _cmd_tetra(args):
    deg = args.degrees
    if args.query == "angles-to-lengths":
        alpha = _parse_six(args.alpha, "--alpha", degrees=deg)
        _emit({"l": list(tetra.angles_to_lengths(alpha))})
    elif args.query == "lengths-to-angles":
        lengths = _parse_six(args.l, "--l")
        _emit({"alpha": list(tetra.extended_angles(lengths))})
    elif args.query == "classify":
        lengths = _parse_six(args.l, "--l")
        sys.stdout.write(tetra.classify(lengths, tol=args.tol).value + "\n")
    elif args.query == "volume":
        alpha = _parse_six(args.alpha, "--alpha", degrees=deg)
        _emit({"volume": tetra.volume_from_angles(alpha)})
    elif args.query == "covolume":
        lengths = _parse_six(args.l, "--l")
        _emit({"covolume": tetra.covolume(lengths)})
    else:  # pragma: no cover - argparse restricts choices
        raise ValueError(f"unknown tetra query {args.query}")
    return 0


def _cmd_maximize(args):
    T, k = _load_problem(args)
    report = optimize.maximize_volume(T, k, tol=args.tol)
    _emit(report.to_json())
    return 0


def _cmd_solve(args):
    T, k = _load_problem(args)
    report = optimize.solve_cone_angles(T, k, tol=args.tol)
    _emit(report.to_json(T))
    return 0


def _cmd_gap(args):
    T, k = _load_problem(args)
    primal = optimize.maximize_volume(T, k, tol=args.tol)
    dual = optimize.solve_cone_angles(T, k, tol=args.tol)
    gap = dual.objective - 2.0 * primal.volume
    _emit(
        {
            "gap": gap,
            "volume": primal.volume,
            "dual_objective": dual.objective,
            "relative_gap": gap / (1.0 + abs(2.0 * primal.volume)),
        }
    )
    return 0


def _cmd_rigidity(args):
    T, k = _load_problem(args)
    report = optimize.rigidity_check(
        T, k, n_starts=args.starts, tol=args.tol, seed=args.seed
    )
    _emit(report.to_json())
    return 0


def _cmd_fixture(args):
    if args.kind != "double":
        raise ValueError("only the 'double' fixture is available")
    lengths = _parse_six(args.l, "--l")
    T, k, assignment = triangulation.doubled_fixture(lengths)
    os.makedirs(args.out_dir, exist_ok=True)
    tri_path = os.path.join(args.out_dir, "tri.json")
    k_path = os.path.join(args.out_dir, "k.json")
    a_path = os.path.join(args.out_dir, "assignment.json")
    _write_json(tri_path, triangulation.triangulation_document(T))
    _write_json(k_path, k.to_json(T))
    _write_json(a_path, assignment.to_json())
    _emit({"tri": tri_path, "k": k_path, "assignment": a_path})
    return 0


def _cmd_selftest(args):
    ok = selftest.run_all(seed=args.seed, out=lambda s: sys.stdout.write(s + "\n"))
    return 0 if ok else 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hyptet",
        description=(
            "Decorated tetrahedra with one truncated and three cusped "
            "vertices: geometry queries, triangulation validation, volume "
            "maximization, cone-angle solves, duality gap, and rigidity "
            "checks.  Six-vectors use slot order 12,13,14,23,24,34."
        ),
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("validate", help="validate a triangulation document")
    p.add_argument("triangulation")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("tetra", help="single-tetrahedron queries")
    p.add_argument(
        "query",
        choices=[
            "angles-to-lengths",
            "lengths-to-angles",
            "classify",
            "volume",
            "covolume",
        ],
    )
    p.add_argument("--alpha", help="six angles, comma separated")
    p.add_argument("--l", help="six signed lengths, comma separated")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument(
        "--degrees",
        action="store_true",
        help="interpret input angles as degrees (outputs stay in radians)",
    )
    p.set_defaults(func=_cmd_tetra)

    for verb, func, extra in (
        ("maximize", _cmd_maximize, ()),
        ("solve", _cmd_solve, ()),
        ("gap", _cmd_gap, ()),
        ("rigidity", _cmd_rigidity, ("starts", "seed")),
    ):
        p = sub.add_parser(verb)
        p.add_argument("triangulation")
        p.add_argument("--k", required=True, help="cone target JSON file")
        p.add_argument(
            "--tol", type=float, default=1e-6 if verb == "rigidity" else 1e-8
        )
        if "starts" in extra:
            p.add_argument("--starts", type=int, default=5)
        if "seed" in extra:
            p.add_argument("--seed", type=int, default=0)
        p.set_defaults(func=func)

    p = sub.add_parser("fixture", help="emit a ready-made problem instance")
    p.add_argument("kind", choices=["double"])
    p.add_argument("--l", required=True, help="six interior lengths")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=_cmd_fixture)

    p = sub.add_parser("selftest", help="run the invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_selftest)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return 2
    except (HyptetError, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(
            _render({"error": type(exc).__name__, "message": str(exc)}) + "\n"
        )
        return 1


if __name__ == "__main__":
    sys.exit(main())
