"""Command-line front end.

Commands map one-to-one onto library operations; `verify` chains the whole
identity suite.  Exit codes: 0 success, 1 check failure, 2 input error,
3 solver failure.  JSON output is deterministic (sorted keys, floats at 15
significant digits) so it can serve as a test oracle.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .homology import (
    CocycleError,
    FlatteningError,
    solve_cocycle,
    solve_flattening,
)
from .invariant import (
    InvariantError,
    check_cover_derivative,
    check_cyclic_product,
    check_derivative,
    check_pachner_invariance,
    check_symmetry,
    one_loop,
    twisted_one_loop,
)
from .laurent import lp_to_json
from .shapes import SolverError, solve_shapes, verify_solution
from .triangulation import (
    TriangulationError,
    cyclic_cover,
    pachner_23,
    parse_triangulation,
    serialize_triangulation,
)
from .twist import (
    TwistError,
    check_cover_factorization,
    check_symplectic,
    twisted_gluing_matrices,
    twisted_nz_matrices,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT_ERROR = 2
EXIT_SOLVER_ERROR = 3

COMMANDS = ("parse", "shapes", "nz", "twisted-nz", "one-loop",
            "twisted-one-loop", "cover", "pachner", "verify")


class InputError(ValueError):
    pass


def _resolve_path(path):
    for cand in (path, path + ".json"):
        if os.path.isfile(cand):
            return cand
    raise InputError(f"no such file: {path}")


def _load(args):
    with open(_resolve_path(args.input)) as fh:
        text = fh.read()
    try:
        T = parse_triangulation(text)
    except (TriangulationError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise InputError(f"cannot parse {args.input}: {e}") from e
    return T


def _cocycle_for(T, args):
    if args.cocycle is not None:
        try:
            vals = [int(x) for x in args.cocycle.split(",")]
        except ValueError as e:
            raise InputError(f"--cocycle wants comma-separated integers: {e}")
        if len(vals) != 2 * T.n_tets:
            raise InputError(
                f"--cocycle wants {2 * T.n_tets} values, got {len(vals)}")
        from .homology import edge_relation_matrix
        R = edge_relation_matrix(T)
        bad = [i for i, row in enumerate(R)
               if sum(row[p] * vals[p] for p in range(len(vals))) != 0]
        if bad:
            raise InputError(
                f"--cocycle violates edge relations at rows {bad}")
        return vals
    if T.cocycle is not None:
        return list(T.cocycle)
    return solve_cocycle(T).values


# --- output formatting --------------------------------------------------


def _round_floats(obj):
    if isinstance(obj, float):
        return float(f"{obj:.15g}")
    if isinstance(obj, complex):
        return [_round_floats(obj.real), _round_floats(obj.imag)]
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _emit(obj, args, text_renderer=None):
    if args.format == "json":
        print(json.dumps(_round_floats(obj), sort_keys=True, indent=1))
    else:
        if text_renderer is None:
            print(json.dumps(_round_floats(obj), sort_keys=True, indent=1))
        else:
            text_renderer(obj)


def _print_int_matrix(name, M):
    width = max((len(str(x)) for row in M for x in row), default=1)
    print(f"{name}:")
    for row in M:
        print("  [" + " ".join(f"{x:>{width}}" for x in row) + "]")


def _print_poly_matrix(name, M):
    cells = [[str(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]
    width = max((len(c) for row in cells for c in row), default=1)
    print(f"{name}:")
    for row in cells:
        print("  [" + " | ".join(f"{c:>{width}}" for c in row) + "]")


def _lmat_json(M):
    return [[lp_to_json(M[i, j]) for j in range(M.cols)] for i in range(M.rows)]


def _complex_pair(c):
    return [float(c.real), float(c.imag)]


# --- commands -------------------------------------------------------------


def cmd_parse(T, args):
    doc = serialize_triangulation(T)
    if args.format == "json":
        print(json.dumps(json.loads(doc), sort_keys=True, indent=1))
        return EXIT_OK

    def render(_):
        print(f"{T.n_tets} tetrahedra, {len(T.edge_classes)} edge classes")
        for t in range(T.n_tets):
            faces = []
            for f in range(4):
                nbr, perm = T.gluings[t][f]
                faces.append(f"{f}->{nbr}({''.join(map(str, perm))})")
            print(f"  tet {t}: " + "  ".join(faces))
        for ec in T.edge_classes:
            print(f"  edge {ec.index}: valence {ec.valence}")
        for c in T.peripheral_curves:
            print(f"  curve {c.name}: C={c.C} C'={c.Cp} C''={c.Cpp}")

    _emit(None, args, render)
    return EXIT_OK


def cmd_shapes(T, args):
    sol = solve_shapes(T, tol=args.tolerance)
    out = {
        "shapes": [_complex_pair(z) for z in sol.z],
        "residual": sol.residual,
        "iterations": sol.iterations,
        "geometric": bool(all(z.imag > 0 for z in sol.z)),
    }

    def render(o):
        for j, (re, im) in enumerate(o["shapes"]):
            print(f"z[{j}] = {re:.15g} {im:+.15g}i")
        print(f"residual {o['residual']:.3e} after {o['iterations']} iterations")

    _emit(out, args, render)
    return EXIT_OK


def cmd_nz(T, args):
    G, Gp, Gpp = T.gluing_matrices()
    A, B = T.nz_matrices()
    ABt = [[sum(A[i][k] * B[j][k] for k in range(T.n_tets))
            for j in range(T.n_tets)] for i in range(T.n_tets)]
    out = {"G": G, "Gp": Gp, "Gpp": Gpp, "A": A, "B": B, "ABt": ABt}

    def render(o):
        for name in ("G", "Gp", "Gpp", "A", "B", "ABt"):
            _print_int_matrix(name, o[name])

    _emit(out, args, render)
    return EXIT_OK


def cmd_twisted_nz(T, args):
    vals = _cocycle_for(T, args)
    Gt, Gpt, Gppt = twisted_gluing_matrices(T, vals)
    At, Bt = twisted_nz_matrices(T, vals)
    mats = {"Gt": Gt, "Gpt": Gpt, "Gppt": Gppt, "At": At, "Bt": Bt}
    out = {name: _lmat_json(M) for name, M in mats.items()}
    out["cocycle"] = vals

    def render(_):
        print(f"cocycle: {vals}")
        for name, M in mats.items():
            _print_poly_matrix(name, M)

    _emit(out, args, render)
    return EXIT_OK


def cmd_one_loop(T, args):
    names = {c.name for c in T.peripheral_curves}
    if args.curve not in names:
        raise InputError(
            f"no peripheral curve named {args.curve!r}; have {sorted(names)}")
    sol = solve_shapes(T, tol=args.tolerance)
    flat = solve_flattening(T)
    val = one_loop(T, sol.z, flat, curve_name=args.curve)
    out = {"curve": args.curve, "value": _complex_pair(val),
           "abs": abs(val)}

    def render(o):
        print(f"tau_{o['curve']} = {val:.12g} (up to sign), |tau| = {o['abs']:.12g}")

    _emit(out, args, render)
    return EXIT_OK


def cmd_twisted_one_loop(T, args):
    sol = solve_shapes(T, tol=args.tolerance)
    flat = solve_flattening(T)
    vals = _cocycle_for(T, args)
    tau = twisted_one_loop(T, sol.z, flat, vals)
    can = tau.canonical
    out = {
        "tau": lp_to_json(can.poly),
        "sign": can.sign,
        "shift": can.shift,
        "tau_at_1": _complex_pair(tau.poly.evaluate(1.0)),
        "route_residual": tau.route_residual,
    }

    def render(o):
        print(f"tau(t) = {can.poly}  (times {can.sign:+d} t^{can.shift})")
        print(f"tau(1) = {tau.poly.evaluate(1.0):.3e}")

    _emit(out, args, render)
    return EXIT_OK


def cmd_cover(T, args):
    if args.n < 1:
        raise InputError(f"--n wants a positive integer, got {args.n}")
    vals = _cocycle_for(T, args)
    Tn = cyclic_cover(T, vals, args.n)
    print(serialize_triangulation(Tn))
    return EXIT_OK


def cmd_pachner(T, args):
    sol = solve_shapes(T, tol=args.tolerance)
    flat = solve_flattening(T)
    move = None
    for face in range(2 * T.n_tets):
        try:
            move = pachner_23(T, face, z=sol.z, f=flat)
            break
        except TriangulationError:
            continue
    if move is None:
        raise TriangulationError("no admissible 2-3 move")
    print(serialize_triangulation(move.triangulation))
    return EXIT_OK


def cmd_verify(T, args):
    sol = solve_shapes(T, tol=args.tolerance)
    flat = solve_flattening(T)
    vals = _cocycle_for(T, args)
    tau = twisted_one_loop(T, sol.z, flat, vals)

    checks = {}
    sym = check_symplectic(T, vals)
    checks["symplectic"] = {"pass": sym["pass"],
                            "residual": sym["max_abs_coeff"]}
    cov = check_cover_factorization(T, vals, n=2)
    checks["cover_factorization_n2"] = {"pass": cov["pass"], "residual": 0.0}

    moves_pass, scalars = True, []
    count = 0
    for face in range(2 * T.n_tets):
        if count >= 3:
            break
        try:
            move = pachner_23(T, face, z=sol.z, f=flat)
        except TriangulationError:
            continue
        res = check_pachner_invariance(T, sol.z, flat, move, vals)
        moves_pass = moves_pass and res["pass"]
        scalars.append(_complex_pair(res["scalar"]))
        count += 1
    checks["pachner"] = {"pass": bool(moves_pass and count >= 3),
                         "moves": count, "scalars": scalars}

    cyc = check_cyclic_product(T, sol.z, flat, 2, vals)
    checks["cyclic_product_n2"] = {"pass": cyc["pass"],
                                   "residual": cyc["residual"]}
    der = check_derivative(T, sol.z, flat, vals)
    checks["derivative"] = {"pass": der["pass"],
                            "tau_at_1": der["tau_at_1"],
                            "abs_derivative": der["abs_derivative"],
                            "abs_one_loop_longitude":
                                der["abs_one_loop_longitude"]}
    symm = check_symmetry(T, sol.z, flat, vals)
    checks["symmetry"] = {
        "pass": symm["pass"],
        "tau_symmetric": symm["tau_symmetric"],
        "detA_palindromic": list(symm["detA_palindromic"] or ()) or None,
        "detB_palindromic": list(symm["detB_palindromic"] or ()) or None,
    }

    ok = all(c["pass"] for c in checks.values())
    out = {
        "tau_twisted": lp_to_json(tau.canonical.poly),
        "tau_one_loop": {"longitude": _complex_pair(
            one_loop(T, sol.z, flat, "longitude"))},
        "checks": checks,
        "pass": ok,
    }

    def render(o):
        for name in sorted(checks):
            c = checks[name]
            print(f"{'ok' if c['pass'] else 'FAIL'}  {name}")
        print(f"tau(t) = {tau.canonical.poly}")
        print("all checks passed" if ok else "some checks FAILED")

    _emit(out, args, render)
    return EXIT_OK if ok else EXIT_CHECK_FAILED


HANDLERS = {
    "parse": cmd_parse,
    "shapes": cmd_shapes,
    "nz": cmd_nz,
    "twisted-nz": cmd_twisted_nz,
    "one-loop": cmd_one_loop,
    "twisted-one-loop": cmd_twisted_one_loop,
    "cover": cmd_cover,
    "pachner": cmd_pachner,
    "verify": cmd_verify,
}


def build_parser():
    ap = argparse.ArgumentParser(
        prog="twistnz",
        description="Twisted Neumann-Zagier matrices and the twisted "
                    "1-loop invariant of one-cusped hyperbolic 3-manifolds.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("input", help="triangulation file (.json may be omitted)")
    ap.add_argument("--cocycle", default=None,
                    help="comma-separated integers, one per face-pairing")
    ap.add_argument("--tolerance", type=float, default=1e-12)
    ap.add_argument("--n", type=int, default=2, help="cover degree")
    ap.add_argument("--format", choices=("json", "text"), default="json")
    ap.add_argument("--curve", default="longitude",
                    help="peripheral curve name for one-loop")
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT_ERROR if e.code else EXIT_OK
    if args.tolerance <= 0:
        print("error: --tolerance must be positive", file=sys.stderr)
        return EXIT_INPUT_ERROR
    try:
        T = _load(args)
        return HANDLERS[args.command](T, args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (TriangulationError, CocycleError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR
    except (SolverError, FlatteningError, InvariantError, TwistError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SOLVER_ERROR


if __name__ == "__main__":
    sys.exit(main())
