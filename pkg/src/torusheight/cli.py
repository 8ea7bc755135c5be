"""Command-line front end: JSON instance files in, sorted JSON on stdout.

Exit codes: 0 success, 1 input or verification failure (a JSON error object
goes to stderr and nothing goes to stdout), 2 when the answer is infinite
or vacuous (obstruction degree infinite, bound vacuous over the constants).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import serialize as ser
from .function_field import (ff_essmin_upper_sample, ff_point_height, ff_torsion_closure,
                             ff_verify_bounds, hyperform_invariants, is_irreducible_form)
from .heights import (AlgebraicNumber, M_K_NAMES, cor15_bound, is_root_of_unity, mahler_height,
                      m_k_constant, rational_point_height, thm13_bound)
from .reals import DEFAULT_PREC, RationalInterval, fmt
from .torus import (INFINITE, TorusTranslate, is_subtranslate, obstruction_degree,
                    torsion_closure, translate_degree)
from .verify import Sizes, property_names, verify_suite

EXIT_OK, EXIT_INPUT, EXIT_INFINITE = 0, 1, 2


class CommandError(Exception):
    def __init__(self, message: str, path: str | None = None):
        super().__init__(message)
        self.payload = {"error": message, "path": path}


# ---------------------------------------------------------------------------
# loading


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CommandError(f"cannot read {path}: {e.strerror}") from None
    except UnicodeDecodeError:
        raise CommandError(f"{path} is not UTF-8 text") from None


def _load(path: str, kinds: tuple[str, ...]) -> ser.Instance:
    inst = ser.parse_instance(_read(path))
    if inst.kind not in kinds:
        raise ser.InstanceError("$.kind", f"this command takes {' or '.join(kinds)}, got {inst.kind!r}")
    return inst


def _translate(inst: ser.Instance) -> TorusTranslate:
    return inst.payload.translate if inst.kind == "bound-query" else inst.payload


def _prec(args, inst: ser.Instance | None = None) -> int:
    if args.prec is not None:
        return args.prec
    if inst is not None and inst.prec is not None:
        return inst.prec
    return DEFAULT_PREC


def _lattice_report(X: TorusTranslate) -> dict:
    return {"ambient": X.ambient, "dim": X.dim, "gamma_basis": ser.int_matrix(X.gamma.basis)}


# ---------------------------------------------------------------------------
# torus


def cmd_torus_degree(args):
    X = _translate(_load(args.file, ("torus", "point", "bound-query")))
    B = X.parametrization()
    return EXIT_OK, {**_lattice_report(X), "degree": translate_degree(X),
                     "parametrization": ser.int_matrix(B.vectors),
                     "polytope": ser.polytope(B.polytope()) if B.p else []}


def cmd_torus_obstruct(args):
    X = _translate(_load(args.file, ("torus", "point", "bound-query")))
    if args.ambient_file:
        Y = _translate(_load(args.ambient_file, ("torus", "point", "bound-query")))
    else:
        Y = TorusTranslate.full(X.ambient)
    if X.ambient != Y.ambient:
        raise CommandError("X and Y live in tori of different dimensions")
    if not is_subtranslate(X, Y):
        raise CommandError("Gamma_Y is not contained in Gamma_X (or the characters differ): X is not in Y")
    ob = obstruction_degree(X, Y)
    out = {"dim_x": X.dim, "dim_y": Y.dim, "deg_x": translate_degree(X), "deg_y": translate_degree(Y)}
    if ob.omega == INFINITE:
        return EXIT_INFINITE, {**out, "omega": None, "infinite": True, "minimizer": None}
    return EXIT_OK, {**out, "omega": ob.omega, "infinite": False, "minimizer": list(ob.minimizer),
                     "norm_sq": ser.rational(ob.norm_sq), "classes_searched": ob.candidates}


def cmd_torus_closure(args):
    X = _translate(_load(args.file, ("torus", "point", "bound-query")))
    cl = torsion_closure(X)
    U = cl.translate
    return EXIT_OK, {"gamma_u_basis": ser.int_matrix(U.gamma.basis), "degree": translate_degree(U),
                     "dim": U.dim, "subtorus": cl.is_subtorus,
                     "conditional_on_independence": cl.conditional,
                     "translate": ser.torus_to_dict(U)}


# ---------------------------------------------------------------------------
# bounds and heights


def _bound(args, fn):
    inst = _load(args.file, ("torus", "point", "bound-query"))
    X = _translate(inst)
    choice = args.m_k or (inst.payload.m_k if inst.kind == "bound-query" else "log2")
    try:
        m_k = m_k_constant(choice)
    except (ValueError, ZeroDivisionError):
        raise CommandError(f"unknown m(K) {choice!r}; use one of {', '.join(sorted(M_K_NAMES))}, "
                           "dobrowolski:D, or a rational") from None
    prec = _prec(args, inst)
    rep = fn(X, m_k, prec)
    out = rep.to_dict(prec)
    out["holds_all"] = all(v for v in rep.holds.values() if v is not None)
    return EXIT_OK, out


def cmd_bound_thm13(args):
    return _bound(args, thm13_bound)


def cmd_bound_cor15(args):
    return _bound(args, cor15_bound)


def cmd_height_mahler(args):
    text = args.polynomial
    if Path(text).is_file():
        text = _read(text).strip()
    coeffs = ser.parse_polynomial(text, "$")
    P = AlgebraicNumber(tuple(coeffs))
    tol = Fraction(args.tol)
    if tol <= 0:
        raise CommandError("tolerance must be positive")
    prec = _prec(args)
    h = mahler_height(P, tol, prec)
    return EXIT_OK, {"coefficients": [str(c) for c in P.coefficients], "degree": P.degree,
                     "is_root_of_unity": is_root_of_unity(P),
                     "height": fmt(h, prec),
                     "log_mahler_measure": fmt(RationalInterval(h.lo * P.degree, h.hi * P.degree), prec)}


def cmd_height_point(args):
    inst = _load(args.file, ("point", "torus"))
    X = inst.payload
    coords = X.point.coordinates()
    if coords is None:
        raise CommandError("the point needs rational generator values", "$.generators")
    prec = _prec(args, inst)
    return EXIT_OK, {"coordinates": [ser.rational(c) for c in coords],
                     "height": fmt(rational_point_height(coords), prec)}


# ---------------------------------------------------------------------------
# function field


def cmd_ff_height(args):
    inst = _load(args.file, ("ff-point",))
    P = inst.payload.point()
    return EXIT_OK, {"coordinates": [ser.ratfun(c) for c in P.coordinates],
                     "height": ff_point_height(P)}


def cmd_ff_closure(args):
    inst = _load(args.file, ("ff-point",))
    cl = ff_torsion_closure(inst.payload.translate())
    return EXIT_OK, {"gamma_u_basis": ser.int_matrix(cl.translate.gamma.basis),
                     "dim": cl.translate.dim, "defined_over_k": cl.defined_over_k,
                     "constants": [{"lambda": [str(x) for x in lam], "value": ser.ratfun(c)}
                                   for lam, c in cl.constants]}


def cmd_ff_verify(args):
    inst = _load(args.file, ("ff-point", "hyperform"))
    seed = args.seed if args.seed is not None else (inst.seed or 0)
    if inst.kind == "ff-point":
        rep = ff_verify_bounds(inst.payload.translate(), samples=args.samples, seed=seed,
                               max_degree=args.max_degree)
        out = rep.to_dict()
        if rep.vacuous:
            return EXIT_INFINITE, out
        return (EXIT_OK if not rep.violations else EXIT_INPUT), out
    f = inst.payload
    h, d = hyperform_invariants(f)
    out = {"N": f.N, "form": str(f.expr), "h": h, "deg": d, "normalized": f.normalized}
    if f.N == 2 and is_irreducible_form(f):
        rep = ff_essmin_upper_sample(f, trials=args.samples, seed=seed)
        out["essmin_sample"] = rep.to_dict()
        if not rep.holds:
            return EXIT_INPUT, out
    else:
        out["essmin_sample"] = None
    return EXIT_OK, out


def cmd_verify_all(args):
    try:
        sizes = Sizes.parse(args.sizes, args.instances)
    except ValueError as e:
        raise CommandError(str(e)) from None
    only = args.only.split(",") if args.only else None
    if only and set(only) - set(property_names()):
        raise CommandError(f"unknown properties; known: {', '.join(property_names())}")
    rep = verify_suite(args.seed, sizes, only)
    return (EXIT_OK if rep["passed"] else EXIT_INPUT), rep


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prec", type=int, default=argparse.SUPPRESS,
                        help="interval precision in bits (default: $TORUSHEIGHT_PREC or 128)")
    parser = argparse.ArgumentParser(
        prog="torusheight", parents=[common],
        description="Degrees, obstruction degrees and height lower bounds for torus translates.")
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(sub, name, fn, help_text):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(fn=fn)
        return p

    torus = groups.add_parser("torus", help="translates of subtori").add_subparsers(dest="cmd", required=True)
    leaf(torus, "degree", cmd_torus_degree, "degree of the closure in P^N").add_argument("file")
    p = leaf(torus, "obstruct", cmd_torus_obstruct, "obstruction degree of X in Y")
    p.add_argument("file")
    p.add_argument("ambient_file", nargs="?", help="Y (default: the whole torus)")
    leaf(torus, "closure", cmd_torus_closure, "torsion closure U_X").add_argument("file")

    bound = groups.add_parser("bound", help="height lower bounds").add_subparsers(dest="cmd", required=True)
    for name, fn in (("thm13", cmd_bound_thm13), ("cor15", cmd_bound_cor15)):
        p = leaf(bound, name, fn, f"{name} lower bound")
        p.add_argument("file")
        p.add_argument("--m-k", dest="m_k", default=None,
                       help="m(K): log2, schinzel, amoroso-dvornicich, dobrowolski:D or a rational")

    height = groups.add_parser("height", help="Weil heights").add_subparsers(dest="cmd", required=True)
    p = leaf(height, "mahler", cmd_height_mahler, "height of the roots of a polynomial in x")
    p.add_argument("polynomial", help="expression such as 'x**2 - x - 1', or a file holding one")
    p.add_argument("--tol", default="1/1000000000000", help="target interval width (rational)")
    leaf(height, "point", cmd_height_point, "height of a rational point").add_argument("file")

    ff = groups.add_parser("ff", help="function field Q(t)").add_subparsers(dest="cmd", required=True)
    leaf(ff, "height", cmd_ff_height, "height of a point of P^N(Q(t))").add_argument("file")
    leaf(ff, "closure", cmd_ff_closure, "closure U_X over Q(t)").add_argument("file")
    p = leaf(ff, "verify", cmd_ff_verify, "sampled bound checks (ff-point) or hypersurface checks")
    p.add_argument("file")
    p.add_argument("--samples", type=int, default=10)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-degree", dest="max_degree", type=int, default=3)

    verify = groups.add_parser("verify", help="property suites").add_subparsers(dest="cmd", required=True)
    p = leaf(verify, "all", cmd_verify_all, "run every property")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sizes", default="2..5", help="ambient dimensions LO..HI")
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--only", default=None, help="comma-separated property names")
    return parser


def run_command(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse already printed usage
        return EXIT_INPUT if e.code else EXIT_OK
    if not hasattr(args, "prec"):
        args.prec = None
    if args.prec is not None and args.prec < 16:
        stderr.write(ser.dumps({"error": "precision must be at least 16 bits", "path": None}) + "\n")
        return EXIT_INPUT
    try:
        code, out = args.fn(args)
    except ser.InstanceError as e:
        stderr.write(ser.dumps(e.to_dict()) + "\n")
        return EXIT_INPUT
    except CommandError as e:
        stderr.write(ser.dumps(e.payload) + "\n")
        return EXIT_INPUT
    except (ValueError, ZeroDivisionError, ArithmeticError) as e:
        stderr.write(ser.dumps({"error": f"{type(e).__name__}: {e}", "path": None}) + "\n")
        return EXIT_INPUT
    stdout.write(ser.dumps(out) + "\n")
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
