"""JSON instances in, JSON reports out.

Integers travel as JSON numbers or decimal strings, rationals as "p/q"
strings, integer matrices as arrays of arrays of decimal strings.  Every
parse failure raises ``InstanceError`` carrying a JSON path such as
``$.generators[1].value``.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .function_field import FFPoint, FFTranslate, HyperForm, RatFun, t, xvars
from .lattice import Sublattice
from .polytope import RatPolytope
from .torus import CharacterPresentation, TorusTranslate

KINDS = ("torus", "point", "ff-point", "hyperform", "bound-query")

_INT_RE = re.compile(r"[+-]?\d+")
_RAT_RE = re.compile(r"([+-]?\d+)(?:/(\d+))?")


class InstanceError(ValueError):
    """Schema violation at a JSON path."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message

    def to_dict(self) -> dict:
        return {"error": self.message, "path": self.path}


@dataclass(frozen=True)
class Instance:
    kind: str
    payload: Any
    seed: int | None = None
    prec: int | None = None
    extra: dict | None = None


# ---------------------------------------------------------------------------
# scalars


def parse_int(x, path: str) -> int:
    if isinstance(x, bool):
        raise InstanceError(path, "expected an integer, got a boolean")
    if isinstance(x, int):
        return x
    if isinstance(x, str) and _INT_RE.fullmatch(x.strip()):
        return int(x)
    raise InstanceError(path, f"expected an integer, got {x!r}")


def parse_rational(x, path: str) -> Fraction:
    if isinstance(x, bool):
        raise InstanceError(path, "expected a rational, got a boolean")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        m = _RAT_RE.fullmatch(x.strip())
        if m:
            num, den = int(m.group(1)), int(m.group(2) or 1)
            if den == 0:
                raise InstanceError(path, f"zero denominator in {x!r}")
            return Fraction(num, den)
    raise InstanceError(path, f"expected a rational \"p/q\", got {x!r}")


def _list(x, path: str) -> list:
    if not isinstance(x, list):
        raise InstanceError(path, f"expected an array, got {type(x).__name__}")
    return x


def _obj(x, path: str) -> dict:
    if not isinstance(x, dict):
        raise InstanceError(path, f"expected an object, got {type(x).__name__}")
    return x


def _field(obj: dict, key: str, path: str):
    if key not in obj:
        raise InstanceError(f"{path}.{key}", "missing field")
    return obj[key]


def parse_matrix(x, path: str, ncols: int | None = None) -> list[list[int]]:
    rows = []
    for i, row in enumerate(_list(x, path)):
        r = [parse_int(v, f"{path}[{i}][{j}]") for j, v in enumerate(_list(row, f"{path}[{i}]"))]
        if ncols is not None and len(r) != ncols:
            raise InstanceError(f"{path}[{i}]", f"expected {ncols} entries, got {len(r)}")
        rows.append(r)
    return rows


def parse_lattice(x, N: int, path: str) -> Sublattice:
    rows = parse_matrix(x, path, N)
    try:
        gamma = Sublattice.span(rows, N) if rows else Sublattice.zero(N)
    except ValueError as e:
        raise InstanceError(path, str(e)) from None
    if not gamma.saturated:
        raise InstanceError(path, "lattice is not saturated")
    return gamma


# ---------------------------------------------------------------------------
# payloads


def parse_torus(obj, path: str = "$") -> TorusTranslate:
    obj = _obj(obj, path)
    N = parse_int(_field(obj, "ambient", path), f"{path}.ambient")
    if N < 1:
        raise InstanceError(f"{path}.ambient", "ambient dimension must be >= 1")
    gamma = parse_lattice(obj.get("gamma_basis", []), N, f"{path}.gamma_basis")
    tors = _obj(obj.get("torsion", {"modulus": 1}), f"{path}.torsion")
    m = parse_int(tors.get("modulus", 1), f"{path}.torsion.modulus")
    if m < 1:
        raise InstanceError(f"{path}.torsion.modulus", "modulus must be >= 1")
    texp = [parse_int(v, f"{path}.torsion.exponents[{i}]")
            for i, v in enumerate(_list(tors.get("exponents", [0] * N), f"{path}.torsion.exponents"))]
    if len(texp) != N:
        raise InstanceError(f"{path}.torsion.exponents", f"expected {N} entries")
    gens = _list(obj.get("generators", []), f"{path}.generators")
    labels, values = [], []
    for i, g in enumerate(gens):
        g = _obj(g, f"{path}.generators[{i}]")
        lab = _field(g, "label", f"{path}.generators[{i}]")
        if not isinstance(lab, str) or not lab:
            raise InstanceError(f"{path}.generators[{i}].label", "label must be a non-empty string")
        labels.append(lab)
        values.append(parse_rational(g["value"], f"{path}.generators[{i}].value")
                      if "value" in g else None)
    if any(v is None for v in values) and any(v is not None for v in values):
        raise InstanceError(f"{path}.generators", "give values for all generators or for none")
    E = parse_matrix(obj.get("exponent_matrix", [[] for _ in range(N)]),
                     f"{path}.exponent_matrix", len(labels))
    if len(E) != N:
        raise InstanceError(f"{path}.exponent_matrix", f"expected {N} rows, one per coordinate")
    asserted = obj.get("independence_asserted", False)
    if not isinstance(asserted, bool):
        raise InstanceError(f"{path}.independence_asserted", "expected a boolean")
    vals = tuple(values) if labels and values[0] is not None else None
    if labels and vals is None and not asserted:
        raise InstanceError(f"{path}.generators",
                            "generators without values need \"independence_asserted\": true")
    try:
        pres = CharacterPresentation(N, m, tuple(texp), tuple(labels),
                                     tuple(map(tuple, E)), vals, asserted)
    except ValueError as e:
        raise InstanceError(f"{path}.generators", str(e)) from None
    return TorusTranslate(N, gamma, pres)


def parse_point(obj, path: str = "$") -> TorusTranslate:
    """A rational point, optionally spread to a translate by ``gamma_basis``."""
    obj = _obj(obj, path)
    coords = [parse_rational(c, f"{path}.coordinates[{i}]")
              for i, c in enumerate(_list(_field(obj, "coordinates", path), f"{path}.coordinates"))]
    if not coords:
        raise InstanceError(f"{path}.coordinates", "need at least one coordinate")
    for i, c in enumerate(coords):
        if c == 0:
            raise InstanceError(f"{path}.coordinates[{i}]", "torus coordinates are nonzero")
    P = TorusTranslate.from_rational_point(coords)
    if "gamma_basis" in obj:
        return TorusTranslate(P.ambient, parse_lattice(obj["gamma_basis"], P.ambient,
                                                       f"{path}.gamma_basis"), P.point)
    return P


def parse_ratfun(obj, path: str) -> RatFun:
    obj = _obj(obj, path)
    num = [parse_rational(c, f"{path}.num[{i}]")
           for i, c in enumerate(_list(_field(obj, "num", path), f"{path}.num"))]
    den = [parse_rational(c, f"{path}.den[{i}]")
           for i, c in enumerate(_list(obj.get("den", ["1"]), f"{path}.den"))]
    if not any(den):
        raise InstanceError(f"{path}.den", "zero denominator")
    return RatFun(tuple(num) or (Fraction(0),), tuple(den))


@dataclass(frozen=True)
class FFInstance:
    coordinates: tuple[RatFun, ...]
    gamma: Sublattice | None
    projective: bool

    def point(self) -> FFPoint:
        return FFPoint(self.coordinates) if self.projective else FFPoint.affine(self.coordinates)

    def translate(self) -> FFTranslate:
        if self.projective:
            raise InstanceError("$.projective", "a translate needs affine torus coordinates")
        N = len(self.coordinates)
        gamma = self.gamma if self.gamma is not None else Sublattice.full(N)
        return FFTranslate(N, gamma, self.coordinates)


def parse_ff_point(obj, path: str = "$") -> FFInstance:
    obj = _obj(obj, path)
    coords = tuple(parse_ratfun(c, f"{path}.coordinates[{i}]")
                   for i, c in enumerate(_list(_field(obj, "coordinates", path), f"{path}.coordinates")))
    projective = obj.get("projective", False)
    if not isinstance(projective, bool):
        raise InstanceError(f"{path}.projective", "expected a boolean")
    if not coords:
        raise InstanceError(f"{path}.coordinates", "need at least one coordinate")
    if projective and all(c.is_zero() for c in coords):
        raise InstanceError(f"{path}.coordinates", "all-zero projective point")
    if not projective:
        for i, c in enumerate(coords):
            if c.is_zero():
                raise InstanceError(f"{path}.coordinates[{i}]", "torus coordinates are nonzero")
    gamma = None
    if "gamma_basis" in obj:
        gamma = parse_lattice(obj["gamma_basis"], len(coords), f"{path}.gamma_basis")
    return FFInstance(coords, gamma, projective)


def _safe_parse(text: str, symbols, path: str):
    local = {str(s): s for s in symbols}
    # no builtins and no Float: only integers, rationals and the declared symbols
    glob = {"Integer": sympy.Integer, "Rational": sympy.Rational, "Symbol": sympy.Symbol,
            "__builtins__": {}}
    if not isinstance(text, str):
        raise InstanceError(path, "expected an expression string")
    try:
        expr = parse_expr(text, local_dict=local, global_dict=glob,
                          transformations=standard_transformations + (convert_xor,))
    except Exception as e:  # noqa: BLE001 - sympy raises a zoo of types
        raise InstanceError(path, f"cannot parse expression: {e}") from None
    if not isinstance(expr, sympy.Expr):
        raise InstanceError(path, "not a polynomial expression")
    stray = expr.free_symbols - set(symbols)
    if stray:
        names = ", ".join(sorted(map(str, stray)))
        raise InstanceError(path, f"unknown symbols {names}; allowed: {', '.join(map(str, symbols))}")
    return expr


def parse_hyperform(obj, path: str = "$") -> HyperForm:
    obj = _obj(obj, path)
    N = parse_int(_field(obj, "N", path), f"{path}.N")
    if N < 1:
        raise InstanceError(f"{path}.N", "N must be >= 1")
    expr = _safe_parse(_field(obj, "form", path), tuple(xvars(N)) + (t,), f"{path}.form")
    if not expr.is_polynomial(*xvars(N), t):
        raise InstanceError(f"{path}.form", "form must be polynomial in x and t")
    try:
        return HyperForm(N, expr)
    except ValueError as e:
        raise InstanceError(f"{path}.form", str(e)) from None


def parse_polynomial(text: str, path: str = "$") -> list[int]:
    """Integer coefficients (highest degree first) of a polynomial in x."""
    x = sympy.Symbol("x")
    expr = _safe_parse(text, (x,), path)
    if not expr.is_polynomial(x):
        raise InstanceError(path, "not a polynomial in x")
    P = sympy.Poly(expr, x, domain="QQ")
    if P.degree() < 1:
        raise InstanceError(path, "need a polynomial of degree >= 1")
    coeffs = [Fraction(int(c.p), int(c.q)) for c in P.all_coeffs()]
    den = math.lcm(*(c.denominator for c in coeffs))
    return [int(c * den) for c in coeffs]


@dataclass(frozen=True)
class BoundQuery:
    translate: TorusTranslate
    m_k: str


def _parse_translate_like(obj, path: str) -> TorusTranslate:
    obj = _obj(obj, path)
    kind = obj.get("kind", "torus")
    if kind == "torus":
        return parse_torus(obj, path)
    if kind == "point":
        return parse_point(obj, path)
    raise InstanceError(f"{path}.kind", f"expected torus or point, got {kind!r}")


def parse_bound_query(obj, path: str = "$") -> BoundQuery:
    obj = _obj(obj, path)
    X = _parse_translate_like(_field(obj, "translate", path), f"{path}.translate")
    m_k = obj.get("m_k", "log2")
    if not isinstance(m_k, str):
        raise InstanceError(f"{path}.m_k", "expected a name or a rational string")
    return BoundQuery(X, m_k)


_PARSERS = {"torus": parse_torus, "point": parse_point, "ff-point": parse_ff_point,
            "hyperform": parse_hyperform, "bound-query": parse_bound_query}


def parse_instance(text: str) -> Instance:
    """Validate a JSON instance and build its payload."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError("$", f"invalid JSON: {e.msg} at line {e.lineno}") from None
    obj = _obj(obj, "$")
    kind = obj.get("kind")
    if kind not in _PARSERS:
        raise InstanceError("$.kind", f"unknown kind {kind!r}; allowed kinds: {', '.join(KINDS)}")
    seed = parse_int(obj["seed"], "$.seed") if "seed" in obj else None
    prec = parse_int(obj["precision"], "$.precision") if "precision" in obj else None
    if prec is not None and prec < 16:
        raise InstanceError("$.precision", "precision must be at least 16 bits")
    return Instance(kind, _PARSERS[kind](obj, "$"), seed, prec)


# ---------------------------------------------------------------------------
# output


def int_matrix(rows) -> list[list[str]]:
    return [[str(int(x)) for x in row] for row in rows]


def rational(x) -> str:
    return str(Fraction(x))


def ratfun(f: RatFun) -> dict:
    return {"num": [rational(c) for c in f.num], "den": [rational(c) for c in f.den]}


def polytope(Q: RatPolytope) -> list[list[str]]:
    return [[rational(c) for c in v] for v in Q.vertices]


def torus_to_dict(X: TorusTranslate) -> dict:
    P = X.point
    gens = []
    for i, lab in enumerate(P.labels):
        g = {"label": lab}
        if P.values is not None:
            g["value"] = rational(P.values[i])
        gens.append(g)
    return {"kind": "torus", "ambient": X.ambient, "gamma_basis": int_matrix(X.gamma.basis),
            "torsion": {"modulus": P.modulus, "exponents": [str(a) for a in P.torsion]},
            "generators": gens, "exponent_matrix": int_matrix(P.exponents),
            "independence_asserted": P.independence_asserted}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
