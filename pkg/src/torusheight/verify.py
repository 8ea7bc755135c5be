"""Seeded property suite over every module.

Each property draws its instances from its own ``random.Random`` seeded by
``"{seed}:{name}"``, so properties are independent of one another and of
execution order.  A property fails on the first counterexample it records
or on any exception raised while checking an instance.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from . import randgen as rg
from .function_field import (FFPoint, RatFun, ff_bezout_split_check,
                             ff_essmin_upper_sample, ff_monomial_height, ff_point_height,
                             ff_torsion_closure, ff_verify_bounds, ord_matrix,
                             product_formula_holds)
from .heights import (AlgebraicNumber, _absolute_coordinates, cor15_bound, is_root_of_unity,
                      mahler_height, rational_point_height, thm13_bound)
from .lattice import (QuotientLattice, Sublattice, covolume_sq, elementary_divisors,
                      kernel_basis, quotient_norm_sq, saturate)
from .polytope import RatPolytope, minkowski_sum, mixed_volume, prism_degree
from .reals import RadicalLog, certified_le
from .torus import (CharacterPresentation, TorusTranslate,
                    degree_bounds_eq6, degree_routes, hadamard_product,
                    kernel_from_parametrization, minkowski_check, obstruction_degree,
                    obstruction_upper_bounds, parametrization_from_kernel, sandwich_ratio,
                    torsion_closure, translate_degree)


@dataclass(frozen=True)
class Sizes:
    """Ambient dimensions ``n_min..n_max`` and instances drawn per property."""

    n_min: int = 2
    n_max: int = 5
    instances: int = 100

    @classmethod
    def parse(cls, text: str, instances: int = 100) -> "Sizes":
        lo, _, hi = text.partition("..")
        lo, hi = int(lo), int(hi or lo)
        if not 1 <= lo <= hi:
            raise ValueError("sizes must read LO..HI with 1 <= LO <= HI")
        if instances < 1:
            raise ValueError("need at least one instance per property")
        return cls(lo, hi, instances)


@dataclass
class PropertyResult:
    name: str
    instances: int = 0
    failures: int = 0
    counterexamples: list = field(default_factory=list)
    skipped: int = 0

    def to_dict(self) -> dict:
        return {"name": self.name, "instances": self.instances, "failures": self.failures,
                "skipped": self.skipped, "counterexamples": self.counterexamples[:3]}


class Skip(Exception):
    """The drawn instance is outside the property's hypotheses."""


_PROPERTIES: list[tuple[str, Callable]] = []


def prop(name: str):
    def deco(fn):
        _PROPERTIES.append((name, fn))
        return fn
    return deco


def _m(rows) -> list[list[int]]:
    return [list(r) for r in rows]


def _dim(rng, sizes: Sizes, cap: int | None = None) -> int:
    hi = sizes.n_max if cap is None else min(cap, sizes.n_max)
    return rng.randint(min(sizes.n_min, hi), hi)


def _random_lattice(rng, N, rank=None, bound=4):
    return rg.random_saturated(rng, N, rng.randint(0, N) if rank is None else rank, bound)


def _nested(rng, sizes, cap=None):
    """Saturated Gamma_Y ⊊ Gamma_X in Z^N with N in range."""
    N = _dim(rng, sizes, cap)
    while True:
        gx, gy = rg.random_nested_pair(rng, max_n=N, max_p=min(N, 4))
        if gx.ambient_dim == N:
            return gx, gy


# ---------------------------------------------------------------------------
# lattice_core


@prop("saturate_idempotent")
def _(rng, sizes):
    N = _dim(rng, sizes)
    rows = rg.random_matrix(rng, rng.randint(1, N), N, 4)
    g = Sublattice.span(rows, N) if any(any(r) for r in rows) else Sublattice.zero(N)
    s = saturate(g)
    return saturate(s) == s, {"rows": rows}


@prop("kernel_basis_saturated")
def _(rng, sizes):
    N = _dim(rng, sizes)
    M = rg.random_matrix(rng, rng.randint(1, N), N, 4)
    K = kernel_basis(M, N)
    ok = K.saturated and all(d == 1 for d in elementary_divisors(K.basis, N)) if K.basis else True
    ok = ok and all(sum(a * b for a, b in zip(row, v)) == 0 for row in M for v in K.basis)
    return ok, {"matrix": M}


@prop("covolume_index_identity")
def _(rng, sizes):
    N = _dim(rng, sizes)
    while True:
        rows = rg.random_matrix(rng, rng.randint(1, N), N, 4)
        g = Sublattice.span(rows, N) if any(any(r) for r in rows) else None
        if g is not None:
            break
    s = saturate(g)
    return covolume_sq(s) * g.index_in_saturation() ** 2 == covolume_sq(g), {"rows": rows}


@prop("quotient_norm_periodic_positive")
def _(rng, sizes):
    gx, gy = _nested(rng, sizes)
    q = QuotientLattice(gx, gy)
    coeffs = [rng.randint(-3, 3) for _ in range(gx.rank)]
    lam = [sum(c * b[j] for c, b in zip(coeffs, gx.basis)) for j in range(gx.ambient_dim)]
    shift = [0] * gx.ambient_dim
    for b in gy.basis:
        c = rng.randint(-3, 3)
        shift = [s + c * x for s, x in zip(shift, b)]
    n0 = quotient_norm_sq(q, lam)
    n1 = quotient_norm_sq(q, [a + b for a, b in zip(lam, shift)])
    ok = n0 == n1 and quotient_norm_sq(q, shift) == 0 and (n0 == 0) == (tuple(lam) in gy)
    return ok, {"gamma_x": _m(gx.basis), "gamma_y": _m(gy.basis), "lambda": lam}


@prop("first_minimum_below_minkowski")
def _(rng, sizes):
    gx, gy = _nested(rng, sizes)
    _, ok = minkowski_check(QuotientLattice(gx, gy))
    return ok, {"gamma_x": _m(gx.basis), "gamma_y": _m(gy.basis)}


@prop("quotient_covolume_multiplicative")
def _(rng, sizes):
    gx, gy = _nested(rng, sizes)
    q = QuotientLattice(gx, gy)
    return q.covolume_sq() == Fraction(covolume_sq(gx), covolume_sq(gy)), \
        {"gamma_x": _m(gx.basis), "gamma_y": _m(gy.basis)}


# ---------------------------------------------------------------------------
# polytope


def _random_polytope(rng, p, npts=None, bound=2):
    npts = npts or rng.randint(1, p + 3)
    return RatPolytope.hull([[rng.randint(-bound, bound) for _ in range(p)] for _ in range(npts)], p)


def _pt(Q):
    return [[str(x) for x in v] for v in Q.vertices]


@prop("mixed_volume_symmetric")
def _(rng, sizes):
    p = rng.randint(1, 3)
    Qs = [_random_polytope(rng, p) for _ in range(p)]
    vals = {mixed_volume(*perm) for perm in itertools.permutations(Qs)}
    return len(vals) == 1, {"polytopes": [_pt(Q) for Q in Qs]}


@prop("mixed_volume_multilinear")
def _(rng, sizes):
    p = rng.randint(1, 3)
    Q1, Q1b = _random_polytope(rng, p), _random_polytope(rng, p)
    rest = [_random_polytope(rng, p) for _ in range(p - 1)]
    lhs = mixed_volume(minkowski_sum(Q1, Q1b), *rest)
    rhs = mixed_volume(Q1, *rest) + mixed_volume(Q1b, *rest)
    return lhs == rhs, {"q1": _pt(Q1), "q1_prime": _pt(Q1b), "rest": [_pt(Q) for Q in rest]}


@prop("mixed_volume_monotone")
def _(rng, sizes):
    p = rng.randint(1, 3)
    Q1 = _random_polytope(rng, p)
    Q1b = RatPolytope.hull(list(Q1.vertices) + [[rng.randint(-2, 2) for _ in range(p)]
                                                for _ in range(rng.randint(1, 3))], p)
    rest = [_random_polytope(rng, p) for _ in range(p - 1)]
    ok = Q1.issubset(Q1b) and mixed_volume(Q1, *rest) <= mixed_volume(Q1b, *rest)
    return ok, {"q1": _pt(Q1), "q1_prime": _pt(Q1b), "rest": [_pt(Q) for Q in rest]}


@prop("segment_mixed_volume_equals_prism")
def _(rng, sizes):
    p = rng.randint(1, 4)
    Q = _random_polytope(rng, p, rng.randint(1, p + 2 if p == 4 else p + 3))
    v = [0] * p
    while not any(v):
        v = [rng.randint(-3, 3) for _ in range(p)]
    mv = mixed_volume(RatPolytope.segment([0] * p, v), *([Q] * (p - 1)))
    return mv == prism_degree(Q, v), {"polytope": _pt(Q), "v": v}


@prop("mixed_volume_integral")
def _(rng, sizes):
    p = rng.randint(1, 3)
    Qs = [_random_polytope(rng, p) for _ in range(p)]
    mv = mixed_volume(*Qs)
    return mv >= 0 and mv.denominator == 1, {"polytopes": [_pt(Q) for Q in Qs]}


# ---------------------------------------------------------------------------
# torus_model


@prop("parametrization_round_trip")
def _(rng, sizes):
    N = rng.randint(1, 6)
    g = _random_lattice(rng, N)
    return kernel_from_parametrization(parametrization_from_kernel(g)) == g, {"gamma": _m(g.basis)}


def _divisor_instance(rng, sizes):
    N = _dim(rng, sizes)
    p = rng.randint(1, min(N, 4))
    gamma = rg.random_saturated(rng, N, N - p, 4)
    return gamma, rg.random_vector_outside(rng, gamma, 4)


@prop("dual_route_degree")
def _(rng, sizes):
    gamma, lam = _divisor_instance(rng, sizes)
    r = degree_routes(gamma, lam)
    return r["mixed_volume"] == r["prism"], {"gamma_y": _m(gamma.basis), "lambda": list(lam)}


@prop("divisor_degree_sandwich")
def _(rng, sizes):
    gamma, lam = _divisor_instance(rng, sizes)
    lo, mid, hi = sandwich_ratio(gamma, lam)
    return lo <= mid <= hi, {"gamma_y": _m(gamma.basis), "lambda": list(lam)}


@prop("degree_covolume_sandwich")
def _(rng, sizes):
    N = _dim(rng, sizes)
    gamma = rg.random_saturated(rng, N, rng.randint(0, N - 1), 4)
    try:
        degree_bounds_eq6(gamma)
    except AssertionError:
        return False, {"gamma_y": _m(gamma.basis)}
    return True, {}


@prop("obstruction_upper_bounds")
def _(rng, sizes):
    gx, gy = _nested(rng, sizes)
    r = obstruction_upper_bounds(TorusTranslate.subtorus(gx), TorusTranslate.subtorus(gy))
    ok = r["holds_c3"] and r["holds_coarse"]
    return ok, {"gamma_x": _m(gx.basis), "gamma_y": _m(gy.basis), "omega": r["omega"]}


def _random_presentation(rng, N, r, values):
    E = tuple(tuple(rng.randint(-3, 3) for _ in range(r)) for _ in range(N))
    m = rng.choice([1, 2, 3, 4, 6])
    tors = tuple(rng.randint(0, m - 1) for _ in range(N))
    labels = tuple(f"g{i}" for i in range(r))
    if values is None:
        return CharacterPresentation(N, m, tors, labels, E, None, True)
    return CharacterPresentation(N, m, tors, labels, E, tuple(values))


@prop("obstruction_independent_of_generator_values")
def _(rng, sizes):
    N = _dim(rng, sizes, 4)
    gamma = rg.random_saturated(rng, N, rng.randint(1, N), 3)
    r = rng.randint(1, 2)
    P1 = _random_presentation(rng, N, r, rng.sample([2, 3, 5, 7], r))
    P2 = CharacterPresentation(N, P1.modulus, P1.torsion, P1.labels, P1.exponents,
                               tuple(Fraction(x) for x in rng.sample([11, 13, Fraction(2, 3)], r)))
    X1, X2 = TorusTranslate(N, gamma, P1), TorusTranslate(N, gamma, P2)
    U1, U2 = torsion_closure(X1).translate, torsion_closure(X2).translate
    if U1.gamma == X1.gamma:
        o1 = o2 = None
    else:
        o1 = obstruction_degree(X1, U1)
        o2 = obstruction_degree(X2, U2)
        o1, o2 = (o1.omega, o1.minimizer), (o2.omega, o2.minimizer)
    return U1.gamma == U2.gamma and o1 == o2, {"gamma": _m(gamma.basis), "exponents": _m(P1.exponents)}


@prop("degree_translation_invariant")
def _(rng, sizes):
    N = _dim(rng, sizes)
    gamma = _random_lattice(rng, N)
    r = rng.randint(0, 2)
    X1 = TorusTranslate(N, gamma, _random_presentation(rng, N, r, None))
    X2 = TorusTranslate(N, gamma, _random_presentation(rng, N, r, None))
    ok = translate_degree(X1) == translate_degree(X2) == translate_degree(TorusTranslate.subtorus(gamma))
    return ok, {"gamma": _m(gamma.basis)}


@prop("torsion_closure_free_part")
def _(rng, sizes):
    N = _dim(rng, sizes)
    gamma = rg.random_saturated(rng, N, rng.randint(1, N), 3)
    P = _random_presentation(rng, N, rng.randint(1, 2), None)
    X = TorusTranslate(N, gamma, P)
    U = torsion_closure(X).translate
    if not U.gamma.saturated:
        return False, {"gamma": _m(gamma.basis), "exponents": _m(P.exponents)}
    for _ in range(10):
        c = [rng.randint(-3, 3) for _ in range(gamma.rank)]
        lam = [sum(a * b[j] for a, b in zip(c, gamma.basis)) for j in range(N)]
        if tuple(lam) in U.gamma:
            continue
        if P.character(lam).is_torsion:
            return False, {"gamma": _m(gamma.basis), "exponents": _m(P.exponents), "lambda": lam}
    return True, {}


@prop("positive_hadamard_square_closure_is_subtorus")
def _(rng, sizes):
    N = _dim(rng, sizes)
    coords = rg.random_rational_point(rng, N, bases=rng.randint(1, 3), positive=True)
    X = rg.random_translate_through(rng, coords)
    Y = hadamard_product(X, X)
    ok = torsion_closure(X).is_subtorus and torsion_closure(Y).is_subtorus
    return ok, {"coordinates": [str(c) for c in coords], "gamma": _m(X.gamma.basis)}


# ---------------------------------------------------------------------------
# heights_numberfield


_CYCLOTOMIC_CACHE: dict[int, AlgebraicNumber] = {}


def _cyclotomic(n: int) -> AlgebraicNumber:
    import sympy
    if n not in _CYCLOTOMIC_CACHE:
        P = sympy.Poly(sympy.cyclotomic_poly(n, sympy.Symbol("x")), sympy.Symbol("x"))
        _CYCLOTOMIC_CACHE[n] = AlgebraicNumber(tuple(int(c) for c in P.all_coeffs()))
    return _CYCLOTOMIC_CACHE[n]


@prop("kronecker")
def _(rng, sizes):
    if rng.random() < 0.5:
        P = _cyclotomic(rng.randint(1, 40))
    else:
        d = rng.randint(1, 5)
        coeffs = [rng.choice([1, -1, 2, 3])] + [rng.randint(-2, 2) for _ in range(d)]
        if coeffs[-1] == 0:
            coeffs[-1] = 1
        g = math.gcd(*coeffs)
        P = AlgebraicNumber(tuple(c // g for c in coeffs))
    h = mahler_height(P)
    torsion = is_root_of_unity(P)
    ok = (h.hi == 0) if torsion else (h.lo > 0)
    return ok, {"coefficients": list(P.coefficients)}


@prop("height_of_powers")
def _(rng, sizes):
    q = Fraction(rng.choice([-1, 1]) * rng.randint(1, 30), rng.randint(1, 30))
    if abs(q) == 1:
        q = Fraction(2, 3)
    k = rng.randint(1, 6)
    h1, hk = rational_point_height([q]), rational_point_height([q ** k])
    kh1 = h1.scaled(k)
    return certified_le(hk, kh1) and certified_le(kh1, hk), {"q": str(q), "k": k}


@prop("rational_height_floor_log2")
def _(rng, sizes):
    bound = rng.randint(2, 12)
    two = RadicalLog.log(2)
    for a in range(-bound, bound + 1):
        for b in range(1, bound + 1):
            q = Fraction(a, b)
            if q in (0, 1, -1):
                continue
            h = rational_point_height([q])
            if max(abs(q.numerator), q.denominator) == 2 and h != two:
                return False, {"q": str(q)}
            if not certified_le(two, h):
                return False, {"q": str(q)}
    return True, {}


@prop("golden_ratio_height")
def _(rng, sizes):
    from .heights import SCHINZEL
    P = AlgebraicNumber(rng.choice([(1, -1, -1), (1, 1, -1)]))
    h = mahler_height(P, Fraction(1, 10**13))
    ok = h.width < Fraction(1, 10**12) and certified_le(h.lo, SCHINZEL) \
        and certified_le(SCHINZEL, h.hi)
    return ok, {"coefficients": list(P.coefficients)}


def _points_on(X, rng, count=3):
    """Rational points alpha * phi_B(s) of X (absolute values of coordinates)."""
    alpha = _absolute_coordinates(X)
    B = X.parametrization()
    for _ in range(count):
        s = [Fraction(rng.choice([1, 2, 3, 5]), rng.choice([1, 2, 3])) ** rng.choice([1, -1])
             for _ in range(B.p)]
        yield [a * math.prod((si ** e for si, e in zip(s, b)), start=Fraction(1))
               for a, b in zip(alpha, B.vectors)]


@prop("height_bounds_hold_on_rational_points")
def _(rng, sizes):
    N = _dim(rng, sizes, 4)
    coords = rg.random_rational_point(rng, N, bases=rng.randint(1, 3))
    X = rg.random_translate_through(rng, coords)
    info = {"coordinates": [str(c) for c in coords], "gamma": _m(X.gamma.basis)}
    reports = [thm13_bound(X), cor15_bound(X)]
    for rep in reports:
        if not all(v for v in rep.holds.values() if v is not None):
            return False, {**info, "holds": rep.holds}
    for xi in _points_on(X, rng):
        h = rational_point_height(xi)
        for rep in reports:
            for name, b in rep.bounds.items():
                if name != "actual_height" and not certified_le(b, h):
                    return False, {**info, "point": [str(v) for v in xi], "bound": name}
    return True, {}


# ---------------------------------------------------------------------------
# function_field


@prop("product_formula")
def _(rng, sizes):
    N = _dim(rng, sizes, 4)
    alpha = [rg.random_ratfun(rng) for _ in range(N)]
    alpha = [a if not a.is_zero() else RatFun.constant(1) for a in alpha]
    return product_formula_holds(ord_matrix(alpha)), {"alpha": [str(a) for a in alpha]}


@prop("ff_height_subadditive_and_homogeneous")
def _(rng, sizes):
    xi, eta = rg.random_ratfun(rng), rg.random_ratfun(rng)
    if xi.is_zero() or eta.is_zero():
        raise Skip
    m = rng.randint(-4, 4)
    ok = (xi * eta).height() <= xi.height() + eta.height() and (xi ** m).height() == abs(m) * xi.height()
    return ok, {"xi": str(xi), "eta": str(eta), "m": m}


@prop("ff_height_zero_iff_constant_point")
def _(rng, sizes):
    N = _dim(rng, sizes, 4)
    if rng.random() < 0.4:
        f = rg.random_ratfun(rng)
        f = f if not f.is_zero() else RatFun.constant(1)
        coords = [f * RatFun.constant(rng.choice([1, -2, Fraction(1, 3)])) for _ in range(N + 1)]
    else:
        coords = [rg.random_ratfun(rng) for _ in range(N + 1)]
    if all(c.is_zero() for c in coords):
        raise Skip
    ref = next(c for c in coords if not c.is_zero())
    rational = all((c / ref).is_constant() for c in coords)
    h = ff_point_height(FFPoint(tuple(coords)))
    return (h == 0) == rational, {"coordinates": [str(c) for c in coords]}


@prop("ff_closure_monomial_heights")
def _(rng, sizes):
    X = rg.random_ff_translate(rng, max_n=min(4, sizes.n_max))
    cl = ff_torsion_closure(X)
    U = cl.translate
    info = {"point": [str(a) for a in X.point], "gamma": _m(X.gamma.basis)}
    if not U.gamma.saturated:
        return False, info
    for _ in range(10):
        c = [rng.randint(-3, 3) for _ in range(X.gamma.rank)]
        lam = [sum(a * b[j] for a, b in zip(c, X.gamma.basis)) for j in range(X.ambient)]
        if tuple(lam) not in U.gamma and ff_monomial_height(X.point, lam) < 1:
            return False, {**info, "lambda": lam}
    return True, {}


@prop("ff_bounds_hold")
def _(rng, sizes):
    X = rg.random_ff_translate(rng, max_n=min(4, sizes.n_max))
    rep = ff_verify_bounds(X, samples=5, seed=rng.randrange(2**32))
    return not rep.violations, {"point": [str(a) for a in X.point], "gamma": _m(X.gamma.basis),
                                "violations": rep.violations[:2]}


@prop("ff_bezout_split_identity")
def _(rng, sizes):
    roots = [rg.random_ratfun(rng) for _ in range(rng.randint(1, 4))]
    roots = [r for r in roots if not r.is_zero()] or [RatFun.constant(1)]
    return ff_bezout_split_check(roots).holds, {"roots": [str(r) for r in roots]}


@prop("ff_essmin_witness")
def _(rng, sizes):
    f = rg.random_plane_curve(rng)
    rep = ff_essmin_upper_sample(f, trials=2, seed=rng.randrange(2**32))
    return rep.holds and rep.lower_inequality_holds, {"form": str(f.expr)}


# ---------------------------------------------------------------------------


def property_names() -> list[str]:
    return [name for name, _ in _PROPERTIES]


def _essmin_count(sizes: Sizes) -> int:
    # plane-curve sampling is the slow kernel; a fifth of the budget suffices
    return max(1, sizes.instances // 5)


def run_property(name: str, seed: int = 0, sizes: Sizes = Sizes()) -> PropertyResult:
    fn = dict(_PROPERTIES)[name]
    rng = random.Random(f"{seed}:{name}")
    res = PropertyResult(name)
    count = _essmin_count(sizes) if name == "ff_essmin_witness" else sizes.instances
    for i in range(count):
        try:
            ok, info = fn(rng, sizes)
        except Skip:
            res.skipped += 1
            continue
        except Exception as e:  # noqa: BLE001 - any crash is a counterexample
            ok, info = False, {"exception": f"{type(e).__name__}: {e}"}
        res.instances += 1
        if not ok:
            res.failures += 1
            res.counterexamples.append({"instance": i, **info})
    return res


def verify_suite(seed: int = 0, sizes: Sizes = Sizes(), only: list[str] | None = None,
                 timings: bool = False) -> dict:
    """Run the named properties (all by default) and gather a report.

    The report is a pure function of ``seed`` and ``sizes`` unless
    ``timings`` is requested.
    """
    names = only or property_names()
    unknown = set(names) - set(property_names())
    if unknown:
        raise ValueError(f"unknown properties: {', '.join(sorted(unknown))}")
    results, times = [], {}
    for name in names:
        t0 = time.perf_counter()
        results.append(run_property(name, seed, sizes))
        times[name] = round(time.perf_counter() - t0, 3)
    report = {
        "seed": seed,
        "sizes": {"n_min": sizes.n_min, "n_max": sizes.n_max, "instances": sizes.instances},
        "properties": [r.to_dict() for r in results],
        "failures": sum(r.failures for r in results),
        "passed": all(r.failures == 0 for r in results),
    }
    if timings:
        report["seconds"] = times
    return report
