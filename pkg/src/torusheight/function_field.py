"""Heights over the rational function field Q(t).

Everything here is exact.  A place is either a monic irreducible polynomial
of Q[t] or the point at infinity; a place of degree e stands for the e
conjugate places over the algebraic closure and is weighted accordingly.
Constants of Q play the part that roots of unity play over number fields.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import sympy

from .lattice import Sublattice, kernel_basis, matmul, transpose
from .heights import c_sq
from .torus import (TorusTranslate, obstruction_degree,
                    parametrization_from_kernel, translate_degree)

t = sympy.Symbol("t")

INF = "inf"


def _poly(coeffs_ascending) -> sympy.Poly:
    c = [sympy.Rational(Fraction(a).numerator, Fraction(a).denominator) for a in coeffs_ascending]
    return sympy.Poly(list(reversed(c)) or [0], t, domain="QQ")


def _coeffs(P: sympy.Poly) -> tuple[Fraction, ...]:
    """Ascending rational coefficients, () for the zero polynomial."""
    if P.is_zero:
        return ()
    return tuple(Fraction(int(a.p), int(a.q)) for a in reversed(P.all_coeffs()))


@dataclass(frozen=True)
class RatFun:
    """A rational function num/den in t, coprime, with monic denominator."""

    num: tuple[Fraction, ...]
    den: tuple[Fraction, ...] = (Fraction(1),)

    def __post_init__(self):
        n, d = _poly(self.num), _poly(self.den)
        if d.is_zero:
            raise ZeroDivisionError("zero denominator")
        if n.is_zero:
            object.__setattr__(self, "num", ())
            object.__setattr__(self, "den", (Fraction(1),))
            return
        g = sympy.gcd(n, d)
        n, d = n.quo(g), d.quo(g)
        lc = d.LC()
        n, d = n.quo_ground(lc), d.quo_ground(lc)
        object.__setattr__(self, "num", _coeffs(n))
        object.__setattr__(self, "den", _coeffs(d))

    @classmethod
    def from_poly(cls, P: sympy.Poly | sympy.Expr) -> "RatFun":
        P = sympy.Poly(P, t, domain="QQ")
        return cls(_coeffs(P))

    @classmethod
    def from_expr(cls, expr) -> "RatFun":
        e = sympy.sympify(expr) if isinstance(expr, str) else expr
        n, d = sympy.fraction(sympy.cancel(sympy.together(e)))
        return cls(_coeffs(sympy.Poly(n, t, domain="QQ")), _coeffs(sympy.Poly(d, t, domain="QQ")))

    @classmethod
    def constant(cls, c) -> "RatFun":
        return cls((Fraction(c),))

    @property
    def numerator(self) -> sympy.Poly:
        return _poly(self.num)

    @property
    def denominator(self) -> sympy.Poly:
        return _poly(self.den)

    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def expr(self):
        return self.numerator.as_expr() / self.denominator.as_expr()

    def __mul__(self, other: "RatFun") -> "RatFun":
        return RatFun(_coeffs(self.numerator * other.numerator),
                      _coeffs(self.denominator * other.denominator))

    def __truediv__(self, other: "RatFun") -> "RatFun":
        if other.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RatFun(_coeffs(self.numerator * other.denominator),
                      _coeffs(self.denominator * other.numerator))

    def __pow__(self, m: int) -> "RatFun":
        if m < 0:
            return RatFun((Fraction(1),)) / self ** (-m)
        return RatFun(_coeffs(self.numerator ** m), _coeffs(self.denominator ** m))

    def height(self) -> int:
        """h(1 : xi) = max(deg num, deg den)."""
        if self.is_zero():
            return 0
        return max(len(self.num), len(self.den)) - 1

    def __str__(self) -> str:
        return str(self.expr())


def _monic_factors(P: sympy.Poly) -> dict[tuple[Fraction, ...], int]:
    _, facs = P.factor_list()
    out = {}
    for f, e in facs:
        f = f.monic()
        key = _coeffs(f)
        out[key] = out.get(key, 0) + e
    return out


def _place_degree(place) -> int:
    return 1 if place == INF else len(place) - 1


def _place_sort_key(place):
    return (1, 0, ()) if place == INF else (0, len(place), place)


@dataclass(frozen=True)
class OrdMatrix:
    """Rows are places, columns coordinates: entry (v, j) is ord_v(alpha_j)."""

    places: tuple
    degrees: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]

    def apply(self, lam) -> tuple[int, ...]:
        return tuple(sum(a * l for a, l in zip(row, lam)) for row in self.rows)

    def place_labels(self) -> list[str]:
        return [INF if v == INF else str(_poly(v).as_expr()) for v in self.places]


def ord_matrix(alpha: Sequence[RatFun]) -> OrdMatrix:
    if any(a.is_zero() for a in alpha):
        raise ValueError("zero coordinate has no divisor")
    per = []
    places = set()
    for a in alpha:
        num, den = _monic_factors(a.numerator), _monic_factors(a.denominator)
        ords = dict(num)
        for k, e in den.items():
            ords[k] = ords.get(k, 0) - e
        ords = {k: v for k, v in ords.items() if v}
        inf = (len(a.den) - 1) - (len(a.num) - 1)
        if inf:
            ords[INF] = inf
        per.append(ords)
        places.update(ords)
    order = sorted(places, key=_place_sort_key)
    rows = tuple(tuple(o.get(v, 0) for o in per) for v in order)
    return OrdMatrix(tuple(order), tuple(_place_degree(v) for v in order), rows)


def product_formula_holds(O: OrdMatrix) -> bool:
    ncols = len(O.rows[0]) if O.rows else 0
    return all(sum(d * row[j] for d, row in zip(O.degrees, O.rows)) == 0 for j in range(ncols))


def ff_monomial_height(alpha: Sequence[RatFun], lam) -> int:
    """h(alpha^lambda) from the divisor: sum_v deg(v) max(0, -(O lambda)_v)."""
    O = ord_matrix(alpha)
    return sum(d * max(0, -x) for d, x in zip(O.degrees, O.apply(lam)))


def monomial(alpha: Sequence[RatFun], lam) -> RatFun:
    out = RatFun((Fraction(1),))
    for a, l in zip(alpha, lam):
        if l:
            out = out * a ** int(l)
    return out


# ---------------------------------------------------------------------------
# Points


@dataclass(frozen=True)
class FFPoint:
    """A point (alpha_0 : ... : alpha_N) of P^N(Q(t)) with coprime polynomial coordinates."""

    coordinates: tuple[RatFun, ...]

    def __post_init__(self):
        coords = tuple(self.coordinates)
        if all(c.is_zero() for c in coords):
            raise ValueError("all-zero coordinates")
        L = sympy.Poly(1, t, domain="QQ")
        for c in coords:
            L = sympy.lcm(L, c.denominator)
        polys = [(c.numerator * L).quo(c.denominator) for c in coords]
        g = sympy.Poly(0, t, domain="QQ")
        for P in polys:
            g = sympy.gcd(g, P)
        polys = [P.quo(g) for P in polys]
        lead = next(P.LC() for P in polys if not P.is_zero)
        polys = [P.quo_ground(lead) for P in polys]
        object.__setattr__(self, "coordinates", tuple(RatFun(_coeffs(P)) for P in polys))

    @property
    def ambient(self) -> int:
        return len(self.coordinates) - 1

    @classmethod
    def affine(cls, alpha: Sequence[RatFun]) -> "FFPoint":
        """(1 : alpha_1 : ... : alpha_N)."""
        return cls((RatFun((Fraction(1),)),) + tuple(alpha))


def ff_point_height(P: FFPoint) -> int:
    """max_j deg(alpha_j) after canonicalisation."""
    return max(len(c.num) - 1 for c in P.coordinates if not c.is_zero())


# ---------------------------------------------------------------------------
# Translates


@dataclass(frozen=True)
class FFTranslate:
    """alpha . T where T is the subtorus with lattice ``gamma``."""

    ambient: int
    gamma: Sublattice
    point: tuple[RatFun, ...]

    def __post_init__(self):
        if not self.gamma.saturated:
            raise ValueError("the lattice must be saturated")
        if self.gamma.ambient_dim != self.ambient or len(self.point) != self.ambient:
            raise ValueError("dimension mismatch")
        if any(a.is_zero() for a in self.point):
            raise ValueError("coordinates of a torus point are nonzero")
        object.__setattr__(self, "point", tuple(self.point))

    @property
    def dim(self) -> int:
        return self.ambient - self.gamma.rank


@dataclass(frozen=True)
class FFClosure:
    translate: FFTranslate
    constants: tuple[tuple[tuple[int, ...], RatFun], ...]
    defined_over_k: bool


def ff_torsion_closure(X: FFTranslate) -> FFClosure:
    """U_X: Gamma_X ∩ ker(O), with alpha^lambda constant on its basis."""
    N = X.ambient
    O = ord_matrix(X.point)
    A = X.gamma.basis
    if not O.rows or not A:
        gamma_u = X.gamma
    else:
        OA = matmul(O.rows, transpose(A, N))  # places x rank
        K = kernel_basis(OA, len(A))
        vecs = matmul(K.basis, A) if K.basis else []
        gamma_u = Sublattice.span(vecs, N) if vecs else Sublattice.zero(N)
    if not gamma_u.saturated:
        raise AssertionError("closure lattice must be saturated")
    consts = tuple((lam, monomial(X.point, lam)) for lam in gamma_u.basis)
    if not all(c.is_constant() for _, c in consts):
        raise AssertionError("closure binomials must have constant values")
    return FFClosure(FFTranslate(N, gamma_u, X.point), consts, gamma_u == X.gamma)


def _random_poly(rng: random.Random, max_degree: int, coeff: int = 3) -> RatFun:
    while True:
        deg = rng.randint(0, max_degree)
        c = [Fraction(rng.randint(-coeff, coeff)) for _ in range(deg + 1)]
        if any(c):
            return RatFun(tuple(c))


def sample_point(X: FFTranslate, rng: random.Random, max_degree: int = 3) -> tuple[RatFun, ...]:
    """alpha . phi_B(s) for random nonzero polynomials s_1, ..., s_dim."""
    B = parametrization_from_kernel(X.gamma)
    s = [_random_poly(rng, max_degree) for _ in range(B.p)]
    out = []
    for a, b in zip(X.point, B.vectors):
        val = a
        for si, e in zip(s, b):
            if e:
                val = val * si ** e
        out.append(val)
    return tuple(out)


@dataclass
class FFBoundReport:
    vacuous: bool
    N: int
    p: int | None = None
    n: int | None = None
    deg_u: int | None = None
    omega: int | None = None
    minimizer: tuple | None = None
    bound_sq: Fraction | None = None
    monomial_height: int | None = None
    samples: int = 0
    violations: list = field(default_factory=list)
    heights: list = field(default_factory=list)

    @property
    def holds(self) -> dict:
        kinds = {v["inequality"] for v in self.violations}
        return {"headline": "headline" not in kinds, "monomial_form": "monomial_form" not in kinds}

    def to_dict(self) -> dict:
        return {
            "vacuous": self.vacuous, "N": self.N, "p": self.p, "n": self.n,
            "deg_U": self.deg_u, "omega": self.omega,
            "minimizer": None if self.minimizer is None else list(self.minimizer),
            "bound_sq": None if self.bound_sq is None else str(self.bound_sq),
            "bound_decimal": None if self.bound_sq is None else math.sqrt(self.bound_sq),
            "monomial_height": self.monomial_height, "samples": self.samples,
            "min_sample_height": min(self.heights) if self.heights else None,
            "holds": self.holds, "violations": self.violations,
        }


def ff_verify_bounds(X: FFTranslate, samples: int = 10, seed: int = 0,
                     max_degree: int = 3) -> FFBoundReport:
    """Check the headline bound and the monomial form on sampled points of X.

    With m(Q(t)) = 1 the headline reads h(zeta) >= c(N,p,n) deg U / omega and
    the monomial form h(zeta) >= 2 h(alpha^lambda) / ((N+1) sqrt(p-n) ||lambda||).
    Both are compared after squaring, in exact arithmetic.
    """
    closure = ff_torsion_closure(X)
    N = X.ambient
    if closure.defined_over_k:
        return FFBoundReport(True, N)
    U = closure.translate
    p, n = U.dim, X.dim
    ob = obstruction_degree(TorusTranslate.subtorus(X.gamma), TorusTranslate.subtorus(U.gamma))
    deg_u = translate_degree(U.gamma)
    csq = c_sq(N, p, n)
    h_lam = ff_monomial_height(X.point, ob.minimizer)
    rep = FFBoundReport(False, N, p, n, deg_u, ob.omega, ob.minimizer,
                        csq * deg_u * deg_u / (ob.omega * ob.omega), h_lam)
    rng = random.Random(seed)
    for i in range(samples):
        zeta = sample_point(X, rng, max_degree)
        h = ff_point_height(FFPoint.affine(zeta))
        rep.samples += 1
        rep.heights.append(h)
        if h * h * ob.omega ** 2 < csq * deg_u ** 2:
            rep.violations.append({"inequality": "headline", "sample": i, "height": h,
                                   "point": [str(z) for z in zeta]})
        if h * h * (N + 1) ** 2 * (p - n) * ob.norm_sq < 4 * h_lam * h_lam:
            rep.violations.append({"inequality": "monomial_form", "sample": i, "height": h,
                                   "point": [str(z) for z in zeta]})
    return rep


# ---------------------------------------------------------------------------
# Hypersurfaces and the functional Bezout identity


def xvars(N: int):
    return sympy.symbols(f"x0:{N + 1}")


@dataclass(frozen=True)
class HyperForm:
    """A form in x_0..x_N with coefficients in Q[t], primitive in t."""

    N: int
    expr: sympy.Expr
    normalized: bool = field(default=False, compare=False)

    def __post_init__(self):
        xs = xvars(self.N)
        P = sympy.Poly(sympy.expand(self.expr), *xs, t, domain="QQ")
        if P.is_zero:
            raise ValueError("zero form")
        degs = {sum(m[: self.N + 1]) for m in P.monoms()}
        if len(degs) != 1:
            raise ValueError("form must be homogeneous in x")
        content = t_content(P, self.N)
        if content.degree() > 0:
            P = sympy.Poly(sympy.cancel(P.as_expr() / content.as_expr()), *xs, t, domain="QQ")
            object.__setattr__(self, "normalized", True)
        object.__setattr__(self, "expr", P.as_expr())

    def poly(self) -> sympy.Poly:
        return sympy.Poly(self.expr, *xvars(self.N), t, domain="QQ")

    @property
    def deg_t(self) -> int:
        return self.poly().degree(t)

    @property
    def deg_x(self) -> int:
        return sum(self.poly().monoms()[0][: self.N + 1])


def t_content(P: sympy.Poly, N: int) -> sympy.Poly:
    """gcd over Q[t] of the coefficients of P as a polynomial in x_0..x_N."""
    coeffs = {}
    for m, c in P.terms():
        coeffs.setdefault(m[: N + 1], 0)
        coeffs[m[: N + 1]] += c * t ** m[N + 1]
    g = sympy.Poly(0, t, domain="QQ")
    for c in coeffs.values():
        g = sympy.gcd(g, sympy.Poly(c, t, domain="QQ"))
    return g.monic() if not g.is_zero else g


def hyperform_invariants(f: HyperForm) -> tuple[int, int]:
    """(h, deg) of div(f) in P^N: the t-degree and the x-degree."""
    return f.deg_t, f.deg_x


@dataclass
class SplitReport:
    form: str
    deg_t: int
    height_sum: int

    @property
    def holds(self) -> bool:
        return self.deg_t == self.height_sum


def ff_bezout_split_check(roots: Sequence[RatFun]) -> SplitReport:
    """For f = prod(d_i x1 - n_i x0), deg_t f equals sum_i h(1 : r_i)."""
    x0, x1 = xvars(1)
    f = sympy.Integer(1)
    for r in roots:
        f = f * (r.denominator.as_expr() * x1 - r.numerator.as_expr() * x0)
    F = HyperForm(1, f)
    return SplitReport(str(F.expr), F.deg_t, sum(r.height() for r in roots))


def is_irreducible_form(f: HyperForm) -> bool:
    """Irreducibility over Q(t), decided by exact factorisation in Q[t, x]."""
    _, facs = f.poly().factor_list()
    nontrivial = [(g, e) for g, e in facs if g.total_degree() > 0]
    return len(nontrivial) == 1 and nontrivial[0][1] == 1


@dataclass
class EssminReport:
    h: int
    deg: int
    trials: int = 0
    resampled: int = 0
    section_degrees: list = field(default_factory=list)
    witnesses: list = field(default_factory=list)
    generic_equalities: int = 0
    bezout_violations: int = 0
    witness_failures: int = 0

    @property
    def lower_inequality_holds(self) -> bool:
        """h/deg >= deg U / omega.  A curve not defined over k has U = P^2
        (degree 1) and omega = deg, so this reads h/deg >= 1/deg."""
        if self.h == 0:
            return True  # defined over k: omega is infinite
        return Fraction(self.h, self.deg) >= Fraction(1, self.deg)

    @property
    def holds(self) -> bool:
        return self.bezout_violations == 0 and self.witness_failures == 0

    def to_dict(self) -> dict:
        return {"h": self.h, "deg": self.deg, "h_over_deg": str(Fraction(self.h, self.deg)),
                "trials": self.trials, "resampled": self.resampled,
                "section_t_degrees": self.section_degrees,
                "witness_heights": [str(w) for w in self.witnesses],
                "generic_equalities": self.generic_equalities,
                "holds": self.holds, "lower_inequality_holds": self.lower_inequality_holds}


def ff_essmin_upper_sample(f: HyperForm, trials: int = 5, seed: int = 0,
                           coeff: int = 5) -> EssminReport:
    """Cut the plane curve f = 0 by random k-rational lines.

    On each line u P + v Q the section is the binary form g(u, v) = f(uP + vQ).
    After removing its t-content its t-degree is the height of the 0-cycle,
    which is at most h = deg_t f (with equality generically).  Each factor of
    (u,v)-degree d_i and t-degree e_i is a Galois orbit of points of height
    e_i / d_i, so the smallest such ratio witnesses a point of height <= h/deg.
    """
    if f.N != 2:
        raise ValueError("plane curves only (N = 2)")
    if not is_irreducible_form(f):
        raise ValueError("the form is reducible over Q(t)")
    h, d = hyperform_invariants(f)
    rep = EssminReport(h, d)
    rng = random.Random(seed)
    u, v = sympy.symbols("u v")
    xs = xvars(2)
    while rep.trials < trials:
        P = [rng.randint(-coeff, coeff) for _ in range(3)]
        Q = [rng.randint(-coeff, coeff) for _ in range(3)]
        if sympy.Matrix([P, Q]).rank() < 2:
            rep.resampled += 1
            continue
        g = sympy.expand(f.expr.subs({x: P[i] * u + Q[i] * v for i, x in enumerate(xs)},
                                     simultaneous=True))
        if g == 0:
            rep.resampled += 1
            continue
        G = sympy.Poly(g, u, v, t, domain="QQ")
        G = sympy.Poly(sympy.cancel(G.as_expr() / t_content(G, 1).as_expr()), u, v, t, domain="QQ")
        e = G.degree(t)
        rep.trials += 1
        rep.section_degrees.append(e)
        if e > h:
            rep.bezout_violations += 1
        if e == h:
            rep.generic_equalities += 1
        _, facs = G.factor_list()
        ratios = []
        for g_i, _ in facs:
            di = sum(g_i.monoms()[0][:2])
            if di:
                ratios.append(Fraction(g_i.degree(t), di))
        w = min(ratios)
        rep.witnesses.append(w)
        if w > Fraction(h, d):
            rep.witness_failures += 1
    return rep
