"""Weil heights over number fields and the explicit lower-bound constants.

Heights of algebraic numbers come from the Mahler measure, evaluated on
isolating rectangles of the roots with outward rounding.  Heights of
rational points are exact logarithms of rationals.  Every bound is built
from exact pieces (``Radical``, ``RadicalLog``) where the algebra allows it
and from certified enclosures otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import mpmath
import sympy

from .lattice import QuotientLattice, first_minimum, gamma_half_enclosure
from .reals import (DEFAULT_PREC, Radical, RadicalLog, RationalInterval,
                    certified_le, enclose, fmt, ivctx, lohi, rat_enclosure,
                    to_fraction_interval)
from .torus import (INFINITE, TorusTranslate, c3_enclosure, hadamard_product,
                    obstruction_degree, torsion_closure, translate_degree)

_x = sympy.Symbol("x")


@dataclass(frozen=True)
class AlgebraicNumber:
    """An algebraic number given by an integer polynomial (highest degree first)."""

    coefficients: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(a) for a in self.coefficients)
        while c and c[0] == 0:
            c = c[1:]
        if not c:
            raise ValueError("zero polynomial")
        if len(c) < 2:
            raise ValueError("a defining polynomial has degree >= 1")
        if c[-1] == 0:
            raise ValueError("polynomial divisible by x: 0 is not in G_m")
        if math.gcd(*c) != 1:
            raise ValueError("polynomial must be content-free")
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def from_expr(cls, expr: str) -> "AlgebraicNumber":
        P = sympy.Poly(sympy.sympify(expr), _x)
        return cls(tuple(int(a) for a in P.all_coeffs()))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def poly(self) -> sympy.Poly:
        return sympy.Poly(list(self.coefficients), _x)


def _cyclotomic_orders(d: int):
    """All n with phi(n) <= d.  phi(n) >= sqrt(n/2) bounds the search by 2 d^2."""
    return [n for n in range(1, 2 * d * d + 3) if sympy.totient(n) <= d]


def is_root_of_unity(P: AlgebraicNumber) -> bool:
    """True iff P is +-1 times a product of cyclotomic polynomials."""
    q = P.poly()
    for n in _cyclotomic_orders(P.degree):
        phi = sympy.Poly(sympy.cyclotomic_poly(n, _x), _x)
        while q.degree() >= phi.degree():
            quo, rem = q.div(phi)
            if not rem.is_zero:
                break
            q = quo
        if q.degree() == 0:
            break
    return q.degree() == 0 and abs(q.LC()) == 1


def _log_plus_bounds(lo_sq: Fraction, hi_sq: Fraction, prec: int) -> tuple[Fraction, Fraction]:
    """Rational enclosure of [log+ sqrt(lo_sq), log+ sqrt(hi_sq)]."""
    ctx = ivctx(prec)
    lo = to_fraction_interval(ctx.log(rat_enclosure(max(lo_sq, 1), prec)) / 2).lo
    hi = to_fraction_interval(ctx.log(rat_enclosure(max(hi_sq, 1), prec)) / 2).hi
    return lo, hi


def _abs_sq_range(x0: Fraction, x1: Fraction, y0: Fraction, y1: Fraction):
    def rng(a, b):
        lo = Fraction(0) if a <= 0 <= b else min(a * a, b * b)
        return lo, max(a * a, b * b)
    xl, xh = rng(x0, x1)
    yl, yh = rng(y0, y1)
    return xl + yl, xh + yh


def _isolated_log_measure(f: sympy.Poly, eps: Fraction, prec: int):
    """sum of log+|z| over the roots, from sympy isolating rectangles."""
    real, cplx = f.intervals(all=True, eps=sympy.Rational(eps.numerator, eps.denominator))
    lo_total, hi_total = Fraction(0), Fraction(0)
    boxes = [((Fraction(str(a)), Fraction(str(b)), Fraction(0), Fraction(0)), m)
             for (a, b), m in real]
    for (z0, z1), m in cplx:
        x0, y0 = (Fraction(str(v)) for v in (sympy.re(z0), sympy.im(z0)))
        x1, y1 = (Fraction(str(v)) for v in (sympy.re(z1), sympy.im(z1)))
        boxes.append(((x0, x1, y0, y1), m))
    for box, mult in boxes:
        lo, hi = _log_plus_bounds(*_abs_sq_range(*box), prec)
        lo_total += mult * lo
        hi_total += mult * hi
    return lo_total, hi_total


def _disc_log_measure(coeffs: Sequence[int], prec: int):
    """sum of log+|z| over the roots, certified by Weierstrass inclusion discs.

    With approximations z_i and corrections W_i = f(z_i) / (a prod_{j != i}
    (z_i - z_j)), every zero lies in the union of the discs |z - z_i| <= n|W_i|
    and a disc disjoint from the others holds exactly one zero.  Returns None
    when the discs overlap at this precision.
    """
    n = len(coeffs) - 1
    try:
        with mpmath.workprec(prec):
            approx = mpmath.polyroots(coeffs, maxsteps=100 + 10 * n, extraprec=prec)
    except mpmath.libmp.NoConvergence:
        return None
    ctx = ivctx(prec)
    zs = [ctx.mpc(ctx.mpf(mpmath.re(z)), ctx.mpf(mpmath.im(z))) for z in approx]
    radii = []
    for i, z in enumerate(zs):
        val = ctx.mpf(0)
        for c in coeffs:
            val = val * z + c
        den = ctx.mpf(coeffs[0])
        for j, w in enumerate(zs):
            if j != i:
                den = den * (z - w)
        # endpoints become exact rationals so no step below rounds
        dlo = to_fraction_interval(abs(den)).lo
        if dlo <= 0:
            return None
        radii.append(n * to_fraction_interval(abs(val)).hi / dlo)
    for i in range(n):
        for j in range(i + 1, n):
            if to_fraction_interval(abs(zs[i] - zs[j])).lo <= radii[i] + radii[j]:
                return None
    lo_total, hi_total = Fraction(0), Fraction(0)
    for z, r in zip(zs, radii):
        m = to_fraction_interval(abs(z))
        lo = m.lo - r
        lo, hi = _log_plus_bounds(lo * lo if lo > 0 else Fraction(0), (m.hi + r) ** 2, prec)
        lo_total += lo
        hi_total += hi
    return lo_total, hi_total


def mahler_height(P: AlgebraicNumber, tol: Fraction = Fraction(1, 10**12),
                  prec: int = DEFAULT_PREC) -> RationalInterval:
    """Certified enclosure of log M(P) / deg P.

    For irreducible P this is the absolute logarithmic Weil height of each
    root.  Cyclotomic factors contribute exactly zero; the other factors are
    bounded on isolating rectangles refined until the width is below ``tol``.
    """
    tol = Fraction(tol)
    d = P.degree
    lead, factors = P.poly().factor_list()
    parts = []  # (poly, multiplicity) for non-cyclotomic factors
    for f, e in factors:
        coeffs = tuple(int(a) for a in f.all_coeffs())
        if math.gcd(*coeffs) == 1 and is_root_of_unity(AlgebraicNumber(coeffs)):
            continue
        parts.append((f, e))
    eps = Fraction(1, 10**4)
    rounds = 0
    while True:
        ctx = ivctx(prec)
        base = to_fraction_interval(ctx.log(rat_enclosure(abs(int(P.coefficients[0])), prec)))
        lo, hi = base.lo, base.hi
        for f, e in parts:
            # the leading coefficient of P already accounts for all factor leads
            coeffs = [int(a) for a in f.all_coeffs()]
            part = _disc_log_measure(coeffs, prec) if rounds < 4 else None
            if part is None:
                part = _isolated_log_measure(f, eps, prec)
            lo += e * part[0]
            hi += e * part[1]
        out = RationalInterval(lo / d, hi / d)
        if out.width <= tol:
            return RationalInterval(max(out.lo, Fraction(0)), out.hi)
        eps /= 1000
        prec *= 2
        rounds += 1


def rational_point_height(alpha: Sequence) -> RadicalLog:
    """Height of (1 : alpha_1 : ... : alpha_N) as log of an exact rational.

    The denominator part sum_p log p max_j(0, -v_p(alpha_j)) is log of the
    lcm of the denominators; the archimedean part is log max(1, |alpha_j|).
    """
    alpha = [Fraction(a) for a in alpha]
    if any(a == 0 for a in alpha):
        raise ValueError("zero coordinate: not a point of G_m^N")
    den = math.lcm(*(a.denominator for a in alpha)) if alpha else 1
    return RadicalLog.log(den * max([Fraction(1)] + [abs(a) for a in alpha]))


# ---------------------------------------------------------------------------
# Constants


@dataclass(frozen=True)
class Constant:
    """A named positive real: exact when ``exact`` is set, else an enclosure rule."""

    name: str
    exact: Radical | RadicalLog | Fraction | None = None
    rule: Callable | None = field(default=None, compare=False)

    def enclose(self, prec: int = DEFAULT_PREC):
        return enclose(self.exact, prec) if self.exact is not None else self.rule(prec)

    def __float__(self):
        lo, hi = lohi(self.enclose(64))
        return float((lo + hi) / 2)

    def symbolic(self) -> str:
        return self.exact.symbolic() if self.exact is not None and hasattr(self.exact, "symbolic") \
            else (str(self.exact) if self.exact is not None else self.name)


def _schinzel(prec):
    ctx = ivctx(prec)
    return ctx.log((1 + ctx.sqrt(5)) / 2) / 2


SCHINZEL = Constant("1/2*log((1+sqrt(5))/2)", rule=_schinzel)
ABELIAN = Constant("log(5)/12", exact=RadicalLog(Radical(Fraction(1, 12)), 5))
LOG2 = Constant("log(2)", exact=RadicalLog.log(2))


def dobrowolski(D: int, c=1) -> Constant:
    """c/D * (log log 3D / log 2D)^3."""
    c = Fraction(c)

    def rule(prec):
        ctx = ivctx(prec)
        return rat_enclosure(c / D, prec) * (ctx.log(ctx.log(3 * D)) / ctx.log(2 * D)) ** 3
    return Constant(f"dobrowolski(D={D}, c={c})", rule=rule)


def amoroso_delsinne(D: int, c=1) -> Constant:
    """c/D * (log log 3D)^3 / (log 2D)^4, D the degree over the abelian closure."""
    c = Fraction(c)

    def rule(prec):
        ctx = ivctx(prec)
        return rat_enclosure(c / D, prec) * ctx.log(ctx.log(3 * D)) ** 3 / ctx.log(2 * D) ** 4
    return Constant(f"amoroso_delsinne(D={D}, c={c})", rule=rule)


def classical_lower_bounds(D: int, c=1) -> dict[str, Constant]:
    if D < 1 or Fraction(c) <= 0:
        raise ValueError("need D >= 1 and c > 0")
    return {"dobrowolski": dobrowolski(D, c), "amoroso_delsinne": amoroso_delsinne(D, c),
            "abelian": ABELIAN, "schinzel": SCHINZEL}


M_K_NAMES = {"log2": LOG2, "schinzel": SCHINZEL, "amoroso-dvornicich": ABELIAN}


def m_k_constant(choice) -> Constant:
    """Resolve an m(K) argument: a known name, a Constant, or a rational."""
    if isinstance(choice, Constant):
        return choice
    if isinstance(choice, str) and choice in M_K_NAMES:
        return M_K_NAMES[choice]
    if isinstance(choice, str) and choice.startswith("dobrowolski:"):
        return dobrowolski(int(choice.split(":", 1)[1]))
    q = Fraction(choice)
    if q < 0:
        raise ValueError("m(K) must be non-negative")
    return Constant(str(q), exact=q)


def c_sq(N: int, p: int, n: int) -> Fraction:
    """c(N,p,n)^2 = 4 / ((N+1)^2 (p-n) C(N,p) C(N,p-1))."""
    return Fraction(4, (N + 1) ** 2 * (p - n) * math.comb(N, p) * math.comb(N, p - 1))


def _c4_sharp(N, p, n) -> Constant:
    """sqrt(pi) / ((N+1) sqrt(k)) (C(N,n) C(N,p) Gamma(1+k/2)^2)^(-1/(2k)).

    For k = 1 the pi cancels against Gamma(3/2)^2 = pi/4 and the value is
    the radical 2 / ((N+1) sqrt(C(N,n) C(N,p))).
    """
    k = p - n
    if k == 1:
        exact = Radical(Fraction(4, (N + 1) ** 2 * math.comb(N, n) * math.comb(N, p)), 2)
        return Constant("c4(N,p,n)", exact=exact)

    def rule(prec):
        ctx = ivctx(prec)
        g = gamma_half_enclosure(k, prec)
        inner = rat_enclosure(math.comb(N, n) * math.comb(N, p), prec) * g * g
        return ctx.sqrt(ctx.pi) / ((N + 1) * ctx.sqrt(k)) * ctx.exp(-ctx.log(inner) / (2 * k))
    return Constant("c4(N,p,n)", rule=rule)


def structural_constants(N: int, p: int, n: int, prec: int = DEFAULT_PREC) -> dict:
    """The proof constants at (N, p, n), with their universal floors checked."""
    if not 0 <= n < p <= N:
        raise ValueError("need 0 <= n < p <= N")
    c = Radical(c_sq(N, p, n), 2)
    c1_floor = Radical(Fraction(1, N ** 3 * 4 ** N), 2)
    c3_coarse = Radical(16 ** N * N ** 3, 2)
    c4_floor = Fraction(1, 2 ** N * N * N)
    c4 = _c4_sharp(N, p, n)
    c3 = lambda pr: c3_enclosure(N, p, n, pr)
    out = {
        "c": Constant("c(N,p,n)", exact=c),
        "c_sq": c_sq(N, p, n),
        "c1_floor": Constant("N^(-3/2) 2^(-N)", exact=c1_floor),
        "c2": Constant("log(5)/12 c(N,p,n)", exact=ABELIAN.exact.scaled(c)),
        "c3": Constant("c3(N,p,n)", rule=c3),
        "c3_coarse": Constant("4^N N^(3/2)", exact=c3_coarse),
        "c4_sharp": c4,
        "c4_floor": Constant("2^(-N) N^(-2)", exact=c4_floor),
    }
    out["checks"] = {
        "c_above_floor": certified_le(c1_floor, c, prec),
        "c3_below_coarse": certified_le(c3, c3_coarse, prec),
        "c4_above_floor": certified_le(c4_floor, c4, prec),
    }
    return out


# ---------------------------------------------------------------------------
# Bound reports


@dataclass
class BoundReport:
    N: int
    p: int
    n: int
    m_k: Constant
    deg_u: int
    omega: int | float
    deg_x: int
    bounds: dict = field(default_factory=dict)
    holds: dict = field(default_factory=dict)
    conditional: bool = False
    notes: list = field(default_factory=list)
    minimizer: tuple | None = None

    def to_dict(self, prec: int = DEFAULT_PREC) -> dict:
        return {
            "N": self.N, "p": self.p, "n": self.n,
            "m_K": {"source": self.m_k.name, **fmt(self.m_k, prec)},
            "deg_U": self.deg_u, "deg_X": self.deg_x,
            "omega": None if self.omega == INFINITE else self.omega,
            "minimizer": None if self.minimizer is None else list(self.minimizer),
            "bounds": {k: fmt(v, prec) for k, v in self.bounds.items()},
            "holds": dict(self.holds), "conditional_on_independence": self.conditional,
            "notes": list(self.notes),
        }


def _scaled(m_k: Constant, factor: Radical):
    """factor * m_K, exact when m_K is exact."""
    if isinstance(m_k.exact, RadicalLog):
        return m_k.exact.scaled(factor)
    if isinstance(m_k.exact, Fraction):
        return factor * Radical(m_k.exact) if m_k.exact else Fraction(0)
    return lambda prec: factor.enclose(prec) * m_k.enclose(prec)


def monomial_height(X: TorusTranslate, lam) -> RadicalLog | None:
    """h(alpha^lambda) when the character value is rational (torsion ignored)."""
    P = X.point
    if P.values is None:
        return None
    cv = P.character(lam)
    val = Fraction(1)
    for v, e in zip(P.values, cv.exponents):
        val *= v ** e
    return rational_point_height([val])


def _absolute_coordinates(X: TorusTranslate):
    P = X.point
    if P.values is None:
        return None
    out = []
    for row in P.exponents:
        v = Fraction(1)
        for g, e in zip(P.values, row):
            v *= g ** e
        out.append(v)
    return out


def _actual_height(X: TorusTranslate):
    absolute = _absolute_coordinates(X)
    return None if absolute is None else rational_point_height([abs(a) for a in absolute])


def thm13_bound(X: TorusTranslate, m_k="log2", prec: int = DEFAULT_PREC) -> BoundReport:
    """Lower bound c(N,p,n) m(K) deg(U_X) / omega(X; U_X) for heights on X.

    With rational generator values the report also carries the sharper form
    2/((N+1) sqrt(p-n)) h(alpha^lambda) / ||lambda||_perp at the minimiser,
    and the height of the presented point of X for comparison.  Heights are
    insensitive to torsion, so the torsion part of alpha is ignored there.
    """
    m_k = m_k_constant(m_k)
    closure = torsion_closure(X)
    U = closure.translate
    N, p, n = X.ambient, U.dim, X.dim
    rep = BoundReport(N, p, n, m_k, translate_degree(U), INFINITE, translate_degree(X),
                      conditional=closure.conditional)
    actual = _actual_height(X)
    if actual is not None:
        rep.bounds["actual_height"] = actual
    if n == p:
        rep.notes.append("X is a torsion variety: the bound degenerates to 0")
        rep.bounds["headline"] = Fraction(0)
        if actual is not None:
            rep.holds["headline"] = True
        return rep
    ob = obstruction_degree(X, U)
    rep.omega, rep.minimizer = ob.omega, ob.minimizer
    headline = _scaled(m_k, Radical(c_sq(N, p, n), 2) * Radical(Fraction(rep.deg_u, ob.omega)))
    rep.bounds["headline"] = headline
    if actual is not None:
        rep.holds["headline"] = certified_le(headline, actual, prec)
    h_lam = monomial_height(X, ob.minimizer)
    if h_lam is not None:
        factor = Radical(Fraction(4, (N + 1) ** 2 * (p - n)) / ob.norm_sq, 2)
        monomial = h_lam.scaled(factor)
        rep.bounds["monomial_form"] = monomial
        if actual is not None:
            rep.holds["monomial_form"] = certified_le(monomial, actual, prec)
        # the monomial form dominates the headline whenever h(alpha^lambda) >= m(K)
        rep.holds["headline_below_monomial_form"] = certified_le(headline, monomial, prec) \
            if certified_le(m_k, h_lam, prec) else None
    return rep


def cor15_bound(X: TorusTranslate, m_k="log2", prec: int = DEFAULT_PREC) -> BoundReport:
    """2^-N N^-2 m(K) (deg U_X / deg X)^(1/codim), with the sharper intermediate forms.

    ``first_minimum`` is 2/((N+1)sqrt(k)) m(K) / ||lambda_1||_perp for the
    shortest class, ``sharp`` replaces ||lambda_1|| by its Minkowski-type
    bound in degrees, and ``printed`` uses the universal constant.
    """
    m_k = m_k_constant(m_k)
    closure = torsion_closure(X)
    U = closure.translate
    N, p, n = X.ambient, U.dim, X.dim
    rep = BoundReport(N, p, n, m_k, translate_degree(U), INFINITE, translate_degree(X),
                      conditional=closure.conditional)
    actual = _actual_height(X)
    if actual is not None:
        rep.bounds["actual_height"] = actual
    if n == p:
        rep.notes.append("deg U = deg X with equal dimension: exponent undefined, bound 0")
        rep.bounds["printed"] = Fraction(0)
        if actual is not None:
            rep.holds["printed"] = True
        return rep
    k = p - n
    ratio = Radical(Fraction(rep.deg_u, rep.deg_x), k)
    printed = _scaled(m_k, ratio * Fraction(1, 2 ** N * N * N))
    c4 = _c4_sharp(N, p, n)
    if c4.exact is not None:
        sharp = _scaled(m_k, c4.exact * ratio)
    else:
        def sharp(pr):
            return c4.enclose(pr) * ratio.enclose(pr) * m_k.enclose(pr)

    q = QuotientLattice(X.gamma, U.gamma)
    lam1, norm1 = first_minimum(q)
    first = _scaled(m_k, Radical(Fraction(4, (N + 1) ** 2 * k) / norm1, 2))
    rep.minimizer = lam1
    rep.bounds.update({"printed": printed, "sharp": sharp, "first_minimum": first})
    rep.holds["printed_below_sharp"] = certified_le(printed, sharp, prec)
    rep.holds["sharp_below_first_minimum"] = certified_le(sharp, first, prec)
    if actual is not None:
        for name in ("printed", "sharp", "first_minimum"):
            rep.holds[name] = certified_le(rep.bounds[name], actual, prec)
    return rep


def field_specific_bound(X: TorusTranslate, field_kind: str, conjugate: TorusTranslate | None = None,
                         prec: int = DEFAULT_PREC) -> BoundReport:
    """Specialisations of the headline bound to real, abelian and CM fields.

    ``real`` and ``abelian`` substitute the uniform constants for m(K).  For
    ``cm`` the caller supplies the complex-conjugate presentation; the bound
    is then c(N,p,n)/4 log((1+sqrt 5)/2) deg(G_X)/omega(X Xbar; G_X), with
    G_X the torsion closure of the Hadamard product X Xbar.
    """
    if field_kind == "real":
        return thm13_bound(X, SCHINZEL, prec)
    if field_kind == "abelian":
        return thm13_bound(X, ABELIAN, prec)
    if field_kind != "cm":
        raise ValueError("field_kind is one of real, abelian, cm")
    if conjugate is None:
        raise ValueError("a CM bound needs the conjugate presentation")
    Y = hadamard_product(X, conjugate)
    closure = torsion_closure(Y)
    G = closure.translate
    N, p, n = X.ambient, G.dim, Y.dim
    quarter = Constant("1/4*log((1+sqrt(5))/2)", rule=lambda pr: _schinzel(pr) / 2)
    rep = BoundReport(N, p, n, quarter, translate_degree(G), INFINITE, translate_degree(Y),
                      conditional=closure.conditional)
    rep.holds["closure_is_subtorus"] = closure.is_subtorus
    if n == p:
        rep.bounds["headline"] = Fraction(0)
        rep.notes.append("X Xbar is a torsion variety: the bound degenerates to 0")
        return rep
    ob = obstruction_degree(Y, G)
    rep.omega, rep.minimizer = ob.omega, ob.minimizer
    rep.bounds["headline"] = _scaled(quarter, Radical(c_sq(N, p, n), 2)
                                     * Radical(Fraction(rep.deg_u, ob.omega)))
    return rep
