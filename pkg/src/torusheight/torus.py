"""Translates of subtori of G_m^N.

A translate is a saturated lattice Gamma together with a character on Z^N,
  rho(lambda) = zeta_m^(a . lambda) * prod_i g_i^((E^T lambda)_i),
where the g_i are declared multiplicatively independent generators.  The
variety is {x : x^lambda = rho(lambda) for lambda in Gamma}.  Whether
rho(lambda) is a root of unity is then the exact test E^T lambda = 0.

Degrees only ever depend on lattices, so every degree routine takes the
lattice (or reads it off a translate) and never looks at character values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import sympy

from .lattice import (QuotientLattice, Sublattice,
                      _smith, as_matrix, hermite_normal_form, canonical_choice, covolume_sq,
                      dot, elementary_divisors, first_minimum, kernel_basis,
                      matmul, rational_rank, short_vectors, transpose)
from .polytope import (RatPolytope, facet_weights, hull_volume, mixed_volume,
                       prism_degree, segment_mixed_volume)
from .reals import DEFAULT_PREC, certified_le, ivctx, lohi, rat_enclosure

INFINITE = math.inf


# ---------------------------------------------------------------------------
# Parametrizations


@dataclass(frozen=True)
class Parametrization:
    """The monomial map s -> (s^b_1, ..., s^b_N) from G_m^p to G_m^N."""

    ambient: int
    p: int
    vectors: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        vecs = as_matrix(self.vectors)
        if len(vecs) != self.ambient or any(len(b) != self.p for b in vecs):
            raise ValueError(f"need {self.ambient} vectors in Z^{self.p}")
        object.__setattr__(self, "vectors", vecs)

    @property
    def matrix(self) -> tuple[tuple[int, ...], ...]:
        """M_B as a p x N matrix (columns are the b_j)."""
        return as_matrix(transpose(self.vectors, self.p)) if self.p else ()

    def apply(self, lam) -> tuple[int, ...]:
        return tuple(sum(l * b[i] for l, b in zip(lam, self.vectors)) for i in range(self.p))

    def generates(self) -> bool:
        """True when the b_j generate Z^p."""
        if self.p == 0:
            return True
        divs = elementary_divisors(self.vectors, self.p)
        return len(divs) == self.p and all(d == 1 for d in divs)

    def polytope(self) -> RatPolytope:
        """Q_B = conv(0, b_1, ..., b_N)."""
        return RatPolytope.hull([(0,) * self.p] + list(self.vectors), self.p)


def _require_saturated(gamma: Sublattice):
    if not gamma.saturated:
        raise ValueError("the lattice must be saturated")


@lru_cache(maxsize=2048)
def parametrization_from_kernel(gamma: Sublattice) -> Parametrization:
    """A parametrization B with L_B = Z^p whose kernel is ``gamma``."""
    _require_saturated(gamma)
    N, r = gamma.ambient_dim, gamma.rank
    _, _, V, _ = _smith(gamma.basis, N)
    # lambda -> (lambda^T V)[r:] kills exactly the first r rows of V^-1;
    # the HNF of M_B is a canonical unimodular change of coordinates on Z^p
    M = hermite_normal_form([[V[j][i] for j in range(N)] for i in range(r, N)], N)
    return Parametrization(N, N - r, tuple(tuple(row[j] for row in M) for j in range(N)))


def kernel_from_parametrization(B: Parametrization) -> Sublattice:
    if not B.generates():
        raise ValueError("the vectors b_j must generate Z^p")
    if B.p == 0:
        return Sublattice.full(B.ambient)
    return kernel_basis(B.matrix, B.ambient)


# ---------------------------------------------------------------------------
# Characters


@lru_cache(maxsize=4096)
def _factor(q: Fraction) -> dict[int, int]:
    out = dict(sympy.factorint(abs(q.numerator)))
    for p, e in sympy.factorint(q.denominator).items():
        out[p] = out.get(p, 0) - e
    return out


@dataclass(frozen=True)
class CharValue:
    """zeta^torsion * prod g_i^exponents_i, with zeta = exp(2 pi i torsion)."""

    torsion: Fraction
    exponents: tuple[int, ...]
    labels: tuple[str, ...] = ()

    @property
    def is_torsion(self) -> bool:
        return not any(self.exponents)

    @property
    def is_one(self) -> bool:
        return self.torsion == 0 and self.is_torsion

    def __str__(self) -> str:
        parts = []
        if self.torsion:
            parts.append(f"zeta_{self.torsion.denominator}^{self.torsion.numerator}")
        for lab, e in zip(self.labels, self.exponents):
            if e:
                parts.append(f"{lab}^{e}" if e != 1 else lab)
        return " * ".join(parts) if parts else "1"


@dataclass(frozen=True)
class CharacterPresentation:
    """Torsion part plus a monomial in declared generators, one per coordinate.

    Coordinate j is zeta_m^(a_j) * prod_i g_i^(E[j][i]).  When ``values`` are
    supplied the generators must be multiplicatively independent modulo
    torsion, which is checked through prime valuations.  Without values the
    independence is taken on trust and ``conditional`` is True.
    """

    ambient: int
    modulus: int = 1
    torsion: tuple[int, ...] = ()
    labels: tuple[str, ...] = ()
    exponents: tuple[tuple[int, ...], ...] = ()
    values: tuple[Fraction, ...] | None = None
    independence_asserted: bool = False

    def __post_init__(self):
        N, r = self.ambient, len(self.labels)
        if self.modulus < 1:
            raise ValueError("torsion modulus must be >= 1")
        tors = tuple(int(x) for x in self.torsion) or (0,) * N
        if len(tors) != N:
            raise ValueError("one torsion exponent per coordinate")
        E = as_matrix(self.exponents) if self.exponents else tuple((0,) * r for _ in range(N))
        if len(E) != N or any(len(row) != r for row in E):
            raise ValueError(f"exponent matrix must be {N} x {r}")
        if len(set(self.labels)) != r:
            raise ValueError("generator labels must be distinct")
        # smallest modulus carrying the same torsion angles
        m = self.modulus
        g = math.gcd(m, *tors)
        m //= g
        tors = tuple((t // g) % m for t in tors)
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "torsion", tors)
        object.__setattr__(self, "exponents", E)
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.values is not None:
            vals = tuple(Fraction(v) for v in self.values)
            if len(vals) != r:
                raise ValueError("one value per generator")
            if any(v == 0 for v in vals):
                raise ValueError("generator values must be nonzero")
            object.__setattr__(self, "values", vals)
            if not self.independence_verified():
                raise ValueError("generator values are multiplicatively dependent modulo torsion")

    @property
    def generator_count(self) -> int:
        return len(self.labels)

    def independence_verified(self) -> bool:
        if self.values is None:
            return False
        primes = sorted({p for v in self.values for p in _factor(v)})
        rows = [[_factor(v).get(p, 0) for p in primes] for v in self.values]
        return rational_rank(rows) == len(rows)

    @property
    def conditional(self) -> bool:
        """Outputs rest on an unchecked independence assertion."""
        return self.values is None and self.generator_count > 0

    def character(self, lam) -> CharValue:
        lam = [int(x) for x in lam]
        t = Fraction(dot(self.torsion, lam) % self.modulus, self.modulus)
        e = tuple(sum(l * row[i] for l, row in zip(lam, self.exponents))
                  for i in range(self.generator_count))
        return CharValue(t, e, self.labels)

    def rational_value(self, lam) -> Fraction | None:
        """rho(lambda) as a rational number, when values are known and real."""
        if self.values is None:
            return None
        cv = self.character(lam)
        if cv.torsion not in (0, Fraction(1, 2)):
            return None
        out = Fraction(-1 if cv.torsion else 1)
        for v, e in zip(self.values, cv.exponents):
            out *= v ** e
        return out

    def coordinates(self) -> list[Fraction] | None:
        """The coordinates x_j = rho(e_j), when rational."""
        vals = [self.rational_value([int(i == j) for i in range(self.ambient)])
                for j in range(self.ambient)]
        return None if any(v is None for v in vals) else vals

    def inverse(self) -> "CharacterPresentation":
        return CharacterPresentation(
            self.ambient, self.modulus, tuple(-t for t in self.torsion), self.labels,
            tuple(tuple(-x for x in row) for row in self.exponents), self.values,
            self.independence_asserted)

    def widened(self, labels: tuple[str, ...], values=None) -> "CharacterPresentation":
        """Same character over a larger generator list (missing columns are 0)."""
        if self.generator_count and self.labels != labels:
            raise ValueError("incompatible generator bases")
        if self.generator_count:
            return self
        E = tuple((0,) * len(labels) for _ in range(self.ambient))
        return CharacterPresentation(self.ambient, self.modulus, self.torsion, labels, E,
                                     values, self.independence_asserted)


def trivial_character(N: int) -> CharacterPresentation:
    return CharacterPresentation(N)


def _compatible(P1: CharacterPresentation, P2: CharacterPresentation):
    if P1.generator_count and P2.generator_count:
        if P1.labels != P2.labels:
            raise ValueError("incompatible generator bases")
        if P1.values is not None and P2.values is not None and P1.values != P2.values:
            raise ValueError("same labels carry different values")
        return P1, P2
    labels = P1.labels or P2.labels
    values = P1.values if P1.generator_count else P2.values
    return P1.widened(labels, values), P2.widened(labels, values)


# ---------------------------------------------------------------------------
# Translates


@dataclass(frozen=True)
class TorusTranslate:
    """The translate {x in G_m^N : x^lambda = rho(lambda), lambda in gamma}."""

    ambient: int
    gamma: Sublattice
    point: CharacterPresentation = field(default=None)

    def __post_init__(self):
        if self.gamma.ambient_dim != self.ambient:
            raise ValueError("gamma must lie in Z^N")
        _require_saturated(self.gamma)
        if self.point is None:
            object.__setattr__(self, "point", trivial_character(self.ambient))
        if self.point.ambient != self.ambient:
            raise ValueError("character must be defined on Z^N")

    @classmethod
    def subtorus(cls, gamma: Sublattice) -> "TorusTranslate":
        return cls(gamma.ambient_dim, gamma)

    @classmethod
    def full(cls, N: int) -> "TorusTranslate":
        return cls(N, Sublattice.zero(N))

    @classmethod
    def from_rational_point(cls, coords: Sequence) -> "TorusTranslate":
        """A point of G_m^N(Q), presented over the primes of its coordinates."""
        coords = [Fraction(c) for c in coords]
        if any(c == 0 for c in coords):
            raise ValueError("coordinates of a torus point must be nonzero")
        N = len(coords)
        primes = sorted({p for c in coords for p in _factor(c)})
        E = tuple(tuple(_factor(c).get(p, 0) for p in primes) for c in coords)
        pres = CharacterPresentation(N, 2, tuple(int(c < 0) for c in coords),
                                     tuple(str(p) for p in primes), E,
                                     tuple(Fraction(p) for p in primes))
        return cls(N, Sublattice.full(N), pres)

    @property
    def dim(self) -> int:
        return self.ambient - self.gamma.rank

    def parametrization(self) -> Parametrization:
        return parametrization_from_kernel(self.gamma)

    def with_point(self, point: CharacterPresentation) -> "TorusTranslate":
        return TorusTranslate(self.ambient, self.gamma, point)


def _lattice_of(Y) -> Sublattice:
    return Y.gamma if isinstance(Y, TorusTranslate) else Y


def binomial_generators(X: TorusTranslate) -> list[tuple[tuple[int, ...], CharValue]]:
    """One binomial x^lambda - rho(lambda) per basis vector of gamma."""
    return [(lam, X.point.character(lam)) for lam in X.gamma.basis]


@lru_cache(maxsize=4096)
def _lattice_degree(gamma: Sublattice) -> int:
    B = parametrization_from_kernel(gamma)
    if B.p == 0:
        return 1
    d = math.factorial(B.p) * hull_volume(B.polytope())
    assert d.denominator == 1
    return int(d)


def translate_degree(X) -> int:
    """Degree of the closure in P^N; depends only on the lattice."""
    return _lattice_degree(_lattice_of(X))


def _divisor_setup(Y, lam):
    gamma = _lattice_of(Y)
    lam = tuple(int(x) for x in lam)
    if len(lam) != gamma.ambient_dim:
        raise ValueError("lambda must lie in Z^N")
    if lam in gamma:
        raise ValueError("lambda lies in Gamma_Y: the binomial is constant on Y")
    B = parametrization_from_kernel(gamma)
    return gamma, B, B.apply(lam)


def binomial_divisor_degree(Y, lam) -> int:
    """deg(div(x^lambda - gamma) . Y) for any admissible constant gamma.

    Evaluated as a mixed volume MV([0, M_B lambda], Q_B, ..., Q_B) and as the
    prism degree of the primitive direction scaled by its index; the two must
    agree.  Only the lattice of ``Y`` is read.
    """
    gamma, B, w = _divisor_setup(Y, lam)
    p = B.p
    Q = B.polytope()
    seg = RatPolytope.segment((0,) * p, w)
    via_mixed = mixed_volume(seg, *([Q] * (p - 1)))
    index = math.gcd(*w)
    via_prism = index * prism_degree(Q, tuple(x // index for x in w))
    if via_mixed != via_prism:
        raise AssertionError(f"degree routes disagree: {via_mixed} != {via_prism}")
    assert via_mixed.denominator == 1
    return int(via_mixed)


def degree_routes(Y, lam) -> dict:
    """Both degree evaluations without the equality assertion (for diagnostics)."""
    gamma, B, w = _divisor_setup(Y, lam)
    p = B.p
    Q = B.polytope()
    seg = RatPolytope.segment((0,) * p, w)
    index = math.gcd(*w)
    return {"mixed_volume": mixed_volume(seg, *([Q] * (p - 1))),
            "prism": index * prism_degree(Q, tuple(x // index for x in w)),
            "index": index, "image": w}


@lru_cache(maxsize=2048)
def _facet_data(gamma: Sublattice):
    B = parametrization_from_kernel(gamma)
    return B, facet_weights(B.polytope())


def fast_divisor_degree(Y, lam) -> int:
    """Same value as binomial_divisor_degree from cached facet data of Q_B."""
    gamma = _lattice_of(Y)
    B, weights = _facet_data(gamma)
    d = segment_mixed_volume(weights, B.apply(lam), B.p)
    assert d.denominator == 1
    return int(d)


def degree_bounds_eq6(Y) -> tuple[Fraction, int, int]:
    """(covol^2 / C(N,p), deg, C(N,p) covol^2); asserts the squared sandwich."""
    gamma = _lattice_of(Y)
    N, p = gamma.ambient_dim, gamma.ambient_dim - gamma.rank
    cov = covolume_sq(gamma)
    c = math.comb(N, p)
    deg = translate_degree(gamma)
    lower, upper = Fraction(cov, c), c * cov
    if not lower <= deg * deg <= upper:
        raise AssertionError(f"degree {deg} outside the covolume sandwich")
    return lower, deg, upper


def sandwich_ratio(Y, lam) -> tuple[Fraction, Fraction, Fraction]:
    """(lower, deg^2 / (||lam||_perp^2 deg(Y)^2), upper) for the divisor of x^lam on Y."""
    gamma = _lattice_of(Y)
    N, p = gamma.ambient_dim, gamma.ambient_dim - gamma.rank
    C = math.comb(N, p) * math.comb(N, p - 1)
    q = QuotientLattice(Sublattice.full(N), gamma)
    norm = sum(x * x for x in q.project(lam))
    d = binomial_divisor_degree(gamma, lam)
    dy = translate_degree(gamma)
    return Fraction(1, C), Fraction(d * d) / (norm * dy * dy), Fraction(C)


def _characters_agree(X: TorusTranslate, Y: TorusTranslate) -> bool:
    PX, PY = _compatible(X.point, Y.point)
    for lam in Y.gamma.basis:
        a, b = PX.character(lam), PY.character(lam)
        if a.torsion != b.torsion or a.exponents != b.exponents:
            return False
    return True


def is_subtranslate(X: TorusTranslate, Y: TorusTranslate) -> bool:
    """X ⊆ Y: Gamma_X contains Gamma_Y and the characters agree on Gamma_Y."""
    if X.ambient != Y.ambient:
        raise ValueError("different ambient tori")
    _compatible(X.point, Y.point)
    return X.gamma.contains_lattice(Y.gamma) and _characters_agree(X, Y)


@dataclass(frozen=True)
class TorsionClosure:
    translate: TorusTranslate
    is_subtorus: bool
    conditional: bool


def torsion_closure(X: TorusTranslate) -> TorsionClosure:
    """U_X: the lattice Gamma_X ∩ ker E^T with the restricted character."""
    A = X.gamma.basis
    E = X.point.exponents
    N = X.ambient
    if not A or not X.point.generator_count:
        gamma_u = X.gamma
    else:
        AE = matmul(A, E)  # rank(Gamma_X) x r
        K = kernel_basis(transpose(AE, X.point.generator_count), len(A))
        vecs = matmul(K.basis, A) if K.basis else []
        gamma_u = Sublattice.span(vecs, N) if vecs else Sublattice.zero(N)
    if not gamma_u.saturated:
        raise AssertionError("torsion closure lattice must be saturated")
    U = TorusTranslate(N, gamma_u, X.point)
    trivial = all(X.point.character(lam).is_one for lam in gamma_u.basis)
    return TorsionClosure(U, trivial, X.point.conditional)


@dataclass(frozen=True)
class Obstruction:
    omega: float | int
    minimizer: tuple[int, ...] | None
    norm_sq: Fraction | None = None
    candidates: int = 0


def obstruction_degree(X: TorusTranslate, Y: TorusTranslate) -> Obstruction:
    """Smallest degree of a divisor of Y containing X (over the algebraic closure).

    Minimised over binomials x^lambda - rho_X(lambda), lambda in Gamma_X \\ Gamma_Y.
    The search visits quotient classes by norm up to the radius where the
    lower estimate deg >= ||lambda||_perp deg(Y) / sqrt(C(N,p) C(N,p-1))
    exceeds the best degree found from the first minimum.
    """
    if not is_subtranslate(X, Y):
        raise ValueError("X is not contained in Y")
    if X.dim == Y.dim:
        return Obstruction(INFINITE, None)
    q = QuotientLattice(X.gamma, Y.gamma)
    N, p = X.ambient, Y.dim
    seed, seed_norm = first_minimum(q)
    best = fast_divisor_degree(Y.gamma, seed)
    C = math.comb(N, p) * math.comb(N, p - 1)
    dy = translate_degree(Y.gamma)
    radius = Fraction(best * best * C, dy * dy)
    found = []
    count = 0
    for c, norm in short_vectors(q.gram_perp, radius):
        count += 1
        lam = q.lift(c)
        found.append((fast_divisor_degree(Y.gamma, lam), norm, c))
    omega = min(d for d, _, _ in found)
    top = min(n for d, n, _ in found if d == omega)
    lam, _ = canonical_choice(q, [c for d, n, c in found if d == omega and n == top])
    if binomial_divisor_degree(Y.gamma, lam) != omega:
        raise AssertionError("facet formula disagrees with the dual-route degree")
    return Obstruction(omega, lam, top, count)


def hadamard_product(X1: TorusTranslate, X2: TorusTranslate) -> TorusTranslate:
    """Coordinatewise product of two translates with the same lattice."""
    if X1.gamma != X2.gamma:
        raise ValueError("hadamard product needs the same lattice")
    P1, P2 = _compatible(X1.point, X2.point)
    m = P1.modulus * P2.modulus // math.gcd(P1.modulus, P2.modulus)
    tors = tuple(a * (m // P1.modulus) + b * (m // P2.modulus)
                 for a, b in zip(P1.torsion, P2.torsion))
    E = tuple(tuple(x + y for x, y in zip(r1, r2)) for r1, r2 in zip(P1.exponents, P2.exponents))
    values = P1.values if P1.values is not None else P2.values
    pres = CharacterPresentation(X1.ambient, m, tors, P1.labels, E, values,
                                 P1.independence_asserted or P2.independence_asserted)
    return TorusTranslate(X1.ambient, X1.gamma, pres)


def inverse_translate(X: TorusTranslate) -> TorusTranslate:
    return X.with_point(X.point.inverse())


# ---------------------------------------------------------------------------
# Upper bounds for the obstruction degree


def c3_enclosure(N: int, p: int, n: int, prec: int = DEFAULT_PREC):
    """c_3(N,p,n) = 2/sqrt(pi) (C(N,p)C(N,p-1))^(1/2) (C(N,n)C(N,p))^(1/2) Gamma(1+k/2)^(1/(2k))."""
    from .lattice import gamma_half_enclosure
    k = p - n
    ctx = ivctx(prec)
    a = math.comb(N, p) * math.comb(N, p - 1)
    b = math.comb(N, n) * math.comb(N, p)
    g = gamma_half_enclosure(k, prec)
    return 2 / ctx.sqrt(ctx.pi) * ctx.sqrt(rat_enclosure(a * b, prec)) * ctx.exp(ctx.log(g) / (2 * k))


def c3_chain_enclosure(N: int, p: int, n: int, prec: int = DEFAULT_PREC):
    """The constant obtained by chaining the first-minimum bound with the
    upper degree estimate: 2/sqrt(pi) (C(N,p)C(N,p-1))^(1/2)
    (C(N,n)C(N,p))^(1/(2k)) Gamma(1+k/2)^(1/k)."""
    from .lattice import gamma_half_enclosure
    k = p - n
    ctx = ivctx(prec)
    a = math.comb(N, p) * math.comb(N, p - 1)
    b = math.comb(N, n) * math.comb(N, p)
    g = gamma_half_enclosure(k, prec)
    return (2 / ctx.sqrt(ctx.pi) * ctx.sqrt(rat_enclosure(a, prec))
            * ctx.exp((ctx.log(rat_enclosure(b, prec)) / 2 + ctx.log(g)) / k))


def obstruction_upper_bounds(X: TorusTranslate, Y: TorusTranslate,
                             prec: int = DEFAULT_PREC) -> dict:
    """Check omega against c_3 deg(X)^(1/k) deg(Y)^(1-1/k) and the coarse 4^N N^(3/2) form.

    Comparisons are made on k-th powers (certified intervals) and, for the
    coarse constant, on exact integers after squaring.
    """
    ob = obstruction_degree(X, Y)
    N, p, n = X.ambient, Y.dim, X.dim
    if ob.omega == INFINITE:
        return {"omega": None, "infinite": True}
    k = p - n
    dx, dy = translate_degree(X), translate_degree(Y)
    omega = ob.omega

    def rhs(constant):
        def enc(pr):
            ctx = ivctx(pr)
            return constant(N, p, n, pr) ** k * dx * ctx.mpf(dy) ** (k - 1)
        return enc

    exact = certified_le(omega ** k, rhs(c3_enclosure), prec)
    if k == 1:
        # the gamma factor cancels the pi: the chained constant is a square root
        a = math.comb(N, p) * math.comb(N, p - 1) * math.comb(N, n) * math.comb(N, p)
        chain = omega * omega <= a * dx * dx
    else:
        chain = certified_le(omega ** k, rhs(c3_chain_enclosure), prec)
    coarse = omega ** (2 * k) <= 16 ** (N * k) * N ** (3 * k) * dx * dx * dy ** (2 * k - 2)
    lo, hi = lohi(c3_enclosure(N, p, n, prec))
    return {"omega": omega, "k": k, "deg_x": dx, "deg_y": dy,
            "c3": [float(lo), float(hi)], "holds_c3": exact,
            "holds_chain_constant": chain, "holds_coarse": coarse}


def minkowski_check(q: QuotientLattice, prec: int = DEFAULT_PREC) -> tuple[Fraction, bool]:
    """(squared first minimum, whether it lies below the certified Minkowski bound)."""
    from .lattice import minkowski_bound_sq, minkowski_bound_sq_exact
    _, m = first_minimum(q)
    exact = minkowski_bound_sq_exact(q)
    if exact is not None:
        return m, m <= exact
    return m, certified_le(m, lambda pr: minkowski_bound_sq(q, pr), prec)
