"""Seeded random instances for the property suites.

Every generator takes a ``random.Random`` so that a suite run is a pure
function of its seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

import sympy

from .function_field import FFTranslate, HyperForm, RatFun, is_irreducible_form, t, xvars
from .lattice import Sublattice, rational_rank, saturate
from .torus import TorusTranslate


def random_matrix(rng: random.Random, rows: int, cols: int, bound: int = 4):
    return [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)]


def random_saturated(rng: random.Random, N: int, rank: int, bound: int = 4) -> Sublattice:
    """Saturation of the span of ``rank`` independent random vectors."""
    if rank == 0:
        return Sublattice.zero(N)
    while True:
        rows = random_matrix(rng, rank, N, bound)
        if rational_rank(rows) == rank:
            return saturate(Sublattice(N, tuple(map(tuple, rows))))


def random_vector_outside(rng: random.Random, gamma: Sublattice, bound: int = 4):
    while True:
        lam = tuple(rng.randint(-bound, bound) for _ in range(gamma.ambient_dim))
        if lam not in gamma:
            return lam


def random_divisor_instance(rng: random.Random, max_n: int = 5, max_p: int = 4, bound: int = 4):
    """(Gamma_Y, lambda) with dim Y = p >= 1 and lambda outside Gamma_Y."""
    N = rng.randint(1, max_n)
    p = rng.randint(1, min(N, max_p))
    gamma = random_saturated(rng, N, N - p, bound)
    return gamma, random_vector_outside(rng, gamma, bound)


def random_nested_pair(rng: random.Random, max_n: int = 5, max_p: int = 4, bound: int = 4):
    """Saturated Gamma_Y ⊊ Gamma_X with dim Y = p <= max_p."""
    N = rng.randint(2, max_n)
    p = rng.randint(1, min(N, max_p))
    n = rng.randint(0, p - 1)
    gx = random_saturated(rng, N, N - n, bound)
    ry = N - p
    if ry == 0:
        return gx, Sublattice.zero(N)
    while True:
        C = random_matrix(rng, ry, gx.rank, 2)
        if rational_rank(C) == ry:
            vecs = [[sum(c * b[j] for c, b in zip(row, gx.basis)) for j in range(N)] for row in C]
            return gx, saturate(Sublattice(N, tuple(map(tuple, vecs))))


def random_base_rationals(rng: random.Random, count: int):
    pool = [Fraction(2), Fraction(3), Fraction(5), Fraction(7), Fraction(2, 3), Fraction(3, 5),
            Fraction(6), Fraction(10, 7), Fraction(1, 2)]
    return rng.sample(pool, count)


def random_rational_point(rng: random.Random, N: int, bases: int = 2, bound: int = 3,
                          signs: bool = True, positive: bool = False):
    """Coordinates that are monomials in a few base rationals (often dependent)."""
    base = random_base_rationals(rng, bases)
    while True:
        coords = []
        for _ in range(N):
            v = Fraction(1)
            for b in base:
                v *= b ** rng.randint(-bound, bound)
            if signs and not positive and rng.random() < 0.3:
                v = -v
            coords.append(v)
        if any(abs(c) != 1 for c in coords):
            return coords


def random_translate_through(rng: random.Random, coords, codim: int | None = None) -> TorusTranslate:
    """A translate alpha . T through the rational point alpha, with random T."""
    N = len(coords)
    P = TorusTranslate.from_rational_point(coords)
    rank = rng.randint(1, N) if codim is None else codim
    return TorusTranslate(N, random_saturated(rng, N, rank, 3), P.point)


_BASE_POLYS = ["t", "t + 1", "t - 1", "t**2 + 1", "2*t + 3", "t**2 - 2"]


def random_ratfun(rng: random.Random, max_degree: int = 2, coeff: int = 3) -> RatFun:
    def poly():
        while True:
            c = [Fraction(rng.randint(-coeff, coeff)) for _ in range(rng.randint(0, max_degree) + 1)]
            if any(c):
                return c
    return RatFun(tuple(poly()), tuple(poly()))


def random_ff_translate(rng: random.Random, max_n: int = 4, bound: int = 2) -> FFTranslate:
    """alpha . T with coordinates that are monomials in a few base polynomials."""
    N = rng.randint(1, max_n)
    bases = [RatFun.from_expr(e) for e in rng.sample(_BASE_POLYS, rng.randint(1, 2))]
    coords = []
    for _ in range(N):
        v = RatFun.constant(rng.choice([1, -1, 2, Fraction(1, 3)]))
        for b in bases:
            v = v * b ** rng.randint(-bound, bound)
        coords.append(v)
    rank = rng.randint(0, N)
    gamma = random_saturated(rng, N, rank, 3)
    return FFTranslate(N, gamma, tuple(coords))


def random_plane_curve(rng: random.Random, max_x: int = 3, max_t: int = 2) -> HyperForm:
    """An irreducible form in x0, x1, x2 over Q[t], primitive in t."""
    xs = xvars(2)
    while True:
        d = rng.randint(1, max_x)
        expr = 0
        for a in range(d + 1):
            for b in range(d + 1 - a):
                if rng.random() < 0.5:
                    continue
                c = sum(rng.randint(-2, 2) * t ** k for k in range(rng.randint(0, max_t) + 1))
                expr += c * xs[0] ** a * xs[1] ** b * xs[2] ** (d - a - b)
        expr = sympy.expand(expr)
        if expr == 0:
            continue
        try:
            f = HyperForm(2, expr)
        except ValueError:
            continue
        if f.deg_x == d and is_irreducible_form(f):
            return f
