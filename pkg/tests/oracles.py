"""Independent reference computations used to freeze expected values.

Nothing here imports the package: each function recomputes a quantity by
an unrelated method (exhaustive enumeration, Groebner bases, plain-float
root finding) so agreement is evidence, not tautology.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import mpmath
import sympy


def curve_degree(exponents):
    """Degree of the closure of s -> (s^b_1, ..., s^b_N) in P^N."""
    vals = list(exponents) + [0]
    return max(vals) - min(vals)


def _standard_monomial_count(G, gens):
    """dim Q[gens]/I from a Groebner basis of a zero-dimensional ideal."""
    leads = [sympy.Poly(g, *gens).monoms(order=G.order)[0] for g in G.exprs]
    # every variable has a pure power among the leading monomials
    caps = []
    for i in range(len(gens)):
        pure = [m[i] for m in leads if all(e == 0 for j, e in enumerate(m) if j != i)]
        caps.append(min(pure))
    count = 0
    for m in itertools.product(*(range(c) for c in caps)):
        if not any(all(a >= b for a, b in zip(m, lead)) for lead in leads):
            count += 1
    return count


def torus_section_count(vectors, lam=None, seed=0):
    """Points of T_B cut by generic hyperplanes (and x^lam = gamma if given).

    T_B is parametrised by s in G_m^p via x_j = s^(b_j); with p generic
    linear forms in (1, x_1, .., x_N) the count is deg T_B, and with the
    binomial plus p-1 forms it is the degree of the divisor.
    """
    rng = random.Random(seed)
    p = len(vectors[0])
    s = sympy.symbols(f"s0:{p}")
    z = sympy.Symbol("z")
    mono = [sympy.Mul(*[si ** e for si, e in zip(s, b)]) for b in vectors]
    eqs = []
    if lam is not None:
        e = [sum(l * b[i] for l, b in zip(lam, vectors)) for i in range(p)]
        eqs.append(sympy.Mul(*[si ** x for si, x in zip(s, e)]) - rng.choice([2, 3, 5, 7]))
    while len(eqs) < p:
        eqs.append(rng.randint(1, 97) + sum(rng.randint(1, 97) * m for m in mono))
    polys = [sympy.numer(sympy.together(q)) for q in eqs]
    polys.append(z * sympy.Mul(*s) - 1)
    G = sympy.groebner(polys, *s, z, order="grevlex")
    return _standard_monomial_count(G, s + (z,))


def mahler_log_measure(coeffs, dps=60):
    """log |a_0| + sum log max(1, |z|) with roots from mpmath at high precision."""
    with mpmath.workdps(dps):
        roots = mpmath.polyroots(coeffs, maxsteps=400, extraprec=4 * dps)
        val = mpmath.log(abs(coeffs[0])) + sum(mpmath.log(max(1, abs(r))) for r in roots)
        return float(val)


def projection_norm_sq(lam, gamma_y_basis):
    """||lam - proj_{span gamma_y} lam||^2 by Gram-Schmidt over Fractions."""
    ortho = []
    for b in gamma_y_basis:
        w = [Fraction(x) for x in b]
        for u, uu in ortho:
            c = sum(a * e for a, e in zip(w, u)) / uu
            w = [a - c * e for a, e in zip(w, u)]
        ortho.append((w, sum(a * a for a in w)))
    v = [Fraction(x) for x in lam]
    for u, uu in ortho:
        c = sum(a * e for a, e in zip(v, u)) / uu
        v = [a - c * e for a, e in zip(v, u)]
    return sum(a * a for a in v)


def brute_first_minimum(gamma_x_basis, gamma_y_basis, box=4):
    """Smallest nonzero quotient norm over coefficient vectors in a box."""
    best = None
    for c in itertools.product(range(-box, box + 1), repeat=len(gamma_x_basis)):
        lam = [sum(ci * b[j] for ci, b in zip(c, gamma_x_basis)) for j in range(len(gamma_x_basis[0]))]
        n = projection_norm_sq(lam, gamma_y_basis)
        if n != 0 and (best is None or n < best):
            best = n
    return best


def worked_example():
    """The point (4, 8) = (2^2, 2^3) in G_m^2, by exponent arithmetic alone."""
    E = (2, 3)  # coordinate j is 2^E_j
    box = range(-12, 13)
    # lambda with 4^l1 8^l2 a root of unity: 2 l1 + 3 l2 = 0
    closure = [(a, b) for a in box for b in box if E[0] * a + E[1] * b == 0 and (a, b) != (0, 0)]
    gen = min(closure, key=lambda v: (v[0] ** 2 + v[1] ** 2, -v[0]))
    # U is s -> (s^2, s^3); divisor of x^lam - c on U has |2 l1 + 3 l2| points
    deg_u = curve_degree(E)
    degs = {(a, b): abs(E[0] * a + E[1] * b) for a in box for b in box}
    omega = min(d for d in degs.values() if d > 0)
    g2 = gen[0] ** 2 + gen[1] ** 2

    def perp(v):
        # squared norm of v orthogonal to gen
        dot = v[0] * gen[0] + v[1] * gen[1]
        return Fraction(v[0] ** 2 + v[1] ** 2) - Fraction(dot * dot, g2)
    lowest = min(perp(v) for v, d in degs.items() if d == omega)
    minimizers = sorted(v for v, d in degs.items() if d == omega and perp(v) == lowest
                        and abs(v[0]) + abs(v[1]) == min(abs(w[0]) + abs(w[1]) for w, e in degs.items()
                                                         if e == omega and perp(w) == lowest))
    N, p, n = 2, 1, 0
    c_sq = Fraction(4, (N + 1) ** 2 * (p - n) * math.comb(N, p) * math.comb(N, p - 1))
    log2 = math.log(2)
    headline = math.sqrt(c_sq) * log2 * deg_u / omega
    # h(alpha^lambda) for lambda = (1, -1): 4/8 = 1/2 has height log 2
    monomial = 2 / ((N + 1) * math.sqrt(p - n)) * log2 / math.sqrt(lowest)
    return {"closure_generator": gen, "deg_u": deg_u, "omega": omega, "norm_sq": lowest,
            "minimizers": minimizers, "c_sq": c_sq, "headline": headline, "monomial_form": monomial,
            "actual": math.log(8)}


if __name__ == "__main__":
    import json
    print(json.dumps({k: str(v) for k, v in worked_example().items()}, indent=2))
