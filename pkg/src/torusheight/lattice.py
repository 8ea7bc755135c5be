"""Exact integer lattice algebra.

Integer matrices are tuples of row tuples of Python ints; rational data uses
``fractions.Fraction``.  Nothing here ever rounds.

Sublattices of Z^N are stored by their Hermite normal form, so two
``Sublattice`` objects compare equal exactly when they span the same group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

from .reals import DEFAULT_PREC, ivctx, rat_enclosure

IntMatrix = tuple[tuple[int, ...], ...]
Vector = tuple[int, ...]


class EmptyQuotientError(ValueError):
    """The quotient lattice has rank zero: there is no nonzero class."""


def as_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    out = tuple(tuple(int(x) for x in r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise ValueError("ragged matrix")
    return out


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(M: Sequence[Sequence], ncols: int | None = None) -> list[list]:
    if not M:
        return [[] for _ in range(ncols or 0)]
    return [list(c) for c in zip(*M)]


def matmul(A, B) -> list[list]:
    Bt = list(zip(*B)) if B else []
    return [[sum(a * b for a, b in zip(row, col)) for col in Bt] for row in A]


def dot(u, v):
    return sum(a * b for a, b in zip(u, v))


# ---------------------------------------------------------------------------
# Normal forms


def _smith(M: Sequence[Sequence[int]], ncols: int):
    """Smith form with U, V and V^{-1} tracked; see ``smith_normal_form``."""
    A = [list(r) for r in M]
    m, n = len(A), ncols
    U = identity(m)
    V = identity(n)
    Vinv = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]
        Vinv[i], Vinv[j] = Vinv[j], Vinv[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        A[dst] = [a + q * b for a, b in zip(A[dst], A[src])]
        U[dst] = [a + q * b for a, b in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst += q * col_src
        for row in A:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]
        # V <- V E  implies  V^{-1} <- E^{-1} V^{-1}
        Vinv[src] = [a - q * b for a, b in zip(Vinv[src], Vinv[dst])]

    for t in range(min(m, n)):
        while True:
            best = None
            for i in range(t, m):
                for j in range(t, n):
                    if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return U, A, V, Vinv
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            piv = A[t][t]
            clean = True
            for i in range(t + 1, m):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // piv))
                    clean = clean and A[i][t] == 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // piv))
                    clean = clean and A[t][j] == 0
            if not clean:
                continue
            bad = next((i for i in range(t + 1, m)
                        if any(A[i][j] % piv for j in range(t + 1, n))), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            U[t] = [-a for a in U[t]]
    return U, A, V, Vinv


def smith_normal_form(M: Sequence[Sequence[int]], ncols: int | None = None):
    """Return ``(U, D, V)`` with ``U @ M @ V == D``.

    ``U`` and ``V`` are unimodular and ``D`` is diagonal with
    ``d_1 | d_2 | ...`` and non-negative entries.  ``ncols`` is only needed
    when ``M`` has no rows.
    """
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    U, D, V, _ = _smith(M, n)
    return as_matrix(U), as_matrix(D), as_matrix(V)


def elementary_divisors(M: Sequence[Sequence[int]], ncols: int | None = None) -> list[int]:
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    _, D, _, _ = _smith(M, n)
    return [D[i][i] for i in range(min(len(D), n)) if D[i][i]]


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int) -> IntMatrix:
    """Row-style HNF of the row span: echelon, positive pivots, reduced above.

    Zero rows are dropped, so the result is a basis of the row lattice.
    """
    A = [list(r) for r in rows if any(r)]
    out = []
    col = 0
    while A and col < ncols:
        nz = [r for r in A if r[col]]
        if not nz:
            col += 1
            continue
        rest = [r for r in A if not r[col]]
        piv = nz[0]
        for r in nz[1:]:
            g, x, y = _xgcd(piv[col], r[col])
            a, b = piv[col] // g, r[col] // g
            piv, r2 = ([x * u + y * v for u, v in zip(piv, r)],
                       [b * u - a * v for u, v in zip(piv, r)])
            if any(r2):
                rest.append(r2)
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        A = rest
        col += 1
    # reduce entries above pivots
    for i in range(len(out)):
        c = next(j for j, x in enumerate(out[i]) if x)
        p = out[i][c]
        for k in range(i):
            q = out[k][c] // p
            if q:
                out[k] = [u - q * v for u, v in zip(out[k], out[i])]
    return as_matrix(out)


# ---------------------------------------------------------------------------
# Exact rational linear algebra (small dense)


def rational_rank(rows: Sequence[Sequence]) -> int:
    A = [[Fraction(x) for x in r] for r in rows]
    rank, ncol = 0, len(A[0]) if A else 0
    for c in range(ncol):
        p = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[rank], A[p] = A[p], A[rank]
        for i in range(rank + 1, len(A)):
            if A[i][c]:
                f = A[i][c] / A[rank][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[rank])]
        rank += 1
    return rank


def det(M: Sequence[Sequence]) -> Fraction | int:
    """Exact determinant (Bareiss for ints, elimination for Fractions)."""
    n = len(M)
    if n == 0:
        return 1
    if all(isinstance(x, int) for r in M for x in r):
        A = [list(r) for r in M]
        sign, prev = 1, 1
        for k in range(n - 1):
            if A[k][k] == 0:
                p = next((i for i in range(k + 1, n) if A[i][k]), None)
                if p is None:
                    return 0
                A[k], A[p] = A[p], A[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
            prev = A[k][k]
        return sign * A[n - 1][n - 1]
    A = [[Fraction(x) for x in r] for r in M]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        d *= A[c][c]
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / A[c][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return d


def inverse(M: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(M)
    A = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)]
         for i, r in enumerate(M)]
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            raise ZeroDivisionError("singular matrix")
        A[c], A[p] = A[p], A[c]
        inv = 1 / A[c][c]
        A[c] = [x * inv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return [r[n:] for r in A]


def gram(rows: Sequence[Sequence]) -> list[list]:
    return [[dot(u, v) for v in rows] for u in rows]


# ---------------------------------------------------------------------------
# Sublattices


@dataclass(frozen=True)
class Sublattice:
    """A sublattice of Z^N, canonically stored by its HNF basis.

    ``saturated`` is computed, never trusted: it is True exactly when
    Z^N / Gamma is torsion-free.
    """

    ambient_dim: int
    basis: IntMatrix = ()
    saturated: bool = field(default=False, compare=False)

    def __post_init__(self):
        rows = as_matrix(self.basis)
        if any(len(r) != self.ambient_dim for r in rows):
            raise ValueError("basis vectors must lie in Z^N")
        if rational_rank(rows) != len([r for r in rows if any(r)]) or \
                any(not any(r) for r in rows):
            raise ValueError("basis rows must be linearly independent")
        hnf = hermite_normal_form(rows, self.ambient_dim)
        object.__setattr__(self, "basis", hnf)
        divisors = elementary_divisors(hnf, self.ambient_dim)
        object.__setattr__(self, "saturated", all(d == 1 for d in divisors))

    @classmethod
    def span(cls, vectors: Sequence[Sequence[int]], ambient_dim: int | None = None):
        """Lattice spanned by arbitrary (possibly dependent) integer vectors."""
        vectors = as_matrix(vectors)
        n = ambient_dim if ambient_dim is not None else len(vectors[0])
        return cls(n, hermite_normal_form(vectors, n))

    @classmethod
    def full(cls, n: int) -> "Sublattice":
        return cls(n, as_matrix(identity(n)))

    @classmethod
    def zero(cls, n: int) -> "Sublattice":
        return cls(n, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def __contains__(self, vec) -> bool:
        v = [int(x) for x in vec]
        if len(v) != self.ambient_dim:
            return False
        for row in self.basis:
            c = next(j for j, x in enumerate(row) if x)
            if any(v[:c]):
                return False
            if v[c] % row[c]:
                return False
            q = v[c] // row[c]
            v = [a - q * b for a, b in zip(v, row)]
        return not any(v)

    def contains_lattice(self, other: "Sublattice") -> bool:
        return other.ambient_dim == self.ambient_dim and all(r in self for r in other.basis)

    def coordinates(self, vec) -> tuple[int, ...]:
        """Integer coordinates of ``vec`` in the stored basis."""
        v = [int(x) for x in vec]
        coords = []
        for row in self.basis:
            c = next(j for j, x in enumerate(row) if x)
            if any(v[:c]) or v[c] % row[c]:
                raise ValueError(f"{tuple(vec)} is not in the lattice")
            q = v[c] // row[c]
            coords.append(q)
            v = [a - q * b for a, b in zip(v, row)]
        if any(v):
            raise ValueError(f"{tuple(vec)} is not in the lattice")
        return tuple(coords)

    def reduce(self, vec) -> Vector:
        """Canonical coset representative of ``vec`` modulo this lattice."""
        v = [int(x) for x in vec]
        for row in self.basis:
            c = next(j for j, x in enumerate(row) if x)
            q = v[c] // row[c]
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def index_in_saturation(self) -> int:
        return math.prod(elementary_divisors(self.basis, self.ambient_dim))

    def intersect(self, other: "Sublattice") -> "Sublattice":
        """Gamma ∩ Gamma' via the integer kernel of [B; -B']^T."""
        if not self.rank or not other.rank:
            return Sublattice.zero(self.ambient_dim)
        stacked = [list(r) for r in self.basis] + [[-x for x in r] for r in other.basis]
        K = kernel_basis(transpose(stacked), self.rank + other.rank)
        vecs = [[dot(k[: self.rank], col) for col in zip(*self.basis)] for k in K.basis]
        return Sublattice.span(vecs, self.ambient_dim) if vecs else Sublattice.zero(self.ambient_dim)


def saturate(gamma: Sublattice) -> Sublattice:
    """Smallest saturated sublattice containing ``gamma`` (same rank)."""
    if gamma.saturated:
        return gamma
    _, _, _, Vinv = _smith(gamma.basis, gamma.ambient_dim)
    return Sublattice(gamma.ambient_dim, as_matrix(Vinv[: gamma.rank]))


def kernel_basis(M: Sequence[Sequence[int]], ncols: int | None = None) -> Sublattice:
    """Saturated basis of {x in Z^n : M x = 0}."""
    n = ncols if ncols is not None else (len(M[0]) if M else 0)
    _, D, V, _ = _smith(M, n)
    r = sum(1 for i in range(min(len(D), n)) if D[i][i])
    cols = [[V[i][j] for i in range(n)] for j in range(r, n)]
    return Sublattice(n, as_matrix(cols))


def covolume_sq(gamma: Sublattice) -> int:
    """Gram determinant of a basis, i.e. Vol(Gamma^R / Gamma) squared."""
    return det(gram(gamma.basis))


# ---------------------------------------------------------------------------
# Quotient lattices


@dataclass(frozen=True)
class QuotientLattice:
    """Gamma_X / Gamma_Y with the metric of the orthogonal complement of Gamma_Y^R.

    ``reps`` are vectors of Gamma_X whose classes form a basis of the
    quotient and ``gram_perp`` is the Gram matrix of their projections.
    """

    gamma_x: Sublattice
    gamma_y: Sublattice
    reps: IntMatrix = field(init=False, repr=False)
    gram_perp: tuple[tuple[Fraction, ...], ...] = field(init=False, repr=False)

    def __post_init__(self):
        gx, gy = self.gamma_x, self.gamma_y
        if gx.ambient_dim != gy.ambient_dim or not gx.contains_lattice(gy):
            raise ValueError("Gamma_Y must be contained in Gamma_X")
        # coordinates of Gamma_Y in the Gamma_X basis, then a complement
        C = [gx.coordinates(y) for y in gy.basis]
        if C:
            _, _, _, Vinv = _smith(C, gx.rank)
            comp = Vinv[len(C):]
        else:
            comp = identity(gx.rank)
        reps = as_matrix(matmul(comp, gx.basis)) if comp and gx.rank else ()
        object.__setattr__(self, "reps", reps)
        proj = [self.project(r) for r in reps]
        object.__setattr__(self, "gram_perp", tuple(tuple(dot(u, v) for v in proj) for u in proj))

    @property
    def rank(self) -> int:
        return self.gamma_x.rank - self.gamma_y.rank

    @property
    def _ycache(self):
        try:
            return self.__dict__["_yc"]
        except KeyError:
            Y = self.gamma_y.basis
            Ginv = inverse(gram(Y)) if Y else []
            self.__dict__["_yc"] = (Y, Ginv)
            return self.__dict__["_yc"]

    def project(self, lam) -> tuple[Fraction, ...]:
        """Orthogonal projection of ``lam`` away from Gamma_Y^R."""
        Y, Ginv = self._ycache
        if not Y:
            return tuple(Fraction(x) for x in lam)
        yl = [dot(y, lam) for y in Y]
        coef = [sum(g * b for g, b in zip(row, yl)) for row in Ginv]
        return tuple(Fraction(x) - sum(c * y[j] for c, y in zip(coef, Y))
                     for j, x in enumerate(lam))

    def lift(self, coeffs) -> Vector:
        """Canonical representative in Z^N of the class with these coordinates."""
        v = [sum(c * r[j] for c, r in zip(coeffs, self.reps)) for j in range(self.gamma_x.ambient_dim)]
        return self.gamma_y.reduce(v)

    def covolume_sq(self) -> Fraction:
        return Fraction(det(self.gram_perp))


def quotient_norm_sq(q: QuotientLattice, lam) -> Fraction:
    """Squared quotient norm of ``lam`` (which must lie in Gamma_X)."""
    if tuple(lam) not in q.gamma_x:
        raise ValueError(f"{tuple(lam)} is not in Gamma_X")
    p = q.project(lam)
    return sum(x * x for x in p)


def _floor_shift_sqrt(y: Fraction, s: Fraction) -> int:
    """floor(y + sqrt(s)) for rational y and s >= 0, exactly."""
    def ok(n):
        d = n - y
        return d <= 0 or d * d <= s
    n = math.floor(float(y) + math.sqrt(float(s)))
    while not ok(n):
        n -= 1
    while ok(n + 1):
        n += 1
    return n


def short_vectors(G: Sequence[Sequence[Fraction]], bound: Fraction) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """All nonzero integer c with c^T G c <= bound (Fincke-Pohst, exact).

    ``G`` must be positive definite.  Yields ``(c, c^T G c)``.
    """
    k = len(G)
    Q = [[Fraction(x) for x in r] for r in G]
    for i in range(k):
        for j in range(i + 1, k):
            Q[j][i] = Q[i][j]
            Q[i][j] = Q[i][j] / Q[i][i]
        for l in range(i + 1, k):
            for j in range(l, k):
                Q[l][j] -= Q[l][i] * Q[i][j]
    bound = Fraction(bound)
    c = [0] * k

    def rec(i, remaining):
        if i < 0:
            yield
            return
        center = -sum(Q[i][j] * c[j] for j in range(i + 1, k))
        s = remaining / Q[i][i]
        lo = -_floor_shift_sqrt(-center, s)
        hi = _floor_shift_sqrt(center, s)
        for x in range(lo, hi + 1):
            c[i] = x
            d = x - center
            rem = remaining - Q[i][i] * d * d
            if rem >= 0:
                yield from rec(i - 1, rem)
        c[i] = 0

    for _ in rec(k - 1, bound):
        if any(c):
            v = tuple(c)
            yield v, sum(G[a][b] * v[a] * v[b] for a in range(k) for b in range(k))


def _positive_leading(v) -> bool:
    first = next((x for x in v if x), 0)
    return first > 0


def canonical_choice(q: QuotientLattice, coeff_list) -> tuple[Vector, tuple[int, ...]]:
    """Tie-break: primitive class whose canonical lift is lexicographically
    smallest among those with positive first nonzero entry."""
    best = None
    for c in coeff_list:
        if math.gcd(*c) != 1:
            continue
        lam = q.lift(c)
        if not _positive_leading(lam):
            continue
        if best is None or lam < best[0]:
            best = (lam, c)
    if best is None:  # no primitive candidate; fall back to any
        c = min(coeff_list)
        return q.lift(c), c
    return best


def first_minimum(q: QuotientLattice) -> tuple[Vector, Fraction]:
    """A shortest nonzero class of Gamma_X / Gamma_Y and its squared norm."""
    if q.rank == 0:
        raise EmptyQuotientError("Gamma_X = Gamma_Y: the quotient is trivial")
    G = q.gram_perp
    radius = min(G[i][i] for i in range(q.rank))
    found = list(short_vectors(G, radius))
    m = min(n for _, n in found)
    lam, _ = canonical_choice(q, [c for c, n in found if n == m])
    return lam, m


def gamma_half_enclosure(k: int, prec: int):
    """Enclosure of Gamma(1 + k/2) for integer k >= 0 (closed forms)."""
    ctx = ivctx(prec)
    if k % 2 == 0:
        return ctx.mpf(math.factorial(k // 2))
    # Gamma(1 + k/2) = k!! / 2^((k+1)/2) * sqrt(pi) for odd k
    dfact = math.prod(range(k, 0, -2))
    return rat_enclosure(Fraction(dfact, 2 ** ((k + 1) // 2)), prec) * ctx.sqrt(ctx.pi)


def minkowski_bound_sq(q: QuotientLattice, prec: int = DEFAULT_PREC):
    """Outward-rounded enclosure of the squared Minkowski bound

    ``(2/sqrt(pi))^2 * Gamma(1+k/2)^(2/k) * covol^(2/k)`` for the rank-k
    quotient, an upper bound for the squared first minimum.
    """
    k = q.rank
    if k == 0:
        raise EmptyQuotientError("Gamma_X = Gamma_Y: the quotient is trivial")
    ctx = ivctx(prec)
    cov = rat_enclosure(q.covolume_sq(), prec)
    g = gamma_half_enclosure(k, prec)
    return 4 / ctx.pi * ctx.exp((2 * ctx.log(g) + ctx.log(cov)) / k)


def minkowski_bound_sq_exact(q: QuotientLattice) -> Fraction | None:
    """The squared bound as a rational when it is one.

    For rank 1 the gamma factor cancels the pi and the bound is the squared
    covolume; for rank >= 2 it is a rational multiple of a non-trivial power
    of pi, hence transcendental, and never equal to a rational norm.
    """
    if q.rank == 1:
        return q.covolume_sq()
    return None

