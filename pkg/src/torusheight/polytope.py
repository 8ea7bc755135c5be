"""Exact rational convex geometry in low dimension.

Hulls are computed by an exact beneath-beyond insertion on integer points
(rational inputs are scaled by a common denominator first).  Volumes use a
fan triangulation from the lexicographically smallest vertex, recursing into
facets through a coordinate projection so that every intermediate stays
rational.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterable, Sequence

from .lattice import det, rational_rank

RatVector = tuple[Fraction, ...]


def _lcm(nums: Iterable[int]) -> int:
    out = 1
    for x in nums:
        out = out * x // math.gcd(out, x)
    return out


def _affine_rank(pts: Sequence[Sequence[int]]) -> int:
    if len(pts) < 2:
        return 0
    base = pts[0]
    return rational_rank([[a - b for a, b in zip(p, base)] for p in pts[1:]])


def _hyperplane(points: Sequence[Sequence[int]]) -> tuple[int, ...] | None:
    """Primitive integer normal of the hyperplane through d points of Z^d."""
    base = points[0]
    D = [[a - b for a, b in zip(p, base)] for p in points[1:]]
    d = len(base)
    normal = []
    for k in range(d):
        minor = [row[:k] + row[k + 1:] for row in D]
        normal.append((-1) ** k * det(minor))
    g = math.gcd(*normal)
    if g == 0:
        return None
    return tuple(x // g for x in normal)


def _independent_subset(points: Sequence[tuple[int, ...]], size: int) -> list[tuple[int, ...]]:
    """Greedy affinely independent subset of the requested size."""
    chosen = [points[0]]
    for p in points[1:]:
        if len(chosen) == size:
            break
        if _affine_rank(chosen + [p]) == len(chosen):
            chosen.append(p)
    return chosen


@dataclass
class _Facet:
    normal: tuple[int, ...]
    offset: int
    points: set


def _full_hull(pts: list[tuple[int, ...]]) -> list[_Facet]:
    """Facets of conv(pts) for a full-dimensional set of distinct points, d >= 2."""
    d = len(pts[0])
    simplex = _independent_subset(pts, d + 1)
    if len(simplex) != d + 1:
        raise ValueError("point set is not full-dimensional")
    # interior point, scaled by d+1 to stay integral
    csum = tuple(sum(c) for c in zip(*simplex))

    def oriented(plane_pts):
        a = _hyperplane(plane_pts)
        b = sum(x * y for x, y in zip(a, plane_pts[0]))
        if sum(x * y for x, y in zip(a, csum)) > (d + 1) * b:
            a = tuple(-x for x in a)
            b = -b
        return a, b

    facets = {}
    for i in range(d + 1):
        a, b = oriented(simplex[:i] + simplex[i + 1:])
        facets[(a, b)] = _Facet(a, b, set(simplex[:i] + simplex[i + 1:]))
    processed = list(simplex)
    in_simplex = set(simplex)
    for q in pts:
        if q in in_simplex:
            continue
        vals = {key: sum(x * y for x, y in zip(f.normal, q)) for key, f in facets.items()}
        visible = [f for key, f in facets.items() if vals[key] > f.offset]
        processed.append(q)
        if not visible:
            for key, f in facets.items():
                if vals[key] == f.offset:
                    f.points.add(q)
            continue
        hidden = [f for key, f in facets.items() if vals[key] <= f.offset]
        new = {}
        for f in visible:
            for g in hidden:
                ridge = f.points & g.points
                if len(ridge) < d - 1:
                    continue
                ridge = sorted(ridge)
                if _affine_rank(ridge) != d - 2:
                    continue
                base = _independent_subset(ridge, d - 1)
                a, b = oriented(base + [q])
                if (a, b) not in new:
                    new[(a, b)] = _Facet(a, b, set())
        kept = {(f.normal, f.offset): f for f in hidden}
        for key, f in kept.items():
            if sum(x * y for x, y in zip(f.normal, q)) == f.offset:
                f.points.add(q)
        for key, f in new.items():
            if key in kept:
                continue
            f.points = {p for p in processed
                        if sum(x * y for x, y in zip(f.normal, p)) == f.offset}
            kept[key] = f
        facets = kept
    return list(facets.values())


def _vertices_full(pts: list[tuple[int, ...]], facets: list[_Facet]) -> list[tuple[int, ...]]:
    d = len(pts[0])
    normals_at = {}
    for f in facets:
        for p in f.points:
            normals_at.setdefault(p, []).append(f.normal)
    return sorted(p for p, ns in normals_at.items() if rational_rank(ns) == d)


def _affine_chart(pts: list[tuple[int, ...]]) -> tuple[int, list[int]]:
    """(affine dimension, coordinate indices projecting the affine hull injectively)."""
    base = pts[0]
    D = [[Fraction(a - b) for a, b in zip(p, base)] for p in pts[1:]]
    pivots = []
    rank = 0
    ncol = len(base)
    for c in range(ncol):
        p = next((i for i in range(rank, len(D)) if D[i][c]), None)
        if p is None:
            continue
        D[rank], D[p] = D[p], D[rank]
        for i in range(rank + 1, len(D)):
            if D[i][c]:
                f = D[i][c] / D[rank][c]
                D[i] = [x - f * y for x, y in zip(D[i], D[rank])]
        pivots.append(c)
        rank += 1
    return rank, pivots


def _int_vertices(pts: list[tuple[int, ...]]) -> list[tuple[int, ...]]:
    pts = sorted(set(pts))
    if len(pts) <= 1:
        return pts
    r, chart = _affine_chart(pts)
    if r == 0:
        return pts[:1]
    proj = {p: tuple(p[c] for c in chart) for p in pts}
    if r == 1:
        lo = min(pts, key=lambda p: proj[p])
        hi = max(pts, key=lambda p: proj[p])
        return sorted({lo, hi})
    back = {}
    for p in pts:
        back.setdefault(proj[p], p)
    ppts = sorted(back)
    facets = _full_hull(ppts)
    return sorted(back[v] for v in _vertices_full(ppts, facets))


@lru_cache(maxsize=4096)
def _int_volume(pts: tuple[tuple[int, ...], ...]) -> Fraction:
    """Euclidean volume of conv(pts) in Z^d, 0 if lower dimensional."""
    d = len(pts[0])
    if d == 0:
        return Fraction(1)
    pts = sorted(set(pts))
    if d == 1:
        return Fraction(pts[-1][0] - pts[0][0])
    if _affine_rank(pts) < d:
        return Fraction(0)
    facets = _full_hull(pts)
    verts = _vertices_full(pts, facets)
    apex = verts[0]
    total = Fraction(0)
    for f in facets:
        height = f.offset - sum(x * y for x, y in zip(f.normal, apex))
        if height == 0:
            continue
        k = next(i for i, x in enumerate(f.normal) if x)
        face = tuple(sorted({p[:k] + p[k + 1:] for p in f.points}))
        total += height * _int_volume(face) / abs(f.normal[k])
    return total / d


def _scale_to_int(points: Sequence[Sequence[Fraction]]) -> tuple[int, list[tuple[int, ...]]]:
    L = _lcm(Fraction(x).denominator for p in points for x in p)
    return L, [tuple(int(Fraction(x) * L) for x in p) for p in points]


def _frac_vec(v) -> RatVector:
    return tuple(Fraction(x) for x in v)


@dataclass(frozen=True)
class RatPolytope:
    """Convex hull of finitely many rational points of Q^dim.

    Construct with any generating set; ``vertices`` is replaced by the sorted
    tuple of extreme points, so equality is syntactic.
    """

    dim: int
    vertices: tuple[RatVector, ...]

    def __post_init__(self):
        pts = [_frac_vec(v) for v in self.vertices]
        if not pts:
            raise ValueError("empty polytope")
        if any(len(p) != self.dim for p in pts):
            raise ValueError(f"points must lie in Q^{self.dim}")
        L, ipts = _scale_to_int(pts)
        verts = _int_vertices(ipts)
        object.__setattr__(self, "vertices",
                           tuple(tuple(Fraction(x, L) for x in v) for v in verts))

    @classmethod
    def hull(cls, points: Sequence[Sequence], dim: int | None = None) -> "RatPolytope":
        points = list(points)
        return cls(dim if dim is not None else len(points[0]), tuple(map(tuple, points)))

    @classmethod
    def point(cls, p: Sequence) -> "RatPolytope":
        return cls.hull([p])

    @classmethod
    def segment(cls, a: Sequence, b: Sequence) -> "RatPolytope":
        return cls.hull([a, b])

    @classmethod
    def simplex(cls, p: int) -> "RatPolytope":
        pts = [tuple(0 for _ in range(p))]
        pts += [tuple(int(i == j) for j in range(p)) for i in range(p)]
        return cls.hull(pts, p)

    @classmethod
    def cube(cls, p: int) -> "RatPolytope":
        return cls.hull(list(product((0, 1), repeat=p)), p)

    def scaled(self, s) -> "RatPolytope":
        s = Fraction(s)
        return RatPolytope(self.dim, tuple(tuple(s * x for x in v) for v in self.vertices))

    def translated(self, t: Sequence) -> "RatPolytope":
        return RatPolytope(self.dim, tuple(tuple(x + Fraction(y) for x, y in zip(v, t))
                                           for v in self.vertices))

    def image(self, M: Sequence[Sequence]) -> "RatPolytope":
        """Image under the linear map x -> M x (M has ``dim`` columns)."""
        rows = len(M)
        return RatPolytope(rows, tuple(tuple(sum(Fraction(a) * x for a, x in zip(row, v)) for row in M)
                                       for v in self.vertices))

    def volume(self) -> Fraction:
        return hull_volume(self)

    def affine_dim(self) -> int:
        L, ipts = _scale_to_int(self.vertices)
        return _affine_rank(ipts)

    def __contains__(self, x) -> bool:
        x = _frac_vec(x)
        return RatPolytope(self.dim, self.vertices + (x,)).vertices == self.vertices \
            or x in self.vertices

    def issubset(self, other: "RatPolytope") -> bool:
        return all(v in other for v in self.vertices)


def hull_volume(Q: RatPolytope) -> Fraction:
    """Exact ``dim``-dimensional Euclidean volume (0 for degenerate hulls)."""
    L, ipts = _scale_to_int(Q.vertices)
    return _int_volume(tuple(ipts)) / Fraction(L) ** Q.dim


def minkowski_sum(Q1: RatPolytope, Q2: RatPolytope) -> RatPolytope:
    if Q1.dim != Q2.dim:
        raise ValueError("Minkowski sum of polytopes of different dimensions")
    return RatPolytope(Q1.dim, tuple(tuple(a + b for a, b in zip(u, v))
                                     for u in Q1.vertices for v in Q2.vertices))


def mixed_volume(*Qs: RatPolytope) -> Fraction:
    """MV(Q_1, ..., Q_p) by inclusion-exclusion over sums of subfamilies.

    Repeated arguments are grouped: a subfamily containing s copies of P
    contributes s*P, which equals the s-fold Minkowski sum.
    """
    if len(Qs) == 1 and isinstance(Qs[0], (list, tuple)):
        Qs = tuple(Qs[0])
    p = len(Qs)
    if p == 0 or any(Q.dim != p for Q in Qs):
        raise ValueError("mixed volume needs p polytopes in Q^p")
    groups = list(Counter(Qs).items())
    total = Fraction(0)
    for counts in product(*(range(k + 1) for _, k in groups)):
        j = sum(counts)
        if j == 0:
            continue
        mult = math.prod(math.comb(k, s) for (_, k), s in zip(groups, counts))
        acc = None
        for (P, _), s in zip(groups, counts):
            if s == 0:
                continue
            term = P if s == 1 else P.scaled(s)
            acc = term if acc is None else minkowski_sum(acc, term)
        total += (-1) ** (p - j) * mult * hull_volume(acc)
    return total


def orthogonal_projection(Q: RatPolytope, v: Sequence) -> RatPolytope:
    """Image of Q under the orthogonal projection onto v-perp (stays in Q^p)."""
    v = _frac_vec(v)
    vv = sum(x * x for x in v)
    pts = []
    for x in Q.vertices:
        s = sum(a * b for a, b in zip(x, v)) / vv
        pts.append(tuple(a - s * b for a, b in zip(x, v)))
    return RatPolytope(Q.dim, tuple(pts))


def prism_degree(Q: RatPolytope, v: Sequence) -> Fraction:
    """(p-1)! Vol_{p-1}(pi_v(Q)) ||v||, computed as (p-1)! times the volume of
    the orthogonal prism pi_v(Q) + [0, v] so no square root ever appears.

    For p = 1 the projection is a point of volume 1 and the value is |v|.
    """
    v = _frac_vec(v)
    if len(v) != Q.dim:
        raise ValueError("direction must lie in Q^p")
    if not any(v):
        raise ValueError("direction must be nonzero")
    if Q.dim == 1:
        return abs(v[0])
    base = orthogonal_projection(Q, v)
    prism = RatPolytope(Q.dim, base.vertices + tuple(tuple(a + b for a, b in zip(x, v))
                                                    for x in base.vertices))
    return math.factorial(Q.dim - 1) * hull_volume(prism)


@dataclass(frozen=True)
class FacetData:
    """Outer primitive normal ``normal``, and ``weight`` = Vol_{p-1}(F)/||normal||."""

    normal: tuple[int, ...]
    weight: Fraction


def facet_weights(Q: RatPolytope) -> list[FacetData]:
    """Facets of a full-dimensional polytope with their normalised volumes.

    The segment mixed volume has the closed form
    MV([0, w], Q, ..., Q) = (p-1)! * sum_F weight_F * max(0, <normal_F, w>).
    """
    p = Q.dim
    L, ipts = _scale_to_int(Q.vertices)
    if p == 1:
        return [FacetData((1,), Fraction(1)), FacetData((-1,), Fraction(1))]
    if _affine_rank(ipts) < p:
        return []
    out = []
    for f in _full_hull(sorted(set(ipts))):
        k = next(i for i, x in enumerate(f.normal) if x)
        face = tuple(sorted({pt[:k] + pt[k + 1:] for pt in f.points}))
        w = _int_volume(face) / abs(f.normal[k]) / Fraction(L) ** (p - 1)
        out.append(FacetData(f.normal, w))
    return out


def segment_mixed_volume(weights: list[FacetData], w: Sequence, p: int) -> Fraction:
    """MV([0, w], Q, ..., Q) from precomputed ``facet_weights(Q)``."""
    s = sum(f.weight * max(0, sum(a * Fraction(b) for a, b in zip(f.normal, w))) for f in weights)
    return math.factorial(p - 1) * s
