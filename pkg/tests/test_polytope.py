import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from torusheight.polytope import (RatPolytope, facet_weights, hull_volume, minkowski_sum,
                                  mixed_volume, prism_degree, segment_mixed_volume)

PENTAGON = RatPolytope.hull([(0, 0), (1, 0), (2, 1), (1, 2), (0, 1)])
TRIANGLE = RatPolytope.simplex(2)
E1 = RatPolytope.segment((0, 0), (1, 0))
E2 = RatPolytope.segment((0, 0), (0, 1))
DIAG = RatPolytope.segment((0, 0), (1, 1))


def lattice_polytopes(p, max_points=5, bound=2):
    pts = st.lists(st.tuples(*[st.integers(-bound, bound)] * p), min_size=1, max_size=max_points)
    return pts.map(lambda ps: RatPolytope.hull(ps, p))


def shoelace(vertices):
    # vertices in cyclic order
    n = len(vertices)
    return abs(sum(vertices[i][0] * vertices[(i + 1) % n][1] - vertices[(i + 1) % n][0] * vertices[i][1]
                   for i in range(n))) / Fraction(2)


class TestVolume:
    @pytest.mark.parametrize("p", [1, 2, 3, 4])
    def test_simplex(self, p):
        assert hull_volume(RatPolytope.simplex(p)) == Fraction(1, math.factorial(p))

    def test_square(self):
        assert hull_volume(RatPolytope.cube(2)) == 1

    def test_pentagon(self):
        assert hull_volume(PENTAGON) == Fraction(5, 2)
        assert hull_volume(PENTAGON) == shoelace([(0, 0), (1, 0), (2, 1), (1, 2), (0, 1)])

    def test_degenerate(self):
        assert hull_volume(RatPolytope.segment((0, 0, 0), (1, 2, 3))) == 0

    def test_redundant_points_dropped(self):
        Q = RatPolytope.hull([(0, 0), (2, 0), (0, 2), (1, 1), (Fraction(1, 2), Fraction(1, 3))])
        assert len(Q.vertices) == 3 and Q == RatPolytope.hull([(0, 2), (2, 0), (0, 0)])

    def test_rational_vertices(self):
        assert hull_volume(RatPolytope.cube(3).scaled(Fraction(1, 2))) == Fraction(1, 8)


class TestMinkowskiSum:
    def test_identity(self):
        assert minkowski_sum(PENTAGON, RatPolytope.point((0, 0))) == PENTAGON

    def test_square(self):
        assert minkowski_sum(E1, E2) == RatPolytope.cube(2)

    def test_pentagon(self):
        assert minkowski_sum(DIAG, TRIANGLE) == PENTAGON

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            minkowski_sum(E1, RatPolytope.simplex(3))


class TestMixedVolume:
    def test_examples(self):
        assert mixed_volume(E1, E2) == 1
        assert mixed_volume(DIAG, TRIANGLE) == 2
        for p in (1, 2, 3):
            Q = RatPolytope.simplex(p).scaled(2)
            assert mixed_volume(*[Q] * p) == math.factorial(p) * hull_volume(Q)

    def test_single_segment_is_length(self):
        assert mixed_volume(RatPolytope.segment((-1,), (3,))) == 4

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            mixed_volume(E1, E2, E1)

    @settings(max_examples=15, deadline=None)
    @given(lattice_polytopes(3, 4), lattice_polytopes(3, 4), lattice_polytopes(3, 4))
    def test_symmetric(self, A, B, C):
        values = {mixed_volume(*perm) for perm in itertools.permutations((A, B, C))}
        assert len(values) == 1

    @settings(max_examples=25, deadline=None)
    @given(lattice_polytopes(2), lattice_polytopes(2), lattice_polytopes(2))
    def test_multilinear(self, A, A2, B):
        assert mixed_volume(minkowski_sum(A, A2), B) == mixed_volume(A, B) + mixed_volume(A2, B)

    @settings(max_examples=25, deadline=None)
    @given(lattice_polytopes(2), lattice_polytopes(2), lattice_polytopes(2))
    def test_monotone(self, A, extra, B):
        bigger = RatPolytope.hull(A.vertices + extra.vertices, 2)
        assert mixed_volume(A, B) <= mixed_volume(bigger, B)

    @settings(max_examples=25, deadline=None)
    @given(lattice_polytopes(3, 4), lattice_polytopes(3, 4), lattice_polytopes(3, 4))
    def test_integral_nonnegative(self, A, B, C):
        v = mixed_volume(A, B, C)
        assert v.denominator == 1 and v >= 0


class TestPrismDegree:
    def test_examples(self):
        assert prism_degree(TRIANGLE, (1, 1)) == 2
        assert prism_degree(RatPolytope.segment((0,), (5,)), (-3,)) == 3
        assert prism_degree(RatPolytope.cube(2), (1, 0)) == 1

    def test_zero_direction(self):
        with pytest.raises(ValueError):
            prism_degree(TRIANGLE, (0, 0))

    @settings(max_examples=40, deadline=None)
    @given(st.integers(1, 4).flatmap(lambda p: st.tuples(
        lattice_polytopes(p, 6), st.tuples(*[st.integers(-3, 3)] * p))))
    def test_segment_identity(self, args):
        Q, v = args
        if not any(v):
            return
        p = Q.dim
        seg = RatPolytope.segment((0,) * p, v)
        mv = mixed_volume(seg, *[Q] * (p - 1))
        assert mv == prism_degree(Q, v)
        if Q.affine_dim() == p:
            assert segment_mixed_volume(facet_weights(Q), v, p) == mv
