import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from torusheight.lattice import (EmptyQuotientError, QuotientLattice, Sublattice, covolume_sq,
                                 elementary_divisors, first_minimum, hermite_normal_form,
                                 kernel_basis, matmul, minkowski_bound_sq, minkowski_bound_sq_exact,
                                 quotient_norm_sq, saturate, smith_normal_form)
from torusheight.reals import lohi, mpf_to_fraction

from oracles import brute_first_minimum, projection_norm_sq

DATA = json.loads((Path(__file__).parent / "data" / "oracle_cases.json").read_text())

matrices = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.integers(-5, 5), min_size=n, max_size=n), min_size=1, max_size=4))


def _det(M):
    from torusheight.lattice import det
    return det(M)


class TestSmith:
    def test_identity(self):
        U, D, V = smith_normal_form([[1, 0], [0, 1]])
        assert [list(r) for r in D] == [[1, 0], [0, 1]]

    def test_diag_2_3(self):
        U, D, V = smith_normal_form([[2, 0], [0, 3]])
        assert [D[0][0], D[1][1]] == [1, 6]
        assert [list(r) for r in matmul(matmul(U, [[2, 0], [0, 3]]), V)] == [list(r) for r in D]

    def test_zero(self):
        U, D, V = smith_normal_form([[0, 0], [0, 0]])
        assert all(x == 0 for r in D for x in r)
        assert [list(r) for r in U] == [[1, 0], [0, 1]] and [list(r) for r in V] == [[1, 0], [0, 1]]

    @settings(max_examples=60, deadline=None)
    @given(matrices)
    def test_unimodular_and_divisibility(self, M):
        n = len(M[0])
        U, D, V = smith_normal_form(M, n)
        assert [list(r) for r in matmul(matmul(U, M), V)] == [list(r) for r in D]
        assert abs(_det(U)) == 1 and abs(_det(V)) == 1
        diag = [D[i][i] for i in range(min(len(M), n))]
        nz = [d for d in diag if d]
        assert all(b % a == 0 for a, b in zip(nz, nz[1:]))
        assert all(d >= 0 for d in diag)


class TestSaturate:
    def test_examples(self):
        assert saturate(Sublattice.span([[2, 0]])).basis == ((1, 0),)
        assert saturate(Sublattice.span([[2, 4]])).basis == ((1, 2),)
        g = Sublattice.span([[3, -2]])
        assert g.saturated and saturate(g) == g

    @settings(max_examples=60, deadline=None)
    @given(matrices)
    def test_idempotent_same_rank(self, M):
        if not any(any(r) for r in M):
            return
        g = Sublattice.span(M, len(M[0]))
        s = saturate(g)
        assert s.saturated and s.rank == g.rank and saturate(s) == s
        assert s.contains_lattice(g)

    @settings(max_examples=60, deadline=None)
    @given(matrices)
    def test_covolume_index_identity(self, M):
        if not any(any(r) for r in M):
            return
        g = Sublattice.span(M, len(M[0]))
        assert covolume_sq(saturate(g)) * g.index_in_saturation() ** 2 == covolume_sq(g)


class TestKernel:
    def test_examples(self):
        assert kernel_basis([[2, 3]], 2) == Sublattice.span([[3, -2]])
        assert kernel_basis([[1, 0], [0, 1]], 2).rank == 0
        K = kernel_basis([[1, 1, 1]], 3)
        assert K.rank == 2 and (1, -1, 0) in K and (0, 1, -1) in K

    @settings(max_examples=60, deadline=None)
    @given(matrices)
    def test_always_saturated(self, M):
        n = len(M[0])
        K = kernel_basis(M, n)
        assert K.saturated
        if K.rank:
            assert elementary_divisors(K.basis, n) == [1] * K.rank
        assert all(sum(a * b for a, b in zip(r, v)) == 0 for r in M for v in K.basis)


def test_covolume_examples():
    assert covolume_sq(Sublattice.full(2)) == 1
    assert covolume_sq(Sublattice.span([[3, -2]])) == 13
    assert covolume_sq(Sublattice.span([[1, 1, 0], [0, 1, 1]])) == 3


def test_hnf_canonical():
    a = hermite_normal_form([[1, 1, 1], [0, 1, 2]], 3)
    b = hermite_normal_form([[1, 2, 3], [1, 1, 1]], 3)
    assert a == b


class TestQuotient:
    q = QuotientLattice(Sublattice.full(2), Sublattice.span([[3, -2]]))

    def test_norm_examples(self):
        assert quotient_norm_sq(self.q, (-1, 1)) == Fraction(1, 13)
        assert quotient_norm_sq(self.q, (3, -2)) == 0
        q0 = QuotientLattice(Sublattice.full(3), Sublattice.zero(3))
        assert quotient_norm_sq(q0, (1, 2, 2)) == 9

    def test_rejects_lambda_outside(self):
        q = QuotientLattice(Sublattice.span([[1, 1]]), Sublattice.zero(2))
        with pytest.raises(ValueError):
            quotient_norm_sq(q, (1, 0))

    def test_rejects_non_nested(self):
        with pytest.raises(ValueError):
            QuotientLattice(Sublattice.span([[1, 0]]), Sublattice.span([[0, 1]]))

    def test_first_minimum_examples(self):
        lam, m = first_minimum(self.q)
        assert m == Fraction(1, 13) and lam in ((1, -1), (-1, 1))
        assert first_minimum(QuotientLattice(Sublattice.full(2), Sublattice.zero(2)))[1] == 1
        assert first_minimum(QuotientLattice(Sublattice.span([[2, 1]]), Sublattice.zero(2)))[1] == 5

    def test_tie_break_is_canonical(self):
        # minimal classes of Z^2: +-e1, +-e2; canonical choice is positive and lex-smallest
        lam, _ = first_minimum(QuotientLattice(Sublattice.full(2), Sublattice.zero(2)))
        assert lam == (0, 1)

    def test_empty_quotient(self):
        g = Sublattice.span([[1, 1]])
        with pytest.raises(EmptyQuotientError):
            first_minimum(QuotientLattice(g, g))

    def test_minkowski_examples(self):
        assert minkowski_bound_sq_exact(self.q) == Fraction(1, 13)
        lo, hi = map(mpf_to_fraction, lohi(minkowski_bound_sq(self.q)))
        assert lo <= Fraction(1, 13) <= hi and hi - lo < Fraction(1, 10**30)
        q2 = QuotientLattice(Sublattice.full(2), Sublattice.zero(2))
        lo, hi = lohi(minkowski_bound_sq(q2))
        assert abs(float(lo) - 1.2732395447351628) < 1e-12 and lo <= hi
        q4 = QuotientLattice(Sublattice.span([[2, 0]]), Sublattice.zero(2))
        assert minkowski_bound_sq_exact(q4) == 4

    def test_multiplicativity(self):
        gx = Sublattice.span([[1, 0, 1], [0, 1, 1]])
        gy = Sublattice.span([[1, 1, 2]])
        q = QuotientLattice(gx, gy)
        assert q.covolume_sq() == Fraction(covolume_sq(gx), covolume_sq(gy))


@pytest.mark.parametrize("case", DATA["quotients"], ids=lambda c: str(c["gamma_x"]))
def test_first_minimum_matches_brute_force(case):
    N = len(case["gamma_x"][0])
    gy = Sublattice.span(case["gamma_y"], N) if case["gamma_y"] else Sublattice.zero(N)
    _, m = first_minimum(QuotientLattice(Sublattice.span(case["gamma_x"]), gy))
    assert m == Fraction(case["first_minimum_sq"])


def test_brute_force_oracle_is_live():
    # the frozen data must still come out of the oracle
    case = DATA["quotients"][0]
    assert brute_first_minimum(case["gamma_x"], case["gamma_y"], box=4) == Fraction(case["first_minimum_sq"])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=3, max_size=3),
       st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_quotient_norm_periodic_against_oracle(lam, shift):
    gy = Sublattice.span([[1, 2, 0], [0, 1, -1]])
    q = QuotientLattice(Sublattice.full(3), gy)
    moved = [l + shift[0] * a + shift[1] * b for l, a, b in zip(lam, (1, 2, 0), (0, 1, -1))]
    n = quotient_norm_sq(q, lam)
    assert n == quotient_norm_sq(q, moved) == projection_norm_sq(lam, [[1, 2, 0], [0, 1, -1]])
    assert (n == 0) == (tuple(lam) in gy)
