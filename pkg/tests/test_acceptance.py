"""One test per acceptance criterion.  Each prints a single PASS/FAIL line
and the lines are repeated in the terminal summary."""

import itertools
import math
import random
import time
from fractions import Fraction

import sympy

from torusheight.function_field import (ff_bezout_split_check, ff_essmin_upper_sample,
                                        ff_verify_bounds, ord_matrix, product_formula_holds)
from torusheight.heights import (ABELIAN, AlgebraicNumber, SCHINZEL, is_root_of_unity,
                                 mahler_height, thm13_bound)
from torusheight.lattice import (QuotientLattice, Sublattice, elementary_divisors, kernel_basis,
                                 rational_rank, saturate)
from torusheight.randgen import (random_divisor_instance, random_ff_translate, random_nested_pair,
                                 random_plane_curve, random_ratfun, random_saturated)
from torusheight.reals import certified_le
from torusheight.torus import (CharacterPresentation, TorusTranslate, degree_bounds_eq6,
                               degree_routes, hadamard_product, kernel_from_parametrization,
                               minkowski_check, obstruction_degree, obstruction_upper_bounds,
                               parametrization_from_kernel, sandwich_ratio, torsion_closure)

from oracles import worked_example

SEED = 20261014


def divisor_instances(count=200):
    rng = random.Random(f"{SEED}:divisor")
    return [random_divisor_instance(rng, max_n=5, max_p=4, bound=4) for _ in range(count)]


def test_criterion_1_dual_route_degree(criterion):
    start = time.perf_counter()
    cases = divisor_instances()
    bad = [(g.basis, lam) for g, lam in cases
           if (r := degree_routes(g, lam))["mixed_volume"] != r["prism"]
           or r["mixed_volume"].denominator != 1]
    secs = time.perf_counter() - start
    ok = not bad and secs <= 60 and len(cases) >= 200
    criterion(1, ok, f"{len(cases)} instances, {len(bad)} disagreements, {secs:.1f}s (budget 60s)")
    assert ok, bad[:3]


def test_criterion_2_degree_sandwiches(criterion):
    cases = divisor_instances()
    bad = []
    for g, lam in cases:
        lo, mid, hi = sandwich_ratio(g, lam)
        if not lo <= mid <= hi:
            bad.append((g.basis, lam))
    rng = random.Random(f"{SEED}:covolume")
    covolume_bad = 0
    for _ in range(120):
        N = rng.randint(1, 5)
        g = random_saturated(rng, N, rng.randint(0, N - 1), 4)
        lower, deg, upper = degree_bounds_eq6(g)
        covolume_bad += not (lower <= deg * deg <= upper)
    ok = not bad and not covolume_bad
    criterion(2, ok, f"divisor sandwich {len(cases) - len(bad)}/{len(cases)}, "
                     f"covolume sandwich {120 - covolume_bad}/120")
    assert ok


def test_criterion_3_first_minimum_and_obstruction_bounds(criterion):
    rng = random.Random(f"{SEED}:quotients")
    mink_bad, c3_bad, chain_bad, coarse_bad = 0, 0, 0, 0
    count = 120
    for _ in range(count):
        gx, gy = random_nested_pair(rng, max_n=5, max_p=4, bound=3)
        _, ok = minkowski_check(QuotientLattice(gx, gy))
        mink_bad += not ok
        r = obstruction_upper_bounds(TorusTranslate.subtorus(gx), TorusTranslate.subtorus(gy))
        c3_bad += not r["holds_c3"]
        chain_bad += not r["holds_chain_constant"]
        coarse_bad += not r["holds_coarse"]
    ok = not (mink_bad or c3_bad or coarse_bad or chain_bad)
    criterion(3, ok, f"{count} quotients: Minkowski {count - mink_bad}, c3 {count - c3_bad}, "
                     f"chained c3 {count - chain_bad}, coarse {count - coarse_bad}")
    assert ok


def test_criterion_4_worked_example(criterion):
    ref = worked_example()
    pres = CharacterPresentation(2, 1, (), ("2",), ((2,), (3,)), (Fraction(2),))
    X = TorusTranslate(2, Sublattice.full(2), pres)
    U = torsion_closure(X).translate
    ob = obstruction_degree(X, U)
    rep = thm13_bound(X, "log2")
    headline = float(rep.bounds["headline"])
    monomial = float(rep.bounds["monomial_form"])
    formula = 2 / math.sqrt(18) * math.log(2) * 3
    monomial_formula = 2 / 3 * math.log(2) * math.sqrt(13)
    checks = {
        "closure lattice": U.gamma == Sublattice.span([ref["closure_generator"]]) == Sublattice.span([[3, -2]]),
        "deg U": rep.deg_u == ref["deg_u"] == 3,
        "omega": ob.omega == ref["omega"] == 1,
        "minimizer": ob.minimizer in ((1, -1), (-1, 1)) and list(ob.minimizer) in map(list, ref["minimizers"]),
        "headline formula": abs(headline - formula) <= 1e-9 and abs(headline - ref["headline"]) <= 1e-9,
        # the listed decimal 0.9803 is the formula rounded to four places
        "headline rounds to 0.9803": round(headline, 4) == 0.9803,
        "log 8 >= headline": rep.holds["headline"] is True,
        "monomial form": abs(monomial - monomial_formula) <= 1e-9 and abs(monomial - ref["monomial_form"]) <= 1e-9,
        "monomial form <= log 8": rep.holds["monomial_form"] is True,
    }
    ok = all(checks.values())
    criterion(4, ok, f"headline {headline:.10f}, monomial form {monomial:.10f}; "
                     + ", ".join(k for k, v in checks.items() if not v) if not ok else
              f"headline {headline:.10f} (= 2/sqrt18 log2 3), monomial form {monomial:.10f} <= log 8")
    assert ok, checks


def test_criterion_5_mahler_constants(criterion):
    h = mahler_height(AlgebraicNumber((1, -1, -1)))
    golden = 0.5 * math.log((1 + math.sqrt(5)) / 2)
    golden_ok = (h.width < Fraction(1, 10**12) and abs(float(h) - golden) < 1e-12
                 and certified_le(h.lo, SCHINZEL) and certified_le(SCHINZEL, h.hi))
    x = sympy.Symbol("x")
    cyclo_bad = []
    for n in range(1, 61):
        coeffs = tuple(int(a) for a in sympy.Poly(sympy.cyclotomic_poly(n, x), x).all_coeffs())
        A = AlgebraicNumber(coeffs)
        hc = mahler_height(A)
        if not (hc.lo == hc.hi == 0 and is_root_of_unity(A)):
            cyclo_bad.append(n)
    abelian_ok = abs(float(ABELIAN) - math.log(5) / 12) < 1e-12
    ok = golden_ok and not cyclo_bad and abelian_ok
    criterion(5, ok, f"golden ratio |diff| {abs(float(h) - golden):.1e}, width {float(h.width):.1e}; "
                     f"cyclotomic orders 1..60 zero: {not cyclo_bad}; log5/12 ok: {abelian_ok}")
    assert ok


def test_criterion_6_function_field(criterion):
    start = time.perf_counter()
    rng = random.Random(f"{SEED}:ff")
    pf_bad = pf_count = 0
    violations = nonvacuous = drawn = 0
    # vacuous translates (defined over the constants) do not count towards the 100
    while nonvacuous < 110:
        X = random_ff_translate(rng, max_n=4)
        O = ord_matrix(X.point)
        pf_count += 1
        pf_bad += not product_formula_holds(O)
        rep = ff_verify_bounds(X, samples=3, seed=drawn)
        drawn += 1
        nonvacuous += not rep.vacuous
        violations += len(rep.violations)
    for _ in range(100):
        alpha = [random_ratfun(rng) for _ in range(rng.randint(1, 4))]
        if all(not a.is_zero() for a in alpha):
            pf_count += 1
            pf_bad += not product_formula_holds(ord_matrix(alpha))
    split_bad = 0
    for _ in range(110):
        split_bad += not ff_bezout_split_check([random_ratfun(rng) for _ in range(rng.randint(1, 3))]).holds
    essmin_bad = 0
    curves = 22
    for i in range(curves):
        rep = ff_essmin_upper_sample(random_plane_curve(rng), trials=2, seed=i)
        essmin_bad += not (rep.holds and all(w <= Fraction(rep.h, rep.deg) for w in rep.witnesses))
    secs = time.perf_counter() - start
    ok = (not pf_bad and not violations and not split_bad and not essmin_bad
          and nonvacuous >= 100 and secs <= 120)
    criterion(6, ok, f"product formula {pf_count - pf_bad}/{pf_count}; bound violations {violations} "
                     f"over {nonvacuous} non-vacuous translates; split forms {110 - split_bad}/110; "
                     f"plane curves {curves - essmin_bad}/{curves}; {secs:.1f}s (budget 120s)")
    assert ok


def test_criterion_7_positive_hadamard_square(criterion):
    rng = random.Random(f"{SEED}:hadamard")
    count, bad = 60, 0
    for _ in range(count):
        N = rng.randint(1, 4)
        bases = rng.sample([2, 3, 5, 7], rng.randint(1, 3))
        coords = []
        for _ in range(N):
            q = Fraction(1)
            for b in bases:
                q *= Fraction(b) ** rng.randint(-2, 2)
            coords.append(q)
        X = TorusTranslate.from_rational_point(coords)
        bad += not torsion_closure(hadamard_product(X, X)).is_subtorus
    ok = not bad
    criterion(7, ok, f"{count - bad}/{count} squares have a subtorus closure")
    assert ok


def test_criterion_8_exhaustive_saturated_z3(criterion):
    box = [v for v in itertools.product(range(-2, 3), repeat=3)]
    nonzero = [v for v in box if any(v)]
    lattices = {Sublattice.zero(3), Sublattice.full(3)}
    spans = []
    for r in (1, 2):
        for vecs in itertools.combinations(nonzero, r):
            if rational_rank(vecs) < r:
                continue
            g = Sublattice.span(vecs, 3)
            spans.append(g)
            if elementary_divisors(vecs, 3) == [1] * r:
                lattices.add(g)
    bad = []
    for g in spans:
        s = saturate(g)
        if not (s.saturated and saturate(s) == s and s.rank == g.rank and s.contains_lattice(g)):
            bad.append(("saturate", g.basis))
    for g in lattices:
        if not (g.saturated and saturate(g) == g):
            bad.append(("saturated fixed point", g.basis))
        B = parametrization_from_kernel(g)
        if not B.generates() or kernel_from_parametrization(B) != g:
            bad.append(("round trip", g.basis))
        if B.p and kernel_basis(B.matrix, 3) != g:
            bad.append(("kernel of M_B", g.basis))
    ok = not bad
    criterion(8, ok, f"{len(lattices)} saturated lattices, {len(spans)} spans checked, {len(bad)} failures")
    assert ok, bad[:3]
