"""Mixed volumes, prisms and the degree of a monomial curve."""

from torusheight.polytope import RatPolytope, hull_volume, minkowski_sum, mixed_volume, prism_degree
from torusheight.lattice import Sublattice
from torusheight.torus import binomial_divisor_degree, degree_routes, translate_degree

tri = RatPolytope.simplex(2)
diag = RatPolytope.segment((0, 0), (1, 1))
pent = minkowski_sum(diag, tri)
print(pent.vertices)  # five vertices
print(hull_volume(pent))  # 5/2
print(mixed_volume(diag, tri), prism_degree(tri, (1, 1)))  # both 2

twisted = Sublattice.span([[2, -1, 0], [3, 0, -1]])  # t -> (t, t^2, t^3)
print("degree", translate_degree(twisted))  # 3
for lam in [(1, 0, 0), (0, 1, 0), (1, 1, 1), (2, 0, 1)]:  # degree |l1 + 2 l2 + 3 l3|
    r = degree_routes(twisted, lam)
    print(lam, r["mixed_volume"], r["prism"], binomial_divisor_degree(twisted, lam))
