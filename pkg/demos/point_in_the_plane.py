"""The point (4, 8) of G_m^2, end to end."""

from fractions import Fraction

from torusheight.heights import cor15_bound, thm13_bound
from torusheight.lattice import Sublattice
from torusheight.reals import fmt
from torusheight.torus import (CharacterPresentation, TorusTranslate, obstruction_degree,
                               torsion_closure, translate_degree)

# (4, 8) = (2^2, 2^3), presented over the single generator 2
pres = CharacterPresentation(2, 1, (), ("2",), ((2,), (3,)), (Fraction(2),))
X = TorusTranslate(2, Sublattice.full(2), pres)

closure = torsion_closure(X)
U = closure.translate
print("closure lattice", U.gamma.basis, "subtorus:", closure.is_subtorus)  # x^3 = y^2
print("deg U", translate_degree(U))  # cuspidal cubic

ob = obstruction_degree(X, U)
print("omega", ob.omega, "at", ob.minimizer, "norm^2", ob.norm_sq)

rep = thm13_bound(X, "log2")
for name, value in rep.bounds.items():
    f = fmt(value)
    print(f"{name:16s} {f['decimal']:.10f}  {f.get('exact', '')}")
print("holds", rep.holds)

rep = cor15_bound(X, "log2")
print("codimension bound", float(rep.bounds["printed"]))  # 3/16 log 2
