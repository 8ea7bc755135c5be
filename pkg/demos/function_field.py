"""Heights over Q(t): everything exact."""

from torusheight.function_field import (FFPoint, FFTranslate, HyperForm, RatFun,
                                        ff_bezout_split_check, ff_essmin_upper_sample,
                                        ff_point_height, ff_torsion_closure, ff_verify_bounds,
                                        ord_matrix, t, xvars)
from torusheight.lattice import Sublattice

alpha = (RatFun.from_expr(t**2), RatFun.from_expr(t**3))
print(ff_point_height(FFPoint.affine(alpha)))  # 3
O = ord_matrix(alpha)
print(O.place_labels(), O.rows)  # zeros at t, poles at infinity

X = FFTranslate(2, Sublattice.full(2), alpha)
print(ff_torsion_closure(X).translate.gamma.basis)  # t^6 / t^6 is constant
rep = ff_verify_bounds(X, samples=8, seed=1)
print(rep.to_dict()["bound_decimal"], rep.heights, rep.holds)

roots = [RatFun.from_expr(t**2), RatFun.from_expr(t + 1)]
print(ff_bezout_split_check(roots))  # deg_t 3 = 2 + 1

x0, x1, x2 = xvars(2)
curve = HyperForm(2, x1 * x2 - t * x0**2)
print(ff_essmin_upper_sample(curve, trials=4, seed=0).to_dict())  # witnesses <= 1/2
