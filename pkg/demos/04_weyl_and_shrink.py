"""Squaring bounds for the sums and the degree-shrinking inequality.

The squaring (differencing) bound compares |S(alpha)|^(2^(d-2)) against a
power of the section-space size times a multilinear zero count; magnitudes
are rigorous interval enclosures, the right side is an exact rational.
The shrinking inequality compares the zero counts before and after cutting
the tuple degree by s, against the exact power p^((k+1)(d-1)(n+1)s).
"""

import random

from jetsums.expsums import check_shrink, check_weyl, dual_from_code, weyl_alpha_sample
from jetsums.forms import conic_form, fermat_form
from jetsums.sections import DualFunctional

F = conic_form(3)
print("squaring bound at the conic, e = 2, m = 1 (tightness = lhs/rhs)")
for alpha in weyl_alpha_sample(F, 2, 1, max_degree=0, extra=4, seed=2):
    rep = check_weyl(F, 2, 1, alpha)
    print(f"  deg-{'0' if not any(alpha.flat()[:5]) else '?'} alpha "
          f"{alpha.flat()}: {rep.verdict}, tightness {rep.tightness:.2e}")

print()
print("degree-3 instance (two variables, pure cubes) with |S|^2")
F5 = fermat_form(5, 1, 3)
for alpha in weyl_alpha_sample(F5, 1, 1, max_degree=0, extra=3, seed=3):
    rep = check_weyl(F5, 1, 1, alpha)
    print(f"  alpha {alpha.flat()}: {rep.verdict}, tightness {rep.tightness:.2e}")

print()
print("shrinking: zero functional makes the bound exactly tight")
zero = DualFunctional.zero(3, 4, 0)
rep = check_shrink(F, 2, zero, 0, 1)
print(f"  alpha = 0: {rep.verdict}, ratio/bound = {rep.tightness}")
rng = random.Random(4)
worst = 0.0
for _ in range(20):
    alpha = dual_from_code(3, 4, 0, rng.randrange(3**5))
    rep = check_shrink(F, 2, alpha, 0, 1)
    assert rep.verdict == "holds"
    worst = max(worst, rep.tightness or 0)
print(f"  20 random functionals hold; worst ratio/bound = {worst:.3f}")
