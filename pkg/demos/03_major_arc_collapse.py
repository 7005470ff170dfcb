"""The major-arc collapse, verified exactly at jet orders 1 and 2.

Grouping the dual sum by minimal divisors and collapsing the top jet layer
leaves exactly p^((n+1)(e+1)) times the full dual sum one layer down; the
pair version squares the factor.  Both sides are computed independently
(the left through divisor-grouped class sums, the right through the
lower-layer transform) and compared as cyclotomic integers.
"""

import time

from jetsums.expsums import check_major_identity
from jetsums.forms import conic_form

F = conic_form(3)

for m, pairs in [(1, False), (1, True), (2, False), (2, True)]:
    t0 = time.time()
    rep = check_major_identity(F, 2, m, pairs=pairs)
    kind = "pairs  " if pairs else "singles"
    print(
        f"m={m} {kind}: {rep.verdict:>5}  factor p^{rep.params['factor_exponent']}"
        f"  ({time.time() - t0:.1f}s)"
    )

print()
print("the identity holds even though boundary functionals factor through")
print("several minimal divisors: their sums vanish, so the multiplicity in")
print("the divisor-grouped double sum costs nothing")
