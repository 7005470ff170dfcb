"""Acceptance suite: one test per criterion, exact arithmetic throughout.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
PASS lines and timings.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from jetsums.arith import Cyclo, Jet, psi_m
from jetsums.bounds import (
    calibration_passed,
    calibration_report,
    certify,
    degree_floor,
    genus_slack,
    variable_threshold,
)
from jetsums.counting import (
    count_jet_multilinear,
    count_solutions,
    count_tangent_pairs,
)
from jetsums.expsums import (
    check_major_identity,
    check_orthogonality,
    check_weyl,
    divisor_table,
    dual_from_code,
    n_count,
    t_vanishing_report,
    weyl_alpha_sample,
)
from jetsums.forms import (
    conic_form,
    fermat_form,
    gradient,
    make_form,
    multilinear_psi_sections,
    difference_apply,
)
from jetsums.sections import (
    DualFunctional,
    JetPoly,
    minimal_divisor,
    mul_sections,
)


def _announce(name: str, started: float, limit: float, detail: str = ""):
    elapsed = time.time() - started
    print(f"PASS {name}: {detail} [{elapsed:.1f}s / limit {limit:.0f}s]")
    assert elapsed < limit


def test_criterion_1_degree2_exact_identity():
    start = time.time()
    for g in range(1, 101):
        f = genus_slack(g)
        value = 2 * Fraction(56 * g + 21 * f - 7) / (16 * g + 6 * f - 2)
        assert value == 7
    _announce("criterion-1 degree-2 exact identity", start, 1,
              "2(56g+21f-7)/(16g+6f-2) = 7 for g in [1,100]")


def test_criterion_2_threshold_calibration():
    start = time.time()
    for d in range(3, 9):
        for g in range(1, 21):
            f = genus_slack(g)
            e0 = degree_floor("canonical", d, g)
            rain = (
                2 ** (d - 1) * (d - 1)
                * (e0 - 2 * g + 2 + (d - 1) * (d * e0 + 1 - g))
                / (e0 - 2 * g + 2 - g * (d - 1) - (d - 1) ** 2 * f)
            )
            assert rain == 2 ** (d - 1) * (d - 1) * (d * d - d + 1) + 1
            h = (
                2 ** (d - 2) * (d - 1)
                * (d * e0 + 2 + 2 * (d - 1) * (d * e0 + 1 - g))
                / (Fraction(d * e0, 2) - 2 * g + 1 - g * (d - 1) - f * (d - 1) ** 2)
            )
            assert h <= 2 ** (d - 1) * (d - 1) * (d * d - d + 1)
    _announce("criterion-2 threshold calibration", start, 10,
              "case-I bound at e0 equals target+1 and case-II stays below, "
              "d in [3,8], g in [1,20]")


def test_criterion_3_sweep_certificates():
    start = time.time()
    canonical = [(3, 0), (3, 1), (4, 0), (4, 1), (2, 1), (2, 2)]
    terminal = [(2, 1), (3, 0), (3, 1)]
    maxima = []
    for d, g in canonical:
        cert = certify("canonical", d, g, m_span=(1, 50))
        assert cert.passed, (d, g, cert.failures[:2])
        maxima.append(f"can({d},{g})<{cert.n_plus_1}")
    for d, g in terminal:
        cert = certify("terminal", d, g, m_span=(1, 50))
        assert cert.passed, (d, g, cert.failures[:2])
        maxima.append(f"term({d},{g})<{cert.n_plus_1}")
    _announce("criterion-3 sweep certificates", start, 300, " ".join(maxima))


def test_criterion_4_orthogonality():
    start = time.time()
    for p, m in [(3, 0), (3, 1), (5, 0)]:
        rep = check_orthogonality(conic_form(p), 2, m)
        assert rep.verdict == "equal", (p, m)
    pair = check_orthogonality(conic_form(3), 2, 0, pairs=True)
    assert pair.verdict == "equal"
    _announce("criterion-4 orthogonality", start, 600,
              "sum of S(alpha) = p^((m+1)(de+1)) #solutions at "
              "(3,m=0),(3,m=1),(5,m=0); pair version at (3,m=0)")


def test_criterion_5_conic_counts():
    start = time.time()
    expected = {3: 48, 5: 480, 7: 2016}
    for p, want in expected.items():
        rec = count_solutions(conic_form(p), 2, 0)
        assert rec.raw_count == want == (p - 1) * (p**3 - p)
    assert count_tangent_pairs(conic_form(3), 2, 0).raw_count == 48 * 3**4
    for p in (3, 5):
        assert count_solutions(conic_form(p), 1, 0).raw_count == 0
    _announce("criterion-5 conic counts", start, 300,
              "48/480/2016 and 3888 tangent pairs; degree-1 counts vanish")


def test_criterion_6_major_arc_collapse():
    start = time.time()
    single = check_major_identity(conic_form(3), 2, 1)
    assert single.verdict == "equal"
    assert single.params["factor_exponent"] == 9
    pair = check_major_identity(conic_form(3), 2, 1, pairs=True)
    assert pair.verdict == "equal"
    assert pair.params["factor_exponent"] == 18
    _announce("criterion-6 major-arc collapse", start, 900,
              "singles with factor 3^9 and pairs with factor 3^18")


def test_criterion_7_t_vanishing():
    start = time.time()
    rep = t_vanishing_report(conic_form(3), 2, samples=120, seed=20260808)
    assert rep.verdict == "holds"
    assert rep.params["samples"] >= 100
    # each sampled base point gets the full functional slice, so the twenty
    # full slices are included; the report checked T(0) = 3^9 on each
    _announce("criterion-7 auxiliary-sum vanishing", start, 600,
              "T = 0 for all 1 <= deg <= 3 and T(0) = 3^9 over 120 slices")


def test_criterion_8_weyl_inequality():
    start = time.time()
    F = conic_form(3)
    tab = divisor_table(3, 4)
    small = np.nonzero(tab.degree <= 2)[0]
    checked = 0
    for code0 in small:
        for a1 in range(3**5):
            alpha = dual_from_code(3, 4, 1, int(code0) + 3**5 * a1)
            rep = check_weyl(F, 2, 1, alpha, precision_cap=256)
            assert rep.verdict == "holds", alpha.flat()
            checked += 1
    import random

    rng = random.Random(42)
    for _ in range(100):
        alpha = dual_from_code(3, 4, 1, rng.randrange(3**10))
        assert check_weyl(F, 2, 1, alpha, precision_cap=256).verdict == "holds"
    F5 = fermat_form(5, 1, 3)
    alphas = weyl_alpha_sample(F5, 1, 1, max_degree=2, extra=40, seed=7)
    for alpha in alphas:
        rep = check_weyl(F5, 1, 1, alpha, precision_cap=256)
        assert rep.verdict == "holds", alpha.flat()
    _announce("criterion-8 weyl inequality", start, 900,
              f"{checked} low-degree + 100 random functionals at the conic; "
              f"{len(alphas)} sampled at the degree-3 instance")


def test_criterion_9_structure_property_suites():
    start = time.time()
    # additive character multiplicativity, exhaustive for p <= 5, m <= 2
    for p, m in [(3, 1), (3, 2), (5, 1)]:
        jets = [Jet(p, c) for c in itertools.product(range(p), repeat=m + 1)]
        for u in jets:
            for v in jets:
                assert psi_m(u + v) == psi_m(u) * psi_m(v)
    # jet-ring character orthogonality at p = 3, m = 1
    jets = [Jet(3, c) for c in itertools.product(range(3), repeat=2)]
    for a in jets:
        total = Cyclo.zero(3)
        for u in jets:
            total = total + psi_m(a * u)
        assert total == (Cyclo.integer(3, 9) if a.is_zero() else Cyclo.zero(3))
    # approximation bound: minimal degree <= de/2 + 1, exhaustive at de = 4
    tab = divisor_table(3, 4)
    assert int(tab.degree.max()) <= 3
    # minimizer uniqueness across the major range, in the regime where two
    # minimizers are impossible (2 deg <= de + 1); at degree 3 of the conic
    # configuration coprime minimizers exist and the grouped identities
    # count them by multiplicity instead
    forced = tab.degree <= tab.uniqueness_bound()
    assert (tab.multiplicity[forced] == 1).all()
    tab3 = divisor_table(3, 3)
    major3 = tab3.degree <= 2  # e = 1: the whole major range is forced
    assert (tab3.multiplicity[major3] == 1).all()
    # counting-function factorization across jet layers
    F = conic_form(3)
    import random

    rng = random.Random(9)
    for s in (0, 1):
        for _ in range(6):
            alpha = dual_from_code(3, 4, 1, rng.randrange(3**10))
            assert n_count(F, 2, alpha, 1, 1, s) == 3 ** (
                3 * (3 - s)
            ) * n_count(F, 2, alpha, 0, 1, s)
    # exact differencing identity for degrees 2 and 3
    for form, e in [(conic_form(5), 2), (fermat_form(7, 2, 3), 1)]:
        _differencing_identity(form, e, rng)
    _announce("criterion-9 structure suites", start, 300,
              "characters, approximation degree, minimizer uniqueness, "
              "factorization, differencing")


def _differencing_identity(F, e, rng):
    p, n, d = F.p, F.n, F.d

    def rand_tuple():
        return tuple(
            JetPoly.from_ints(p, e, 0, [rng.randrange(p) for _ in range(e + 1)])
            for _ in range(n + 1)
        )

    z = rand_tuple()

    def G(t):
        out = None
        for j, gp in enumerate(gradient(F, t)):
            term = mul_sections(z[j], gp)
            out = term if out is None else out + term
        return out

    ys = [rand_tuple() for _ in range(d - 2)]
    last = rand_tuple()
    zero = tuple(JetPoly.zero(p, e, 0) for _ in range(n + 1))
    lhs = difference_apply(G, ys, last) - difference_apply(G, ys, zero)
    psis = multilinear_psi_sections(F, tuple(ys) + (last,))
    rhs = None
    for j in range(n + 1):
        term = mul_sections(z[j], psis[j])
        rhs = term if rhs is None else rhs + term
    assert lhs == rhs


def test_criterion_10_jet_dimension_trend():
    start = time.time()
    for k in (0, 1, 2):
        assert count_jet_multilinear(conic_form(3), k) == 1
    details = []
    for p in (5, 7):
        cubic = fermat_form(p, 1, 3)
        for k in (0, 1):
            count = count_jet_multilinear(cubic, k)
            exponent = (k + 1) * (3 - 1) * 2 - 2 * (k // 2 + 1)
            assert count <= 10 * p**exponent
            details.append(f"p={p},k={k}:{count}<=10*{p}^{exponent}")
    _announce("criterion-10 jet dimension trend", start, 600, " ".join(details))
