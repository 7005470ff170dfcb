"""Spaces of sections on the projective line, their duals, and divisors.

A degree bound r and jet order m fix the space P_{r,m}: polynomials of
degree <= r in x with coefficients in R_m = F_p[t]/t^(m+1).  Its dimension
over F_p is (r+1)(m+1).  Effective divisors on the line are a monic
polynomial (finite part) together with a multiplicity at infinity; vanishing
to order k at infinity means the top k coefficients are zero, via the local
coordinate 1/x.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .arith import Jet, check_prime
from . import linalg


class BudgetExceeded(Exception):
    """Raised when an enumeration would exceed the configured budget."""

    def __init__(self, needed: int, budget: int, what: str = "enumeration"):
        self.needed = needed
        self.budget = budget
        super().__init__(
            f"{what} needs ~{needed} operations, budget is {budget}"
        )


DEFAULT_BUDGET = 10**9


def check_budget(needed: int, budget: int | None, what: str = "enumeration") -> None:
    limit = DEFAULT_BUDGET if budget is None else budget
    if needed > limit:
        raise BudgetExceeded(needed, limit, what)


class JetPoly:
    """Element of P_{r,m}: coeffs[i] is the Jet multiplying x^i."""

    __slots__ = ("p", "r", "m", "coeffs")

    def __init__(self, p: int, r: int, m: int, coeffs):
        self.p = p
        self.r = r
        self.m = m
        coeffs = tuple(coeffs)
        if len(coeffs) != r + 1:
            raise ValueError("need r+1 jet coefficients")
        self.coeffs = coeffs

    @classmethod
    def zero(cls, p: int, r: int, m: int) -> "JetPoly":
        return cls(p, r, m, tuple(Jet.zero(p, m) for _ in range(r + 1)))

    @classmethod
    def from_layers(cls, p: int, r: int, m: int, layers) -> "JetPoly":
        """Build from layers[k][i] = coefficient of t^k x^i."""
        return cls(
            p, r, m,
            (Jet(p, tuple(layers[k][i] for k in range(m + 1))) for i in range(r + 1)),
        )

    @classmethod
    def from_ints(cls, p: int, r: int, m: int, ints) -> "JetPoly":
        """Build from plain F_p coefficients (t-degree zero)."""
        return cls(p, r, m, (Jet.const(p, m, int(c)) for c in ints))

    def layer(self, k: int) -> tuple[int, ...]:
        """F_p coefficient vector of t^k."""
        return tuple(c.coeffs[k] for c in self.coeffs)

    def layers(self) -> list[tuple[int, ...]]:
        return [self.layer(k) for k in range(self.m + 1)]

    def mod_t(self) -> tuple[int, ...]:
        return self.layer(0)

    def __add__(self, other: "JetPoly") -> "JetPoly":
        self._check(other)
        return JetPoly(
            self.p, self.r, self.m,
            (a + b for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __sub__(self, other: "JetPoly") -> "JetPoly":
        self._check(other)
        return JetPoly(
            self.p, self.r, self.m,
            (a - b for a, b in zip(self.coeffs, other.coeffs)),
        )

    def __neg__(self) -> "JetPoly":
        return JetPoly(self.p, self.r, self.m, (-a for a in self.coeffs))

    def scale(self, u: Jet) -> "JetPoly":
        return JetPoly(self.p, self.r, self.m, (u * a for a in self.coeffs))

    def _check(self, other: "JetPoly") -> None:
        if (self.p, self.r, self.m) != (other.p, other.r, other.m):
            raise ValueError("mismatched section spaces")

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, JetPoly)
            and (self.p, self.r, self.m) == (other.p, other.r, other.m)
            and self.coeffs == other.coeffs
        )

    def __hash__(self):
        return hash((self.p, self.r, self.m, self.coeffs))

    def __repr__(self):
        return f"JetPoly(p={self.p}, r={self.r}, m={self.m}, layers={self.layers()})"


def mul_sections(f: JetPoly, g: JetPoly) -> JetPoly:
    """Product P_{r1,m} x P_{r2,m} -> P_{r1+r2,m}, truncating at t^(m+1)."""
    if f.p != g.p or f.m != g.m:
        raise ValueError("mismatched section spaces")
    p, m = f.p, f.m
    out = [Jet.zero(p, m) for _ in range(f.r + g.r + 1)]
    for i, a in enumerate(f.coeffs):
        if a.is_zero():
            continue
        for j, b in enumerate(g.coeffs):
            out[i + j] = out[i + j] + a * b
    return JetPoly(p, f.r + g.r, m, out)


@dataclass(frozen=True)
class DivisorP1:
    """Effective divisor: monic finite part h plus a multiplicity at infinity.

    h is stored as a coefficient tuple (c_0, ..., c_(j-1), 1); the zero
    divisor is h = (1,) with k_inf = 0.
    """

    p: int
    h: tuple[int, ...]
    k_inf: int

    def __post_init__(self):
        if not self.h or self.h[-1] != 1:
            raise ValueError("finite part must be monic")
        if self.k_inf < 0:
            raise ValueError("multiplicity at infinity must be >= 0")

    @classmethod
    def zero(cls, p: int) -> "DivisorP1":
        return cls(p, (1,), 0)

    @property
    def finite_degree(self) -> int:
        return len(self.h) - 1

    @property
    def degree(self) -> int:
        return self.finite_degree + self.k_inf

    def is_zero(self) -> bool:
        return self.degree == 0

    def __repr__(self):
        return f"DivisorP1(p={self.p}, h={list(self.h)}, k_inf={self.k_inf})"


class DualFunctional:
    """Element of P_{r,m}^dual in coordinate dual-basis form.

    parts[i] is the F_p row vector alpha_i of length r+1; the action on a
    section y returns the jet whose t^k coefficient is
    sum_{i+j=k} alpha_i(y_j).
    """

    __slots__ = ("p", "r", "m", "parts")

    def __init__(self, p: int, r: int, m: int, parts):
        self.p = p
        self.r = r
        self.m = m
        parts = tuple(tuple(int(c) % p for c in part) for part in parts)
        if len(parts) != m + 1 or any(len(part) != r + 1 for part in parts):
            raise ValueError("need m+1 parts of length r+1")
        self.parts = parts

    @classmethod
    def zero(cls, p: int, r: int, m: int) -> "DualFunctional":
        return cls(p, r, m, ((0,) * (r + 1),) * (m + 1))

    @classmethod
    def from_flat(cls, p: int, r: int, m: int, flat) -> "DualFunctional":
        flat = list(flat)
        return cls(
            p, r, m,
            (flat[i * (r + 1):(i + 1) * (r + 1)] for i in range(m + 1)),
        )

    def flat(self) -> tuple[int, ...]:
        return tuple(c for part in self.parts for c in part)

    def apply_layer(self, i: int, layer) -> int:
        return sum(a * int(b) for a, b in zip(self.parts[i], layer)) % self.p

    def __call__(self, y: JetPoly) -> Jet:
        if (self.p, self.r) != (y.p, y.r) or self.m != y.m:
            raise ValueError("functional and section live on different spaces")
        ylayers = y.layers()
        out = [
            sum(self.apply_layer(i, ylayers[k - i]) for i in range(k + 1)) % self.p
            for k in range(self.m + 1)
        ]
        return Jet(self.p, out)

    def mod_t(self) -> tuple[int, ...]:
        return self.parts[0]

    def is_zero(self) -> bool:
        return not any(any(part) for part in self.parts)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, DualFunctional)
            and (self.p, self.r, self.m) == (other.p, other.r, other.m)
            and self.parts == other.parts
        )

    def __hash__(self):
        return hash((self.p, self.r, self.m, self.parts))

    def __repr__(self):
        return f"DualFunctional(p={self.p}, r={self.r}, m={self.m}, parts={self.parts})"


def vanishing_basis(p: int, r: int, z: DivisorP1) -> list[tuple[int, ...]]:
    """F_p basis of sections of degree <= r vanishing on the divisor.

    Multiples of the finite part h with degree <= r - k_inf, i.e.
    { h * x^i : 0 <= i <= r - deg h - k_inf }; empty when deg Z > r.
    """
    if r < 0:
        return []
    basis = []
    dh = z.finite_degree
    for i in range(r - dh - z.k_inf + 1):
        vec = [0] * (r + 1)
        for j, c in enumerate(z.h):
            vec[i + j] = c % p
        basis.append(tuple(vec))
    return basis


def vanishing_dimension(r: int, z: DivisorP1) -> int:
    return max(0, r - z.degree + 1)


def factors_through(alpha: DualFunctional, z: DivisorP1) -> bool:
    """True iff the t^0 part of alpha kills every section vanishing on Z."""
    a0 = alpha.parts[0]
    for vec in vanishing_basis(alpha.p, alpha.r, z):
        if sum(a * b for a, b in zip(a0, vec)) % alpha.p != 0:
            return False
    return True


def enumerate_divisors(p: int, degree: int):
    """All effective divisors of the given degree, k_inf then h, h by
    lexicographic coefficient order."""
    check_prime(p)
    for k_inf in range(degree + 1):
        dh = degree - k_inf
        for tail in itertools.product(range(p), repeat=dh):
            yield DivisorP1(p, tuple(tail) + (1,), k_inf)


def count_divisors(p: int, degree: int) -> int:
    return sum(p**j for j in range(degree + 1))


def divisors_up_to(p: int, max_degree: int) -> list[DivisorP1]:
    out: list[DivisorP1] = []
    for b in range(max_degree + 1):
        out.extend(enumerate_divisors(p, b))
    return out


def minimal_divisor(alpha: DualFunctional) -> tuple[DivisorP1, int, bool]:
    """Smallest-degree divisor the functional factors through.

    Scans degrees upward; returns (divisor, degree, unique) where unique
    says the minimizing degree had exactly one match.  Ties return the
    first divisor in enumeration order.
    """
    for b in range(alpha.r + 2):
        found = None
        unique = True
        for z in enumerate_divisors(alpha.p, b):
            if factors_through(alpha, z):
                if found is None:
                    found = z
                else:
                    unique = False
                    break
        if found is not None:
            return found, b, unique
    raise AssertionError("every functional factors through a degree r+1 divisor")


def functional_degree(alpha: DualFunctional) -> int:
    return minimal_divisor(alpha)[1]


def _poly_trim(c: list[int], p: int) -> list[int]:
    c = [x % p for x in c]
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_gcd(a: list[int], b: list[int], p: int) -> list[int]:
    """Monic gcd of F_p polynomials given as coefficient lists."""
    a, b = _poly_trim(a, p), _poly_trim(b, p)
    while b:
        inv = linalg.inverse_mod(b[-1], p)
        r = a[:]
        while len(r) >= len(b):
            lead = r[-1] * inv % p
            shift = len(r) - len(b)
            if lead:
                for i, c in enumerate(b):
                    r[i + shift] = (r[i + shift] - lead * c) % p
            r.pop()
            while r and r[-1] == 0:
                r.pop()
        a, b = b, r
    if a:
        inv = linalg.inverse_mod(a[-1], p)
        a = [c * inv % p for c in a]
    return a


def globally_generates(sections: tuple[JetPoly, ...]) -> bool:
    """No common zero on the line after reducing mod t.

    Equivalent to: the gcd of the mod-t parts is a nonzero constant, and the
    top (degree bound) coefficients are not all zero.
    """
    if not sections:
        return False
    p = sections[0].p
    polys = [list(s.mod_t()) for s in sections]
    if all(poly[-1] % p == 0 for poly in polys):
        return False
    g: list[int] = []
    for poly in polys:
        g = poly_gcd(g, poly, p)
        if len(g) == 1:
            return True
    return False


def enumerate_duals(p: int, r: int, m: int, budget: int | None = None):
    """All functionals on P_{r,m}, lexicographic in flat coordinates."""
    check_prime(p)
    total = p ** ((r + 1) * (m + 1))
    check_budget(total, budget, f"dual enumeration over P_({r},{m})^dual")
    for flat in itertools.product(range(p), repeat=(r + 1) * (m + 1)):
        yield DualFunctional.from_flat(p, r, m, flat)


def enumerate_sections(p: int, r: int, m: int, budget: int | None = None):
    """All sections of P_{r,m}, lexicographic in flat (layer-major) order."""
    check_prime(p)
    total = p ** ((r + 1) * (m + 1))
    check_budget(total, budget, f"section enumeration over P_({r},{m})")
    for flat in itertools.product(range(p), repeat=(r + 1) * (m + 1)):
        layers = [flat[k * (r + 1):(k + 1) * (r + 1)] for k in range(m + 1)]
        yield JetPoly.from_layers(p, r, m, layers)


def section_space_size(p: int, r: int, m: int, copies: int = 1) -> int:
    return p ** ((r + 1) * (m + 1) * copies)


def count_minimizers(alpha: DualFunctional, degree: int) -> int:
    return sum(
        1 for z in enumerate_divisors(alpha.p, degree) if factors_through(alpha, z)
    )


def minimal_divisor_table(p: int, r: int, budget: int | None = None):
    """Minimal divisor of every t-degree-zero functional on P_r.

    Returns (divisors, index, degree, multiplicity): index[code] points at
    the first minimal divisor of the functional with little-endian
    coordinate code; multiplicity counts all minimizers at that degree
    (1 wherever the minimizer is unique).
    """
    total = p ** (r + 1)
    check_budget(total * count_divisors(p, r + 1), budget, "minimal divisor scan")
    divisors = divisors_up_to(p, r + 1)
    index = np.empty(total, dtype=np.int64)
    mult = np.ones(total, dtype=np.int64)
    degs = np.empty(total, dtype=np.int64)
    for code in range(total):
        flat = _decode(code, p, r + 1)
        alpha = DualFunctional(p, r, 0, (flat,))
        z, b, uniq = minimal_divisor(alpha)
        index[code] = divisors.index(z)
        degs[code] = b
        mult[code] = 1 if uniq else count_minimizers(alpha, b)
    return divisors, index, degs, mult


def _decode(code: int, p: int, length: int) -> tuple[int, ...]:
    out = []
    for _ in range(length):
        out.append(code % p)
        code //= p
    return tuple(out)
