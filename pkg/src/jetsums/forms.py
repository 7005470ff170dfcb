"""The hypersurface datum: a degree-d form as a symmetric coefficient tensor.

Forms are ingested as sparse monomial lists (exponent vector, coefficient)
and symmetrized by dividing by multinomial coefficients; this needs p > d,
which is also what makes the d! factor in the multilinear forms invertible.
Evaluation, gradients and the multilinear forms all run over any ring with
+ and *, so the same code serves F_p vectors and jet sections.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .arith import Jet, check_prime
from .sections import JetPoly, mul_sections, check_budget
from . import linalg


def _multiset_permutations(idx: tuple[int, ...]) -> int:
    counts = {}
    for j in idx:
        counts[j] = counts.get(j, 0) + 1
    total = math.factorial(len(idx))
    for c in counts.values():
        total //= math.factorial(c)
    return total


@dataclass(frozen=True)
class SymmetricForm:
    """Degree-d form F = sum a_{j1..jd} x_{j1}...x_{jd} on n+1 variables.

    ``tensor`` maps sorted index tuples to the tensor entry a (stored once
    per orbit); ``monomials`` maps exponent vectors to the F_p coefficient
    of the expanded monomial.
    """

    p: int
    n: int
    d: int
    tensor: dict = field(hash=False)
    monomials: dict = field(hash=False)
    name: str = "form"

    def key(self) -> tuple:
        return (self.p, self.n, self.d, tuple(sorted(self.monomials.items())))

    def monomials_key(self) -> tuple:
        return tuple(sorted(self.monomials.items()))

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        return isinstance(other, SymmetricForm) and self.key() == other.key()

    def tensor_entry(self, idx: tuple[int, ...]) -> int:
        return self.tensor.get(tuple(sorted(idx)), 0)


def make_form(p: int, n: int, d: int, monomial_list, name: str = "form") -> SymmetricForm:
    """Build a form from (exponent vector, coefficient) pairs.

    Requires p > d so the symmetrization divisors are invertible.
    """
    check_prime(p)
    if p <= d:
        raise ValueError(f"need p > d (got p={p}, d={d})")
    monomials: dict[tuple[int, ...], int] = {}
    for exps, c in monomial_list:
        exps = tuple(int(e) for e in exps)
        if len(exps) != n + 1 or sum(exps) != d or min(exps) < 0:
            raise ValueError(f"monomial {exps} does not have total degree {d}")
        monomials[exps] = (monomials.get(exps, 0) + int(c)) % p
    monomials = {e: c for e, c in monomials.items() if c}
    tensor: dict[tuple[int, ...], int] = {}
    for exps, c in monomials.items():
        idx = tuple(
            j for j, e in enumerate(exps) for _ in range(e)
        )
        perms = _multiset_permutations(idx)
        tensor[idx] = c * linalg.inverse_mod(perms % p, p) % p
    return SymmetricForm(p, n, d, tensor, monomials, name)


def conic_form(p: int) -> SymmetricForm:
    """x0*x2 - x1^2, the smooth plane conic (n=2, d=2)."""
    return make_form(p, 2, 2, [((1, 0, 1), 1), ((0, 2, 0), -1)], name="conic")


def fermat_form(p: int, n: int, d: int) -> SymmetricForm:
    """Sum of d-th powers of the n+1 coordinates."""
    mons = []
    for j in range(n + 1):
        e = [0] * (n + 1)
        e[j] = d
        mons.append((tuple(e), 1))
    return make_form(p, n, d, mons, name="fermat")


def parse_form_file(text: str, p: int, name: str = "form") -> SymmetricForm:
    """Text format: lines ``e0 e1 ... en c`` (coefficient c on the monomial
    with exponents e_i), ``#`` comments and blank lines ignored."""
    mons = []
    nvars = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"line {lineno}: need exponents and a coefficient")
        *exps, c = parts
        exps = tuple(int(e) for e in exps)
        if nvars is None:
            nvars = len(exps)
        elif len(exps) != nvars:
            raise ValueError(f"line {lineno}: inconsistent variable count")
        mons.append((exps, int(c)))
    if not mons:
        raise ValueError("form file contains no monomials")
    degs = {sum(e) for e, _ in mons}
    if len(degs) != 1:
        raise ValueError(f"monomials have mixed total degrees {sorted(degs)}")
    d = degs.pop()
    return make_form(p, nvars - 1, d, mons, name=name)


def transform_form(F: SymmetricForm, A) -> SymmetricForm:
    """The form F(A x) for an invertible change of coordinates A."""
    A = np.asarray(A, dtype=np.int64) % F.p
    if linalg.rank(A, F.p) != F.n + 1:
        raise ValueError("coordinate change must be invertible")
    nv = F.n + 1
    out: dict[tuple[int, ...], int] = {}
    for exps, c in F.monomials.items():
        poly = {(0,) * nv: c}
        for j, ej in enumerate(exps):
            for _ in range(ej):
                nxt: dict[tuple[int, ...], int] = {}
                for ex, cc in poly.items():
                    for k in range(nv):
                        if A[j, k]:
                            ex2 = list(ex)
                            ex2[k] += 1
                            ex2 = tuple(ex2)
                            nxt[ex2] = (nxt.get(ex2, 0) + cc * A[j, k]) % F.p
                poly = nxt
        for ex, cc in poly.items():
            out[ex] = (out.get(ex, 0) + cc) % F.p
    mons = [(ex, cc) for ex, cc in out.items() if cc]
    return make_form(F.p, F.n, F.d, mons, name=f"{F.name}-moved")


def named_form(name: str, p: int, n: int | None = None, d: int | None = None) -> SymmetricForm:
    if name == "conic":
        return conic_form(p)
    if name == "fermat":
        if n is None or d is None:
            raise ValueError("fermat needs explicit n and d")
        return fermat_form(p, n, d)
    raise ValueError(f"unknown built-in form {name!r}")


# ---------------------------------------------------------------------------
# evaluation on jet sections


def eval_form(F: SymmetricForm, x: tuple[JetPoly, ...]) -> JetPoly:
    """F applied to an (n+1)-tuple of sections of P_{e,m}; lands in P_{de,m}."""
    if len(x) != F.n + 1:
        raise ValueError(f"need a tuple of {F.n + 1} sections")
    p, e, m = x[0].p, x[0].r, x[0].m
    out = JetPoly.zero(p, F.d * e, m)
    for exps, c in F.monomials.items():
        term = None
        for j, ej in enumerate(exps):
            for _ in range(ej):
                term = x[j] if term is None else mul_sections(term, x[j])
        out = out + _scale_int(term, c)
    return out


def _scale_int(s: JetPoly, c: int) -> JetPoly:
    return JetPoly(s.p, s.r, s.m, (a * c for a in s.coeffs))


def gradient(F: SymmetricForm, x: tuple[JetPoly, ...]) -> tuple[JetPoly, ...]:
    """Tuple of partial derivatives evaluated on sections; each in P_{(d-1)e,m}."""
    if len(x) != F.n + 1:
        raise ValueError(f"need a tuple of {F.n + 1} sections")
    p, e, m = x[0].p, x[0].r, x[0].m
    r_out = (F.d - 1) * e
    grads = [JetPoly.zero(p, r_out, m) for _ in range(F.n + 1)]
    for exps, c in F.monomials.items():
        for j, ej in enumerate(exps):
            if ej == 0:
                continue
            term = None
            for k, ek in enumerate(exps):
                rep = ek - 1 if k == j else ek
                for _ in range(rep):
                    term = x[k] if term is None else mul_sections(term, x[k])
            if term is None:
                term = JetPoly.from_ints(p, 0, m, [1])
            if term.r < r_out:
                pad = tuple(Jet.zero(p, m) for _ in range(r_out - term.r))
                term = JetPoly(p, r_out, m, term.coeffs + pad)
            grads[j] = grads[j] + _scale_int(term, c * ej)
    return tuple(grads)


def multilinear_form(F: SymmetricForm, j: int, ys, mul, add, zero):
    """Psi_j on d-1 argument tuples over any commutative ring.

    Value is d! * sum over (d-1)-index tuples of the tensor entry times the
    product of the selected argument coordinates; ``mul``/``add``/``zero``
    supply the ring operations.
    """
    if len(ys) != F.d - 1:
        raise ValueError(f"need {F.d - 1} argument tuples")
    acc = zero
    dfact = math.factorial(F.d) % F.p
    for idx in itertools.product(range(F.n + 1), repeat=F.d - 1):
        a = F.tensor_entry(idx + (j,))
        if a == 0:
            continue
        term = None
        for slot, ji in enumerate(idx):
            term = ys[slot][ji] if term is None else mul(term, ys[slot][ji])
        if term is None:
            acc = add(acc, a * dfact)
        else:
            acc = add(acc, _ring_scale(term, a * dfact % F.p))
    return acc


def _ring_scale(v, c: int):
    if isinstance(v, JetPoly):
        return _scale_int(v, c)
    return v * c


def multilinear_psi_sections(F: SymmetricForm, ys: tuple[tuple[JetPoly, ...], ...]) -> list[JetPoly]:
    """All Psi_j evaluated on tuples of sections (cup-product multiplication)."""
    p, r, m = ys[0][0].p, ys[0][0].r, ys[0][0].m
    zero = JetPoly.zero(p, (F.d - 1) * r, m)
    return [
        multilinear_form(F, j, ys, mul_sections, lambda a, b: a + b, zero)
        for j in range(F.n + 1)
    ]


def multilinear_psi_scalars(F: SymmetricForm, ys: tuple[tuple[int, ...], ...]) -> list[int]:
    """All Psi_j on plain F_p vectors."""
    return [
        multilinear_form(
            F, j, ys,
            lambda a, b: a * b % F.p,
            lambda a, b: (a + b) % F.p,
            0,
        )
        for j in range(F.n + 1)
    ]


def difference_apply(G, ys: list, x):
    """Iterated differencing: D_y(G)(x) = G(x+y) - G(x), folded left to right.

    ``G`` maps a tuple of sections to a section; arguments add slotwise.
    """

    def shift(tup, off):
        return tuple(a + b for a, b in zip(tup, off))

    def diff(fn, y):
        return lambda t: fn(shift(t, y)) - fn(t)

    fn = G
    for y in ys:
        fn = diff(fn, y)
    return fn(x)


# ---------------------------------------------------------------------------
# smoothness search over extension fields


def irreducible_poly(p: int, k: int) -> tuple[int, ...]:
    """First monic irreducible of degree k in lexicographic coefficient order."""
    if k == 1:
        return (0, 1)
    for tail in itertools.product(range(p), repeat=k):
        poly = tail + (1,)
        if _is_irreducible(poly, p):
            return poly
    raise AssertionError("no irreducible polynomial found")


def _is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    k = len(poly) - 1
    if poly[0] == 0:
        return False
    # trial division by all monic polys of degree <= k/2
    for deg in range(1, k // 2 + 1):
        for tail in itertools.product(range(p), repeat=deg):
            div = tail + (1,)
            if _poly_divides(div, poly, p):
                return False
    return True


def _poly_divides(div: tuple[int, ...], poly: tuple[int, ...], p: int) -> bool:
    r = list(poly)
    while len(r) >= len(div):
        lead = r[-1] % p
        shift = len(r) - len(div)
        if lead:
            for i, c in enumerate(div):
                r[i + shift] = (r[i + shift] - lead * c) % p
        r.pop()
        while r and r[-1] % p == 0:
            r.pop()
    return not r


@dataclass
class SmoothnessReport:
    verified_up_to: int
    certified: bool
    singular_witness: tuple | None
    searched_points: int

    @property
    def smooth_so_far(self) -> bool:
        return self.singular_witness is None


def smoothness_check(
    F: SymmetricForm,
    k_max: int | None = None,
    budget: int | None = None,
) -> SmoothnessReport:
    """Search projective points over F_{p^k}, k <= k_max, where the whole
    gradient vanishes.

    A clean sweep up to the Bezout cap (d-1)^n certifies smoothness; short
    of the cap the result is only a partial verification.
    """
    cap = (F.d - 1) ** F.n
    explicit = k_max is not None
    if k_max is None:
        # largest extension degree whose projective scan fits the budget
        limit = 10**9 if budget is None else budget
        k_max = 1
        while k_max < cap and _scan_cost(F, k_max + 1) <= limit:
            k_max += 1
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    searched = 0
    for k in range(1, k_max + 1):
        if explicit:
            check_budget(_scan_cost(F, k), budget, f"smoothness search at k={k}")
        witness = _search_singular(F, k)
        searched += _point_count(F, k)
        if witness is not None:
            return SmoothnessReport(k, False, (k, witness), searched)
    return SmoothnessReport(k_max, k_max >= cap, None, searched)


def _point_count(F: SymmetricForm, k: int) -> int:
    q = F.p**k
    return (q ** (F.n + 1) - 1) // (q - 1)


def _scan_cost(F: SymmetricForm, k: int) -> int:
    return _point_count(F, k) * (F.n + 1) * F.d * k * k


def _search_singular(F: SymmetricForm, k: int):
    """Vectorized gradient-vanishing scan over P^n(F_{p^k}).

    Field elements are coefficient vectors mod the chosen irreducible; the
    scan enumerates projective representatives with first nonzero
    coordinate 1.
    """
    p, n = F.p, F.n
    modpoly = irreducible_poly(p, k)
    red = _reduction_table(modpoly, p, k)

    grad_mons = _gradient_monomials(F)
    for lead in range(n + 1):
        free = n - lead
        q = p**k
        total = q**free
        batch = max(1, min(total, 1 << 16))
        for start in range(0, total, batch):
            idx = np.arange(start, min(start + batch, total), dtype=np.int64)
            coords = np.zeros((idx.size, n + 1, k), dtype=np.int64)
            coords[:, lead, 0] = 1
            rem = idx.copy()
            for v in range(lead + 1, n + 1):
                code = rem % q
                rem //= q
                for c in range(k):
                    coords[:, v, c] = code % p
                    code //= p
            bad = _grad_zero_mask(grad_mons, coords, red, p, k)
            if bad.any():
                i = int(np.nonzero(bad)[0][0])
                return tuple(tuple(int(c) for c in coords[i, v]) for v in range(n + 1))
    return None


def _gradient_monomials(F: SymmetricForm):
    out = []
    for j in range(F.n + 1):
        mons = []
        for exps, c in F.monomials.items():
            if exps[j] == 0:
                continue
            de = list(exps)
            coeff = c * exps[j] % F.p
            de[j] -= 1
            mons.append((tuple(de), coeff))
        out.append(mons)
    return out


def _reduction_table(modpoly: tuple[int, ...], p: int, k: int) -> np.ndarray:
    """x^j mod the irreducible for j = 0..2k-2, as rows of length k."""
    rows = np.zeros((2 * k - 1, k), dtype=np.int64)
    cur = [1] + [0] * (k - 1)
    for j in range(2 * k - 1):
        rows[j] = cur
        shifted = [0] + cur  # multiply by x
        lead = shifted[k]
        cur = [(shifted[i] - lead * modpoly[i]) % p for i in range(k)]
    return rows


def _ext_mul(a: np.ndarray, b: np.ndarray, red: np.ndarray, p: int, k: int) -> np.ndarray:
    """Batched product in F_{p^k}; a, b are (..., k) coefficient arrays."""
    conv = np.zeros(a.shape[:-1] + (2 * k - 1,), dtype=np.int64)
    for i in range(k):
        for j in range(k):
            conv[..., i + j] += a[..., i] * b[..., j]
    conv %= p
    return np.tensordot(conv, red, axes=([-1], [0])) % p


def _grad_zero_mask(grad_mons, coords: np.ndarray, red: np.ndarray, p: int, k: int) -> np.ndarray:
    nb = coords.shape[0]
    ones = np.zeros((nb, k), dtype=np.int64)
    ones[:, 0] = 1
    mask = np.ones(nb, dtype=bool)
    for mons in grad_mons:
        val = np.zeros((nb, k), dtype=np.int64)
        for exps, c in mons:
            term = ones.copy()
            for v, e in enumerate(exps):
                for _ in range(e):
                    term = _ext_mul(term, coords[:, v, :], red, p, k)
            val = (val + c * term) % p
        mask &= ~val.any(axis=1)
        if not mask.any():
            break
    return mask
