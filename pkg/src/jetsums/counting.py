"""Exact point counts for jet spaces of section tuples on a hypersurface.

The main counts:

* ``count_solutions``    -- tuples x in P_{e,m}^(n+1), globally generating
  mod t, with F(x) = 0 in P_{de,m} (any jet order m).
* ``count_tangent_pairs`` -- pairs (x0, x1) with x0 as above and
  x1 . grad F(x0) = 0; x1 is counted through the kernel of an F_p-linear
  map, never enumerated (a slow enumeration mode exists as an oracle).
* ``count_jet_multilinear`` / ``count_psi_zero_sections`` -- auxiliary
  counts of zeros of the multilinear forms attached to F.

Enumeration always runs over the degree-zero jet layer in numpy batches;
higher jet layers enter through exact linear algebra (image / kernel of the
multiplication-by-gradient map), which is what makes jet orders m >= 1
affordable.  Every operation computes the size of its search space first
and refuses to start above the configured budget.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import linalg
from .arith import Jet
from .forms import SymmetricForm, eval_form, gradient
from .sections import (
    JetPoly,
    check_budget,
    section_space_size,
)

CHUNK = 1 << 17

# ---------------------------------------------------------------------------
# coefficient-array plumbing (degree-zero jet layer)


def batch_digits(codes: np.ndarray, p: int, length: int) -> np.ndarray:
    """Little-endian base-p digits, shape (len(codes), length)."""
    out = np.empty((codes.size, length), dtype=np.int64)
    rem = codes.copy()
    for i in range(length):
        out[:, i] = rem % p
        rem //= p
    return out


def encode_digits(digits: np.ndarray, p: int) -> np.ndarray:
    weights = p ** np.arange(digits.shape[-1], dtype=np.int64)
    return digits.astype(np.int64) @ weights


def batch_poly_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Coefficient-array product of polynomial batches (..., da+1) x (..., db+1)."""
    da = a.shape[-1] - 1
    db = b.shape[-1] - 1
    out = np.zeros(a.shape[:-1] + (da + db + 1,), dtype=np.int64)
    for i in range(da + 1):
        for j in range(db + 1):
            out[..., i + j] += a[..., i] * b[..., j]
    return out % p


def batch_eval_form(F: SymmetricForm, coords: np.ndarray) -> np.ndarray:
    """F on batched coefficient tuples; coords has shape (N, n+1, e+1).

    Returns (N, de+1) coefficient arrays of the value, entries mod p.
    """
    coords = coords.astype(np.int64)
    N = coords.shape[0]
    e = coords.shape[2] - 1
    out = np.zeros((N, F.d * e + 1), dtype=np.int64)
    for exps, c in F.monomials.items():
        term = None
        for j, ej in enumerate(exps):
            for _ in range(ej):
                pj = coords[:, j, :]
                term = pj.copy() if term is None else batch_poly_mul(term, pj, F.p)
        out[:, : term.shape[1]] += c * term
    return out % F.p


_IRRED_QUAD_CACHE: dict[int, list[tuple[int, int]]] = {}


def monic_irreducible_quadratics(p: int) -> list[tuple[int, int]]:
    """(c0, c1) with x^2 + c1 x + c0 irreducible over F_p."""
    if p not in _IRRED_QUAD_CACHE:
        squares = {(a * a) % p for a in range(p)}
        out = []
        for c1 in range(p):
            for c0 in range(p):
                if (c1 * c1 - 4 * c0) % p not in squares:
                    out.append((c0, c1))
        _IRRED_QUAD_CACHE[p] = out
    return _IRRED_QUAD_CACHE[p]


def _irreducible_quad_table(p: int) -> np.ndarray:
    table = np.zeros((p, p), dtype=bool)
    for c0, c1 in monic_irreducible_quadratics(p):
        table[c0, c1] = True
    return table


def _inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        inv[a] = pow(a, p - 2, p)
    return inv


def batch_generating_mask(coords: np.ndarray, p: int) -> np.ndarray:
    """Global generation of the mod-t coefficient tuples, vectorized.

    A tuple fails iff all sections vanish at some point of the line: a
    rational point (including infinity, i.e. all top coefficients zero) or a
    conjugate pair of quadratic points; the latter is only possible when
    every section is a scalar multiple of one monic irreducible quadratic.
    Exact for degree bounds up to 2, which covers every enumerable space.
    """
    coords = coords.astype(np.int64)
    N, nv, ec = coords.shape
    e = ec - 1
    if e > 2:
        raise NotImplementedError("vectorized generation test covers e <= 2")
    a = np.arange(p, dtype=np.int64)
    vander = a[None, :] ** np.arange(ec, dtype=np.int64)[:, None] % p  # (e+1, p)
    vals = np.tensordot(coords, vander, axes=([2], [0])) % p  # (N, nv, p)
    common_aff = (vals == 0).all(axis=1).any(axis=1)
    common_inf = (coords[:, :, e] == 0).all(axis=1)
    ok = ~(common_aff | common_inf)
    if e == 2:
        # a common irreducible quadratic factor h forces x_j = top(x_j) * h,
        # so the only candidate h comes from the first section with a unit
        # top coefficient
        lam = coords[:, :, 2]
        rows = np.arange(N)
        jstar = (lam != 0).argmax(axis=1)
        lj = lam[rows, jstar]
        inv = _inverse_table(p)[lj]  # 0 stays 0, those rows are already out
        h0 = coords[rows, jstar, 0] * inv % p
        h1 = coords[rows, jstar, 1] * inv % p
        match = (
            (coords[:, :, 0] == lam * h0[:, None] % p)
            & (coords[:, :, 1] == lam * h1[:, None] % p)
        ).all(axis=1)
        ok &= ~(match & _irreducible_quad_table(p)[h0, h1])
    return ok


def iter_base_chunks(F: SymmetricForm, e: int, budget: int | None = None):
    """Stream (codes, coords, values, generating) over the degree-zero space."""
    p, n = F.p, F.n
    width = (n + 1) * (e + 1)
    total = p**width
    check_budget(total * (F.d + n + 2), budget, "degree-zero tuple scan")
    for start in range(0, total, CHUNK):
        codes = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        coords = batch_digits(codes, p, width).reshape(-1, n + 1, e + 1)
        values = batch_eval_form(F, coords)
        gg = batch_generating_mask(coords, p)
        yield codes, coords, values, gg


@dataclass
class BaseScan:
    """Materialized degree-zero layer (small spaces only)."""

    p: int
    e: int
    coords: np.ndarray      # (N, n+1, e+1) int8
    values: np.ndarray      # (N, de+1) int8
    generating: np.ndarray  # (N,) bool


_BASE_CACHE: dict[tuple, BaseScan] = {}
_BASE_CACHE_LIMIT = 2_200_000


def base_scan(F: SymmetricForm, e: int, budget: int | None = None) -> BaseScan:
    key = (F.key(), e)
    if key not in _BASE_CACHE:
        p, n = F.p, F.n
        total = p ** ((n + 1) * (e + 1))
        check_budget(
            total, min(_BASE_CACHE_LIMIT, 10**18 if budget is None else budget),
            "materialized tuple scan",
        )
        cs, vs, gs = [], [], []
        for _, coords, values, gg in iter_base_chunks(F, e, budget):
            cs.append(coords.astype(np.int8))
            vs.append(values.astype(np.int8))
            gs.append(gg)
        _BASE_CACHE[key] = BaseScan(
            p, e, np.concatenate(cs), np.concatenate(vs), np.concatenate(gs)
        )
    return _BASE_CACHE[key]


def mult_matrix(F: SymmetricForm, x0_coords: np.ndarray) -> np.ndarray:
    """Matrix of z -> z . grad F(x0) on degree-zero layers.

    x0_coords is (n+1, e+1); the matrix maps the (n+1)(e+1) coordinates of z
    (variable-major, then x-degree) to the de+1 coefficients of the product.
    """
    p, n = F.p, F.n
    e = x0_coords.shape[1] - 1
    de = F.d * e
    secs = tuple(JetPoly.from_ints(p, e, 0, x0_coords[j]) for j in range(n + 1))
    grads = gradient(F, secs)
    mat = np.zeros((de + 1, (n + 1) * (e + 1)), dtype=np.int64)
    for j in range(n + 1):
        g = grads[j].layer(0)
        for i in range(e + 1):
            col = j * (e + 1) + i
            for a, ga in enumerate(g):
                if ga and a + i <= de:
                    mat[a + i, col] = ga
    return mat


# ---------------------------------------------------------------------------
# records


@dataclass
class CountRecord:
    params: dict
    raw_count: int
    exponent: int
    normalized: Fraction

    def to_json(self) -> dict:
        return {
            "params": self.params,
            "raw_count": str(self.raw_count),
            "normalized": f"{self.normalized.numerator}/{self.normalized.denominator}",
            "exponent": self.exponent,
        }


def moduli_dimension(n: int, d: int, e: int) -> int:
    """Expected dimension of the space of maps at genus zero."""
    return (n + 1) * (e + 1) - (d * e + 1) - 1


def _record(F: SymmetricForm, e: int, m: int, raw: int, exponent: int, kind: str) -> CountRecord:
    params = {
        "kind": kind, "p": F.p, "n": F.n, "d": F.d, "e": e, "m": m, "form": F.name,
    }
    return CountRecord(params, raw, exponent, Fraction(raw, F.p**exponent))


# ---------------------------------------------------------------------------
# solution counts


def count_solutions(
    F: SymmetricForm,
    e: int,
    m: int,
    budget: int | None = None,
    method: str = "auto",
    workers: int | None = None,
) -> CountRecord:
    """#{x in P_{e,m}^(n+1) : x gg mod t, F(x) = 0}, normalized by
    p^((m+1)(mu+1)).

    The degree-zero scan shards by code range; shards are independent and
    reduce by integer addition, so worker count cannot change the result.
    """
    if F.p <= F.d:
        raise ValueError("need p > d")
    mu = moduli_dimension(F.n, F.d, e)
    exponent = (m + 1) * (mu + 1)
    if method == "slow":
        raw = _count_solutions_slow(F, e, m, budget)
    elif m == 0:
        from .parallel import map_reduce

        p, n = F.p, F.n
        width = (n + 1) * (e + 1)
        total = p**width
        check_budget(total * (F.d + n + 2), budget, "degree-zero tuple scan")
        nshards = max(1, min(64, total // CHUNK))
        edges = np.linspace(0, total, nshards + 1, dtype=np.int64)
        shards = [
            (F.monomials_key(), F.p, F.n, F.d, e, int(lo), int(hi))
            for lo, hi in zip(edges[:-1], edges[1:])
            if hi > lo
        ]
        raw = map_reduce(_count_shard, shards, lambda a, b: a + b, 0, workers)
    else:
        raw = sum(count for _, count in _solution_fibers(F, e, m, budget))
    return _record(F, e, m, raw, exponent, "solutions")


def _count_shard(shard) -> int:
    mons, p, n, d, e, lo, hi = shard
    F = _form_from_key(mons, p, n, d)
    width = (n + 1) * (e + 1)
    raw = 0
    for start in range(lo, hi, CHUNK):
        codes = np.arange(start, min(start + CHUNK, hi), dtype=np.int64)
        coords = batch_digits(codes, p, width).reshape(-1, n + 1, e + 1)
        values = batch_eval_form(F, coords)
        gg = batch_generating_mask(coords, p)
        raw += int((gg & ~values.any(axis=1)).sum())
    return raw


def _form_from_key(mons, p, n, d):
    from .forms import make_form

    return make_form(p, n, d, list(mons))


def _base_solutions(F: SymmetricForm, e: int, budget: int | None):
    """Coordinates of gg degree-zero solutions (streamed, small output)."""
    for _, coords, values, gg in iter_base_chunks(F, e, budget):
        sel = gg & ~values.any(axis=1)
        if sel.any():
            yield from coords[sel].astype(np.int64)


def _solution_fibers(F: SymmetricForm, e: int, m: int, budget: int | None):
    """Yield (base point, fiber count) over gg solutions mod t^(m+1).

    Solutions are fibered over the degree-zero layer: layer x^j must solve
    L(x^j) = -c_j with L the multiplication-by-gradient map at the base and
    c_j the t^j coefficient of F on the lower layers.  Middle layers are
    enumerated inside the solution coset of L; the top layer contributes
    p^(dim ker L) whenever its constraint is consistent.
    """
    p = F.p
    for x0 in _base_solutions(F, e, budget):
        L = mult_matrix(F, x0)
        ker = linalg.nullspace(L, p)
        kerdim = ker.shape[0]
        if m == 1:
            # the only layer-1 constraint is L(x^1) = 0
            yield x0, p**kerdim
            continue
        check_budget(
            p ** (kerdim * (m - 1)) * (m + 1), budget, "jet-layer fiber enumeration"
        )
        total = 0
        for count in _extend_layer_counts(F, e, m, [x0], L, ker, 1):
            total += count
        yield x0, total


def _extend_layer_counts(F, e, m, layers, L, ker, depth):
    p = F.p
    c = _taylor_layer(F, e, m, layers, depth)
    part = linalg.solve(L, (-c) % p, p)
    if part is None:
        return
    if depth == m:
        yield p ** ker.shape[0]
        return
    for kv in linalg.span_elements(ker, p):
        layer = ((part + kv) % p).reshape(layers[0].shape)
        yield from _extend_layer_counts(F, e, m, layers + [layer], L, ker, depth + 1)


def _taylor_layer(F, e, m, layers, depth) -> np.ndarray:
    """t^depth coefficient of F on the tuple with the given known layers."""
    jets = _coords_to_jets(F, np.stack(layers), e, m)
    return np.array(eval_form(F, jets).layer(depth), dtype=np.int64)


def _coords_to_jets(F, layer_stack: np.ndarray, e: int, m: int) -> tuple[JetPoly, ...]:
    """Stack of (n+1, e+1) layer arrays -> tuple of JetPoly in P_{e,m}."""
    p, n = F.p, F.n
    nlay = layer_stack.shape[0]
    out = []
    for j in range(n + 1):
        jet_coeffs = []
        for i in range(e + 1):
            coeffs = [int(layer_stack[k, j, i]) for k in range(nlay)]
            coeffs += [0] * (m + 1 - nlay)
            jet_coeffs.append(Jet(p, coeffs))
        out.append(JetPoly(p, e, m, jet_coeffs))
    return tuple(out)


def _count_solutions_slow(F: SymmetricForm, e: int, m: int, budget: int | None) -> int:
    """Reference enumeration with exact jet arithmetic; exponential in m."""
    p, n = F.p, F.n
    width = (n + 1) * (e + 1)
    total = p ** (width * (m + 1))
    check_budget(total * (F.d + 1), budget, "slow jet enumeration")
    if m == 0:
        return count_solutions(F, e, 0, budget).raw_count
    count = 0
    upper = p ** (width * m)
    for _, coords, _, gg in iter_base_chunks(F, e, budget):
        for x0 in coords[gg].astype(np.int64):
            for code in range(upper):
                digits = batch_digits(np.array([code]), p, width * m)[0]
                stack = [x0] + [
                    digits[k * width : (k + 1) * width].reshape(n + 1, e + 1)
                    for k in range(m)
                ]
                jets = _coords_to_jets(F, np.stack(stack), e, m)
                if eval_form(F, jets).is_zero():
                    count += 1
    return count


def solution_tuples(F: SymmetricForm, e: int, m: int, budget: int | None = None):
    """All gg tuples with F(x) = 0, as JetPoly tuples."""
    p = F.p
    if m == 0:
        for x0 in _base_solutions(F, e, budget):
            yield _coords_to_jets(F, x0[None], e, 0)
        return
    for x0 in _base_solutions(F, e, budget):
        L = mult_matrix(F, x0)
        ker = linalg.nullspace(L, p)
        check_budget(
            p ** (ker.shape[0] * m) * (m + 1), budget, "solution tuple enumeration"
        )
        yield from _extend_tuples(F, e, m, [x0], L, ker, 1)


def _extend_tuples(F, e, m, layers, L, ker, depth):
    p = F.p
    c = _taylor_layer(F, e, m, layers, depth)
    part = linalg.solve(L, (-c) % p, p)
    if part is None:
        return
    for kv in linalg.span_elements(ker, p):
        layer = ((part + kv) % p).reshape(layers[0].shape)
        if depth == m:
            yield _coords_to_jets(F, np.stack(layers + [layer]), e, m)
        else:
            yield from _extend_tuples(F, e, m, layers + [layer], L, ker, depth + 1)


def unfolded_mult_matrix(F: SymmetricForm, x0: tuple[JetPoly, ...]) -> np.ndarray:
    """F_p matrix of z -> z . grad F(x0) with z and value unfolded over jet
    layers; block lower triangular since the map is R_m-linear.

    Rows: (layer k, x-degree a) of the value.  Columns: (layer k', variable
    j, x-degree i) of z.
    """
    p, n = F.p, F.n
    e, m = x0[0].r, x0[0].m
    de = F.d * e
    grads = gradient(F, x0)
    glayers = [[grads[j].layer(k) for k in range(m + 1)] for j in range(n + 1)]
    nrows = (m + 1) * (de + 1)
    ncols = (m + 1) * (n + 1) * (e + 1)
    mat = np.zeros((nrows, ncols), dtype=np.int64)
    for kz in range(m + 1):
        for j in range(n + 1):
            for i in range(e + 1):
                col = (kz * (n + 1) + j) * (e + 1) + i
                for kg in range(m + 1 - kz):
                    for a, ga in enumerate(glayers[j][kg]):
                        if ga and a + i <= de:
                            mat[(kz + kg) * (de + 1) + a + i, col] = ga
    return mat


def count_tangent_pairs(
    F: SymmetricForm,
    e: int,
    m: int,
    budget: int | None = None,
    method: str = "auto",
) -> CountRecord:
    """#{(x0, x1) : x0 gg solution, x1 . grad F(x0) = 0 in P_{de,m}}.

    Normalization exponent is 2(m+1)(mu+1); x1 ranges over P_{e,m}^(n+1)
    and is counted through kernel dimensions.
    """
    if F.p <= F.d:
        raise ValueError("need p > d")
    mu = moduli_dimension(F.n, F.d, e)
    exponent = 2 * (m + 1) * (mu + 1)
    total = 0
    for x0 in solution_tuples(F, e, m, budget):
        if method == "slow":
            total += _tangent_fiber_slow(F, x0, budget)
        else:
            M = unfolded_mult_matrix(F, x0)
            total += F.p ** (M.shape[1] - linalg.rank(M, F.p))
    return _record(F, e, m, total, exponent, "tangent_pairs")


def _tangent_fiber_slow(F: SymmetricForm, x0, budget) -> int:
    """Enumerate x1 directly (oracle for the kernel count)."""
    from .sections import mul_sections

    p, n = F.p, F.n
    e, m = x0[0].r, x0[0].m
    size = section_space_size(p, e, m, n + 1)
    check_budget(size * (n + 1), budget, "tangent fiber enumeration")
    grads = gradient(F, x0)
    count = 0
    width = (e + 1) * (m + 1)
    for code in range(size):
        digits = batch_digits(np.array([code]), p, width * (n + 1))[0]
        val = None
        for j in range(n + 1):
            flat = digits[j * width : (j + 1) * width]
            layers = [flat[k * (e + 1) : (k + 1) * (e + 1)] for k in range(m + 1)]
            term = mul_sections(JetPoly.from_layers(p, e, m, layers), grads[j])
            val = term if val is None else val + term
        if val.is_zero():
            count += 1
    return count


def lw_trend(
    form_family,
    e: int,
    m: int,
    primes: list[int],
    budget: int | None = None,
    kind: str = "solutions",
) -> list[CountRecord]:
    """One exact count per prime; the normalized column is the quantity whose
    trend toward 1 reflects the expected dimension (reported, not asserted)."""
    out = []
    for p in primes:
        F = form_family(p)
        if kind == "tangent_pairs":
            out.append(count_tangent_pairs(F, e, m, budget))
        else:
            out.append(count_solutions(F, e, m, budget))
    return out


# ---------------------------------------------------------------------------
# multilinear-variety counts


def count_jet_multilinear(F: SymmetricForm, k: int, budget: int | None = None) -> int:
    """#{(x^(1)..x^(d-1)) over (F_p[t]/t^(k+1))^(n+1) : all Psi_j = 0}.

    Plain affine jet coordinates, no section structure.
    """
    p, n, d = F.p, F.n, F.d
    nvars = (k + 1) * (n + 1) * (d - 1)
    total = p**nvars
    check_budget(total * (n + 1) * (d - 1), budget, "jet multilinear count")
    count = 0
    for start in range(0, total, CHUNK):
        codes = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        pts = batch_digits(codes, p, nvars).reshape(-1, d - 1, n + 1, k + 1)
        good = np.ones(codes.size, dtype=bool)
        for j in range(n + 1):
            good &= ~_psi_jet_batch(F, j, pts, k).any(axis=1)
            if not good.any():
                break
        count += int(good.sum())
    return count


def _psi_jet_batch(F: SymmetricForm, j: int, pts: np.ndarray, k: int) -> np.ndarray:
    """Psi_j on batched jet points; pts is (N, d-1, n+1, k+1) -> (N, k+1)."""
    import itertools as it

    p, n, d = F.p, F.n, F.d
    dfact = math.factorial(d) % p
    out = np.zeros((pts.shape[0], k + 1), dtype=np.int64)
    for idx in it.product(range(n + 1), repeat=d - 1):
        a = F.tensor_entry(idx + (j,))
        if a == 0:
            continue
        term = pts[:, 0, idx[0], :]
        for slot in range(1, d - 1):
            term = _jet_mul_batch(term, pts[:, slot, idx[slot], :], p)
        out = (out + a * term) % p
    return out * dfact % p


def _jet_mul_batch(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Truncated jet product on (..., k+1) coefficient arrays."""
    k = a.shape[-1] - 1
    out = np.zeros_like(a)
    for i in range(k + 1):
        for j2 in range(k + 1 - i):
            out[..., i + j2] += a[..., i] * b[..., j2]
    return out % p


def count_psi_zero_sections(
    F: SymmetricForm, e: int, s: int, k: int, budget: int | None = None
) -> int:
    """#{(x^(1)..x^(d-1)) in (P_{e-s,k}^(n+1))^(d-1) : all Psi_j = 0 as
    sections}."""
    p, n, d = F.p, F.n, F.d
    if not 0 <= s <= e:
        raise ValueError("need 0 <= s <= e")
    rdeg = e - s
    width = (n + 1) * (rdeg + 1) * (k + 1)
    nvars = width * (d - 1)
    total = p**nvars
    check_budget(total * (n + 1) * (d - 1), budget, "section multilinear count")
    count = 0
    for start in range(0, total, CHUNK):
        codes = np.arange(start, min(start + CHUNK, total), dtype=np.int64)
        pts = batch_digits(codes, p, nvars).reshape(-1, d - 1, n + 1, k + 1, rdeg + 1)
        good = np.ones(codes.size, dtype=bool)
        for j in range(n + 1):
            good &= ~_psi_section_batch(F, j, pts, k, rdeg).any(axis=(1, 2))
            if not good.any():
                break
        count += int(good.sum())
    return count


def _psi_section_batch(
    F: SymmetricForm, j: int, pts: np.ndarray, k: int, rdeg: int
) -> np.ndarray:
    """Psi_j on batched section tuples -> (N, k+1, (d-1)*rdeg+1)."""
    import itertools as it

    p, n, d = F.p, F.n, F.d
    dfact = math.factorial(d) % p
    out = np.zeros((pts.shape[0], k + 1, (d - 1) * rdeg + 1), dtype=np.int64)
    for idx in it.product(range(n + 1), repeat=d - 1):
        a = F.tensor_entry(idx + (j,))
        if a == 0:
            continue
        term = pts[:, 0, idx[0], :, :]
        for slot in range(1, d - 1):
            term = _section_mul_batch(term, pts[:, slot, idx[slot], :, :], p)
        out[:, : term.shape[1], : term.shape[2]] += a * term
        out %= p
    return out * dfact % p


def _section_mul_batch(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Product of section batches: convolution in x-degree, truncated
    convolution in the jet layer."""
    k = a.shape[-2] - 1
    ra = a.shape[-1] - 1
    rb = b.shape[-1] - 1
    out = np.zeros(a.shape[:-2] + (k + 1, ra + rb + 1), dtype=np.int64)
    for ka in range(k + 1):
        for kb in range(k + 1 - ka):
            for i in range(ra + 1):
                for j2 in range(rb + 1):
                    out[..., ka + kb, i + j2] += a[..., ka, i] * b[..., kb, j2]
    return out % p
