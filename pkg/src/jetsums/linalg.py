"""Small dense linear algebra over a prime field F_p.

Matrices are numpy int64 arrays with entries reduced mod p.  Everything here
is exact integer arithmetic; p is small (a machine prime), dimensions are in
the dozens, so plain Gaussian elimination is fast enough.
"""

from __future__ import annotations

import numpy as np


def inverse_mod(a: int, p: int) -> int:
    return pow(int(a) % p, p - 2, p)


def as_matrix(rows, p: int) -> np.ndarray:
    m = np.asarray(rows, dtype=np.int64) % p
    if m.ndim == 1:
        m = m.reshape(1, -1)
    return m


def rref(mat: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot column indices."""
    m = mat.copy() % p
    nrows, ncols = m.shape
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        if row >= nrows:
            break
        nz = np.nonzero(m[row:, col])[0]
        if nz.size == 0:
            continue
        pr = row + int(nz[0])
        if pr != row:
            m[[row, pr]] = m[[pr, row]]
        m[row] = (m[row] * inverse_mod(m[row, col], p)) % p
        other = np.nonzero(m[:, col])[0]
        for r in other:
            if r != row:
                m[r] = (m[r] - m[r, col] * m[row]) % p
        pivots.append(col)
        row += 1
    return m, pivots


def rank(mat: np.ndarray, p: int) -> int:
    if mat.size == 0:
        return 0
    return len(rref(mat, p)[1])


def nullspace(mat: np.ndarray, p: int) -> np.ndarray:
    """Basis of the right kernel, one vector per row."""
    nrows, ncols = mat.shape
    r, pivots = rref(mat, p)
    free = [c for c in range(ncols) if c not in pivots]
    basis = np.zeros((len(free), ncols), dtype=np.int64)
    for k, fc in enumerate(free):
        basis[k, fc] = 1
        for i, pc in enumerate(pivots):
            basis[k, pc] = (-r[i, fc]) % p
    return basis


def row_space(mat: np.ndarray, p: int) -> np.ndarray:
    """Canonical (rref) basis of the row span; usable as a subspace key."""
    r, pivots = rref(mat, p)
    return r[: len(pivots)]


def solve(mat: np.ndarray, rhs: np.ndarray, p: int) -> np.ndarray | None:
    """One solution of mat @ x = rhs, or None if inconsistent."""
    nrows, ncols = mat.shape
    aug = np.concatenate([mat % p, (rhs % p).reshape(-1, 1)], axis=1)
    r, pivots = rref(aug, p)
    if ncols in pivots:
        return None
    x = np.zeros(ncols, dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, ncols]
    return x


def in_row_span(basis_rref: np.ndarray, vec: np.ndarray, p: int) -> bool:
    """Membership test against an rref basis (reduce and check zero)."""
    v = vec.copy() % p
    for row in basis_rref:
        piv = np.nonzero(row)[0]
        if piv.size == 0:
            continue
        c = int(v[piv[0]])
        if c:
            v = (v - c * row) % p
    return not v.any()


def span_elements(basis: np.ndarray, p: int) -> np.ndarray:
    """All p**k vectors in the span of k basis rows (k kept small by callers)."""
    k, n = basis.shape
    if k == 0:
        return np.zeros((1, n), dtype=np.int64)
    coeffs = np.indices((p,) * k).reshape(k, -1).T
    return (coeffs @ basis) % p


def annihilator(basis: np.ndarray, n: int, p: int) -> np.ndarray:
    """Basis of functionals vanishing on the span of the given row vectors."""
    if basis.size == 0:
        return np.eye(n, dtype=np.int64)
    return nullspace(as_matrix(basis, p), p)
