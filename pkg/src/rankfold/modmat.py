"""Vectorized modular linear algebra on numpy int64 arrays.

The Monte Carlo experiments need ranks of large batches of small matrices
over GF(p) and GF(p^2); doing that through the exact generic matrix type
would dominate the runtime.  Here matrices are plain int64 arrays with
entries reduced mod p and Gaussian elimination runs across a whole batch
at once.

Overflow discipline: elimination forms products of two reduced entries,
so any p below 2^31 is safe in int64; batch elimination additionally
builds a length-p inverse table, so it insists on small p.  Batched
matrix products sum inner-dimension many products and check the bound
explicitly.
"""

from __future__ import annotations

import numpy as np

# Inverse tables are cheap for experiment-sized p and are cached per prime.
_TABLE_LIMIT = 1 << 22
_INV_TABLES: dict = {}


def inverse_table(p: int) -> np.ndarray:
    """Table inv[v] with v * inv[v] = 1 mod p for 1 <= v < p."""
    if p > _TABLE_LIMIT:
        raise ValueError(f"p = {p} too large for a table of inverses")
    tab = _INV_TABLES.get(p)
    if tab is None:
        # inv[v] = v^(p-2) for all v at once, by square and multiply.
        v = np.arange(p, dtype=np.int64)
        tab = np.ones(p, dtype=np.int64)
        e = p - 2
        base = v.copy()
        while e:
            if e & 1:
                tab = tab * base % p
            base = base * base % p
            e >>= 1
        _INV_TABLES[p] = tab
    return tab


def rank_mod(M, p: int) -> int:
    """Rank of a single integer matrix mod p.

    The rank of an integer matrix over Q is at least its rank mod any
    prime, which makes this a fast certified lower bound for exact
    minimum-distance checks.
    """
    A = np.array(M, dtype=np.int64) % p
    n, m = A.shape
    rank = 0
    for col in range(m):
        pivots = np.nonzero(A[rank:, col])[0]
        if pivots.size == 0:
            continue
        r = rank + pivots[0]
        if r != rank:
            A[[rank, r]] = A[[r, rank]]
        inv = pow(int(A[rank, col]), -1, p)
        A[rank] = A[rank] * inv % p
        rows = A[rank + 1:, col] != 0
        if rows.any():
            A[rank + 1:][rows] = (A[rank + 1:][rows] - np.outer(A[rank + 1:, col][rows], A[rank])) % p
        rank += 1
        if rank == n:
            break
    return rank


def batch_rank_mod(mats: np.ndarray, p: int) -> np.ndarray:
    """Ranks of a (T, n, m) batch over GF(p), eliminated in lockstep."""
    A = np.asarray(mats, dtype=np.int64) % p
    T, n, m = A.shape
    inv = inverse_table(p)
    rank = np.zeros(T, dtype=np.int64)
    rowidx = np.arange(n)
    for col in range(m):
        colvals = A[:, :, col]
        cand = (colvals != 0) & (rowidx[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        sel = np.nonzero(has)[0]
        if sel.size == 0:
            continue
        piv = cand[sel].argmax(axis=1)
        cur = rank[sel]
        # Swap the pivot row up, normalize it, then clear the column below.
        tmp = A[sel, cur, :].copy()
        A[sel, cur, :] = A[sel, piv, :]
        A[sel, piv, :] = tmp
        pv = inv[A[sel, cur, col]]
        A[sel, cur, :] = A[sel, cur, :] * pv[:, None] % p
        below = rowidx[None, :] > cur[:, None]
        factors = np.where(below, A[sel, :, col], 0)
        A[sel] = (A[sel] - factors[:, :, None] * A[sel, cur, None, :]) % p
        rank[sel] += 1
    return rank


def batch_rank_quad(U: np.ndarray, V: np.ndarray, p: int, nonresidue: int) -> np.ndarray:
    """Ranks of a batch of matrices over GF(p^2) = GF(p)(sqrt(nonresidue)),
    entries given as the pair (U, V) meaning U + V*sqrt(nonresidue)."""
    U = np.asarray(U, dtype=np.int64) % p
    V = np.asarray(V, dtype=np.int64) % p
    T, n, m = U.shape
    inv = inverse_table(p)
    nr = nonresidue % p
    rank = np.zeros(T, dtype=np.int64)
    rowidx = np.arange(n)
    for col in range(m):
        nz = (U[:, :, col] != 0) | (V[:, :, col] != 0)
        cand = nz & (rowidx[None, :] >= rank[:, None])
        has = cand.any(axis=1)
        sel = np.nonzero(has)[0]
        if sel.size == 0:
            continue
        piv = cand[sel].argmax(axis=1)
        cur = rank[sel]
        for X in (U, V):
            tmp = X[sel, cur, :].copy()
            X[sel, cur, :] = X[sel, piv, :]
            X[sel, piv, :] = tmp
        # Pivot inverse: (u - v s) / (u^2 - n v^2) with s^2 = n.
        pu = U[sel, cur, col]
        pv = V[sel, cur, col]
        norm = (pu * pu - nr * pv * pv) % p
        ninv = inv[norm]
        iu = pu * ninv % p
        iv = (-pv) * ninv % p
        ru, rv = U[sel, cur, :], V[sel, cur, :]
        nu = (ru * iu[:, None] + nr * rv * iv[:, None]) % p
        nv = (ru * iv[:, None] + rv * iu[:, None]) % p
        U[sel, cur, :] = nu
        V[sel, cur, :] = nv
        below = rowidx[None, :] > cur[:, None]
        fu = np.where(below, U[sel, :, col], 0)
        fv = np.where(below, V[sel, :, col], 0)
        pru = U[sel, cur, None, :]
        prv = V[sel, cur, None, :]
        U[sel] = (U[sel] - fu[:, :, None] * pru - nr * fv[:, :, None] * prv) % p
        V[sel] = (V[sel] - fu[:, :, None] * prv - fv[:, :, None] * pru) % p
        rank[sel] += 1
    return rank


def batch_matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """Batched (T,n,k) @ (T,k,m) mod p, with an explicit int64 overflow guard."""
    A = np.asarray(A, dtype=np.int64) % p
    B = np.asarray(B, dtype=np.int64) % p
    k = A.shape[-1]
    if k * (p - 1) ** 2 >= 2 ** 63:
        raise ValueError("inner dimension times p^2 would overflow int64")
    return np.matmul(A, B) % p


def sample_rank_exact(rng: np.random.Generator, p: int, count: int,
                      rows: int, cols: int, t: int) -> np.ndarray:
    """Batch of `count` uniform rank-t matrices over GF(p), built as X Z
    with X uniform over full-column-rank rows x t and Z uniform over
    full-row-rank t x cols matrices (resampled until full rank), so the
    column and row spaces are uniform t-dimensional subspaces."""
    if t == 0:
        return np.zeros((count, rows, cols), dtype=np.int64)
    X = rng.integers(0, p, size=(count, rows, t)).astype(np.int64)
    Z = rng.integers(0, p, size=(count, t, cols)).astype(np.int64)
    while True:
        bad = np.nonzero((batch_rank_mod(X, p) < t) | (batch_rank_mod(Z, p) < t))[0]
        if bad.size == 0:
            break
        X[bad] = rng.integers(0, p, size=(bad.size, rows, t))
        Z[bad] = rng.integers(0, p, size=(bad.size, t, cols))
    return batch_matmul_mod(X, Z, p)
