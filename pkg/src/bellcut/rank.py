"""Exact rank of integer matrices.

``bareiss_rank`` is fraction-free Gaussian elimination on Python ints.
``rank_mod_p`` is a fast numpy lower bound: a set of rows independent
modulo a prime is independent over the rationals.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

PRIME = 2_147_483_629  # largest prime below 2**31; p*p fits in int64


def bareiss_rank(rows: Sequence[Sequence[int]]) -> int:
    m = [list(map(int, r)) for r in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if m[r][col]), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank][col]
        prow = m[rank]
        for r in range(rank + 1, n_rows):
            row = m[r]
            f = row[col]
            for c in range(col + 1, n_cols):
                # exact division is guaranteed by Sylvester's identity
                row[c] = (p * row[c] - f * prow[c]) // prev
            row[col] = 0
        prev = p
        rank += 1
    return rank


def rank_mod_p(matrix: np.ndarray, p: int = PRIME) -> int:
    m = np.array(matrix, dtype=np.int64) % p
    n_rows, n_cols = m.shape
    rank = 0
    for col in range(n_cols):
        if rank == n_rows:
            break
        nz = np.nonzero(m[rank:, col])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            m[[rank, piv]] = m[[piv, rank]]
        inv = pow(int(m[rank, col]), p - 2, p)
        m[rank] = (m[rank] * inv) % p
        below = m[rank + 1:, col].copy()
        mask = below != 0
        if mask.any():
            idx = np.nonzero(mask)[0] + rank + 1
            m[idx] = (m[idx] - np.outer(below[mask], m[rank]) % p) % p
        rank += 1
    return rank


def exact_rank(matrix, upper_bound: int | None = None) -> int:
    """Rank over Q of an integer matrix (rows = vectors).

    When the modular rank already reaches ``upper_bound`` (a bound known to
    the caller, e.g. from a supporting hyperplane) it is exact.  Otherwise
    the rank of the Gram matrix is computed with Bareiss; rank(M) equals
    rank(M^T M) over the rationals.
    """
    m = np.asarray(matrix, dtype=np.int64)
    if m.size == 0:
        return 0
    r = rank_mod_p(m)
    if upper_bound is not None and r >= upper_bound:
        return r
    if m.shape[0] <= 2 * m.shape[1]:
        return bareiss_rank(m.tolist())
    peak = int(np.abs(m).max())
    if m.shape[0] * peak * peak < 2 ** 62:
        gram = m.T @ m
    else:
        gram = m.T.astype(object) @ m.astype(object)
    return bareiss_rank(gram.tolist())
