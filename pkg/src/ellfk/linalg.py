"""Exact and numeric rank / span-membership routines."""

from __future__ import annotations

from fractions import Fraction

import heapq

import numpy as np


def _dedupe_rows(M: np.ndarray) -> np.ndarray:
    M = M[np.any(M != 0, axis=1)]
    if M.size == 0:
        return M
    return np.unique(M, axis=0)


def integer_rank(M) -> int:
    """Exact rank of an integer matrix by fraction-free (Bareiss) elimination."""
    M = np.asarray(M)
    M = _dedupe_rows(M.astype(np.int64))
    if M.size == 0:
        return 0
    M = _dedupe_rows(M.T.copy())
    if M.size == 0:
        return 0
    if M.shape[0] > M.shape[1]:
        M = M.T
    A = M.astype(object)
    rows, cols = A.shape
    rank = 0
    prev = 1
    for c in range(cols):
        if rank == rows:
            break
        piv = None
        for r in range(rank, rows):
            if A[r, c] != 0:
                piv = r
                break
        if piv is None:
            continue
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        p = A[rank, c]
        below = A[rank + 1:, :]
        if below.shape[0]:
            factors = below[:, c].copy()
            # Bareiss step: exact division by the previous pivot
            below[:, :] = (p * below - np.outer(factors, A[rank, :])) // prev
        prev = p
        rank += 1
    return rank


def modular_rank(M, prime: int = 2_147_483_647) -> int:
    """Rank over GF(prime); equals the rational rank except for unlucky primes."""
    A = np.asarray(M, dtype=np.int64) % prime
    A = A[np.any(A != 0, axis=1)]
    rows, cols = A.shape if A.size else (0, 0)
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(A[rank:, c])[0]
        if nz.size == 0:
            continue
        piv = rank + nz[0]
        if piv != rank:
            A[[rank, piv]] = A[[piv, rank]]
        inv = pow(int(A[rank, c]), prime - 2, prime)
        A[rank] = (A[rank].astype(object) * inv % prime).astype(np.int64)
        f = A[:, c].copy()
        f[rank] = 0
        nzr = np.nonzero(f)[0]
        for r in nzr:
            A[r] = (A[r].astype(object) - int(f[r]) * A[rank].astype(object)) % prime
        rank += 1
    return rank


def numeric_rank(M, rel_threshold: float = 1e-8) -> int:
    """Number of singular values above rel_threshold * largest."""
    M = np.asarray(M, dtype=float)
    if M.size == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rel_threshold * s[0]))


def _num(v):
    """Exact scalar with integral Fractions demoted to int (much faster arithmetic)."""
    t = type(v)
    if t is int:
        return v
    if t is Fraction:
        return v.numerator if v.denominator == 1 else v
    if isinstance(v, (int, np.integer)):
        return int(v)
    return Fraction(v)


class SparseEchelon:
    """Incremental row echelon form over Q for sparse rows {column: Fraction}.

    Rows are reduced against existing pivots on insertion; ``reduce`` returns
    the remainder of a vector modulo the row span (empty dict iff in span).
    """

    def __init__(self):
        self.pivots: dict = {}  # pivot column -> row (normalised, pivot entry 1)
        self._order: list = []

    def reduce(self, row: dict) -> dict:
        row = {k: _num(v) for k, v in row.items() if v != 0}
        # eliminating pivot c only introduces columns with larger keys, so a heap suffices
        heap = [(self._key(c), c) for c in row if c in self.pivots]
        heapq.heapify(heap)
        while heap:
            _, c = heapq.heappop(heap)
            f = row.get(c)
            if not f:
                continue
            for k, v in self.pivots[c].items():
                old = row.get(k)
                nv = _num((old or 0) - f * v)
                if nv:
                    row[k] = nv
                    if old is None and k in self.pivots:
                        heapq.heappush(heap, (self._key(k), k))
                else:
                    row.pop(k, None)
        return row

    @staticmethod
    def _key(c):
        return (0, c, "") if isinstance(c, int) else (1, 0, repr(c))

    def insert(self, row: dict) -> bool:
        r = self.reduce(row)
        if not r:
            return False
        c = min(r, key=self._key)
        inv = Fraction(1) / r[c]
        self.pivots[c] = {k: _num(v * inv) for k, v in r.items()}
        self._order.append(c)
        return True

    @property
    def rank(self) -> int:
        return len(self.pivots)
