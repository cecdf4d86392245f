"""Exact linear algebra over a prime field F_p.

Matrices are numpy int64 arrays with entries reduced mod p.  The prime
is small (997 by default elsewhere), so products of two reduced entries
stay far below 2**63 and a single reduction after each product suffices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ShapeError, ZeroInverseError

__all__ = [
    "modular_inverse",
    "EliminationReport",
    "eliminate_maximal_minor",
    "square_det",
    "sample_pairwise_independent",
]


def modular_inverse(a: int, p: int) -> int:
    """Inverse of a mod p.  Raises ZeroInverseError when p divides a."""
    a = int(a) % p
    if a == 0:
        raise ZeroInverseError(f"0 has no inverse mod {p}")
    return pow(a, -1, p)


@dataclass(frozen=True)
class EliminationReport:
    """Outcome of elimination on an integer matrix mod p.

    rank          column rank of the input mod p
    removed_rows  0-based indices of rows NOT in the maximal square
                  submatrix (empty when rank < num columns)
    minor_det     determinant mod p of the kept square submatrix, rows
                  taken in their original order (0 when rank < cols)
    """

    rank: int
    removed_rows: tuple[int, ...]
    minor_det: int


def _inversion_parity(seq) -> int:
    """Parity (0 or 1) of the permutation sorting seq ascending."""
    inv = 0
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                inv += 1
    return inv & 1


def eliminate_maximal_minor(mat: np.ndarray, p: int) -> EliminationReport:
    """Row-reduce mat mod p and locate a maximal nonsingular square submatrix.

    Pivot rule is deterministic: for each column, the unused row with the
    lowest original index holding a nonzero entry becomes the pivot.  When
    the matrix has full column rank, the pivot rows form the kept square
    submatrix; its determinant is the product of the pivots times the sign
    of the permutation that sorts the pivot rows back into original order.

    Requires rows >= cols.  Entries may be any integers; they are reduced
    mod p up front.
    """
    a = np.asarray(mat, dtype=np.int64)
    if a.ndim != 2:
        raise ShapeError(f"need a 2-d matrix, got ndim={a.ndim}")
    rows, cols = a.shape
    if rows < cols:
        raise ShapeError(f"need rows >= cols, got {rows} x {cols}")
    a = np.mod(a, p)

    available = np.ones(rows, dtype=bool)
    pivot_rows: list[int] = []
    pivot_vals: list[int] = []
    for c in range(cols):
        nz = np.flatnonzero(available & (a[:, c] != 0))
        if nz.size == 0:
            continue
        r = int(nz[0])
        available[r] = False
        v = int(a[r, c])
        pivot_rows.append(r)
        pivot_vals.append(v)
        # clear column c in every still-unused row
        idx = np.flatnonzero(available & (a[:, c] != 0))
        if idx.size:
            factor = (a[idx, c] * modular_inverse(v, p)) % p
            a[idx] = (a[idx] - factor[:, None] * a[r]) % p

    rank = len(pivot_rows)
    if rank < cols:
        return EliminationReport(rank=rank, removed_rows=(), minor_det=0)

    det = 1
    for v in pivot_vals:
        det = (det * v) % p
    if _inversion_parity(pivot_rows):
        det = (-det) % p
    removed = tuple(sorted(set(range(rows)) - set(pivot_rows)))
    return EliminationReport(rank=rank, removed_rows=removed, minor_det=det)


def square_det(mat: np.ndarray, p: int) -> int:
    """Determinant mod p of a square integer matrix."""
    a = np.asarray(mat)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"need a square matrix, got {a.shape}")
    return eliminate_maximal_minor(a, p).minor_det


def sample_pairwise_independent(
    d: int, count: int, p: int, rng: np.random.Generator
) -> np.ndarray:
    """Draw count vectors in F_p^d, no two parallel, none zero.

    Uniform rejection sampling: a draw is kept unless it is zero or a
    scalar multiple of an already kept vector.  The projective space
    holds (p^d - 1)/(p - 1) directions; asking for more raises
    CapacityError.  Returns an int64 array of shape (count, d).
    """
    capacity = (p**d - 1) // (p - 1)
    if count > capacity:
        raise CapacityError(
            f"{count} pairwise independent vectors requested in F_{p}^{d}, "
            f"capacity is {capacity}"
        )
    kept = np.empty((count, d), dtype=np.int64)
    seen: set[tuple[int, ...]] = set()
    k = 0
    while k < count:
        v = rng.integers(0, p, size=d, dtype=np.int64)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            continue
        # canonical projective representative: first nonzero entry scaled to 1
        rep = tuple((v * modular_inverse(int(v[nz[0]]), p)) % p)
        if rep in seen:
            continue
        seen.add(rep)
        kept[k] = v
        k += 1
    return kept
