"""Minor forms and the constraint matrix they induce on a subspace.

A 2x2 minor form is indexed by rows a < c and columns b < d of the
ambient matrix space.  Pairing the symmetrized product of two matrices
vi, vj against that form gives the scalar

    (vi[a,b] vj[c,d] + vi[c,d] vj[a,b] - vi[a,d] vj[c,b] - vi[c,b] vj[a,d]) / 2

and the constraint matrix collects these scalars with one row per minor
form and one column per generator pair.  A coefficient vector alpha lies
in its kernel exactly when sum alpha_ij vi (x) vj has every 2x2 minor
equal to zero, i.e. is supported on rank-1 matrices.

Row order is fixed once and for all (certificates index into it): the
row pair (a, c) varies in the outer loop, the column pair (b, d) in the
inner one, each lexicographically.  Column pairs (i, j) are
lexicographic.  All indices in this module are 1-based, matching the
mathematical convention; positions inside numpy arrays are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .bounds import ProblemShape, num_rows
from .errors import ShapeError
from .field_arith import modular_inverse
from .subspaces import PlantedSubspace

__all__ = [
    "MinorIndex",
    "minor_indices",
    "pair_indices",
    "constraint_entry",
    "constraint_entries",
    "ConstraintMatrix",
    "build_constraint_matrix",
    "minor_form_matrix",
    "symmetric_form_matrix",
    "symmetric_basis",
]


class MinorIndex(NamedTuple):
    """1-based index (a, b, c, d) of a minor form, a < c and b < d."""

    a: int
    b: int
    c: int
    d: int


def minor_indices(m: int, n: int) -> list[MinorIndex]:
    """All minor form indices for an m x n shape, in the fixed row order."""
    return [
        MinorIndex(a, b, c, d)
        for a in range(1, m + 1)
        for c in range(a + 1, m + 1)
        for b in range(1, n + 1)
        for d in range(b + 1, n + 1)
    ]


def pair_indices(s: int, R: int) -> list[tuple[int, int]]:
    """Column pairs: all (i, j) with i < j, plus (i, i) for i > s.

    Lexicographic.  s = 0 gives every pair i <= j (the all-pairs mode
    used by the recovery step).
    """
    return [
        (i, j)
        for i in range(1, R + 1)
        for j in range(i, R + 1)
        if i < j or i > s
    ]


def constraint_entry(vi: np.ndarray, vj: np.ndarray, idx: MinorIndex, p: int | None = None):
    """Single constraint matrix entry for the generator pair (vi, vj).

    Real for p None, otherwise exact in F_p (the 1/2 becomes the
    modular inverse of 2).
    """
    a, b, c, d = (t - 1 for t in idx)
    raw = vi[a, b] * vj[c, d] + vi[c, d] * vj[a, b] - vi[a, d] * vj[c, b] - vi[c, b] * vj[a, d]
    if p is None:
        return 0.5 * raw
    return (int(raw) * modular_inverse(2, p)) % p


def _pairing_block(vi: np.ndarray, vj: np.ndarray, p: int | None) -> np.ndarray:
    """Doubled pairing values for every (a, c, b, d), vectorized.

    block[a, c, b, d] = vi[a,b] vj[c,d] + vj[a,b] vi[c,d]
                        - vi[a,d] vj[c,b] - vj[a,d] vi[c,b]
    (0-based here; halving is applied by the caller).
    """
    t = vi[:, None, :, None] * vj[None, :, None, :]
    t = t + vj[:, None, :, None] * vi[None, :, None, :]
    if p is not None:
        t %= p
    return t - t.transpose(0, 1, 3, 2)


def constraint_entries(
    mats: np.ndarray,
    rows: list[MinorIndex],
    cols: list[tuple[int, int]],
    p: int | None = None,
) -> np.ndarray:
    """Constraint matrix entries for given row forms and column pairs.

    mats is an (R, m, n) array; column (i, j) refers to mats[i-1] and
    mats[j-1].  Float64 output for p None, int64 mod p otherwise.
    """
    mats = np.asarray(mats)
    if mats.ndim != 3:
        raise ShapeError(f"need an (R, m, n) generator array, got {mats.shape}")
    aa = np.array([r.a - 1 for r in rows], dtype=np.intp)
    cc = np.array([r.c - 1 for r in rows], dtype=np.intp)
    bb = np.array([r.b - 1 for r in rows], dtype=np.intp)
    dd = np.array([r.d - 1 for r in rows], dtype=np.intp)
    if p is None:
        out = np.empty((len(rows), len(cols)))
    else:
        out = np.empty((len(rows), len(cols)), dtype=np.int64)
        inv2 = modular_inverse(2, p)
    for k, (i, j) in enumerate(cols):
        block = _pairing_block(mats[i - 1], mats[j - 1], p)
        col = block[aa, cc, bb, dd]
        if p is None:
            out[:, k] = 0.5 * col
        else:
            out[:, k] = (col % p) * inv2 % p
    return out


@dataclass(frozen=True)
class ConstraintMatrix:
    """Constraint matrix together with its row and column labels."""

    entries: np.ndarray
    rows: tuple[MinorIndex, ...]
    cols: tuple[tuple[int, int], ...]
    p: int | None
    symmetric: bool


def build_constraint_matrix(
    subspace: PlantedSubspace, columns: str = "planted"
) -> ConstraintMatrix:
    """Constraint matrix of a planted subspace.

    columns="planted" drops the diagonal pairs (i, i) of the planted
    generators (i <= s), the certification layout; columns="all" keeps
    every pair i <= j, the recovery layout.
    """
    shape = subspace.shape
    if columns == "planted":
        cols = pair_indices(subspace.spec.s, subspace.spec.R)
    elif columns == "all":
        cols = pair_indices(0, subspace.spec.R)
    else:
        raise ValueError(f"unknown column mode {columns!r}")
    if shape.symmetric:
        rows = list(symmetric_basis(shape.m))
    else:
        rows = minor_indices(shape.m, shape.n)
    ent = constraint_entries(subspace.generators, rows, cols, p=subspace.field)
    return ConstraintMatrix(
        entries=ent,
        rows=tuple(rows),
        cols=tuple(cols),
        p=subspace.field,
        symmetric=shape.symmetric,
    )


def _sym_outer(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    return 0.5 * (np.outer(u, w) + np.outer(w, u))


def minor_form_matrix(idx: MinorIndex, m: int, n: int) -> np.ndarray:
    """The minor form as a symmetric mn x mn matrix on vectorized inputs.

    Contracting vec(u) (x) vec(w) against it reproduces constraint_entry.
    """
    a, b, c, d = idx
    dim = m * n

    def e(i, j):
        v = np.zeros(dim)
        v[(i - 1) * n + (j - 1)] = 1.0
        return v

    return _sym_outer(e(a, b), e(c, d)) - _sym_outer(e(a, d), e(c, b))


def _sym_pos(i: int, j: int, m: int) -> int:
    """Position of the unordered pair {i, j} (1-based) in sym_vec order."""
    i, j = min(i, j) - 1, max(i, j) - 1
    return i * m - i * (i - 1) // 2 + (j - i)


def symmetric_form_matrix(idx: MinorIndex, m: int) -> np.ndarray:
    """The minor form restricted to symmetric matrices, in sym_vec coordinates.

    An N x N symmetric matrix, N = m(m+1)/2; for symmetric U, W the
    bilinear pairing sym_vec(U)^T T sym_vec(W) equals constraint_entry.
    """
    a, b, c, d = idx
    dim = m * (m + 1) // 2

    def e(i, j):
        v = np.zeros(dim)
        v[_sym_pos(i, j, m)] = 1.0
        return v

    return _sym_outer(e(a, b), e(c, d)) - _sym_outer(e(a, d), e(c, b))


# Prime for the exact independence filter below.  Small enough that a
# 1500-term int64 dot of reduced entries cannot overflow.
_FILTER_PRIME = 67108859
_CHUNK = 1500


def _mod_reduce(v: np.ndarray, piv_rows: np.ndarray, piv_cols: np.ndarray, q: int) -> np.ndarray:
    """Subtract the pivot-row combination matching v's pivot coordinates."""
    k = len(piv_cols)
    for lo in range(0, k, _CHUNK):
        hi = min(lo + _CHUNK, k)
        coeffs = v[piv_cols[lo:hi]]
        v = (v - coeffs @ piv_rows[lo:hi]) % q
    return v


@lru_cache(maxsize=None)
def symmetric_basis(m: int) -> tuple[MinorIndex, ...]:
    """Maximal independent set of minor forms on symmetric m x m matrices.

    Candidates are scanned in the fixed row order and kept greedily when
    their sym_vec lift is independent of the lifts already kept, decided
    by exact elimination mod a large prime.  The resulting count must
    match the closed-form dimension; a mismatch raises.
    """
    if m < 2:
        raise ShapeError(f"need m >= 2, got {m}")
    dim = m * (m + 1) // 2
    q = _FILTER_PRIME
    chosen: list[MinorIndex] = []
    piv_rows = np.zeros((0, dim * dim), dtype=np.int64)
    piv_cols = np.zeros(0, dtype=np.int64)
    for idx in minor_indices(m, m):
        # doubled lift keeps entries integer
        lift = np.asarray(2 * symmetric_form_matrix(idx, m), dtype=np.int64).reshape(-1)
        v = _mod_reduce(lift % q, piv_rows, piv_cols, q)
        nz = np.flatnonzero(v)
        if nz.size == 0:
            continue
        col = int(nz[0])
        v = v * modular_inverse(int(v[col]), q) % q
        # keep earlier pivot rows reduced against the new one
        if len(piv_cols):
            piv_rows = (piv_rows - np.outer(piv_rows[:, col], v)) % q
        piv_rows = np.vstack([piv_rows, v[None, :]])
        piv_cols = np.append(piv_cols, col)
        chosen.append(idx)
    expected = num_rows(ProblemShape(m, symmetric=True))
    if len(chosen) != expected:
        raise AssertionError(
            f"independence filter found {len(chosen)} forms for m={m}, "
            f"expected {expected}"
        )
    return tuple(chosen)
