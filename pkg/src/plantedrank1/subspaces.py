"""Seeded generation of matrix subspaces with planted rank-1 elements.

Conventions used throughout the package:

* vec() flattens row-major, entry (i, j) at position i*n + j.
* Symmetric matrices also get a compact coordinate sym_vec(): the upper
  triangle (i <= j) read row-major, length m(m+1)/2, unweighted.
* Randomness is drawn from numpy Philox generators seeded with
  SeedSequence(seed, spawn_key=(role, index)).  Roles: 0 for planted
  left factors, 1 for planted right factors, 2 for generic fill
  matrices.  Planted factor sets over F_p use index 0 of their role
  (one stream per set: rejection sampling couples the draws), real
  planted factors and all fill matrices use one stream per generator
  index.  A case is therefore reproducible from its scalar parameters
  alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import PlantSpec, ProblemShape, ambient_dim, check_compatible
from .errors import RankDeficientError, ShapeError
from .field_arith import sample_pairwise_independent

__all__ = [
    "ROLE_LEFT",
    "ROLE_RIGHT",
    "ROLE_FILL",
    "stream",
    "vec",
    "unvec",
    "sym_vec",
    "sym_unvec",
    "PlantedSubspace",
    "generate_real",
    "generate_modular",
    "orthonormal_basis",
]

ROLE_LEFT = 0
ROLE_RIGHT = 1
ROLE_FILL = 2


def stream(seed: int, role: int, index: int) -> np.random.Generator:
    """The package-wide RNG stream for (seed, role, index)."""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(role, index)))
    )


def vec(mat: np.ndarray) -> np.ndarray:
    """Row-major flattening."""
    return np.asarray(mat).reshape(-1)


def unvec(v: np.ndarray, m: int, n: int) -> np.ndarray:
    return np.asarray(v).reshape(m, n)


def sym_vec(mat: np.ndarray) -> np.ndarray:
    """Upper-triangle coordinates (i <= j, row-major) of a symmetric matrix."""
    mat = np.asarray(mat)
    m = mat.shape[0]
    iu = np.triu_indices(m)
    return mat[iu]


def sym_unvec(v: np.ndarray, m: int) -> np.ndarray:
    """Inverse of sym_vec: rebuild the full symmetric matrix."""
    v = np.asarray(v)
    out = np.zeros((m, m), dtype=v.dtype)
    out[np.triu_indices(m)] = v
    il = np.tril_indices(m, -1)
    out[il] = out.T[il]
    return out


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class PlantedSubspace:
    """An R-dimensional matrix subspace whose first s generators are rank 1.

    field is None for real Gaussian data, or the prime p for modular
    data.  generators has shape (R, m, n); the first s entries are the
    planted rank-1 matrices.  left/right hold the planted factors
    (right is the same array as left in the symmetric case).  Arrays
    are frozen read-only.
    """

    shape: ProblemShape
    spec: PlantSpec
    seed: int
    field: int | None
    generators: np.ndarray
    left: np.ndarray
    right: np.ndarray = field(repr=False, default=None)

    @property
    def planted(self) -> np.ndarray:
        return self.generators[: self.spec.s]


def generate_real(shape: ProblemShape, spec: PlantSpec, seed: int) -> PlantedSubspace:
    """Gaussian subspace with s planted rank-1 generators, R total."""
    check_compatible(shape, spec)
    m, n = shape.m, shape.n
    s, big_r = spec.s, spec.R
    gens = np.zeros((big_r, m, n))
    left = np.zeros((s, m))
    right = np.zeros((s, n))
    for i in range(s):
        x = stream(seed, ROLE_LEFT, i + 1).standard_normal(m)
        left[i] = x
        if shape.symmetric:
            right[i] = x
        else:
            right[i] = stream(seed, ROLE_RIGHT, i + 1).standard_normal(n)
        gens[i] = np.outer(left[i], right[i])
    for i in range(s, big_r):
        g = stream(seed, ROLE_FILL, i + 1)
        if shape.symmetric:
            upper = g.standard_normal(m * (m + 1) // 2)
            gens[i] = sym_unvec(upper, m)
        else:
            gens[i] = g.standard_normal((m, n))
    return PlantedSubspace(
        shape=shape,
        spec=spec,
        seed=seed,
        field=None,
        generators=_freeze(gens),
        left=_freeze(left),
        right=_freeze(right),
    )


def generate_modular(
    shape: ProblemShape, spec: PlantSpec, p: int, seed: int
) -> PlantedSubspace:
    """Subspace over F_p: planted factors pairwise independent, fill uniform.

    Raises CapacityError (propagated) when s exceeds the number of
    projective directions of F_p^m (or F_p^n).
    """
    check_compatible(shape, spec)
    m, n = shape.m, shape.n
    s, big_r = spec.s, spec.R
    gens = np.zeros((big_r, m, n), dtype=np.int64)
    if s > 0:
        left = sample_pairwise_independent(m, s, p, stream(seed, ROLE_LEFT, 0))
        if shape.symmetric:
            right = left
        else:
            right = sample_pairwise_independent(n, s, p, stream(seed, ROLE_RIGHT, 0))
        for i in range(s):
            gens[i] = np.outer(left[i], right[i]) % p
    else:
        left = np.zeros((0, m), dtype=np.int64)
        right = left if shape.symmetric else np.zeros((0, n), dtype=np.int64)
    for i in range(s, big_r):
        g = stream(seed, ROLE_FILL, i + 1)
        if shape.symmetric:
            upper = g.integers(0, p, size=m * (m + 1) // 2, dtype=np.int64)
            gens[i] = sym_unvec(upper, m)
        else:
            gens[i] = g.integers(0, p, size=(m, n), dtype=np.int64)
    return PlantedSubspace(
        shape=shape,
        spec=spec,
        seed=seed,
        field=p,
        generators=_freeze(gens),
        left=_freeze(left),
        right=_freeze(np.array(right)),
    )


def orthonormal_basis(subspace: PlantedSubspace, tol: float = 1e-10) -> np.ndarray:
    """Span-preserving orthonormal basis of a real subspace.

    Returns an (R, m, n) array whose vectorizations are orthonormal; the
    symmetric case orthonormalizes in sym_vec coordinates instead (that
    is the inner product the symmetric pipeline works in).  Raises
    RankDeficientError when the generators do not span R dimensions
    (relative singular value threshold tol).
    """
    if subspace.field is not None:
        raise ShapeError("orthonormal_basis expects a real subspace")
    shape = subspace.shape
    big_r = subspace.spec.R
    if shape.symmetric:
        g = np.stack([sym_vec(mat) for mat in subspace.generators])
    else:
        g = subspace.generators.reshape(big_r, -1)
    u, sv, vt = np.linalg.svd(g, full_matrices=False)
    if big_r > 0 and (sv.size < big_r or sv[-1] <= tol * sv[0]):
        raise RankDeficientError(
            f"generators span fewer than R={big_r} dimensions"
        )
    rows = vt[:big_r]
    if shape.symmetric:
        return np.stack([sym_unvec(r, shape.m) for r in rows])
    return rows.reshape(big_r, shape.m, shape.n)
