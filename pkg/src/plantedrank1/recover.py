"""Recovery of planted rank-1 matrices from a subspace basis.

Pipeline: build the all-pairs constraint matrix of an orthonormal
basis, take its numerical kernel (each kernel vector encodes a matrix
in the span of squared basis elements annihilated by every minor
form), then split the kernel span into rank-1 terms by simultaneous
diagonalization with two random contractions.  With the planted count
s inside the counting bound the kernel dimension is s and the rank-1
terms are the planted matrices; past the bound the kernel picks up
spurious directions and the split degrades, which is measured by the
greedy matching error against the ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .bounds import ProblemShape
from .errors import DegenerateInputError, LengthMismatchError
from .minor_forms import minor_indices, pair_indices, symmetric_basis, constraint_entries
from .subspaces import sym_unvec, sym_vec

__all__ = [
    "IntersectionBasis",
    "intersection_basis",
    "simultaneous_diagonalization",
    "matching_error",
    "RecoveryResult",
    "recover_rank_one",
]

# relative singular value cutoffs; see the numerical notes in README
DEFAULT_RANK_TOL = 1e-8
_COLSPACE_TOL = 1e-8
_SIGN_EPS = 1e-12


@dataclass(frozen=True)
class IntersectionBasis:
    """Kernel of the all-pairs constraint matrix, in matrix form.

    elements[k] is a unit-Frobenius symmetric D x D matrix equal to
    sum_{i<=j} coeffs[k, (i,j)] u_i (v) u_j over the input basis, where
    D = mn (or m(m+1)/2 in sym_vec coordinates for symmetric shapes).
    s_val is the smallest singular value of the constraint matrix, 0.0
    when it has more columns than rows.
    """

    elements: np.ndarray
    coeffs: np.ndarray
    ker_dim: int
    s_val: float
    pairs: tuple[tuple[int, int], ...]
    shape: ProblemShape


def _vectorized_basis(basis: np.ndarray, shape: ProblemShape) -> np.ndarray:
    if shape.symmetric:
        return np.stack([sym_vec(u) for u in basis])
    return basis.reshape(basis.shape[0], -1)


def intersection_basis(
    basis: np.ndarray, shape: ProblemShape, rank_tol: float = DEFAULT_RANK_TOL
) -> IntersectionBasis:
    """Numerical kernel of the all-pairs constraint matrix of a basis.

    basis is an (R, m, n) array, orthonormal in the vectorization the
    shape uses.  Kernel vectors are the right singular vectors whose
    singular value falls below rank_tol times max(largest singular
    value, 1); the absolute floor covers subspaces consisting entirely
    of rank-1 matrices, where the whole constraint matrix vanishes and
    the largest singular value is itself roundoff.
    """
    basis = np.asarray(basis, dtype=float)
    big_r = basis.shape[0]
    if shape.symmetric:
        rows = list(symmetric_basis(shape.m))
    else:
        rows = minor_indices(shape.m, shape.n)
    pairs = pair_indices(0, big_r)
    mat = constraint_entries(basis, rows, pairs, p=None)
    _, sig, vt = np.linalg.svd(mat, full_matrices=True)
    cutoff = rank_tol * max(sig[0], 1.0) if sig.size else 0.0
    rank = int(np.sum(sig > cutoff))
    ker_dim = len(pairs) - rank
    s_val = 0.0 if mat.shape[1] > mat.shape[0] else float(sig[-1])

    b = _vectorized_basis(basis, shape)
    dim = b.shape[1]
    elements = np.zeros((ker_dim, dim, dim))
    coeffs = vt[rank:].copy()
    for k in range(ker_dim):
        c = np.zeros((big_r, big_r))
        for pos, (i, j) in enumerate(pairs):
            if i == j:
                c[i - 1, i - 1] = coeffs[k, pos]
            else:
                c[i - 1, j - 1] = c[j - 1, i - 1] = 0.5 * coeffs[k, pos]
        p_mat = b.T @ c @ b
        fro = np.linalg.norm(p_mat)
        if fro > 0:
            p_mat /= fro
            coeffs[k] /= fro
        elements[k] = p_mat
    return IntersectionBasis(
        elements=elements,
        coeffs=coeffs,
        ker_dim=ker_dim,
        s_val=s_val,
        pairs=tuple(pairs),
        shape=shape,
    )


def _sign_normalize(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > _SIGN_EPS)
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def _pick_direction(m1: np.ndarray, m2: np.ndarray, v: np.ndarray) -> np.ndarray:
    """m1 @ v or m2 @ v, whichever carries more energy."""
    c1, c2 = m1 @ v, m2 @ v
    return c1 if np.linalg.norm(c1) >= np.linalg.norm(c2) else c2


def _realify(z: np.ndarray) -> np.ndarray:
    """Dominant real direction of a complex vector."""
    if not np.iscomplexobj(z):
        return z.astype(float)
    stacked = np.stack([z.real, z.imag], axis=1)
    u, sig, _ = np.linalg.svd(stacked, full_matrices=False)
    return u[:, 0] * sig[0]


def simultaneous_diagonalization(
    elements: np.ndarray, rng: np.random.Generator
) -> tuple[np.ndarray, float]:
    """Split a span of symmetric matrices into common rank-1 terms.

    Draws two random combinations A, B of the elements, compresses them
    to the common column space Q, and solves the generalized eigenvalue
    problems (A, B) and (B, A).  The two eigensystems are matched
    greedily by reciprocal eigenvalues (in homogeneous form, so
    infinite eigenvalues cost nothing extra) and each matched pair
    yields one direction, averaged from both sides, realified, lifted
    through Q, unit-normalized, and sign-normalized.

    Returns (vectors, decomp_error): vectors has one row per recovered
    direction, ordered by match confidence (smallest reciprocal
    mismatch first); decomp_error is the largest relative residual of
    an input element against the span of the recovered rank-1 matrices.
    """
    elements = np.asarray(elements, dtype=float)
    if elements.ndim != 3 or elements.shape[0] == 0:
        raise DegenerateInputError("need a nonempty (t, D, D) element array")
    t, dim, _ = elements.shape
    stacked = elements.transpose(1, 0, 2).reshape(dim, t * dim)
    uu, ss, _ = np.linalg.svd(stacked, full_matrices=False)
    if ss.size == 0 or ss[0] <= 0:
        raise DegenerateInputError("elements are identically zero")
    r = int(np.sum(ss > _COLSPACE_TOL * ss[0]))
    q = uu[:, :r]

    a_full = np.tensordot(rng.standard_normal(t), elements, axes=1)
    b_full = np.tensordot(rng.standard_normal(t), elements, axes=1)
    a_red = q.T @ a_full @ q
    b_red = q.T @ b_full @ q

    (alpha1, beta1), v1 = scipy.linalg.eig(a_red, b_red, homogeneous_eigvals=True)
    (alpha2, beta2), v2 = scipy.linalg.eig(b_red, a_red, homogeneous_eigvals=True)

    # (a1/b1) * (a2/b2) = 1 in homogeneous form: |a1 a2 - b1 b2| small
    num = np.abs(np.outer(alpha1, alpha2) - np.outer(beta1, beta2))
    den = np.abs(np.outer(alpha1, alpha2)) + np.abs(np.outer(beta1, beta2)) + 1e-300
    cost = num / den

    vectors = np.zeros((r, dim))
    unmatched = cost.copy()
    for k in range(r):
        flat = int(np.argmin(unmatched))
        i, j = divmod(flat, r)
        unmatched[i, :] = np.inf
        unmatched[:, j] = np.inf
        e1 = _pick_direction(b_red, a_red, v1[:, i])
        e2 = _pick_direction(a_red, b_red, v2[:, j])
        n1, n2 = np.linalg.norm(e1), np.linalg.norm(e2)
        if n1 == 0 and n2 == 0:
            raise DegenerateInputError("eigenvector produced a zero direction")
        combined = e1 / n1 if n1 > 0 else np.zeros_like(e1)
        if n2 > 0:
            e2 = e2 / n2
            phase = np.vdot(combined, e2) if n1 > 0 else 0.0
            if abs(phase) > 0:
                e2 = e2 * (np.conj(phase) / abs(phase))
            combined = combined + e2
        w = q @ _realify(combined)
        norm = np.linalg.norm(w)
        if norm == 0:
            raise DegenerateInputError("recovered direction vanished")
        vectors[k] = _sign_normalize(w / norm)

    gram = np.stack([np.outer(w, w).reshape(-1) for w in vectors], axis=1)
    targets = elements.reshape(t, -1).T
    coef, *_ = np.linalg.lstsq(gram, targets, rcond=None)
    resid = targets - gram @ coef
    rel = np.linalg.norm(resid, axis=0) / np.linalg.norm(targets, axis=0)
    return vectors, float(np.max(rel))


def matching_error(truth, recovered) -> float:
    """Greedy matching deviation between truth and recovered matrices.

    Cosine similarity is the absolute normalized Frobenius inner
    product, so sign and scale are immaterial.  Pairs are matched
    greedily by largest cosine (ties to the lowest index pair) and the
    result is 1 minus the worst matched cosine, clamped to [0, 1].
    The two lists must have equal length (the matching is a
    permutation); two empty lists give 0.0.
    """
    truth = [np.asarray(t, dtype=float).reshape(-1) for t in truth]
    recovered = [np.asarray(r, dtype=float).reshape(-1) for r in recovered]
    if len(truth) != len(recovered):
        raise LengthMismatchError(
            f"{len(truth)} targets but {len(recovered)} candidates"
        )
    if not truth:
        return 0.0
    t_norms = [np.linalg.norm(t) for t in truth]
    r_norms = [np.linalg.norm(r) for r in recovered]
    if any(x == 0 for x in t_norms) or any(x == 0 for x in r_norms):
        raise DegenerateInputError("zero matrix passed to matching_error")
    cos = np.abs(
        np.stack([t / nt for t, nt in zip(truth, t_norms)])
        @ np.stack([r / nr for r, nr in zip(recovered, r_norms)]).T
    )
    worst = 1.0
    work = cos.copy()
    for _ in range(len(truth)):
        flat = int(np.argmax(work))
        i, j = divmod(flat, work.shape[1])
        worst = min(worst, float(cos[i, j]))
        work[i, :] = -1.0
        work[:, j] = -1.0
    return float(min(max(1.0 - worst, 0.0), 1.0))


@dataclass(frozen=True)
class RecoveryResult:
    """Outcome of the full recovery pipeline on one subspace basis."""

    ker_dim: int
    s_val: float
    recovered: np.ndarray
    decomp_error: float | None
    matching: float | None
    intersection: IntersectionBasis


def recover_rank_one(
    basis: np.ndarray,
    shape: ProblemShape,
    rng: np.random.Generator,
    ground_truth=None,
    rank_tol: float = DEFAULT_RANK_TOL,
) -> RecoveryResult:
    """Full pipeline: kernel, rank-1 split, optional ground-truth match.

    basis must be orthonormal (see subspaces.orthonormal_basis).  When
    ground_truth (a list of s matrices) is given and nonempty, matching
    is its greedy matching error against the s highest-confidence
    recovered matrices (the kernel can be larger than s past the
    counting bound, and the split then emits one candidate per kernel
    direction), with 1.0 reported if fewer than s were recovered.
    """
    ib = intersection_basis(basis, shape, rank_tol=rank_tol)
    m, n = shape.m, shape.n
    if ib.ker_dim == 0:
        recovered = np.zeros((0, m, n))
        decomp_error = None
    else:
        vectors, decomp_error = simultaneous_diagonalization(ib.elements, rng)
        if shape.symmetric:
            recovered = np.stack([sym_unvec(v, m) for v in vectors])
        else:
            recovered = vectors.reshape(-1, m, n)
    matching = None
    if ground_truth is not None and len(ground_truth) > 0:
        if len(recovered) < len(ground_truth):
            matching = 1.0
        else:
            matching = matching_error(
                ground_truth, list(recovered[: len(ground_truth)])
            )
    return RecoveryResult(
        ker_dim=ib.ker_dim,
        s_val=ib.s_val,
        recovered=recovered,
        decomp_error=decomp_error,
        matching=matching,
        intersection=ib,
    )
