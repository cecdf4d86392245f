"""CP decomposition of low-rank tensors via the rank-1 detection step.

Flattening a rank-R order-3 tensor along its first two modes gives a
matrix whose column space is spanned by the R vectorized products
a_l b_l^T.  Those are exactly R planted rank-1 matrices in an
R-dimensional subspace, so the recovery pipeline finds them; the
remaining mode factors then come from one least-squares solve.  The
order-4 routine factors the right side once more, and the symmetric
order-4 routine runs the symmetric variant of the pipeline on the
n^2 x n^2 flattening.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .bounds import ProblemShape, r_max
from .errors import BoundError, DegenerateInputError, ModeError, RankError, ShapeError, SymmetryError
from .recover import recover_rank_one
from .subspaces import stream, sym_unvec, sym_vec

__all__ = [
    "flatten",
    "CPDecomposition",
    "decompose_order3",
    "decompose_order4",
    "decompose_symmetric4",
    "random_cp_tensor",
    "save_tensor",
    "load_tensor",
    "factors_to_csv",
]

_RANK_TOL = 1e-8
_RANK1_TOL = 1e-6
_SIGN_EPS = 1e-12
_SYM_TOL = 1e-10
ROLE_TENSOR = 4


def flatten(tensor: np.ndarray, left_modes) -> np.ndarray:
    """Matricize: rows indexed by left_modes, columns by the rest.

    Modes are 0-based; both index groups are ordered lexicographically
    (row-major).  left_modes must be a nonempty proper subset of the
    modes, without repeats.
    """
    t = np.asarray(tensor)
    left = list(left_modes)
    if len(left) != len(set(left)):
        raise ModeError(f"repeated modes in {left}")
    if any(not (0 <= mode < t.ndim) for mode in left):
        raise ModeError(f"modes {left} out of range for order {t.ndim}")
    if not 0 < len(left) < t.ndim:
        raise ModeError("left_modes must be a nonempty proper subset of modes")
    right = [mode for mode in range(t.ndim) if mode not in left]
    perm = left + right
    rows = int(np.prod([t.shape[mode] for mode in left]))
    return np.transpose(t, perm).reshape(rows, -1)


def _sign_fix(v: np.ndarray) -> tuple[np.ndarray, float]:
    """Flip v so its first significant entry is positive; return the sign."""
    nz = np.flatnonzero(np.abs(v) > _SIGN_EPS)
    if nz.size and v[nz[0]] < 0:
        return -v, -1.0
    return v, 1.0


@dataclass(frozen=True)
class CPDecomposition:
    """weights[l] * factors[0][:, l] (x) ... (x) factors[-1][:, l], summed.

    Factor columns are unit norm with their first significant entry
    positive; all remaining scale and sign sits in weights.
    """

    weights: np.ndarray
    factors: tuple[np.ndarray, ...]

    @property
    def order(self) -> int:
        return len(self.factors)

    @property
    def rank(self) -> int:
        return len(self.weights)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(f.shape[0] for f in self.factors)

    def reconstruct(self) -> np.ndarray:
        idx = "abcdefgh"[: self.order]
        expr = "r," + ",".join(f"{c}r" for c in idx) + "->" + idx
        return np.einsum(expr, self.weights, *self.factors)

    def residual(self, tensor: np.ndarray) -> float:
        tensor = np.asarray(tensor, dtype=float)
        return float(
            np.linalg.norm(self.reconstruct() - tensor) / np.linalg.norm(tensor)
        )

    def term(self, l: int) -> np.ndarray:
        """The l-th rank-1 term, weight included."""
        cols = [f[:, l] for f in self.factors]
        return self.weights[l] * reduce(np.multiply.outer, cols)


def _left_basis(flat: np.ndarray, n1: int, n2: int, big_r: int) -> np.ndarray:
    """Top-R left singular vectors as (R, n1, n2) matrices; rank must be R."""
    u, sig, _ = np.linalg.svd(flat, full_matrices=False)
    rank = int(np.sum(sig > _RANK_TOL * sig[0])) if sig.size else 0
    if rank != big_r:
        raise RankError(
            f"flattening has numerical rank {rank}, expected {big_r}"
        )
    return u[:, :big_r].T.reshape(big_r, n1, n2)


def _split_rank1(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Unit factors (a, b) of a near rank-1 matrix a b^T."""
    u, sig, vt = np.linalg.svd(mat)
    if sig[0] <= 0 or (sig.size > 1 and sig[1] > _RANK1_TOL * sig[0]):
        raise RankError(
            "recovered matrix is not numerically rank 1 "
            f"(sigma2/sigma1 = {sig[1] / sig[0]:.2e})"
        )
    a, _ = _sign_fix(u[:, 0])
    b, _ = _sign_fix(vt[0])
    return a, b


def _check_bound(big_r: int, printed: int, enforce: bool, what: str):
    if big_r > printed:
        msg = f"rank {big_r} exceeds the supported bound {printed} ({what})"
        if enforce:
            raise BoundError(msg)
        warnings.warn(msg, stacklevel=3)


def decompose_order3(
    tensor: np.ndarray,
    big_r: int,
    rng: np.random.Generator,
    enforce_bound: bool = True,
) -> CPDecomposition:
    """CP decomposition of an order-3 tensor of rank big_r.

    Supported for big_r <= min((n1-1)(n2-2)/2, n3); pass
    enforce_bound=False to try anyway with a warning.  Raises RankError
    when the mode-(1,2) flattening does not have numerical rank big_r
    or a recovered matrix fails the rank-1 test.
    """
    t = np.asarray(tensor, dtype=float)
    if t.ndim != 3:
        raise ShapeError(f"expected an order-3 tensor, got order {t.ndim}")
    n1, n2, n3 = t.shape
    _check_bound(big_r, min((n1 - 1) * (n2 - 2) // 2, n3), enforce_bound, "order 3")
    flat = flatten(t, (0, 1))
    basis = _left_basis(flat, n1, n2, big_r)
    result = recover_rank_one(basis, ProblemShape(n1, n2), rng)
    if result.ker_dim != big_r or len(result.recovered) != big_r:
        raise RankError(
            f"rank-1 detection found {result.ker_dim} directions, expected {big_r}"
        )
    pairs = [_split_rank1(mat) for mat in result.recovered]
    gram = np.stack([np.outer(a, b).reshape(-1) for a, b in pairs], axis=1)
    coef, *_ = np.linalg.lstsq(gram, flat, rcond=None)
    weights = np.zeros(big_r)
    a_fac = np.zeros((n1, big_r))
    b_fac = np.zeros((n2, big_r))
    c_fac = np.zeros((n3, big_r))
    for l, (a, b) in enumerate(pairs):
        c_raw = coef[l]
        norm = np.linalg.norm(c_raw)
        if norm == 0:
            raise DegenerateInputError(f"term {l} collapsed to zero weight")
        c, sign = _sign_fix(c_raw / norm)
        a_fac[:, l], b_fac[:, l], c_fac[:, l] = a, b, c
        weights[l] = sign * norm
    return CPDecomposition(weights=weights, factors=(a_fac, b_fac, c_fac))


def decompose_order4(
    tensor: np.ndarray,
    big_r: int,
    rng: np.random.Generator,
    enforce_bound: bool = True,
) -> CPDecomposition:
    """CP decomposition of an order-4 tensor of rank big_r.

    Supported for big_r <= min((n1-1)(n2-2)/2, n2 n3).  The mode-(1,2)
    flattening feeds the rank-1 detection step; each right-side vector
    is then itself split as a rank-1 n3 x n4 matrix.
    """
    t = np.asarray(tensor, dtype=float)
    if t.ndim != 4:
        raise ShapeError(f"expected an order-4 tensor, got order {t.ndim}")
    n1, n2, n3, n4 = t.shape
    _check_bound(
        big_r, min((n1 - 1) * (n2 - 2) // 2, n2 * n3), enforce_bound, "order 4"
    )
    flat = flatten(t, (0, 1))
    basis = _left_basis(flat, n1, n2, big_r)
    result = recover_rank_one(basis, ProblemShape(n1, n2), rng)
    if result.ker_dim != big_r or len(result.recovered) != big_r:
        raise RankError(
            f"rank-1 detection found {result.ker_dim} directions, expected {big_r}"
        )
    pairs = [_split_rank1(mat) for mat in result.recovered]
    gram = np.stack([np.outer(a, b).reshape(-1) for a, b in pairs], axis=1)
    coef, *_ = np.linalg.lstsq(gram, flat, rcond=None)
    weights = np.zeros(big_r)
    a_fac = np.zeros((n1, big_r))
    b_fac = np.zeros((n2, big_r))
    c_fac = np.zeros((n3, big_r))
    d_fac = np.zeros((n4, big_r))
    for l, (a, b) in enumerate(pairs):
        right = coef[l].reshape(n3, n4)
        u, sig, vt = np.linalg.svd(right)
        if sig[0] == 0 or (sig.size > 1 and sig[1] > _RANK1_TOL * sig[0]):
            raise RankError(f"right factor of term {l} is not rank 1")
        c, sc = _sign_fix(u[:, 0])
        d, sd = _sign_fix(vt[0])
        a_fac[:, l], b_fac[:, l] = a, b
        c_fac[:, l], d_fac[:, l] = c, d
        weights[l] = sc * sd * sig[0]
    return CPDecomposition(weights=weights, factors=(a_fac, b_fac, c_fac, d_fac))


def decompose_symmetric4(
    tensor: np.ndarray, big_r: int, rng: np.random.Generator
) -> CPDecomposition:
    """Symmetric CP decomposition sum_l w_l x_l^(x4) of a symmetric tensor.

    The n^2 x n^2 flattening spans big_r symmetric rank-1 matrices
    x x^T, recovered by the symmetric pipeline.  Supported for
    big_r up to the symmetric counting-bound maximum for n.  Raises
    SymmetryError when the tensor is not mode-permutation invariant
    (tolerance 1e-10 relative).
    """
    t = np.asarray(tensor, dtype=float)
    if t.ndim != 4 or len(set(t.shape)) != 1:
        raise ShapeError(f"expected an order-4 cubical tensor, got {t.shape}")
    n = t.shape[0]
    scale = float(np.max(np.abs(t))) or 1.0
    for perm in ((1, 0, 2, 3), (0, 2, 1, 3), (0, 1, 3, 2)):
        if np.max(np.abs(t - np.transpose(t, perm))) > _SYM_TOL * scale:
            raise SymmetryError(f"tensor is not symmetric under mode swap {perm}")
    shape = ProblemShape(n, symmetric=True)
    if big_r > r_max(shape):
        raise BoundError(
            f"rank {big_r} exceeds the symmetric bound {r_max(shape)} for n={n}"
        )
    flat = flatten(t, (0, 1))
    basis = _left_basis(flat, n, n, big_r)
    sym = np.stack([0.5 * (u + u.T) for u in basis])
    # re-orthonormalize in the compact symmetric coordinates
    g = np.stack([sym_vec(u) for u in sym])
    _, sig, vt = np.linalg.svd(g, full_matrices=False)
    if sig.size < big_r or sig[-1] <= _RANK_TOL * sig[0]:
        raise RankError("flattening column space is not symmetric of full rank")
    basis_sym = np.stack([sym_unvec(v, n) for v in vt[:big_r]])
    result = recover_rank_one(basis_sym, shape, rng)
    if result.ker_dim != big_r or len(result.recovered) != big_r:
        raise RankError(
            f"rank-1 detection found {result.ker_dim} directions, expected {big_r}"
        )
    x_fac = np.zeros((n, big_r))
    gram = np.zeros((n * n * n * n, big_r))
    for l, mat in enumerate(result.recovered):
        sym_mat = 0.5 * (mat + mat.T)
        vals, vecs = np.linalg.eigh(sym_mat)
        order = np.argsort(np.abs(vals))[::-1]
        if abs(vals[order[0]]) == 0 or (
            len(order) > 1 and abs(vals[order[1]]) > _RANK1_TOL * abs(vals[order[0]])
        ):
            raise RankError(f"recovered symmetric matrix {l} is not rank 1")
        x, _ = _sign_fix(vecs[:, order[0]])
        x_fac[:, l] = x
        gram[:, l] = reduce(np.multiply.outer, [x, x, x, x]).reshape(-1)
    weights, *_ = np.linalg.lstsq(gram, t.reshape(-1), rcond=None)
    return CPDecomposition(
        weights=weights, factors=(x_fac, x_fac, x_fac, x_fac)
    )


def random_cp_tensor(
    dims, big_r: int, seed: int = 0, symmetric: bool = False
) -> tuple[np.ndarray, CPDecomposition]:
    """Plant a unit-weight rank-big_r tensor with Gaussian unit factors.

    Factor mode d draws from the package RNG stream (seed, role 4,
    index d); the symmetric variant draws a single factor matrix from
    index 0 and repeats it.  Returns (tensor, planted decomposition).
    """
    dims = tuple(int(d) for d in dims)
    if symmetric and len(set(dims)) != 1:
        raise ShapeError("symmetric planting needs equal dims")
    if symmetric:
        x = stream(seed, ROLE_TENSOR, 0).standard_normal((dims[0], big_r))
        x /= np.linalg.norm(x, axis=0, keepdims=True)
        factors = tuple(x for _ in dims)
    else:
        factors = []
        for d, n in enumerate(dims):
            f = stream(seed, ROLE_TENSOR, d).standard_normal((n, big_r))
            f /= np.linalg.norm(f, axis=0, keepdims=True)
            factors.append(f)
        factors = tuple(factors)
    planted = CPDecomposition(weights=np.ones(big_r), factors=factors)
    return planted.reconstruct(), planted


def save_tensor(path, tensor: np.ndarray) -> None:
    """Text format: order line, dims line, then row-major entries."""
    t = np.asarray(tensor, dtype=float)
    with open(path, "w") as fh:
        fh.write(f"{t.ndim}\n")
        fh.write(" ".join(str(d) for d in t.shape) + "\n")
        for v in t.reshape(-1):
            fh.write(repr(float(v)) + "\n")


def load_tensor(path) -> np.ndarray:
    with open(path) as fh:
        order = int(fh.readline())
        dims = [int(x) for x in fh.readline().split()]
        if len(dims) != order:
            raise ShapeError(f"header claims order {order} but lists {len(dims)} dims")
        data = np.array([float(line) for line in fh if line.strip()])
    if data.size != int(np.prod(dims)):
        raise ShapeError(
            f"payload has {data.size} entries, dims {dims} need {int(np.prod(dims))}"
        )
    return data.reshape(dims)


def factors_to_csv(path, decomp: CPDecomposition) -> None:
    """CSV export: term,weight,mode,i,value with 1-based term/mode/i."""
    with open(path, "w") as fh:
        fh.write("term,weight,mode,i,value\n")
        for l in range(decomp.rank):
            w = repr(float(decomp.weights[l]))
            for mode, fac in enumerate(decomp.factors, start=1):
                for i in range(fac.shape[0]):
                    fh.write(f"{l + 1},{w},{mode},{i + 1},{repr(float(fac[i, l]))}\n")
