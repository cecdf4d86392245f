#!/usr/bin/env python3
"""Tensor CP decomposition by rank-1 detection on a flattening.

Flattening a rank-R order-3 tensor along modes (1,2) yields a matrix
whose column space is spanned by R rank-1 matrices a_l b_l^T: exactly
the planted-subspace problem.  The counting bound then supports ranks
up to (n1-1)(n2-2)/2, roughly twice the ambient mode dimension, and
the remaining factors come from one least-squares solve.  The order-4
and symmetric variants reuse the same detection step.
"""

import numpy as np

from plantedrank1.recover import matching_error
from plantedrank1.subspaces import stream
from plantedrank1.tensor_decomp import (
    decompose_order3,
    decompose_order4,
    decompose_symmetric4,
    random_cp_tensor,
)


def term_match(planted, found) -> float:
    return matching_error(
        [planted.term(l) for l in range(planted.rank)],
        [found.term(l) for l in range(found.rank)],
    )


def order3_beyond_mode_dimension() -> None:
    dims, rank = (6, 6, 10), 10
    tensor, planted = random_cp_tensor(dims, rank, seed=0)
    result = decompose_order3(tensor, rank, stream(0, 3, 0))
    print(f"order 3, dims {dims}, rank {rank} (> mode dims 6):")
    print(f"  reconstruction residual  {result.residual(tensor):.3e}")
    print(f"  term matching error      {term_match(planted, result):.3e}")
    weights = np.sort(np.abs(result.weights))[::-1]
    print(f"  recovered |weights|      {np.round(weights, 6)}\n")


def order4_case() -> None:
    dims, rank = (6, 6, 6, 6), 10
    tensor, planted = random_cp_tensor(dims, rank, seed=0)
    result = decompose_order4(tensor, rank, stream(0, 3, 0))
    print(f"order 4, dims {dims}, rank {rank}:")
    print(f"  reconstruction residual  {result.residual(tensor):.3e}")
    print(f"  term matching error      {term_match(planted, result):.3e}\n")


def symmetric_case() -> None:
    n, rank = 4, 5
    tensor, planted = random_cp_tensor((n,) * 4, rank, seed=0, symmetric=True)
    result = decompose_symmetric4(tensor, rank, stream(0, 3, 0))
    print(f"symmetric order 4, n={n}, rank {rank} (> n):")
    print(f"  reconstruction residual  {result.residual(tensor):.3e}")
    print(f"  term matching error      {term_match(planted, result):.3e}")
    x = result.factors[0]
    gram = np.abs(x.T @ x)
    print(f"  largest off-diagonal factor coherence {np.max(gram - np.diag(np.diag(gram))):.3f}\n")


def rank_scaling() -> None:
    print("order-3 cubic n x n x n: supported rank vs mode dimension")
    print("n   bound (n-1)(n-2)/2   mode dim")
    for n in range(4, 11):
        print(f"{n:<4}{(n - 1) * (n - 2) // 2:<20}{n}")


def main() -> None:
    order3_beyond_mode_dimension()
    order4_case()
    symmetric_case()
    rank_scaling()


if __name__ == "__main__":
    main()
