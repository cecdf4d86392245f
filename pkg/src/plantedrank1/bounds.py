"""Exact counting arithmetic for the planted rank-1 detection problem.

Everything here is integer-exact: row/column counts of the constraint
matrix, the largest rank R the counting inequality admits for a given
number of planted matrices s, and the identifiability ceiling for the
rank-1 recovery step.  No floating point is used; square roots are
taken with math.isqrt on rearranged inequalities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ShapeError, SpecError

__all__ = [
    "ProblemShape",
    "PlantSpec",
    "num_rows",
    "num_cols",
    "conjecture_holds",
    "r_max_given_s",
    "r_max",
    "s_star",
    "identifiability_bound",
    "ambient_dim",
    "check_compatible",
]


@dataclass(frozen=True)
class ProblemShape:
    """Ambient matrix space: m x n real matrices, or symmetric m x m.

    For the symmetric case pass symmetric=True; n then defaults to m
    and must equal m if given explicitly.
    """

    m: int
    n: int | None = None
    symmetric: bool = False

    def __post_init__(self):
        if self.n is None:
            if not self.symmetric:
                raise ShapeError("n is required for the general (non-symmetric) case")
            object.__setattr__(self, "n", self.m)
        if self.m < 2 or self.n < 2:
            raise ShapeError(f"need m, n >= 2, got ({self.m}, {self.n})")
        if self.symmetric and self.m != self.n:
            raise ShapeError(f"symmetric shape needs n = m, got ({self.m}, {self.n})")


@dataclass(frozen=True)
class PlantSpec:
    """Plant parameters: s planted rank-1 matrices inside an R-dim subspace."""

    s: int
    R: int

    def __post_init__(self):
        if not (0 <= self.s <= self.R):
            raise SpecError(f"need 0 <= s <= R, got s={self.s}, R={self.R}")


def ambient_dim(shape: ProblemShape) -> int:
    """Dimension of the ambient matrix space (mn, or m(m+1)/2 symmetric)."""
    if shape.symmetric:
        return shape.m * (shape.m + 1) // 2
    return shape.m * shape.n


def check_compatible(shape: ProblemShape, spec: PlantSpec) -> None:
    """Raise SpecError unless R generators can be independent in the shape."""
    if spec.R > ambient_dim(shape):
        raise SpecError(
            f"R={spec.R} exceeds the ambient dimension {ambient_dim(shape)}"
        )


def num_rows(shape: ProblemShape) -> int:
    """Number of constraint rows: independent 2x2-minor forms of the shape.

    General case: C(m,2) * C(n,2).  Symmetric case: (m+1) m^2 (m-1) / 12,
    the dimension of the span of the restricted minor forms.
    """
    m, n = shape.m, shape.n
    if shape.symmetric:
        return (m + 1) * m * m * (m - 1) // 12
    return math.comb(m, 2) * math.comb(n, 2)


def num_cols(spec: PlantSpec) -> int:
    """Number of constraint columns: C(R+1,2) - s pair indices."""
    return math.comb(spec.R + 1, 2) - spec.s


def conjecture_holds(shape: ProblemShape, spec: PlantSpec) -> bool:
    """Whether the counting inequality num_rows >= num_cols holds.

    This is the conjectured exact threshold for generic success of the
    detection step, and the precondition for certification.
    """
    return num_rows(shape) >= num_cols(spec)


def r_max_given_s(shape: ProblemShape, s: int) -> int:
    """Largest R with conjecture_holds for this s.

    Integer-exact: the largest R with R(R+1) <= 2*(num_rows + s).
    """
    if s < 0:
        raise SpecError(f"need s >= 0, got {s}")
    b = num_rows(shape)
    return (math.isqrt(8 * (b + s) + 1) - 1) // 2


def r_max(shape: ProblemShape) -> int:
    """Largest s such that (s, R=s) still satisfies the counting inequality.

    Integer-exact: the largest R with R(R-1) <= 2*num_rows.  Equals
    r_max_given_s(shape, s) once s reaches s_star.
    """
    b = num_rows(shape)
    return (math.isqrt(8 * b + 1) + 1) // 2


def s_star(shape: ProblemShape) -> int:
    """Smallest s at which r_max_given_s reaches the overall r_max."""
    target = r_max(shape)
    for s in range(target + 1):
        if r_max_given_s(shape, s) == target:
            return s
    # unreachable: r_max_given_s(shape, r_max) == r_max always
    raise AssertionError("s_star search failed")


def identifiability_bound(shape: ProblemShape) -> int:
    """Largest R for which generic rank-1 recovery is identifiable.

    (m-1)(n-1) in the general case, m(m+1)/2 - m in the symmetric case.
    """
    m, n = shape.m, shape.n
    if shape.symmetric:
        return m * (m + 1) // 2 - m
    return (m - 1) * (n - 1)
