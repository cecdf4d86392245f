#!/usr/bin/env python3
"""Print the counting-bound tables for small shapes.

For an m x n problem there are C(m,2)*C(n,2) independent 2x2 minor
constraints, and a dimension-R subspace with s planted rank-1 matrices
needs C(R+1,2) - s of them to pin the kernel down to the planted span.
r_max is therefore the largest subspace dimension that can ever work
(with s = R plants), and s_star is the smallest number of plants that
makes R = r_max feasible.  The symmetric table replaces the constraint
count by the dimension of the space spanned by minors of symmetric
matrices, (m+1)m^2(m-1)/12.
"""

from plantedrank1 import PlantSpec, ProblemShape
from plantedrank1.bounds import (
    identifiability_bound,
    num_rows,
    r_max,
    r_max_given_s,
    s_star,
)


def general_table(max_m: int = 8, max_n: int = 10) -> None:
    print("r_max for general m x n (rows m, columns n)")
    header = "m\\n " + "".join(f"{n:>5}" for n in range(2, max_n + 1))
    print(header)
    for m in range(2, max_m + 1):
        cells = []
        for n in range(2, max_n + 1):
            cells.append(f"{r_max(ProblemShape(m, n)):>5}" if m <= n else "     ")
        print(f"{m:<4}" + "".join(cells))
    print()


def symmetric_table(max_m: int = 10) -> None:
    print("r_max for symmetric m x m")
    print("m     rows  r_max  s_star  identifiability")
    for m in range(2, max_m + 1):
        shape = ProblemShape(m, symmetric=True)
        print(
            f"{m:<6}{num_rows(shape):<6}{r_max(shape):<7}"
            f"{s_star(shape):<8}{identifiability_bound(shape)}"
        )
    print()


def boundary_profile(m: int, n: int) -> None:
    shape = ProblemShape(m, n)
    print(f"boundary profile for {m} x {n}: R as a function of the plant count s")
    print("s   largest feasible R")
    for s in range(r_max(shape) + 1):
        big_r = r_max_given_s(shape, s)
        marker = "  <- r_max reached" if big_r == r_max(shape) and s == s_star(shape) else ""
        print(f"{s:<4}{big_r}{marker}")
    spec = PlantSpec(s_star(shape), r_max(shape))
    print(f"first boundary case: s = {spec.s}, R = {spec.R}\n")


def main() -> None:
    general_table()
    symmetric_table()
    boundary_profile(3, 3)
    boundary_profile(5, 7)


if __name__ == "__main__":
    main()
