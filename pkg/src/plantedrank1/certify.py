"""Exact finite-field certificates for the counting-bound conjecture.

A case (m, n, s, R) inside the counting bound is certified by a single
witness subspace over F_p on which the constraint matrix has full
column rank: rank is exhibited by a nonsingular maximal square
submatrix, recorded as the rows removed plus the minor determinant
mod p.  Anyone can re-derive the witness from (m, n, s, R, seed, p)
alone and recompute the determinant, which is what verify_certificate
does.

Sweeps enumerate desk-scale parameter bands the same way the reported
experiments do: shapes with bound_min <= mn/sqrt(2) <= bound_max
(m^2/sqrt(6) for symmetric shapes), and per shape either the boundary
cases of the counting inequality ("all"), the empty-plant case
("null"), the fully planted case ("cpd"), or the just-past-the-bound
grid used to probe failure ("overbound", handled by the recovery side).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from .bounds import (
    PlantSpec,
    ProblemShape,
    conjecture_holds,
    identifiability_bound,
    num_cols,
    r_max,
    r_max_given_s,
)
from .errors import PreconditionError, SchemaError
from .field_arith import eliminate_maximal_minor, square_det
from .minor_forms import build_constraint_matrix
from .subspaces import generate_modular

__all__ = [
    "Certificate",
    "CertifyFailure",
    "certify_case",
    "verify_certificate",
    "band_shapes",
    "sweep_cases",
    "overbound_cases",
    "SweepReport",
    "run_sweep",
    "DEFAULT_PRIME",
    "DEFAULT_MAX_RESAMPLES",
]

DEFAULT_PRIME = 997
DEFAULT_MAX_RESAMPLES = 16


@dataclass(frozen=True)
class Certificate:
    """Self-contained witness record for one certified case."""

    m: int
    n: int
    R: int
    s: int
    symmetric: bool
    p: int
    seed: int
    det_mod_p: int
    rm_rows: tuple[int, ...]


@dataclass(frozen=True)
class CertifyFailure:
    """Record of a case that failed to certify within the resample budget."""

    m: int
    n: int
    R: int
    s: int
    symmetric: bool
    p: int
    base_seed: int
    attempts: int


def _is_odd_prime(p: int) -> bool:
    if p < 3 or p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def certify_case(
    shape: ProblemShape,
    spec: PlantSpec,
    p: int = DEFAULT_PRIME,
    seed: int = 0,
    max_resamples: int = DEFAULT_MAX_RESAMPLES,
) -> Certificate | CertifyFailure:
    """Search for a full-rank witness, advancing the seed on failure.

    The case must satisfy the counting inequality (PreconditionError
    otherwise).  Each attempt regenerates the witness subspace from the
    current seed; on a rank-deficient constraint matrix the seed is
    incremented and the case retried, up to max_resamples attempts in
    total.
    """
    if not conjecture_holds(shape, spec):
        raise PreconditionError(
            f"case m={shape.m} n={shape.n} s={spec.s} R={spec.R} is outside "
            "the counting bound; nothing to certify"
        )
    if not _is_odd_prime(p):
        raise SchemaError(f"modulus {p} is not an odd prime")
    cols = num_cols(spec)
    for attempt in range(max_resamples):
        case_seed = seed + attempt
        witness = generate_modular(shape, spec, p, case_seed)
        mat = build_constraint_matrix(witness, columns="planted")
        report = eliminate_maximal_minor(mat.entries, p)
        if report.rank == cols:
            return Certificate(
                m=shape.m,
                n=shape.n,
                R=spec.R,
                s=spec.s,
                symmetric=shape.symmetric,
                p=p,
                seed=case_seed,
                det_mod_p=report.minor_det,
                rm_rows=report.removed_rows,
            )
    return CertifyFailure(
        m=shape.m,
        n=shape.n,
        R=spec.R,
        s=spec.s,
        symmetric=shape.symmetric,
        p=p,
        base_seed=seed,
        attempts=max_resamples,
    )


def verify_certificate(cert: Certificate) -> bool:
    """Re-derive the witness and recompute the recorded minor determinant.

    Returns True iff the kept square submatrix is nonsingular mod p and
    its determinant matches the certificate.  Structural defects raise
    SchemaError; an honest value mismatch just returns False.
    """
    try:
        shape = ProblemShape(cert.m, cert.n, symmetric=cert.symmetric)
        spec = PlantSpec(cert.s, cert.R)
    except ValueError as exc:
        raise SchemaError(f"malformed certificate: {exc}") from exc
    if not _is_odd_prime(cert.p):
        raise SchemaError(f"modulus {cert.p} is not an odd prime")
    if not conjecture_holds(shape, spec):
        raise SchemaError(
            "certificate claims a case outside the counting bound"
        )
    if not (0 <= cert.det_mod_p < cert.p):
        raise SchemaError("determinant out of range for the modulus")
    witness = generate_modular(shape, spec, cert.p, cert.seed)
    mat = build_constraint_matrix(witness, columns="planted")
    rows, cols = mat.entries.shape
    rm = cert.rm_rows
    if len(set(rm)) != len(rm) or any(not (0 <= r < rows) for r in rm):
        raise SchemaError("rm_rows contains duplicates or out-of-range indices")
    if len(rm) != rows - cols:
        raise SchemaError(
            f"rm_rows has {len(rm)} entries, expected {rows - cols}"
        )
    keep = [r for r in range(rows) if r not in set(rm)]
    det = square_det(mat.entries[keep], cert.p)
    return det != 0 and det == cert.det_mod_p


def band_shapes(
    bound_min: float, bound_max: float, symmetric: bool = False
) -> list[ProblemShape]:
    """Shapes inside the sweep band, ordered by (m, n).

    General: 2 <= m <= n with bound_min <= mn/sqrt(2) <= bound_max.
    Symmetric: m >= 2 with bound_min <= m^2/sqrt(6) <= bound_max.
    """
    shapes = []
    if symmetric:
        m = 2
        while m * m / math.sqrt(6) <= bound_max:
            if m * m / math.sqrt(6) >= bound_min:
                shapes.append(ProblemShape(m, m, symmetric=True))
            m += 1
        return shapes
    m = 2
    while m * m / math.sqrt(2) <= bound_max:
        n = m
        while m * n / math.sqrt(2) <= bound_max:
            if m * n / math.sqrt(2) >= bound_min:
                shapes.append(ProblemShape(m, n))
            n += 1
        m += 1
    return shapes


def sweep_cases(
    shape: ProblemShape, test_type: str, exhaustive: bool = False
) -> list[PlantSpec]:
    """Plant specs a sweep runs for one shape, ordered by (s, R).

    "all" takes the boundary case R = r_max_given_s(s) for every s up
    to r_max (the interior cases follow from the boundary ones by
    dropping columns); exhaustive=True expands to the full grid
    s <= R <= r_max_given_s(s).  "null" is the single s=0 boundary
    case, "cpd" the fully planted s = R = r_max case.
    """
    if test_type == "null":
        return [PlantSpec(0, r_max_given_s(shape, 0))]
    if test_type == "cpd":
        top = r_max(shape)
        return [PlantSpec(top, top)]
    if test_type == "all":
        out = []
        for s in range(r_max(shape) + 1):
            top = r_max_given_s(shape, s)
            if exhaustive:
                out.extend(PlantSpec(s, rr) for rr in range(max(s, 1), top + 1))
            elif top >= max(s, 1):
                out.append(PlantSpec(s, top))
        return out
    raise ValueError(f"unknown test type {test_type!r}")


def overbound_cases(shape: ProblemShape) -> list[PlantSpec]:
    """The just-past-the-bound grid for one shape.

    For each s up to r_max + 1 take R one past the admissible maximum
    for that s, keeping the case only when R stays within the
    identifiability bound of the recovery step.
    """
    out = []
    ident = identifiability_bound(shape)
    for s in range(r_max(shape) + 2):
        big_r = r_max_given_s(shape, s) + 1
        if big_r <= ident:
            out.append(PlantSpec(s, big_r))
    return out


@dataclass(frozen=True)
class SweepReport:
    """Everything a certification sweep produced, in enumeration order."""

    test_type: str
    symmetric: bool
    bound_min: float
    bound_max: float
    p: int
    base_seed: int
    exhaustive: bool
    certificates: tuple[Certificate, ...]
    failures: tuple[CertifyFailure, ...]
    timings: tuple[tuple[tuple[int, int, int, int], float], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _case_args(test_type, bound_min, bound_max, symmetric, exhaustive):
    out = []
    for shape in band_shapes(bound_min, bound_max, symmetric):
        for spec in sweep_cases(shape, test_type, exhaustive=exhaustive):
            out.append((shape, spec))
    return out


def _run_one(packed):
    m, n, symmetric, s, big_r, p, seed, max_resamples = packed
    shape = ProblemShape(m, n, symmetric=symmetric)
    spec = PlantSpec(s, big_r)
    t0 = time.perf_counter()
    result = certify_case(shape, spec, p=p, seed=seed, max_resamples=max_resamples)
    return result, time.perf_counter() - t0


def run_sweep(
    test_type: str,
    bound_min: float,
    bound_max: float,
    p: int = DEFAULT_PRIME,
    symmetric: bool = False,
    seed: int = 0,
    exhaustive: bool = False,
    max_resamples: int = DEFAULT_MAX_RESAMPLES,
    jobs: int = 1,
) -> SweepReport:
    """Certify every case in the band; failures are collected, not raised.

    Each case is certified independently from (seed, case identity), so
    the report does not depend on jobs (cases may only be dispatched to
    a process pool, never reordered).
    """
    cases = _case_args(test_type, bound_min, bound_max, symmetric, exhaustive)
    packed = [
        (sh.m, sh.n, sh.symmetric, sp.s, sp.R, p, seed, max_resamples)
        for sh, sp in cases
    ]
    if jobs > 1 and len(packed) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_one, packed, chunksize=4))
    else:
        outcomes = [_run_one(args) for args in packed]

    certs: list[Certificate] = []
    fails: list[CertifyFailure] = []
    timings = []
    for (shape, spec), (result, elapsed) in zip(cases, outcomes):
        timings.append(((shape.m, shape.n, spec.s, spec.R), elapsed))
        if isinstance(result, Certificate):
            certs.append(result)
        else:
            fails.append(result)
    key = lambda c: (c.m, c.n, c.s, c.R)
    return SweepReport(
        test_type=test_type,
        symmetric=symmetric,
        bound_min=bound_min,
        bound_max=bound_max,
        p=p,
        base_seed=seed,
        exhaustive=exhaustive,
        certificates=tuple(sorted(certs, key=key)),
        failures=tuple(sorted(fails, key=key)),
        timings=tuple(timings),
    )
