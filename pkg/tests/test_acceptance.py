"""Acceptance suite: ten end-to-end checks with pinned tolerances and budgets.

Each test prints exactly one line of the form

    acceptance NN <label>: PASS|FAIL (<elapsed>s / limit <budget>s) <detail>

and then asserts.  The checks cover the arithmetic of the counting
bound, the constraint-entry formula, the exact-arithmetic certificate
sweeps, floating-point recovery inside and outside the bound, the
symmetric variant, the square-submatrix structure, tensor CP
decomposition, and byte-level determinism of every CSV artifact.
"""

import math
import time

import numpy as np

from plantedrank1.bounds import (
    PlantSpec,
    ProblemShape,
    conjecture_holds,
    num_cols,
    num_rows,
    r_max,
    r_max_given_s,
    s_star,
)
from plantedrank1.certify import (
    band_shapes,
    overbound_cases,
    run_sweep,
    verify_certificate,
)
from plantedrank1.cli import NumericalRow, write_certificate_csv, write_numerical_csv
from plantedrank1.minor_forms import (
    constraint_entries,
    constraint_entry,
    minor_form_matrix,
    minor_indices,
    pair_indices,
    symmetric_basis,
    symmetric_form_matrix,
)
from plantedrank1.proof_check import check_structure
from plantedrank1.recover import matching_error, recover_rank_one
from plantedrank1.subspaces import generate_real, orthonormal_basis, stream
from plantedrank1.tensor_decomp import (
    decompose_order3,
    decompose_order4,
    decompose_symmetric4,
    factors_to_csv,
    random_cp_tensor,
)

ROLE_PIPELINE = 3


def report(num: int, label: str, ok: bool, elapsed: float, limit: float, detail: str = ""):
    tail = f" {detail}" if detail else ""
    print(
        f"acceptance {num:02d} {label}: {'PASS' if ok else 'FAIL'} "
        f"({elapsed:.1f}s / limit {limit:.0f}s){tail}"
    )


def run_case(shape: ProblemShape, spec: PlantSpec, seed: int):
    """The floating-point pipeline exactly as the CLI drives it."""
    sub = generate_real(shape, spec, seed)
    basis = orthonormal_basis(sub)
    truth = list(sub.planted) if spec.s > 0 else None
    return recover_rank_one(basis, shape, stream(seed, ROLE_PIPELINE, 0), ground_truth=truth)


def case_row(shape, spec, seed) -> NumericalRow:
    res = run_case(shape, spec, seed)
    return NumericalRow(
        m=shape.m, n=shape.n, R=spec.R, s=spec.s, seed=seed,
        ker_dim=res.ker_dim, decomp_error=res.decomp_error,
        s_val=res.s_val, w=res.matching,
    )


def test_01_boundary_arithmetic():
    t0 = time.perf_counter()
    bad = []
    for m in range(2, 7):
        for n in range(m, 43):
            if m * n / math.sqrt(2) > 30:
                break
            shape = ProblemShape(m, n)
            big_b = math.comb(m, 2) * math.comb(n, 2)

            def holds(big_r, s):
                return math.comb(big_r + 1, 2) - s <= big_b

            brute_top = max(big_r for big_r in range(0, 4 * big_b + 3) if holds(big_r, big_r))
            if r_max(shape) != brute_top:
                bad.append(("r_max", m, n, r_max(shape), brute_top))
            for s in range(0, brute_top + 4):
                brute_rs = max(
                    big_r for big_r in range(0, 4 * big_b + 3) if holds(big_r, s)
                )
                if r_max_given_s(shape, s) != brute_rs:
                    bad.append(("r_max_given_s", m, n, s))
            brute_star = min(s for s in range(0, brute_top + 1) if holds(brute_top, s))
            if s_star(shape) != brute_star:
                bad.append(("s_star", m, n, s_star(shape), brute_star))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 1.0
    report(1, "boundary-arithmetic", ok, elapsed, 1.0, f"mismatches: {bad}" if bad else "")
    assert not bad, bad
    assert elapsed < 1.0


def test_02_constraint_entry_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(500):
        m = int(rng.integers(2, 7))
        n = int(rng.integers(2, 7))
        rows = minor_indices(m, n)
        idx = rows[int(rng.integers(len(rows)))]
        vi = rng.standard_normal((m, n))
        vj = rng.standard_normal((m, n))
        form = minor_form_matrix(idx, m, n)
        x, y = vi.reshape(-1), vj.reshape(-1)
        contraction = float(np.sum(form * 0.5 * (np.outer(x, y) + np.outer(y, x))))
        worst = max(worst, abs(constraint_entry(vi, vj, idx) - contraction))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 5.0
    report(2, "constraint-entry-oracle", ok, elapsed, 5.0, f"max deviation {worst:.2e}")
    assert worst <= 1e-12
    assert elapsed < 5.0


def test_03_certificate_sweeps():
    t0 = time.perf_counter()
    counts = {}
    problems = []
    for test_type in ("all", "null", "cpd"):
        rep = run_sweep(test_type, 0, 20, p=997, seed=0)
        counts[test_type] = len(rep.certificates)
        if rep.failures:
            problems += [(test_type, f) for f in rep.failures]
        for cert in rep.certificates:
            if not (0 <= cert.seed < 16):
                problems.append((test_type, "resamples", cert))
            if not verify_certificate(cert):
                problems.append((test_type, "verify", cert))
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 600.0
    report(3, "certificate-sweeps", ok, elapsed, 600.0,
           f"certified {counts}" if not problems else f"problems: {problems}")
    assert not problems, problems
    assert elapsed < 600.0


def sample_inbound_cases(count: int, rng_seed: int, null: bool):
    """Deterministic random in-bound cases at m, n <= 7."""
    rng = np.random.default_rng(rng_seed)
    cases = []
    while len(cases) < count:
        m = int(rng.integers(2, 8))
        n = int(rng.integers(m, 8))
        shape = ProblemShape(m, n)
        s = 0 if null else int(rng.integers(1, r_max(shape) + 1))
        hi = r_max_given_s(shape, s)
        lo = max(s, 2)
        if hi < lo:
            continue
        big_r = int(rng.integers(lo, hi + 1))
        spec = PlantSpec(s, big_r)
        assert conjecture_holds(shape, spec)
        cases.append((shape, spec))
    return cases


def test_04_recovery_within_bound():
    t0 = time.perf_counter()
    bad = []
    worst = 0.0
    for seed, (shape, spec) in enumerate(sample_inbound_cases(50, 0, null=False)):
        res = run_case(shape, spec, seed)
        if res.ker_dim != spec.s or res.matching > 1e-9:
            bad.append((shape.m, shape.n, spec.s, spec.R, res.ker_dim, res.matching))
        worst = max(worst, res.matching)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 300.0
    report(4, "recovery-within-bound", ok, elapsed, 300.0,
           f"worst w {worst:.2e}" if not bad else f"failures: {bad}")
    assert not bad, bad
    assert elapsed < 300.0


def test_05_null_certification():
    t0 = time.perf_counter()
    bad = []
    worst = np.inf
    for seed, (shape, spec) in enumerate(sample_inbound_cases(20, 1, null=True)):
        sub = generate_real(shape, spec, 100 + seed)
        basis = orthonormal_basis(sub)
        res = recover_rank_one(basis, shape, stream(100 + seed, ROLE_PIPELINE, 0))
        mat = constraint_entries(
            basis, minor_indices(shape.m, shape.n), pair_indices(0, spec.R), p=None
        )
        ratio = res.s_val / np.linalg.svd(mat, compute_uv=False)[0]
        if res.ker_dim != 0 or ratio < 1e-6:
            bad.append((shape.m, shape.n, spec.R, res.ker_dim, ratio))
        worst = min(worst, ratio)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60.0
    report(5, "null-certification", ok, elapsed, 60.0,
           f"worst s_val ratio {worst:.2e}" if not bad else f"failures: {bad}")
    assert not bad, bad
    assert elapsed < 60.0


def test_06_overbound_grid():
    t0 = time.perf_counter()
    kernel_violations = []
    floor_violations = []
    cases = 0
    for shape in band_shapes(0, 20):
        for spec in overbound_cases(shape):
            res = run_case(shape, spec, 0)
            cases += 1
            expected = num_cols(PlantSpec(0, spec.R)) - num_rows(shape)
            if res.ker_dim != expected:
                kernel_violations.append(
                    (shape.m, shape.n, spec.s, spec.R, res.ker_dim, expected)
                )
            if spec.s > 0 and res.matching < 0.01:
                floor_violations.append(
                    (shape.m, shape.n, spec.s, spec.R, round(res.matching, 5))
                )
    elapsed = time.perf_counter() - t0
    ok = not kernel_violations and not floor_violations and elapsed < 300.0
    detail = f"{cases} cases, kernel law exact"
    if kernel_violations:
        detail += f", kernel violations: {kernel_violations}"
    if floor_violations:
        detail += f", matching floor 0.01 violated: {floor_violations}"
    report(6, "overbound-grid", ok, elapsed, 300.0, detail)
    assert not kernel_violations, kernel_violations
    assert not floor_violations, floor_violations
    assert elapsed < 300.0


def test_07_symmetric_pipeline():
    t0 = time.perf_counter()
    problems = []
    for m in range(2, 9):
        forms = symmetric_basis(m)
        expect = (m + 1) * m * m * (m - 1) // 12
        stacked = np.stack([symmetric_form_matrix(f, m).reshape(-1) for f in forms])
        rank = int(np.linalg.matrix_rank(stacked))
        if not len(forms) == expect == rank:
            problems.append(("basis", m, len(forms), expect, rank))
    for test_type in ("all", "null", "cpd"):
        rep = run_sweep(test_type, 0, 15, p=997, symmetric=True, seed=0)
        if rep.failures:
            problems += [(test_type, f) for f in rep.failures]
        problems += [
            (test_type, "verify", c)
            for c in rep.certificates
            if not verify_certificate(c)
        ]
    for shape in band_shapes(0, 15, symmetric=True):
        for spec in overbound_cases(shape):
            res = run_case(shape, spec, 0)
            expected = num_cols(PlantSpec(0, spec.R)) - num_rows(shape)
            if res.ker_dim != expected:
                problems.append(("overbound", shape.m, spec.s, spec.R, res.ker_dim))
    elapsed = time.perf_counter() - t0
    ok = not problems and elapsed < 300.0
    report(7, "symmetric-pipeline", ok, elapsed, 300.0,
           f"problems: {problems}" if problems else "")
    assert not problems, problems
    assert elapsed < 300.0


def proof_grid():
    for m in range(2, 6):
        for n in range(3, 10):
            top = (m - 1) * (n - 2) // 2
            for big_r in range(1, top + 1):
                for s in sorted({0, big_r // 2, big_r}):
                    yield m, n, s, big_r


def test_08_proof_structure():
    t0 = time.perf_counter()
    bad = []
    cases = 0
    for m, n, s, big_r in proof_grid():
        rep = check_structure(
            ProblemShape(m, n), PlantSpec(s, big_r), p=997, seed=0, max_trials=5
        )
        cases += 1
        if not rep.ok:
            bad.append((m, n, s, big_r))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120.0
    report(8, "proof-structure", ok, elapsed, 120.0,
           f"{cases} cases" if not bad else f"failures: {bad}")
    assert not bad, bad
    assert elapsed < 120.0


def tensor_runs(seed: int):
    rng = lambda: stream(seed, ROLE_PIPELINE, 0)
    t3, p3 = random_cp_tensor((6, 6, 10), 10, seed=seed)
    d3 = decompose_order3(t3, 10, rng())
    t4, p4 = random_cp_tensor((6, 6, 6, 6), 10, seed=seed)
    d4 = decompose_order4(t4, 10, rng())
    ts, ps = random_cp_tensor((4, 4, 4, 4), 5, seed=seed, symmetric=True)
    ds = decompose_symmetric4(ts, 5, rng())
    return [("order3", t3, p3, d3), ("order4", t4, p4, d4), ("sym4", ts, ps, ds)]


def test_09_tensor_decomposition():
    t0 = time.perf_counter()
    bad = []
    for label, tensor, planted, decomp in tensor_runs(0):
        residual = decomp.residual(tensor)
        match = matching_error(
            [planted.term(l) for l in range(planted.rank)],
            [decomp.term(l) for l in range(decomp.rank)],
        )
        if residual > 1e-7 or match > 1e-7:
            bad.append((label, residual, match))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120.0
    report(9, "tensor-decomposition", ok, elapsed, 120.0,
           f"failures: {bad}" if bad else "")
    assert not bad, bad
    assert elapsed < 120.0


def test_10_determinism(tmp_path):
    t0 = time.perf_counter()
    mismatched = []

    def twice(name, produce):
        paths = []
        for attempt in (0, 1):
            path = tmp_path / f"{name}.{attempt}.csv"
            produce(path)
            paths.append(path.read_bytes())
        if paths[0] != paths[1]:
            mismatched.append(name)

    for test_type in ("all", "null", "cpd"):
        twice(
            f"cert_{test_type}",
            lambda p, tt=test_type: write_certificate_csv(
                p, run_sweep(tt, 0, 20, p=997, seed=0).certificates, 997
            ),
        )
        twice(
            f"cert_sym_{test_type}",
            lambda p, tt=test_type: write_certificate_csv(
                p, run_sweep(tt, 0, 15, p=997, symmetric=True, seed=0).certificates, 997
            ),
        )

    def overbound_rows(symmetric):
        rows = []
        for shape in band_shapes(0, 15 if symmetric else 20, symmetric):
            for spec in overbound_cases(shape):
                rows.append(case_row(shape, spec, 0))
        rows.sort(key=lambda r: (r.m, r.n, r.s, r.R))
        return rows

    twice("overbound", lambda p: write_numerical_csv(p, overbound_rows(False)))
    twice("overbound_sym", lambda p: write_numerical_csv(p, overbound_rows(True)))

    def recovery_rows(path):
        rows = [
            case_row(shape, spec, seed)
            for seed, (shape, spec) in enumerate(sample_inbound_cases(50, 0, False))
        ]
        write_numerical_csv(path, rows)

    twice("recovery", recovery_rows)

    def proof_dets(path):
        with open(path, "w") as fh:
            fh.write("m,n,s,R,det\n")
            for m, n, s, big_r in proof_grid():
                rep = check_structure(
                    ProblemShape(m, n), PlantSpec(s, big_r), p=997, seed=0, max_trials=5
                )
                fh.write(f"{m},{n},{s},{big_r},{rep.det}\n")

    twice("proof_dets", proof_dets)

    def tensor_csvs(path):
        with open(path, "wb") as out:
            for label, _, _, decomp in tensor_runs(0):
                part = path.parent / f"{label}.part.csv"
                factors_to_csv(part, decomp)
                out.write(part.read_bytes())

    twice("tensor_factors", tensor_csvs)

    elapsed = time.perf_counter() - t0
    ok = not mismatched
    report(10, "determinism", ok, elapsed, 600.0,
           f"mismatched artifacts: {mismatched}" if mismatched else "all byte-identical")
    assert not mismatched, mismatched
