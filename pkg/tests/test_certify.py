"""Certificate generation, verification, tampering, and sweep plumbing."""

import dataclasses

import numpy as np
import pytest

from plantedrank1 import (
    PlantSpec,
    ProblemShape,
    band_shapes,
    certify_case,
    overbound_cases,
    run_sweep,
    sweep_cases,
    verify_certificate,
)
from plantedrank1.certify import Certificate, CertifyFailure, DEFAULT_MAX_RESAMPLES
from plantedrank1.errors import PreconditionError, SchemaError


def test_certify_verify_round_trip():
    cases = [
        (ProblemShape(3, 3), PlantSpec(1, 4)),
        (ProblemShape(3, 3), PlantSpec(0, 3)),
        (ProblemShape(3, 4), PlantSpec(2, 5)),
        (ProblemShape(4, 4, symmetric=True), PlantSpec(2, 6)),
    ]
    for shape, spec in cases:
        cert = certify_case(shape, spec, p=997, seed=0)
        assert isinstance(cert, Certificate)
        assert 0 < cert.det_mod_p < 997
        assert verify_certificate(cert)


def test_certificate_pinned_regression():
    # freezes the generator conventions: any drift in the RNG scheme, row
    # order, or elimination pivot rule changes these values
    square = certify_case(ProblemShape(3, 3), PlantSpec(1, 4), p=997, seed=0)
    assert (square.seed, square.det_mod_p, square.rm_rows) == (0, 533, ())
    tall = certify_case(ProblemShape(3, 3), PlantSpec(0, 3), p=997, seed=0)
    assert (tall.seed, tall.det_mod_p, tall.rm_rows) == (0, 367, (6, 7, 8))
    sym = certify_case(ProblemShape(4, 4, symmetric=True), PlantSpec(2, 6), p=997, seed=0)
    assert (sym.seed, sym.det_mod_p, sym.rm_rows) == (0, 502, (19,))


def test_certify_outside_bound_refused():
    with pytest.raises(PreconditionError):
        certify_case(ProblemShape(3, 3), PlantSpec(0, 4))


def test_certify_bad_modulus():
    with pytest.raises(SchemaError):
        certify_case(ProblemShape(3, 3), PlantSpec(0, 3), p=4)
    with pytest.raises(SchemaError):
        certify_case(ProblemShape(3, 3), PlantSpec(0, 3), p=2)


def test_certify_deterministic():
    a = certify_case(ProblemShape(3, 4), PlantSpec(1, 5), p=997, seed=3)
    b = certify_case(ProblemShape(3, 4), PlantSpec(1, 5), p=997, seed=3)
    assert a == b


def test_certify_resamples_past_bad_seed():
    # over F_3 the 1x1 constraint matrix of a (2,2,s=0,R=1) witness is the
    # determinant of one random matrix, which vanishes for some seeds; the
    # search must advance the seed and still come back certified
    shape, spec = ProblemShape(2, 2), PlantSpec(0, 1)
    bad_seed = None
    for seed in range(64):
        cert = certify_case(shape, spec, p=3, seed=seed, max_resamples=1)
        if isinstance(cert, CertifyFailure):
            bad_seed = seed
            break
    assert bad_seed is not None, "no rank-deficient draw in 64 seeds at p=3"
    recovered = certify_case(shape, spec, p=3, seed=bad_seed)
    assert isinstance(recovered, Certificate)
    assert recovered.seed > bad_seed
    assert verify_certificate(recovered)


def test_verify_rejects_tampering():
    cert = certify_case(ProblemShape(3, 3), PlantSpec(1, 4), p=997, seed=0)
    wrong_det = dataclasses.replace(cert, det_mod_p=(cert.det_mod_p + 1) % 997)
    assert verify_certificate(wrong_det) is False
    with pytest.raises(SchemaError):
        verify_certificate(dataclasses.replace(cert, det_mod_p=-5))
    with pytest.raises(SchemaError):
        verify_certificate(dataclasses.replace(cert, rm_rows=(0, 1)))
    with pytest.raises(SchemaError):
        verify_certificate(dataclasses.replace(cert, rm_rows=(999,)))
    with pytest.raises(SchemaError):
        verify_certificate(dataclasses.replace(cert, p=6))
    with pytest.raises(SchemaError):
        verify_certificate(dataclasses.replace(cert, R=9, s=0))
    with pytest.raises(SchemaError):
        verify_certificate(dataclasses.replace(cert, m=1))


def test_verify_wrong_seed_value_mismatch():
    cert = certify_case(ProblemShape(3, 4), PlantSpec(2, 5), p=997, seed=0)
    moved = dataclasses.replace(cert, seed=cert.seed + 1)
    # a different witness almost surely has a different minor determinant;
    # structure is still valid so this is False, not an exception
    assert verify_certificate(moved) is False


def test_band_shapes_general():
    shapes = band_shapes(0, 20, False)
    assert len(shapes) == 25
    assert shapes[0] == ProblemShape(2, 2)
    assert ProblemShape(2, 14) in shapes
    assert ProblemShape(3, 9) in shapes
    assert ProblemShape(5, 5) in shapes
    assert ProblemShape(2, 15) not in shapes
    assert all(s.m <= s.n for s in shapes)


def test_band_shapes_lower_bound_excludes():
    inner = band_shapes(0, 10, False)
    ring = band_shapes(10, 20, False)
    assert not set(inner) & set(ring)
    assert set(inner) | set(ring) == set(band_shapes(0, 20, False))


def test_band_shapes_symmetric():
    shapes = band_shapes(0, 15, True)
    assert [s.m for s in shapes] == [2, 3, 4, 5, 6]
    assert all(s.symmetric for s in shapes)


def test_sweep_cases_boundary_lists():
    shape = ProblemShape(3, 3)
    assert sweep_cases(shape, "all") == [
        PlantSpec(0, 3),
        PlantSpec(1, 4),
        PlantSpec(2, 4),
        PlantSpec(3, 4),
        PlantSpec(4, 4),
    ]
    assert sweep_cases(shape, "null") == [PlantSpec(0, 3)]
    assert sweep_cases(shape, "cpd") == [PlantSpec(4, 4)]
    with pytest.raises(ValueError):
        sweep_cases(shape, "bogus")


def test_sweep_cases_exhaustive_contains_boundary():
    shape = ProblemShape(3, 3)
    full = sweep_cases(shape, "all", exhaustive=True)
    assert set(sweep_cases(shape, "all")) <= set(full)
    for spec in full:
        assert spec.R <= 4
        assert spec.s <= spec.R


def test_overbound_cases_grids():
    assert overbound_cases(ProblemShape(3, 3)) == [PlantSpec(0, 4)]
    assert overbound_cases(ProblemShape(3, 4)) == [
        PlantSpec(0, 6),
        PlantSpec(1, 6),
        PlantSpec(2, 6),
    ]
    for shape in band_shapes(0, 20, False):
        for spec in overbound_cases(shape):
            assert spec.R == PlantSpec(spec.s, spec.R).R
            assert spec.R <= (shape.m - 1) * (shape.n - 1)


def test_run_sweep_small_band():
    report = run_sweep("all", 0, 6, p=997, seed=0)
    assert report.ok
    assert len(report.certificates) > 0
    assert len(report.timings) == len(report.certificates)
    for cert in report.certificates:
        assert verify_certificate(cert)
    ids = [(c.m, c.n, c.s, c.R) for c in report.certificates]
    assert ids == sorted(ids)


def test_run_sweep_jobs_equivalent():
    serial = run_sweep("null", 0, 8, p=997, seed=0, jobs=1)
    parallel = run_sweep("null", 0, 8, p=997, seed=0, jobs=2)
    assert serial.certificates == parallel.certificates
    assert serial.failures == parallel.failures


def test_run_sweep_symmetric():
    report = run_sweep("cpd", 0, 10, p=997, symmetric=True, seed=0)
    assert report.ok
    assert all(c.symmetric for c in report.certificates)
    for cert in report.certificates:
        assert verify_certificate(cert)
