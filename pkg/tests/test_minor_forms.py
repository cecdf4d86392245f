"""Minor forms and the constraint matrix against a polarization oracle.

The oracle never repeats the implementation's formula: the entry for a
generator pair is recovered from evaluations of the actual 2x2 minor,
via the polarization identity B(u, w) = (Q(u + w) - Q(u) - Q(w)) / 2.
"""

import math

import numpy as np

from plantedrank1 import PlantSpec, ProblemShape, num_cols, num_rows
from plantedrank1.field_arith import modular_inverse
from plantedrank1.minor_forms import (
    MinorIndex,
    build_constraint_matrix,
    constraint_entries,
    constraint_entry,
    minor_form_matrix,
    minor_indices,
    pair_indices,
    symmetric_basis,
    symmetric_form_matrix,
)
from plantedrank1.subspaces import generate_modular, generate_real, sym_vec


def minor_value(v, idx):
    """The 2x2 minor of v on rows {a, c}, columns {b, d} (1-based)."""
    a, b, c, d = idx
    return v[a - 1, b - 1] * v[c - 1, d - 1] - v[a - 1, d - 1] * v[c - 1, b - 1]


def oracle_entry(vi, vj, idx):
    return (minor_value(vi + vj, idx) - minor_value(vi, idx) - minor_value(vj, idx)) / 2


def oracle_entry_mod(vi, vj, idx, p):
    raw = int(minor_value(vi + vj, idx) - minor_value(vi, idx) - minor_value(vj, idx))
    return (raw * modular_inverse(2, p)) % p


def test_minor_index_order_3x3():
    got = minor_indices(3, 3)
    assert got == [
        MinorIndex(1, 1, 2, 2),
        MinorIndex(1, 1, 2, 3),
        MinorIndex(1, 2, 2, 3),
        MinorIndex(1, 1, 3, 2),
        MinorIndex(1, 1, 3, 3),
        MinorIndex(1, 2, 3, 3),
        MinorIndex(2, 1, 3, 2),
        MinorIndex(2, 1, 3, 3),
        MinorIndex(2, 2, 3, 3),
    ]


def test_minor_index_count():
    for m in range(2, 7):
        for n in range(2, 7):
            assert len(minor_indices(m, n)) == math.comb(m, 2) * math.comb(n, 2)


def test_pair_indices_examples():
    assert pair_indices(1, 2) == [(1, 2), (2, 2)]
    assert pair_indices(0, 3) == [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3), (3, 3)]
    assert pair_indices(4, 4) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    for big_r in range(1, 9):
        for s in range(big_r + 1):
            assert len(pair_indices(s, big_r)) == num_cols(PlantSpec(s, big_r))


def test_constraint_entry_against_polarization_oracle():
    rng = np.random.default_rng(11)
    for _ in range(200):
        m = int(rng.integers(2, 7))
        n = int(rng.integers(2, 7))
        vi = rng.standard_normal((m, n))
        vj = rng.standard_normal((m, n))
        rows = minor_indices(m, n)
        idx = rows[int(rng.integers(len(rows)))]
        got = constraint_entry(vi, vj, idx)
        assert abs(got - oracle_entry(vi, vj, idx)) <= 1e-12


def test_constraint_entry_diagonal_pair_is_the_minor():
    rng = np.random.default_rng(12)
    v = rng.standard_normal((4, 5))
    for idx in minor_indices(4, 5)[::7]:
        assert abs(constraint_entry(v, v, idx) - minor_value(v, idx)) <= 1e-12


def test_constraint_entry_modular_against_oracle():
    rng = np.random.default_rng(13)
    for p in (5, 997):
        for _ in range(60):
            m = int(rng.integers(2, 6))
            n = int(rng.integers(2, 6))
            vi = rng.integers(0, p, size=(m, n))
            vj = rng.integers(0, p, size=(m, n))
            rows = minor_indices(m, n)
            idx = rows[int(rng.integers(len(rows)))]
            assert constraint_entry(vi, vj, idx, p=p) == oracle_entry_mod(vi, vj, idx, p)


def test_constraint_entries_vectorized_matches_scalar():
    rng = np.random.default_rng(14)
    mats = rng.standard_normal((4, 3, 4))
    rows = minor_indices(3, 4)
    cols = pair_indices(2, 4)
    ent = constraint_entries(mats, rows, cols)
    assert ent.shape == (len(rows), len(cols))
    for ri in range(0, len(rows), 3):
        for ci in range(len(cols)):
            i, j = cols[ci]
            want = constraint_entry(mats[i - 1], mats[j - 1], rows[ri])
            assert abs(ent[ri, ci] - want) <= 1e-12


def test_constraint_entries_modular_matches_scalar():
    rng = np.random.default_rng(15)
    p = 997
    mats = rng.integers(0, p, size=(3, 3, 3))
    rows = minor_indices(3, 3)
    cols = pair_indices(0, 3)
    ent = constraint_entries(mats, rows, cols, p=p)
    assert ent.dtype == np.int64
    for ri in range(len(rows)):
        for ci, (i, j) in enumerate(cols):
            assert ent[ri, ci] == constraint_entry(mats[i - 1], mats[j - 1], rows[ri], p=p)


def test_minor_form_matrix_reproduces_entry():
    rng = np.random.default_rng(16)
    m, n = 3, 4
    for idx in minor_indices(m, n)[::5]:
        e = minor_form_matrix(idx, m, n)
        assert np.allclose(e, e.T)
        u = rng.standard_normal((m, n))
        w = rng.standard_normal((m, n))
        got = u.reshape(-1) @ e @ w.reshape(-1)
        assert abs(got - constraint_entry(u, w, idx)) <= 1e-12


def test_symmetric_form_matrix_reproduces_entry():
    rng = np.random.default_rng(17)
    m = 4
    for idx in minor_indices(m, m)[::7]:
        t = symmetric_form_matrix(idx, m)
        assert np.allclose(t, t.T)
        u = rng.standard_normal((m, m))
        u = u + u.T
        w = rng.standard_normal((m, m))
        w = w + w.T
        got = sym_vec(u) @ t @ sym_vec(w)
        assert abs(got - constraint_entry(u, w, idx)) <= 1e-12


def test_build_constraint_matrix_shapes():
    shape = ProblemShape(3, 4)
    spec = PlantSpec(2, 4)
    sub = generate_real(shape, spec, seed=0)
    planted = build_constraint_matrix(sub, columns="planted")
    assert planted.entries.shape == (num_rows(shape), num_cols(spec))
    assert planted.rows == tuple(minor_indices(3, 4))
    assert planted.cols == tuple(pair_indices(2, 4))
    full = build_constraint_matrix(sub, columns="all")
    assert full.entries.shape == (num_rows(shape), num_cols(PlantSpec(0, 4)))


def test_build_constraint_matrix_planted_columns_modular():
    # planted pairs (i, i), i <= s are excluded; a planted generator pair
    # (i, j), i < j <= s still yields rows because vi (x) vj is not rank-1
    shape = ProblemShape(3, 3)
    spec = PlantSpec(2, 4)
    sub = generate_modular(shape, spec, p=997, seed=0)
    mat = build_constraint_matrix(sub)
    assert mat.p == 997
    assert (1, 1) not in mat.cols and (2, 2) not in mat.cols
    assert (3, 3) in mat.cols and (4, 4) in mat.cols


def test_kernel_contains_planted_squares():
    # the all-pairs matrix annihilates the coefficient vector of a planted
    # square (i, i), i <= s: that column must be exactly zero for rank-1 vi
    shape = ProblemShape(3, 4)
    sub = generate_real(shape, PlantSpec(2, 4), seed=5)
    full = build_constraint_matrix(sub, columns="all")
    for pos, (i, j) in enumerate(full.cols):
        if i == j and i <= 2:
            assert np.max(np.abs(full.entries[:, pos])) <= 1e-12


def test_symmetric_basis_counts():
    for m in range(2, 7):
        forms = symmetric_basis(m)
        assert len(forms) == (m + 1) * m * m * (m - 1) // 12


def test_symmetric_basis_independent_by_float_rank():
    for m in range(2, 7):
        forms = symmetric_basis(m)
        lifts = np.stack([symmetric_form_matrix(idx, m).reshape(-1) for idx in forms])
        assert np.linalg.matrix_rank(lifts) == len(forms)


def test_symmetric_basis_is_ordered_subsequence():
    for m in (3, 4, 5):
        full = minor_indices(m, m)
        pos = [full.index(idx) for idx in symmetric_basis(m)]
        assert pos == sorted(pos)
