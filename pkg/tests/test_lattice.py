import random

import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors as sympy_invariants

from sparsegalois.lattice import (
    INFINITE, AbelianPresentation, IntMatrix, Sublattice, det, generates_with, saturation,
    saturation_index, smith_normal_form, sublattice_index, surjects_onto, unimodular_inverse,
    cokernel_witness, kernel_basis, complement_basis, solve_in_basis,
)


def random_matrix(rng, rows, cols, lo=-20, hi=20):
    return IntMatrix.from_rows([[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)], cols)


def random_unimodular(rng, n, steps=12):
    m = IntMatrix.identity(n).to_rows()
    for _ in range(steps):
        i, j = rng.sample(range(n), 2) if n > 1 else (0, 0)
        if i == j:
            m[i] = [-x for x in m[i]]
            continue
        q = rng.randint(-3, 3)
        m[i] = [x + q * y for x, y in zip(m[i], m[j])]
    return IntMatrix.from_rows(m, n)


def check_decomposition(a, snf):
    assert snf.U @ a @ snf.V == snf.S
    assert snf.S.is_diagonal()
    assert abs(det(snf.U)) == 1 and abs(det(snf.V)) == 1
    inv = snf.invariants
    assert all(s >= 0 for s in inv)
    for x, y in zip(inv, inv[1:]):
        assert (y % x == 0) if x else y == 0


@pytest.mark.parametrize("rows, expected", [
    ([[2, 0], [0, 3]], (1, 6)),
    ([[0]], (0,)),
    ([[4, 4], [0, 4]], (4, 4)),
])
def test_snf_examples(rows, expected):
    a = IntMatrix.from_rows(rows)
    snf = smith_normal_form(a)
    check_decomposition(a, snf)
    assert snf.invariants == expected


def test_snf_empty():
    for shape in [(0, 0), (0, 3), (3, 0)]:
        a = IntMatrix.zeros(*shape)
        snf = smith_normal_form(a)
        assert snf.S.rows == shape[0] and snf.S.cols == shape[1]
        assert snf.invariants == ()


def test_snf_round_trip_200_random():
    rng = random.Random(20240611)
    for _ in range(200):
        a = random_matrix(rng, rng.randint(1, 6), rng.randint(1, 6))
        snf = smith_normal_form(a)
        check_decomposition(a, snf)
        oracle = [int(x) for x in sympy_invariants(Matrix(a.to_rows()), domain=ZZ)]
        nonzero = [s for s in snf.invariants if s]
        assert nonzero == [abs(s) for s in oracle if s]


def test_snf_deterministic():
    a = IntMatrix.from_rows([[6, 4, 2], [3, 9, 12]])
    assert smith_normal_form(a) == smith_normal_form(a)


def test_snf_large_entries_no_overflow():
    a = IntMatrix.from_rows([[2 ** 80, 3 ** 60], [5 ** 40, 7 ** 30]])
    check_decomposition(a, smith_normal_form(a))


@pytest.mark.parametrize("vectors, expected", [
    ([(2, 0), (0, 2)], 4),
    ([(1, 1), (1, -1)], 2),
    ([(1, 0)], INFINITE),
])
def test_sublattice_index(vectors, expected):
    assert sublattice_index(Sublattice.from_vectors(vectors, 2)) is expected or \
        sublattice_index(Sublattice.from_vectors(vectors, 2)) == expected


def test_saturation_index_zero_lattice():
    assert saturation_index(Sublattice.zero(0)) == 1
    assert saturation_index(Sublattice.zero(2)) == 1
    assert saturation_index(Sublattice.from_vectors([(2, 0)], 2)) == 2


def test_index_invariant_under_unimodular_change_of_generators():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randint(1, 4)
        g = random_matrix(rng, n, n + rng.randint(0, 2), -6, 6)
        u = random_unimodular(rng, g.cols)
        assert sublattice_index(Sublattice(n, g)) == sublattice_index(Sublattice(n, g @ u))


@pytest.mark.parametrize("vectors, expected", [
    ([(2, 0)], [(1, 0)]),
    ([(2, 2)], [(1, 1)]),
    ([(2, 0), (0, 2)], [(1, 0), (0, 1)]),
])
def test_saturation_examples(vectors, expected):
    sat = saturation(Sublattice.from_vectors(vectors, 2))
    assert sat.rank == len(expected)
    for v in expected:
        assert sat.contains(v)
    for v in sat.basis():
        assert Sublattice.from_vectors(expected, 2).contains(v)


def test_saturation_properties():
    rng = random.Random(11)
    for _ in range(60):
        n = rng.randint(1, 4)
        s = Sublattice(n, random_matrix(rng, n, rng.randint(0, 3), -8, 8))
        sat = saturation(s)
        assert sat.rank == s.rank
        assert all(sat.contains(v) for v in s.vectors())
        assert saturation(sat).invariants == sat.invariants
        assert all(k in (0, 1) for k in sat.invariants)
        assert isinstance(saturation_index(s), int)


@pytest.mark.parametrize("vectors, lattice, expected", [
    ([(1, 1), (1, -1)], [(1, 1), (2, 0)], False),
    ([(1, 0), (0, 1)], [], True),
    ([], [(1, 0), (0, 1)], True),
])
def test_generates_with(vectors, lattice, expected):
    assert generates_with(vectors, Sublattice.from_vectors(lattice, 2)) is expected


def test_generates_with_absorbs_lattice_generators():
    rng = random.Random(3)
    for _ in range(50):
        vs = [tuple(rng.randint(-4, 4) for _ in range(2)) for _ in range(rng.randint(0, 2))]
        l = Sublattice(2, random_matrix(rng, 2, 2, -4, 4))
        assert generates_with(vs, l) == generates_with(vs + l.vectors(), l)


def test_surjects_onto_examples():
    z = AbelianPresentation.free(1)
    z3 = AbelianPresentation.from_relations([(3,)], 1)
    assert surjects_onto(IntMatrix.identity(2), AbelianPresentation.free(2))
    assert surjects_onto(IntMatrix.identity(1), z3)
    assert not surjects_onto(IntMatrix.from_rows([[2]]), z)
    assert surjects_onto(IntMatrix.from_rows([[2]]), z3)


def test_presentation_invariants():
    p = AbelianPresentation.from_relations([(2, 0), (0, 4)], 2)
    assert p.invariants() == (2, 4)
    assert p.order() == 8
    assert AbelianPresentation.free(1).order() is INFINITE


@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3), min_size=1, max_size=4))
@settings(max_examples=100, deadline=None)
def test_unimodular_inverse_and_witness(rows):
    a = IntMatrix.from_rows(rows, 3).transpose()
    snf = smith_normal_form(a)
    assert unimodular_inverse(snf.U) @ snf.U == IntMatrix.identity(3)
    w = cokernel_witness(a)
    if w is None:
        assert generates_with(a.columns(), Sublattice.zero(3))
    else:
        b, s = w
        assert s != 1
        for col in a.columns():
            dot = sum(x * y for x, y in zip(b, col))
            assert (dot == 0) if s == 0 else dot % s == 0


def test_kernel_and_complement():
    for gamma in [(0, -1), (1, 1), (2, 3, 5), (0, 0, 1)]:
        ker = kernel_basis(gamma)
        assert len(ker) == len(gamma) - 1
        assert all(sum(a * b for a, b in zip(gamma, v)) == 0 for v in ker)
        m = complement_basis(ker, len(gamma))
        assert abs(det(m)) == 1
        assert m.columns()[:len(ker)] == ker


def test_solve_in_basis():
    basis = IntMatrix.from_columns([(1, 1), (1, -1)], 2)
    assert solve_in_basis(basis, (2, 0)) == (1, 1)
    with pytest.raises(ValueError):
        solve_in_basis(basis, (1, 0))
