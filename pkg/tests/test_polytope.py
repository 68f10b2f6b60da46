import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.spatial import ConvexHull

from sparsegalois.errors import DimensionUnsupported, EmptySupport
from sparsegalois.lattice import IntMatrix
from sparsegalois.polytope import (
    SupportSet, convex_hull, dot, lattice_mixed_volume, minkowski_sum, normalized_volume,
    refined_cone_representatives, relative_normalized_volume, support_face, volume,
)

SIMPLEX2 = SupportSet.of([(0, 0), (1, 0), (0, 1)])
SQUARE = SupportSet.of([(0, 0), (1, 0), (0, 1), (1, 1)])
Q = SupportSet.of([(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)])


def random_set(rng, n, k, lo=0, hi=3):
    return SupportSet.of([tuple(rng.randint(lo, hi) for _ in range(n)) for _ in range(k)], n)


def random_unimodular(rng, n):
    m = IntMatrix.identity(n).to_rows()
    for _ in range(6):
        i, j = rng.sample(range(n), 2)
        q = rng.choice([-1, 1])
        m[i] = [x + q * y for x, y in zip(m[i], m[j])]
    return IntMatrix.from_rows(m, n)


def test_unit_simplex_hull():
    p = convex_hull(SIMPLEX2)
    assert set(p.vertices) == {(0, 0), (1, 0), (0, 1)}
    assert {c for c, b in p.facets} == {(-1, 0), (0, -1), (1, 1)}


def test_q_hull_drops_interior_point():
    p = convex_hull(Q)
    assert set(p.vertices) == {(0, 0), (2, 0), (0, 2), (2, 2)}
    assert {c for c, b in p.facets} == {(1, 0), (-1, 0), (0, 1), (0, -1)}


def test_collinear_hull_is_segment():
    p = convex_hull(SupportSet.of([(0, 0), (1, 1), (2, 2)]))
    assert p.affine_dim == 1
    assert set(p.vertices) == {(0, 0), (2, 2)}


def test_hull_invariants_and_scipy_oracle():
    rng = random.Random(5)
    for _ in range(40):
        n = rng.choice([2, 3])
        s = random_set(rng, n, rng.randint(n + 2, 10))
        p = convex_hull(s)
        for c, b in p.facets:
            assert all(dot(c, v) <= b for v in s.points)
            assert sum(1 for v in p.vertices if dot(c, v) == b) >= n
        if p.is_full:
            oracle = ConvexHull(np.array(s.points, dtype=float))
            assert set(p.vertices) == {s.points[i] for i in oracle.vertices}
            assert float(volume(p)) == pytest.approx(oracle.volume)


def test_hull_4d_cube_and_errors():
    cube = SupportSet.of([tuple((i >> k) & 1 for k in range(4)) for i in range(16)])
    p = convex_hull(cube)
    assert len(p.vertices) == 16 and len(p.facets) == 8
    assert normalized_volume(p) == 24
    with pytest.raises(DimensionUnsupported):
        convex_hull(SupportSet.of([(0,) * 5, (1, 0, 0, 0, 0)]))
    with pytest.raises(EmptySupport):
        SupportSet.of([], 2)


@pytest.mark.parametrize("gamma, expected", [
    ((0, -1), {(0, 0), (2, 0)}),
    ((0, 0), set(Q.points)),
])
def test_support_face_q(gamma, expected):
    assert set(support_face(Q, gamma).points) == expected


def test_support_face_simplex():
    assert set(support_face(SIMPLEX2, (1, 1)).points) == {(1, 0), (0, 1)}


def test_support_face_properties():
    rng = random.Random(9)
    for _ in range(50):
        s = random_set(rng, 2, 6, -3, 3)
        g = (rng.randint(-3, 3), rng.randint(-3, 3))
        f = support_face(s, g)
        assert set(f.points) <= set(s.points)
        assert len({dot(g, p) for p in f.points}) == 1


@pytest.mark.parametrize("a, b, expected", [
    (SIMPLEX2, SIMPLEX2, 1),
    (SQUARE, SQUARE, 2),
    (Q, Q, 8),
])
def test_mixed_volume_examples(a, b, expected):
    assert lattice_mixed_volume(convex_hull(a), convex_hull(b)) == expected


def test_mixed_volume_univariate_and_3d():
    assert lattice_mixed_volume(SupportSet.of([0, 4, 8])) == 8
    s3 = SupportSet.of([(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)])
    assert lattice_mixed_volume(s3, s3, s3) == 1
    cube = SupportSet.of([tuple((i >> k) & 1 for k in range(3)) for i in range(8)])
    assert lattice_mixed_volume(cube, cube, cube) == 6


def shoelace_volume_2d(points):
    hull = ConvexHull(np.array(points, dtype=float))
    return hull.volume


def test_mixed_volume_properties_2d():
    rng = random.Random(17)
    for _ in range(30):
        a, b, c = (random_set(rng, 2, rng.randint(3, 5)) for _ in range(3))
        mv_ab = lattice_mixed_volume(a, b)
        assert mv_ab == lattice_mixed_volume(b, a)
        assert lattice_mixed_volume(minkowski_sum(a, c), b) == mv_ab + lattice_mixed_volume(c, b)
        # MV(P, P) = 2! Vol(P)
        assert lattice_mixed_volume(a, a) == normalized_volume(a)
        if convex_hull(a).is_full:
            assert normalized_volume(a) == pytest.approx(2 * shoelace_volume_2d(a.points))
        m = random_unimodular(rng, 2)
        t1, t2 = (rng.randint(-5, 5), rng.randint(-5, 5)), (rng.randint(-5, 5), rng.randint(-5, 5))
        assert lattice_mixed_volume(a.transform(m).translate(t1), b.transform(m).translate(t2)) == mv_ab


def test_mixed_volume_equals_volume_3d():
    rng = random.Random(23)
    for _ in range(15):
        a = random_set(rng, 3, rng.randint(4, 7))
        assert lattice_mixed_volume(a, a, a) == normalized_volume(a)
        if convex_hull(a).is_full:
            assert Fraction(normalized_volume(a), 6) == volume(convex_hull(a))
            assert float(volume(convex_hull(a))) == pytest.approx(ConvexHull(np.array(a.points, float)).volume)


def test_minkowski_sum_examples():
    zero = SupportSet.of([(0, 0)])
    assert minkowski_sum(zero, Q) == Q
    seg1 = SupportSet.of([(0, 0), (1, 0)])
    seg2 = SupportSet.of([(0, 0), (0, 1)])
    assert minkowski_sum(seg1, seg2) == SQUARE
    qq = minkowski_sum(Q, Q)
    # Enumeration oracle: every even-sum point of [0,4]^2.
    expected = {(x, y) for x in range(5) for y in range(5) if (x + y) % 2 == 0}
    assert set(qq.points) == expected and len(qq) == 13


def test_relative_volume():
    assert relative_normalized_volume([(0, 0), (2, 0)]) == 2
    assert relative_normalized_volume([(0, 0), (2, 2)]) == 2
    assert relative_normalized_volume([(1, 1)]) == 1


def test_refined_cones_two_squares():
    reps = refined_cone_representatives(convex_hull(SQUARE), convex_hull(SQUARE))
    assert set(reps) == {(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)}


def test_refined_cones_univariate():
    assert set(refined_cone_representatives(convex_hull(SupportSet.of([0, 1])))) == {(1,), (-1,)}


def test_refined_cones_square_triangle():
    reps = refined_cone_representatives(convex_hull(SQUARE), convex_hull(SIMPLEX2))
    assert (1, 1) in reps


def test_refined_cones_complete_2d_oracle():
    # Every sampled direction must select the same faces of the summands as some representative.
    rng = random.Random(31)
    for _ in range(20):
        a, b = random_set(rng, 2, 5), random_set(rng, 2, 5)
        reps = refined_cone_representatives(convex_hull(a), convex_hull(b))
        signatures = {(support_face(a, g), support_face(b, g)) for g in reps}
        for _ in range(40):
            g = (rng.randint(-9, 9), rng.randint(-9, 9))
            if g == (0, 0):
                continue
            assert (support_face(a, g), support_face(b, g)) in signatures


def test_refined_cones_lower_dimensional():
    seg = convex_hull(SupportSet.of([(0, 0), (1, 1)]))
    reps = refined_cone_representatives(seg)
    assert len(reps) == 3
    faces = {support_face(SupportSet.of([(0, 0), (1, 1)]), g).points for g in reps}
    assert faces == {((1, 1),), ((0, 0),), ((0, 0), (1, 1))}


def test_refined_cones_dimension_cap():
    cube = SupportSet.of([tuple((i >> k) & 1 for k in range(4)) for i in range(16)])
    with pytest.raises(DimensionUnsupported):
        refined_cone_representatives(convex_hull(cube))
