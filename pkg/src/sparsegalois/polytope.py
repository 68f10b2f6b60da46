"""Exact lattice polytopes in dimension <= 4.

Hulls are computed with the double description method on integer data, so
every facet normal and every volume is exact.  Volumes are lattice-normalized
(the unit simplex has normalized volume 1) and obtained by coning the facets
over the lexicographically smallest vertex.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import factorial, gcd
from typing import Iterable, Sequence

from .errors import DimensionUnsupported, EmptySupport, NonIntegralVolume
from .lattice import (
    IntMatrix, Sublattice, complement_basis, kernel_basis, primitive, saturation,
    solve_in_basis, unimodular_inverse,
)

MAX_HULL_DIM = 4
MAX_FAN_DIM = 3


def dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


@dataclass(frozen=True)
class SupportSet:
    """A finite nonempty set of lattice points, sorted and deduplicated."""

    dim: int
    points: tuple

    def __post_init__(self):
        pts = tuple(sorted({tuple(int(x) for x in p) for p in self.points}))
        if not pts:
            raise EmptySupport("support set is empty")
        if any(len(p) != self.dim for p in pts):
            raise ValueError(f"all points must have {self.dim} coordinates")
        object.__setattr__(self, "points", pts)

    @classmethod
    def of(cls, points: Iterable[Sequence[int]], dim: int | None = None) -> "SupportSet":
        points = [tuple(p) if not isinstance(p, int) else (p,) for p in points]
        if dim is None:
            if not points:
                raise EmptySupport("support set is empty")
            dim = len(points[0])
        return cls(dim, tuple(points))

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def translate(self, shift: Sequence[int]) -> "SupportSet":
        return SupportSet(self.dim, tuple(tuple(a + b for a, b in zip(p, shift)) for p in self.points))

    def transform(self, m: IntMatrix) -> "SupportSet":
        return SupportSet(m.rows, tuple(m.apply(p) for p in self.points))


@dataclass(frozen=True)
class Polytope:
    """Convex hull of lattice points.

    ``facets`` holds pairs (normal, offset) meaning normal . x <= offset, with
    primitive outward normals; it is filled only for full-dimensional hulls.
    """

    dim: int
    vertices: tuple
    facets: tuple
    affine_dim: int
    facet_vertices: tuple = field(default=(), compare=False, repr=False)

    @property
    def is_full(self) -> bool:
        return self.affine_dim == self.dim


# ---------------------------------------------------------------- hulls


def _rank(vectors: Sequence[Sequence[int]], n: int) -> int:
    if not vectors:
        return 0
    return Sublattice.from_vectors(vectors, n).rank


def _affine_frame(points: Sequence[tuple]):
    """Origin, saturated basis of the affine span, and integer coordinates."""
    n = len(points[0])
    origin = points[0]
    diffs = [tuple(a - b for a, b in zip(p, origin)) for p in points[1:]]
    diffs = [d for d in diffs if any(d)]
    sat = saturation(Sublattice.from_vectors(diffs, n)) if diffs else Sublattice.zero(n)
    basis = sat.basis() if diffs else []
    if not basis:
        return origin, [], [() for _ in points]
    bmat = IntMatrix.from_columns(basis, n)
    coords = [solve_in_basis(bmat, tuple(a - b for a, b in zip(p, origin))) for p in points]
    return origin, basis, coords


def _fraction_inverse(rows: list[list[int]]) -> list[list[Fraction]]:
    n = len(rows)
    a = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(rows)]
    for c in range(n):
        piv = next(i for i in range(c, n) if a[i][c] != 0)
        a[c], a[piv] = a[piv], a[c]
        p = a[c][c]
        a[c] = [x / p for x in a[c]]
        for i in range(n):
            if i != c and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return [r[n:] for r in a]


def _primitive_int(v: Sequence[Fraction]) -> tuple:
    den = 1
    for x in v:
        den = den * x.denominator // gcd(den, x.denominator)
    return primitive([int(x * den) for x in v])


def _full_hull(points: list[tuple], k: int):
    """Facets (normal, offset) and vertex indices of a full-dimensional point set in Z^k."""
    if k == 0:
        return [], [0]
    rows = [list(p) + [-1] for p in points]
    # Greedy choice of k+1 affinely independent points.
    chosen: list[int] = []
    for i in range(len(points)):
        if _rank([tuple(rows[j]) for j in chosen + [i]], k + 1) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == k + 1:
                break
    inv = _fraction_inverse([rows[i] for i in chosen])
    # Cone {y : a_q . y <= 0}; the initial rays are minus the inverse columns.
    rays = []
    for j in range(k + 1):
        r = _primitive_int([-inv[i][j] for i in range(k + 1)])
        zero = 0
        for t, i in enumerate(chosen):
            if dot(rows[i], r) == 0:
                zero |= 1 << i
        rays.append((r, zero))
    min_common = k - 1  # a pair of adjacent rays shares >= dim - 2 tight constraints
    for i in range(len(points)):
        if i in chosen:
            continue
        a = rows[i]
        pos, neg, zer = [], [], []
        for r, z in rays:
            s = dot(a, r)
            if s > 0:
                pos.append((r, z, s))
            elif s < 0:
                neg.append((r, z, s))
            else:
                zer.append((r, z | (1 << i)))
        if not pos:
            rays = [(r, z) for r, z, _ in neg] + zer
            continue
        old = [z for _, z, _ in pos] + [z for _, z, _ in neg] + [z for _, z in zer]
        new = []
        for rp, zp, sp in pos:
            for rn, zn, sn in neg:
                common = zp & zn
                if bin(common).count("1") < min_common:
                    continue
                if any((z & common) == common and z != zp and z != zn for z in old):
                    continue
                r = primitive([sp * x - sn * y for x, y in zip(rn, rp)])
                new.append((r, common | (1 << i)))
        rays = [(r, z) for r, z, _ in neg] + zer + new
    facets = []
    for r, _ in rays:
        c, b = r[:k], r[k]
        g = 0
        for x in c:
            g = gcd(g, abs(x))
        if g == 0:
            raise AssertionError("degenerate facet in a full-dimensional hull")
        facets.append((tuple(x // g for x in c), b // g))
    facets = sorted(set(facets))
    verts = []
    for idx, p in enumerate(points):
        tight = [c for c, b in facets if dot(c, p) == b]
        if _rank(tight, k) == k:
            verts.append(idx)
    return facets, verts


def convex_hull(s: SupportSet | Iterable[Sequence[int]]) -> Polytope:
    if not isinstance(s, SupportSet):
        s = SupportSet.of(s)
    n = s.dim
    if n > MAX_HULL_DIM:
        raise DimensionUnsupported(f"convex hulls are supported up to dimension {MAX_HULL_DIM}, got {n}")
    return _hull_cached(s.points, n)


@lru_cache(maxsize=4096)
def _hull_cached(points: tuple, n: int) -> Polytope:
    pts = list(points)
    origin, basis, coords = _affine_frame(pts)
    k = len(basis)
    if k == 0:
        return Polytope(n, (pts[0],), (), 0, ())
    if k < n:
        _, vidx = _full_hull(coords, k)
        return Polytope(n, tuple(sorted(pts[i] for i in vidx)), (), k, ())
    facets_k, vidx = _full_hull(pts, n)
    vertices = tuple(sorted(pts[i] for i in vidx))
    facet_vertices = tuple(frozenset(v for v in vertices if dot(c, v) == b) for c, b in facets_k)
    return Polytope(n, vertices, tuple(facets_k), n, facet_vertices)


def support_face(s: SupportSet, gamma: Sequence[int]) -> SupportSet:
    if len(gamma) != s.dim:
        raise ValueError("covector dimension does not match the support")
    best = max(dot(gamma, p) for p in s.points)
    return SupportSet(s.dim, tuple(p for p in s.points if dot(gamma, p) == best))


def minkowski_sum(a: SupportSet, b: SupportSet) -> SupportSet:
    if a.dim != b.dim:
        raise ValueError("dimension mismatch")
    return SupportSet(a.dim, tuple(tuple(x + y for x, y in zip(p, q)) for p in a.points for q in b.points))


def _as_points(p) -> tuple:
    if isinstance(p, Polytope):
        return p.vertices
    if isinstance(p, SupportSet):
        return p.points
    return tuple(tuple(x) for x in p)


def minkowski_hull(polys: Sequence) -> Polytope:
    """Hull of the Minkowski sum, pruning to vertices after every summand."""
    pts = _as_points(polys[0])
    n = len(pts[0])
    acc = convex_hull(SupportSet(n, pts)).vertices
    for p in polys[1:]:
        q = convex_hull(SupportSet(n, _as_points(p))).vertices
        acc = convex_hull(SupportSet(n, tuple(tuple(x + y for x, y in zip(u, v)) for u in acc for v in q))).vertices
    return convex_hull(SupportSet(n, acc))


# ---------------------------------------------------------------- volumes


@lru_cache(maxsize=8192)
def _nvol_coords(points: tuple, k: int) -> int:
    """Lattice-normalized volume (k! * Euclidean) of a full-dimensional set in Z^k."""
    if k == 0:
        return 1
    if k == 1:
        xs = [p[0] for p in points]
        return max(xs) - min(xs)
    facets, vidx = _full_hull(list(points), k)
    vertices = sorted(points[i] for i in vidx)
    v0 = vertices[0]
    total = 0
    for c, b in facets:
        h = b - dot(c, v0)
        if h == 0:
            continue
        fpts = [v for v in vertices if dot(c, v) == b]
        ker = kernel_basis(c)
        kmat = IntMatrix.from_columns(ker, k)
        f0 = fpts[0]
        sub = tuple(sorted(solve_in_basis(kmat, tuple(a - z for a, z in zip(v, f0))) for v in fpts))
        total += h * _nvol_coords(sub, k - 1)
    return total


def normalized_volume(p: Polytope | SupportSet) -> int:
    """n! times the Euclidean volume; zero for lower-dimensional hulls."""
    if isinstance(p, SupportSet):
        p = convex_hull(p)
    if not p.is_full:
        return 0
    if p.dim > MAX_HULL_DIM:
        raise DimensionUnsupported("volume beyond dimension 4")
    return _nvol_coords(tuple(sorted(p.vertices)), p.dim)


def relative_normalized_volume(points: Sequence[Sequence[int]]) -> int:
    """Normalized volume inside the saturated lattice of the affine span."""
    pts = sorted({tuple(p) for p in points})
    origin, basis, coords = _affine_frame(pts)
    return _nvol_coords(tuple(sorted(coords)), len(basis))


def volume(p: Polytope) -> Fraction:
    return Fraction(normalized_volume(p), factorial(p.dim))


def lattice_mixed_volume(*polys) -> int:
    """Mixed volume normalized so that MV(unit simplex, ..., unit simplex) = 1.

    Accepts Polytope or SupportSet arguments (or a single sequence of them).
    """
    if len(polys) == 1 and isinstance(polys[0], (list, tuple)) and polys[0] and \
            isinstance(polys[0][0], (Polytope, SupportSet)):
        polys = tuple(polys[0])
    n = len(polys)
    if n == 0:
        return 1
    dims = {(p.dim if isinstance(p, (Polytope, SupportSet)) else len(_as_points(p)[0])) for p in polys}
    if dims != {n}:
        raise ValueError(f"need {n} polytopes in dimension {n}")
    if n > MAX_HULL_DIM:
        raise DimensionUnsupported(f"mixed volume is supported up to dimension {MAX_HULL_DIM}")
    verts = [convex_hull(SupportSet(n, _as_points(p))).vertices for p in polys]
    sums: dict = {}
    total = 0
    for size in range(1, n + 1):
        for subset in combinations(range(n), size):
            if size == 1:
                hull = convex_hull(SupportSet(n, verts[subset[0]]))
            else:
                prev = sums[subset[:-1]]
                q = verts[subset[-1]]
                hull = convex_hull(SupportSet(n, tuple(tuple(x + y for x, y in zip(u, v))
                                                       for u in prev.vertices for v in q)))
            sums[subset] = hull
            total += (-1) ** (n - size) * normalized_volume(hull)
    mv = Fraction(total, factorial(n))
    if mv.denominator != 1 or mv < 0:
        raise NonIntegralVolume(f"inclusion-exclusion produced {mv}")
    return int(mv)


# ---------------------------------------------------------------- normal fans


def _face_lattice(facet_vertices: Sequence[frozenset]) -> set:
    """All nonempty faces (as vertex sets) below the top, from facet intersections."""
    faces = set(facet_vertices)
    frontier = set(facet_vertices)
    while frontier:
        nxt = set()
        for f in frontier:
            for g in facet_vertices:
                h = f & g
                if h and h not in faces:
                    nxt.add(h)
        faces |= nxt
        frontier = nxt
    return faces


def normal_cone_representatives(p: Polytope) -> list[tuple]:
    """One primitive covector in the relative interior of every nonzero cone of
    the normal fan of ``p`` (handles lower-dimensional p via its lineality)."""
    n = p.dim
    pts = list(p.vertices)
    origin, basis, coords = _affine_frame(pts)
    k = len(basis)
    reps = set()
    if k == n:
        faces = _face_lattice(p.facet_vertices)
        for face in faces:
            normals = [c for (c, b), fv in zip(p.facets, p.facet_vertices) if face <= fv]
            reps.add(primitive([sum(x) for x in zip(*normals)]))
        return sorted(reps)
    m = complement_basis(basis, n)
    minv_t = unimodular_inverse(m)  # covector lam on (coords, extra) pulls back as lam @ m^-1
    if k > 0:
        sub = _hull_cached(tuple(sorted(set(coords))), k)
        for lam in normal_cone_representatives(sub):
            full = tuple(lam) + (0,) * (n - k)
            reps.add(primitive([dot(full, minv_t.column(j)) for j in range(n)]))
    extra = tuple(0 for _ in range(k)) + (1,) + (0,) * (n - k - 1)
    reps.add(primitive([dot(extra, minv_t.column(j)) for j in range(n)]))
    return sorted(reps)


def refined_cone_representatives(*polys) -> list[tuple]:
    """Representatives of the cones of the common refinement of the normal fans,
    i.e. of the normal fan of the Minkowski sum."""
    if len(polys) == 1 and isinstance(polys[0], (list, tuple)) and polys[0] and \
            isinstance(polys[0][0], (Polytope, SupportSet)):
        polys = tuple(polys[0])
    n = polys[0].dim
    if n > MAX_FAN_DIM:
        raise DimensionUnsupported(f"normal fan enumeration is supported up to dimension {MAX_FAN_DIM}")
    total = minkowski_hull(list(polys))
    return normal_cone_representatives(total)
