"""Combinatorics of support tuples: reduction, predicates and essential vectors."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import combinations
from math import gcd, prod
from typing import Iterable, Sequence

from .errors import DimensionUnsupported, NotAnalogous, NotEssential, RankDeficient
from .lattice import (
    IntMatrix, Sublattice, complement_basis, generates_with, kernel_basis, saturation,
    saturation_index, smith_normal_form, solve_in_basis, unimodular_inverse,
)
from .polytope import (
    MAX_FAN_DIM, MAX_HULL_DIM, SupportSet, convex_hull, dot, lattice_mixed_volume,
    minkowski_hull, refined_cone_representatives, support_face,
)


@dataclass(frozen=True)
class SupportTuple:
    dim: int
    sets: tuple

    def __post_init__(self):
        sets = tuple(s if isinstance(s, SupportSet) else SupportSet.of(s, self.dim) for s in self.sets)
        if len(sets) != self.dim:
            raise ValueError(f"a tuple in dimension {self.dim} needs {self.dim} sets, got {len(sets)}")
        if any(s.dim != self.dim for s in sets):
            raise ValueError("set dimension does not match the tuple")
        object.__setattr__(self, "sets", sets)

    @classmethod
    def of(cls, sets: Iterable, dim: int | None = None) -> "SupportTuple":
        sets = [s if isinstance(s, SupportSet) else SupportSet.of(s) for s in sets]
        return cls(dim if dim is not None else len(sets), tuple(sets))

    def __iter__(self):
        return iter(self.sets)

    def __len__(self):
        return self.dim

    def __getitem__(self, i):
        return self.sets[i]

    def transform(self, m: IntMatrix) -> "SupportTuple":
        return SupportTuple(self.dim, tuple(s.transform(m) for s in self.sets))

    def to_lists(self) -> list:
        return [[list(p) for p in s.points] for s in self.sets]


def normalize(t: SupportTuple) -> SupportTuple:
    """Shift every set so that its lexicographically smallest point is 0."""
    return SupportTuple(t.dim, tuple(s.translate(tuple(-x for x in s.points[0])) for s in t.sets))


def is_normalized(t: SupportTuple) -> bool:
    zero = (0,) * t.dim
    return all(zero in s.points for s in t.sets)


def _differences(points: Sequence[tuple]) -> list[tuple]:
    p0 = points[0]
    return [tuple(a - b for a, b in zip(p, p0)) for p in points[1:]]


def _span(sets: Iterable[Sequence[tuple]], n: int) -> Sublattice:
    """Lattice of all in-set differences, i.e. where the sets can be jointly shifted to."""
    vecs = [d for s in sets for d in _differences(list(s)) if any(d)]
    return Sublattice.from_vectors(vecs, n) if vecs else Sublattice.zero(n)


# ---------------------------------------------------------------- reduction


@dataclass(frozen=True)
class ReductionData:
    """Reduced tuple ``reduced`` with original = L @ reduced point."""

    original: SupportTuple
    lattice: Sublattice
    L: IntMatrix
    L_dual: IntMatrix
    index: int
    invariants: tuple
    reduced: SupportTuple

    @property
    def dual_image(self) -> Sublattice:
        """im(L*) inside N*, generated by the rows of L."""
        return Sublattice.from_vectors(self.L.to_rows(), self.L.rows)


def reduction(t: SupportTuple) -> ReductionData:
    n = t.dim
    if not is_normalized(t):
        raise ValueError("tuple must be normalized")
    pts = [p for s in t.sets for p in s.points if any(p)]
    if not pts:
        raise RankDeficient("all supports are {0}")
    lam = Sublattice.from_vectors(pts, n)
    if lam.rank < n:
        raise RankDeficient(f"supports span a lattice of rank {lam.rank} < {n}")
    snf = smith_normal_form(lam.generators)
    s = snf.invariants[:n]
    m = prod(s)
    if m == 1:
        L = IntMatrix.identity(n)
    else:
        uinv = unimodular_inverse(snf.U)
        cols = [tuple(s[k] * x for x in uinv.column(k)) for k in range(n)]
        # sign convention: first nonzero entry of each basis vector is positive
        cols = [c if next(x for x in c if x) > 0 else tuple(-x for x in c) for c in cols]
        L = IntMatrix.from_columns(cols, n)
    lmat = [[Fraction(x) for x in row] for row in L.to_rows()]
    inv = _rational_inverse(lmat)

    def pull(q):
        v = [sum(inv[i][j] * q[j] for j in range(n)) for i in range(n)]
        if any(x.denominator != 1 for x in v):
            raise AssertionError("point outside the generated lattice")
        return tuple(int(x) for x in v)

    reduced = SupportTuple(n, tuple(SupportSet(n, tuple(pull(q) for q in st.points)) for st in t.sets))
    return ReductionData(t, lam, L, L.transpose(), m, tuple(x for x in s if x != 1), reduced)


def _rational_inverse(a: list[list[Fraction]]) -> list[list[Fraction]]:
    n = len(a)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(a)]
    for c in range(n):
        piv = next(i for i in range(c, n) if aug[i][c] != 0)
        aug[c], aug[piv] = aug[piv], aug[c]
        p = aug[c][c]
        aug[c] = [x / p for x in aug[c]]
        for i in range(n):
            if i != c and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[c])]
    return [row[n:] for row in aug]


# ---------------------------------------------------------------- predicates


def is_reduced(t: SupportTuple) -> bool:
    lam = _span(t.sets, t.dim)
    return lam.rank == t.dim and all(x == 1 for x in lam.invariants[:t.dim])


def reducible_subset(t: SupportTuple):
    """Smallest K (|K| < n) whose sets shift into a rank <= |K| lattice, else None."""
    n = t.dim
    for k in range(1, n):
        for subset in combinations(range(n), k):
            if _span([t.sets[i].points for i in subset], n).rank <= k:
                return subset
    return None


def is_irreducible(t: SupportTuple) -> bool:
    return reducible_subset(t) is None


def _cone_directions(t: SupportTuple) -> list[tuple]:
    if t.dim > MAX_FAN_DIM:
        raise DimensionUnsupported(f"fan computations are supported up to dimension {MAX_FAN_DIM}")
    hulls = [convex_hull(s) for s in t.sets]
    return [(0,) * t.dim] + list(refined_cone_representatives(hulls))


def _same_direction_space(faces: Sequence[SupportSet], n: int) -> bool:
    spans = [_span([f.points], n) for f in faces]
    joint = _span([f.points for f in faces], n)
    return all(s.rank == joint.rank for s in spans)


def is_analogous(t: SupportTuple) -> bool:
    for g in _cone_directions(t):
        if not _same_direction_space([support_face(s, g) for s in t.sets], t.dim):
            return False
    return True


# ---------------------------------------------------------------- essential vectors


@dataclass(frozen=True)
class EssentialRecord:
    gamma: tuple
    K: tuple
    L: Sublattice
    d_prime: int
    d_second: int
    d: int
    tuple_id: int
    in_E0: bool
    faces: tuple

    @property
    def essential_tuple(self) -> tuple:
        return tuple(self.faces[i].points if i in self.K else None for i in range(len(self.faces)))


def _faces(t: SupportTuple, gamma: Sequence[int]) -> tuple:
    return tuple(support_face(s, gamma) for s in t.sets)


def _is_essential_faces(faces: Sequence[SupportSet], n: int) -> bool:
    for k in range(2, n + 1):
        for subset in combinations(range(n), k):
            if _span([faces[i].points for i in subset], n).rank <= k - 2:
                return False
    return True


def _minimal_K(faces: Sequence[SupportSet], n: int) -> tuple:
    found = []
    for k in range(1, n + 1):
        for subset in combinations(range(n), k):
            if any(set(f) <= set(subset) for f in found):
                continue
            if _span([faces[i].points for i in subset], n).rank <= k - 1:
                found.append(subset)
        if found:
            break
    if len(found) != 1:
        raise AssertionError(f"no unique minimal dependent subset: {found}")
    return found[0]


def _quotient_mixed_volume(faces: Sequence[SupportSet], K: tuple, lbar: Sublattice,
                           gamma: Sequence[int], n: int) -> int:
    """Mixed volume of the faces outside K, projected to (ker gamma) / lbar."""
    rest = [i for i in range(n) if i not in K]
    if not rest:
        return 1
    ker = kernel_basis(gamma)
    kmat = IntMatrix.from_columns(ker, n)
    sub_basis = [solve_in_basis(kmat, v) for v in lbar.basis()]
    frame = unimodular_inverse(complement_basis(sub_basis, n - 1))
    skip = len(sub_basis)
    images = []
    for i in rest:
        pts = faces[i].points
        coords = []
        for d in [(0,) * n] + _differences(list(pts)):
            c = frame.apply(solve_in_basis(kmat, d))
            coords.append(c[skip:])
        images.append(SupportSet(n - 1 - skip, tuple(coords)))
    if n - 1 - skip != len(rest):
        raise AssertionError("quotient rank does not match the number of remaining sets")
    return lattice_mixed_volume(*images)


def resultant_multiplicity(t: SupportTuple, gamma: Sequence[int]) -> tuple:
    """(d', d'', d) of an essential covector."""
    n = t.dim
    faces = _faces(t, gamma)
    if not _is_essential_faces(faces, n):
        raise NotEssential(f"{tuple(gamma)} is not essential")
    K = _minimal_K(faces, n)
    lg = _span([faces[i].points for i in K], n)
    d1 = saturation_index(lg)
    d2 = _quotient_mixed_volume(faces, K, saturation(lg), gamma, n)
    return d1, d2, d1 * d2


@dataclass(frozen=True)
class EssentialData:
    records: tuple
    tuples: tuple  # distinct essential tuples, indexed by EssentialRecord.tuple_id

    def group(self, tuple_id: int) -> list:
        return [r for r in self.records if r.tuple_id == tuple_id]

    @property
    def gammas(self) -> list:
        return [r.gamma for r in self.records]

    def in_E0(self) -> list:
        return [r for r in self.records if r.in_E0]


def essential_vectors(t: SupportTuple) -> EssentialData:
    n = t.dim
    if n > MAX_HULL_DIM:
        raise DimensionUnsupported(f"essential vectors are supported up to dimension {MAX_HULL_DIM}")
    total = minkowski_hull(list(t.sets))
    if not total.is_full:
        return EssentialData((), ())
    candidates = sorted({c for c, _ in total.facets})
    ids: dict = {}
    pending = []
    for g in candidates:
        faces = _faces(t, g)
        if not _is_essential_faces(faces, n):
            continue
        K = _minimal_K(faces, n)
        lg = _span([faces[i].points for i in K], n)
        d1 = saturation_index(lg)
        d2 = _quotient_mixed_volume(faces, K, saturation(lg), g, n)
        key = tuple(faces[i].points if i in K else None for i in range(n))
        tid = ids.setdefault(key, len(ids))
        e0 = len(K) == n and all(_span([f.points], n).rank == n - 1 for f in faces)
        pending.append(EssentialRecord(g, K, lg, d1, d2, d1 * d2, tid, e0, faces))
    keys = sorted(ids, key=ids.get)
    return EssentialData(tuple(pending), tuple(keys))


def analogous_multiplicities(t: SupportTuple) -> dict:
    """gamma -> d_gamma for an analogous tuple: covectors whose common face
    direction is a hyperplane, with the index of the jointly shifted lattice."""
    if not is_analogous(t):
        raise NotAnalogous("tuple is not analogous")
    n = t.dim
    out = {}
    for g in sorted({c for c, _ in minkowski_hull(list(t.sets)).facets}):
        faces = _faces(t, g)
        lg = _span([f.points for f in faces], n)
        if lg.rank == n - 1:
            out[g] = saturation_index(lg)
    return out


def is_ample(t: SupportTuple) -> bool:
    """Ample test for an analogous normalized tuple."""
    if not is_analogous(t):
        raise NotAnalogous("ample is defined for analogous tuples only")
    red = reduction(t)
    mults = analogous_multiplicities(red.reduced)
    data = essential_vectors(red.reduced)
    for r in data.records:
        if r.K == tuple(range(t.dim)) and r.gamma in mults and mults[r.gamma] != r.d:
            raise AssertionError(f"multiplicities disagree at {r.gamma}: {mults[r.gamma]} vs {r.d}")
    vectors = [tuple(d * x for x in g) for g, d in mults.items()]
    return generates_with(vectors, red.dual_image)


def max_on(points: Iterable[Sequence[int]], gamma: Sequence[int]) -> int:
    return max(dot(gamma, p) for p in points)


def facet_heights(t: SupportTuple, gamma: Sequence[int]) -> list[int]:
    """Lattice distances max gamma|A_i - gamma(a) over all i and a not on the face."""
    out = []
    for s in t.sets:
        top = max_on(s.points, gamma)
        out.extend(top - dot(gamma, p) for p in s.points if dot(gamma, p) != top)
    return out


def height_gcd(t: SupportTuple, gamma: Sequence[int]) -> int:
    return reduce(gcd, facet_heights(t, gamma), 0)
