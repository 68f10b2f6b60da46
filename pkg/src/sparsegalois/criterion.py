"""Verdicts on whether the monodromy group is the expected wreath product."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from itertools import combinations
from math import factorial, gcd, lcm
from typing import Sequence

from .errors import Condition1Unverifiable, DimensionUnsupported, Reducible
from .lattice import (
    AbelianPresentation, IntMatrix, Sublattice, cokernel_witness, det, generates_with,
    smallest_prime_factor, surjects_onto, unimodular_inverse,
)
from .polytope import MAX_FAN_DIM, SupportSet, dot, lattice_mixed_volume
from .tuples import (
    EssentialData, SupportTuple, essential_vectors, is_normalized, max_on, normalize,
    reducible_subset, reduction,
)

CLASS_B_MAX_DEGREE = 12


@dataclass(frozen=True)
class GroupDescriptor:
    invariants: tuple  # abelian invariants of the necklace group
    m: int
    d: int
    total_roots: int

    @property
    def order(self) -> int:
        return self.m ** self.d * factorial(self.d)


@dataclass(frozen=True)
class ExpectedWreath:
    group: GroupDescriptor
    condition: str
    kind: str = field(default="ExpectedWreath", init=False)


@dataclass(frozen=True)
class StrictlySmaller:
    group: GroupDescriptor
    b: tuple
    p: int
    per_vector: bool  # False when only the per-tuple sums are divisible by p
    kind: str = field(default="StrictlySmaller", init=False)


@dataclass(frozen=True)
class Inconclusive:
    group: GroupDescriptor
    lower: Sublattice  # generated by the E0 vectors and L
    upper: Sublattice  # generated by the per-tuple sums and L
    note: str = ""
    kind: str = field(default="Inconclusive", init=False)


def _prepare(t: SupportTuple) -> SupportTuple:
    return t if is_normalized(t) else normalize(t)


def expected_group(t: SupportTuple) -> GroupDescriptor:
    t = _prepare(t)
    red = reduction(t)
    total = lattice_mixed_volume(*t.sets)
    if total % red.index:
        raise AssertionError(f"mixed volume {total} not divisible by the index {red.index}")
    return GroupDescriptor(red.invariants, red.index, total // red.index, total)


def univariate_group(a_set: SupportSet | Sequence[int]) -> GroupDescriptor:
    pts = sorted(p[0] if isinstance(p, tuple) else int(p) for p in
                 (a_set.points if isinstance(a_set, SupportSet) else a_set))
    pts = [p - pts[0] for p in pts]
    if len(pts) < 2:
        raise ValueError("need at least two exponents")
    m = reduce(gcd, pts, 0)
    return GroupDescriptor((m,) if m != 1 else (), m, pts[-1] // m, pts[-1])


# ---------------------------------------------------------------- sufficient conditions


def _simplex_condition(a: SupportTuple) -> bool:
    """Some common unimodular map puts every set, after its own shift, in the
    nonnegative orthant while containing 0, e_1, ..., e_n."""
    n = a.dim
    first = a.sets[0].points
    for p0 in first:
        for rest in combinations([p for p in first if p != p0], n):
            cols = [tuple(x - y for x, y in zip(p, p0)) for p in rest]
            bmat = IntMatrix.from_columns(cols, n)
            if abs(det(bmat)) != 1:
                continue
            binv = unimodular_inverse(bmat)
            if all(_in_corner(s.points, binv, n) for s in a.sets):
                return True
    return False


def _in_corner(points, m: IntMatrix, n: int) -> bool:
    img = [m.apply(p) for p in points]
    low = [min(q[k] for q in img) for k in range(n)]
    img = {tuple(x - y for x, y in zip(q, low)) for q in img}
    unit = [tuple(int(i == k) for i in range(n)) for k in range(n)]
    return (0,) * n in img and all(e in img for e in unit)


def _tuple_sums(data: EssentialData) -> list[tuple]:
    sums = []
    for tid in range(len(data.tuples)):
        recs = data.group(tid)
        n = len(recs[0].gamma)
        sums.append(tuple(sum(r.d * r.gamma[k] for r in recs) for k in range(n)))
    return sums


def _witness(vectors: list[tuple], l: Sublattice):
    n = l.ambient_rank
    w = cokernel_witness(IntMatrix.from_columns(vectors + l.vectors(), n))
    if w is None:
        return None
    b, s = w
    p = 2 if s == 0 else smallest_prime_factor(s)
    return b, p


# ---------------------------------------------------------------- class (b) test


def _homogeneous_vectors(a: SupportTuple, data: EssentialData, d: int) -> list[tuple]:
    """Winding vectors of the loops around each essential resultant, one per
    choice of an equation j and a point a_pt outside the face, flattened to Z^(n d)."""
    n = a.dim
    out = []
    for tid in range(len(data.tuples)):
        recs = data.group(tid)
        for j, s in enumerate(a.sets):
            for a_pt in s.points:
                hs = [max_on(s.points, r.gamma) - dot(r.gamma, a_pt) for r in recs]
                if not any(hs):
                    continue
                live = [(r, h) for r, h in zip(recs, hs) if h > 0]
                M = reduce(lcm, (h for _, h in live), 1)
                entries = []
                for r, h in live:
                    entries += [tuple(M // h * x for x in r.gamma)] * (r.d * h)
                if len(entries) > d:
                    continue
                entries += [(0,) * n] * (d - len(entries))
                out.append(tuple(x for e in entries for x in e))
    return out


def _permute(v: tuple, perm: Sequence[int], n: int) -> tuple:
    blocks = [v[k * n:(k + 1) * n] for k in range(len(perm))]
    return tuple(x for k in range(len(perm)) for x in blocks[perm[k]])


def symmetric_closure_generates(vectors: list[tuple], n: int, d: int, l: Sublattice) -> bool:
    """Does the S_d-orbit of ``vectors`` together with L^d generate Z^(n d)?"""
    ln = [tuple(x for k in range(d) for x in (v if k == j else (0,) * n))
          for v in l.vectors() for j in range(d)]
    gens = [(1, 0) + tuple(range(2, d)), tuple(list(range(1, d)) + [0])] if d > 1 else []
    lat = Sublattice.from_vectors(vectors + ln, n * d) if vectors + ln else Sublattice.zero(n * d)
    while True:
        basis = lat.basis()
        extra = [w for v in basis for g in gens for w in [_permute(v, g, n)] if not lat.contains(w)]
        if not extra:
            break
        lat = Sublattice.from_vectors(basis + extra, n * d)
    return generates_with([], lat)


def homogeneous_generation(h_rank: int, d: int, gens: Sequence[tuple], L: Sublattice) -> bool:
    """Generation of H^d / L^d by the S_d-orbit of homogeneous vectors.

    ``gens`` holds (gamma, support_size, has_zero_entry) triples.
    """
    if not gens:
        return generates_with([], L)
    sums = [tuple(size * x for x in g) for g, size, _ in gens]
    if not generates_with(sums, L):
        return False
    with_zero = {tuple(g) for g, size, z in gens if z and size > 0}
    for g, size, _ in gens:
        if size > 0 and any(g) and tuple(g) not in with_zero:
            raise Condition1Unverifiable(f"no generator with value {tuple(g)} and a zero entry")
    return True


def _homogeneous_spec(v: tuple, n: int, d: int):
    blocks = [v[k * n:(k + 1) * n] for k in range(d)]
    nonzero = {b for b in blocks if any(b)}
    if len(nonzero) != 1:
        return None
    g = nonzero.pop()
    size = sum(1 for b in blocks if any(b))
    return g, size, size < d


def class_b_test(a: SupportTuple, data: EssentialData, d: int, l: Sublattice) -> bool:
    n = a.dim
    vectors = _homogeneous_vectors(a, data, d)
    specs = [_homogeneous_spec(v, n, d) for v in vectors]
    if all(s is not None for s in specs):
        try:
            return homogeneous_generation(n, d, specs, l)
        except Condition1Unverifiable:
            pass
    return symmetric_closure_generates(vectors, n, d, l)


# ---------------------------------------------------------------- verdict


def criterion(t: SupportTuple):
    t = _prepare(t)
    if t.dim > MAX_FAN_DIM:
        raise DimensionUnsupported(f"the criterion is supported up to dimension {MAX_FAN_DIM}")
    red = reduction(t)
    a = red.reduced
    bad = reducible_subset(a)
    if bad is not None:
        raise Reducible(bad)
    group = expected_group(t)
    l = red.dual_image
    data = essential_vectors(a)
    e0 = [tuple(r.d * x for x in r.gamma) for r in data.in_E0()]
    if generates_with(e0, l):
        return ExpectedWreath(group, "i")
    if _simplex_condition(a):
        return ExpectedWreath(group, "ii")
    individual = [tuple(r.d * x for x in r.gamma) for r in data.records]
    sums = _tuple_sums(data)
    w = _witness(individual, l)
    if w is not None:
        return StrictlySmaller(group, w[0], w[1], True)
    w = _witness(sums, l)
    if w is not None:
        return StrictlySmaller(group, w[0], w[1], False)
    lower = Sublattice.from_vectors(e0 + l.vectors(), a.dim)
    upper = Sublattice.from_vectors(sums + l.vectors(), a.dim)
    if group.d > CLASS_B_MAX_DEGREE:
        return Inconclusive(group, lower, upper, f"class-(b) test skipped: d = {group.d} > {CLASS_B_MAX_DEGREE}")
    if class_b_test(a, data, group.d, l):
        return ExpectedWreath(group, "iv")
    return Inconclusive(group, lower, upper, "class-(b) vectors do not generate")


def witness_holds(t: SupportTuple, verdict: StrictlySmaller) -> bool:
    """Independent re-check of a StrictlySmaller witness on the reduced tuple."""
    red = reduction(_prepare(t))
    data = essential_vectors(red.reduced)
    p, b = verdict.p, verdict.b
    if any(dot(row, b) % p for row in red.L.to_rows()):
        return False
    vecs = [tuple(r.d * x for x in r.gamma) for r in data.records] if verdict.per_vector else _tuple_sums(data)
    return all(dot(v, b) % p == 0 for v in vecs)


def inductive_connectivity(image_of_cover: IntMatrix, image_of_subset: IntMatrix,
                           ambient: AbelianPresentation) -> bool:
    return surjects_onto(image_of_cover.hstack(image_of_subset), ambient)
