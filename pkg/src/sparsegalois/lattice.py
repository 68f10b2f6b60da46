"""Exact integer linear algebra: Smith normal form and sublattice bookkeeping.

All entries are Python ints, so there is no overflow anywhere.  Matrices are
small (a few dozen rows at most), which keeps the plain list-of-lists
elimination below fast enough.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from math import gcd
from typing import Iterable, Sequence


class _Infinite:
    """Index of a sublattice of deficient rank."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ValueError(f"{self.rows}x{self.cols} matrix needs "
                             f"{self.rows * self.cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], ncols: int | None = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        if any(len(r) != ncols for r in rows):
            raise ValueError("ragged rows")
        return cls(len(rows), ncols, tuple(x for r in rows for x in r))

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], nrows: int) -> "IntMatrix":
        cols = [tuple(int(x) for x in c) for c in cols]
        if any(len(c) != nrows for c in cols):
            raise ValueError("column length does not match row count")
        return cls(nrows, len(cols), tuple(cols[j][i] for i in range(nrows) for j in range(len(cols))))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> tuple:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def to_rows(self) -> list[list[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def columns(self) -> list[tuple]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.column(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        ocols = other.columns()
        return IntMatrix.from_rows(
            [[sum(a * b for a, b in zip(self.row(i), c)) for c in ocols] for i in range(self.rows)],
            other.cols)

    def apply(self, v: Sequence[int]) -> tuple:
        return tuple(sum(a * b for a, b in zip(self.row(i), v)) for i in range(self.rows))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row counts differ")
        return IntMatrix.from_columns(self.columns() + other.columns(), self.rows)

    def is_diagonal(self) -> bool:
        return all(self[i, j] == 0 for i in range(self.rows) for j in range(self.cols) if i != j)

    def diagonal(self) -> tuple:
        return tuple(self[i, i] for i in range(min(self.rows, self.cols)))


def det(m: IntMatrix) -> int:
    """Fraction-free (Bareiss) determinant."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    a = m.to_rows()
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


@dataclass(frozen=True)
class SmithDecomposition:
    """``U @ A @ V == S`` with U, V unimodular and S diagonal with s1 | s2 | ..."""

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix

    @property
    def invariants(self) -> tuple:
        return self.S.diagonal()

    @property
    def rank(self) -> int:
        return sum(1 for s in self.invariants if s != 0)


def smith_normal_form(m: IntMatrix) -> SmithDecomposition:
    rows, cols = m.rows, m.cols
    a = m.to_rows()
    u = IntMatrix.identity(rows).to_rows()
    # V is accumulated transposed so that column operations become row operations.
    vt = IntMatrix.identity(cols).to_rows()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        vt[i], vt[j] = vt[j], vt[i]

    def add_row(src, dst, q):
        # row[dst] -= q * row[src]
        if q:
            a[dst] = [x - q * y for x, y in zip(a[dst], a[src])]
            u[dst] = [x - q * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, q):
        if q:
            for r in a:
                r[dst] -= q * r[src]
            vt[dst] = [x - q * y for x, y in zip(vt[dst], vt[src])]

    for t in range(min(rows, cols)):
        while True:
            pivot = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if a[i][j] != 0 and (pivot is None or abs(a[i][j]) < abs(a[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                break
            swap_rows(t, pivot[0])
            swap_cols(t, pivot[1])
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                add_row(t, i, a[i][t] // p)
                clean &= a[i][t] == 0
            for j in range(t + 1, cols):
                add_col(t, j, a[t][j] // p)
                clean &= a[t][j] == 0
            if not clean:
                continue
            bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                        if a[i][j] % p), None)
            if bad is None:
                break
            # Pull the offending row into row t; the next pass finds a smaller pivot.
            add_row(bad[0], t, -1)
        if pivot is None:
            break
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]

    vmat = IntMatrix.from_rows(vt, cols).transpose() if cols else IntMatrix(0, 0, ())
    return SmithDecomposition(IntMatrix.from_rows(u, rows) if rows else IntMatrix(0, 0, ()),
                              IntMatrix.from_rows(a, cols) if rows else IntMatrix(0, cols, ()),
                              vmat)


def unimodular_inverse(m: IntMatrix) -> IntMatrix:
    """Inverse of a unimodular matrix, computed exactly."""
    n = m.rows
    snf = smith_normal_form(m)
    if snf.invariants != (1,) * n:
        raise ValueError("matrix is not unimodular")
    # U m V = I  =>  m^-1 = V U
    return snf.V @ snf.U


def invariant_factors(m: IntMatrix) -> tuple:
    return smith_normal_form(m).invariants


@dataclass(frozen=True)
class Sublattice:
    """Sublattice of Z^r spanned by the columns of ``generators``."""

    ambient_rank: int
    generators: IntMatrix
    invariants: tuple = field(default=None, compare=False)

    def __post_init__(self):
        if self.generators.rows != self.ambient_rank:
            raise ValueError("generators must have ambient_rank rows")
        if self.invariants is None:
            object.__setattr__(self, "invariants", invariant_factors(self.generators))

    @classmethod
    def from_vectors(cls, vectors: Iterable[Sequence[int]], ambient_rank: int) -> "Sublattice":
        return cls(ambient_rank, IntMatrix.from_columns(list(vectors), ambient_rank))

    @classmethod
    def full(cls, r: int) -> "Sublattice":
        return cls(r, IntMatrix.identity(r))

    @classmethod
    def zero(cls, r: int) -> "Sublattice":
        return cls(r, IntMatrix(r, 0, ()))

    @property
    def rank(self) -> int:
        return sum(1 for s in self.invariants if s != 0)

    def vectors(self) -> list[tuple]:
        return self.generators.columns()

    def basis(self) -> list[tuple]:
        """A Z-basis of the lattice (rank many vectors), deterministic."""
        snf = smith_normal_form(self.generators)
        uinv = unimodular_inverse(snf.U)
        return [tuple(s * x for x in uinv.column(k)) for k, s in enumerate(snf.invariants) if s]

    def contains(self, v: Sequence[int]) -> bool:
        snf = smith_normal_form(self.generators)
        w = snf.U.apply(v)
        for k, x in enumerate(w):
            s = snf.invariants[k] if k < len(snf.invariants) else 0
            if (s == 0 and x != 0) or (s != 0 and x % s):
                return False
        return True


def sublattice_index(s: Sublattice):
    """Index of ``s`` in Z^r, or INFINITE when ``s`` has deficient rank."""
    if s.rank < s.ambient_rank:
        return INFINITE
    return reduce(lambda x, y: x * y, (k for k in s.invariants if k), 1)


def saturation_index(s: Sublattice) -> int:
    """Index of ``s`` inside its saturation (1 for the zero lattice)."""
    return reduce(lambda x, y: x * y, (k for k in s.invariants if k), 1)


def saturation(s: Sublattice) -> Sublattice:
    snf = smith_normal_form(s.generators)
    uinv = unimodular_inverse(snf.U) if s.ambient_rank else snf.U
    cols = [uinv.column(k) for k in range(snf.rank)]
    return Sublattice.from_vectors(cols, s.ambient_rank)


def generates_with(vectors: Sequence[Sequence[int]], l: Sublattice) -> bool:
    r = l.ambient_rank
    if any(len(v) != r for v in vectors):
        raise ValueError("vector length does not match the ambient rank")
    stacked = IntMatrix.from_columns([tuple(v) for v in vectors] + l.vectors(), r)
    inv = invariant_factors(stacked)
    return len(inv) == r and all(s == 1 for s in inv)


@dataclass(frozen=True)
class AbelianPresentation:
    """The group Z^k / (column span of ``relations``)."""

    generator_count: int
    relations: IntMatrix

    def __post_init__(self):
        if self.relations.rows != self.generator_count:
            raise ValueError("relation matrix must have generator_count rows")

    @classmethod
    def free(cls, k: int) -> "AbelianPresentation":
        return cls(k, IntMatrix(k, 0, ()))

    @classmethod
    def from_relations(cls, relations: Sequence[Sequence[int]], k: int) -> "AbelianPresentation":
        return cls(k, IntMatrix.from_columns(list(relations), k))

    def invariants(self) -> tuple:
        """Abelian invariants: nontrivial invariant factors, 0 for each free summand."""
        inv = list(invariant_factors(self.relations))
        inv += [0] * (self.generator_count - len(inv))
        return tuple(s for s in inv if s != 1)

    def order(self):
        inv = self.invariants()
        if any(s == 0 for s in inv):
            return INFINITE
        return reduce(lambda x, y: x * y, inv, 1)


def surjects_onto(sub_generators: IntMatrix, ambient: AbelianPresentation) -> bool:
    if sub_generators.rows != ambient.generator_count:
        raise ValueError("generator matrix rows must match the presentation")
    k = ambient.generator_count
    if k == 0:
        return True
    inv = invariant_factors(sub_generators.hstack(ambient.relations))
    return len(inv) == k and all(s == 1 for s in inv)


def cokernel_witness(m: IntMatrix):
    """For a column set not generating Z^r, return (b, s) with s > 1 and
    s | b.v for every column v.  Returns None when the columns generate.

    s is the first invariant factor different from 1 (0 for a rank gap).
    """
    snf = smith_normal_form(m)
    inv = list(snf.invariants) + [0] * (m.rows - len(snf.invariants))
    for k, s in enumerate(inv):
        if s != 1:
            return tuple(snf.U.row(k)), s
    return None


def primitive(v: Sequence[int]) -> tuple:
    g = reduce(gcd, (abs(x) for x in v), 0)
    return tuple(v) if g in (0, 1) else tuple(x // g for x in v)


def smallest_prime_factor(s: int) -> int:
    s = abs(s)
    if s < 2:
        raise ValueError("no prime factor")
    p = 2
    while p * p <= s:
        if s % p == 0:
            return p
        p += 1
    return s


def kernel_basis(covector: Sequence[int]) -> list[tuple]:
    """Basis of {x in Z^n : covector . x = 0} (saturated, rank n-1 for nonzero input)."""
    n = len(covector)
    snf = smith_normal_form(IntMatrix.from_rows([covector], n))
    r = snf.rank
    return [snf.V.column(j) for j in range(r, n)]


def complement_basis(basis: Sequence[Sequence[int]], n: int) -> IntMatrix:
    """Unimodular n x n matrix whose first columns are ``basis``.

    ``basis`` must span a saturated sublattice.
    """
    k = len(basis)
    if k == 0:
        return IntMatrix.identity(n)
    m = IntMatrix.from_columns(list(basis), n)
    snf = smith_normal_form(m)
    if snf.invariants != (1,) * k:
        raise ValueError("basis does not span a saturated sublattice")
    uinv = unimodular_inverse(snf.U)
    # U m V = [I;0]  =>  m = U^-1 [V^-1; 0] ; replace the first k columns of U^-1 by m
    cols = list(basis) + [uinv.column(j) for j in range(k, n)]
    return IntMatrix.from_columns(cols, n)


def solve_in_basis(basis: IntMatrix, v: Sequence[int]) -> tuple:
    """Integer coordinates c with basis @ c == v; raises if v is not in the span."""
    snf = smith_normal_form(basis)
    w = snf.U.apply(v)
    inv = snf.invariants
    y = []
    for k in range(basis.cols):
        s = inv[k] if k < len(inv) else 0
        x = w[k] if k < len(w) else 0
        if s == 0:
            if x != 0:
                raise ValueError("vector not in the lattice")
            y.append(0)
        else:
            if x % s:
                raise ValueError("vector not in the lattice")
            y.append(x // s)
    if any(w[k] for k in range(len(inv), basis.rows)):
        raise ValueError("vector not in the lattice")
    return snf.V.apply(y)
