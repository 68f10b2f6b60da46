"""Permutation groups via a deterministic Schreier-Sims algorithm.

Permutations are tuples p with p[x] the image of x; (p * q)[x] = p[q[x]].
"""
from __future__ import annotations

from math import gcd, prod
from typing import Iterable, Sequence


def identity(n: int) -> tuple:
    return tuple(range(n))


def compose(p: Sequence[int], q: Sequence[int]) -> tuple:
    """Apply q first, then p."""
    return tuple(p[x] for x in q)


def inverse(p: Sequence[int]) -> tuple:
    out = [0] * len(p)
    for i, x in enumerate(p):
        out[x] = i
    return tuple(out)


def power(p: Sequence[int], k: int) -> tuple:
    out = identity(len(p))
    for _ in range(k):
        out = compose(p, out)
    return out


def cycles(p: Sequence[int]) -> list[tuple]:
    seen, out = set(), []
    for i in range(len(p)):
        if i in seen:
            continue
        c, j = [], i
        while j not in seen:
            seen.add(j)
            c.append(j)
            j = p[j]
        out.append(tuple(c))
    return out


def order(p: Sequence[int]) -> int:
    k = 1
    for c in cycles(p):
        k = k * len(c) // gcd(k, len(c))
    return k


def is_even(p: Sequence[int]) -> bool:
    return sum(len(c) - 1 for c in cycles(p)) % 2 == 0


class PermutationGroup:
    """Group on {0..degree-1} with a base and strong generating set, kept up to
    date as generators are added."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = ()):
        self.degree = degree
        self.generators: list[tuple] = []
        self.base: list[int] = []
        self.strong: list[tuple] = []
        self._transversals: list[dict] = []
        for g in generators:
            self.add(g)

    # -- internal helpers

    def _level_gens(self, i: int) -> list[tuple]:
        fixed = self.base[:i]
        return [g for g in self.strong if all(g[b] == b for b in fixed)]

    def _orbit(self, i: int) -> dict:
        b = self.base[i]
        gens = self._level_gens(i)
        trans = {b: identity(self.degree)}
        frontier = [b]
        while frontier:
            nxt = []
            for beta in frontier:
                u = trans[beta]
                for g in gens:
                    gamma = g[beta]
                    if gamma not in trans:
                        trans[gamma] = compose(g, u)
                        nxt.append(gamma)
            frontier = nxt
        return trans

    def _strip(self, g: tuple):
        for j, b in enumerate(self.base):
            beta = g[b]
            trans = self._transversals[j]
            if beta not in trans:
                return g, j
            g = compose(inverse(trans[beta]), g)
        return g, len(self.base)

    def _new_base_point(self, g: tuple) -> int:
        return next(x for x in range(self.degree) if g[x] != x)

    def _rebuild(self, start: int):
        for i in range(start, len(self.base)):
            if i < len(self._transversals):
                self._transversals[i] = self._orbit(i)
            else:
                self._transversals.append(self._orbit(i))

    # -- public API

    def add(self, g: Sequence[int]) -> bool:
        """Add a generator; returns True when the group grew."""
        g = tuple(g)
        if len(g) != self.degree or sorted(g) != list(range(self.degree)):
            raise ValueError("not a permutation of the right degree")
        if self.contains(g):
            self.generators.append(g)
            return False
        self.generators.append(g)
        if all(g[b] == b for b in self.base):
            self.base.append(self._new_base_point(g))
        self.strong.append(g)
        self._rebuild(0)
        self._schreier_sims()
        return True

    def _schreier_sims(self):
        i = len(self.base) - 1
        while i >= 0:
            restart = False
            trans = self._transversals[i]
            for beta, u in list(trans.items()):
                for x in self._level_gens(i):
                    ux = trans[x[beta]]
                    h = compose(inverse(ux), compose(x, u))
                    if h == identity(self.degree):
                        continue
                    h2, j = self._strip(h)
                    if j < len(self.base) or h2 != identity(self.degree):
                        if j == len(self.base):
                            self.base.append(self._new_base_point(h2))
                        self.strong.append(h2)
                        self._rebuild(i + 1)
                        i = j
                        restart = True
                        break
                if restart:
                    break
            if restart:
                continue
            i -= 1

    def contains(self, g: Sequence[int]) -> bool:
        if not self.base:
            return tuple(g) == identity(self.degree)
        h, j = self._strip(tuple(g))
        return j == len(self.base) and h == identity(self.degree)

    @property
    def basic_orbit_lengths(self) -> list[int]:
        return [len(t) for t in self._transversals]

    def order(self) -> int:
        return prod(self.basic_orbit_lengths)


def group_order(g: PermutationGroup) -> int:
    return g.order()
