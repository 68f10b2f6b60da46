"""Consistency checks on a finished monodromy run."""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from math import gcd

import numpy as np

from ..errors import BlockStructureViolated, DivisibilityViolated
from ..polytope import dot
from ..tuples import ReductionData, essential_vectors, normalize
from .perm import is_even

BLOCK_TOL = 1e-6


def _close(u: np.ndarray, v: np.ndarray, tol: float = BLOCK_TOL) -> bool:
    """Equality of torus points given in log coordinates."""
    return bool(np.all(np.abs(np.exp(u - v) - 1.0) < tol))


def necklace_blocks(z: np.ndarray, red: ReductionData, tol: float = BLOCK_TOL) -> list[tuple]:
    """Fibers of x -> (x^{L e_k})_k over the roots of the reduced system."""
    lt = np.array(red.L.transpose().to_rows(), dtype=float)
    w = z @ lt.T
    blocks: list[list[int]] = []
    for i in range(z.shape[0]):
        for b in blocks:
            if _close(w[i], w[b[0]], tol):
                b.append(i)
                break
        else:
            blocks.append([i])
    return [tuple(b) for b in blocks]


@dataclass
class WreathReport:
    blocks: list
    block_sizes: list
    contained: bool
    index: int | None
    block_images: list  # per generator, block permutation
    all_even: bool


def verify_wreath_structure(run, red: ReductionData | None = None, tol: float = BLOCK_TOL) -> WreathReport:
    red = red or run.reduction
    z = run.z_base
    blocks = necklace_blocks(z, red, tol)
    where = {i: k for k, b in enumerate(blocks) for i in b}
    images = []
    for g in run.group.generators:
        img = []
        for k, b in enumerate(blocks):
            targets = {where[g[i]] for i in b}
            if len(targets) != 1:
                raise BlockStructureViolated(f"generator splits block {k}")
            img.append(targets.pop())
            shift = z[g[b[0]]] - z[b[0]]
            for i in b[1:]:
                if not _close(z[g[i]] - z[i], shift, tol):
                    raise BlockStructureViolated(f"generator is not a translation on block {k}")
        if sorted(img) != list(range(len(blocks))):
            raise BlockStructureViolated("generator does not permute the blocks")
        images.append(tuple(img))
    order = run.group.order()
    full = run.expected.order
    sizes = [len(b) for b in blocks]
    contained = len(set(sizes)) <= 1 and full % order == 0
    return WreathReport(blocks, sizes, contained, full // order if full % order == 0 else None,
                        images, all(is_even(g) for g in run.group.generators))


@dataclass
class PoissonReport:
    b: tuple
    modulus: int
    checked: int
    totals: list


def poisson_modulus(t, b) -> int:
    data = essential_vectors(normalize(t))
    return reduce(gcd, (r.d * dot(r.gamma, b) for r in data.records), 0)


def poisson_divisibility_check(run, b) -> PoissonReport:
    """Total b-winding of every identity-permutation loop is divisible by the modulus."""
    b = tuple(int(x) for x in b)
    g = poisson_modulus(run.tuple, b)
    totals = []
    for w in run.identity_windings():
        total = int(sum(dot(tuple(row), b) for row in w))
        totals.append(total)
        if g and total % g:
            raise DivisibilityViolated(f"total winding {total} not divisible by {g} for b = {b}")
        if g == 0 and total:
            raise DivisibilityViolated(f"total winding {total} should vanish for b = {b}")
    return PoissonReport(b, g, len(totals), totals)
