"""Closed loops in coefficient space and their execution on a set of roots."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import SignatureMismatch, TrackingFailure
from ..lattice import kernel_basis
from ..polytope import dot
from ..tuples import SupportTuple
from ..numerics.system import SparseSystem, random_system
from ..numerics.track import Family, TrackOptions, circle, reverse, scaled_part, segment, track_batch
from .perm import identity

TRINOMIAL_EPS = 1e-3
FACET_EPS = 1e-2
FACET_T0 = 1e-5


@dataclass
class Loop:
    """A closed path given as consecutive families starting and ending at the base."""

    kind: str
    params: dict
    pieces: list = field(default_factory=list)


@dataclass
class LoopResult:
    loop: Loop
    permutation: tuple
    displacement: np.ndarray  # (roots, n) imaginary increments over 2 pi
    steps: int
    max_residual: float

    def identity_winding(self):
        """Integer winding matrix when the permutation is trivial, else None."""
        if self.permutation != identity(len(self.permutation)):
            return None
        return _as_integer(self.displacement)


def _as_integer(m: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    r = np.rint(m)
    if np.max(np.abs(m - r), initial=0.0) > tol:
        raise TrackingFailure("closed loop produced a non-integral winding")
    return r.astype(int)


def _coeffs(sys: SparseSystem) -> list:
    return [np.array(c) for c in sys.coefficients]


def random_loop(base: SparseSystem, rng: np.random.Generator) -> Loop:
    """Triangle base -> r1 -> r2 -> base through random systems."""
    r1 = _coeffs(random_system(base.tuple, rng))
    r2 = _coeffs(random_system(base.tuple, rng))
    b = _coeffs(base)
    ex = base.exponents
    return Loop("random", {}, [segment(ex, b, r1), segment(ex, r1, r2), segment(ex, r2, b)])


def degenerate_loop(base: SparseSystem) -> Loop:
    b = _coeffs(base)
    return Loop("random", {"degenerate": True}, [segment(base.exponents, b, b)])


def _conjugate(base: SparseSystem, path: list[Family], core: list[Family]) -> list[Family]:
    return path + core + [reverse(f) for f in reversed(path)]


def trinomial_family(a_set, j: int, turns: int, eps: float = TRINOMIAL_EPS):
    """eps * exp(2 pi i turns s) + x^{a_j} + x^a on a normalized univariate support."""
    pts = [p[0] for p in a_set.points]
    if pts[0] != 0:
        raise ValueError("support must be normalized")
    aj = pts[j]
    if aj == 0:
        raise ValueError("a_j must be a nonzero exponent")
    center = np.zeros(len(pts), dtype=complex)
    center[pts.index(aj)] += 1.0
    center[-1] += 1.0
    ex = (np.array(pts, dtype=float).reshape(-1, 1),)
    return circle(ex, [center], 0, 0, eps, turns, 1)


def trinomial_loop(base: SparseSystem, j: int, turns: int, rng: np.random.Generator | None = None,
                   eps: float = TRINOMIAL_EPS) -> Loop:
    """Trinomial circle conjugated by a path base -> random waypoint -> trinomial start."""
    fam = trinomial_family(base.tuple.sets[0], j, turns, eps)
    start = fam.coeffs(0.0)
    b = _coeffs(base)
    ex = base.exponents
    path = []
    if rng is not None:
        w = _coeffs(random_system(base.tuple, rng))
        path = [segment(ex, b, w), segment(ex, w, start)]
    else:
        path = [segment(ex, b, start)]
    return Loop("trinomial", {"j": j, "a_j": base.tuple.sets[0].points[j][0], "turns": turns, "eps": eps},
                _conjugate(base, path, [fam]))


def facet_central_system(t: SupportTuple, gamma, j: int, a, rng: np.random.Generator):
    """Coefficients g (on the faces, with a common root on the face subtorus),
    the generic perturbation g~, and the index of the circled coefficient."""
    n = t.dim
    if n != 2:
        raise ValueError("facet loops are implemented for n = 2")
    gamma = tuple(gamma)
    v = kernel_basis(gamma)[0]
    u0 = np.exp(2j * np.pi * rng.random())
    g, gt = [], []
    for s in t.sets:
        top = max(dot(gamma, p) for p in s.points)
        face = [k for k, p in enumerate(s.points) if dot(gamma, p) == top]
        b0 = s.points[face[0]]
        c = np.zeros(len(s.points), dtype=complex)
        c[face] = (rng.normal(size=len(face)) + 1j * rng.normal(size=len(face))) / np.sqrt(2)
        # exponent of u = x^v for each face point
        ks = {}
        for k in face:
            diff = tuple(x - y for x, y in zip(s.points[k], b0))
            ks[k] = dot(diff, v) // dot(v, v) if any(diff) else 0
        c[face[0]] = -sum(c[k] * u0 ** ks[k] for k in face[1:])
        g.append(c)
        gt.append((rng.normal(size=len(s.points)) + 1j * rng.normal(size=len(s.points))) / np.sqrt(2))
    a = tuple(a)
    ka = t.sets[j].points.index(a)
    if dot(gamma, a) == max(dot(gamma, p) for p in t.sets[j].points):
        raise ValueError("the point a must lie off the face")
    g[j][ka] += 1.0
    top0 = max(dot(gamma, p) for p in t.sets[0].points)
    circled = next(k for k, p in enumerate(t.sets[0].points) if dot(gamma, p) == top0)
    return g, gt, circled


def facet_resultant_loop(base: SparseSystem, gamma, j: int, a, rng: np.random.Generator,
                         turns: int | None = None, eps: float = FACET_EPS, t0: float = FACET_T0) -> Loop:
    """Small circle around the resultant of the face tuple selected by gamma.

    The circled face coefficient runs clockwise, so the travelling roots
    carry the class gamma.
    """
    t = base.tuple
    h = max(dot(gamma, p) for p in t.sets[j].points) - dot(gamma, a)
    turns = h if turns is None else turns
    g, gt, idx = facet_central_system(t, gamma, j, a, rng)
    ex = base.exponents
    top = [c.copy() for c in g]
    top[0][idx] += eps
    start_t1 = [x + y for x, y in zip(top, gt)]
    b = _coeffs(base)
    path = [segment(ex, b, start_t1), scaled_part(ex, top, gt, 1.0, t0)]
    center = [x + t0 * y for x, y in zip(g, gt)]
    core = [circle(ex, center, 0, idx, eps, turns, -1)]
    return Loop("facet", {"gamma": tuple(gamma), "j": j, "a": tuple(a), "h": h, "turns": turns,
                          "eps": eps, "t0": t0}, _conjugate(base, path, core))


# ---------------------------------------------------------------- execution


def _wrap(x: np.ndarray) -> np.ndarray:
    return (x + np.pi) % (2 * np.pi) - np.pi


def match_roots(z_end: np.ndarray, z_base: np.ndarray, tol: float = 1e-4) -> tuple:
    """Permutation sending root i to the base root its path ends at.

    Requires a clear gap: nearest distance below tol, second nearest above 10 tol.
    """
    r = z_base.shape[0]
    perm = []
    for i in range(r):
        diff = z_end[i][None, :] - z_base
        dist = np.max(np.abs(diff.real) + np.abs(_wrap(diff.imag)), axis=1)
        order = np.argsort(dist)
        if dist[order[0]] > tol or (r > 1 and dist[order[1]] < 10 * tol):
            raise TrackingFailure("ambiguous endpoint matching")
        perm.append(int(order[0]))
    if sorted(perm) != list(range(r)):
        raise TrackingFailure("endpoints do not form a permutation")
    return tuple(perm)


def run_loop(loop: Loop, z_base: np.ndarray, opts: TrackOptions | None = None,
             match_tol: float = 1e-4) -> LoopResult:
    z = np.array(z_base, dtype=complex)
    steps, worst = 0, 0.0
    for fam in loop.pieces:
        res = track_batch(fam, z, opts)
        z = res.z_end
        steps += res.steps
        worst = max(worst, res.max_residual)
    perm = match_roots(z, z_base, match_tol)
    disp = (z - z_base).imag / (2 * np.pi)
    # exact integer part: compare with the matched base root
    offset = (z - z_base[list(perm)]).imag / (2 * np.pi)
    disp = disp - (offset - np.rint(offset))
    return LoopResult(loop, perm, disp, steps, worst)


def expected_facet_signature(result: LoopResult, gamma, count: int) -> bool:
    w = result.identity_winding()
    if w is None:
        return False
    rows = [tuple(r) for r in w]
    zero = (0,) * len(gamma)
    hits = sum(1 for r in rows if r == tuple(gamma))
    return hits == count and all(r in (zero, tuple(gamma)) for r in rows)


def check_facet_signature(result: LoopResult, gamma, count: int):
    if not expected_facet_signature(result, gamma, count):
        raise SignatureMismatch(f"facet loop for {tuple(gamma)}: permutation {result.permutation}, "
                                f"winding {result.displacement.round(3).tolist()}")
