"""Start-system solvers: univariate Aberth iteration and a hidden-variable
resultant for two equations in two unknowns."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np

from ..errors import ConvergenceFailure, CountMismatch, DegenerateLeadingCoefficient, DegenerateResultant
from ..lattice import smith_normal_form, unimodular_inverse
from ..polytope import SupportSet, lattice_mixed_volume
from ..tuples import normalize, reduction
from .system import SparseSystem, log_eval
from .track import refine

DEDUP_TOL = 1e-8


@dataclass(frozen=True)
class Root:
    x: np.ndarray
    residual: float
    condition: float

    @property
    def z(self) -> np.ndarray:
        return np.log(self.x)


def _roots_from_log(sys: SparseSystem, z: np.ndarray, tol: float) -> list[Root]:
    exps = sys.exponents
    z, res = refine(exps, sys.coefficients, z, tol)
    _, jac, scale = log_eval(exps, sys.coefficients, z)
    out = []
    for k in range(z.shape[0]):
        jn = jac[k] / np.maximum(scale[k], 1e-300)[:, None]
        out.append(Root(np.exp(z[k]), float(res[k]), float(np.linalg.cond(jn))))
    return out


# ---------------------------------------------------------------- univariate


def _newton_polygon_radii(coeffs: np.ndarray) -> np.ndarray:
    """Initial moduli from the upper hull of (k, log|c_k|)."""
    deg = len(coeffs) - 1
    logs = np.full(deg + 1, -np.inf)
    nz = np.abs(coeffs) > 0
    logs[nz] = np.log(np.abs(coeffs[nz]))
    hull = []
    for k in range(deg + 1):
        if not nz[k]:
            continue
        while len(hull) >= 2:
            (i, li), (j, lj) = hull[-2], hull[-1]
            if (lj - li) * (k - i) <= (logs[k] - li) * (j - i):
                hull.pop()
            else:
                break
        hull.append((k, logs[k]))
    radii = []
    for (i, li), (j, lj) in zip(hull, hull[1:]):
        radii += [np.exp((li - lj) / (j - i))] * (j - i)
    return np.array(radii)


def aberth(coeffs: np.ndarray, max_iter: int = 500, tol: float = 1e-15) -> np.ndarray:
    """All roots of sum coeffs[k] x^k (dense, ascending)."""
    coeffs = np.asarray(coeffs, dtype=complex)
    deg = len(coeffs) - 1
    radii = _newton_polygon_radii(coeffs)
    angles = 2 * np.pi * (np.arange(deg) + 0.25) / deg + 0.4
    x = radii * np.exp(1j * angles)
    p = np.polynomial.polynomial
    dcoeffs = p.polyder(coeffs)
    for _ in range(max_iter):
        ratio = p.polyval(x, coeffs) / p.polyval(x, dcoeffs)
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        corr = ratio / (1.0 - ratio * inv.sum(axis=1))
        x = x - corr
        if np.all(np.abs(corr) <= tol * np.maximum(np.abs(x), 1e-300)):
            return x
    if np.all(np.isfinite(x)):
        return x
    raise ConvergenceFailure("Aberth iteration did not converge")


def solve_univariate(sys: SparseSystem, tol: float = 1e-12) -> list[Root]:
    if sys.dim != 1:
        raise ValueError("univariate solver needs n = 1")
    pts = [p[0] for p in sys.tuple.sets[0].points]
    lo, hi = min(pts), max(pts)
    dense = np.zeros(hi - lo + 1, dtype=complex)
    for p, c in zip(pts, sys.coefficients[0]):
        dense[p - lo] += c
    if abs(dense[0]) == 0 or abs(dense[-1]) == 0:
        raise DegenerateLeadingCoefficient("extreme coefficients must be nonzero")
    if hi == lo:
        return []
    x = aberth(dense)
    return _roots_from_log(sys, np.log(x).reshape(-1, 1), tol)


# ---------------------------------------------------------------- two variables


def _dense2(points, coeffs) -> np.ndarray:
    """Dense coefficient grid c[i, j] of x1^i x2^j after shifting to the corner."""
    pts = np.array(points)
    low = pts.min(axis=0)
    shape = tuple(pts.max(axis=0) - low + 1)
    grid = np.zeros(shape, dtype=complex)
    for p, c in zip(pts - low, coeffs):
        grid[p[0], p[1]] += c
    return grid


def _sylvester_det(p: np.ndarray, q: np.ndarray) -> complex:
    """Resultant in x2 of two polynomials given by ascending coefficient vectors."""
    m, n = len(p) - 1, len(q) - 1
    size = m + n
    if size == 0:
        return 1.0
    s = np.zeros((size, size), dtype=complex)
    for r in range(n):
        s[r, r:r + m + 1] = p[::-1]
    for r in range(m):
        s[n + r, r:r + n + 1] = q[::-1]
    return np.linalg.det(s)


def _resultant_x1(g1: np.ndarray, g2: np.ndarray, radius: float = 1.0) -> np.ndarray:
    """Coefficients of Res_{x2}(g1, g2) as a polynomial in x1, via FFT interpolation."""
    deg = (g1.shape[1] - 1) * (g2.shape[0] - 1) + (g2.shape[1] - 1) * (g1.shape[0] - 1)
    npts = deg + 1
    w = radius * np.exp(2j * np.pi * np.arange(npts) / npts)
    vals = np.empty(npts, dtype=complex)
    p1 = np.polynomial.polynomial
    for k, x1 in enumerate(w):
        a = np.array([p1.polyval(x1, g1[:, j]) for j in range(g1.shape[1])])
        b = np.array([p1.polyval(x1, g2[:, j]) for j in range(g2.shape[1])])
        vals[k] = _sylvester_det(a, b)
    coeffs = np.fft.fft(vals) / npts
    return coeffs / radius ** np.arange(npts)


def _trim(c: np.ndarray, rel: float = 1e-10) -> np.ndarray:
    scale = np.max(np.abs(c))
    if scale == 0:
        raise DegenerateResultant("resultant vanishes identically")
    keep = np.nonzero(np.abs(c) > rel * scale)[0]
    return c[keep[0]:keep[-1] + 1], keep[0]


def _dedupe(z: np.ndarray, tol: float) -> np.ndarray:
    out = []
    for row in z:
        if all(np.max(np.abs(np.exp(row) - np.exp(o))) > tol * max(1.0, np.max(np.abs(np.exp(o)))) for o in out):
            out.append(row)
    return np.array(out).reshape(-1, z.shape[1])


def _solve_reduced_2d(sys: SparseSystem, tol: float) -> np.ndarray:
    """Log-coordinates of all roots of a system whose supports span Z^2."""
    pts = [s.points for s in sys.tuple.sets]
    g1 = _dense2(pts[0], sys.coefficients[0])
    g2 = _dense2(pts[1], sys.coefficients[1])
    if g1.shape[1] == 1 and g2.shape[1] == 1:
        raise DegenerateResultant("no equation involves x2")
    res, shift = _trim(_resultant_x1(g1, g2))
    if len(res) < 2:
        return np.zeros((0, 2), dtype=complex)
    x1s = aberth(res)
    p = np.polynomial.polynomial
    cands = []
    for x1 in x1s:
        if not np.isfinite(x1) or abs(x1) < 1e-12:
            continue
        for g, other in ((g1, g2), (g2, g1)):
            col = np.array([p.polyval(x1, g[:, j]) for j in range(g.shape[1])])
            try:
                col, zshift = _trim(col, 1e-13)
            except DegenerateResultant:
                continue
            if len(col) < 2:
                continue
            for x2 in aberth(col):
                if np.isfinite(x2) and abs(x2) > 1e-12:
                    cands.append((x1, x2))
    if not cands:
        return np.zeros((0, 2), dtype=complex)
    z = np.log(np.array(cands, dtype=complex))
    z, res = refine(sys.exponents, sys.coefficients, z, tol, iterations=30)
    z = z[res < 1e-9]
    return _dedupe(z, DEDUP_TOL)


def _lift(z: np.ndarray, L) -> np.ndarray:
    """All preimages under x -> (x^{L e_k})_k of points given in log coordinates."""
    n = L.rows
    lt = np.array(L.transpose().to_rows(), dtype=float)
    lt_inv = np.linalg.inv(lt)
    # coset representatives of Z^n / L^T Z^n via the Smith form of L^T
    snf = smith_normal_form(L.transpose())
    uinv = np.array(unimodular_inverse(snf.U).to_rows(), dtype=float)
    reps = [uinv @ np.array(k, dtype=float) for k in product(*[range(s) for s in snf.invariants])]
    out = [lt_inv @ (row + 2j * np.pi * r) for row in z for r in reps]
    return np.array(out, dtype=complex).reshape(-1, n)


def solve_system(sys: SparseSystem, tol: float = 1e-12) -> list[Root]:
    """All roots of a generic system in dimension 1 or 2, counted against the mixed volume."""
    n = sys.dim
    if n not in (1, 2):
        raise ValueError("numerical solving is available for n <= 2")
    if n == 1:
        return solve_univariate(sys, tol)
    return solve_system_2d(sys, tol)


def solve_system_2d(sys: SparseSystem, tol: float = 1e-12) -> list[Root]:
    if sys.dim != 2:
        raise ValueError("solve_system_2d needs n = 2")
    t = sys.tuple
    expected = lattice_mixed_volume(*t.sets)
    shifted = normalize(t)
    red = reduction(shifted)
    if red.index == 1:
        z = _solve_reduced_2d(sys, tol)
    else:
        rsys = SparseSystem(red.reduced, tuple(
            np.array([dict(zip(_reduce_points(s0, red), c))[p] for p in sr.points])
            for s0, sr, c in zip(t.sets, red.reduced.sets, sys.coefficients)))
        z = _lift(_solve_reduced_2d(rsys, tol), red.L)
    roots = _roots_from_log(sys, z, tol) if len(z) else []
    roots = [r for r in roots if r.residual < 1e-9]
    if len(roots) != expected:
        raise CountMismatch(len(roots), expected)
    return roots


def _reduce_points(s0: SupportSet, red) -> list[tuple]:
    """Reduced coordinates of the points of an original (unshifted) set, in order."""
    low = s0.points[0]
    linv = np.linalg.inv(np.array(red.L.to_rows(), dtype=float))
    out = []
    for p in s0.points:
        v = linv @ (np.array(p, dtype=float) - np.array(low, dtype=float))
        out.append(tuple(int(round(x)) for x in v))
    return out
