"""Predictor-corrector continuation in logarithmic coordinates.

Roots are tracked as z = log x, so the accumulated imaginary part of z
divided by 2*pi is the winding vector of each path.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import ConvergenceFailure, SingularJacobian, StepUnderflow
from .system import SparseSystem, log_dvalue, log_eval, relative_residual


@dataclass
class TrackOptions:
    newton_tol: float = 1e-12
    initial_step: float = 0.02
    max_step: float = 0.05
    min_step: float = 1e-12
    max_arg_step: float = np.pi / 2
    max_log_step: float = 0.5
    corrector_iterations: int = 6
    corrector_tol: float = 1e-10
    first_correction: float = 1e-2
    grow_after: int = 5
    max_steps: int = 200000


@dataclass
class Family:
    """A path s in [0, 1] -> coefficient vectors over fixed supports."""

    exps: tuple
    coeffs: Callable[[float], list]
    dcoeffs: Callable[[float], list]
    closed: bool = False

    def system(self, s: float, t) -> SparseSystem:
        return SparseSystem(t, tuple(self.coeffs(s)))


def segment(exps, c0: Sequence[np.ndarray], c1: Sequence[np.ndarray]) -> Family:
    c0 = [np.asarray(c, complex) for c in c0]
    c1 = [np.asarray(c, complex) for c in c1]
    diff = [b - a for a, b in zip(c0, c1)]
    return Family(tuple(exps), lambda s: [a + s * d for a, d in zip(c0, diff)], lambda s: diff)


def circle(exps, center: Sequence[np.ndarray], eq: int, idx: int, radius: float,
           turns: int = 1, sign: int = 1) -> Family:
    """coefficient (eq, idx) runs center + radius * exp(sign * 2 pi i turns s)."""
    center = [np.asarray(c, complex) for c in center]
    w = sign * 2j * np.pi * turns

    def coeffs(s):
        out = [c.copy() for c in center]
        out[eq][idx] += radius * np.exp(w * s)
        return out

    def dcoeffs(s):
        out = [np.zeros_like(c) for c in center]
        out[eq][idx] = radius * w * np.exp(w * s)
        return out

    return Family(tuple(exps), coeffs, dcoeffs, closed=True)


def scaled_part(exps, fixed: Sequence[np.ndarray], moving: Sequence[np.ndarray],
                t_start: float, t_end: float) -> Family:
    """fixed + t(s) * moving with t geometric from t_start to t_end."""
    fixed = [np.asarray(c, complex) for c in fixed]
    moving = [np.asarray(c, complex) for c in moving]
    lr = np.log(t_end / t_start)

    def t(s):
        return t_start * np.exp(lr * s)

    return Family(tuple(exps),
                  lambda s: [a + t(s) * b for a, b in zip(fixed, moving)],
                  lambda s: [lr * t(s) * b for b in moving])


def reverse(f: Family) -> Family:
    return Family(f.exps, lambda s: f.coeffs(1.0 - s), lambda s: [-c for c in f.dcoeffs(1.0 - s)], f.closed)


@dataclass
class BatchResult:
    z_start: np.ndarray
    z_end: np.ndarray
    steps: int
    max_residual: float

    @property
    def displacement(self) -> np.ndarray:
        """Imaginary displacement over 2 pi, per root and coordinate."""
        return (self.z_end - self.z_start).imag / (2 * np.pi)


@dataclass
class TrackedPath:
    start: np.ndarray
    end: np.ndarray
    winding: np.ndarray
    steps: int
    max_residual: float


def _velocity(fam: Family, s: float, z: np.ndarray) -> np.ndarray:
    c = fam.coeffs(s)
    _, jac, _ = log_eval(fam.exps, c, z)
    df = log_dvalue(fam.exps, fam.dcoeffs(s), z)
    try:
        return -np.linalg.solve(jac, df[..., None])[..., 0]
    except np.linalg.LinAlgError as e:
        raise SingularJacobian(str(e)) from None


def newton(exps, coeffs, z: np.ndarray, iterations: int, tol: float):
    """Newton in log coordinates. Returns (z, corrections per iteration, converged)."""
    norms = []
    for _ in range(iterations):
        f, jac, _ = log_eval(exps, coeffs, z)
        try:
            dz = np.linalg.solve(jac, f[..., None])[..., 0]
        except np.linalg.LinAlgError:
            return z, norms, False
        if not np.all(np.isfinite(dz)):
            return z, norms, False
        z = z - dz
        norms.append(float(np.max(np.abs(dz))))
        if norms[-1] < tol:
            return z, norms, True
    return z, norms, False


def refine(exps, coeffs, z: np.ndarray, tol: float = 1e-12, iterations: int = 12):
    """Polish roots to backward error ``tol``; returns (z, residuals)."""
    z = np.array(z, dtype=complex)
    for _ in range(iterations):
        res = relative_residual(exps, coeffs, z)
        if np.all(res < tol):
            break
        z, _, _ = newton(exps, coeffs, z, 1, 0.0)
    return z, relative_residual(exps, coeffs, z)


def track_batch(fam: Family, z0: np.ndarray, opts: TrackOptions | None = None,
                history: list | None = None) -> BatchResult:
    """Track all rows of z0 from s=0 to s=1 with a shared adaptive step.

    Accepted points (s, z) are appended to ``history`` when given.
    """
    opts = opts or TrackOptions()
    z = np.array(z0, dtype=complex)
    start = z.copy()
    s, h = 0.0, opts.initial_step
    good, steps, worst = 0, 0, 0.0
    if history is not None:
        history.append((s, z.copy()))
    while s < 1.0:
        if steps > opts.max_steps:
            raise ConvergenceFailure("step budget exhausted")
        h = min(h, 1.0 - s, opts.max_step)
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                k1 = _velocity(fam, s, z)
                k2 = _velocity(fam, s + h / 2, z + h / 2 * k1)
                k3 = _velocity(fam, s + h / 2, z + h / 2 * k2)
                k4 = _velocity(fam, s + h, z + h * k3)
                pred = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            ok = np.all(np.isfinite(pred))
        except SingularJacobian:
            ok = False
        if ok:
            delta = pred - z
            ok = np.max(np.abs(delta.imag)) < opts.max_arg_step and np.max(np.abs(delta)) < opts.max_log_step
        if ok:
            c = fam.coeffs(s + h)
            znew, norms, conv = newton(fam.exps, c, pred, opts.corrector_iterations, opts.corrector_tol)
            ok = conv and norms and norms[0] < opts.first_correction
            if ok:
                ok = np.max(np.abs((znew - z).imag)) < opts.max_arg_step
        steps += 1
        if not ok:
            h /= 2
            good = 0
            if h < opts.min_step:
                raise StepUnderflow(f"step size underflow at s = {s:.6g}")
            continue
        z = znew
        s = s + h if s + h < 1.0 - 1e-15 else 1.0
        good += 1
        if good >= opts.grow_after:
            h *= 2
            good = 0
        worst = max(worst, float(np.max(relative_residual(fam.exps, c, z))))
        if history is not None:
            history.append((s, z.copy()))
    z, res = refine(fam.exps, fam.coeffs(1.0), z, opts.newton_tol)
    if not np.all(res <= 1e3 * opts.newton_tol):
        raise ConvergenceFailure(f"endpoint residual {np.max(res):.2e}")
    return BatchResult(start, z, steps, max(worst, float(np.max(res))))


def track_path(fam: Family, start: np.ndarray, opts: TrackOptions | None = None) -> TrackedPath:
    """Track one root given in ordinary coordinates."""
    z0 = np.log(np.asarray(start, dtype=complex)).reshape(1, -1)
    res = track_batch(fam, z0, opts)
    return TrackedPath(np.exp(res.z_start[0]), np.exp(res.z_end[0]), res.displacement[0],
                       res.steps, res.max_residual)
