"""Sparse Laurent systems with complex coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ZeroCoordinate
from ..tuples import SupportTuple

ZERO_TOL = 1e-10


@dataclass(frozen=True)
class SparseSystem:
    """One equation per support set; ``coefficients[i][k]`` belongs to
    ``tuple.sets[i].points[k]``."""

    tuple: SupportTuple
    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(np.asarray(c, dtype=complex).copy() for c in self.coefficients)
        if len(coeffs) != self.tuple.dim:
            raise ValueError("one coefficient vector per equation is required")
        for s, c in zip(self.tuple.sets, coeffs):
            if c.shape != (len(s.points),):
                raise ValueError("coefficient count does not match the support")
            c.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def from_dicts(cls, t: SupportTuple, maps: Sequence[dict]) -> "SparseSystem":
        return cls(t, tuple(np.array([m[p] for p in s.points], dtype=complex) for s, m in zip(t.sets, maps)))

    @property
    def dim(self) -> int:
        return self.tuple.dim

    @property
    def exponents(self) -> tuple:
        return exponent_arrays(self.tuple)

    def as_dicts(self) -> list[dict]:
        return [dict(zip(s.points, c)) for s, c in zip(self.tuple.sets, self.coefficients)]

    def with_coefficients(self, coefficients) -> "SparseSystem":
        return SparseSystem(self.tuple, tuple(coefficients))


def exponent_arrays(t: SupportTuple) -> tuple:
    return tuple(np.array(s.points, dtype=float).reshape(len(s.points), t.dim) for s in t.sets)


def random_system(t: SupportTuple, rng: np.random.Generator) -> SparseSystem:
    coeffs = [(rng.normal(size=len(s)) + 1j * rng.normal(size=len(s))) / np.sqrt(2) for s in t.sets]
    return SparseSystem(t, tuple(coeffs))


def _check(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(x) < ZERO_TOL):
        raise ZeroCoordinate("point is not in the torus")
    return x


def evaluate(sys: SparseSystem, x) -> np.ndarray:
    x = _check(x)
    z = np.log(x)
    return np.array([c @ np.exp(a @ z) for a, c in zip(sys.exponents, sys.coefficients)])


def jacobian(sys: SparseSystem, x) -> np.ndarray:
    """Matrix of partials d f_i / d x_k."""
    x = _check(x)
    z = np.log(x)
    rows = []
    for a, c in zip(sys.exponents, sys.coefficients):
        mono = c * np.exp(a @ z)
        rows.append((mono @ a) / x)
    return np.array(rows).reshape(sys.dim, sys.dim)


# ---------------------------------------------------------------- log coordinates, batched


def log_eval(exps: Sequence[np.ndarray], coeffs: Sequence[np.ndarray], z: np.ndarray):
    """Values, log-Jacobians (d f / d z) and monomial scales at a batch z of shape (R, n)."""
    r, n = z.shape
    with np.errstate(over="ignore", invalid="ignore"):
        return _log_eval(exps, coeffs, z, r, n)


def _log_eval(exps, coeffs, z, r, n):
    f = np.empty((r, n), dtype=complex)
    jac = np.empty((r, n, n), dtype=complex)
    scale = np.empty((r, n))
    for i, (a, c) in enumerate(zip(exps, coeffs)):
        mono = np.exp(z @ a.T)  # (R, k)
        terms = mono * c
        f[:, i] = terms.sum(axis=1)
        jac[:, i, :] = terms @ a
        scale[:, i] = np.abs(terms).sum(axis=1)
    return f, jac, scale


def log_dvalue(exps: Sequence[np.ndarray], dcoeffs: Sequence[np.ndarray], z: np.ndarray) -> np.ndarray:
    r, n = z.shape
    out = np.empty((r, n), dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for i, (a, c) in enumerate(zip(exps, dcoeffs)):
            out[:, i] = np.exp(z @ a.T) @ c
    return out


def relative_residual(exps, coeffs, z: np.ndarray) -> np.ndarray:
    """Backward error |f_i| / sum |c_a x^a| per root (max over equations)."""
    f, _, scale = log_eval(exps, coeffs, z)
    with np.errstate(invalid="ignore"):
        return np.max(np.abs(f) / np.maximum(scale, 1e-300), axis=1)
