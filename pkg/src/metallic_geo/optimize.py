"""Multi-start optimization over orthonormal frames with grouped columns.

A frame is an ``n x n`` orthogonal matrix whose columns are split into
consecutive groups (for example one group per subspace ``L_j`` and a
remainder).  Objectives depend only on the spans of the groups, so rotating
two columns of the same group is a no-op and the search uses Givens rotations
between columns of different groups.

All objectives handled here are homogeneous of degree four in the rotated
pair, hence along a Givens rotation by ``t`` they are trigonometric
polynomials in ``2t`` of degree two.  Five samples fit the polynomial
exactly; the minimum is then found by a grid plus golden-section search.
All restarts are advanced together as one batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

Objective = Callable[[np.ndarray], np.ndarray]  # (R, n, n) -> (R,)

AGREE_TOL = 1e-8
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

# samples at t_j = j*pi/5 <=> phi_j = 2 t_j; basis [1, cos phi, sin phi, cos 2phi, sin 2phi]
_PHI = 2.0 * np.arange(5) * np.pi / 5.0
_BASIS = np.stack([np.ones(5), np.cos(_PHI), np.sin(_PHI), np.cos(2 * _PHI), np.sin(2 * _PHI)], axis=1)
_BASIS_INV = np.linalg.inv(_BASIS)
_GRID = np.linspace(0.0, 2 * np.pi, 64, endpoint=False)


@dataclass(frozen=True)
class Certificate:
    """Best value and frame of a multi-start search, with restart agreement count."""

    value: float
    frame: np.ndarray
    agreeing: int
    restarts: int
    sweeps: int

    def to_dict(self) -> dict:
        return {"value": self.value, "agreeing_restarts": self.agreeing,
                "restarts": self.restarts, "sweeps": self.sweeps}


def random_frames(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` Haar-distributed orthogonal matrices (prefix-stable in ``count``)."""
    Z = rng.standard_normal((count, n, n))
    Q, R = np.linalg.qr(Z)
    d = np.sign(np.diagonal(R, axis1=1, axis2=2))
    d[d == 0] = 1.0
    return Q * d[:, None, :]


def _trig_eval(coef: np.ndarray, phi: np.ndarray) -> np.ndarray:
    # coef (R, 5); phi (R, ...) -> values
    c = coef[:, :, None] if phi.ndim == 2 else coef
    return (c[:, 0] + c[:, 1] * np.cos(phi) + c[:, 2] * np.sin(phi)
            + c[:, 3] * np.cos(2 * phi) + c[:, 4] * np.sin(2 * phi))


def _argmin_trig(coef: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Global minimizer in ``[0, 2 pi)`` of each fitted trig polynomial."""
    R = coef.shape[0]
    vals = _trig_eval(coef, np.broadcast_to(_GRID, (R, _GRID.size)))
    k = np.argmin(vals, axis=1)
    step = _GRID[1] - _GRID[0]
    lo = _GRID[k] - step
    hi = _GRID[k] + step
    a = hi - GOLDEN * (hi - lo)
    b = lo + GOLDEN * (hi - lo)
    fa = _trig_eval(coef, a)
    fb = _trig_eval(coef, b)
    while np.max(hi - lo) > tol:
        left = fa < fb
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
        na = hi - GOLDEN * (hi - lo)
        nb = lo + GOLDEN * (hi - lo)
        a_new = np.where(left, na, b)
        b_new = np.where(left, a, nb)
        fa_new = np.where(left, _trig_eval(coef, na), fb)
        fb_new = np.where(left, fa, _trig_eval(coef, nb))
        a, b, fa, fb = a_new, b_new, fa_new, fb_new
    return 0.5 * (lo + hi)


def _rotate(Q: np.ndarray, i: int, j: int, t: np.ndarray) -> np.ndarray:
    c, s = np.cos(t), np.sin(t)
    out = Q.copy()
    qi, qj = Q[..., :, i], Q[..., :, j]
    out[..., :, i] = c[..., None] * qi + s[..., None] * qj
    out[..., :, j] = -s[..., None] * qi + c[..., None] * qj
    return out


def group_pairs(groups: Sequence[int]) -> list[tuple[int, int]]:
    labels = np.repeat(np.arange(len(groups)), groups)
    n = labels.size
    return [(i, j) for i in range(n) for j in range(i + 1, n) if labels[i] != labels[j]]


def minimize_frames(objective: Objective, n: int, groups: Sequence[int], *, restarts: int = 64,
                    seed: int = 0, seeds: np.ndarray | None = None, maximize: bool = False,
                    max_sweeps: int = 200, stop_tol: float = 1e-14) -> Certificate:
    """Minimize (or maximize) ``objective`` over frames with the given column groups.

    ``seeds`` are extra deterministic starting frames placed before the
    random ones.  Deterministic for fixed arguments.
    """
    if sum(groups) != n:
        raise ValueError(f"column groups {tuple(groups)} do not sum to n={n}")
    sgn = -1.0 if maximize else 1.0

    def f(Q):
        return sgn * objective(Q)

    rng = np.random.default_rng(seed)
    starts = [random_frames(n, restarts, rng)]
    if seeds is not None and len(seeds):
        starts.insert(0, np.asarray(seeds, dtype=float).reshape(-1, n, n))
    Q = np.concatenate(starts, axis=0)
    val = f(Q)
    pairs = group_pairs(groups)
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        before = val.copy()
        for i, j in pairs:
            samples = np.stack([f(_rotate(Q, i, j, np.full(Q.shape[0], phi / 2.0))) for phi in _PHI], axis=1)
            coef = samples @ _BASIS_INV.T
            phi = _argmin_trig(coef)
            Qn = _rotate(Q, i, j, phi / 2.0)
            vn = f(Qn)
            better = vn < val
            Q = np.where(better[:, None, None], Qn, Q)
            val = np.where(better, vn, val)
        if not pairs or np.max(before - val) < stop_tol:
            break
    k = int(np.argmin(val))
    best = float(val[k])
    agreeing = int(np.sum(np.abs(val - best) <= AGREE_TOL))
    return Certificate(sgn * best, Q[k], agreeing, Q.shape[0], sweeps)


def fibonacci_sphere(count: int) -> np.ndarray:
    """Near-uniform points on ``S^2``."""
    k = np.arange(count) + 0.5
    z = 1.0 - 2.0 * k / count
    r = np.sqrt(1.0 - z * z)
    ang = np.pi * (1.0 + math.sqrt(5.0)) * k
    return np.stack([r * np.cos(ang), r * np.sin(ang), z], axis=1)


def sphere_grid(n: int, count: int = 10_000, seed: int = 0) -> np.ndarray:
    """Deterministic point set on ``S^{n-1}``: exact grids for n <= 3, seeded samples above."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        t = np.linspace(0.0, 2 * np.pi, count, endpoint=False)
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    if n == 3:
        return fibonacci_sphere(count)
    x = np.random.default_rng(seed).standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def complete_frames(W: np.ndarray) -> np.ndarray:
    """Orthogonal matrices whose first column is each unit row of ``W`` (Householder)."""
    W = np.asarray(W, dtype=float)
    count, n = W.shape
    v = W.copy()
    v[:, 0] -= 1.0
    nv = np.linalg.norm(v, axis=1)
    out = np.broadcast_to(np.eye(n), (count, n, n)).copy()
    ok = nv > 1e-12
    u = v[ok] / nv[ok, None]
    out[ok] -= 2.0 * u[:, :, None] * u[:, None, :]
    return out
