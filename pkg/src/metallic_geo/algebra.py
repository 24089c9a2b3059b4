"""Metallic means, metallic/product structures on inner-product spaces.

A metallic structure is an endomorphism with ``phi @ phi == p * phi + q * I``
for positive integers ``p`` and ``q``.  Every almost product structure ``F``
(``F @ F == I``) yields two of them, ``p/2 I +- alpha/2 F`` with
``alpha = sqrt(p^2 + 4q)``, and the map is invertible.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import DegenerateBasisError, DomainError, InvalidStructureError

Branch = Literal["first", "second"]

DEFAULT_TOL = 1e-9


@dataclass(frozen=True)
class MetallicParams:
    """Constants of one member of the metallic means family."""

    p: int
    q: int
    sigma: float
    alpha: float

    def residuals(self) -> tuple[float, float]:
        """Relative residuals of ``sigma^2 = p sigma + q`` and ``alpha = 2 sigma - p``."""
        s, a = self.sigma, self.alpha
        r1 = abs(s * s - self.p * s - self.q) / (s * s)
        r2 = abs(a - (2 * s - self.p)) / a
        return r1, r2

    @property
    def conjugate(self) -> float:
        """The second root ``p - sigma`` of ``x^2 = p x + q``."""
        return self.p - self.sigma


def metallic_constants(p: int, q: int) -> MetallicParams:
    """Return ``sigma_{p,q}`` and ``alpha`` for positive integers ``p, q``.

    >>> round(metallic_constants(1, 1).sigma, 10)
    1.6180339887
    """
    for name, v in (("p", p), ("q", q)):
        if isinstance(v, bool) or not isinstance(v, numbers.Integral):
            raise DomainError(f"{name} must be a positive integer, got {v!r}")
        if v < 1:
            raise DomainError(f"{name} must be >= 1, got {v}")
    p, q = int(p), int(q)
    alpha = math.sqrt(p * p + 4 * q)
    sigma = (p + alpha) / 2.0
    return MetallicParams(p=p, q=q, sigma=sigma, alpha=alpha)


@dataclass(frozen=True)
class InnerProduct:
    """A symmetric positive-definite Gram matrix."""

    gram: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.array(self.gram, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise DomainError(f"Gram matrix must be square, got shape {g.shape}")
        if not np.all(np.isfinite(g)):
            raise DomainError("Gram matrix has non-finite entries")
        if np.max(np.abs(g - g.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(g))):
            raise DomainError("Gram matrix is not symmetric")
        if np.linalg.eigvalsh(g).min() <= 0:
            raise DomainError("Gram matrix is not positive definite")
        g.setflags(write=False)
        object.__setattr__(self, "gram", g)

    @classmethod
    def standard(cls, dim: int) -> "InnerProduct":
        return cls(np.eye(dim))

    @property
    def dim(self) -> int:
        return self.gram.shape[0]

    def __call__(self, x, y) -> float:
        return float(np.asarray(x) @ self.gram @ np.asarray(y))


def _as_square(a, name: str) -> np.ndarray:
    m = np.asarray(a, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidStructureError(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidStructureError(f"{name} has non-finite entries")
    return m


def _gram_for(g: InnerProduct | None, dim: int) -> np.ndarray:
    if g is None:
        return np.eye(dim)
    if g.dim != dim:
        raise DomainError(f"inner product has dim {g.dim}, expected {dim}")
    return g.gram


def _max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a), initial=0.0))


def parse_sign(sign) -> int:
    """Normalize ``'+'``/``'-'``/``+1``/``-1`` to ``+1``/``-1``."""
    if sign in ("+", 1, 1.0, "plus"):
        return 1
    if sign in ("-", -1, -1.0, "minus"):
        return -1
    raise DomainError(f"sign must be '+' or '-', got {sign!r}")


def branch_sign(branch: Branch) -> int:
    """``+1`` for the ``first`` metallic structure, ``-1`` for the ``second``."""
    if branch == "first":
        return 1
    if branch == "second":
        return -1
    raise DomainError(f"branch must be 'first' or 'second', got {branch!r}")


def metallic_from_product(F, params: MetallicParams, branch: Branch,
                          g: InnerProduct | None = None, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Metallic structure ``p/2 I +- alpha/2 F`` induced by an almost product structure."""
    F = _as_square(F, "F")
    s = branch_sign(branch)
    dim = F.shape[0]
    gram = _gram_for(g, dim)
    eye = np.eye(dim)
    r_inv = _max_abs(F @ F - eye)
    if r_inv > tol:
        raise InvalidStructureError(f"F^2 != I (max residual {r_inv:.3e})")
    r_sym = _max_abs(gram @ F - F.T @ gram)
    if r_sym > tol:
        raise InvalidStructureError(f"F is not g-symmetric (max residual {r_sym:.3e})")
    return 0.5 * params.p * eye + s * 0.5 * params.alpha * F


def product_from_metallic(phi, params: MetallicParams, sign="+", tol: float = DEFAULT_TOL) -> np.ndarray:
    """Almost product structure ``+-(2/alpha phi - p/alpha I)`` induced by ``phi``."""
    phi = _as_square(phi, "phi")
    s = parse_sign(sign)
    eye = np.eye(phi.shape[0])
    r = _max_abs(phi @ phi - params.p * phi - params.q * eye)
    if r > tol * max(1.0, _max_abs(phi) ** 2):
        raise InvalidStructureError(f"phi^2 != p phi + q I (max residual {r:.3e})")
    return s * ((2.0 / params.alpha) * phi - (params.p / params.alpha) * eye)


@dataclass(frozen=True)
class StructureCheck:
    ok: bool
    polynomial_residual: float
    symmetry_residual: float

    def __bool__(self) -> bool:
        return self.ok


def check_metallic(phi, g: InnerProduct | None, params: MetallicParams,
                   tol: float = DEFAULT_TOL) -> StructureCheck:
    """Diagnose ``phi^2 = p phi + q I`` and g-symmetry; never raises on failure."""
    phi = np.asarray(phi, dtype=float)
    gram = _gram_for(g, phi.shape[0])
    poly = _max_abs(phi @ phi - params.p * phi - params.q * np.eye(phi.shape[0]))
    sym = _max_abs(gram @ phi - phi.T @ gram)
    return StructureCheck(poly <= tol and sym <= tol, poly, sym)


def orthonormalize(basis: Sequence, g: InnerProduct | None = None,
                   pivot_tol: float = 1e-10) -> np.ndarray:
    """Gram-Schmidt with respect to ``g``; returns the frame as columns.

    Modified Gram-Schmidt with one re-orthogonalization pass.  A pivot below
    ``pivot_tol * ||v||`` raises :class:`DegenerateBasisError`.
    """
    vecs = [np.asarray(v, dtype=float) for v in basis]
    if not vecs:
        raise DegenerateBasisError("empty basis")
    dim = vecs[0].shape[0]
    gram = _gram_for(g, dim)
    out: list[np.ndarray] = []
    for k, v in enumerate(vecs):
        norm0 = math.sqrt(max(v @ gram @ v, 0.0))
        w = v.copy()
        for _ in range(2):
            for e in out:
                w = w - (e @ gram @ w) * e
        nw = math.sqrt(max(w @ gram @ w, 0.0))
        if norm0 == 0.0 or nw <= pivot_tol * norm0:
            raise DegenerateBasisError(f"vector {k} is dependent on its predecessors")
        out.append(w / nw)
    return np.column_stack(out)
