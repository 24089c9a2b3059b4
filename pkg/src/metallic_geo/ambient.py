"""Locally metallic product space forms ``M1(c1) x M2(c2)``.

Each factor is realized in Euclidean space, either flat (``c = 0``, identity
chart) or as a round sphere of radius ``1/sqrt(c)`` centred at the origin.
The product structure ``F`` is ``+I`` on the first factor's block and ``-I``
on the second's; since it is constant in realization coordinates it can be
applied to tangent vectors directly.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .algebra import (
    Branch,
    MetallicParams,
    branch_sign,
    metallic_constants,
    orthonormalize,
    parse_sign,
)
from .errors import ArgumentError, DomainError, OffManifoldError, RealizationError

POINT_TOL = 1e-10


@dataclass(frozen=True)
class Realization:
    kind: Literal["flat", "sphere"]
    radius: float | None = None

    @property
    def is_sphere(self) -> bool:
        return self.kind == "sphere"

    def to_dict(self) -> dict:
        if self.is_sphere:
            return {"kind": "sphere", "radius": self.radius}
        return {"kind": "flat"}


def _realization(spec, c: float, which: int) -> Realization:
    if spec is None:
        if c == 0:
            return Realization("flat")
        if c > 0:
            return Realization("sphere", 1.0 / math.sqrt(c))
        raise RealizationError(f"factor {which}: c{which}={c} < 0 has no supported realization")
    if isinstance(spec, Realization):
        r = spec
    elif isinstance(spec, str):
        r = Realization(spec, None)
    elif isinstance(spec, dict):
        r = Realization(spec.get("kind"), spec.get("radius"))
    else:
        raise RealizationError(f"factor {which}: bad realization {spec!r}")
    if r.kind == "flat":
        if c != 0:
            raise RealizationError(f"factor {which}: flat realization requires c=0, got {c}")
        return Realization("flat")
    if r.kind == "sphere":
        if c <= 0:
            raise RealizationError(f"factor {which}: sphere realization requires c>0, got {c}")
        radius = r.radius if r.radius is not None else 1.0 / math.sqrt(c)
        if radius <= 0 or abs(1.0 / radius**2 - c) > 1e-12 * c:
            raise RealizationError(f"factor {which}: sphere radius {radius} inconsistent with c={c}")
        return Realization("sphere", float(radius))
    raise RealizationError(f"factor {which}: unknown realization kind {r.kind!r}")


@dataclass(frozen=True)
class ProductSpaceForm:
    """Validated ambient space; build it with :func:`make_space`."""

    m1: int
    m2: int
    c1: float
    c2: float
    params: MetallicParams
    branch: Branch
    curv_sign: int
    realization: tuple[Realization, Realization]
    matched_sign: int
    sign_source: str
    _F: np.ndarray = field(repr=False, compare=False)
    _phi: np.ndarray = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return self.m1 + self.m2

    @property
    def block_dims(self) -> tuple[int, int]:
        return tuple(m + 1 if r.is_sphere else m
                     for m, r in zip((self.m1, self.m2), self.realization))

    @property
    def embed_dim(self) -> int:
        return sum(self.block_dims)

    @property
    def blocks(self) -> tuple[slice, slice]:
        e1, e2 = self.block_dims
        return slice(0, e1), slice(e1, e1 + e2)

    @property
    def is_flat(self) -> bool:
        return self.c1 == 0 and self.c2 == 0

    @property
    def sign_is_matched(self) -> bool:
        return self.curv_sign == self.matched_sign

    def product_operator(self) -> np.ndarray:
        """``F`` on the realization space (block ``+I`` / ``-I``)."""
        return self._F

    def metallic_operator(self) -> np.ndarray:
        """``phi = p/2 I +- alpha/2 F`` on the realization space, per ``branch``."""
        return self._phi

    def with_sign(self, sign) -> "ProductSpaceForm":
        """Same space, different choice of the sign in the metallic curvature form."""
        return dataclasses.replace(self, curv_sign=parse_sign(sign))

    def to_dict(self) -> dict:
        return {
            "m1": self.m1, "m2": self.m2, "c1": self.c1, "c2": self.c2,
            "p": self.params.p, "q": self.params.q, "branch": self.branch,
            "curv_sign": "+" if self.curv_sign > 0 else "-",
            "matched_sign": "+" if self.matched_sign > 0 else "-",
            "sign_source": self.sign_source,
            "realization": [r.to_dict() for r in self.realization],
        }


@dataclass(frozen=True)
class AmbientTangent:
    base: np.ndarray
    vec: np.ndarray


def make_space(m1: int, m2: int, c1: float = 0.0, c2: float = 0.0, p: int = 1, q: int = 1,
               branch: Branch = "first", curv_sign=None, realization: Sequence | None = None,
               check_samples: int = 64) -> ProductSpaceForm:
    """Validate the ambient description and fix the curvature-form sign.

    With ``curv_sign=None`` the sign of the ``(c1 - c2)`` term in the metallic
    curvature form is determined by cross-checking it against the product
    form on random tangent triples; when ``c1 == c2`` both signs agree and the
    branch's algebraic sign is used.
    """
    for name, m in (("m1", m1), ("m2", m2)):
        if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
            raise DomainError(f"{name} must be a positive integer, got {m!r}")
    params = metallic_constants(p, q)
    bsign = branch_sign(branch)
    c1, c2 = float(c1), float(c2)
    reals = realization if realization is not None else (None, None)
    if len(reals) != 2:
        raise RealizationError("realization must list exactly two factors")
    r1 = _realization(reals[0], c1, 1)
    r2 = _realization(reals[1], c2, 2)
    e1 = m1 + 1 if r1.is_sphere else m1
    e2 = m2 + 1 if r2.is_sphere else m2
    F = np.diag(np.r_[np.ones(e1), -np.ones(e2)])
    phi = 0.5 * params.p * np.eye(e1 + e2) + bsign * 0.5 * params.alpha * F
    F.setflags(write=False)
    phi.setflags(write=False)
    space = ProductSpaceForm(int(m1), int(m2), c1, c2, params, branch, bsign, (r1, r2),
                             bsign, "algebraic", F, phi)
    matched, source = _match_sign(space, check_samples)
    sign = matched if curv_sign is None else parse_sign(curv_sign)
    return dataclasses.replace(space, curv_sign=sign, matched_sign=matched, sign_source=source)


def _match_sign(space: ProductSpaceForm, samples: int) -> tuple[int, str]:
    if space.c1 == space.c2:
        return space.matched_sign, "degenerate (c1 == c2)"
    rng = np.random.default_rng(20240601)
    x = random_point(space, rng)
    frame = adapted_frame(space, x)
    V = frame @ rng.standard_normal((space.dim, 3 * samples))
    ref = _product_vectors(space, V[:, 0::3], V[:, 1::3], V[:, 2::3])
    errs = {}
    scale = max(1.0, float(np.max(np.abs(ref))))
    for s in (1, -1):
        got = _metallic_vectors(space, V[:, 0::3], V[:, 1::3], V[:, 2::3], s)
        errs[s] = float(np.max(np.abs(got - ref))) / scale
    good = [s for s in (1, -1) if errs[s] <= 1e-9]
    if len(good) != 1:
        raise RealizationError(f"curvature forms do not cross-validate (residuals {errs})")
    return good[0], "empirical"


def random_point(space: ProductSpaceForm, rng: np.random.Generator) -> np.ndarray:
    x = rng.standard_normal(space.embed_dim)
    for blk, r in zip(space.blocks, space.realization):
        if r.is_sphere:
            x[blk] *= r.radius / np.linalg.norm(x[blk])
    return x


def check_point(space: ProductSpaceForm, x, tol: float = POINT_TOL) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (space.embed_dim,):
        raise OffManifoldError(f"point has shape {x.shape}, expected ({space.embed_dim},)")
    for i, (blk, r) in enumerate(zip(space.blocks, space.realization), start=1):
        if r.is_sphere:
            dev = abs(np.linalg.norm(x[blk]) - r.radius) / r.radius
            if dev > tol:
                raise OffManifoldError(f"factor {i} block is off its sphere (relative deviation {dev:.2e})")
    return x


def project_to_manifold_tangent(space: ProductSpaceForm, x, v) -> AmbientTangent:
    """Remove the radial component of every sphere-factor block of ``v``."""
    x = np.asarray(x, dtype=float)
    w = np.array(v, dtype=float)
    for blk, r in zip(space.blocks, space.realization):
        if r.is_sphere:
            n = x[blk] / np.linalg.norm(x[blk])
            w[blk] -= (n @ w[blk]) * n
    return AmbientTangent(x, w)


def tangent_projector(space: ProductSpaceForm, x) -> np.ndarray:
    """Orthogonal projector of the realization space onto ``T_x M``."""
    P = np.eye(space.embed_dim)
    for blk, r in zip(space.blocks, space.realization):
        if r.is_sphere:
            n = x[blk] / np.linalg.norm(x[blk])
            P[blk, blk] -= np.outer(n, n)
    return P


def adapted_frame(space: ProductSpaceForm, x) -> np.ndarray:
    """Orthonormal frame of ``T_x M`` (columns), factor-1 vectors first.

    Sphere blocks use the orthonormalized projections of the coordinate axes
    in index order, skipping the (at most one) dependent axis.
    """
    x = check_point(space, x)
    cols = []
    for blk, r, m in zip(space.blocks, space.realization, (space.m1, space.m2)):
        size = blk.stop - blk.start
        if not r.is_sphere:
            for k in range(size):
                e = np.zeros(space.embed_dim)
                e[blk.start + k] = 1.0
                cols.append(e)
            continue
        n = x[blk] / np.linalg.norm(x[blk])
        chosen: list[np.ndarray] = []
        for k in range(size):
            w = -n[k] * n
            w[k] += 1.0
            for c in chosen:
                w -= (c @ w) * c
            nw = np.linalg.norm(w)
            if nw > 1e-8:
                chosen.append(w / nw)
            if len(chosen) == m:
                break
        for c in chosen:
            e = np.zeros(space.embed_dim)
            e[blk] = c
            cols.append(e)
    return orthonormalize(cols)


def product_structure_at(space: ProductSpaceForm, x) -> np.ndarray:
    """``F`` on ``T_x M`` expressed in :func:`adapted_frame`."""
    B = adapted_frame(space, x)
    return B.T @ space.product_operator() @ B


def metallic_structure_at(space: ProductSpaceForm, x) -> np.ndarray:
    """``phi`` on ``T_x M`` expressed in :func:`adapted_frame`."""
    B = adapted_frame(space, x)
    return B.T @ space.metallic_operator() @ B


def _product_vectors(space, X, Y, Z):
    F = space.product_operator()
    FX, FY = F @ X, F @ Y
    gYZ = np.sum(Y * Z, axis=0)
    gXZ = np.sum(X * Z, axis=0)
    gFYZ = np.sum(FY * Z, axis=0)
    gFXZ = np.sum(FX * Z, axis=0)
    plus = gYZ * X - gXZ * Y + gFYZ * FX - gFXZ * FY
    minus = gFYZ * X - gFXZ * Y + gYZ * FX - gXZ * FY
    return 0.25 * (space.c1 + space.c2) * plus + 0.25 * (space.c1 - space.c2) * minus


def _metallic_vectors(space, X, Y, Z, sign):
    prm = space.params
    p, a = prm.p, prm.alpha
    phi = space.metallic_operator()
    PX, PY = phi @ X, phi @ Y
    gYZ = np.sum(Y * Z, axis=0)
    gXZ = np.sum(X * Z, axis=0)
    gPYZ = np.sum(PY * Z, axis=0)
    gPXZ = np.sum(PX * Z, axis=0)
    first = ((a * a + p * p) * (gYZ * X - gXZ * Y)
             + 4.0 * (gPYZ * PX - gPXZ * PY)
             + 2.0 * p * (gPXZ * Y + gXZ * PY - gPYZ * X - gYZ * PX))
    second = gPYZ * X + gYZ * PX - gPXZ * Y - gXZ * PY + p * (gXZ * Y - gYZ * X)
    return ((space.c1 + space.c2) / (4 * a * a)) * first + sign * ((space.c1 - space.c2) / (2 * a)) * second


def _common_base(X: AmbientTangent, Y: AmbientTangent, Z: AmbientTangent) -> np.ndarray:
    base = np.asarray(X.base, dtype=float)
    for other in (Y, Z):
        if np.max(np.abs(np.asarray(other.base, dtype=float) - base)) > 1e-12 * max(1.0, np.max(np.abs(base))):
            raise ArgumentError("tangent vectors have different base points")
    return base


def ambient_curvature_product(space: ProductSpaceForm, X: AmbientTangent, Y: AmbientTangent,
                              Z: AmbientTangent) -> AmbientTangent:
    """``R(X, Y) Z`` from the locally-product closed form in ``F``."""
    base = _common_base(X, Y, Z)
    v = _product_vectors(space, *(np.asarray(t.vec, dtype=float)[:, None] for t in (X, Y, Z)))
    return AmbientTangent(base, v[:, 0])


def ambient_curvature_metallic(space: ProductSpaceForm, X: AmbientTangent, Y: AmbientTangent,
                               Z: AmbientTangent, sign=None) -> AmbientTangent:
    """``R(X, Y) Z`` from the closed form in ``phi``; ``sign`` defaults to ``space.curv_sign``."""
    base = _common_base(X, Y, Z)
    s = space.curv_sign if sign is None else parse_sign(sign)
    v = _metallic_vectors(space, *(np.asarray(t.vec, dtype=float)[:, None] for t in (X, Y, Z)), s)
    return AmbientTangent(base, v[:, 0])


def curvature_tensor(space: ProductSpaceForm, frame, form: str = "metallic", sign=None) -> np.ndarray:
    """``R[a, b, c, d] = g(R(v_a, v_b) v_c, v_d)`` for the columns ``v`` of ``frame``."""
    V = np.asarray(frame, dtype=float)
    G = V.T @ V
    c1, c2 = space.c1, space.c2
    if form == "product":
        Fm = V.T @ space.product_operator() @ V
        plus = (np.einsum("bc,ad->abcd", G, G) - np.einsum("ac,bd->abcd", G, G)
                + np.einsum("bc,ad->abcd", Fm, Fm) - np.einsum("ac,bd->abcd", Fm, Fm))
        minus = (np.einsum("bc,ad->abcd", Fm, G) - np.einsum("ac,bd->abcd", Fm, G)
                 + np.einsum("bc,ad->abcd", G, Fm) - np.einsum("ac,bd->abcd", G, Fm))
        return 0.25 * (c1 + c2) * plus + 0.25 * (c1 - c2) * minus
    if form != "metallic":
        raise ArgumentError(f"unknown curvature form {form!r}")
    s = space.curv_sign if sign is None else parse_sign(sign)
    p, a = space.params.p, space.params.alpha
    Ph = V.T @ space.metallic_operator() @ V
    gg = np.einsum("bc,ad->abcd", G, G) - np.einsum("ac,bd->abcd", G, G)
    pp = np.einsum("bc,ad->abcd", Ph, Ph) - np.einsum("ac,bd->abcd", Ph, Ph)
    mix = (np.einsum("ac,bd->abcd", Ph, G) + np.einsum("ac,bd->abcd", G, Ph)
           - np.einsum("bc,ad->abcd", Ph, G) - np.einsum("bc,ad->abcd", G, Ph))
    first = (a * a + p * p) * gg + 4.0 * pp + 2.0 * p * mix
    second = -mix - p * gg
    return ((c1 + c2) / (4 * a * a)) * first + s * ((c1 - c2) / (2 * a)) * second
