"""Immersions given by coordinate expressions, and their per-point geometry.

An immersion ``f: U -> R^E`` lists one expression per realization coordinate
of the ambient space.  At a parameter point ``u`` we build an orthonormal
tangent frame, complete it by a normal frame inside ``T_x M``, and read the
second fundamental form off the second derivatives of ``f``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from .algebra import orthonormalize
from .ambient import ProductSpaceForm, curvature_tensor, tangent_projector
from .errors import (
    ArgumentError,
    ConstraintError,
    ImmersionDegenerateError,
)
from .expr import Node, evaluate, free_names, parse_immersion
from .jet import Jet

MAX_METRIC_COND = 1e8
CONSTRAINT_TOL = 1e-8
NORMAL_PIVOT = 1e-8


@dataclass(frozen=True)
class ImmersionSpec:
    space: ProductSpaceForm
    n: int
    coords: tuple[Node, ...]
    constants: Mapping[str, float] = field(default_factory=dict)
    sources: tuple[str, ...] | None = None


def make_immersion(space: ProductSpaceForm, n: int, coords: Sequence[str] | str,
                   constants: Mapping[str, float] | None = None) -> ImmersionSpec:
    """Parse coordinate expressions and check them against ``space``."""
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
        raise ArgumentError(f"n must be a positive integer, got {n!r}")
    if n >= space.dim:
        raise ArgumentError(f"submanifold dimension {n} must be below ambient dimension {space.dim}")
    constants = {k: float(v) for k, v in (constants or {}).items()}
    asts = parse_immersion(coords, n, constants)
    if len(asts) != space.embed_dim:
        raise ArgumentError(f"got {len(asts)} coordinate expressions, space needs {space.embed_dim}")
    sources = tuple(coords.splitlines()) if isinstance(coords, str) else tuple(coords)
    return ImmersionSpec(space, int(n), tuple(asts), constants, sources)


def jet2(spec: ImmersionSpec, u) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Value ``(E,)``, first partials ``(E, n)`` and second partials ``(E, n, n)``.

    ``u`` may also be batched with shape ``(B, n)``; outputs then gain a
    leading batch axis.
    """
    u = np.asarray(u, dtype=float)
    if u.shape[-1] != spec.n:
        raise ArgumentError(f"parameter point has {u.shape[-1]} entries, expected {spec.n}")
    vars_ = Jet.variables(u)
    like = vars_[0]
    vals, grads, hesses = [], [], []
    for node in spec.coords:
        r = evaluate(node, vars_, spec.constants)
        if not isinstance(r, Jet):
            r = like._lift(r)
        vals.append(r.val)
        grads.append(r.grad)
        hesses.append(r.hess)
    axis = u.ndim - 1
    val = np.stack(vals, axis=axis)
    grad = np.stack(grads, axis=axis)
    hess = np.stack(hesses, axis=axis)
    hess = 0.5 * (hess + np.swapaxes(hess, -1, -2))
    return val, grad, hess


def induced_metric(spec: ImmersionSpec, U) -> np.ndarray:
    """``g = J^T J`` at one or many parameter points."""
    _, J, _ = jet2(spec, U)
    return np.swapaxes(J, -1, -2) @ J


def _check_constraint(space: ProductSpaceForm, x: np.ndarray, J: np.ndarray):
    for i, (blk, r) in enumerate(zip(space.blocks, space.realization), start=1):
        if not r.is_sphere:
            continue
        dev = abs(np.linalg.norm(x[blk]) - r.radius) / r.radius
        if dev > CONSTRAINT_TOL:
            raise ConstraintError(f"immersion leaves the factor-{i} sphere (relative deviation {dev:.2e})")
        scale = r.radius * max(1.0, float(np.max(np.abs(J[blk]))))
        tang = float(np.max(np.abs(x[blk] @ J[blk]))) / scale
        if tang > CONSTRAINT_TOL:
            raise ConstraintError(f"coordinate curves are not tangent to the factor-{i} sphere ({tang:.2e})")


@dataclass(frozen=True)
class PointData:
    """Geometry of an immersion at one parameter point.

    ``h[r, i, j]`` is the second fundamental form in the tangent frame
    (columns of ``tangent_frame``) and normal frame (columns of
    ``normal_frame``); the shape operator of the r-th normal is ``h[r]``.
    """

    space: ProductSpaceForm
    u: np.ndarray
    x: np.ndarray
    tangent_frame: np.ndarray
    normal_frame: np.ndarray
    h: np.ndarray
    metric: np.ndarray
    metric_cond: float
    coframe: np.ndarray = field(repr=False)  # C with tangent_frame = J @ C

    @property
    def n(self) -> int:
        return self.tangent_frame.shape[1]

    @property
    def codim(self) -> int:
        return self.normal_frame.shape[1]

    @property
    def shape_ops(self) -> np.ndarray:
        return self.h

    @property
    def mean_curvature(self) -> np.ndarray:
        """Components of ``H`` in the normal frame."""
        return np.trace(self.h, axis1=1, axis2=2) / self.n

    @property
    def H_sq(self) -> float:
        return float(np.sum(self.mean_curvature**2))

    @property
    def h_sq(self) -> float:
        return float(np.sum(self.h**2))

    def ambient_tensor(self, sign=None) -> np.ndarray:
        """``R~(e_i, e_j, e_k, e_l)`` on the tangent frame."""
        if sign is None:
            return self._ambient_default
        return curvature_tensor(self.space, self.tangent_frame, "metallic", sign)

    @cached_property
    def _ambient_default(self) -> np.ndarray:
        return curvature_tensor(self.space, self.tangent_frame, "metallic")

    def gauss_tensor(self, sign=None) -> np.ndarray:
        """Intrinsic ``R(e_i, e_j, e_k, e_l)`` via the Gauss equation."""
        h = self.h
        ext = np.einsum("ril,rjk->ijkl", h, h) - np.einsum("rik,rjl->ijkl", h, h)
        return self.ambient_tensor(sign) + ext

    @cached_property
    def curvature(self) -> np.ndarray:
        return self.gauss_tensor()

    @cached_property
    def phi_blocks(self) -> "PhiDecomposition":
        return phi_decompose(self)

    def remix(self, Qt, Qn=None) -> "PointData":
        """Same point with tangent frame ``E @ Qt`` and normal frame ``N @ Qn``."""
        Qt = np.asarray(Qt, dtype=float)
        Qn = np.eye(self.codim) if Qn is None else np.asarray(Qn, dtype=float)
        h = np.einsum("sr,ai,bj,sab->rij", Qn, Qt, Qt, self.h)
        h = 0.5 * (h + np.swapaxes(h, 1, 2))
        return PointData(self.space, self.u, self.x, self.tangent_frame @ Qt,
                         self.normal_frame @ Qn, h, Qt.T @ self.metric @ Qt,
                         self.metric_cond, self.coframe @ Qt)


def _normal_frame(space: ProductSpaceForm, x: np.ndarray, E: np.ndarray) -> np.ndarray:
    P = tangent_projector(space, x)
    want = space.dim - E.shape[1]
    chosen: list[np.ndarray] = []
    basis = [E[:, i] for i in range(E.shape[1])]
    for k in range(space.embed_dim):
        if len(chosen) == want:
            break
        w = P[:, k].copy()
        for _ in range(2):
            for b in basis + chosen:
                w -= (b @ w) * b
        nw = np.linalg.norm(w)
        if nw > NORMAL_PIVOT:
            chosen.append(w / nw)
    if len(chosen) != want:
        raise ImmersionDegenerateError("could not complete the normal frame")
    return np.column_stack(chosen) if chosen else np.zeros((space.embed_dim, 0))


def point_data(spec: ImmersionSpec, u) -> PointData:
    """Frames, induced metric and second fundamental form at ``u``."""
    u = np.asarray(u, dtype=float).reshape(spec.n)
    x, J, D2 = jet2(spec, u)
    space = spec.space
    _check_constraint(space, x, J)
    G = J.T @ J
    cond = float(np.linalg.cond(G)) if np.all(np.isfinite(G)) else np.inf
    if not np.isfinite(cond) or cond > MAX_METRIC_COND:
        raise ImmersionDegenerateError(f"induced metric condition number {cond:.3e} exceeds {MAX_METRIC_COND:.0e}")
    Qr, R = np.linalg.qr(J)
    s = np.sign(np.diag(R))
    s[s == 0] = 1.0
    R = s[:, None] * R
    C = np.linalg.inv(R)
    E = J @ C
    N = _normal_frame(space, x, E)
    S = np.einsum("eab,ai,bj->eij", D2, C, C)
    h = np.einsum("er,eij->rij", N, S)
    h = 0.5 * (h + np.swapaxes(h, 1, 2))
    return PointData(space, u, x, E, N, h, G, cond, C)


def normal_curvature(pd: PointData, sign=None) -> np.ndarray:
    """``g(R_perp(e_i, e_j) e_t, e_s)`` with shape ``(n, n, codim, codim)``."""
    n = pd.n
    frame = np.hstack([pd.tangent_frame, pd.normal_frame])
    Rt = curvature_tensor(pd.space, frame, "metallic", sign)[:n, :n, n:, n:]
    A = pd.h
    comm = np.einsum("tab,sbc->tsac", A, A) - np.einsum("sab,tbc->tsac", A, A)
    # g([A_t, A_s] e_i, e_j) = (A_t A_s - A_s A_t)_{ji}
    return Rt + np.einsum("tsji->ijts", comm)


@dataclass(frozen=True)
class PhiDecomposition:
    T: np.ndarray
    Nmat: np.ndarray
    t: np.ndarray
    nmat: np.ndarray

    def assemble(self) -> np.ndarray:
        return np.block([[self.T, self.t], [self.Nmat, self.nmat]])


def phi_decompose(pd: PointData) -> PhiDecomposition:
    """Blocks of ``phi`` in the combined (tangent, normal) frame."""
    n = pd.n
    frame = np.hstack([pd.tangent_frame, pd.normal_frame])
    M = frame.T @ pd.space.metallic_operator() @ frame
    return PhiDecomposition(M[:n, :n], M[n:, :n], M[:n, n:], M[n:, n:])


@dataclass(frozen=True)
class SlantData:
    """Slant analysis of ``TN = D1 + D2``; bases are columns in frame coordinates."""

    n: int
    d1: int
    d2: int
    D1_basis: np.ndarray
    D2_basis: np.ndarray
    P1: np.ndarray
    P2: np.ndarray
    cos2_1: float
    cos2_2: float
    theta1: float | None
    theta2: float | None
    angle_dev_1: float
    angle_dev_2: float
    lemma_residual_1: float
    lemma_residual_2: float
    theta1_residual_1: float
    theta1_residual_2: float
    tr_T: float
    tr_TP1: float
    tr_TP2: float
    T: np.ndarray = field(repr=False)
    params_pq: tuple[int, int] = (1, 1)

    ANGLE_TOL = 1e-6
    LEMMA_TOL = 1e-7

    @property
    def vartheta1(self) -> float:
        p, q = self.params_pq
        return self.cos2_1 * (p * self.tr_TP1 + self.d1 * q) if self.d1 else 0.0

    @property
    def vartheta2(self) -> float:
        p, q = self.params_pq
        return self.cos2_2 * (p * self.tr_TP2 + self.d2 * q) if self.d2 else 0.0

    def is_slant(self, i: int) -> bool:
        d = (self.d1, self.d2)[i - 1]
        if d == 0:
            return True
        dev = (self.angle_dev_1, self.angle_dev_2)[i - 1]
        res = (self.lemma_residual_1, self.lemma_residual_2)[i - 1]
        return dev <= self.ANGLE_TOL and res <= self.LEMMA_TOL

    @property
    def is_bislant(self) -> bool:
        return self.is_slant(1) and self.is_slant(2)


def _as_frame_basis(pd: PointData, B, coords: str) -> np.ndarray:
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.size == 0:
        return np.zeros((pd.n, 0))
    if coords == "u":
        if B.shape[1] != pd.n:
            raise ArgumentError(f"distribution vectors need {pd.n} u-components")
        R = np.linalg.inv(pd.coframe)
        return R @ B.T
    if coords == "frame":
        return B.T
    raise ArgumentError(f"unknown coordinate system {coords!r}")


def _orth_columns(B: np.ndarray) -> np.ndarray:
    if B.shape[1] == 0:
        return B
    return orthonormalize([B[:, i] for i in range(B.shape[1])])


def slant_analysis(pd: PointData, D1=None, D2=None, coords: str = "u") -> SlantData:
    """Slant angles, Lemma residuals and trace data for ``TN = D1 + D2``.

    ``D1``/``D2`` are lists of tangent vectors given by their components in
    ``u``-coordinates (``coords='u'``) or in the tangent frame
    (``coords='frame'``).  With both omitted, ``D1 = TN`` and ``D2 = 0``; with
    only ``D1`` given, ``D2`` is its orthogonal complement.
    """
    n = pd.n
    prm = pd.space.params
    p, q = prm.p, prm.q
    T = pd.phi_blocks.T
    T = 0.5 * (T + T.T)
    if D1 is None and D2 is None:
        B1, B2 = np.eye(n), np.zeros((n, 0))
    else:
        B1 = _orth_columns(_as_frame_basis(pd, D1 if D1 is not None else [], coords))
        if D2 is None:
            P = np.eye(n) - B1 @ B1.T
            w, V = np.linalg.eigh(P)
            B2 = V[:, w > 0.5]
        else:
            B2 = _orth_columns(_as_frame_basis(pd, D2, coords))
        if B1.shape[1] + B2.shape[1] != n:
            raise ArgumentError(f"distribution dimensions {B1.shape[1]}+{B2.shape[1]} do not add up to n={n}")
        if B1.shape[1] and B2.shape[1] and np.max(np.abs(B1.T @ B2)) > 1e-8:
            raise ArgumentError("distributions D1 and D2 are not orthogonal")
    P1, P2 = B1 @ B1.T, B2 @ B2.T
    M = p * T + q * np.eye(n)
    out = {}
    for i, (B, P) in enumerate(((B1, P1), (B2, P2)), start=1):
        d = B.shape[1]
        if d == 0:
            out[i] = (0.0, None, 0.0, 0.0, 0.0)
            continue
        num = B.T @ T @ T @ B
        den = B.T @ M @ B
        c2 = float(np.trace(num) / np.trace(den))
        # per-direction cos^2 range from the pencil (num, den); den is SPD
        Lc = np.linalg.cholesky(den)
        Li = np.linalg.inv(Lc)
        lam = np.clip(np.linalg.eigvalsh(Li @ num @ Li.T), 0.0, 1.0)
        angles = np.arccos(np.sqrt(lam))
        dev = float(angles.max() - angles.min())
        theta = float(np.arccos(np.sqrt(min(max(c2, 0.0), 1.0))))
        PT = P @ T
        lemma = (PT @ PT @ B) - c2 * (p * PT @ B + q * B)
        lemma_res = float(np.max(np.linalg.norm(lemma, axis=0)))
        TB = T @ B
        th1 = np.sum(TB * TB, axis=0) - c2 * (p * np.sum(TB * B, axis=0) + q * np.sum(B * B, axis=0))
        out[i] = (c2, theta, dev, lemma_res, float(np.max(np.abs(th1))))
    return SlantData(
        n=n, d1=B1.shape[1], d2=B2.shape[1], D1_basis=B1, D2_basis=B2, P1=P1, P2=P2,
        cos2_1=out[1][0], cos2_2=out[2][0], theta1=out[1][1], theta2=out[2][1],
        angle_dev_1=out[1][2], angle_dev_2=out[2][2],
        lemma_residual_1=out[1][3], lemma_residual_2=out[2][3],
        theta1_residual_1=out[1][4], theta1_residual_2=out[2][4],
        tr_T=float(np.trace(T)), tr_TP1=float(np.trace(T @ P1)), tr_TP2=float(np.trace(T @ P2)),
        T=T, params_pq=(p, q),
    )


def intrinsic_curvature(spec: ImmersionSpec, u, step: float = 1e-4) -> np.ndarray:
    """``R(d_a, d_b, d_c, d_d)`` in coordinates, from finite differences of the metric.

    Test oracle for the Gauss equation: Christoffel symbols use central
    differences of ``g = J^T J`` and their derivatives central differences of
    the symbols, both with the same step.
    """
    u = np.asarray(u, dtype=float)
    n = spec.n
    I = np.eye(n)

    def christoffel(points):
        pts = np.concatenate([points[:, None, :] + step * I[None], points[:, None, :] - step * I[None]], axis=1)
        g = induced_metric(spec, pts.reshape(-1, n)).reshape(points.shape[0], 2 * n, n, n)
        dg = (g[:, :n] - g[:, n:]) / (2 * step)  # dg[k, a, b] = d_k g_ab
        g0 = induced_metric(spec, points)
        ginv = np.linalg.inv(g0)
        low = 0.5 * (np.einsum("pbdc->pdbc", dg) + np.einsum("pcdb->pdbc", dg) - dg)
        # low[p, d, b, c] = Gamma_{d, bc}; raise the first index
        return np.einsum("pad,pdbc->pabc", ginv, low), g0

    centre = u[None]
    shifted = np.concatenate([u + step * I, u - step * I])
    Gs, _ = christoffel(shifted)
    G0, g0 = christoffel(centre)
    dG = (Gs[:n] - Gs[n:]) / (2 * step)  # dG[k, a, b, c] = d_k Gamma^a_bc
    Gm = G0[0]
    # R^a_{bcd} = d_c G^a_db - d_d G^a_cb + G^a_ce G^e_db - G^a_de G^e_cb
    Rup = (np.einsum("cadb->abcd", dG) - np.einsum("dacb->abcd", dG)
           + np.einsum("ace,edb->abcd", Gm, Gm) - np.einsum("ade,ecb->abcd", Gm, Gm))
    # R(d_c, d_d) d_b = R^a_bcd d_a, so R(X=c, Y=d, Z=b, W=w) = g_wa R^a_bcd
    return np.einsum("wa,abcd->cdbw", g0[0], Rup)


def intrinsic_frame_curvature(spec: ImmersionSpec, pd: PointData, step: float = 1e-4) -> np.ndarray:
    """:func:`intrinsic_curvature` expressed in the tangent frame of ``pd``."""
    Rc = intrinsic_curvature(spec, pd.u, step)
    C = pd.coframe
    return np.einsum("abcd,ai,bj,ck,dl->ijkl", Rc, C, C, C, C)


def intrinsic_normal_curvature(spec: ImmersionSpec, pd: PointData, step: float = 1e-4) -> np.ndarray:
    """``g(R_perp(e_i, e_j) xi_t, xi_s)`` from finite differences of the normal connection.

    Test oracle for the Ricci equation.  The connection form
    ``w_a[t, s] = <d_a xi_t, xi_s>`` of the deterministic normal frame field
    is differentiated numerically and ``dw + [w, w]`` is moved to the
    tangent frame of ``pd``.
    """
    u = np.asarray(pd.u, dtype=float)
    n = spec.n
    I = np.eye(n) * step

    def omega(v):
        N = point_data(spec, v).normal_frame
        return np.stack([(point_data(spec, v + I[a]).normal_frame
                          - point_data(spec, v - I[a]).normal_frame).T @ N for a in range(n)]) / (2 * step)

    w0 = omega(u)
    dw = np.stack([(omega(u + I[b]) - omega(u - I[b])) / (2 * step) for b in range(n)])  # dw[b, a] = d_b w_a
    Om = (np.einsum("abts->abts", dw) - np.einsum("bats->abts", dw)
          - (np.einsum("atr,brs->abts", w0, w0) - np.einsum("btr,ars->abts", w0, w0)))
    C = pd.coframe
    return np.einsum("abts,ai,bj->ijts", Om, C, C)
