"""Scalar curvature invariants of a submanifold at a point.

Intrinsic quantities use the Gauss-equation curvature ``R[i, j, k, l] =
g(R(e_i, e_j) e_k, e_l)`` of :class:`~metallic_geo.immersion.PointData`, so
that ``K(e_i ^ e_j) = R[i, j, j, i]``.  Optimized invariants (``delta_C``,
Chen's ``delta``, ``Omega_k``) are computed by the grouped-frame search in
:mod:`metallic_geo.optimize` and carry a :class:`Certificate`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import ArgumentError
from .immersion import PointData, normal_curvature
from .optimize import Certificate, complete_frames, minimize_frames, sphere_grid

GRID_CHECK_MAX_N = 4
GRID_POINTS = 10_000


@dataclass(frozen=True)
class CurvatureInvariants:
    tau: float
    rho: float
    rho_perp: float
    H_sq: float
    h_sq: float
    C: float

    def to_dict(self) -> dict:
        return {"tau": self.tau, "rho": self.rho, "rho_perp": self.rho_perp,
                "H_sq": self.H_sq, "h_sq": self.h_sq, "casorati": self.C}


def scalar_curvature(pd: PointData, sign=None) -> float:
    R = pd.curvature if sign is None else pd.gauss_tensor(sign)
    n = pd.n
    return float(sum(R[i, j, j, i] for i in range(n) for j in range(i + 1, n)))


def normalized_scalar_curvature(pd: PointData, sign=None) -> float:
    n = pd.n
    if n < 2:
        raise ArgumentError("normalized scalar curvature needs n >= 2")
    return 2.0 * scalar_curvature(pd, sign) / (n * (n - 1))


def normal_scalar_curvature(pd: PointData, sign=None) -> float:
    n = pd.n
    if n < 2:
        raise ArgumentError("normal scalar curvature needs n >= 2")
    if pd.codim < 2:
        return 0.0
    Rp = normal_curvature(pd, sign)
    iu, ju = np.triu_indices(n, 1)
    tu, su = np.triu_indices(pd.codim, 1)
    block = Rp[iu, ju][:, tu, su]
    return float(2.0 / (n * (n - 1)) * np.sqrt(np.sum(block**2)))


def extrinsic_normal_scalar_curvature(pd: PointData) -> float:
    """``rho_perp`` from the shape-operator commutators alone (ambient normal curvature dropped)."""
    n = pd.n
    if n < 2 or pd.codim < 2:
        return 0.0
    A = pd.h
    tu, su = np.triu_indices(pd.codim, 1)
    K = A[tu] @ A[su] - A[su] @ A[tu]
    iu, ju = np.triu_indices(n, 1)
    return float(2.0 / (n * (n - 1)) * np.sqrt(np.sum(K[:, iu, ju] ** 2)))


def sectional_curvature(pd: PointData, X, Y) -> float:
    """``K(X ^ Y)`` for tangent vectors given in frame coordinates."""
    X, Y = np.asarray(X, dtype=float), np.asarray(Y, dtype=float)
    num = np.einsum("ijkl,i,j,k,l->", pd.curvature, X, Y, Y, X)
    den = (X @ X) * (Y @ Y) - (X @ Y) ** 2
    if den <= 1e-14:
        raise ArgumentError("X and Y do not span a plane")
    return float(num / den)


def casorati(pd: PointData) -> float:
    return pd.h_sq / pd.n


def curvature_invariants(pd: PointData, sign=None) -> CurvatureInvariants:
    n = pd.n
    tau = scalar_curvature(pd, sign)
    rho = 2.0 * tau / (n * (n - 1)) if n >= 2 else float("nan")
    rp = normal_scalar_curvature(pd, sign) if n >= 2 else float("nan")
    return CurvatureInvariants(tau, rho, rp, pd.H_sq, pd.h_sq, casorati(pd))


# --- Casorati curvature of hyperplanes -------------------------------------

def _casorati_w(h: np.ndarray, W: np.ndarray) -> np.ndarray:
    """``C(w^perp)`` for unit conormals ``W`` of shape ``(..., n)``."""
    n = h.shape[-1]
    total = np.sum(h**2)
    Aw = np.einsum("rij,...j->...ri", h, W)
    wAw = np.einsum("...ri,...i->...r", Aw, W)
    return (total - 2.0 * np.sum(Aw**2, axis=(-2, -1)) + np.sum(wAw**2, axis=-1)) / (n - 1)


def casorati_hyperplane(pd: PointData, w) -> float:
    """``C(W)`` for the hyperplane ``W`` with conormal ``w`` (frame coordinates)."""
    w = np.asarray(w, dtype=float)
    nw = np.linalg.norm(w)
    if pd.n < 2:
        raise ArgumentError("hyperplanes need n >= 2")
    if nw == 0.0:
        raise ArgumentError("zero conormal")
    return float(_casorati_w(pd.h, w / nw))


def a_of_u(n: int, u: float) -> float:
    return (n - 1) * (u + n) * (n * n - n - u) / (n * u)


@dataclass(frozen=True)
class CasoratiData:
    u: float
    a_u: float
    C: float
    C_W_inf: float
    C_W_sup: float
    delta_C: float | None
    delta_C_hat: float | None
    argmin_W: np.ndarray
    argmax_W: np.ndarray
    certificates: dict = field(default_factory=dict, repr=False)

    @property
    def value(self) -> float:
        return self.delta_C if self.delta_C is not None else self.delta_C_hat


def _grid_refined(objective, n, groups, maximize, seed, restarts, cert, grid_frames):
    """Cross-check ``cert`` against a grid; if the grid wins, refine from it."""
    vals = objective(grid_frames)
    k = int(np.argmax(vals) if maximize else np.argmin(vals))
    gv = float(vals[k])
    gap = (gv - cert.value) if maximize else (cert.value - gv)
    info = {"grid_value": gv, "grid_points": int(len(vals))}
    if gap > 1e-10:
        c2 = minimize_frames(objective, n, groups, restarts=0, seed=seed,
                             seeds=np.concatenate([grid_frames[k:k + 1], cert.frame[None]]),
                             maximize=maximize)
        better = c2.value > cert.value if maximize else c2.value < cert.value
        if better:
            cert = Certificate(c2.value, c2.frame, cert.agreeing, cert.restarts, cert.sweeps)
        info["refined_from_grid"] = True
    return cert, info


def delta_casorati(pd: PointData, u: float, *, restarts: int = 64, seed: int = 0) -> CasoratiData:
    """Generalized normalized delta-Casorati curvature for the given ``u``."""
    n = pd.n
    if n < 2:
        raise ArgumentError("delta-Casorati curvature needs n >= 2")
    if not (u > 0) or abs(u - n * (n - 1)) < 1e-12:
        raise ArgumentError(f"u must be positive and different from n(n-1)={n * (n - 1)}, got {u}")
    h = pd.h
    groups = [1, n - 1]

    def obj(Q):
        return _casorati_w(h, Q[..., :, 0])

    certs = {}
    lo = minimize_frames(obj, n, groups, restarts=restarts, seed=seed)
    hi = minimize_frames(obj, n, groups, restarts=restarts, seed=seed + 1, maximize=True)
    if n <= GRID_CHECK_MAX_N:
        frames = complete_frames(sphere_grid(n, GRID_POINTS, seed))
        lo, certs["inf_grid"] = _grid_refined(obj, n, groups, False, seed, restarts, lo, frames)
        hi, certs["sup_grid"] = _grid_refined(obj, n, groups, True, seed + 1, restarts, hi, frames)
    certs["inf"], certs["sup"] = lo.to_dict(), hi.to_dict()
    C = casorati(pd)
    a = a_of_u(n, u)
    below = u < n * (n - 1)
    return CasoratiData(
        u=float(u), a_u=a, C=C, C_W_inf=lo.value, C_W_sup=hi.value,
        delta_C=u * C + a * lo.value if below else None,
        delta_C_hat=None if below else u * C + a * hi.value,
        argmin_W=lo.frame[:, 0], argmax_W=hi.frame[:, 0], certificates=certs,
    )


# --- Chen delta invariants --------------------------------------------------

def chen_constants(n: int, tup) -> tuple[float, float, float]:
    """``b, c, d`` of the delta-invariant inequality."""
    k = len(tup)
    s = sum(tup)
    b = 0.5 * (n * (n - 1) - sum(m * (m - 1) for m in tup))
    c = n * n * (n + k - 1 - s) / (2.0 * (n + k - s))
    d = (n - 1) - sum(m - 1 for m in tup)
    return b, c, float(d)


def validate_tuple(n: int, tup) -> tuple[int, ...]:
    tup = tuple(int(m) for m in tup)
    if not tup:
        raise ArgumentError("empty tuple")
    if any(m < 2 or m > n - 1 for m in tup) or sum(tup) > n:
        raise ArgumentError(f"tuple {tup} is not in S({n}): need 2 <= n_j <= n-1 and sum <= n")
    return tup


def admissible_tuples(n: int) -> list[tuple[int, ...]]:
    """All non-increasing tuples in ``S(n)``."""
    out = []

    def rec(prefix, remaining, cap):
        if prefix:
            out.append(tuple(prefix))
        for m in range(min(cap, remaining, n - 1), 1, -1):
            rec(prefix + [m], remaining - m, m)

    rec([], n, n - 1)
    return sorted(out)


def subspace_scalar_curvature(R: np.ndarray, P: np.ndarray) -> np.ndarray:
    """``tau(L) = 1/2 R_ijkl P_il P_jk`` for projectors ``P`` (batched)."""
    return 0.5 * np.einsum("ijkl,...il,...jk->...", R, P, P)


def _partition_objective(R, tup):
    bounds = np.cumsum((0,) + tup)

    def obj(Q):
        total = 0.0
        for a, b in zip(bounds[:-1], bounds[1:]):
            F = Q[..., :, a:b]
            P = F @ np.swapaxes(F, -1, -2)
            total = total + subspace_scalar_curvature(R, P)
        return total

    return obj


def _coordinate_seeds(n: int, tup, limit: int = 720) -> np.ndarray:
    seen, frames = set(), []
    bounds = np.cumsum((0,) + tup)
    for perm in itertools.permutations(range(n)):
        key = tuple(frozenset(perm[a:b]) for a, b in zip(bounds[:-1], bounds[1:]))
        if key in seen:
            continue
        seen.add(key)
        frames.append(np.eye(n)[:, list(perm)])
        if len(frames) >= limit:
            break
    return np.array(frames)


@dataclass(frozen=True)
class ChenDeltaData:
    tuple: tuple[int, ...]
    tau: float
    delta: float
    delta_hat: float
    inf_sum: float
    sup_sum: float
    b: float
    c: float
    d: float
    argmin_frame: np.ndarray
    argmax_frame: np.ndarray
    certificates: dict = field(default_factory=dict, repr=False)


def chen_delta(pd: PointData, tup, *, restarts: int = 64, seed: int = 0, sign=None) -> ChenDeltaData:
    """``delta(n_1..n_k) = tau - inf sum tau(L_j)`` and its sup counterpart."""
    n = pd.n
    tup = validate_tuple(n, tup)
    R = pd.curvature if sign is None else pd.gauss_tensor(sign)
    groups = list(tup) + ([n - sum(tup)] if sum(tup) < n else [])
    obj = _partition_objective(R, tup)
    seeds = _coordinate_seeds(n, tup)
    lo = minimize_frames(obj, n, groups, restarts=restarts, seed=seed, seeds=seeds)
    hi = minimize_frames(obj, n, groups, restarts=restarts, seed=seed + 1, seeds=seeds, maximize=True)
    tau = scalar_curvature(pd, sign)
    b, c, d = chen_constants(n, tup)
    return ChenDeltaData(tup, tau, tau - lo.value, tau - hi.value, lo.value, hi.value, b, c, d,
                         lo.frame, hi.frame, {"inf": lo.to_dict(), "sup": hi.to_dict()})


# --- Omega_k -----------------------------------------------------------------

def partial_ricci(R: np.ndarray, X: np.ndarray, F: np.ndarray) -> np.ndarray:
    """``Ric_L(X) = sum_j K(X ^ f_j)`` for orthonormal ``f_j`` (columns of F) orthogonal to X."""
    P = F @ np.swapaxes(F, -1, -2)
    return np.einsum("ijkl,...i,...l,...jk->...", R, X, X, P)


@dataclass(frozen=True)
class OmegaData:
    k: int
    omega_k: float
    argmin_X: np.ndarray
    argmin_plane: np.ndarray
    certificates: dict = field(default_factory=dict, repr=False)


def ky_fan_omega(R: np.ndarray, k: int, X: np.ndarray) -> np.ndarray:
    """For unit rows of ``X``: min over k-planes through X of Ric_L(X), by Ky Fan."""
    frames = complete_frames(X)
    B = frames[:, :, 1:]
    S = np.einsum("ijkl,pi,pl->pjk", R, X, X)
    S = 0.5 * (S + np.swapaxes(S, 1, 2))
    ev = np.linalg.eigvalsh(np.swapaxes(B, 1, 2) @ S @ B)
    return np.sum(ev[:, : k - 1], axis=1)


def omega_k(pd: PointData, k: int, *, restarts: int = 64, seed: int = 0, sign=None) -> OmegaData:
    n = pd.n
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not (2 <= k <= n):
        raise ArgumentError(f"k must be an integer with 2 <= k <= n={n}, got {k!r}")
    R = pd.curvature if sign is None else pd.gauss_tensor(sign)
    groups = [1, k - 1] + ([n - k] if k < n else [])

    def obj(Q):
        return partial_ricci(R, Q[..., :, 0], Q[..., :, 1:k])

    cert = minimize_frames(obj, n, groups, restarts=restarts, seed=seed)
    certs = {"inf": cert.to_dict()}
    if n <= GRID_CHECK_MAX_N:
        X = sphere_grid(n, GRID_POINTS, seed)
        kf = ky_fan_omega(R, k, X)
        j = int(np.argmin(kf))
        certs["ky_fan_grid"] = {"grid_value": float(kf[j]), "grid_points": int(len(kf))}
        if kf[j] < cert.value - 1e-10:
            fr = complete_frames(X[j:j + 1])[0]
            S = np.einsum("ijkl,i,l->jk", R, X[j], X[j])
            B = fr[:, 1:]
            w, V = np.linalg.eigh(B.T @ (0.5 * (S + S.T)) @ B)
            seed_frame = np.column_stack([X[j], B @ V])
            c2 = minimize_frames(obj, n, groups, restarts=0, seeds=np.stack([seed_frame, cert.frame]))
            if c2.value < cert.value:
                cert = Certificate(c2.value, c2.frame, cert.agreeing, cert.restarts, cert.sweeps)
            certs["ky_fan_grid"]["refined_from_grid"] = True
    return OmegaData(k, cert.value / (k - 1), cert.frame[:, 0], cert.frame[:, :k], certs)
