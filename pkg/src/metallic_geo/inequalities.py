"""Both sides of the five optimal inequalities, their equality patterns and
the specializations to semi-slant, hemi-slant, semi-invariant and slant
submanifolds.

Closed-form right-hand sides are pure functions of a :class:`Traces` record
and an :class:`AmbientConstants` record, so they can be exercised on random
data.  Two interpretation flags are carried everywhere: the reading of the
squared trace (``"outer"``: ``(tr T)^2``, ``"square"``: ``tr(T^2)``) and the
sign multiplying the ``(c1 - c2)`` terms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import ArgumentError, ClassificationError
from .immersion import PointData, SlantData, slant_analysis
from .invariants import (
    CurvatureInvariants,
    chen_delta,
    curvature_invariants,
    delta_casorati,
    omega_k,
    partial_ricci,
)
from .optimize import minimize_frames

READINGS = ("outer", "square")
THEOREMS = ("wintgen", "chen", "shape_ricci", "mean_scalar", "casorati")
TYPES = ("bi-slant", "semi-slant", "hemi-slant", "semi-invariant", "slant")
SLACK_TOL = 1e-7
EQ_TOL = 1e-8
PATTERN_TOL = 1e-6
TYPE_ANGLE_TOL = 1e-6


@dataclass(frozen=True)
class AmbientConstants:
    n: int
    p: int
    q: int
    alpha: float
    c1: float
    c2: float
    sign: int = 1

    @property
    def cp(self) -> float:
        return self.c1 + self.c2

    @property
    def cm(self) -> float:
        return self.sign * (self.c1 - self.c2)

    @property
    def pq(self) -> float:
        return self.p**2 + 2 * self.q

    @classmethod
    def of(cls, pd: PointData, sign=None) -> "AmbientConstants":
        sp = pd.space
        return cls(pd.n, sp.params.p, sp.params.q, sp.params.alpha, sp.c1, sp.c2,
                   sp.curv_sign if sign is None else int(sign))


@dataclass(frozen=True)
class Traces:
    """Trace data of ``T``; ``tr_T_outer``/``tr_T2`` are the two squared-trace readings."""

    tr_T: float
    tr_T_outer: float
    tr_T2: float
    tr_TP1: float
    tr_TP2: float
    d1: int
    d2: int
    cos2_1: float
    cos2_2: float

    def tr2(self, reading: str) -> float:
        if reading == "outer":
            return self.tr_T_outer
        if reading == "square":
            return self.tr_T2
        raise ArgumentError(f"unknown squared-trace reading {reading!r}")

    def vartheta(self, p: int, q: int) -> tuple[float, float]:
        v1 = self.cos2_1 * (p * self.tr_TP1 + self.d1 * q) if self.d1 else 0.0
        v2 = self.cos2_2 * (p * self.tr_TP2 + self.d2 * q) if self.d2 else 0.0
        return v1, v2

    @classmethod
    def of(cls, slant: SlantData) -> "Traces":
        T = slant.T
        return cls(slant.tr_T, slant.tr_T**2, float(np.trace(T @ T)), slant.tr_TP1, slant.tr_TP2,
                   slant.d1, slant.d2, slant.cos2_1, slant.cos2_2)

    def to_dict(self) -> dict:
        return {"tr_T": self.tr_T, "tr_T_outer": self.tr_T_outer, "tr_T2": self.tr_T2,
                "tr_TP1": self.tr_TP1, "tr_TP2": self.tr_TP2, "d1": self.d1, "d2": self.d2,
                "cos2_1": self.cos2_1, "cos2_2": self.cos2_2}


# --- closed-form pieces -------------------------------------------------------

def ambient_block(k: AmbientConstants, t: Traces, reading: str, theta_block: float | None = None) -> float:
    """The ambient part of ``2 tau`` in the closed form the five right-hand sides are built from.

    ``theta_block`` overrides ``vartheta1 + vartheta2`` (used by the type-specific forms).
    """
    n, p, a = k.n, k.p, k.alpha
    X = t.tr2(reading)
    vt = sum(t.vartheta(p, k.q)) if theta_block is None else theta_block
    return (n * (n - 1) * k.cp / (2 * a * a) * k.pq
            + k.cp / (a * a) * ((n - 1) * (n * X - p * t.tr_T) - vt)
            + (n - 1) * k.cm / (2 * a) * (2 * t.tr_T - n * p))


def direct_ambient_block(k: AmbientConstants, tr_T: float, T_norm_sq: float) -> float:
    """The ambient part of ``2 tau`` summed directly from the curvature form."""
    n, p, a = k.n, k.p, k.alpha
    return (n * (n - 1) * k.cp * k.pq / (2 * a * a)
            + k.cp / (a * a) * (tr_T**2 - T_norm_sq - p * (n - 1) * tr_T)
            + (n - 1) * k.cm / (2 * a) * (2 * tr_T - n * p))


def rhs_wintgen(k, t, reading, rho, rho_perp, theta_block=None) -> float:
    n, p, a = k.n, k.p, k.alpha
    X = t.tr2(reading)
    vt = sum(t.vartheta(p, k.q)) if theta_block is None else theta_block
    return (rho + rho_perp - k.cp / (2 * a * a) * k.pq
            + k.cp / (n * a * a * (n - 1)) * ((n - 1) * (p * t.tr_T - n * X) + vt)
            + k.cm / (2 * n * a) * (n * p - 2 * t.tr_T))


def rhs_chen(k, t, reading, b, c, d, ntuple, H_sq, theta_block=None) -> float:
    p, a = k.p, k.alpha
    X = t.tr2(reading)
    vt = sum(t.vartheta(p, k.q)) if theta_block is None else theta_block
    kk = len(ntuple)
    return (k.cp / (2 * a * a) * (b * (k.pq + 2 * X) - d * p * t.tr_T + (kk - 1) * vt)
            + k.cm / (4 * a) * (2 * t.tr_T * d - p * b) + c * H_sq)


def omega_constants(k: AmbientConstants, t: Traces, reading: str) -> dict:
    n, p, a = k.n, k.p, k.alpha
    w1 = p * (n - 1) * k.cm / (2 * a) - (n - 1) * k.cp * k.pq / (2 * a * a)
    w2 = (n - 1) / (2 * a * a) * (p * k.cp + a * k.cm)
    w3 = (p * k.cp - a * k.cm) / (2 * a * a)
    w = n * w1 + ((n - 1) * w3 - w2) * t.tr_T - n * (n - 1) * k.cp / (a * a) * t.tr2(reading)
    return {"omega": w, "omega1": w1, "omega2": w2, "omega3": w3}


def rhs_shape_ricci(k, t, reading, Omega_k, theta_block=None) -> float:
    n, p, a = k.n, k.p, k.alpha
    vt = sum(t.vartheta(p, k.q)) if theta_block is None else theta_block
    return n * (n - 1) * Omega_k + omega_constants(k, t, reading)["omega"] + k.cp / (a * a) * vt


def rhs_mean_scalar(k, t, reading, tau, theta_block=None) -> float:
    return 2 * tau - ambient_block(k, t, reading, theta_block)


def rhs_casorati(k, t, reading, delta_value, theta_block=None) -> float:
    return delta_value + ambient_block(k, t, reading, theta_block)


# --- type-specific forms ---------------------------------------------------------------

TABLE_ANGLES = {
    "semi-slant": lambda th: (0.0, th),
    "hemi-slant": lambda th: (th, math.pi / 2),
    "semi-invariant": lambda th: (0.0, math.pi / 2),
    "slant": lambda th: (th, th),
}


def table_theta_block(kind: str, k: AmbientConstants, t: Traces, theta: float) -> float:
    """The reduced trace combination for a submanifold of type ``kind``."""
    p, q, c2 = k.p, k.q, math.cos(theta) ** 2
    if kind == "semi-slant":
        return p * t.tr_TP1 + t.d1 * q + c2 * (p * t.tr_TP2 + t.d2 * q)
    if kind == "hemi-slant":
        return c2 * (p * t.tr_TP1 + t.d1 * q)
    if kind == "semi-invariant":
        return p * t.tr_TP1 + t.d1 * q
    if kind == "slant":
        return c2 * (p * t.tr_T + k.n * q)
    raise ArgumentError(f"unknown submanifold type {kind!r}")


def table_row_rhs(theorem: str, kind: str, k: AmbientConstants, t: Traces, reading: str,
                  theta: float, **inv) -> float:
    """Right-hand side in its reduced form for ``kind`` (``inv`` holds the invariants)."""
    n, p, q, a = k.n, k.p, k.q, k.alpha
    X = t.tr2(reading)
    blk = table_theta_block(kind, k, t, theta)
    cp, cm = k.cp, k.cm
    if theorem == "wintgen":
        return (inv["rho"] + inv["rho_perp"] - cp / (2 * a * a) * k.pq
                + cp / (n * a * a * (n - 1)) * ((n - 1) * (p * t.tr_T - n * X) + blk)
                + cm / (2 * a * n) * (n * p - 2 * t.tr_T))
    if theorem == "chen":
        b, c, d, kk = inv["b"], inv["c"], inv["d"], len(inv["tuple"])
        return (cp / (2 * a * a) * (b * (k.pq + 2 * X) - d * p * t.tr_T + (kk - 1) * blk)
                + cm / (4 * a) * (2 * t.tr_T * d - p * b) + c * inv["H_sq"])
    if theorem == "shape_ricci":
        w = omega_constants(k, t, reading)["omega"]
        return n * (n - 1) * inv["Omega_k"] + w + cp / (a * a) * blk
    tail = (n * (n - 1) * cp / (2 * a * a) * k.pq + cp / (a * a) * ((n - 1) * (n * X - p * t.tr_T) - blk)
            + (n - 1) * cm / (2 * a) * (2 * t.tr_T - n * p))
    if theorem == "mean_scalar":
        return 2 * inv["tau"] - tail
    if theorem == "casorati":
        return inv["delta_C"] + tail
    raise ArgumentError(f"unknown theorem {theorem!r}")


def bislant_rhs(theorem: str, k: AmbientConstants, t: Traces, reading: str, **inv) -> float:
    if theorem == "wintgen":
        return rhs_wintgen(k, t, reading, inv["rho"], inv["rho_perp"])
    if theorem == "chen":
        return rhs_chen(k, t, reading, inv["b"], inv["c"], inv["d"], inv["tuple"], inv["H_sq"])
    if theorem == "shape_ricci":
        return rhs_shape_ricci(k, t, reading, inv["Omega_k"])
    if theorem == "mean_scalar":
        return rhs_mean_scalar(k, t, reading, inv["tau"])
    if theorem == "casorati":
        return rhs_casorati(k, t, reading, inv["delta_C"])
    raise ArgumentError(f"unknown theorem {theorem!r}")


def classify(slant: SlantData, tol: float = TYPE_ANGLE_TOL) -> str:
    """Most specific submanifold type consistent with the slant data."""
    if not slant.is_bislant:
        return "none"
    th1 = slant.theta1 if slant.d1 else None
    th2 = slant.theta2 if slant.d2 else None
    if th1 is None or th2 is None or abs(th1 - th2) <= tol:
        return "slant"
    inv1 = abs(th1) <= tol
    anti2 = abs(th2 - math.pi / 2) <= tol
    if inv1 and anti2:
        return "semi-invariant"
    if inv1:
        return "semi-slant"
    if anti2:
        return "hemi-slant"
    return "bi-slant"


def _check_type(kind: str, t: Traces, slant: SlantData | None, tol: float) -> float:
    """Validate angles for ``kind`` and return the free angle ``theta``."""
    if slant is None:
        th1 = math.acos(math.sqrt(min(max(t.cos2_1, 0.0), 1.0))) if t.d1 else None
        th2 = math.acos(math.sqrt(min(max(t.cos2_2, 0.0), 1.0))) if t.d2 else None
    else:
        if not slant.is_bislant:
            raise ClassificationError("distributions are not slant (angle dispersion or Lemma residual too large)")
        th1 = slant.theta1 if slant.d1 else None
        th2 = slant.theta2 if slant.d2 else None
    if kind == "slant":
        if th1 is not None and th2 is not None and abs(th1 - th2) > tol:
            raise ClassificationError(f"slant type needs theta1 = theta2, got {th1} and {th2}")
        return th1 if th1 is not None else (th2 if th2 is not None else 0.0)
    if kind in ("semi-slant", "semi-invariant") and th1 is not None and abs(th1) > tol:
        raise ClassificationError(f"{kind} needs theta1 = 0 (D1 invariant), got theta1 = {th1}")
    if kind in ("hemi-slant", "semi-invariant") and th2 is not None and abs(th2 - math.pi / 2) > tol:
        raise ClassificationError(f"{kind} needs theta2 = pi/2 (D2 anti-invariant), got theta2 = {th2}")
    if kind == "semi-slant":
        return th2 if th2 is not None else 0.0
    if kind == "hemi-slant":
        return th1 if th1 is not None else 0.0
    if kind == "semi-invariant":
        return 0.0
    raise ArgumentError(f"unknown submanifold type {kind!r}")


@dataclass(frozen=True)
class Specialization:
    theorem: str
    kind: str
    theta: float
    substituted_rhs: float
    table_rhs: float

    @property
    def difference(self) -> float:
        return abs(self.substituted_rhs - self.table_rhs)


def specialize(theorem: str, kind: str, k: AmbientConstants, t: Traces, reading: str = "outer",
               slant: SlantData | None = None, tol: float = TYPE_ANGLE_TOL, **inv) -> Specialization:
    """Bi-slant RHS with the type's angles substituted, next to the reduced-form RHS."""
    theta = _check_type(kind, t, slant, tol)
    th1, th2 = TABLE_ANGLES[kind](theta)
    sub = replace(t, cos2_1=math.cos(th1) ** 2, cos2_2=math.cos(th2) ** 2)
    if kind == "slant":
        sub = replace(sub, cos2_1=math.cos(theta) ** 2, cos2_2=math.cos(theta) ** 2)
    return Specialization(theorem, kind, theta, bislant_rhs(theorem, k, sub, reading, **inv),
                          table_row_rhs(theorem, kind, k, t, reading, theta, **inv))


# --- equality patterns --------------------------------------------------------

@dataclass(frozen=True)
class EqualityPattern:
    kind: str
    residual: float
    matches: bool
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "residual": self.residual, "matches": self.matches, "params": self.params}


def _pattern(kind, residual, params, tol=PATTERN_TOL):
    residual = float(residual)
    return EqualityPattern(kind, residual, residual <= tol, params)


def umbilical_pattern(h: np.ndarray) -> EqualityPattern:
    n = h.shape[-1]
    if h.shape[0] == 0:
        return _pattern("umbilical", 0.0, {})
    tr = np.trace(h, axis1=1, axis2=2) / n
    dev = h - tr[:, None, None] * np.eye(n)
    res = float(np.max(np.linalg.norm(dev, axis=(1, 2))))
    return _pattern("umbilical", res, {"mean_curvature": tr.tolist()})


def casorati_pattern(h: np.ndarray, u: float) -> EqualityPattern:
    """Quasi-umbilical with a single nonzero shape operator ``diag(a, .., a, a (n^2 - n)/u)``."""
    n = h.shape[-1]
    if h.shape[0] == 0 or np.allclose(h, 0.0, atol=0.0):
        return _pattern("casorati", 0.0, {"a": 0.0})
    M = h.reshape(h.shape[0], -1)
    _, s, Vt = np.linalg.svd(M, full_matrices=False)
    rank_res = float(np.sqrt(np.sum(s[1:] ** 2)))
    A = s[0] * Vt[0].reshape(n, n)
    lam = np.linalg.eigvalsh(0.5 * (A + A.T))
    kappa = (n * n - n) / u
    best = (np.inf, 0.0)
    for j in range(n):
        others = np.delete(lam, j)
        a = (others.sum() + kappa * lam[j]) / (n - 1 + kappa**2)
        r = math.sqrt(float(np.sum((others - a) ** 2) + (lam[j] - kappa * a) ** 2))
        best = min(best, (r, a))
    return _pattern("casorati", max(rank_res, best[0]), {"a": float(best[1]), "rank_residual": rank_res})


def wintgen_pattern(h: np.ndarray) -> EqualityPattern:
    """Basis-free signature of the Wintgen-equality normal form (two anticommuting rank-2 traceless parts)."""
    n = h.shape[-1]
    r = h.shape[0]
    if r == 0:
        return _pattern("wintgen", 0.0, {"beta": 0.0})
    tr = np.trace(h, axis1=1, axis2=2) / n
    dev = h - tr[:, None, None] * np.eye(n)
    M = dev.reshape(r, -1)
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    s = np.concatenate([s, np.zeros(max(0, 2 - s.size))])
    rank_res = float(np.sqrt(np.sum(s[2:] ** 2)))
    if s[0] <= 1e-14:
        return _pattern("wintgen", 0.0, {"beta": 0.0, "alpha": tr.tolist()})
    B1 = s[0] * Vt[0].reshape(n, n)
    B2 = s[1] * Vt[1].reshape(n, n) if Vt.shape[0] > 1 else np.zeros((n, n))
    beta = s[0] / math.sqrt(2.0)
    target = np.zeros(n)
    target[0], target[-1] = -beta, beta
    eig_res = max(float(np.linalg.norm(np.linalg.eigvalsh(B) - target)) for B in (B1, B2))
    parts = {
        "rank": rank_res,
        "norm_balance": abs(s[0] - s[1]),
        "anticommutator": float(np.linalg.norm(B1 @ B2 + B2 @ B1)),
        "square_balance": float(np.linalg.norm(B1 @ B1 - B2 @ B2)),
        "spectrum": eig_res,
    }
    # trace components along the traceless directions and the remainder
    a1 = float(U[:, 0] @ tr)
    a2 = float(U[:, 1] @ tr) if U.shape[1] > 1 else 0.0
    a3 = float(math.sqrt(max(float(tr @ tr) - a1 * a1 - a2 * a2, 0.0)))
    return _pattern("wintgen", max(parts.values()),
                    {"alpha1": a1, "alpha2": a2, "alpha3": a3, "beta": float(beta), "components": parts})


def _normal_rotation_to(H: np.ndarray) -> np.ndarray:
    """Orthogonal matrix whose first column is ``H/|H|`` (identity if H = 0)."""
    r = H.size
    nh = np.linalg.norm(H)
    if r == 0 or nh <= 1e-14:
        return np.eye(r)
    v = H / nh
    w = v.copy()
    w[0] -= 1.0
    nw = np.linalg.norm(w)
    if nw <= 1e-14:
        return np.eye(r)
    u = w / nw
    return np.eye(r) - 2.0 * np.outer(u, u)


def chen_pattern(h: np.ndarray, tup, frame: np.ndarray) -> EqualityPattern:
    """Chen-equality block structure in the tangent frame ``frame`` (columns grouped by ``tup``)."""
    n = h.shape[-1]
    if h.shape[0] == 0:
        return _pattern("chen", 0.0, {"nu": 0.0})
    H = np.trace(h, axis1=1, axis2=2) / n
    Qn = _normal_rotation_to(H)
    g = np.einsum("sr,ai,bj,sab->rij", Qn, frame, frame, h)
    has_H = np.linalg.norm(H) > 1e-14
    bounds = np.cumsum((0,) + tuple(tup))
    mask = np.zeros((n, n), dtype=bool)
    for a, b in zip(bounds[:-1], bounds[1:]):
        mask[a:b, a:b] = True
    tail = slice(bounds[-1], n)
    mask[tail, tail] = True
    viol = [g[:, ~mask].ravel()]
    traces = [np.trace(g[:, a:b, a:b], axis1=1, axis2=2) for a, b in zip(bounds[:-1], bounds[1:])]
    T0 = g[0, tail, tail]
    if has_H:
        samples = [t[0] for t in traces] + list(np.diag(T0))
        nu = float(np.mean(samples)) if samples else 0.0
        viol.append(np.array([t[0] - nu for t in traces]))
        viol.append((T0 - nu * np.eye(T0.shape[0])).ravel())
        rest = slice(1, None)
    else:
        nu = 0.0
        rest = slice(0, None)
    viol.append(np.array([t[rest] for t in traces]).ravel())
    viol.append(g[rest, tail, tail].ravel())
    res = float(np.linalg.norm(np.concatenate([v.ravel() for v in viol])))
    return _pattern("chen", res, {"nu": nu})


def shape_ricci_pattern(h: np.ndarray) -> EqualityPattern:
    """Shape operators of normals orthogonal to ``H`` must vanish."""
    n = h.shape[-1]
    if h.shape[0] == 0:
        return _pattern("shape_ricci", 0.0, {})
    H = np.trace(h, axis1=1, axis2=2) / n
    Qn = _normal_rotation_to(H)
    g = np.einsum("sr,sab->rab", Qn, h)
    start = 1 if np.linalg.norm(H) > 1e-14 else 0
    res = float(np.sqrt(np.sum(g[start:] ** 2)))
    return _pattern("shape_ricci", res, {})


# --- verification -------------------------------------------------------------

@dataclass(frozen=True)
class InequalityResult:
    theorem: str
    lhs: float
    rhs: float
    slack: float
    holds: bool
    equality: bool
    tol: float
    eq_tol: float
    reading: str
    sign: int
    params: dict = field(default_factory=dict)
    equality_case: EqualityPattern | None = None
    variants: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem, "params": self.params, "lhs": self.lhs, "rhs": self.rhs,
            "slack": self.slack, "holds": self.holds, "equality": self.equality,
            "tol": self.tol, "eq_tol": self.eq_tol,
            "flags": {"tr2_reading": self.reading, "curv_sign": "+" if self.sign > 0 else "-"},
            "equality_case": None if self.equality_case is None else self.equality_case.to_dict(),
            "variants": self.variants, "details": self.details,
        }


@dataclass
class PointBundle:
    """Everything the verifiers need at one point."""

    pd: PointData
    slant: SlantData
    restarts: int = 64
    seed: int = 0
    tol: float = SLACK_TOL
    eq_tol: float = EQ_TOL
    reading: str = "outer"

    @cached_property
    def invariants(self) -> CurvatureInvariants:
        return curvature_invariants(self.pd)

    @cached_property
    def traces(self) -> Traces:
        return Traces.of(self.slant)

    def constants(self, sign=None) -> AmbientConstants:
        return AmbientConstants.of(self.pd, sign)

    def signs(self) -> list[int]:
        sp = self.pd.space
        return [sp.curv_sign] if sp.c1 == sp.c2 else [sp.curv_sign, -sp.curv_sign]


def make_bundle(pd: PointData, D1=None, D2=None, coords="u", **kw) -> PointBundle:
    return PointBundle(pd, slant_analysis(pd, D1, D2, coords), **kw)


def _result(b: PointBundle, theorem, orient, lhs_fn, rhs_fn, params, pattern_fn=None, details=None):
    """Assemble a result; ``orient=+1`` means slack = lhs - rhs, ``-1`` means rhs - lhs."""
    variants = {}
    for reading in READINGS:
        for s in b.signs():
            k = b.constants(s)
            lhs, rhs = lhs_fn(), rhs_fn(k, reading)
            variants[f"{reading}/{'+' if s > 0 else '-'}"] = orient * (lhs - rhs)
    k = b.constants()
    lhs, rhs = lhs_fn(), rhs_fn(k, b.reading)
    slack = orient * (lhs - rhs)
    equality = abs(slack) <= b.eq_tol
    pattern = pattern_fn(equality) if pattern_fn is not None else None
    return InequalityResult(theorem, float(lhs), float(rhs), float(slack), slack >= -b.tol, equality,
                            b.tol, b.eq_tol, b.reading, k.sign, params, pattern, variants, details or {})


def verify_wintgen(b: PointBundle) -> InequalityResult:
    inv = b.invariants
    return _result(b, "wintgen", +1, lambda: inv.H_sq,
                   lambda k, r: rhs_wintgen(k, b.traces, r, inv.rho, inv.rho_perp), {},
                   lambda eq: wintgen_pattern(b.pd.h))


def verify_chen_delta(b: PointBundle, tup) -> InequalityResult:
    data = chen_delta(b.pd, tup, restarts=b.restarts, seed=b.seed)
    inv = b.invariants
    return _result(b, "chen", -1, lambda: data.delta,
                   lambda k, r: rhs_chen(k, b.traces, r, data.b, data.c, data.d, data.tuple, inv.H_sq),
                   {"tuple": list(data.tuple)},
                   lambda eq: chen_pattern(b.pd.h, data.tuple, data.argmin_frame),
                   {"b": data.b, "c": data.c, "d": data.d, "tau": data.tau, "inf_sum": data.inf_sum,
                    "delta_hat": data.delta_hat, "certificate": data.certificates["inf"]})


def _ricci_spread(b: PointBundle, k: int, inf_value: float) -> dict:
    pd = b.pd
    n = pd.n
    R = pd.curvature
    groups = [1, k - 1] + ([n - k] if k < n else [])
    sup = minimize_frames(lambda Q: partial_ricci(R, Q[..., :, 0], Q[..., :, 1:k]), n, groups,
                          restarts=b.restarts, seed=b.seed + 7, maximize=True)
    return {"ricci_inf": inf_value, "ricci_sup": sup.value, "constancy_residual": sup.value - inf_value,
            "vanishing_residual": max(abs(inf_value), abs(sup.value))}


def verify_shape_ricci(b: PointBundle, k: int) -> InequalityResult:
    data = omega_k(b.pd, k, restarts=b.restarts, seed=b.seed)
    n = b.pd.n
    lhs = n * n * b.invariants.H_sq
    details = {"Omega_k": data.omega_k, "certificate": data.certificates["inf"],
               "lhs_definition": "(tr A_e)^2 with e the unit normal along H"}

    def pattern(eq):
        pat = shape_ricci_pattern(b.pd.h)
        if eq:
            pat.params.update(_ricci_spread(b, k, data.omega_k * (k - 1)))
        return pat

    res = _result(b, "shape_ricci", +1, lambda: lhs,
                  lambda kc, r: rhs_shape_ricci(kc, b.traces, r, data.omega_k), {"k": k}, pattern, details)
    res.details.update(omega_constants(b.constants(), b.traces, b.reading))
    return res


def verify_mean_scalar(b: PointBundle) -> InequalityResult:
    inv = b.invariants
    n = b.pd.n
    return _result(b, "mean_scalar", +1, lambda: n * (n - 1) * inv.H_sq,
                   lambda k, r: rhs_mean_scalar(k, b.traces, r, inv.tau), {},
                   lambda eq: umbilical_pattern(b.pd.h))


def verify_casorati(b: PointBundle, u: float) -> InequalityResult:
    data = delta_casorati(b.pd, u, restarts=b.restarts, seed=b.seed)
    inv = b.invariants
    return _result(b, "casorati", -1, lambda: 2 * inv.tau,
                   lambda k, r: rhs_casorati(k, b.traces, r, data.value), {"u": float(u)},
                   lambda eq: casorati_pattern(b.pd.h, u),
                   {"delta": data.value, "branch": "inf" if data.delta_C is not None else "sup",
                    "a_u": data.a_u, "C": data.C, "C_W_inf": data.C_W_inf, "C_W_sup": data.C_W_sup})


def verify_all(b: PointBundle, theorems=THEOREMS, tuples=(), k_values=(), u_values=()) -> list[InequalityResult]:
    out = []
    n = b.pd.n
    for th in theorems:
        if th == "wintgen" and n >= 2:
            out.append(verify_wintgen(b))
        elif th == "chen":
            out.extend(verify_chen_delta(b, t) for t in tuples)
        elif th == "shape_ricci":
            out.extend(verify_shape_ricci(b, k) for k in k_values)
        elif th == "mean_scalar" and n >= 2:
            out.append(verify_mean_scalar(b))
        elif th == "casorati" and n >= 2:
            out.extend(verify_casorati(b, u) for u in u_values)
    return out


def derivation_check(b: PointBundle, match_tol: float = 1e-6) -> dict:
    """Compare ``2 tau`` summed directly with the closed-form assembly for every flag pair."""
    pd = b.pd
    n = pd.n
    direct = 2 * b.invariants.tau
    extrinsic = n * n * pd.H_sq - pd.h_sq
    out = {"direct_2tau": direct, "combinations": {}}
    signs = (1, -1)
    for reading in READINGS:
        for s in signs:
            k = b.constants(s)
            val = ambient_block(k, b.traces, reading) + extrinsic
            out["combinations"][f"{reading}/{'+' if s > 0 else '-'}"] = {
                "closed_form": val, "residual": abs(val - direct), "matches": abs(val - direct) <= match_tol}
    T = b.slant.T
    out["direct_ambient_residual"] = abs(direct_ambient_block(b.constants(), b.traces.tr_T,
                                                              float(np.sum(T * T))) + extrinsic - direct)
    out["matched"] = [key for key, v in out["combinations"].items() if v["matches"]]
    return out
