"""Randomized immersion suite for the theorem verifiers.

Each case is a random immersion through a base point ``x0`` whose tangent
vectors at ``u = 0`` are ``E_k = (cos t_k U_k, sin t_k V_k)`` with
orthonormal ``U`` in factor 1 and ``V`` in factor 2.  Then ``T`` is diagonal
in the ``E`` basis with entries ``p/2 + b (alpha/2) cos 2 t_k``, so the angles
``t_k`` select the class (invariant, anti-invariant, proper slant, bi-slant).
Random quadratic terms give a generic second fundamental form; sphere
factors are reached through the central projection ``r y / |y|``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ambient import make_space
from .immersion import make_immersion, point_data
from .inequalities import InequalityResult, PointBundle, verify_all
from .immersion import slant_analysis
from .invariants import admissible_tuples

CLASSES = ("invariant", "anti-invariant", "proper-slant", "bi-slant")
AMBIENTS = ("flat-flat", "sphere-flat", "flat-sphere", "sphere-sphere")
MATCHED_READING = "square"


@dataclass(frozen=True)
class SuiteCase:
    ambient: str
    kind: str
    n: int
    space: dict
    coords: tuple[str, ...]
    D1: list
    D2: list

    def to_dict(self) -> dict:
        return {"ambient": self.ambient, "class": self.kind, "n": self.n, "space": self.space,
                "coords": list(self.coords), "D1": self.D1, "D2": self.D2}


def _num(x: float) -> str:
    return f"({x:.17g})"


def _poly(lin: np.ndarray, quad: np.ndarray) -> str:
    n = lin.size
    terms = [f"{_num(lin[k])}*u{k + 1}" for k in range(n) if lin[k] != 0.0]
    for k in range(n):
        for m in range(k, n):
            c = quad[k, m] * (0.5 if k == m else 1.0)
            terms.append(f"{_num(c)}*u{k + 1}*u{m + 1}")
    return " + ".join(terms) if terms else "0"


def _factor_coords(lin: np.ndarray, quad: np.ndarray, radius: float | None) -> list[str]:
    polys = [_poly(lin[i], quad[i]) for i in range(lin.shape[0])]
    if radius is None:
        return polys
    r = _num(radius)
    norm = "sqrt(" + " + ".join(f"({s})^2" for s in polys) + f" + {r}^2)"
    return [f"{r}*({s})/{norm}" for s in polys] + [f"{r}*{r}/{norm}"]


def _angles(kind: str, n: int, p: int, alpha: float, bsign: int, rng) -> tuple[np.ndarray, list[int]]:
    """Angles ``t_k`` and the indices that form D1."""
    t_anti = 0.5 * math.acos(-p / (bsign * alpha))
    if kind == "invariant":
        t = rng.choice([0.0, math.pi / 2], size=n)
        first = [k for k in range(n) if t[k] == 0.0] or list(range(n))
        return t, first
    if kind == "anti-invariant":
        return np.full(n, t_anti), list(range(n))
    if kind == "proper-slant":
        while True:
            s = rng.uniform(0.15, math.pi / 2 - 0.15)
            if abs(s - t_anti) > 0.1:
                return np.full(n, s), list(range(n))
    d1 = int(rng.integers(1, n))
    while True:
        a, b = rng.uniform(0.15, math.pi / 2 - 0.15, size=2)
        if abs(a - b) > 0.2:
            break
    t = np.r_[np.full(d1, a), np.full(n - d1, b)]
    return t, list(range(d1))


def make_case(ambient: str, kind: str, n: int, rng: np.random.Generator) -> SuiteCase:
    p, q = (int(v) for v in rng.integers(1, 4, size=2))
    branch = str(rng.choice(["first", "second"]))
    m1, m2 = n + 1, n
    s1, s2 = ambient.split("-")
    radii = [float(rng.uniform(0.8, 1.6)) if s == "sphere" else None for s in (s1, s2)]
    c = [0.0 if r is None else 1.0 / r**2 for r in radii]
    space = {"m1": m1, "m2": m2, "c1": c[0], "c2": c[1], "p": p, "q": q, "branch": branch}
    alpha = math.sqrt(p * p + 4 * q)
    bsign = 1 if branch == "first" else -1
    t, first = _angles(kind, n, p, alpha, bsign, rng)
    U = np.linalg.qr(rng.standard_normal((m1, m1)))[0][:, :n]
    V = np.linalg.qr(rng.standard_normal((m2, m2)))[0][:, :n]
    L1 = U * np.cos(t)
    L2 = V * np.sin(t)
    L1[np.abs(L1) < 1e-15] = 0.0
    L2[np.abs(L2) < 1e-15] = 0.0
    Q1 = rng.standard_normal((m1, n, n)) * 0.5
    Q2 = rng.standard_normal((m2, n, n)) * 0.5
    coords = _factor_coords(L1, Q1, radii[0]) + _factor_coords(L2, Q2, radii[1])
    eye = np.eye(n)
    D1 = [eye[k].tolist() for k in first]
    D2 = [eye[k].tolist() for k in range(n) if k not in first]
    return SuiteCase(ambient, kind, n, space, tuple(coords), D1, D2)


def suite_cases(per_cell: int = 5, seed: int = 42, dims=(2, 3, 4)) -> list[SuiteCase]:
    rng = np.random.default_rng(seed)
    return [make_case(a, k, n, rng) for a in AMBIENTS for n in dims for k in CLASSES for _ in range(per_cell)]


@dataclass
class CaseOutcome:
    case: SuiteCase
    classified: bool
    results: list[InequalityResult] = field(default_factory=list)
    error: str | None = None

    def falsifications(self) -> list[InequalityResult]:
        return [r for r in self.results if not r.holds]


def run_case(case: SuiteCase, restarts: int = 64, seed: int = 0, reading: str = MATCHED_READING,
             tol: float = 1e-7) -> CaseOutcome:
    space = make_space(**case.space)
    spec = make_immersion(space, case.n, list(case.coords))
    pd = point_data(spec, np.zeros(case.n))
    slant = slant_analysis(pd, case.D1, case.D2 or None)
    if not slant.is_bislant:
        return CaseOutcome(case, False, error="point is not bi-slant for the designed distributions")
    b = PointBundle(pd, slant, restarts=restarts, seed=seed, tol=tol, reading=reading)
    n = case.n
    results = verify_all(b, tuples=admissible_tuples(n), k_values=range(2, n + 1),
                         u_values=(1.0, float(n * (n - 1) + 1)))
    return CaseOutcome(case, True, results)


def run_suite(cases, restarts: int = 64, seed: int = 0, reading: str = MATCHED_READING,
              tol: float = 1e-7, workers: int = 1) -> list[CaseOutcome]:
    def job(c):
        return run_case(c, restarts, seed, reading, tol)

    if workers <= 1:
        return [job(c) for c in cases]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(job, cases))


def summarize(outcomes: list[CaseOutcome]) -> dict:
    """Worst slack per theorem and ambient, with every falsification event."""
    worst: dict = {}
    events = []
    for i, o in enumerate(outcomes):
        for r in o.results:
            key = f"{r.theorem}@{o.case.ambient}"
            worst[key] = min(worst.get(key, math.inf), r.slack)
            if not r.holds:
                events.append({"case": i, "class": o.case.kind, "n": o.case.n, "ambient": o.case.ambient,
                               "theorem": r.theorem, "params": r.params, "slack": r.slack,
                               "variants": r.variants})
    return {"cases": len(outcomes), "classified": sum(o.classified for o in outcomes),
            "verdicts": sum(len(o.results) for o in outcomes),
            "worst_slack": dict(sorted(worst.items())), "falsifications": events}
