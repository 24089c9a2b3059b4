"""Algebraic oracles: Chen's lemma and the component form of the DDVV inequality."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError

LEMMA_TOL = 1e-10
EQUALITY_TOL = 1e-8


@dataclass(frozen=True)
class ChenLemmaResult:
    holds: bool
    slack: float  # 2 a1 a2 - eps
    equality: bool
    equality_criterion: bool  # a1 + a2 = a3 = ... = an
    criterion_gap: float


def _criterion_gap(a: np.ndarray) -> np.ndarray:
    """Spread of ``(a1 + a2, a3, ..., an)`` around its mean (0 iff all equal)."""
    b = np.concatenate([a[..., :1] + a[..., 1:2], a[..., 2:]], axis=-1)
    return np.sqrt(np.sum((b - b.mean(axis=-1, keepdims=True)) ** 2, axis=-1))


def lemma_epsilon(a) -> np.ndarray:
    """The ``eps`` that makes ``(sum a)^2 = (n-1)(eps + sum a^2)`` hold."""
    a = np.asarray(a, dtype=float)
    n = a.shape[-1]
    return np.sum(a, axis=-1) ** 2 / (n - 1) - np.sum(a * a, axis=-1)


def chen_lemma_check(a, eps: float) -> ChenLemmaResult:
    """Check ``2 a1 a2 >= eps`` under the lemma's constraint."""
    a = np.asarray(a, dtype=float)
    n = a.size
    if n < 2:
        raise ArgumentError("need n >= 2 numbers")
    lhs = np.sum(a) ** 2
    rhs = (n - 1) * (eps + np.sum(a * a))
    if abs(lhs - rhs) > LEMMA_TOL * max(1.0, abs(lhs)):
        raise ArgumentError(f"constraint violated: (sum a)^2={lhs} but (n-1)(eps+sum a^2)={rhs}")
    slack = float(2 * a[0] * a[1] - eps)
    gap = float(_criterion_gap(a))
    return ChenLemmaResult(slack >= -LEMMA_TOL, slack, abs(slack) <= LEMMA_TOL,
                           gap <= EQUALITY_TOL, gap)


@dataclass(frozen=True)
class DDVVResult:
    lhs: float
    rhs: float
    slack: float
    commutator_term: float
    trace_term: float
    rhs_unsquared: float | None
    slack_unsquared: float | None


def _ddvv_parts(A: np.ndarray):
    """Batched DDVV pieces for shape operators ``A`` of shape ``(..., r, n, n)``."""
    n = A.shape[-1]
    iu, ju = np.triu_indices(n, 1)
    lhs = np.sum(A[..., iu, ju] ** 2, axis=(-1, -2))
    d = np.diagonal(A, axis1=-2, axis2=-1)
    trace = np.sum((d[..., :, iu] - d[..., :, ju]) ** 2, axis=(-1, -2)) / (2 * n)
    r = A.shape[-3]
    tu, su = np.triu_indices(r, 1)
    # K[t, s, i, j] = sum_k (h^t_ik h^s_jk - h^s_ik h^t_jk) = (A_t A_s - A_s A_t)_{ij}
    At, As = A[..., tu, :, :], A[..., su, :, :]
    K = At @ As - As @ At
    K = K[..., iu, ju]
    sq = np.sum(K**2, axis=(-1, -2))
    raw = np.sum(K, axis=(-1, -2))
    return lhs, np.sqrt(sq), trace, raw


def ddvv_component_check(shape_ops) -> DDVVResult:
    """Both sides of the component DDVV inequality (bracket squared).

    The unsquared reading is reported alongside; it is ``None`` when the inner
    sum is negative and its square root undefined.
    """
    A = np.asarray(shape_ops, dtype=float)
    if A.ndim == 2:
        A = A[None]
    if A.ndim != 3 or A.shape[1] != A.shape[2]:
        raise ArgumentError(f"expected a list of square matrices, got shape {A.shape}")
    if np.max(np.abs(A - np.swapaxes(A, 1, 2)), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(A))):
        raise ArgumentError("shape operators must be symmetric")
    lhs, comm, trace, raw = _ddvv_parts(A)
    rhs = float(comm - trace)
    if raw >= 0:
        ru = float(np.sqrt(raw) - trace)
        su = float(lhs - ru)
    else:
        ru = su = None
    return DDVVResult(float(lhs), rhs, float(lhs - rhs), float(comm), float(trace), ru, su)


def random_symmetric(rng: np.random.Generator, count: int, r: int, n: int) -> np.ndarray:
    Z = rng.standard_normal((count, r, n, n))
    return 0.5 * (Z + np.swapaxes(Z, -1, -2))


@dataclass(frozen=True)
class SuiteSummary:
    name: str
    samples: int
    violations: int
    worst_slack: float
    equality_hits: int
    equality_criterion_failures: int
    extra: dict

    def to_dict(self) -> dict:
        return {"name": self.name, "samples": self.samples, "violations": self.violations,
                "worst_slack": self.worst_slack, "equality_hits": self.equality_hits,
                "equality_criterion_failures": self.equality_criterion_failures, **self.extra}


def ddvv_suite(samples: int = 100_000, seed: int = 42, max_n: int = 5, max_normals: int = 4,
               tol: float = 1e-9) -> SuiteSummary:
    """Random symmetric tuples with ``n <= max_n`` and ``<= max_normals`` normals."""
    rng = np.random.default_rng(seed)
    shapes = [(r, n) for n in range(2, max_n + 1) for r in range(1, max_normals + 1)]
    per = -(-samples // len(shapes))
    worst, viol, done, eq_hits = np.inf, 0, 0, 0
    worst_unsq, viol_unsq = np.inf, 0
    for r, n in shapes:
        cnt = min(per, samples - done)
        if cnt <= 0:
            break
        scale = np.exp(rng.uniform(np.log(1e-1), np.log(1e1), size=(cnt, 1, 1, 1)))
        A = random_symmetric(rng, cnt, r, n) * scale
        lhs, comm, trace, raw = _ddvv_parts(A)
        slack = lhs - (comm - trace)
        worst = min(worst, float(slack.min()))
        viol += int(np.sum(slack < -tol))
        eq_hits += int(np.sum(np.abs(slack) <= 1e-12))
        ok = raw >= 0
        if np.any(ok):
            su = lhs[ok] - (np.sqrt(raw[ok]) - trace[ok])
            worst_unsq = min(worst_unsq, float(su.min()))
            viol_unsq += int(np.sum(su < -tol))
        done += cnt
    eq = ddvv_component_check([[[1.0, 0.0], [0.0, -1.0]], [[0.0, 1.0], [1.0, 0.0]]])
    extra = {
        "equality_configuration_slack": eq.slack,
        "unsquared_reading": {"worst_slack": worst_unsq if np.isfinite(worst_unsq) else None,
                              "violations": viol_unsq},
    }
    return SuiteSummary("ddvv", done, viol, worst, eq_hits, 0, extra)


def chen_lemma_suite(samples: int = 1_000_000, seed: int = 42, max_n: int = 8,
                     equality_samples: int = 1000, batch: int = 100_000) -> SuiteSummary:
    """Random vectors with ``eps`` from the constraint, plus constructed equality cases."""
    rng = np.random.default_rng(seed)
    worst, viol, done = np.inf, 0, 0
    while done < samples:
        cnt = min(batch, samples - done)
        n = int(rng.integers(2, max_n + 1))
        a = rng.standard_normal((cnt, n)) * np.exp(rng.uniform(-2, 2, size=(cnt, 1)))
        eps = lemma_epsilon(a)
        slack = 2 * a[:, 0] * a[:, 1] - eps
        worst = min(worst, float(slack.min()))
        viol += int(np.sum(slack < -LEMMA_TOL))
        done += cnt
    # equality family: a1 + a2 = a3 = ... = an
    hits, fails = 0, 0
    for _ in range(equality_samples):
        n = int(rng.integers(2, max_n + 1))
        t, a1 = rng.standard_normal(2)
        a = np.full(n, t)
        a[0], a[1] = a1, t - a1
        res = chen_lemma_check(a, float(lemma_epsilon(a)))
        if res.equality:
            hits += 1
            fails += int(not res.equality_criterion)
    return SuiteSummary("chen_lemma", done, viol, worst, hits, fails, {"equality_samples": equality_samples})
