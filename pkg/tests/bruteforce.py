"""Brute-force oracles for the optimized invariants, independent of the Givens search."""

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize


def _unit(x):
    return x / np.linalg.norm(x)


def sphere_points(n, count, seed):
    if n == 2:
        t = np.linspace(0, 2 * np.pi, count, endpoint=False)
        return np.stack([np.cos(t), np.sin(t)], axis=1)
    x = np.random.default_rng(seed).standard_normal((count, n))
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _polish(f, starts, maximize):
    sgn = -1.0 if maximize else 1.0
    best = np.inf
    for x0 in starts:
        r = minimize(lambda z: sgn * f(z), x0, method="BFGS", options={"gtol": 1e-12})
        best = min(best, r.fun)
    return sgn * best


def casorati_w(h, w):
    w = _unit(w)
    n = h.shape[-1]
    Aw = h @ w
    return (np.sum(h**2) - 2 * np.sum(Aw**2) + np.sum((Aw @ w) ** 2)) / (n - 1)


def casorati_extreme(h, maximize=False, count=20000, polish=10, seed=11):
    n = h.shape[-1]
    pts = sphere_points(n, count, seed)
    vals = np.array([casorati_w(h, w) for w in pts])
    order = np.argsort(-vals if maximize else vals)[:polish]
    return _polish(lambda z: casorati_w(h, z), pts[order], maximize)


def _frame(z, n):
    return np.linalg.qr(z.reshape(n, n))[0]


def partition_sum(R, tup, Q):
    total, start = 0.0, 0
    for m in tup:
        F = Q[:, start:start + m]
        for a in range(m):
            for b in range(a + 1, m):
                total += np.einsum("ijkl,i,j,k,l->", R, F[:, a], F[:, b], F[:, b], F[:, a])
        start += m
    return total


def chen_inf(R, tup, starts=400, polish=12, seed=13):
    n = R.shape[0]
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((starts, n * n))
    vals = np.array([partition_sum(R, tup, _frame(z, n)) for z in Z])
    order = np.argsort(vals)[:polish]
    return _polish(lambda z: partition_sum(R, tup, _frame(z, n)), Z[order], False)


def ricci_min_through(R, k, X):
    """min over k-planes containing unit X of Ric_L(X), via eigenvalues on X-perp."""
    X = _unit(X)
    B = null_space(X[None, :])
    S = np.einsum("ijkl,i,l->jk", R, X, X)
    S = 0.5 * (S + S.T)
    return float(np.sum(np.linalg.eigvalsh(B.T @ S @ B)[: k - 1]))


def omega_k(R, k, count=20000, polish=10, seed=17):
    n = R.shape[0]
    pts = sphere_points(n, count, seed)
    vals = np.array([ricci_min_through(R, k, x) for x in pts])
    order = np.argsort(vals)[:polish]
    return _polish(lambda z: ricci_min_through(R, k, z), pts[order], False) / (k - 1)
