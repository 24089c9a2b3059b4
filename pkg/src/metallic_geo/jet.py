"""Second-order forward-mode differentiation.

A :class:`Jet` carries a value together with its gradient and Hessian with
respect to ``n`` independent variables.  Values may be batched: ``val`` has
shape ``S``, ``grad`` shape ``S + (n,)`` and ``hess`` shape ``S + (n, n)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _outer(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., :, None] * b[..., None, :]


@dataclass(frozen=True)
class Jet:
    val: np.ndarray
    grad: np.ndarray
    hess: np.ndarray

    @staticmethod
    def variables(u) -> list["Jet"]:
        """Independent variables at ``u`` (shape ``(n,)`` or batched ``(B, n)``)."""
        u = np.asarray(u, dtype=float)
        n = u.shape[-1]
        batch = u.shape[:-1]
        eye = np.eye(n)
        zero = np.zeros(batch + (n, n))
        return [Jet(u[..., i], np.broadcast_to(eye[i], batch + (n,)), zero) for i in range(n)]

    def _lift(self, c) -> "Jet":
        c = np.asarray(c, dtype=float)
        return Jet(np.broadcast_to(c, self.val.shape) + 0.0, np.zeros_like(self.grad), np.zeros_like(self.hess))

    def _chain(self, f0, f1, f2) -> "Jet":
        g = f1[..., None] * self.grad
        h = f1[..., None, None] * self.hess + f2[..., None, None] * _outer(self.grad, self.grad)
        return Jet(f0, g, h)

    def __neg__(self):
        return Jet(-self.val, -self.grad, -self.hess)

    def __add__(self, other):
        if not isinstance(other, Jet):
            return Jet(self.val + other, self.grad, self.hess)
        return Jet(self.val + other.val, self.grad + other.grad, self.hess + other.hess)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            c = np.asarray(other, dtype=float)
            return Jet(self.val * c, self.grad * c[..., None], self.hess * c[..., None, None])
        a, b = self, other
        g = a.grad * b.val[..., None] + b.grad * a.val[..., None]
        h = (a.hess * b.val[..., None, None] + b.hess * a.val[..., None, None]
             + _outer(a.grad, b.grad) + _outer(b.grad, a.grad))
        return Jet(a.val * b.val, g, h)

    __rmul__ = __mul__

    def reciprocal(self) -> "Jet":
        v = self.val
        return self._chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            return self * (1.0 / np.asarray(other, dtype=float))
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def power(self, k: int) -> "Jet":
        v = self.val
        if k == 0:
            return self._lift(1.0)
        f1 = k * v ** (k - 1)
        f2 = k * (k - 1) * v ** (k - 2) if k >= 2 else np.zeros_like(v)
        return self._chain(v**k, f1, f2)

    def apply(self, fn: str) -> "Jet":
        v = self.val
        if fn == "sin":
            s, c = np.sin(v), np.cos(v)
            return self._chain(s, c, -s)
        if fn == "cos":
            s, c = np.sin(v), np.cos(v)
            return self._chain(c, -s, -c)
        if fn == "exp":
            e = np.exp(v)
            return self._chain(e, e, e)
        if fn == "sqrt":
            r = np.sqrt(v)
            return self._chain(r, 0.5 / r, -0.25 / (r * v))
        raise ValueError(f"unknown function {fn!r}")


def as_jet(x, like: Jet) -> Jet:
    """Promote a constant to a jet with the same shape as ``like``."""
    return x if isinstance(x, Jet) else like._lift(x)
