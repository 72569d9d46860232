"""Degree-2 truncated Taylor expansions in the 2n variables (z, z̄).

A Jet stores the value c0, the gradient c1 (length 2n, holomorphic
directions first) and the symmetric Hessian c2 (2n × 2n), with z and z̄
treated as independent variables.
"""

from __future__ import annotations

import numpy as np

from .expr import Num, fold


class Jet:
    __slots__ = ("c0", "c1", "c2")

    def __init__(self, c0, c1, c2):
        self.c0 = complex(c0)
        self.c1 = np.asarray(c1, dtype=complex)
        self.c2 = np.asarray(c2, dtype=complex)

    @property
    def n(self):
        return self.c1.shape[0] // 2

    @classmethod
    def constant(cls, c, n):
        return cls(c, np.zeros(2 * n), np.zeros((2 * n, 2 * n)))

    @classmethod
    def variable(cls, slot, value, n):
        c1 = np.zeros(2 * n, complex)
        c1[slot] = 1
        return cls(value, c1, np.zeros((2 * n, 2 * n)))

    def _lift(self, other):
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.n)

    def __add__(self, other):
        o = self._lift(other)
        return Jet(self.c0 + o.c0, self.c1 + o.c1, self.c2 + o.c2)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c0, -self.c1, -self.c2)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        outer = np.multiply.outer(self.c1, o.c1)
        return Jet(
            self.c0 * o.c0,
            self.c0 * o.c1 + o.c0 * self.c1,
            self.c0 * o.c2 + o.c0 * self.c2 + outer + outer.T,
        )

    __rmul__ = __mul__

    def reciprocal(self):
        g0 = self.c0
        if abs(g0) < 1e-14:
            raise ZeroDivisionError("jet division by a numerically zero constant term")
        return Jet(
            1 / g0,
            -self.c1 / g0**2,
            -self.c2 / g0**2 + 2 * np.multiply.outer(self.c1, self.c1) / g0**3,
        )

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def conj(self):
        n = self.n
        sigma = np.r_[np.arange(n, 2 * n), np.arange(n)]
        return Jet(np.conj(self.c0), np.conj(self.c1[sigma]), np.conj(self.c2[sigma][:, sigma]))

    def __repr__(self):
        return f"Jet(c0={self.c0}, c1={self.c1}, c2=...)"


def jet_evaluate(e, p):
    """Exact degree-2 Taylor data of the expression e at the point p."""
    p = np.asarray(p, dtype=complex)
    n = p.shape[0]

    def leaf(node):
        if isinstance(node, Num):
            return node.value
        if node.index > n:
            raise ValueError(f"variable index {node.index} exceeds dimension {n}")
        k = node.index - 1
        if node.barred:
            return Jet.variable(n + k, np.conj(p[k]), n)
        return Jet.variable(k, p[k], n)

    out = fold(e, leaf)
    if not isinstance(out, Jet):
        out = Jet.constant(out, n)
    return out
