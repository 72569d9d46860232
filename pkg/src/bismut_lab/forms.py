"""Exterior algebra over a unitary coframe φ_1..φ_n, φ̄_1..φ̄_n.

Generators are numbered 0..2n-1 internally: 0..n-1 are φ_1..φ_n and n..2n-1
are φ̄_1..φ̄_n.  A term is a strictly increasing tuple of generator numbers,
and every sign comes from the parity of the sorting permutation.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType

import numpy as np


def _merge_sign(a: tuple, b: tuple):
    """Sign and sorted union of a∧b for sorted index tuples, or (0, None)."""
    if set(a) & set(b):
        return 0, None
    inversions = 0
    for x in a:
        for y in b:
            if x > y:
                inversions += 1
    sign = -1 if inversions % 2 else 1
    return sign, tuple(sorted(a + b))


def sort_with_sign(indices):
    """Sort a generator tuple, returning (sign, sorted) or (0, None) on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return 0, None
    sign = 1
    # insertion sort counting swaps
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return sign, tuple(idx)


class Form:
    """Immutable element of the complex exterior algebra in 2n generators."""

    __slots__ = ("n", "_terms")

    def __init__(self, n: int, terms=None):
        if n < 1:
            raise ValueError("frame dimension must be positive")
        clean = {}
        for key, value in (terms or {}).items():
            sign, key = sort_with_sign(key)
            if sign == 0:
                continue
            if any(k < 0 or k >= 2 * n for k in key):
                raise ValueError(f"generator index out of range in {key}")
            clean[key] = clean.get(key, 0) + sign * complex(value)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_terms", MappingProxyType({k: v for k, v in clean.items() if v != 0}))

    def __setattr__(self, name, value):
        raise AttributeError("Form is immutable")

    # constructors
    @classmethod
    def zero(cls, n):
        return cls(n)

    @classmethod
    def scalar(cls, n, c):
        return cls(n, {(): c})

    @classmethod
    def phi(cls, n, i):
        """The (1,0)-form φ_i, 1-based."""
        return cls(n, {(i - 1,): 1})

    @classmethod
    def phibar(cls, n, i):
        return cls(n, {(n + i - 1,): 1})

    @classmethod
    def from_vector(cls, n, coeffs):
        """1-form Σ_a c_a g_a over the 2n generators."""
        return cls(n, {(a,): c for a, c in enumerate(coeffs) if c != 0})

    @classmethod
    def from_matrix(cls, n, F):
        """2-form Σ_{a<b} F[a, b] g_a∧g_b from an antisymmetric 2n×2n array."""
        F = np.asarray(F)
        terms = {}
        for a in range(2 * n):
            for b in range(a + 1, 2 * n):
                if F[a, b] != 0:
                    terms[(a, b)] = F[a, b]
        return cls(n, terms)

    # views
    @property
    def terms(self):
        return self._terms

    def degrees(self):
        return sorted({len(k) for k in self._terms})

    def is_zero(self):
        return not self._terms

    def max_abs(self) -> float:
        return max((abs(v) for v in self._terms.values()), default=0.0)

    def to_vector(self):
        out = np.zeros(2 * self.n, dtype=complex)
        for key, value in self._terms.items():
            if len(key) != 1:
                raise ValueError("not a 1-form")
            out[key[0]] = value
        return out

    def to_matrix(self):
        out = np.zeros((2 * self.n, 2 * self.n), dtype=complex)
        for key, value in self._terms.items():
            if len(key) != 2:
                raise ValueError("not a 2-form")
            a, b = key
            out[a, b] = value
            out[b, a] = -value
        return out

    def bidegree(self, key):
        p = sum(1 for k in key if k < self.n)
        return p, len(key) - p

    def chop(self, tol):
        return Form(self.n, {k: v for k, v in self._terms.items() if abs(v) >= tol})

    # algebra
    def _check(self, other):
        if not isinstance(other, Form):
            raise TypeError("expected a Form")
        if other.n != self.n:
            raise ValueError(f"frame dimension mismatch: {self.n} vs {other.n}")

    def __add__(self, other):
        self._check(other)
        terms = dict(self._terms)
        for k, v in other._terms.items():
            terms[k] = terms.get(k, 0) + v
        return Form(self.n, terms)

    def __neg__(self):
        return Form(self.n, {k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        if isinstance(c, Form):
            raise TypeError("use wedge() or ^ for the exterior product")
        c = complex(c)
        return Form(self.n, {k: c * v for k, v in self._terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        return isinstance(other, Form) and other.n == self.n and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self.n, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return "Form(0)"
        parts = []
        for key in sorted(self._terms, key=lambda k: (len(k), k)):
            names = "∧".join(
                f"φ{k + 1}" if k < self.n else f"φ̄{k - self.n + 1}" for k in key
            )
            parts.append(f"({self._terms[key]:.6g}){names or '1'}")
        return "Form(" + " + ".join(parts) + ")"


@dataclass(frozen=True)
class FrameVector:
    """e_i (barred=False) or ē_i (barred=True), index 1-based."""

    index: int
    barred: bool = False

    def generator(self, n):
        if not 1 <= self.index <= n:
            raise ValueError(f"frame index {self.index} outside 1..{n}")
        return self.index - 1 + (n if self.barred else 0)


class FormMatrix:
    """Matrix of Forms sharing one frame dimension."""

    __slots__ = ("n", "entries")

    def __init__(self, entries):
        rows = [tuple(r) for r in entries]
        dims = {f.n for r in rows for f in r}
        if len(dims) > 1:
            raise ValueError("entries have different frame dimensions")
        if len({len(r) for r in rows}) > 1:
            raise ValueError("ragged FormMatrix")
        object.__setattr__(self, "entries", tuple(rows))
        object.__setattr__(self, "n", dims.pop() if dims else 0)

    def __setattr__(self, name, value):
        raise AttributeError("FormMatrix is immutable")

    @classmethod
    def from_coefficients(cls, n, coeffs):
        """Matrix of 1-forms from an array of shape (rows, cols, 2n)."""
        coeffs = np.asarray(coeffs)
        return cls([[Form.from_vector(n, coeffs[i, j]) for j in range(coeffs.shape[1])]
                    for i in range(coeffs.shape[0])])

    @property
    def shape(self):
        return len(self.entries), (len(self.entries[0]) if self.entries else 0)

    @property
    def rows(self):
        return self.shape[0]

    @property
    def cols(self):
        return self.shape[1]

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def coefficients(self):
        """Inverse of from_coefficients; every entry must be a 1-form or zero."""
        r, c = self.shape
        out = np.zeros((r, c, 2 * self.n), dtype=complex)
        for i in range(r):
            for j in range(c):
                if not self.entries[i][j].is_zero():
                    out[i, j] = self.entries[i][j].to_vector()
        return out

    def transpose(self):
        r, c = self.shape
        return FormMatrix([[self.entries[i][j] for i in range(r)] for j in range(c)])

    def conjugate(self):
        return FormMatrix([[conjugate(f) for f in row] for row in self.entries])

    def __add__(self, other):
        return FormMatrix([[a + b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __sub__(self, other):
        return FormMatrix([[a - b for a, b in zip(ra, rb)] for ra, rb in zip(self.entries, other.entries)])

    def __mul__(self, c):
        return FormMatrix([[a * c for a in row] for row in self.entries])

    __rmul__ = __mul__

    def matwedge(self, other):
        """(A∧B)_{ij} = Σ_k A_{ik}∧B_{kj}."""
        r, m = self.shape
        m2, c = other.shape
        if m != m2:
            raise ValueError("shape mismatch")
        out = []
        for i in range(r):
            row = []
            for j in range(c):
                acc = Form(self.n)
                for k in range(m):
                    acc = acc + wedge(self.entries[i][k], other.entries[k][j])
                row.append(acc)
            out.append(row)
        return FormMatrix(out)

    def max_abs(self):
        return max((f.max_abs() for row in self.entries for f in row), default=0.0)


def wedge(a: Form, b: Form) -> Form:
    a._check(b)
    terms = {}
    for ka, va in a.terms.items():
        for kb, vb in b.terms.items():
            sign, key = _merge_sign(ka, kb)
            if sign:
                terms[key] = terms.get(key, 0) + sign * va * vb
    return Form(a.n, terms)


def bidegree_part(a: Form, p: int, q: int) -> Form:
    if p < 0 or q < 0:
        raise ValueError("bidegree must be nonnegative")
    return Form(a.n, {k: v for k, v in a.terms.items() if a.bidegree(k) == (p, q)})


def conjugate(a: Form) -> Form:
    n = a.n
    # swapping is a bijection on keys; Form() restores sorted order with its sign
    return Form(n, {tuple(k + n if k < n else k - n for k in key): np.conj(v)
                    for key, v in a.terms.items()})


def evaluate(a: Form, X: FrameVector, Y: FrameVector) -> complex:
    """(α∧β)(X, Y) = α(X)β(Y) − α(Y)β(X)."""
    if a.degrees() not in ([], [2]):
        raise ValueError("evaluate needs a pure 2-form")
    x, y = X.generator(a.n), Y.generator(a.n)
    if x == y:
        return 0j
    if x < y:
        return complex(a.terms.get((x, y), 0))
    return -complex(a.terms.get((y, x), 0))
