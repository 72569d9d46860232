"""Left-invariant Hermitian structures given by constant structure coefficients."""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .config import resolve_tol
from .forms import Form, sort_with_sign


class LieHermitianStructure:
    """dφ_i = Σ_{j,k} C^i_{jk} φ_j∧φ_k + Σ_{j,k} D^i_{jk̄} φ_j∧φ̄_k.

    Internally each dφ_i is kept as an antisymmetric 2n×2n array F with
    dφ_i = Σ_{a<b} F[a, b] g_a∧g_b, so the φ_j∧φ_k block is C − Cᵀ and the
    φ_j∧φ̄_k block is D.  The (0,2) block is zero by construction.
    """

    __slots__ = ("n", "C", "D", "dphi", "_dgen", "_dgen_forms")

    def __init__(self, n: int, C=None, D=None):
        if n < 2:
            raise ValueError("dimension must be at least 2")
        C = np.zeros((n, n, n), complex) if C is None else np.array(C, dtype=complex)
        D = np.zeros((n, n, n), complex) if D is None else np.array(D, dtype=complex)
        if C.shape != (n, n, n) or D.shape != (n, n, n):
            raise ValueError(f"C and D must have shape {(n, n, n)}")
        dphi = np.zeros((n, 2 * n, 2 * n), complex)
        dphi[:, :n, :n] = C - C.transpose(0, 2, 1)
        dphi[:, :n, n:] = D
        dphi[:, n:, :n] = -D.transpose(0, 2, 1)
        # generator differentials: dφ̄_i is the conjugate of dφ_i with barred/unbarred swapped
        perm = np.r_[np.arange(n, 2 * n), np.arange(n)]
        dgen = np.concatenate([dphi, np.conj(dphi[:, perm][:, :, perm])], axis=0)
        for arr in (C, D, dphi, dgen):
            arr.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "dphi", dphi)
        object.__setattr__(self, "_dgen", dgen)
        object.__setattr__(self, "_dgen_forms", None)

    def __setattr__(self, name, value):
        raise AttributeError("LieHermitianStructure is immutable")

    @classmethod
    def from_matrices(cls, dphi):
        """Build from antisymmetric arrays (n, 2n, 2n); rejects a (0,2) part."""
        dphi = np.asarray(dphi, dtype=complex)
        n = dphi.shape[0]
        if dphi.shape != (n, 2 * n, 2 * n):
            raise ValueError("dphi must have shape (n, 2n, 2n)")
        if np.max(np.abs(dphi + dphi.transpose(0, 2, 1)), initial=0) > 0:
            raise ValueError("dphi matrices must be antisymmetric")
        if np.max(np.abs(dphi[:, n:, n:]), initial=0) > 0:
            raise ValueError("dφ_i has a (0,2) part; the complex structure would not be integrable")
        C = dphi[:, :n, :n] / 2
        return cls(n, C, dphi[:, :n, n:])

    @classmethod
    def from_forms(cls, forms):
        """Build from the list of 2-forms dφ_1..dφ_n."""
        n = forms[0].n
        if len(forms) != n:
            raise ValueError(f"expected {n} forms, got {len(forms)}")
        return cls.from_matrices(np.array([f.to_matrix() for f in forms]))

    @classmethod
    def from_wedge_coefficients(cls, n, d):
        """d maps i (1-based) to {(a, b): c} over 0-based generators, c the coefficient of g_a∧g_b."""
        mats = np.zeros((n, 2 * n, 2 * n), complex)
        for i, terms in d.items():
            if not 1 <= i <= n:
                raise ValueError(f"dφ_{i} outside 1..{n}")
            for (a, b), c in terms.items():
                sign, key = sort_with_sign((a, b))
                if sign == 0:
                    raise ValueError("repeated generator in a wedge key")
                if any(k >= 2 * n for k in key):
                    raise ValueError(f"generator outside the frame in {key}")
                a, b = key
                mats[i - 1, a, b] += sign * c
                mats[i - 1, b, a] -= sign * c
        return cls.from_matrices(mats)

    @property
    def dgen(self):
        """(2n, 2n, 2n) array: dgen[c] is the 2-form matrix of d(g_c)."""
        return self._dgen

    def d_generator_form(self, c) -> Form:
        if self._dgen_forms is None:
            object.__setattr__(self, "_dgen_forms", tuple(Form.from_matrix(self.n, m) for m in self._dgen))
        return self._dgen_forms[c]

    def dphi_form(self, i) -> Form:
        """dφ_i as a Form, i 1-based."""
        return self.d_generator_form(i - 1)

    def __eq__(self, other):
        return isinstance(other, LieHermitianStructure) and other.n == self.n and np.array_equal(other.dphi, self.dphi)

    def __hash__(self):
        return hash((self.n, self.dphi.tobytes()))

    def __repr__(self):
        return f"LieHermitianStructure(n={self.n})"


def exterior_derivative(s: LieHermitianStructure, a: Form) -> Form:
    """d on constant-coefficient forms via the graded Leibniz rule."""
    if a.n != s.n:
        raise ValueError(f"frame dimension mismatch: {a.n} vs {s.n}")
    terms = {}
    for key, value in a.terms.items():
        for m, g in enumerate(key):
            sign_m = -1 if m % 2 else 1
            for (p, q), c in s.d_generator_form(g).terms.items():
                sign, new = sort_with_sign(key[:m] + (p, q) + key[m + 1:])
                if sign:
                    terms[new] = terms.get(new, 0) + sign_m * sign * c * value
    return Form(s.n, terms)


def validate_structure(s: LieHermitianStructure, tol=None) -> dict:
    """Jacobi (d² = 0) and antisymmetry diagnostics."""
    tol = resolve_tol(tol)
    jacobi = 0.0
    for i in range(1, s.n + 1):
        jacobi = max(jacobi, exterior_derivative(s, s.dphi_form(i)).max_abs())
    antisym = float(np.max(np.abs(s.C + s.C.transpose(0, 2, 1)), initial=0.0))
    return {
        "n": s.n,
        "jacobi_residual": jacobi,
        "antisymmetry_residual": antisym,
        "accepted": bool(jacobi < tol and antisym < tol),
        "tol": tol,
    }


def check_unitary(U, tol=None):
    tol = resolve_tol(tol)
    U = np.asarray(U, dtype=complex)
    if U.ndim != 2 or U.shape[0] != U.shape[1]:
        raise ValueError("U must be square")
    err = float(np.max(np.abs(U @ U.conj().T - np.eye(U.shape[0]))))
    if err >= tol:
        raise ValueError(f"U is not unitary (residual {err:.3g})")
    return U


def unitary_change(s: LieHermitianStructure, U, tol=None) -> LieHermitianStructure:
    """Structure in the coframe φ' = Uφ."""
    U = check_unitary(U, tol)
    n = s.n
    if U.shape != (n, n):
        raise ValueError(f"U must be {n}×{n}")
    # old generators in terms of new ones: g = S g'
    S = np.zeros((2 * n, 2 * n), complex)
    S[:n, :n] = U.conj().T
    S[n:, n:] = U.T
    mats = np.einsum("ia,abc->ibc", U, s.dphi)
    mats = np.einsum("ab,iac,cd->ibd", S, mats, S)
    mats = (mats - mats.transpose(0, 2, 1)) / 2
    return LieHermitianStructure.from_matrices(mats)


def random_unitary(n, rng=None):
    """Haar-distributed unitary matrix."""
    if n == 1:
        rng = np.random.default_rng(rng)
        return np.exp(2j * np.pi * rng.random()) * np.ones((1, 1))
    return unitary_group.rvs(n, random_state=rng)


def parse_wedge_key(key: str, n: int):
    """"2*1b" -> (1, n) : 0-based generator numbers of φ_2∧φ̄_1."""
    parts = key.replace(" ", "").split("*")
    if len(parts) != 2:
        raise ValueError(f"wedge key {key!r} must name two generators, like '1*2b'")
    out = []
    for p in parts:
        barred = p.endswith("b")
        digits = p[:-1] if barred else p
        if not digits.isdigit():
            raise ValueError(f"bad generator {p!r} in wedge key {key!r}")
        i = int(digits)
        if not 1 <= i <= n:
            raise ValueError(f"generator index {i} outside 1..{n} in {key!r}")
        out.append(i - 1 + (n if barred else 0))
    return tuple(out)


def format_wedge_key(a: int, b: int, n: int) -> str:
    def name(g):
        return f"{g + 1}" if g < n else f"{g - n + 1}b"

    return f"{name(a)}*{name(b)}"


def from_keyed(n, d):
    """Structure from {i: {"1*2b": c, ...}} with 1-based i and canonical wedge coefficients."""
    return LieHermitianStructure.from_wedge_coefficients(
        n, {int(i): {parse_wedge_key(k, n): complex(c) for k, c in terms.items()} for i, terms in d.items()}
    )


def to_keyed(s: LieHermitianStructure, tol=0.0):
    """Inverse of from_keyed, listing canonical (sorted) generator pairs."""
    n = s.n
    out = {}
    for i in range(n):
        terms = {}
        for a in range(2 * n):
            for b in range(a + 1, 2 * n):
                c = s.dphi[i, a, b]
                if abs(c) > tol:
                    terms[format_wedge_key(a, b, n)] = complex(c)
        if terms:
            out[str(i + 1)] = terms
    return out
