"""Tensor containers and the torsion contractions built from T^j_{ik}.

Index layout used throughout:
  T[j, i, k]        = T^j_{ik}
  R.data[a, b, k, l] = Θ_{kl}(E_a, E_b), a, b over 0..2n-1 (barred directions at n..2n-1)
  P[i, k, j, l]     = P^{jℓ}_{ik}
  Q[i, j, k, l]     = Q_{i j̄ k ℓ̄}
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("chern", "bismut", "riemannian1", "riemannian2", "gauduchon")


def bar_index(n):
    """Permutation swapping the unbarred and barred halves of 0..2n-1."""
    return np.r_[np.arange(n, 2 * n), np.arange(n)]


class Curvature4Tensor:
    """Components R_{a b k ℓ̄} = Θ_{kℓ}(E_a, E_b) of a curvature matrix Θ.

    For kind "riemannian2" the last pair is (k̄, ℓ̄) instead, i.e. the data
    holds the Θ_2 block of the Levi-Civita curvature.
    """

    __slots__ = ("kind", "n", "data")

    def __init__(self, kind, data):
        if kind not in KINDS:
            raise ValueError(f"unknown curvature kind {kind!r}")
        data = np.array(data, dtype=complex)
        n = data.shape[2]
        if data.shape != (2 * n, 2 * n, n, n):
            raise ValueError("curvature data must have shape (2n, 2n, n, n)")
        data.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("Curvature4Tensor is immutable")

    def component(self, a, b, k, l):
        """a, b are (index, barred) pairs, k and l plain indices, all 1-based."""
        n = self.n
        ia = a[0] - 1 + (n if a[1] else 0)
        ib = b[0] - 1 + (n if b[1] else 0)
        return complex(self.data[ia, ib, k - 1, l - 1])

    @property
    def r20(self):
        """R_{i j k ℓ̄} as an (n, n, n, n) array."""
        n = self.n
        return self.data[:n, :n]

    @property
    def r11(self):
        """R_{i j̄ k ℓ̄} as an (n, n, n, n) array."""
        n = self.n
        return self.data[:n, n:]

    @property
    def r02(self):
        n = self.n
        return self.data[n:, n:]

    def antisymmetry_residual(self):
        return float(np.max(np.abs(self.data + self.data.transpose(1, 0, 2, 3)), initial=0.0))

    def conjugate_symmetry_residual(self):
        """max |conj(R_{i j̄ k ℓ̄}) − R_{j ī ℓ k̄}|, meaningful for Hermitian connections."""
        r = self.r11
        n = self.n
        # R_{j ī ℓ k̄} = Θ_{ℓk}(e_j, ē_i)
        other = self.data[:n, n:].transpose(1, 0, 3, 2)
        return float(np.max(np.abs(np.conj(r) - other), initial=0.0))

    def max_abs(self):
        return float(np.max(np.abs(self.data), initial=0.0))


@dataclass(frozen=True)
class TorsionDerivatives:
    """d10[j, i, k, l] = T^j_{ik,ℓ}; d01[j, i, k, l] = T^j_{ik,ℓ̄}."""

    d10: np.ndarray
    d01: np.ndarray

    def max_abs(self):
        return float(max(np.max(np.abs(self.d10), initial=0.0), np.max(np.abs(self.d01), initial=0.0)))

    def antisymmetry_residual(self):
        r = 0.0
        for d in (self.d10, self.d01):
            r = max(r, float(np.max(np.abs(d + d.transpose(0, 2, 1, 3)), initial=0.0)))
        return r


@dataclass(frozen=True)
class DerivedTensors:
    eta: np.ndarray
    chi_norm2: float
    A: np.ndarray
    B: np.ndarray
    Cmat: np.ndarray
    phi: np.ndarray  # phi[k, l] = φ^ℓ_k
    P: np.ndarray
    Q: np.ndarray
    ricQ: np.ndarray


def trace_eta(T):
    """η_k = Σ_i T^i_{ik}."""
    return np.einsum("iik->k", T)


def p_tensor(T):
    """P^{jℓ}_{ik} stored as P[i, k, j, l]."""
    Tc = np.conj(T)
    return (
        np.einsum("rik,rjl->ikjl", T, Tc)
        + np.einsum("jir,klr->ikjl", T, Tc)
        - np.einsum("jkr,ilr->ikjl", T, Tc)
        - np.einsum("lir,kjr->ikjl", T, Tc)
        + np.einsum("lkr,ijr->ikjl", T, Tc)
    )


def b_tensor(T):
    """B_{k ℓ̄} = Σ T^ℓ_{rs} conj(T^k_{rs})."""
    return np.einsum("lrs,krs->kl", T, np.conj(T))


def phi_matrix(T, eta=None):
    """phi[k, l] = φ^ℓ_k = Σ_r conj(η_r) T^ℓ_{kr}."""
    if eta is None:
        eta = trace_eta(T)
    return np.einsum("r,lkr->kl", np.conj(eta), T)


def ric_q(R11):
    return np.einsum("ijrr->ij", R11) - np.einsum("rjir->ij", R11)


def derived_tensors(bundle, Rb: Curvature4Tensor) -> DerivedTensors:
    T = bundle.T
    Tc = np.conj(T)
    eta = trace_eta(T)
    R11 = Rb.r11
    return DerivedTensors(
        eta=eta,
        chi_norm2=float(np.sum(np.abs(eta) ** 2)),
        A=np.einsum("rsk,rsl->kl", T, Tc),
        B=b_tensor(T),
        Cmat=np.einsum("rsi,srk->ik", T, T),
        phi=phi_matrix(T, eta),
        P=p_tensor(T),
        Q=R11 - R11.transpose(2, 1, 0, 3),
        ricQ=ric_q(R11),
    )
