"""Chern, Bismut, Gauduchon and Levi-Civita connections of a Lie-Hermitian structure.

A matrix of 1-forms is an array m[i, j, c] holding the coefficient of the
generator g_c in m_{ij}.  ∇e_i = Σ_j m_{ij} e_j, so the coframe satisfies
dφ = −ᵗm∧φ + (torsion).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .forms import Form, FormMatrix
from .structure import LieHermitianStructure
from .tensors import Curvature4Tensor, TorsionDerivatives, bar_index


def bar(m):
    """Entrywise conjugate of a matrix of 1-forms."""
    n2 = m.shape[-1]
    return np.conj(m[..., bar_index(n2 // 2)])


def outer_wedge(alpha, beta):
    """2-form matrix of α∧β for 1-form coefficient vectors."""
    return np.multiply.outer(alpha, beta) - np.multiply.outer(beta, alpha)


def matrix_wedge(A, B):
    """(A∧B)_{kl} = Σ_p A_{kp}∧B_{pl}, as a (k, l, 2n, 2n) array of 2-form matrices."""
    return np.einsum("kpa,plb->klab", A, B) - np.einsum("kpb,pla->klab", A, B)


def matrix_d(s: LieHermitianStructure, m):
    return np.einsum("klc,cab->klab", m, s.dgen)


@dataclass(frozen=True)
class ConnectionBundle:
    structure: LieHermitianStructure
    theta: np.ndarray
    tau: np.ndarray  # tau[k] is the 2-form matrix of τ_k
    T: np.ndarray  # T[k, i, j] = T^k_{ij}
    tau_mixed_residual: float
    gamma: np.ndarray | None = None
    theta2: np.ndarray | None = None
    thetaB: np.ndarray | None = None
    theta1: np.ndarray | None = None

    @property
    def n(self):
        return self.structure.n

    def form_matrix(self, name) -> FormMatrix:
        m = getattr(self, name)
        if m is None:
            raise ValueError(f"{name} not populated; run connection_suite first")
        return FormMatrix.from_coefficients(self.n, m)

    def tau_forms(self):
        return [Form.from_matrix(self.n, t) for t in self.tau]


def chern_data(s: LieHermitianStructure) -> ConnectionBundle:
    """Chern connection θ and torsion τ, T from dφ = −ᵗθ∧φ + τ."""
    n = s.n
    D = s.D
    theta = np.zeros((n, n, 2 * n), complex)
    # the (0,1) part of θ_{ij} is read off the (1,1) part of dφ_j; skew-Hermitian symmetry gives the rest
    theta[:, :, n:] = D.transpose(1, 0, 2)
    theta[:, :, :n] = -np.conj(D)
    eye = np.eye(2 * n)[:n]
    tau = np.array(s.dphi)
    for i in range(n):
        for j in range(n):
            tau[i] += outer_wedge(theta[j, i], eye[j])
    mixed = float(np.max(np.abs(tau[:, :, n:]), initial=0.0))
    T = tau[:, :n, :n] / 2
    return ConnectionBundle(structure=s, theta=theta, tau=tau, T=T, tau_mixed_residual=mixed)


def connection_suite(b: ConnectionBundle) -> ConnectionBundle:
    """Adds γ, θ_2, θ^b = θ + 2γ and θ_1 = θ + γ."""
    n = b.n
    T = b.T
    gamma = np.zeros((n, n, 2 * n), complex)
    gamma[:, :, :n] = T.transpose(1, 0, 2)  # γ_{ij} ∋ T^j_{ik} φ_k
    gamma[:, :, n:] = -np.conj(T)  # γ_{ij} ∋ −conj(T^i_{jk}) φ̄_k
    theta2 = np.zeros((n, n, 2 * n), complex)
    theta2[:, :, :n] = np.conj(T).transpose(1, 2, 0)  # (θ_2)_{ij} ∋ conj(T^k_{ij}) φ_k
    return replace(b, gamma=gamma, theta2=theta2, thetaB=b.theta + 2 * gamma, theta1=b.theta + gamma)


def full_bundle(s: LieHermitianStructure) -> ConnectionBundle:
    return connection_suite(chern_data(s))


def gauduchon_theta(b: ConnectionBundle, t: float):
    """θ^t = (1 − t)θ + tθ^b as a coefficient array."""
    if b.thetaB is None:
        b = connection_suite(b)
    return (1 - t) * b.theta + t * b.thetaB


def _coeffs(m):
    return m.coefficients() if isinstance(m, FormMatrix) else np.asarray(m)


def curvature_forms(s, m):
    """Θ = dm − m∧m as a (n, n, 2n, 2n) array."""
    m = _coeffs(m)
    return matrix_d(s, m) - matrix_wedge(m, m)


def curvature(s: LieHermitianStructure, m, kind="chern"):
    """Curvature of a Hermitian connection matrix, or of the Levi-Civita pair.

    For kind "riemannian" pass m = (θ_1, θ_2); a RiemannianCurvature is returned.
    """
    if kind == "riemannian":
        th1, th2 = (_coeffs(x) for x in m)
        Th1 = matrix_d(s, th1) - matrix_wedge(th1, th1) - matrix_wedge(bar(th2), th2)
        Th2 = matrix_d(s, th2) - matrix_wedge(th2, th1) - matrix_wedge(bar(th1), th2)
        return RiemannianCurvature(
            Curvature4Tensor("riemannian1", Th1.transpose(2, 3, 0, 1)),
            Curvature4Tensor("riemannian2", Th2.transpose(2, 3, 0, 1)),
        )
    Th = curvature_forms(s, m)
    return Curvature4Tensor(kind, Th.transpose(2, 3, 0, 1))


class RiemannianCurvature:
    """Levi-Civita curvature in the complexified frame (e, ē)."""

    def __init__(self, r1: Curvature4Tensor, r2: Curvature4Tensor):
        self.r1 = r1
        self.r2 = r2
        self.n = r1.n

    def full(self):
        """R[a, b, c, d] = g(R(E_a, E_b)E_c, E_d) over the 2n complex frame vectors."""
        n = self.n
        sigma = bar_index(n)
        r1, r2 = self.r1.data, self.r2.data
        # Θ̄_{kl}(E_a, E_b) = conj(Θ_{kl}(E_σa, E_σb))
        r1b = np.conj(r1[sigma][:, sigma])
        r2b = np.conj(r2[sigma][:, sigma])
        hat = np.zeros((2 * n, 2 * n, 2 * n, 2 * n), complex)  # hat[a, b, c, f] = Θ̂_{cf}(E_a, E_b)
        hat[:, :, :n, :n] = r1
        hat[:, :, :n, n:] = r2b
        hat[:, :, n:, :n] = r2
        hat[:, :, n:, n:] = r1b
        # g(E_f, E_d) = 1 exactly when d = σ(f)
        return hat[:, :, :, sigma]


def _apply_slot(X, axis, M, upper):
    """Connection term for one tensor slot: M[r, s, c] holds the coefficients of M_{rs}."""
    Xm = np.moveaxis(X, axis, 0)
    if upper:
        out = np.einsum("r...,rjc->j...c", Xm, M)
    else:
        out = -np.einsum("r...,irc->i...c", Xm, M)
    return np.moveaxis(out, 0, axis)


def covariant_derivative(X, slots, m):
    """∇X for a tensor with constant frame components.

    slots lists one code per axis: "l" lower (1,0) index, "lb" lower (0,1)
    index, "u" upper (1,0) index, "L" lower index over all 2n frame vectors.
    Returns an array with one extra trailing axis over the 2n directions.
    """
    m = _coeffs(m)
    n = m.shape[0]
    X = np.asarray(X, dtype=complex)
    mb = bar(m)
    big = np.zeros((2 * n, 2 * n, 2 * n), complex)
    big[:n, :n] = m
    big[n:, n:] = mb
    out = np.zeros(X.shape + (2 * n,), complex)
    for axis, code in enumerate(slots):
        if code == "l":
            out += _apply_slot(X, axis, m, False)
        elif code == "lb":
            out += _apply_slot(X, axis, mb, False)
        elif code == "u":
            out += _apply_slot(X, axis, m, True)
        elif code == "L":
            out += _apply_slot(X, axis, big, False)
        else:
            raise ValueError(f"unknown slot code {code!r}")
    return out


def covariant_derivative_T(b: ConnectionBundle, connection) -> TorsionDerivatives:
    """T^j_{ik,ℓ} and T^j_{ik,ℓ̄} for the given connection matrix."""
    n = b.n
    dT = covariant_derivative(b.T, ("u", "l", "l"), connection)
    return TorsionDerivatives(d10=dT[..., :n], d01=dT[..., n:])


def bismut_torsion_vectors(b: ConnectionBundle):
    """T^b(E_a, E_b) expanded in the frame (e, ē) from the closed-form expressions.

    Returns an array Tb[a, b, c] with T^b(E_a, E_b) = Σ_c Tb[a, b, c] E_c.
    """
    n = b.n
    T = b.T
    Tc = np.conj(T)
    out = np.zeros((2 * n, 2 * n, 2 * n), complex)
    # T^b(e_i, e_j) = −2 Σ T^k_{ij} e_k
    out[:n, :n, :n] = -2 * T.transpose(1, 2, 0)
    # T^b(e_i, ē_j) = 2 Σ_k (T^j_{ik} ē_k − conj(T^i_{jk}) e_k)
    out[:n, n:, n:] = 2 * T.transpose(1, 0, 2)
    out[:n, n:, :n] = -2 * Tc
    out[n:, :n] = -out[:n, n:].transpose(1, 0, 2)
    sigma = bar_index(n)
    out[n:, n:] = np.conj(out[:n, :n][:, :, sigma])
    return out


def torsion_vectors(b: ConnectionBundle, m):
    """Torsion of a connection given by matrix m, directly from d of the coframe.

    For ∇e = m e, the coframe satisfies dφ = −ᵗm∧φ + Φ where Φ_k(X, Y) is the
    φ_k-component of the torsion T(X, Y).  Returns Tv[a, b, c] as above.
    """
    s = b.structure
    n = s.n
    m = _coeffs(m)
    big = np.zeros((2 * n, 2 * n, 2 * n), complex)
    big[:n, :n] = m
    big[n:, n:] = bar(m)
    eye = np.eye(2 * n)
    Phi = np.array(s.dgen)
    for c in range(2 * n):
        for a in range(2 * n):
            Phi[c] += outer_wedge(big[a, c], eye[a])
    return Phi.transpose(1, 2, 0)
