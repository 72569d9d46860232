"""Curvature and torsion identities relating ∇^b-derivatives of T to R^b and R^c.

Each check returns the max-norm residual (left side minus right side).
Comma indices are Bismut covariant derivatives.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import resolve_tol
from .connections import (
    ConnectionBundle,
    bismut_torsion_vectors,
    covariant_derivative,
    curvature,
    full_bundle,
    torsion_vectors,
)
from .forms import Form, conjugate, wedge
from .structure import LieHermitianStructure, exterior_derivative
from .tensors import Curvature4Tensor, b_tensor, p_tensor, phi_matrix, ric_q, trace_eta


def _res(x):
    return float(np.max(np.abs(x), initial=0.0))


@dataclass(frozen=True)
class BismutData:
    """Everything the identity checks need, computed once per structure."""

    bundle: ConnectionBundle
    Rb: Curvature4Tensor
    Rc: Curvature4Tensor
    dT: np.ndarray  # dT[j, i, k, c] = T^j_{ik,c}
    dRb: np.ndarray  # dRb[a, b, k, l, c] = R^b_{a b k ℓ̄, c}
    eta: np.ndarray
    deta: np.ndarray  # deta[i, c] = η_{i,c}

    @property
    def n(self):
        return self.bundle.n

    @property
    def T(self):
        return self.bundle.T


def bismut_data(s: LieHermitianStructure, bundle=None) -> BismutData:
    b = full_bundle(s) if bundle is None else bundle
    Rb = curvature(s, b.thetaB, "bismut")
    Rc = curvature(s, b.theta, "chern")
    dT = covariant_derivative(b.T, ("u", "l", "l"), b.thetaB)
    dRb = covariant_derivative(Rb.data, ("L", "L", "l", "lb"), b.thetaB)
    eta = trace_eta(b.T)
    deta = covariant_derivative(eta, ("l",), b.thetaB)
    return BismutData(b, Rb, Rc, dT, dRb, eta, deta)


def curv20(d: BismutData):
    n, T = d.n, d.T
    d10 = d.dT[..., :n]
    lhs = d.Rb.r20
    rhs = 2 * (np.einsum("lkji->ijkl", d10) - np.einsum("lkij->ijkl", d10)) + 4 * (
        np.einsum("rij,lrk->ijkl", T, T) + np.einsum("rjk,lri->ijkl", T, T) + np.einsum("rki,lrj->ijkl", T, T)
    )
    return _res(lhs - rhs)


def curv11(d: BismutData):
    n, T = d.n, d.T
    Tc = np.conj(T)
    d01 = d.dT[..., n:]
    lhs = d.Rb.r11 - d.Rc.r11
    rhs = 2 * (np.einsum("likj->ijkl", d01) + np.conj(np.einsum("kjli->ijkl", d01))) - 4 * (
        np.einsum("lkr,ijr->ijkl", T, Tc)
        + np.einsum("jir,klr->ijkl", T, Tc)
        + np.einsum("rik,rjl->ijkl", T, Tc)
        - np.einsum("lir,kjr->ijkl", T, Tc)
    )
    return _res(lhs - rhs)


def pT(d: BismutData):
    n, T = d.n, d.T
    d10 = d.dT[..., :n]
    lhs = np.einsum("kijl->ijkl", d10) + np.einsum("kjli->ijkl", d10) + np.einsum("klij->ijkl", d10)
    rhs = 4 * (np.einsum("rli,krj->ijkl", T, T) + np.einsum("rjl,kri->ijkl", T, T) + np.einsum("rij,krl->ijkl", T, T))
    return _res(lhs - rhs)


def dbT(d: BismutData):
    n, T = d.n, d.T
    d01 = d.dT[..., n:]
    R11 = d.Rb.r11
    P = p_tensor(T)
    lhs = np.einsum("jikl->ikjl", d01) + np.conj(np.einsum("ijlk->ikjl", d01)) - np.conj(np.einsum("kjli->ikjl", d01))
    rhs = -2 * P + 0.5 * (np.einsum("ilkj->ikjl", R11) - np.einsum("klij->ikjl", R11))
    return _res(lhs - rhs)


def dR30(d: BismutData):
    n, T = d.n, d.T
    R = d.Rb.data
    dR = d.dRb[:n, :n, :, :, :n]  # R^b_{ijkℓ̄,p}
    lhs = np.einsum("ijklp->ijklp", dR) + np.einsum("piklj->ijklp", dR) + np.einsum("jpkli->ijklp", dR)
    R20 = R[:n, :n]
    rhs = -2 * (
        np.einsum("irkl,rjp->ijklp", R20, T) + np.einsum("jrkl,rpi->ijklp", R20, T) + np.einsum("prkl,rij->ijklp", R20, T)
    )
    return _res(lhs - rhs)


def dR21(d: BismutData):
    n, T = d.n, d.T
    Tc = np.conj(T)
    dR = d.dRb
    R = d.Rb.data
    R20 = R[:n, :n]
    R11 = R[:n, n:]
    # free indices (i, p, q, k, l)
    lhs = (
        np.einsum("ipklq->ipqkl", dR[:n, :n, :, :, n:])
        - np.einsum("iqklp->ipqkl", dR[:n, n:, :, :, :n])
        + np.einsum("pqkli->ipqkl", dR[:n, n:, :, :, :n])
    )
    rhs = 2 * (
        np.einsum("rqkl,rip->ipqkl", R11, T)
        - np.einsum("prkl,qir->ipqkl", R11, T)
        + np.einsum("irkl,qpr->ipqkl", R11, T)
        + np.einsum("prkl,iqr->ipqkl", R20, Tc)
        - np.einsum("irkl,pqr->ipqkl", R20, Tc)
    )
    return _res(lhs - rhs)


def pT_refined(d: BismutData):
    n = d.n
    d10 = d.dT[..., :n]
    R20 = d.Rb.r20
    lhs = np.einsum("lijk->ijkl", d10)
    rhs = -0.5 * (np.einsum("jkil->ijkl", R20) + np.einsum("kijl->ijkl", R20))
    return _res(lhs - rhs)


def permutation(d: BismutData):
    T = d.T
    R20 = d.Rb.r20
    lhs = np.einsum("rij,lrk->ijkl", T, T) + np.einsum("rjk,lri->ijkl", T, T) + np.einsum("rki,lrj->ijkl", T, T)
    rhs = -0.25 * (R20 + np.einsum("jkil->ijkl", R20) + np.einsum("kijl->ijkl", R20))
    return _res(lhs - rhs)


def dbT_refined(d: BismutData):
    n, T = d.n, d.T
    d01 = d.dT[..., n:]
    R11 = d.Rb.r11
    P = p_tensor(T)
    lhs = np.einsum("jikl->ikjl", d01)
    rhs = (
        -2 / 3 * P
        + 1 / 3 * (np.einsum("ilkj->ikjl", R11) - np.einsum("klij->ikjl", R11))
        + 1 / 6 * (np.einsum("ijkl->ikjl", R11) - np.einsum("kjil->ikjl", R11))
    )
    return _res(lhs - rhs)


def peta(d: BismutData):
    n = d.n
    R20 = d.Rb.r20
    lhs = d.deta[:, :n]
    rhs = -0.5 * (np.einsum("ijrr->ij", R20) + np.einsum("jrir->ij", R20))
    return _res(lhs - rhs)


def dbeta(d: BismutData):
    n, T, eta = d.n, d.T, d.eta
    Tc = np.conj(T)
    R11 = d.Rb.r11
    lhs = d.deta[:, n:]
    rhs = -2 / 3 * (
        np.einsum("r,ijr->ij", eta, Tc) + np.einsum("r,jir->ij", np.conj(eta), T) - np.einsum("jtr,itr->ij", T, Tc)
    ) + 1 / 3 * (np.einsum("rjir->ij", R11) - np.einsum("ijrr->ij", R11)) + 1 / 6 * (
        np.einsum("rrij->ij", R11) - np.einsum("irrj->ij", R11)
    )
    return _res(lhs - rhs)


def kahler_form(n) -> Form:
    """ω = i Σ φ_k∧φ̄_k."""
    return Form(n, {(k, n + k): 1j for k in range(n)})


def partial(s, a: Form, p, q):
    """∂ or ∂̄ part of d on a pure-type form: keeps the (p, q) bidegree of the result."""
    da = exterior_derivative(s, a)
    return Form(s.n, {k: v for k, v in da.terms.items() if da.bidegree(k) == (p, q)})


def pure_type(a: Form):
    types = {a.bidegree(k) for k in a.terms}
    if len(types) > 1:
        raise ValueError("form is not of pure type")
    return types.pop() if types else (0, 0)


def dd_bar(s, a: Form) -> Form:
    """∂∂̄a for a pure-type form."""
    p, q = pure_type(a)
    return partial(s, partial(s, a, p, q + 1), p + 1, q + 1)


def ddbar_omega_formula(d: BismutData) -> Form:
    """Σ {½(T^ℓ_{ik,j̄} − T^j_{ik,ℓ̄}) − P^{jℓ}_{ik}} φ_i∧φ_k∧φ̄_j∧φ̄_ℓ."""
    n = d.n
    d01 = d.dT[..., n:]
    coeff = 0.5 * (np.einsum("likj->ikjl", d01) - np.einsum("jikl->ikjl", d01)) - p_tensor(d.T)
    terms = {}
    for i in range(n):
        for k in range(n):
            for j in range(n):
                for l in range(n):
                    c = coeff[i, k, j, l]
                    if c != 0:
                        terms[(i, k, n + j, n + l)] = terms.get((i, k, n + j, n + l), 0) + c
    return Form(n, terms)


def pluriclosed_expansion(d: BismutData):
    """Residual between i∂∂̄ω computed by form algebra and its torsion expansion."""
    s = d.bundle.structure
    direct = dd_bar(s, kahler_form(s.n)) * 1j
    return (direct - ddbar_omega_formula(d)).max_abs()


def pluriclosed_tau_expansion(d: BismutData):
    """i∂∂̄ω = Σ τ_k∧τ̄_k + Σ φ_i∧Θ_{ij}∧φ̄_j with Θ the Chern curvature."""
    s = d.bundle.structure
    n = s.n
    direct = dd_bar(s, kahler_form(n)) * 1j
    taus = d.bundle.tau_forms()
    acc = Form(n)
    for t in taus:
        acc = acc + wedge(t, conjugate(t))
    Th = d.Rc.data.transpose(2, 3, 0, 1)
    for i in range(n):
        for j in range(n):
            acc = acc + wedge(wedge(Form.phi(n, i + 1), Form.from_matrix(n, Th[i, j])), Form.phibar(n, j + 1))
    return (direct - acc).max_abs()


def torsion_parallel_equivalence(d: BismutData):
    """(residual of T^b against its closed form, |∇^bT^b|, |∇^bT^c|)."""
    b = d.bundle
    direct = torsion_vectors(b, b.thetaB)
    closed = bismut_torsion_vectors(b)
    # Tb[a, b, c] is the E_c component of T^b(E_a, E_b); its ∇ uses the block connection
    dTb = _cov_full(closed, b.thetaB)
    return _res(direct - closed), _res(dTb), _res(d.dT)


def _cov_full(X, m):
    """∇ of a tensor with two lower and one upper 2n-slot, constant components."""
    from .connections import bar

    n = m.shape[0]
    big = np.zeros((2 * n, 2 * n, 2 * n), complex)
    big[:n, :n] = m
    big[n:, n:] = bar(m)
    out = -np.einsum("rbc,arx->abcx", X, big)
    out -= np.einsum("arc,brx->abcx", X, big)
    out += np.einsum("abr,rcx->abcx", X, big)
    return out


def phi_b_ricq_relation(d: BismutData):
    """φ + φ* − (B − ¼Ric(Q)); meaningful on BTP structures."""
    T = d.T
    Phi = phi_matrix(T, d.eta)
    lhs = Phi + Phi.conj().T
    rhs = b_tensor(T) - 0.25 * ric_q(d.Rb.r11)
    return _res(lhs - rhs)


IDENTITY_CHECKS = {
    "curv20": curv20,
    "curv11": curv11,
    "pT": pT,
    "dbT": dbT,
    "dR_30": dR30,
    "dR_21": dR21,
    "pT_refined": pT_refined,
    "permutation": permutation,
    "dbT_refined": dbT_refined,
    "peta": peta,
    "dbeta": dbeta,
}


def identity_suite(s: LieHermitianStructure, data=None, tol=None) -> dict:
    """Residual of every identity on one structure."""
    tol = resolve_tol(tol)
    d = bismut_data(s) if data is None else data
    out = {name: fn(d) for name, fn in IDENTITY_CHECKS.items()}
    out["ddbar_omega_expansion"] = pluriclosed_expansion(d)
    out["ddbar_omega_tau_expansion"] = pluriclosed_tau_expansion(d)
    tb_closed, dtb, dtc = torsion_parallel_equivalence(d)
    out["bismut_torsion_closed_form"] = tb_closed
    out["bismut_torsion_parallel_agreement"] = abs(float(dtb < tol) - float(dtc < tol))
    if dtc < tol:
        out["phi_b_ricq_relation"] = phi_b_ricq_relation(d)
    return out
