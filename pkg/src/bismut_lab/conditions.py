"""Metric conditions, admissible and special frames, and threefold classification."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .config import resolve_tol
from .connections import covariant_derivative
from .forms import Form, bidegree_part, conjugate, wedge
from .identities import BismutData, bismut_data, dd_bar, kahler_form, pluriclosed_expansion
from .structure import LieHermitianStructure, exterior_derivative, unitary_change
from .tensors import b_tensor, phi_matrix, ric_q, trace_eta

LABELS = (
    "kahler",
    "eigenvalue branch (1)",
    "BKL",
    "generalized-vaisman",
    "wallach-type (rank 1)",
    "middle type (rank 2)",
    "chern-flat SO(3,ℂ)-type (rank 3)",
    "unclassified",
    "not a threefold",
)


def _res(x):
    return float(np.max(np.abs(x), initial=0.0))


def _flag(residual, tol, **extra):
    out = {"value": bool(residual < tol), "residual": float(residual)}
    out.update(extra)
    return out


def _cplx(z):
    return [float(np.real(z)), float(np.imag(z))]


@dataclass
class ConditionReport:
    n: int
    tol: float
    flags: dict
    rank_B: int
    B_eigenvalues: list
    classification: dict = field(default_factory=dict)

    def flag(self, name):
        return self.flags[name]["value"]

    def to_dict(self):
        return {
            "n": self.n,
            "tol": self.tol,
            "flags": self.flags,
            "rank_B": self.rank_B,
            "B_eigenvalues": self.B_eigenvalues,
            "classification": self.classification,
        }


@dataclass
class AdmissibleFrameResult:
    U: np.ndarray
    lam: float
    a: np.ndarray  # a_1..a_{n-1}, with a_n = 0 implied
    eigenvalues: np.ndarray  # λ a_i, the nonzero-slot eigenvalues of the φ-matrix
    residual: float
    structure: LieHermitianStructure


@dataclass
class SpecialFrameResult:
    U: np.ndarray
    a: tuple
    trace_residual: float
    normal_form_residual: float
    structure: LieHermitianStructure


def eta_form(n, eta) -> Form:
    return Form.from_vector(n, np.r_[eta, np.zeros(n)])


def omega_power(n, k) -> Form:
    w = kahler_form(n)
    out = Form.scalar(n, 1)
    for _ in range(k):
        out = wedge(out, w)
    return out


def rank_with_threshold(M, tol):
    ev = np.linalg.eigvalsh((M + M.conj().T) / 2)
    thresh = tol * max(1.0, float(np.linalg.norm(M, 2)))
    return int(np.sum(np.abs(ev) > thresh)), ev


def curvature_criterion_residuals(d: BismutData):
    """Residuals of the four curvature conditions equivalent to ∇^bT = 0."""
    R11 = d.Rb.r11
    ricQ = ric_q(R11)
    d_ric = covariant_derivative(ricQ, ("l", "lb"), d.bundle.thetaB)
    return {
        "r20_vanishes": _res(d.Rb.r20),
        "r11_pair_symmetric": _res(R11 - R11.transpose(2, 3, 0, 1)),
        "ricQ_parallel": _res(d_ric),
        "eta_ricQ_vanishes": _res(np.einsum("i,ij->j", np.conj(d.eta), ricQ)),
    }


def lee_closedness(s, eta):
    e = eta_form(s.n, eta)
    return exterior_derivative(s, e + conjugate(e)).max_abs()


def lck_fit(s, T, eta, tol):
    n = s.n
    shape = (np.einsum("k,ij->jik", eta, np.eye(n)) - np.einsum("i,kj->jik", eta, np.eye(n))) / (n - 1)
    shape_res = _res(T - shape)
    closed = lee_closedness(s, eta)
    return _flag(max(shape_res, closed), tol, shape_residual=shape_res, lee_closed_residual=closed,
                 eta=[_cplx(z) for z in eta])


def lp_fit(s, eta, tol):
    """∂η = 0 and ∂ω = c η∧∂η̄ with c fitted by least squares."""
    n = s.n
    e = eta_form(n, eta)
    d_eta = bidegree_part(exterior_derivative(s, e), 2, 0)
    d_omega = bidegree_part(exterior_derivative(s, kahler_form(n)), 2, 1)
    X = wedge(e, bidegree_part(exterior_derivative(s, conjugate(e)), 1, 1))
    keys = sorted(set(X.terms) | set(d_omega.terms))
    xv = np.array([X.terms.get(k, 0) for k in keys], complex)
    yv = np.array([d_omega.terms.get(k, 0) for k in keys], complex)
    nx = float(np.vdot(xv, xv).real)
    c = complex(np.vdot(xv, yv) / nx) if nx > tol**2 else 0j
    fit = _res(yv - c * xv) if len(keys) else 0.0
    residual = max(d_eta.max_abs(), fit)
    out = _flag(residual, tol, d_eta_residual=d_eta.max_abs(), fit_residual=fit, c=_cplx(c))
    out["value"] = bool(residual < tol and abs(c) >= tol)
    return out


def check_all(s: LieHermitianStructure, tol=None, data=None) -> ConditionReport:
    tol = resolve_tol(tol)
    n = s.n
    d = bismut_data(s) if data is None else data
    T = d.T
    eta = d.eta
    flags = {}
    flags["kahler"] = _flag(_res(T), tol)
    flags["balanced"] = _flag(_res(eta), tol)
    flags["gauduchon"] = _flag(dd_bar(s, omega_power(n, n - 1)).max_abs(), tol)
    ddw = dd_bar(s, kahler_form(n)).max_abs()
    flags["pluriclosed"] = _flag(ddw, tol, expansion_crosscheck_residual=pluriclosed_expansion(d))
    flags["btp_direct"] = _flag(_res(d.dT), tol)
    parts = curvature_criterion_residuals(d)
    flags["btp_theorem"] = _flag(max(parts.values()), tol, conditions=parts)
    R11 = d.Rb.r11
    Q = R11 - R11.transpose(2, 1, 0, 3)
    flags["bkl"] = _flag(max(_res(d.Rb.r20), _res(Q)), tol)
    flags["lck"] = lck_fit(s, T, eta, tol)
    btp = flags["btp_direct"]["value"]
    flags["vaisman"] = {"value": bool(flags["lck"]["value"] and btp),
                        "residual": max(flags["lck"]["residual"], flags["btp_direct"]["residual"])}
    flags["lp"] = lp_fit(s, eta, tol)
    flags["degenerate_torsion"] = {"value": None, "residual": None}
    if btp and not flags["balanced"]["value"]:
        try:
            adm = admissible_frame(s, tol, data=d)
            T2 = _torsion(adm.structure)
            res = _res(T2[:, : n - 1, : n - 1])
            flags["degenerate_torsion"] = _flag(res, tol)
            flags["lp"]["agrees_with_degenerate_torsion"] = bool(flags["lp"]["value"] == (res < tol))
        except ValueError as exc:
            flags["degenerate_torsion"] = {"value": None, "residual": None, "error": str(exc)}
    flags["gce"] = {"value": bool(flags["lp"]["value"] and btp),
                    "residual": max(flags["lp"]["residual"], flags["btp_direct"]["residual"])}
    B = b_tensor(T)
    rank, ev = rank_with_threshold(B, tol)
    report = ConditionReport(n=n, tol=tol, flags=flags, rank_B=rank, B_eigenvalues=[float(x) for x in ev])
    if n == 3:
        report.classification = classify_threefold(s, tol, data=d, report=report)
    else:
        report.classification = {"label": "not a threefold"}
    return report


def _torsion(s):
    from .connections import chern_data

    return chern_data(s).T


def admissible_frame(s: LieHermitianStructure, tol=None, data=None) -> AdmissibleFrameResult:
    """Unitary frame with η = λφ_n and diagonal φ-matrix, for non-balanced BTP structures."""
    tol = resolve_tol(tol)
    n = s.n
    d = bismut_data(s) if data is None else data
    eta = d.eta
    lam = float(np.linalg.norm(eta))
    if lam < tol:
        raise ValueError("structure is balanced; admissible frames need η ≠ 0")
    if _res(d.dT) >= tol:
        raise ValueError("structure is not BTP")
    # W = conj(U) acts on frames, e' = W e, and sends η to conj(U)η
    rest = scipy.linalg.null_space(eta[None, :])
    W = np.vstack([rest.T, np.conj(eta)[None, :] / lam])
    Phi = W @ phi_matrix(d.T, eta) @ W.conj().T
    block = Phi[: n - 1, : n - 1]
    normal_res = _res(block @ block.conj().T - block.conj().T @ block)
    if normal_res >= tol * max(1.0, lam**4):
        raise ValueError(f"φ-matrix block is not normal (residual {normal_res:.3g})")
    S, Z = scipy.linalg.schur(block, output="complex")
    ev = np.diag(S)
    order = sorted(range(n - 1), key=lambda i: (-round(ev[i].real, 12), -round(ev[i].imag, 12), i))
    Z = Z[:, order]
    W2 = np.eye(n, dtype=complex)
    W2[: n - 1, : n - 1] = Z.conj().T
    W = W2 @ W
    U = np.conj(W)
    s2 = unitary_change(s, U)
    T2 = _torsion(s2)
    eta2 = trace_eta(T2)
    Phi2 = phi_matrix(T2, eta2)
    target = np.zeros(n, complex)
    target[-1] = lam
    residual = max(_res(eta2 - target), _res(Phi2 - np.diag(np.diag(Phi2))))
    lambdas = np.diag(Phi2)[: n - 1]
    return AdmissibleFrameResult(U=U, lam=lam, a=lambdas / lam, eigenvalues=lambdas, residual=residual, structure=s2)


EPS3 = np.zeros((3, 3, 3))
for _i, _j, _k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    EPS3[_i, _j, _k] = 1
    EPS3[_j, _i, _k] = -1


def torsion_to_N(T):
    """N[ℓ, j] = ½ Σ ε_{ikℓ} T^j_{ik}; T^j_{ik} = Σ_ℓ ε_{ikℓ} N[ℓ, j] when T is in this image."""
    return 0.5 * np.einsum("ikl,jik->lj", EPS3, T)


def takagi(N, tol):
    """N = V diag(a) Vᵀ with V unitary and a ≥ 0 descending, for complex symmetric N."""
    n = N.shape[0]
    M = np.block([[N.real, N.imag], [N.imag, -N.real]])
    w, X = np.linalg.eigh(M)
    thresh = tol * max(1.0, float(np.linalg.norm(N, 2)))
    pos = [i for i in range(2 * n) if w[i] > thresh]
    pos = sorted(pos, key=lambda i: -w[i])  # sorted() is stable
    cols = [X[:n, i] + 1j * X[n:, i] for i in pos]
    vals = [float(w[i]) for i in pos]
    V = np.array(cols, complex).T.reshape(n, len(cols))
    if len(cols) < n:
        comp = scipy.linalg.null_space(V.conj().T) if len(cols) else np.eye(n, dtype=complex)
        V = np.hstack([V, comp])
        vals += [0.0] * (n - len(cols))
    a = np.array(vals)
    residual = _res(V @ np.diag(a) @ V.T - N)
    return V, a, residual


def _special_residuals(T, a=None):
    r61 = _res(np.einsum("iik->ik", T))
    vals = (T[0, 1, 2].real, T[1, 2, 0].real, T[2, 0, 1].real)
    if a is None:
        a = vals
    target = np.einsum("ikj,j->jik", EPS3, np.asarray(a, float))
    r63 = _res(T - target)
    ordered = a[0] >= a[1] - 1e-15 and a[1] >= a[2] - 1e-15 and a[2] >= -1e-15
    return r61, r63, ordered


def special_frame(s: LieHermitianStructure, tol=None) -> SpecialFrameResult:
    """Frame with T^i_{ik} = 0 and T^1_{23} = a1 ≥ T^2_{31} = a2 ≥ T^3_{12} = a3 ≥ 0."""
    tol = resolve_tol(tol)
    if s.n != 3:
        raise ValueError("special frames are defined for threefolds only")
    T = _torsion(s)
    if _res(trace_eta(T)) >= tol:
        raise ValueError("structure is not balanced")
    r61, r63, ordered = _special_residuals(T)
    if r61 < tol and r63 < tol and ordered:
        a = (float(T[0, 1, 2].real), float(T[1, 2, 0].real), float(T[2, 0, 1].real))
        return SpecialFrameResult(U=np.eye(3, dtype=complex), a=a, trace_residual=r61, normal_form_residual=r63, structure=s)
    N = torsion_to_N(T)
    sym = _res(N - N.T)
    if sym >= tol:
        raise ValueError(f"torsion matrix N is not symmetric (residual {sym:.3g})")
    V, a, tres = takagi((N + N.T) / 2, tol)
    if tres >= tol * max(1.0, float(np.linalg.norm(N))):
        raise ValueError(f"Takagi factorization failed (residual {tres:.3g})")
    U = np.linalg.det(V) * V.conj().T
    s2 = unitary_change(s, U)
    T2 = _torsion(s2)
    r61, r63, _ = _special_residuals(T2, a)
    return SpecialFrameResult(U=U, a=tuple(float(x) for x in a), trace_residual=r61, normal_form_residual=r63, structure=s2)


def middle_type_constants(s: LieHermitianStructure, tol=None):
    """x, y, z of dα, dβ for a balanced BTP threefold with rank B = 2.

    The structure is rescaled so that a1 = a2 = 1/2 in a special frame; there
    θ^b = [[α, β, 0], [−β, α, 0], [0, 0, 0]] and
    dα = x(φ11̄ + φ22̄) + iy(φ21̄ − φ12̄), dβ = −iy(φ11̄ + φ22̄) + z(φ21̄ − φ12̄).
    """
    from .connections import full_bundle

    tol = resolve_tol(tol)
    sf = special_frame(s, tol)
    a1 = sf.a[0]
    if a1 < tol:
        raise ValueError("torsion vanishes; no middle-type normalization")
    c = 2 * a1
    s2 = LieHermitianStructure.from_matrices(np.array(sf.structure.dphi) / c)
    b = full_bundle(s2)
    th = b.thetaB
    n = 3
    alpha, beta = th[0, 0], th[0, 1]
    shape_res = max(_res(th[:, 2]), _res(th[2, :]), _res(th[1, 1] - alpha), _res(th[1, 0] + beta))
    da = np.einsum("c,cab->ab", alpha, s2.dgen)
    db = np.einsum("c,cab->ab", beta, s2.dgen)
    x = da[0, n + 0]
    y = da[1, n + 0] / 1j
    z = db[1, n + 0]

    def template(p, q):
        # p(φ11̄ + φ22̄) + q(φ21̄ − φ12̄)
        F = np.zeros((6, 6), complex)
        F[0, 3] = F[1, 4] = p
        F[1, 3] = q
        F[0, 4] = -q
        return F - F.T

    fit = max(_res(da - template(x, 1j * y)), _res(db - template(-1j * y, z)))
    return {
        "x": float(x.real),
        "y": float(y.real),
        "z": float(z.real),
        "imag_residual": float(max(abs(x.imag), abs(y.imag), abs(z.imag))),
        "x_minus_z_minus_2": float(abs(x - z - 2)),
        "theta_b_shape_residual": shape_res,
        "structure_fit_residual": fit,
        "scale": float(c),
        "special_a": list(sf.a),
    }


def classify_threefold(s: LieHermitianStructure, tol=None, data=None, report=None) -> dict:
    tol = resolve_tol(tol)
    if s.n != 3:
        raise ValueError("classification is defined for threefolds only")
    d = bismut_data(s) if data is None else data
    T = d.T
    if _res(T) < tol:
        return {"label": "kahler"}
    if _res(d.dT) >= tol:
        return {"label": "unclassified", "reason": "not BTP"}
    balanced = _res(d.eta) < tol
    if not balanced:
        adm = admissible_frame(s, tol, data=d)
        l1, l2 = adm.eigenvalues
        prod = l1 * np.conj(l2)
        plus = 2 * prod.real
        minus = 2j * prod.imag
        scale = max(1.0, abs(l1) ** 2 + abs(l2) ** 2)
        out = {
            "lambda": adm.lam,
            "phi_eigenvalues": [_cplx(l1), _cplx(l2)],
            "sum_term": float(plus),
            "difference_term": _cplx(minus),
        }
        if abs(plus) < tol * scale:
            out["label"] = "BKL"
        elif abs(minus) < tol * scale:
            closed = lee_closedness(s, d.eta)
            out["label"] = "generalized-vaisman"
            out["lee_closed_residual"] = closed
            if closed >= tol:
                out["label"] = "unclassified"
                out["reason"] = "eigenvalue test says generalized Vaisman but d(η + η̄) ≠ 0"
            elif abs(l1 - l2) < tol * max(1.0, abs(l1)):
                out["refinement"] = "vaisman"
        else:
            out["label"] = "eigenvalue branch (1)"
        return out
    rank, ev = rank_with_threshold(b_tensor(T), tol)
    out = {"rank_B": rank, "B_eigenvalues": [float(x) for x in ev]}
    if rank == 1:
        out["label"] = "wallach-type (rank 1)"
    elif rank == 3:
        out["label"] = "chern-flat SO(3,ℂ)-type (rank 3)"
        out["chern_curvature_max"] = d.Rc.max_abs()
    elif rank == 2:
        out["label"] = "middle type (rank 2)"
        out["middle_type"] = middle_type_constants(s, tol)
    else:
        out["label"] = "unclassified"
    return out
