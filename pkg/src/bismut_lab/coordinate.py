"""Point evaluation of Hermitian metrics given by rational expressions in (z, z̄).

A metric is an n × n array of expressions for g_{i j̄}.  Everything here is
computed at a single point from the degree-2 jets of those expressions.

Array layouts:
  dg[i, j, a]      = ∂_a g_{i j̄}, a over (z_1..z_n, z̄_1..z̄_n)
  ddg[i, j, a, b]  = ∂_a ∂_b g_{i j̄}
  T[j, i, k]       = T^j_{ik}
  dT[j, i, k, a]   = ∂_a T^j_{ik}
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import resolve_tol
from .expr import Var, as_expr, conj_expr, evaluate_at, linear_combination, substitute, to_text
from .jets import jet_evaluate
from .tensors import Curvature4Tensor, b_tensor, trace_eta


@dataclass(frozen=True)
class CoordinateMetric:
    n: int
    components: tuple  # components[i][j] is the expression for g_{i j̄}
    point: tuple

    @classmethod
    def from_components(cls, components, point=None):
        rows = tuple(tuple(as_expr(c) for c in row) for row in components)
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise ValueError("metric components must form a square array")
        pt = tuple(complex(x) for x in point) if point is not None else (0j,) * n
        if len(pt) != n:
            raise ValueError(f"point has {len(pt)} coordinates, expected {n}")
        return cls(n, rows, pt)

    def texts(self):
        return [[to_text(c) for c in row] for row in self.components]

    def value_at(self, p=None):
        p = self.point if p is None else p
        return np.array([[complex(evaluate_at(c, p)) for c in row] for row in self.components])

    def validate(self, tol=None, p=None):
        tol = resolve_tol(tol)
        G = self.value_at(p)
        herm = float(np.max(np.abs(G - G.conj().T)))
        ev = np.linalg.eigvalsh((G + G.conj().T) / 2)
        return {
            "n": self.n,
            "hermitian_residual": herm,
            "min_eigenvalue": float(ev[0]),
            "accepted": bool(herm < tol and ev[0] > tol),
            "tol": tol,
        }


@dataclass(frozen=True)
class MetricJets:
    point: np.ndarray
    g: np.ndarray
    ginv: np.ndarray
    dg: np.ndarray
    ddg: np.ndarray

    @property
    def n(self):
        return self.g.shape[0]

    def normalization_residual(self):
        return float(np.max(np.abs(self.g - np.eye(self.n))))

    def conjugation_residual(self):
        """Mismatch between ∂_a g_{i j̄} and conj(∂_{ā} g_{j ī}), and Hermitian symmetry of g."""
        n = self.n
        sigma = np.r_[np.arange(n, 2 * n), np.arange(n)]
        d = np.abs(self.dg - np.conj(self.dg.transpose(1, 0, 2)[:, :, sigma]))
        return float(max(np.max(d), np.max(np.abs(self.g - self.g.conj().T))))


def metric_jets(m: CoordinateMetric, p=None) -> MetricJets:
    p = np.asarray(m.point if p is None else p, dtype=complex)
    n = m.n
    g = np.zeros((n, n), complex)
    dg = np.zeros((n, n, 2 * n), complex)
    ddg = np.zeros((n, n, 2 * n, 2 * n), complex)
    for i in range(n):
        for j in range(n):
            jet = jet_evaluate(m.components[i][j], p)
            g[i, j] = jet.c0
            dg[i, j] = jet.c1
            ddg[i, j] = jet.c2
    if abs(np.linalg.det(g)) < 1e-14 * max(1.0, float(np.max(np.abs(g)))) ** n:
        raise ValueError("metric is singular at the evaluation point")
    return MetricJets(point=p, g=g, ginv=np.linalg.inv(g), dg=dg, ddg=ddg)


def normalize_point(m: CoordinateMetric, p=None, tol=None) -> CoordinateMetric:
    """Substitute z = p + M w so that the metric is the identity at w = 0.

    With g(p) = C Cᴴ (Cholesky), M = (C⁻¹)ᵀ and g'_{a b̄} = Σ M_{ia} conj(M_{jb}) g_{i j̄}.
    """
    tol = resolve_tol(tol)
    p = np.asarray(m.point if p is None else p, dtype=complex)
    n = m.n
    G = m.value_at(p)
    if float(np.max(np.abs(G - G.conj().T))) > tol:
        raise ValueError("metric is not Hermitian at the point")
    try:
        C = np.linalg.cholesky((G + G.conj().T) / 2)
    except np.linalg.LinAlgError:
        raise ValueError("metric is not positive definite at the point") from None
    M = np.linalg.inv(C).T
    identity = np.allclose(M, np.eye(n), rtol=0, atol=1e-15)
    mapping = {}
    if np.any(p != 0) or not identity:
        for k in range(n):
            lin = [(M[k, a], Var(a + 1)) for a in range(n)]
            mapping[(k + 1, False)] = linear_combination(p[k], lin)
            mapping[(k + 1, True)] = conj_expr(mapping[(k + 1, False)])
    moved = [[substitute(c, mapping) if mapping else c for c in row] for row in m.components]
    if identity:
        rows = moved
    else:
        rows = []
        for a in range(n):
            row = []
            for b in range(n):
                coeffs = [(M[i, a] * np.conj(M[j, b]), moved[i][j]) for i in range(n) for j in range(n)]
                row.append(linear_combination(0, coeffs))
            rows.append(row)
    return CoordinateMetric(n, tuple(tuple(r) for r in rows), (0j,) * n)


def _require_normalized(mj: MetricJets, tol, what):
    if mj.normalization_residual() > tol:
        raise ValueError(f"{what} needs g = identity at the point; call normalize_point first")


def chern_torsion_at(mj: MetricJets):
    """T^j_{ik} = ½ Σ_ℓ (g_{k ℓ̄,i} − g_{i ℓ̄,k}) g^{ℓ̄ j}."""
    n = mj.n
    d = mj.dg[:, :, :n]  # d[i, l, k] = g_{i ℓ̄,k}
    diff = d.transpose(2, 1, 0) - d  # diff[i, l, k] = g_{k ℓ̄,i} − g_{i ℓ̄,k}
    return 0.5 * np.einsum("ilk,lj->jik", diff, mj.ginv)


def _ginv_derivative(mj):
    return -np.einsum("lp,pqa,qj->lja", mj.ginv, mj.dg, mj.ginv)


def torsion_derivative_at(mj: MetricJets):
    """dT[j, i, k, a] = ∂_a T^j_{ik} from the second derivatives of g."""
    n = mj.n
    d = mj.dg[:, :, :n]
    dd = mj.ddg[:, :, :n, :]  # dd[i, l, k, a] = ∂_a g_{i ℓ̄,k}
    diff = d.transpose(2, 1, 0) - d
    ddiff = dd.transpose(2, 1, 0, 3) - dd
    return 0.5 * (
        np.einsum("ilka,lj->jika", ddiff, mj.ginv)
        + np.einsum("ilk,lja->jika", diff, _ginv_derivative(mj))
    )


def chern_connection_at(mj: MetricJets):
    """Γ[k, i, r] with ∇^c_{∂_k} ∂_i = Σ_r Γ[k, i, r] ∂_r, i.e. θ = ∂g·g⁻¹."""
    n = mj.n
    return np.einsum("imk,mr->kir", mj.dg[:, :, :n], mj.ginv)


def chern_torsion_covariant_derivative_at(mj: MetricJets, T=None, dT=None):
    """T^j_{ik;ℓ} and T^j_{ik;ℓ̄} for the Chern connection, stacked on the last axis."""
    n = mj.n
    T = chern_torsion_at(mj) if T is None else T
    dT = torsion_derivative_at(mj) if dT is None else dT
    G = chern_connection_at(mj)
    out = np.array(dT, dtype=complex)
    out[..., :n] += (
        -np.einsum("lir,jrk->jikl", G, T)
        - np.einsum("lkr,jir->jikl", G, T)
        + np.einsum("lrj,rik->jikl", G, T)
    )
    return out


def chern_curvature_at(mj: MetricJets) -> Curvature4Tensor:
    """R^c_{k ℓ̄ i j̄} = −g_{i j̄,k ℓ̄} + Σ g_{i p̄,k} conj(g_{j q̄,ℓ}) g^{p̄ q}."""
    n = mj.n
    d = mj.dg[:, :, :n]
    second = mj.ddg[:, :, :n, n:]  # second[i, j, k, l] = g_{i j̄,k ℓ̄}
    R = -second.transpose(2, 3, 0, 1) + np.einsum("ipk,jql,pq->klij", d, np.conj(d), mj.ginv)
    data = np.zeros((2 * n, 2 * n, n, n), complex)
    data[:n, n:] = R
    data[n:, :n] = -R.transpose(1, 0, 2, 3)
    return Curvature4Tensor("chern", data)


def btp_residual_at(mj: MetricJets, T=None, dT=None, tol=None):
    """Residuals of the pointwise ∇^bT = 0 equations in holomorphic and antiholomorphic directions."""
    tol = resolve_tol(tol)
    _require_normalized(mj, tol, "the BTP point check")
    n = mj.n
    T = chern_torsion_at(mj) if T is None else T
    dT = torsion_derivative_at(mj) if dT is None else dT
    d = mj.dg[:, :, :n]  # d[l, r, i] = g_{ℓ r̄,i}
    rhs10 = (
        np.einsum("lri,jrk->jikl", d, T)
        + np.einsum("lrk,jir->jikl", d, T)
        - np.einsum("ljr,rik->jikl", d, T)
    )
    Tc = np.conj(T)
    rhs01 = 2 * (
        np.einsum("jir,klr->jikl", T, Tc)
        - np.einsum("jkr,ilr->jikl", T, Tc)
        + np.einsum("rik,rjl->jikl", T, Tc)
    )
    hol = float(np.max(np.abs(dT[..., :n] - rhs10)))
    anti = float(np.max(np.abs(dT[..., n:] - rhs01)))
    return {"holomorphic": hol, "antiholomorphic": anti, "btp": bool(max(hol, anti) < tol), "tol": tol}


def riemannian_components(T, dT10, Rc11):
    """R_{i j k ℓ̄} and R_{k ℓ̄ i j̄} in a unitary frame from Chern data.

    dT10[l, i, j, k] = T^ℓ_{ij;k} (Chern), Rc11[k, l, i, j] = R^c_{k ℓ̄ i j̄}.
    Returns (r20[i, j, k, l], r11[k, l, i, j]).
    """
    Tc = np.conj(T)
    r20 = (
        dT10.transpose(1, 2, 3, 0)
        + np.einsum("lri,rjk->ijkl", T, T)
        - np.einsum("lrj,rik->ijkl", T, T)
    )
    r11 = (
        0.5 * (Rc11.transpose(2, 1, 0, 3) + Rc11.transpose(0, 3, 2, 1))
        + np.einsum("rik,rjl->klij", T, Tc)
        - np.einsum("jkr,ilr->klij", T, Tc)
        - np.einsum("lir,kjr->klij", T, Tc)
    )
    return r20, r11


def full_metric(mj: MetricJets):
    """The metric on the complexified coordinate frame (∂_z, ∂_z̄) and its first two derivatives."""
    n = mj.n
    G = np.zeros((2 * n, 2 * n), complex)
    G[:n, n:] = mj.g
    G[n:, :n] = mj.g.T
    dG = np.zeros((2 * n, 2 * n, 2 * n), complex)
    dG[:n, n:] = mj.dg
    dG[n:, :n] = mj.dg.transpose(1, 0, 2)
    ddG = np.zeros((2 * n,) * 4, complex)
    ddG[:n, n:] = mj.ddg
    ddG[n:, :n] = mj.ddg.transpose(1, 0, 2, 3)
    return G, dG, ddG


def levi_civita_curvature_at(mj: MetricJets):
    """R[a, b, c, d] = g(R(∂_a, ∂_b)∂_c, ∂_d) on the complexified coordinate frame.

    Uses the Christoffel symbols of the underlying Riemannian metric, so it
    holds at any point with no assumption on torsion.
    """
    G, dG, ddG = full_metric(mj)
    Gi = np.linalg.inv(G)
    dGi = -np.einsum("ab,bce,cd->ade", Gi, dG, Gi)
    # first kind: Γ1[a, b, d] = g(∇_a ∂_b, ∂_d)
    G1 = 0.5 * (dG.transpose(2, 0, 1) + dG.transpose(0, 2, 1) - dG)
    dG1 = 0.5 * (ddG.transpose(2, 0, 1, 3) + ddG.transpose(0, 2, 1, 3) - ddG)
    Gam = np.einsum("abd,df->abf", G1, Gi)
    dGam = np.einsum("abde,df->abfe", dG1, Gi) + np.einsum("abd,dfe->abfe", G1, dGi)
    Rvec = (
        np.einsum("bcfa->abcf", dGam)
        - np.einsum("acfb->abcf", dGam)
        + np.einsum("bce,aef->abcf", Gam, Gam)
        - np.einsum("ace,bef->abcf", Gam, Gam)
    )
    return np.einsum("abcf,fd->abcd", Rvec, G)


def _real_vector(X):
    X = np.asarray(X, dtype=complex)
    return np.r_[X, np.conj(X)]


@dataclass(frozen=True)
class RiemannianPointData:
    """Levi-Civita curvature at a normalized point.

    r20 and r11 come from the Chern-data formulas, which are only reliable
    when the metric is BTP at the point; precondition_ok records that.
    full is the exact tensor from the Christoffel symbols.
    """

    r20: np.ndarray
    r11: np.ndarray
    full: np.ndarray
    G: np.ndarray
    precondition_ok: bool
    formula_residual: float

    @property
    def warning(self):
        if self.precondition_ok:
            return None
        return "metric is not BTP at the point; the Chern-data formulas were applied anyway"

    def _inner(self, u, v):
        return complex(u @ self.G @ v)

    def rxyyx(self, X, Y):
        """R(x, y, y, x) for real vectors x = X + X̄, y = Y + Ȳ."""
        x, y = _real_vector(X), _real_vector(Y)
        return float(np.einsum("abcd,a,b,c,d->", self.full, x, y, y, x).real)

    def rxyyx_expansion(self, X, Y):
        """R(x, y, y, x) from R_{i j̄ k ℓ̄} alone, valid when R_{XYZW} = R_{XYZW̄} = 0."""
        X, Y = np.asarray(X, complex), np.asarray(Y, complex)
        R = self.r11
        Xc, Yc = np.conj(X), np.conj(Y)
        t1 = np.einsum("ijkl,i,j,k,l->", R, X, Xc, Y, Yc)
        t2 = np.einsum("ijkl,i,j,k,l->", R, X, Yc, Y, Xc)
        t3 = np.einsum("ijkl,i,j,k,l->", R, X, Yc, X, Yc)
        return float((-2 * t1 + 4 * t2 - 2 * t3).real)

    def sectional_curvature(self, X, Y):
        x, y = _real_vector(X), _real_vector(Y)
        gxx, gyy, gxy = (self._inner(x, x).real, self._inner(y, y).real, self._inner(x, y).real)
        area = gxx * gyy - gxy**2
        if area <= 1e-14 * max(1.0, gxx * gyy):
            raise ValueError("x and y span a degenerate plane")
        return self.rxyyx(X, Y) / area

    def ricci_tensor(self):
        """Ric[b, c] = Σ R(∂_a, ∂_b, ∂_c, ∂_d) g^{d a}."""
        return np.einsum("abcd,da->bc", self.full, np.linalg.inv(self.G))

    def ricci(self, X):
        """Ric(x, x)/g(x, x) for the real vector x = X + X̄."""
        x = _real_vector(X)
        return float((x @ self.ricci_tensor() @ x).real / self._inner(x, x).real)


def riemannian_at(mj: MetricJets, T=None, Rc=None, tol=None) -> RiemannianPointData:
    tol = resolve_tol(tol)
    _require_normalized(mj, tol, "the Riemannian point formulas")
    n = mj.n
    T = chern_torsion_at(mj) if T is None else T
    Rc = chern_curvature_at(mj) if Rc is None else Rc
    dT = torsion_derivative_at(mj)
    cov = chern_torsion_covariant_derivative_at(mj, T, dT)
    r20, r11 = riemannian_components(T, cov[..., :n], Rc.r11)
    btp = btp_residual_at(mj, T, dT, tol)
    full = levi_civita_curvature_at(mj)
    exact20 = full[:n, :n, :n, n:]
    exact11 = full[:n, n:, :n, n:]
    residual = float(max(np.max(np.abs(exact20 - r20)), np.max(np.abs(exact11 - r11))))
    G, _, _ = full_metric(mj)
    return RiemannianPointData(r20=r20, r11=r11, full=full, G=G, precondition_ok=btp["btp"],
                               formula_residual=residual)


def bisectional_curvature(Rc: Curvature4Tensor, X, Y):
    """R^c_{X X̄ Y Ȳ}."""
    X, Y = np.asarray(X, complex), np.asarray(Y, complex)
    return float(np.einsum("klij,k,l,i,j->", Rc.r11, X, np.conj(X), Y, np.conj(Y)).real)


def holomorphic_sectional_curvature(Rc: Curvature4Tensor, X):
    X = np.asarray(X, complex)
    return bisectional_curvature(Rc, X, X) / float(np.vdot(X, X).real) ** 2


def point_report(m: CoordinateMetric, tol=None, normalize=True):
    """Condition flags of a coordinate metric at its declared point."""
    tol = resolve_tol(tol)
    valid = m.validate(tol)
    if not valid["accepted"]:
        return {"validation": valid}
    mn = normalize_point(m, tol=tol) if normalize else m
    mj = metric_jets(mn)
    n = m.n
    T = chern_torsion_at(mj)
    eta = trace_eta(T)
    btp = btp_residual_at(mj, T, tol=tol)
    flags = {}
    flags["kahler"] = {"value": bool(np.max(np.abs(T), initial=0) < tol), "residual": float(np.max(np.abs(T)))}
    flags["balanced"] = {"value": bool(np.max(np.abs(eta)) < tol), "residual": float(np.max(np.abs(eta)))}
    flags["btp"] = {"value": btp["btp"], "residual": max(btp["holomorphic"], btp["antiholomorphic"]),
                    "holomorphic": btp["holomorphic"], "antiholomorphic": btp["antiholomorphic"]}
    if n > 1:
        eye = np.eye(n)
        shape = (np.einsum("k,ij->jik", eta, eye) - np.einsum("i,kj->jik", eta, eye)) / (n - 1)
        lck_res = float(np.max(np.abs(T - shape)))
    else:
        lck_res = 0.0
    flags["lck_shape"] = {"value": bool(lck_res < tol), "residual": lck_res}
    flags["vaisman"] = {"value": bool(flags["lck_shape"]["value"] and btp["btp"]),
                        "residual": max(lck_res, flags["btp"]["residual"])}
    B = b_tensor(T)
    ev = np.linalg.eigvalsh((B + B.conj().T) / 2)
    rank = int(np.sum(np.abs(ev) > tol * max(1.0, float(np.max(np.abs(ev), initial=0)))))
    if flags["kahler"]["value"]:
        label = "kahler"
    elif flags["vaisman"]["value"] and not flags["balanced"]["value"]:
        label = "vaisman"
    elif n == 3 and flags["balanced"]["value"] and btp["btp"]:
        label = {1: "wallach-type (rank 1)", 2: "middle type (rank 2)",
                 3: "chern-flat SO(3,ℂ)-type (rank 3)"}.get(rank, "unclassified")
    else:
        label = "unclassified"
    return {
        "validation": valid,
        "flags": flags,
        "rank_B": rank,
        "B_eigenvalues": [float(x) for x in ev],
        "eta": [[float(z.real), float(z.imag)] for z in eta],
        "classification": {"label": label},
    }
