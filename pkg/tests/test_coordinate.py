import numpy as np
import pytest

from bismut_lab import catalog
from bismut_lab.connections import covariant_derivative, curvature, full_bundle
from bismut_lab.coordinate import (
    CoordinateMetric,
    btp_residual_at,
    chern_curvature_at,
    chern_torsion_at,
    full_metric,
    holomorphic_sectional_curvature,
    bisectional_curvature,
    metric_jets,
    normalize_point,
    point_report,
    riemannian_at,
    riemannian_components,
)
from bismut_lab.structure import random_unitary, unitary_change

from conftest import COORD_CASES, case_id


def real_metric(m, u):
    n = m.n
    h = m.value_at(u[:n] + 1j * u[n:])
    return 2 * np.block([[h.real, h.imag], [-h.imag, h.real]])


def christoffel_fd(m, u, h=1e-6):
    """Γ[e, a, c] with ∇_a ∂_c = Σ_e Γ[e, a, c] ∂_e, real coordinates, central differences."""
    d = len(u)
    E = np.eye(d)
    dg = np.array([(real_metric(m, u + h * E[a]) - real_metric(m, u - h * E[a])) / (2 * h) for a in range(d)])
    ginv = np.linalg.inv(real_metric(m, u))
    # dg[a, f, c] = ∂_a g_fc
    lower = 0.5 * (dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg)  # lower[f, a, c]
    return np.einsum("ef,fac->eac", ginv, lower)


def riemann_fd(m, u, h=1e-4):
    """R[a, b, c, d] = g(R(∂_a, ∂_b)∂_c, ∂_d) in real coordinates."""
    d = len(u)
    E = np.eye(d)
    G0 = christoffel_fd(m, u)
    dG = np.array([(christoffel_fd(m, u + h * E[a]) - christoffel_fd(m, u - h * E[a])) / (2 * h) for a in range(d)])
    # dG[a, e, b, c] = ∂_a Γ^e_{bc}
    R = (np.einsum("aebc->abce", dG) - np.einsum("beac->abce", dG)
         + np.einsum("fbc,eaf->abce", G0, G0) - np.einsum("fac,ebf->abce", G0, G0))
    return np.einsum("abce,ed->abcd", R, real_metric(m, u))


def complex_frame(n):
    """Rows give ∂_{z_k} and ∂_{z̄_k} in the real basis (∂_x, ∂_y)."""
    I = np.eye(n)
    return 0.5 * np.block([[I, -1j * I], [I, 1j * I]])


@pytest.fixture(scope="module")
def wallach_point():
    mj = metric_jets(catalog.wallach())
    return mj, riemannian_at(mj)


def test_complex_frame_metric_convention(wallach_point):
    mj, _ = wallach_point
    P = complex_frame(3)
    G, _, _ = full_metric(mj)
    assert np.allclose(P @ real_metric(catalog.wallach(), np.zeros(6)) @ P.T, G, atol=1e-12)


def test_levi_civita_matches_real_coordinate_oracle(wallach_point):
    _, rd = wallach_point
    P = complex_frame(3)
    R = np.einsum("ar,bs,ct,du,rstu->abcd", P, P, P, P, riemann_fd(catalog.wallach(), np.zeros(6)))
    assert np.max(np.abs(R - rd.full)) < 1e-5


def test_levi_civita_oracle_away_from_origin():
    m = catalog.fubini_study(2)
    p = np.array([0.3 + 0.2j, -0.4j])
    u = np.r_[p.real, p.imag]
    P = complex_frame(2)
    R = np.einsum("ar,bs,ct,du,rstu->abcd", P, P, P, P, riemann_fd(m, u))
    from bismut_lab.coordinate import levi_civita_curvature_at

    mj = metric_jets(CoordinateMetric.from_components(m.components, p))
    assert np.max(np.abs(R - levi_civita_curvature_at(mj))) < 1e-5


def test_formulas_agree_with_exact_tensor(wallach_point):
    _, rd = wallach_point
    assert rd.precondition_ok
    assert rd.formula_residual < 1e-12


@pytest.mark.parametrize("name", ["so3c", "N3", "family_C", "nil3"])
def test_riemannian_formulas_on_lie_structures(name, rng):
    s = unitary_change(catalog.build(name), random_unitary(3, rng))
    b = full_bundle(s)
    n = s.n
    R = curvature(s, (b.theta1, b.theta2), "riemannian").full()
    Rc = curvature(s, b.theta, "chern")
    dT = covariant_derivative(b.T, ("u", "l", "l"), b.theta)[..., :n]
    r20, r11 = riemannian_components(b.T, dT, Rc.r11)
    assert np.max(np.abs(R[:n, :n, :n, n:] - r20)) < 1e-12
    assert np.max(np.abs(R[:n, n:, :n, n:] - r11)) < 1e-12


def test_fubini_study_curvature(rng):
    for n in (2, 3):
        mj = metric_jets(catalog.fubini_study(n))
        rd = riemannian_at(mj)
        Rc = chern_curvature_at(mj)
        for _ in range(20):
            X = rng.normal(size=n) + 1j * rng.normal(size=n)
            X /= np.linalg.norm(X) * np.sqrt(2)  # unit as a real vector
            assert rd.ricci(X) == pytest.approx(n + 1, abs=1e-9)
            assert rd.sectional_curvature(X, 1j * X) == pytest.approx(2, abs=1e-9)
            assert holomorphic_sectional_curvature(Rc, X) == pytest.approx(2, abs=1e-9)


def test_fubini_study_pinching(rng):
    rd = riemannian_at(metric_jets(catalog.fubini_study(2)))
    Rc = chern_curvature_at(metric_jets(catalog.fubini_study(2)))
    for _ in range(1000):
        X, Y = (rng.normal(size=2) + 1j * rng.normal(size=2) for _ in range(2))
        assert 0.5 - 1e-9 <= rd.sectional_curvature(X, Y) <= 2 + 1e-9
        b = bisectional_curvature(Rc, X, Y) / (np.vdot(X, X).real * np.vdot(Y, Y).real)
        assert 1 - 1e-9 <= b <= 2 + 1e-9


def test_normalization_off_origin(rng):
    m = CoordinateMetric.from_components(catalog.fubini_study(2).components, (0.3 + 0.2j, -0.5j))
    mj = metric_jets(normalize_point(m))
    assert mj.normalization_residual() < 1e-12
    rd = riemannian_at(mj)
    X = rng.normal(size=2) + 1j * rng.normal(size=2)
    assert rd.ricci(X / (np.linalg.norm(X) * np.sqrt(2))) == pytest.approx(3, abs=1e-9)
    assert rd.sectional_curvature(X, 1j * X) == pytest.approx(2, abs=1e-9)


def test_normalization_is_required():
    m = CoordinateMetric.from_components(catalog.fubini_study(2).components, (0.3, 0))
    with pytest.raises(ValueError):
        riemannian_at(metric_jets(m))


def test_hopf_torsion_by_hand():
    # g = e^f δ with f = −log|z|²; T^j_{ik} = ½(∂_i f δ_kj − ∂_k f δ_ij), ∂f = (−1, 0) at (1, 0)
    mj = metric_jets(normalize_point(catalog.hopf(2, 2)))
    T = chern_torsion_at(mj)
    want = np.zeros((2, 2, 2))
    want[1, 0, 1], want[1, 1, 0] = -0.5, 0.5
    assert np.allclose(T, want, atol=1e-12)
    assert btp_residual_at(mj, T)["btp"]


def test_hopf_off_axis_point():
    m = catalog.hopf(3, 2)
    m = CoordinateMetric.from_components(m.components, (0.6, 0.3j, -0.2 + 0.5j))
    rep = point_report(m)
    assert rep["flags"]["lck_shape"]["value"] and rep["flags"]["btp"]["value"]
    assert rep["classification"]["label"] == "vaisman"


@pytest.mark.parametrize("case", COORD_CASES, ids=case_id)
def test_point_reports_match_manifests(case):
    ok, details = catalog.verify_manifest(case[0], **case[1])
    assert ok, details


def test_non_btp_metric_detected():
    # g = (1 + |z1|²) on ℂ² with a warped second factor: not BTP at a generic point
    m = CoordinateMetric.from_components([["1 + z2*zb2", "0"], ["0", "1 + z1*zb1 + z1*z1*zb1*zb1"]], (0.5, 0.4j))
    mj = metric_jets(normalize_point(m))
    rd = riemannian_at(mj)
    assert not btp_residual_at(mj)["btp"]
    assert rd.warning is not None


@pytest.mark.parametrize("comps", [
    [["1", "1"], ["0", "1"]],
    [["1", "0"], ["0", "-1"]],
    [["1", "2"], ["2", "1"]],
])
def test_validation_rejects(comps):
    v = CoordinateMetric.from_components(comps).validate()
    assert not v["accepted"]
    with pytest.raises(ValueError):
        normalize_point(CoordinateMetric.from_components(comps))


def test_malformed_components():
    with pytest.raises(ValueError):
        CoordinateMetric.from_components([["1", "0"]])
    with pytest.raises(ValueError):
        CoordinateMetric.from_components([["1"]], (0, 0))


def test_jets_are_hermitian(wallach_point):
    mj, _ = wallach_point
    assert mj.conjugation_residual() < 1e-12
