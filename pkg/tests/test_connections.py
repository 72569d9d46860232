import numpy as np
import pytest

from bismut_lab import catalog
from bismut_lab.connections import (
    bar,
    bismut_torsion_vectors,
    chern_data,
    curvature,
    full_bundle,
    gauduchon_theta,
    torsion_vectors,
)
from bismut_lab.structure import random_unitary, unitary_change

from conftest import LIE_CASES, build, case_id, random_nilmanifold


def koszul(s):
    """Levi-Civita Christoffel symbols of the left-invariant metric straight from the Koszul formula.

    The frame is (e_1..e_n, ē_1..ē_n), dual to the generators, with g(e_i, ē_j) = δ_ij.
    Returns Γ[a, b, c] with ∇_{E_a} E_b = Σ_c Γ[a, b, c] E_c, the brackets and the metric matrix.
    """
    n = s.n
    brk = -s.dgen.transpose(1, 2, 0)  # [E_a, E_b] = −Σ_c dg_c(E_a, E_b) E_c
    sigma = np.r_[np.arange(n, 2 * n), np.arange(n)]
    G = np.eye(2 * n)[sigma]
    Gb = np.einsum("abc,cd->abd", brk, G)
    K = 0.5 * (Gb - Gb.transpose(2, 0, 1) + Gb.transpose(1, 2, 0))
    return np.einsum("abd,dc->abc", K, np.linalg.inv(G)), brk, G


def oracle_cases():
    rng = np.random.default_rng(7)
    out = [catalog.so3c(), catalog.n3(), catalog.family_C(1, 1j), catalog.family_D(1j, 1j, -1),
           random_nilmanifold(rng)]
    return out + [unitary_change(s, random_unitary(3, rng)) for s in out]


@pytest.mark.parametrize("s", oracle_cases())
def test_levi_civita_connection_matches_koszul(s):
    n = s.n
    b = full_bundle(s)
    Gam, _, _ = koszul(s)
    hat = Gam.transpose(1, 2, 0)  # hat[b, c, a] = θ̂_{bc}(E_a)
    assert np.max(np.abs(hat[:n, :n] - b.theta1)) < 1e-12
    assert np.max(np.abs(hat[n:, :n] - b.theta2)) < 1e-12
    assert np.max(np.abs(hat[:n, n:] - bar(b.theta2))) < 1e-12


@pytest.mark.parametrize("s", oracle_cases())
def test_riemannian_curvature_matches_koszul(s):
    Gam, brk, G = koszul(s)
    Rk = (np.einsum("bcf,afg->abcg", Gam, Gam) - np.einsum("acf,bfg->abcg", Gam, Gam)
          - np.einsum("abe,ecg->abcg", brk, Gam))
    Rk = np.einsum("abcg,gd->abcd", Rk, G)
    b = full_bundle(s)
    R = curvature(s, (b.theta1, b.theta2), "riemannian").full()
    assert np.max(np.abs(R - Rk)) < 1e-12


@pytest.mark.parametrize("case", LIE_CASES, ids=case_id)
def test_chern_torsion_has_no_mixed_part(case):
    b = chern_data(build(case))
    assert b.tau_mixed_residual < 1e-12
    # θ is skew-Hermitian: θ_ij + conj(θ_ji) = 0 as forms
    th = b.theta
    n = b.n
    sigma = np.r_[np.arange(n, 2 * n), np.arange(n)]
    assert np.max(np.abs(th + np.conj(th.transpose(1, 0, 2))[:, :, sigma])) < 1e-12


def test_so3c_chern_torsion_by_hand():
    # dφ_1 = φ_2∧φ_3 = T^1_{23}φ_2∧φ_3 + T^1_{32}φ_3∧φ_2
    T = chern_data(catalog.so3c()).T
    assert T[0, 1, 2] == pytest.approx(0.5)
    assert T[1, 2, 0] == pytest.approx(0.5)
    assert T[2, 0, 1] == pytest.approx(0.5)
    assert np.count_nonzero(np.abs(T) > 1e-12) == 6


@pytest.mark.parametrize("s", oracle_cases())
def test_bismut_torsion_totally_skew(s):
    b = full_bundle(s)
    n = b.n
    tv = torsion_vectors(b, b.thetaB)
    assert np.max(np.abs(tv - bismut_torsion_vectors(b))) < 1e-12
    sigma = np.r_[np.arange(n, 2 * n), np.arange(n)]
    G = np.eye(2 * n)[sigma]
    Tl = np.einsum("abc,cd->abd", tv, G)
    assert np.max(np.abs(Tl + Tl.transpose(0, 2, 1))) < 1e-12
    tc = torsion_vectors(b, b.theta)
    assert np.max(np.abs(tc[:n, :n, :n] - 2 * b.T.transpose(1, 2, 0))) < 1e-12
    assert np.max(np.abs(tc[:n, n:])) < 1e-12


def test_so3c_chern_flat():
    s = catalog.so3c()
    assert curvature(s, chern_data(s).theta).max_abs() < 1e-12


def test_gauduchon_line_endpoints():
    b = full_bundle(catalog.n3())
    assert np.array_equal(gauduchon_theta(b, 0), b.theta)
    assert np.allclose(gauduchon_theta(b, 1), b.thetaB)


def test_curvature_symmetries(rng):
    s = unitary_change(catalog.family_C(1, 1j), random_unitary(3, rng))
    b = full_bundle(s)
    for th in (b.theta, b.thetaB):
        R = curvature(s, th)
        assert R.antisymmetry_residual() < 1e-12
        assert R.conjugate_symmetry_residual() < 1e-12
