import numpy as np
import pytest

from bismut_lab import catalog
from bismut_lab.forms import Form, wedge
from bismut_lab.structure import (
    LieHermitianStructure,
    check_unitary,
    exterior_derivative,
    from_keyed,
    parse_wedge_key,
    random_unitary,
    to_keyed,
    unitary_change,
    validate_structure,
)

from conftest import LIE_CASES, build, case_id, random_nilmanifold


def test_keyed_round_trip(rng):
    s = random_nilmanifold(rng)
    assert from_keyed(3, to_keyed(s)) == s


def test_parse_wedge_key():
    assert parse_wedge_key("2*1b", 3) == (1, 3)
    assert parse_wedge_key("1b*3b", 3) == (3, 5)
    for bad in ("1", "1*x", "4*1", "0*1"):
        with pytest.raises(ValueError):
            parse_wedge_key(bad, 3)


def test_keyed_wedge_orientation():
    # "3*1" stands for φ_3∧φ_1 = −φ_1∧φ_3
    s = from_keyed(3, {2: {"3*1": 1}})
    assert s.dphi[1, 0, 2] == -1
    assert s.C[1, 2, 0] - s.C[1, 0, 2] == 1


def test_leibniz_rule(rng):
    s = random_nilmanifold(rng)
    a = Form.from_vector(3, rng.normal(size=6) + 1j * rng.normal(size=6))
    b = Form.from_vector(3, rng.normal(size=6) + 1j * rng.normal(size=6))
    lhs = exterior_derivative(s, wedge(a, b))
    rhs = wedge(exterior_derivative(s, a), b) - wedge(a, exterior_derivative(s, b))
    assert (lhs - rhs).max_abs() < 1e-12


@pytest.mark.parametrize("case", LIE_CASES, ids=case_id)
def test_catalog_structures_satisfy_jacobi(case):
    assert validate_structure(build(case))["accepted"]


def test_jacobi_violation_detected():
    s = from_keyed(2, {1: {"2*2b": 1}, 2: {"1*1b": 1}})
    v = validate_structure(s)
    assert not v["accepted"] and v["jacobi_residual"] > 0.5


def test_rejects_non_integrable():
    mats = np.zeros((2, 4, 4), complex)
    mats[0, 2, 3], mats[0, 3, 2] = 1, -1
    with pytest.raises(ValueError, match="integrable"):
        LieHermitianStructure.from_matrices(mats)


def test_unitary_change_is_a_group_action(rng):
    s = catalog.so3c()
    U, V = random_unitary(3, rng), random_unitary(3, rng)
    a = unitary_change(unitary_change(s, U), V)
    b = unitary_change(s, V @ U)
    assert np.max(np.abs(a.dphi - b.dphi)) < 1e-12


def test_unitary_change_by_hand():
    # swap φ_1 and φ_2 on SO(3,ℂ): dφ'_1 = dφ_2 = φ_3∧φ_1 = φ'_3∧φ'_2
    P = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    s2 = unitary_change(catalog.so3c(), P)
    assert s2 == from_keyed(3, {1: {"3*2": 1}, 2: {"1*3": 1}, 3: {"2*1": 1}})


def test_unitary_change_preserves_validity(rng):
    s = unitary_change(catalog.family_C(1, 1j), random_unitary(3, rng))
    assert validate_structure(s)["accepted"]


def test_check_unitary_rejects():
    with pytest.raises(ValueError):
        check_unitary(np.array([[1, 1], [0, 1]]))
    with pytest.raises(ValueError):
        unitary_change(catalog.so3c(), np.eye(2))


def test_immutable():
    s = catalog.so3c()
    with pytest.raises(AttributeError):
        s.n = 4
    with pytest.raises(ValueError):
        s.C[0, 0, 0] = 1
