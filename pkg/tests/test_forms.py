import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bismut_lab.forms import Form, FormMatrix, bidegree_part, conjugate, evaluate, sort_with_sign, wedge, FrameVector

N = 2  # four generators keeps the dense oracle small


def perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def dense(f: Form, degree):
    """Fully antisymmetric coefficient array of a homogeneous form."""
    out = np.zeros((2 * f.n,) * degree, complex)
    for key, c in f.terms.items():
        assert len(key) == degree
        for p in itertools.permutations(range(degree)):
            out[tuple(key[i] for i in p)] += perm_sign(p) * c
    return out


def dense_wedge(a, b, p, q):
    out = np.zeros((a.shape[0],) * (p + q), complex)
    prod = np.multiply.outer(a, b)
    for perm in itertools.permutations(range(p + q)):
        out += perm_sign(perm) * np.transpose(prod, np.argsort(perm))
    return out / (math.factorial(p) * math.factorial(q))


coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


@st.composite
def forms(draw, degree):
    keys = list(itertools.combinations(range(2 * N), degree))
    chosen = draw(st.lists(st.sampled_from(keys), max_size=len(keys), unique=True))
    return Form(N, {k: draw(coef) for k in chosen})


@settings(max_examples=60, deadline=None)
@given(st.data(), st.integers(1, 2), st.integers(1, 2))
def test_wedge_matches_alternation_oracle(data, p, q):
    a, b = data.draw(forms(p)), data.draw(forms(q))
    got = dense(wedge(a, b), p + q)
    want = dense_wedge(dense(a, p), dense(b, q), p, q)
    assert np.allclose(got, want, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.data(), st.integers(1, 2), st.integers(1, 2))
def test_graded_commutativity(data, p, q):
    a, b = data.draw(forms(p)), data.draw(forms(q))
    diff = wedge(a, b) - wedge(b, a) * (-1) ** (p * q)
    assert diff.max_abs() < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_associativity(data):
    a, b, c = (data.draw(forms(1)) for _ in range(3))
    assert (wedge(wedge(a, b), c) - wedge(a, wedge(b, c))).max_abs() < 1e-12


def test_sort_with_sign():
    assert sort_with_sign((2, 0, 1)) == (1, (0, 1, 2))
    assert sort_with_sign((1, 0)) == (-1, (0, 1))
    assert sort_with_sign((1, 1))[0] == 0


def test_repeated_generator_vanishes():
    f = Form(N, {(0, 0): 1, (1, 0): 2})
    assert f.terms == {(0, 1): -2}


def test_bidegree_and_conjugate():
    f = Form(N, {(0, 1): 1, (0, 2): 2j, (2, 3): 3})
    assert bidegree_part(f, 2, 0).terms == {(0, 1): 1}
    assert bidegree_part(f, 1, 1).terms == {(0, 2): 2j}
    c = conjugate(f)
    # conj(φ_1∧φ̄_1) = φ̄_1∧φ_1 = −φ_1∧φ̄_1
    assert c.terms[(0, 2)] == 2j
    assert c.terms[(2, 3)] == 1
    assert (conjugate(c) - f).max_abs() == 0


def test_evaluate_two_form():
    f = Form.phi(N, 1) ^ Form.phibar(N, 2)
    x, y = FrameVector(1, False), FrameVector(2, True)
    assert evaluate(f, x, y) == 1
    assert evaluate(f, y, x) == -1
    assert evaluate(f, x, x) == 0


def test_matrix_round_trip():
    F = np.zeros((4, 4), complex)
    F[0, 3], F[1, 2] = 1 + 1j, -2
    F = F - F.T
    assert np.array_equal(Form.from_matrix(N, F).to_matrix(), F)


def test_form_matrix_wedge_is_matrix_product():
    e = [Form.phi(N, 1), Form.phibar(N, 1)]
    A = FormMatrix([[e[0], Form.zero(N)], [Form.zero(N), e[1]]])
    B = FormMatrix([[e[1], e[0]], [e[0], e[0]]])
    P = A.matwedge(B)
    assert (P[0, 0] - wedge(e[0], e[1])).max_abs() == 0
    assert P[0, 1].is_zero()
    assert (P[1, 0] - wedge(e[1], e[0])).max_abs() == 0


def test_bad_input_rejected():
    with pytest.raises(ValueError):
        Form(N, {(0, 7): 1})
    with pytest.raises(ValueError):
        Form(0)
    with pytest.raises(ValueError):
        bidegree_part(Form(N), -1, 0)
