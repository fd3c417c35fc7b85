import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spdehn.roots import InvalidInput, all_roots
from spdehn.spmat import (
    DiagSp, SpMatrix, conjugate_by_diag, elementary, elementary_formula, is_symplectic,
)

from conftest import R, random_product

E12 = [[1, 1, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0],
       [0, 0, 0, 1, 0, 0], [0, 0, 0, -1, 1, 0], [0, 0, 0, 0, 0, 1]]
E1P2 = [[1, 0, 0, 0, 1, 0], [0, 1, 0, 1, 0, 0], [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]]
E2_1 = [[1, 0, 0, 1, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]]
E12_M3 = [[1, -3, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0],
          [0, 0, 0, 1, 0, 0], [0, 0, 0, 3, 1, 0], [0, 0, 0, 0, 0, 1]]


def test_reference_elementary_matrices():
    assert elementary(R("+1-2", 3)).tolist() == E12
    assert elementary(R("+1+2", 3)).tolist() == E1P2
    assert elementary(R("2*+1", 3)).tolist() == E2_1
    assert elementary(R("+1-2", 3), -3).tolist() == E12_M3
    assert elementary(R("+1-2", 3), 0).is_identity()


@pytest.mark.parametrize("p", [1, 2, 3])
def test_power_matches_defining_formula(p):
    for r in all_roots(p):
        assert elementary(r, 1) == elementary_formula(r)
        assert is_symplectic(elementary(r, 5))


def test_is_symplectic_examples():
    assert is_symplectic(SpMatrix.identity(3))
    assert is_symplectic(elementary(R("+1+2", 2), 7))
    assert not is_symplectic(SpMatrix([[2, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))
    with pytest.raises(InvalidInput):
        is_symplectic([[1, 0, 0], [0, 1, 0], [0, 0, 1]])


def test_conjugate_by_diag():
    D = DiagSp((2, 1))
    a = R("+1-2", 2)
    assert conjugate_by_diag(D, a, 1) == (a, 2)
    assert D.matrix() @ elementary(a, 1) @ D.inverse().matrix() == elementary(a, 2)
    D3 = DiagSp((3, 1))
    b = R("2*+1", 2)
    assert conjugate_by_diag(D3, b, 1) == (b, 9)
    assert conjugate_by_diag(DiagSp((1, 1)), a, 7) == (a, 7)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6), st.integers(1, 50))
def test_products_stay_symplectic(p, seed, n):
    M = random_product(all_roots(p), n, random.Random(seed))
    assert is_symplectic(M) and is_symplectic(M.inverse())
    assert M @ M.inverse() == SpMatrix.identity(p)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 4).flatmap(lambda p: st.sampled_from(all_roots(p))),
       st.integers(-10, 10), st.integers(-10, 10))
def test_homomorphism(a, x, y):
    assert elementary(a, x) @ elementary(a, y) == elementary(a, x + y)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 10 ** 6))
def test_submultiplicative(p, seed):
    rng = random.Random(seed)
    g = random_product(all_roots(p), 8, rng)
    h = random_product(all_roots(p), 8, rng)
    assert (g @ h).norm_inf() <= 2 * p * g.norm_inf() * h.norm_inf()


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 3), st.lists(st.fractions(min_value=Fraction(1, 8), max_value=8), min_size=3, max_size=3),
       st.fractions(min_value=-5, max_value=5))
def test_conjugation_against_matrices(p, a, x):
    D = DiagSp(tuple(a[:p]))
    for r in all_roots(p):
        _, x2 = conjugate_by_diag(D, r, x)
        assert D.matrix() @ elementary(r, x) @ D.inverse().matrix() == elementary(r, x2)


def test_text_io_round_trip():
    M = elementary(R("+1-2", 3), -3) @ elementary(R("2*-3", 3), 4)
    assert SpMatrix.from_text(M.to_text()) == M
    assert SpMatrix.from_text("[[1, 2], [0, 1]]") == SpMatrix([[1, 2], [0, 1]])
    with pytest.raises(InvalidInput):
        SpMatrix.from_text("p=2\n1 0\n0 1\n")
