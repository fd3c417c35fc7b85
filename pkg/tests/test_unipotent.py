import random

import pytest
from hypothesis import given, settings, strategies as st

from spdehn.spmat import SpMatrix, elementary
from spdehn.unipotent import (
    DomainError, SymElem, TensorElem, ab_of, check_umanip, in_N, in_Z, split_N, u_of, u_product,
    uz_inverse, uz_of,
)
from spdehn.roots import HalfRoot

from conftest import PROP_FRAMES, R, frame, umanip_failures

P1, P2, P3 = HalfRoot(1, 1), HalfRoot(1, 2), HalfRoot(1, 3)
M2, M3 = HalfRoot(-1, 2), HalfRoot(-1, 3)

U_EXAMPLE = [[1, 2, 0, 0, 0, -5], [0, 1, 0, 0, 0, 0], [0, 0, 1, -5, 0, 0],
             [0, 0, 0, 1, 0, 0], [0, 0, 0, -2, 1, 0], [0, 0, 0, 0, 0, 1]]
UZ_EXAMPLE = [[1, 0, 0, 2, 1, 0], [0, 1, 0, 1, 0, 0], [0, 0, 1, 0, 0, 0],
              [0, 0, 0, 1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1]]
AB_EXAMPLE = [[1, 3, 7, 4, 2, 1], [0, 1, 0, 2, 0, 0], [0, 0, 1, 1, 0, 0],
              [0, 0, 0, 1, 0, 0], [0, 0, 0, -3, 1, 0], [0, 0, 0, -7, 0, 1]]


@pytest.fixture
def f1():
    return frame("+1", "±2,±3", 3)


def test_u_reference(f1):
    V = TensorElem.outer(f1, {P1: 1}, {P2: 2, M3: -5})
    assert u_of(V).tolist() == U_EXAMPLE
    assert u_of(TensorElem(f1)).is_identity()
    assert u_of(TensorElem(f1, {(P1, P2): 1})) == elementary(R("+1-2", 3))


def test_uz_reference():
    f = frame("+1,+2", "±3", 3)
    q = SymElem(f, {(P1, P1): 1, (P1, P2): 1})
    assert uz_of(q).tolist() == UZ_EXAMPLE
    assert uz_inverse(SpMatrix(UZ_EXAMPLE), f) == q
    assert uz_of(SymElem(f)).is_identity()
    q3 = SymElem(f, {(P1, P2): 3})
    assert uz_inverse(uz_of(q3), f) == q3


def test_uz_scale_matches_long_root():
    f = frame("+1,+2", "", 2)
    for s in (P1, P2):
        for x in range(-5, 6):
            assert uz_of(SymElem(f, {(s, s): x})) == elementary(R(f"2*+{s.index}", 2), 2 * x)


def test_ab_reference(f1):
    got = ab_of(SpMatrix(AB_EXAMPLE), f1)
    assert got == TensorElem.outer(f1, {P1: 1}, {P2: 3, P3: 7, M2: 2, M3: 1})
    assert ab_of(SpMatrix.identity(3), f1) == TensorElem(f1)
    with pytest.raises(DomainError):
        ab_of(elementary(R("+2-1", 3)), f1)


def test_umanip_examples(f1):
    f = frame("+1", "±2", 2)
    assert check_umanip("d", f, v={P1: 1}, w={P2: 1}, v2={P1: 1}, w2={HalfRoot(-1, 2): 1})
    assert check_umanip("a", f1, V=TensorElem(f1))
    f2 = frame("+1,+2", "", 2)
    assert check_umanip("b", f2, d=elementary(R("+1-2", 2)), v={P1: 1}, v2={P2: 1})


@pytest.mark.parametrize("S,T,p", PROP_FRAMES)
def test_umanip_suite(S, T, p):
    bad, total = umanip_failures(frame(S, T, p), random.Random(7), 100)
    assert total > 100 and not bad


def test_u_of_non_simple_differs_from_product_by_center():
    f = frame("+1,+2", "±3", 3)
    V = TensorElem(f, {(P1, P3): 1, (P2, HalfRoot(-1, 3)): 1})
    A, B = u_of(V), u_product(V)
    assert A != B
    assert in_Z(A.inverse() @ B, f)


def _tensors(f):
    keys = [(s, t) for s in f.S_sorted for t in f.T_sorted]
    return st.lists(st.integers(-5, 5), min_size=len(keys), max_size=len(keys)).map(
        lambda xs: TensorElem(f, dict(zip(keys, xs))))


FR = frame("+1,-2", "±3,±4", 4)


@settings(max_examples=50, deadline=None)
@given(_tensors(FR), _tensors(FR))
def test_section_and_central_extension(V, W):
    assert ab_of(u_of(V), FR) == V
    assert in_N(u_of(V), FR)
    assert in_Z(u_of(V) @ u_of(W) @ u_of(V + W).inverse(), FR)


@settings(max_examples=40, deadline=None)
@given(_tensors(FR), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_center_is_central(V, c):
    S = FR.S_sorted
    q = SymElem(FR, {(S[0], S[0]): c[0], (S[0], S[1]): c[1], (S[1], S[1]): c[2]})
    Z = uz_of(q)
    assert Z @ u_of(V) == u_of(V) @ Z
    assert ab_of(Z, FR) == TensorElem(FR)
    assert uz_inverse(Z, FR) == q
    V2, q2 = split_N(u_of(V) @ Z, FR)
    assert V2 == V and u_of(V2) @ uz_of(q2) == u_of(V) @ Z
