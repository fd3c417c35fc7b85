import math
from fractions import Fraction

import pytest

from spdehn.boundedgen import sp_decompose_short
from spdehn.parabolic import (
    UnsupportedCase, gl_factors, omega_normal_form, parabolic_membership, project_blocks,
)
from spdehn.roots import HalfRoot, InvalidInput, phi_set
from spdehn.spmat import SpMatrix, elementary
from spdehn.unipotent import DomainError, TensorElem, u_of
from spdehn.words import evaluate

from conftest import R, block_roots, frame, random_product

F3 = frame("+1", "±2,±3", 3)
h = HalfRoot.parse


def test_membership_examples():
    assert parabolic_membership(elementary(R("+1-2", 3), 7), F3)
    assert not parabolic_membership(elementary(R("+2-1", 3), 1), F3)
    for f in (F3, frame("+1,-2", "±3", 3), frame("+1", "", 2)):
        assert parabolic_membership(SpMatrix.identity(f.p), f)


def test_membership_rank_mismatch():
    with pytest.raises(InvalidInput):
        parabolic_membership(SpMatrix.identity(2), F3)


def test_membership_rest_must_be_fixed():
    f = frame("+1", "±2", 3)
    assert not parabolic_membership(elementary(R("+3-2", 3), 1), f)
    assert not parabolic_membership(elementary(R("2*+3", 3), 1), f)


def test_project_blocks_example():
    M = elementary(R("+2-3", 3), 3) @ elementary(R("+1-2", 3), 2) @ elementary(R("2*+1", 3), 5)
    b = project_blocks(M, F3)
    assert b.gl_part.is_identity()
    assert b.sp_part == elementary(R("+2-3", 3), 3)
    assert b.n_tensor.coeffs == {(h("+1"), h("+2")): 2}
    # the symmetric coordinate carries the 1/2 of the u_Z convention
    assert b.n_sym.coeffs == {(h("+1"), h("+1")): Fraction(5, 2)}
    assert b.product() == M


def test_project_blocks_trivial_cases():
    M = elementary(R("+2+3", 3), -4)
    b = project_blocks(M, F3)
    assert b.gl_part.is_identity() and b.sp_part == M
    assert not b.n_tensor.coeffs and not b.n_sym.coeffs
    V = TensorElem(F3, {(h("+1"), h("-3")): 3, (h("+1"), h("+2")): -1})
    b = project_blocks(u_of(V), F3)
    assert b.gl_part.is_identity() and b.sp_part.is_identity()
    assert b.n_tensor == V


def test_project_blocks_non_member():
    with pytest.raises(DomainError):
        project_blocks(elementary(R("+2-1", 3), 1), F3)


FRAMES = [("+1,-2", "±3", 3), ("+1,+2", "±3,±4", 4), ("-1,+2,+3", "", 3), ("+1", "±2", 2),
          ("+1", "±2,±3", 3)]


@pytest.mark.parametrize("S,T,p", FRAMES)
def test_reassembly_and_omega(S, T, p, rng):
    f = frame(S, T, p)
    roots = phi_set("P", f)
    for _ in range(3):
        M = random_product(roots, 30, rng)
        assert parabolic_membership(M, f)
        b = project_blocks(M, f)
        assert b.product() == M
        w = omega_normal_form(M, f)
        assert evaluate(w, p) == M


def test_gl_factors_with_signs():
    f = frame("+1,+2", "", 2)
    rows = SpMatrix.identity(2).row_lists()
    for s in ("+1", "-1"):
        k = h(s).position(2)
        rows[k][k] = -1
    G = SpMatrix(rows) @ elementary(R("+1-2", 2), 3)
    out = gl_factors(G, f)
    M = SpMatrix.identity(2)
    for r, x in out:
        M = M @ elementary(r, x)
    assert M == G


def test_omega_identity_and_large():
    assert len(omega_normal_form(SpMatrix.identity(3), F3)) == 0
    M = elementary(R("+1-2", 3), 10 ** 6)
    w = omega_normal_form(M, F3)
    assert evaluate(w, 3) == M
    # measured: 326 letters for a 20-bit coefficient
    assert len(w) <= 32 * (math.log2(10 ** 6) + 1)


def test_omega_sp_only_matches_boundedgen(rng):
    roots = block_roots(F3.T, 3)
    M = random_product(roots, 20, rng)
    _, word = sp_decompose_short(M, F3.T)
    assert omega_normal_form(M, F3) == word


def test_omega_rank_one():
    with pytest.raises(UnsupportedCase):
        omega_normal_form(elementary(R("2*+1", 1), 3), frame("+1", "", 1))
    with pytest.raises(DomainError):
        omega_normal_form(elementary(R("2*+1", 2), Fraction(1, 2)), frame("+1", "±2", 2))
