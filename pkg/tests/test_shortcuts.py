import json
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from spdehn.roots import HalfRoot, all_roots
from spdehn.shortcuts import (
    DEFAULT_BASE, SUBMULT_BASE, HyperbolicBase, UnsupportedRank, alphabet, length_profile,
    radix_expand, radix_value, shortcut, shortcut_tensor,
)
from spdehn.spmat import elementary
from spdehn.unipotent import TensorElem, u_of
from spdehn.words import evaluate

from conftest import R, frame

LAM = DEFAULT_BASE.lam


def test_base_validation():
    with pytest.raises(ValueError):
        HyperbolicBase(((1, 1), (0, 1)))
    with pytest.raises(ValueError):
        HyperbolicBase(((2, 1), (1, 2)))
    assert HyperbolicBase(((3, 1), (2, 1))).trace == 4


def test_radix_examples():
    assert len(radix_expand((0, 0))) == 0
    e = radix_expand((1, 0))
    assert e.digits == ((1, 0),) and e.shift == 0
    big = radix_expand((10 ** 6, 0))
    assert radix_value(big) == (10 ** 6, 0)
    assert len(big) <= 2 * math.log(10 ** 6, LAM) + 2
    with pytest.raises(ValueError):
        radix_expand((5, 5), digit_bound=1)


@settings(max_examples=200, deadline=None)
@given(st.integers(-10 ** 15, 10 ** 15), st.integers(-10 ** 15, 10 ** 15))
def test_radix_reconstructs(a, b):
    e = radix_expand((a, b))
    assert radix_value(e) == (a, b)
    assert all(max(abs(r[0]), abs(r[1])) <= 2 for r in e)
    n = max(abs(a), abs(b), 2)
    assert e.steps <= 4 * math.log(n, LAM) + 4


def test_radix_other_base():
    base = HyperbolicBase(((3, 1), (2, 1)))
    for v in [(7, -3), (10 ** 9, 1), (-12345, 678)]:
        assert radix_value(radix_expand(v, base), base) == v


def test_shortcut_small_values():
    a = R("+1-2", 2)
    assert len(shortcut(a, 0).ladder) == 0
    for x in list(range(-8, 0)) + list(range(1, 9)):
        assert evaluate(shortcut(a, x).ladder, 2) == elementary(a, x)


def test_shortcut_rank_one_unsupported():
    with pytest.raises(UnsupportedRank):
        shortcut(R("2*+1", 1), 100)


@pytest.mark.parametrize("p", [2, 3])
def test_every_root_large_x(p):
    for a in all_roots(p):
        for x in (17, -1000, 10 ** 12 + 1):
            plan = shortcut(a, x)
            assert evaluate(plan.ladder, p) == elementary(a, x)
            assert {l.root for l in plan.ladder} <= alphabet(a)


def test_long_root_trillion():
    a = R("2*+1", 2)
    plan = shortcut(a, 10 ** 12)
    assert plan.variant == "long_root"
    assert evaluate(plan.ladder) == elementary(a, 10 ** 12)
    # 40 bits; the per-bit cost of this construction is about 15 letters
    assert plan.length <= 20 * 41


def test_variants_agree():
    x = 98765
    short3 = shortcut(R("+1-2", 3), x)
    short2 = shortcut(R("+1-2", 2), x)
    assert short3.variant == "short_root" and short2.variant == "special_short"
    assert evaluate(short3.ladder) == elementary(R("+1-2", 3), x)
    assert evaluate(short2.ladder) == elementary(R("+1-2", 2), x)
    plain = shortcut(R("+1-2", 3), x, check=False)
    assert evaluate(plain.ladder) == evaluate(short3.ladder)


def test_sidecar_json():
    plan = shortcut(R("2*+1", 2), 12345)
    data = json.loads(plan.sidecar())
    assert data["variant"] == "long_root" and data["length"] == plan.length
    assert data["target"] == {"root": "2*+1", "x": "12345"}


def test_tensor_shortcut():
    f = frame("+1,+2", "±3,±4", 4)
    assert len(shortcut_tensor(TensorElem(f)).ladder) == 0
    s1, t = HalfRoot(1, 1), HalfRoot(1, 3)
    one = shortcut_tensor(TensorElem(f, {(s1, t): 1}))
    assert evaluate(one.ladder) == elementary(R("+1-3", 4))
    rng = random.Random(3)
    keys = [(s, t) for s in f.S_sorted for t in f.T_sorted]
    for _ in range(3):
        V = TensorElem(f, {k: rng.randint(-10 ** 6, 10 ** 6) for k in keys})
        assert evaluate(shortcut_tensor(V).ladder) == u_of(V)


def test_length_profile():
    rows = length_profile("long", [2 ** k for k in range(1, 41)])
    lengths = [r["length"] for r in rows]
    big = [r for r in rows if r["x"] > 2 ** 8]
    assert max(r["ratio"] for r in big) < 40
    assert lengths[-1] > lengths[10]
    assert length_profile("short", [1])[0]["length"] == 1
    for r in rows:
        assert r["length"] >= r["lower_bound"]


def test_lower_bound_constant():
    # every letter has row-sum norm 2, so |evaluate(w)|_max <= 2^len(w)
    assert SUBMULT_BASE == 2
    for a in all_roots(2):
        assert elementary(a, 1).norm_inf() <= SUBMULT_BASE


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(all_roots(3)), st.integers(-10 ** 12, 10 ** 12))
def test_shortcut_property(a, x):
    plan = shortcut(a, x)
    M = evaluate(plan.ladder, 3)
    assert M == elementary(a, x)
    assert plan.length <= 200 * math.log2(abs(x) + 2) + 200
    if x:
        assert plan.length >= math.log2(M.norm_inf()) / math.log2(SUBMULT_BASE)
