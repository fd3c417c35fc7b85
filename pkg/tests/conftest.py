import random

import pytest

from spdehn.roots import Root, SubgroupFrame, difference, parse_halfroot_set
from spdehn.spmat import SpMatrix, apply_right


def frame(S: str, T: str, p: int) -> SubgroupFrame:
    return SubgroupFrame(parse_halfroot_set(S), parse_halfroot_set(T), p)


def R(text: str, p: int) -> Root:
    return Root.parse(text, p)


def random_product(roots, n: int, rng: random.Random, xmax: int = 3) -> SpMatrix:
    """Product of n random elementary matrices e_alpha(x), alpha in roots, 0 < |x| <= xmax."""
    p = roots[0].p
    cols = SpMatrix.identity(p).columns()
    xs = [v for v in range(-xmax, xmax + 1) if v]
    for _ in range(n):
        apply_right(cols, rng.choice(roots), rng.choice(xs))
    return SpMatrix.from_columns(cols)


def block_roots(T, p: int):
    return sorted({difference(a, b, p) for a in T for b in T if a != b})


@pytest.fixture
def rng():
    return random.Random(20240601)


# ---------------------------------------------------------------- u / u_Z manipulation suite

PROP_FRAMES = [("+1", "±2", 2), ("-1,+2", "", 2), ("+1", "±2,±3", 3), ("+1,+2", "±3", 3),
               ("+1,-2", "±3,±4", 4), ("+1,+2,+3", "±4", 4)]


def _flip(frame_, s):
    """The element of GL(S) acting by -1 on z_s (and on z_-s)."""
    p = frame_.p
    n = 2 * p
    rows = [[int(i == j) for j in range(n)] for i in range(n)]
    for h in (s, -s):
        k = h.position(p)
        rows[k][k] = -1
    return SpMatrix(rows)


def _rand_vec(support, rng, lo=-3, hi=3):
    out = {h: rng.randint(lo, hi) for h in support}
    return {h: x for h, x in out.items() if x} or {sorted(support)[0]: 1}


def umanip_cases(f, rng, n_random):
    """Yield (case, inputs) for basis-vector inputs and n_random seeded random inputs per case."""
    from spdehn.roots import phi_set
    from spdehn.unipotent import SymElem, TensorElem
    from spdehn.spmat import elementary

    S, T = f.S_sorted, f.T_sorted
    gl = [elementary(r, e) for r in phi_set("GL", f) for e in (1, -1)] + [_flip(f, s) for s in S]
    sp = [elementary(r, e) for r in phi_set("SP", f) for e in (1, -1)]
    for s in S:
        for t in T:
            yield "a", {"V": TensorElem(f, {(s, t): 1})}
            for s2 in S:
                for t2 in T:
                    yield "d", {"v": {s: 1}, "w": {t: 1}, "v2": {s2: 1}, "w2": {t2: 1}}
            for d in gl:
                yield "b", {"d": d, "v": {s: 1}, "w": {t: 1}}
            for d in sp:
                yield "c", {"d": d, "v": {s: 1}, "w": {t: 1}}
        for s2 in S:
            yield "a", {"q": SymElem(f, {(s, s2): 1})}
            for d in gl:
                yield "b", {"d": d, "v": {s: 1}, "v2": {s2: 1}}

    def rand_gl():
        M = SpMatrix.identity(f.p)
        for _ in range(rng.randint(1, 4)):
            M = M @ rng.choice(gl)
        return M

    def rand_sp():
        M = SpMatrix.identity(f.p)
        for _ in range(rng.randint(1, 4)):
            M = M @ rng.choice(sp)
        return M

    for _ in range(n_random):
        a_in = {"q": SymElem(f, {(s, s2): rng.randint(-3, 3) for s in S for s2 in S})}
        if T:
            a_in["V"] = TensorElem.outer(f, _rand_vec(S, rng), _rand_vec(T, rng))
        yield "a", a_in
        if T:
            yield "b", {"d": rand_gl(), "v": _rand_vec(S, rng), "w": _rand_vec(T, rng)}
        yield "b", {"d": rand_gl(), "v": _rand_vec(S, rng), "v2": _rand_vec(S, rng)}
        if T and sp:
            yield "c", {"d": rand_sp(), "v": _rand_vec(S, rng), "w": _rand_vec(T, rng)}
        if T:
            yield "d", {"v": _rand_vec(S, rng), "w": _rand_vec(T, rng), "v2": _rand_vec(S, rng), "w2": _rand_vec(T, rng)}


def umanip_failures(f, rng, n_random):
    from spdehn.unipotent import check_umanip

    bad, total = [], 0
    for case, inputs in umanip_cases(f, rng, n_random):
        total += 1
        if not check_umanip(case, f, **inputs):
            bad.append((case, inputs))
    return bad, total


# ---------------------------------------------------------------- acceptance summary

ACCEPTANCE: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
