"""Bounded generation: factor a matrix of Sp(T; Z) into few elementary matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Iterable, Optional, Sequence

from sympy import isprime, primefactors

from .roots import HalfRoot, InvalidInput, Root, SubgroupFrame, difference, long_root
from .spmat import SpMatrix, apply_left, elementary, is_symplectic
from .unipotent import DomainError


@dataclass
class Decomposition:
    """target = prod elementary(root_i, x_i), in order."""

    target: SpMatrix
    factors: list = field(default_factory=list)
    shortcut_length: int = 0

    @property
    def elementary_count(self) -> int:
        return len(self.factors)

    def product(self) -> SpMatrix:
        cols = SpMatrix.identity(self.target.p).columns()
        from .spmat import apply_right

        for r, x in self.factors:
            apply_right(cols, r, x)
        return SpMatrix.from_columns(cols)

    def max_log_coefficient(self) -> float:
        return max((math.log2(abs(x)) for _, x in self.factors), default=0.0)


# ---------------------------------------------------------------- SL(2) base case

def sl2_factors(a: int, b: int, c: int, d: int) -> list[tuple[int, int]]:
    """Write [[a, b], [c, d]] in SL(2, Z) as a product of U(y) = [[1, y], [0, 1]] and L(y) = [[1, 0], [y, 1]].

    Returns a list of (kind, y) with kind +1 for U and -1 for L, in product order.
    Euclid on the first column with floor division; -I costs six unit factors.
    """
    if a * d - b * c != 1:
        raise DomainError("block does not have determinant 1")
    left: list = []  # applied on the left: ops[k] ... ops[0] M = R
    while c != 0:
        if a == 0:
            # U(1): row1 += row2
            a, b = a + c, b + d
            left.append((1, 1))
            continue
        q = c // a
        if q:
            c, d = c - q * a, d - q * b
            left.append((-1, -q))
        if c == 0:
            break
        q = a // c
        if q:
            a, b = a - q * c, b - q * d
            left.append((1, -q))
        elif a != 0 and c != 0 and abs(a) < abs(c):  # pragma: no cover - floor quotients never stall
            raise AssertionError("euclid stalled")
    out = [(k, -y) for k, y in left]
    if a == 1:
        if b:
            out.append((1, b))
    else:
        # [[-1, b], [0, -1]] = -I . U(-b)
        out.extend([(1, 1), (-1, -1), (1, 1), (1, 1), (-1, -1), (1, 1)])
        if b:
            out.append((1, -b))
    return _merge(out)


def _merge(factors):
    out: list = []
    for k, y in factors:
        if out and out[-1][0] == k:
            out[-1] = (k, out[-1][1] + y)
            if out[-1][1] == 0:
                out.pop()
        elif y:
            out.append((k, y))
    return out


def _block(M: SpMatrix, t: HalfRoot):
    p = M.p
    i, j = t.position(p), (-t).position(p)
    return M[i, i], M[i, j], M[j, i], M[j, j]


def _in_block(M: SpMatrix, T: Iterable[HalfRoot]) -> bool:
    """M acts as the identity on every coordinate outside T."""
    p = M.p
    inside = {t.position(p) for t in T}
    for i, r in enumerate(M.rows):
        for j, v in enumerate(r):
            if (i not in inside or j not in inside) and v != (1 if i == j else 0):
                return False
    return True


def sl2_decompose(M: SpMatrix, t: HalfRoot) -> Decomposition:
    """Factor M in Sp({+-t}; Z) into elementary matrices for the roots +-2t."""
    if not (_in_block(M, [t, -t]) and M.is_integral()):
        raise DomainError("matrix is not an integral element of the {+-t} block")
    p = M.p
    up, lo = long_root(t, p), long_root(-t, p)
    fac = [((up if k == 1 else lo), y) for k, y in sl2_factors(*_block(M, t))]
    dec = Decomposition(M, fac)
    if dec.product() != M:  # pragma: no cover
        raise AssertionError("sl2 reconstruction failed")
    return dec


# ---------------------------------------------------------------- number theory

def crt_mix(p_primes: Iterable[int], q_primes: Iterable[int]) -> int:
    """Smallest c > 0 with q | c for every q and c = 1 mod every p."""
    P, Q = sorted(set(p_primes)), sorted(set(q_primes))
    if set(P) & set(Q):
        raise InvalidInput("prime sets must be disjoint")
    for v in P + Q:
        if not isprime(v):
            raise InvalidInput(f"{v} is not prime")
    pp = math.prod(P)
    qq = math.prod(Q)
    if pp == 1:
        return qq
    k = pow(qq, -1, pp)
    return qq * k


def ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """(g, x, y) with a x + b y = g = gcd(a, b) >= 0 and |x| <= |b|/g, |y| <= |a|/g."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def bezout(values: Sequence[int]) -> tuple[int, list[int]]:
    """(g, coeffs) with sum coeffs_i values_i = g = gcd(values).

    Pairs are combined left to right and each new pair is reduced modulo the
    partner's cofactor, which keeps coefficients near the minimum.
    """
    g, coeffs = 0, []
    for v in values:
        if g == 0:
            if v == 0:
                coeffs.append(0)
                continue
            g = abs(v)
            coeffs = [0] * len(coeffs) + [1 if v > 0 else -1]
            continue
        g2, x, y = ext_gcd(g, v)
        # shift (x, y) -> (x + k v/g2, y - k g/g2) to make |y| small, ties to +
        if v:
            step_y = g // g2
            step_x = v // g2
            k = _nearest(y, step_y)
            x, y = x + k * step_x, y - k * step_y
        coeffs = [c * x for c in coeffs] + [y]
        g = g2
    return g, coeffs


def _nearest(y: int, m: int) -> int:
    """k minimizing |y - k m| (ties towards a nonnegative remainder)."""
    if m == 0:
        return 0
    m = abs(m)
    k, r = divmod(y, m)
    if 2 * r > m:
        k += 1
    return k if m > 0 else 0


def _small_solution(values: Sequence[int], target: int) -> list[int]:
    """y with sum y_i values_i = target, from Bezout coefficients scaled by target
    and then reduced modulo the pivot value (the largest |values_k|)."""
    g, a = bezout(values)
    if g != 1:
        raise StepInvariantError("values are not coprime")
    y = [target * c for c in a]
    k = max(range(len(values)), key=lambda i: abs(values[i]))
    mk = values[k]
    for i, v in enumerate(values):
        if i == k or not y[i]:
            continue
        q = _nearest(y[i], mk) if mk > 0 else -_nearest(y[i], -mk)
        y[i] -= q * mk
        y[k] += q * v
    return y


# ---------------------------------------------------------------- Sp(T) reduction

class _Tracker:
    """Holds the working matrix and the left and right factors applied to it."""

    def __init__(self, M: SpMatrix):
        self.rows = M.row_lists()
        self.p = M.p
        self.left: list = []
        self.right: list = []

    def lmul(self, root: Root, x: int):
        if x:
            apply_left(self.rows, root, x)
            self.left.append((root, x))

    def rmul(self, root: Root, x: int):
        if x:
            # M e = (e^T M^T)^T: operate on columns via the transpose of rows
            from .spmat import apply_right

            cols = [list(c) for c in zip(*self.rows)]
            apply_right(cols, root, x)
            self.rows = [list(r) for r in zip(*cols)]
            self.right.append((root, x))

    def col(self, h: HalfRoot, k: HalfRoot) -> int:
        return self.rows[h.position(self.p)][k.position(self.p)]

    def matrix(self) -> SpMatrix:
        return SpMatrix(self.rows)


def _entry_sign(root: Root, row: HalfRoot, col: HalfRoot) -> int:
    """The entry of X_root at (row, col); the sign used when a root op moves one coordinate."""
    p = root.p
    v = elementary(root, 1)[row.position(p), col.position(p)]
    return v - (1 if row == col else 0)


class StepInvariantError(AssertionError):
    pass


def _peel(tr: _Tracker, T: list[HalfRoot], t: HalfRoot) -> None:
    """One outer iteration: make the matrix fix z_t, z_{-t} and the t row."""
    p = tr.p
    mt = -t
    others = [s for s in T if s not in (t, mt)]

    def m(s):  # coordinate s of M z_t
        return tr.col(s, t)

    # Step 1: make the projection of M z_t off z_{-t} unimodular
    g1 = math.gcd(*[m(s) for s in T if s != mt])
    if g1 != 1:
        if all(m(s) == 0 for s in others):
            if m(t) == 0:
                tr.lmul(long_root(t, p), 1)
            else:
                s1 = others[0]
                tr.lmul(difference(s1, t, p), 1)
        g1 = math.gcd(*[m(s) for s in T if s != mt])
    if g1 != 1:
        g2 = math.gcd(*[m(s) for s in others])
        P = primefactors(g1) if g1 else []
        Q = [q for q in (primefactors(g2) if g2 else []) if m(t) % q]
        if g1 == 0:
            # m(s) = 0 off -t forces m(-t) = +-1; one long-root step fixes it
            c = 1
        else:
            c = crt_mix(P, Q)
        # e_{2t}(c) adds c * m(-t) to the t coordinate
        tr.lmul(long_root(t, p), c)
    if math.gcd(*[m(s) for s in T if s != mt]) != 1:
        raise StepInvariantError("projection is not unimodular after step 1")

    # Step 2: make the z_{-t} coordinate 1, then the z_t coordinate 1
    keys = [s for s in T if s != mt]
    D = 1 - m(mt)
    if D:
        a = _small_solution([m(s) for s in keys], D)
        for s, a_s in zip(keys, a):
            if not a_s:
                continue
            if s == t:
                tr.lmul(long_root(mt, p), a_s)
            else:
                root = difference(mt, s, p)
                sg = _entry_sign(root, mt, s)
                tr.lmul(root, sg * a_s)
        E = m(mt) - 1
        if E:
            if m(t) == 0 or E % m(t):
                raise StepInvariantError("cross terms are not a multiple of the t coordinate")
            tr.lmul(long_root(mt, p), -E // m(t))
    if m(mt) != 1:
        raise StepInvariantError("z_{-t} coordinate is not 1 after step 2")
    tr.lmul(long_root(t, p), 1 - m(t))
    if m(t) != 1:
        raise StepInvariantError("z_t coordinate is not 1 after step 2")

    # Step 3: clear the rest of the t column
    for s in others:
        if m(s):
            root = difference(s, t, p)
            tr.lmul(root, -_entry_sign(root, s, t) * m(s))
    tr.lmul(long_root(mt, p), -m(mt))
    for s in T:
        if m(s) != (1 if s == t else 0):
            raise StepInvariantError("M z_t != z_t after step 3")

    # Step 4: clear the t row with column operations
    def row(k):
        return tr.rows[t.position(p)][k.position(p)]

    for s in others:
        if row(s):
            root = difference(t, s, p)
            tr.rmul(root, -_entry_sign(root, t, s) * row(s))
    tr.rmul(long_root(t, p), -row(mt))
    M = tr.matrix()
    if not _in_block(M, [s for s in T if s not in (t, mt)]):
        raise StepInvariantError("matrix does not lie in the smaller block after step 4")


def sp_decompose(M: SpMatrix, frame: SubgroupFrame | Iterable[HalfRoot]) -> Decomposition:
    """Factor M in Sp(T; Z) into elementary matrices for roots of Sp(T)."""
    T = sorted(frame.T if isinstance(frame, SubgroupFrame) else frame)
    if len(T) < 2 or any(-t not in T for t in T):
        raise InvalidInput("T must be a nonempty symplectic set")
    if not M.is_integral() or not is_symplectic(M) or not _in_block(M, T):
        raise DomainError("matrix is not an integral element of Sp(T)")
    tr = _Tracker(M)
    rest = list(T)
    while len(rest) > 2:
        t = min((s for s in rest if s.sign > 0), key=lambda h: h.index)
        _peel(tr, rest, t)
        rest = [s for s in rest if s not in (t, -t)]
    t = [s for s in rest if s.sign > 0][0]
    core = sl2_decompose(tr.matrix(), t)
    # L_k .. L_1 M R_1 .. R_m = core  =>  M = L_1^-1 .. L_k^-1 core R_m^-1 .. R_1^-1
    factors = [(r, -x) for r, x in tr.left]
    factors += core.factors
    factors += [(r, -x) for r, x in reversed(tr.right)]
    dec = Decomposition(M, _merge_roots(factors))
    if dec.product() != M:  # pragma: no cover
        raise AssertionError("reconstruction failed")
    return dec


def _merge_roots(factors):
    out: list = []
    for r, x in factors:
        if out and out[-1][0] == r:
            out[-1] = (r, out[-1][1] + x)
            if out[-1][1] == 0:
                out.pop()
        elif x:
            out.append((r, x))
    return out


def sp_decompose_short(M: SpMatrix, frame):
    """sp_decompose, with every factor replaced by its shortcut word."""
    from .shortcuts import shortcut
    from .words import Word

    dec = sp_decompose(M, frame) if not M.is_identity() else Decomposition(M, [])
    word = Word((), M.p)
    for r, x in dec.factors:
        word = word + shortcut(r, x).ladder
    dec.shortcut_length = len(word)
    return dec, word
