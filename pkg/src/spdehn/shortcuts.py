"""Words of logarithmic length for e_alpha(x) and u(V), via hyperbolic radix expansion."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cmp_to_key, lru_cache
from typing import Iterable, Optional, Sequence

from .roots import HalfRoot, InvalidInput, Root, difference, long_root, phi_set
from .spmat import SpMatrix, apply_left, commutator, elementary
from .unipotent import TensorElem, u_of
from .words import Word, evaluate, root_coordinates

# every letter e_alpha(+-1) has row-sum norm 2, so |evaluate(w)|_max <= 2^len(w)
SUBMULT_BASE = 2
PLAIN_CUTOFF = 16


class ExpansionError(RuntimeError):
    """The greedy radix expansion did not terminate within its step cap."""


class UnsupportedRank(InvalidInput):
    pass


def _sign_quadratic(u: int, v: int, D: int) -> int:
    """Sign of u + v sqrt(D) for a non-square D > 0."""
    if u >= 0 and v >= 0:
        return 0 if (u == 0 and v == 0) else 1
    if u <= 0 and v <= 0:
        return -1
    a, b = u * u, v * v * D
    if u > 0:
        return (a > b) - (a < b)
    return (b > a) - (b < a)


@dataclass(frozen=True)
class HyperbolicBase:
    """A 2x2 integer matrix of determinant 1 and trace > 2."""

    block: tuple = ((2, 1), (1, 1))

    def __post_init__(self):
        (a, b), (c, d) = self.block
        object.__setattr__(self, "block", ((int(a), int(b)), (int(c), int(d))))
        if a * d - b * c != 1:
            raise InvalidInput("hyperbolic base must have determinant 1")
        if a + d <= 2:
            raise InvalidInput("hyperbolic base must have trace > 2")
        if math.isqrt(self.disc) ** 2 == self.disc:  # pragma: no cover - tr^2 - 4 is never a square for tr > 2
            raise InvalidInput("discriminant is a square")

    @property
    def trace(self) -> int:
        return self.block[0][0] + self.block[1][1]

    @property
    def disc(self) -> int:
        return self.trace ** 2 - 4

    @property
    def lam(self) -> float:
        """The expanding eigenvalue, for reporting only."""
        return (self.trace + math.sqrt(self.disc)) / 2

    def apply(self, v):
        (a, b), (c, d) = self.block
        return (a * v[0] + b * v[1], c * v[0] + d * v[1])

    def apply_inv(self, v):
        (a, b), (c, d) = self.block
        return (d * v[0] - b * v[1], -c * v[0] + a * v[1])

    def beta(self, v) -> tuple[int, int]:
        """(X, Y) with X + Y sqrt(D) proportional to the coordinate of v along
        the eigenvector of A for the contracting eigenvalue; A^-1 expands it."""
        (a, _), (c, _) = self.block
        return 2 * c * v[0] + (self.trace - 2 * a) * v[1], -v[1]

    def compare(self, p, q) -> int:
        """Sign of beta(p) - beta(q) for pairs (X, Y)."""
        return _sign_quadratic(p[0] - q[0], p[1] - q[1], self.disc)


DEFAULT_BASE = HyperbolicBase()


@lru_cache(maxsize=None)
def _digit_table(base: HyperbolicBase, bound: int):
    digits = [(i, j) for i in range(-bound, bound + 1) for j in range(-bound, bound + 1)]
    keyed = sorted(((base.beta(r), r) for r in digits), key=cmp_to_key(lambda u, v: base.compare(u[0], v[0])))
    return [k for k, _ in keyed], [r for _, r in keyed]


def _best_digit(base: HyperbolicBase, bound: int, v) -> tuple[int, int]:
    """The digit r minimizing |beta(v - r)|, compared exactly."""
    betas, digits = _digit_table(base, bound)
    bv = base.beta(v)
    lo, hi = 0, len(betas)
    while lo < hi:  # first index with beta(r) >= beta(v)
        mid = (lo + hi) // 2
        if base.compare(betas[mid], bv) < 0:
            lo = mid + 1
        else:
            hi = mid
    if lo == 0:
        return digits[0]
    if lo == len(betas):
        return digits[-1]
    below, above = betas[lo - 1], betas[lo]
    # closer of the two neighbours: compare 2 beta(v) with beta(below) + beta(above), ties go up
    two = (2 * bv[0], 2 * bv[1])
    mid = (below[0] + above[0], below[1] + above[1])
    return digits[lo - 1] if base.compare(two, mid) < 0 else digits[lo]


@dataclass(frozen=True)
class Expansion:
    """v = A^-shift * sum_i A^i digits[i]."""

    shift: int
    digits: tuple

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self):
        return iter(self.digits)

    def __getitem__(self, i):
        return self.digits[i]

    @property
    def steps(self) -> int:
        return self.shift + len(self.digits)


def radix_expand(v, base: HyperbolicBase = DEFAULT_BASE, digit_bound: int = 2,
                 max_steps: Optional[int] = None) -> Expansion:
    """Digits r_i with |r_i|_inf <= digit_bound and v = A^-m sum A^i r_i.

    Positive powers of A cannot absorb the component of v along the
    contracting eigendirection of A, so v is first pushed by A until that
    component lies between the extreme digit values (m steps).  Greedy digits
    then keep it there while the other component shrinks.
    """
    if digit_bound < 2:
        raise InvalidInput("digit_bound must be at least 2")
    v = (int(v[0]), int(v[1]))
    if max_steps is None:
        max_steps = 4 * max(abs(v[0]), abs(v[1]), 1).bit_length() + 16
    betas, _ = _digit_table(base, digit_bound)
    lo_b, hi_b = betas[0], betas[-1]
    shift = 0
    while base.compare(base.beta(v), lo_b) < 0 or base.compare(base.beta(v), hi_b) > 0:
        v = base.apply(v)
        shift += 1
        if shift > max_steps:
            raise ExpansionError(f"no termination within {max_steps} steps")
    out: list = []
    while v != (0, 0):
        if shift + len(out) >= max_steps:
            raise ExpansionError(f"no termination within {max_steps} steps")
        if max(abs(v[0]), abs(v[1])) <= digit_bound:
            r = v
        else:
            r = _best_digit(base, digit_bound, v)
        out.append(r)
        v = base.apply_inv((v[0] - r[0], v[1] - r[1]))
    return Expansion(shift if out else 0, tuple(out))


def radix_value(exp, base: HyperbolicBase = DEFAULT_BASE) -> tuple[int, int]:
    """A^-shift sum A^i r_i, by Horner's rule."""
    digits = exp.digits if isinstance(exp, Expansion) else exp
    v = (0, 0)
    for r in reversed(digits):
        w = base.apply(v)
        v = (w[0] + r[0], w[1] + r[1])
    for _ in range(getattr(exp, "shift", 0)):
        v = base.apply_inv(v)
    return v


# ---------------------------------------------------------------- ladders

@dataclass
class ShortcutPlan:
    target: object
    variant: str
    digits: object = ()
    ladder: Word = field(default_factory=Word)

    @property
    def length(self) -> int:
        return len(self.ladder)

    def sidecar(self) -> str:
        if isinstance(self.target, tuple):
            tgt = {"root": str(self.target[0]), "x": str(self.target[1])}
        else:
            tgt = {"V": json.loads(self.target.to_json())}
        return json.dumps({"target": tgt, "variant": self.variant,
                           "shift": getattr(self.digits, "shift", 0), "digits": [list(r) for r in self.digits], "length": self.length})


def _block_word(t: HalfRoot, block, p: int) -> Word:
    """A word for the element acting as `block` on (z_t, z_{-t}) and trivially elsewhere."""
    from .boundedgen import sl2_factors

    (a, b), (c, d) = block
    up, lo = long_root(t, p), long_root(-t, p)
    return Word.from_factors([((up if k == 1 else lo), y) for k, y in sl2_factors(a, b, c, d)], p)


class _Frame:
    """Letters and conjugator for the block S = {s}, T = {+-t}."""

    def __init__(self, s: HalfRoot, t: HalfRoot, p: int, base: HyperbolicBase):
        self.s, self.t, self.p, self.base = s, t, p, base
        self.r1, self.r2 = difference(s, t, p), difference(s, -t, p)
        ps, pt, pmt = s.position(p), t.position(p), (-t).position(p)
        self.sg1 = elementary(self.r1, 1)[ps, pt]
        self.sg2 = elementary(self.r2, 1)[ps, pmt]
        (a, b), (c, d) = base.block
        # conjugation by g sends the T-part w of u(z_s (x) w) to g^-T w
        self.conj = _block_word(t, ((d, -c), (-b, a)), p)
        self.conj_inv = self.conj.inverse()
        self._check()

    def digit(self, r) -> Word:
        return Word.power(self.r1, self.sg1 * r[0]) + Word.power(self.r2, self.sg2 * r[1])

    def ab(self, M: SpMatrix):
        p = self.p
        ps = self.s.position(p)
        return M[ps, self.t.position(p)], M[ps, (-self.t).position(p)]

    def _check(self):
        g = evaluate(self.conj)
        gi = g.inverse()
        for e, col in (((1, 0), 0), ((0, 1), 1)):
            M = g @ evaluate(self.digit(e)) @ gi
            want = tuple(row[col] for row in self.base.block)
            if self.ab(M) != want:  # pragma: no cover
                raise AssertionError("conjugator does not act as the hyperbolic base")

    def dirty(self, w) -> tuple[Expansion, Word]:
        """A word for u(z_s (x) w) times an unknown element of Z_{s}."""
        exp = radix_expand(w, self.base)
        if not exp.digits:
            return exp, Word((), self.p)
        # g^-m D(r_0) g D(r_1) g ... g D(r_k) g^(m-k)
        letters: list = []
        for _ in range(exp.shift):
            letters.extend(self.conj_inv.letters)
        for i, r in enumerate(exp.digits):
            if i:
                letters.extend(self.conj.letters)
            letters.extend(self.digit(r).letters)
        net = exp.shift - (len(exp.digits) - 1)
        for _ in range(abs(net)):
            letters.extend((self.conj if net > 0 else self.conj_inv).letters)
        return exp, Word(letters, self.p)

    @property
    def kappa(self) -> int:
        """[u(z_s (x) z_t), u(z_s (x) z_{-t})] = e_{2s}(kappa)."""
        C = commutator(evaluate(self.digit((1, 0))), evaluate(self.digit((0, 1))))
        k = C[self.s.position(self.p), (-self.s).position(self.p)]
        if C != elementary(long_root(self.s, self.p), k):  # pragma: no cover
            raise AssertionError("commutator is not a long root element")
        return k


@lru_cache(maxsize=None)
def _frame(s: HalfRoot, t: HalfRoot, p: int, base: HyperbolicBase) -> _Frame:
    return _Frame(s, t, p, base)


def _aux(s: HalfRoot, p: int) -> HalfRoot:
    for j in range(1, p + 1):
        if j != s.index:
            return HalfRoot(1, j)
    raise UnsupportedRank("long root shortcuts need p >= 2")


def _long(alpha: Root, x: int, base: HyperbolicBase) -> ShortcutPlan:
    p = alpha.p
    s = alpha.long_half()
    fr = _frame(s, _aux(s, p), p, base)
    k = fr.kappa
    r = x % 2
    a = (x - r) // k
    digits, Xa = fr.dirty((a, 0))
    Y = fr.digit((0, 1))
    word = Xa + Y + Xa.inverse() + Y.inverse() + Word.power(alpha, r)
    return ShortcutPlan((alpha, x), "long_root", digits, word)


def _short(alpha: Root, x: int, base: HyperbolicBase) -> ShortcutPlan:
    p = alpha.p
    s, t = alpha.halves()
    fr = _frame(s, t, p, base)
    digits, W = fr.dirty((fr.sg1 * x, 0))
    rows = evaluate(W).row_lists()
    apply_left(rows, alpha, -x)
    rest = SpMatrix(rows)
    ls = long_root(s, p)
    c = rest[s.position(p), (-s).position(p)]
    if rest != elementary(ls, c):  # pragma: no cover
        raise AssertionError("dirty ladder left more than a central error")
    tail = _long(ls, -c, base).ladder if c else Word((), p)
    return ShortcutPlan((alpha, x), "special_short", digits, W + tail)


def _short_commutator(alpha: Root, x: int, base: HyperbolicBase) -> ShortcutPlan:
    """[u(a z_s (x) z_t'), e_{t'-t}(1)] = e_{s-t}(x) for an auxiliary t' off +-s, +-t.

    The central error of the ladder for u(a z_s (x) z_t') lies in e_{2s}, which
    commutes with both factors and so drops out of the commutator.
    """
    p = alpha.p
    s, t = alpha.halves()
    aux = next(HalfRoot(1, j) for j in range(1, p + 1) if j not in (s.index, t.index))
    fr = _frame(s, aux, p, base)
    yroot = difference(aux, t, p)
    C = commutator(evaluate(fr.digit((1, 0))), elementary(yroot, 1))
    k = C[s.position(p), t.position(p)]
    if C != elementary(alpha, k) or abs(k) != 1:  # pragma: no cover
        raise AssertionError("auxiliary commutator is not a root element")
    digits, X = fr.dirty((k * x, 0))
    Y = Word.power(yroot, 1)
    return ShortcutPlan((alpha, x), "short_root", digits, X + Y + X.inverse() + Y.inverse())


def shortcut(alpha: Root, x: int, base: HyperbolicBase = DEFAULT_BASE, check: bool = True) -> ShortcutPlan:
    """A ladder word evaluating exactly to elementary(alpha, x)."""
    x = int(x)
    p = alpha.p
    if p < 2:
        raise UnsupportedRank("shortcuts need p >= 2")
    if abs(x) <= PLAIN_CUTOFF:
        plan = ShortcutPlan((alpha, x), "plain", (), Word.power(alpha, x) if x else Word((), p))
    elif alpha.is_long:
        plan = _long(alpha, x, base)
    elif p >= 3:
        plan = _short_commutator(alpha, x, base)
    else:
        plan = _short(alpha, x, base)
    if check and evaluate(plan.ladder, p) != elementary(alpha, x):  # pragma: no cover
        raise AssertionError(f"shortcut for {alpha}({x}) does not evaluate correctly")
    return plan


def alphabet(alpha: Root) -> set:
    """The finite set of roots any shortcut ladder for alpha may use."""
    p = alpha.p
    if alpha.is_long:
        s = alpha.long_half()
        t = _aux(s, p)
        return {alpha, difference(s, t, p), difference(s, -t, p), long_root(t, p), long_root(-t, p)}
    s, t = alpha.halves()
    if p >= 3:
        aux = next(HalfRoot(1, j) for j in range(1, p + 1) if j not in (s.index, t.index))
        return {alpha, difference(s, aux, p), difference(s, -aux, p), long_root(aux, p),
                long_root(-aux, p), difference(aux, t, p)}
    return {alpha, difference(s, -t, p), long_root(t, p), long_root(-t, p)} | alphabet(long_root(s, p))


def shortcut_tensor(V: TensorElem, base: HyperbolicBase = DEFAULT_BASE) -> ShortcutPlan:
    """A ladder word evaluating exactly to u_of(V)."""
    fr = V.frame
    p = fr.p
    word = Word((), p)
    for (s, t), x in V.items():
        root = difference(s, t, p)
        sign = elementary(root, 1)[s.position(p), t.position(p)]
        word = word + shortcut(root, sign * x, base, check=False).ladder
    target = u_of(V)
    rest = target.inverse() @ evaluate(word, p)
    zroots = phi_set("Z", fr)
    coords = root_coordinates(rest, zroots)
    check = SpMatrix.identity(p)
    for g, c in coords:
        check = check @ elementary(g, c)
    if check != rest:  # pragma: no cover
        raise AssertionError("residual is not in Z_S")
    for g, c in coords:
        word = word + shortcut(g, -c, base, check=False).ladder
    if evaluate(word, p) != target:  # pragma: no cover
        raise AssertionError("tensor shortcut does not evaluate to u(V)")
    return ShortcutPlan(V, "tensor", (), word)


def length_profile(kind: str, x_samples: Iterable[int], p: int = 2,
                   base: HyperbolicBase = DEFAULT_BASE) -> list[dict]:
    """Rows (|x|, length, length / log2|x|, lower bound) for the root 2[1] or [1]-[2]."""
    if kind == "long":
        alpha = long_root(HalfRoot(1, 1), p)
    elif kind == "short":
        alpha = difference(HalfRoot(1, 1), HalfRoot(1, 2), p)
    else:
        raise InvalidInput("kind must be 'short' or 'long'")
    rows = []
    for x in x_samples:
        plan = shortcut(alpha, x, base)
        ax = abs(x)
        norm = elementary(alpha, x).norm_inf()
        rows.append({
            "x": ax,
            "length": plan.length,
            "ratio": plan.length / math.log2(ax) if ax > 1 else None,
            "lower_bound": math.log2(norm) / math.log2(SUBMULT_BASE),
        })
    return rows
