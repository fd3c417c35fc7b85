"""Words in the elementary generators: evaluation, homotopy moves, relators, area search."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .roots import InvalidInput, Root, all_roots
from .spmat import SpMatrix, apply_right, elementary


@dataclass(frozen=True, order=True)
class Letter:
    root: Root
    exponent: int = 1

    def __post_init__(self):
        if self.exponent not in (1, -1):
            raise InvalidInput("letter exponent must be +1 or -1")

    def inverse(self) -> "Letter":
        return Letter(self.root, -self.exponent)

    def __str__(self) -> str:
        return f"e({self.root})" + ("" if self.exponent == 1 else "^-1")


_TOKEN = re.compile(r"e\(([^)]*)\)(?:\^(-?\d+))?")


class Word:
    """An immutable sequence of letters e_alpha^{+-1} in rank p."""

    __slots__ = ("letters", "p")

    def __init__(self, letters: Iterable[Letter] = (), p: int = 0):
        self.letters = tuple(letters)
        if self.letters:
            p = self.letters[0].root.p
            if any(l.root.p != p for l in self.letters):
                raise InvalidInput("letters of mixed rank")
        self.p = p

    @classmethod
    def power(cls, root: Root, x: int) -> "Word":
        sign = 1 if x > 0 else -1
        return cls([Letter(root, sign)] * abs(x), root.p)

    @classmethod
    def from_factors(cls, factors: Iterable[tuple], p: int) -> "Word":
        out: list = []
        for root, x in factors:
            out.extend(cls.power(root, x).letters)
        return cls(out, p)

    @classmethod
    def parse(cls, text: str, p: int) -> "Word":
        letters = []
        for tok in text.split():
            m = _TOKEN.fullmatch(tok)
            if not m:
                raise InvalidInput(f"bad letter token {tok!r}")
            root = Root.parse(m.group(1), p)
            k = int(m.group(2)) if m.group(2) else 1
            letters.extend(cls.power(root, k).letters)
        return cls(letters, p)

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return Word(self.letters[i], self.p)
        return self.letters[i]

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters, self.p or other.p)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def inverse(self) -> "Word":
        return Word((l.inverse() for l in reversed(self.letters)), self.p)

    def __str__(self) -> str:
        return " ".join(str(l) for l in self.letters)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def runs(self) -> list[tuple[Root, int]]:
        """Collapse consecutive letters with the same root into (root, exponent sum)."""
        out: list = []
        for l in self.letters:
            if out and out[-1][0] == l.root:
                out[-1][1] += l.exponent
            else:
                out.append([l.root, l.exponent])
        return [(r, x) for r, x in out if x]


def evaluate(w: Word, p: Optional[int] = None) -> SpMatrix:
    p = w.p or p
    if not p:
        raise InvalidInput("rank of the empty word is unknown; pass p")
    cols = SpMatrix.identity(p).columns()
    for root, x in w.runs():
        apply_right(cols, root, x)
    return SpMatrix.from_columns(cols)


def free_reduce(w: Word) -> Word:
    out: list = []
    for l in w.letters:
        if out and out[-1].root == l.root and out[-1].exponent == -l.exponent:
            out.pop()
        else:
            out.append(l)
    return Word(out, w.p)


def cyclic_core(w: Word) -> Word:
    """Free and cyclic reduction."""
    letters = list(free_reduce(w).letters)
    i, j = 0, len(letters) - 1
    while i < j and letters[i].root == letters[j].root and letters[i].exponent == -letters[j].exponent:
        i += 1
        j -= 1
    return Word(letters[i:j + 1], w.p)


def commutator_word(a: Word, b: Word) -> Word:
    return a + b + a.inverse() + b.inverse()


# ---------------------------------------------------------------- homotopy moves

@dataclass(frozen=True)
class HomotopyMove:
    """One step of a homotopy.

    kind is one of insert_relator, delete_relator, free_expand, free_contract.
    Relator moves cost 1; free moves cost 0.
    """

    kind: str
    position: int
    relator: Optional[Word] = None
    length: Optional[int] = None
    letter: Optional[Letter] = None

    @property
    def cost(self) -> int:
        return 1 if self.kind in ("insert_relator", "delete_relator") else 0


class MoveError(ValueError):
    pass


def apply_move(w: Word, m: HomotopyMove, relators: Optional[set] = None) -> Word:
    L = list(w.letters)
    i = m.position
    if m.kind == "insert_relator":
        if m.relator is None or not 0 <= i <= len(L):
            raise MoveError("insert_relator needs a relator and a position in 0..len(w)")
        if relators is not None and m.relator not in relators:
            raise MoveError("relator not in the active relator set")
        return Word(L[:i] + list(m.relator.letters) + L[i:], w.p or m.relator.p)
    if m.kind == "delete_relator":
        n = m.length if m.length is not None else (len(m.relator) if m.relator else None)
        if n is None or not (0 <= i and i + n <= len(L)):
            raise MoveError("delete_relator target out of range")
        sub = Word(L[i:i + n], w.p)
        if m.relator is not None and sub != m.relator:
            raise MoveError("targeted subword does not match the relator")
        if relators is not None and sub not in relators:
            raise MoveError("targeted subword is not in the active relator set")
        return Word(L[:i] + L[i + n:], w.p)
    if m.kind == "free_expand":
        if m.letter is None or not 0 <= i <= len(L):
            raise MoveError("free_expand needs a letter and a position in 0..len(w)")
        return Word(L[:i] + [m.letter.inverse(), m.letter] + L[i:], w.p)
    if m.kind == "free_contract":
        if not (0 <= i and i + 1 < len(L)):
            raise MoveError("free_contract position out of range")
        a, b = L[i], L[i + 1]
        if not (a.root == b.root and a.exponent == -b.exponent):
            raise MoveError("letters at the position are not an inverse pair")
        return Word(L[:i] + L[i + 2:], w.p)
    raise MoveError(f"unknown move kind {m.kind!r}")


# ---------------------------------------------------------------- relators

def root_coordinates(M: SpMatrix, roots: Sequence[Root]) -> list[tuple[Root, int]]:
    """Coefficients c with M = prod e_gamma(c_gamma), read from each root's leading entry.

    Valid when the root elements involved commute and square to zero pairwise;
    the caller is expected to confirm by reconstruction.
    """
    p = M.p
    out = []
    for g in roots:
        s, t = g.halves()
        c = M[s.position(p), t.position(p)]
        if c:
            out.append((g, c))
    return out


def commutator_terms(a: Root, b: Root, x: int, y: int) -> list[tuple[Root, int]]:
    """[e_a(x), e_b(y)] as a product of root elements in the roots i*a + j*b (i, j >= 1)."""
    cols = SpMatrix.identity(a.p).columns()
    for r, v in ((a, x), (b, y), (a, -x), (b, -y)):
        apply_right(cols, r, v)
    C = SpMatrix.from_columns(cols)
    cands = []
    for i in (1, 2):
        for j in (1, 2):
            v = tuple(i * u + j * w for u, w in zip(a.coeffs, b.coeffs))
            try:
                cands.append(Root(v))
            except InvalidInput:
                pass
    terms = root_coordinates(C, cands)
    cols = SpMatrix.identity(a.p).columns()
    for g, c in terms:
        apply_right(cols, g, c)
    if SpMatrix.from_columns(cols) != C:  # pragma: no cover - would mean the root-coordinate reading failed
        raise AssertionError(f"commutator of {a}, {b} is not a product of root elements")
    return terms


def relator_set(p: int, xbound: int = 3) -> list[Word]:
    """Additivity and commutator relators expanded into +-1 letters.

    Commutator relators carry the full correction, which has two root factors
    when 2a + b or a + 2b is also a root.
    """
    if p < 1 or xbound < 1:
        raise InvalidInput("need p >= 1 and xbound >= 1")
    roots = all_roots(p)
    rng = [v for v in range(-xbound, xbound + 1) if v]
    out: list[Word] = []
    seen = set()

    def emit(w: Word):
        if w not in seen:
            if not evaluate(w, p).is_identity():  # pragma: no cover
                raise AssertionError(f"relator {w} does not evaluate to the identity")
            seen.add(w)
            out.append(w)

    for a in roots:
        for x in rng:
            for y in rng:
                emit(Word.power(a, x) + Word.power(a, y) + Word.power(a, -(x + y)))
    for a in roots:
        for b in roots:
            if a == b or all(u + v == 0 for u, v in zip(a.coeffs, b.coeffs)):
                continue
            for x in rng:
                for y in rng:
                    comm = commutator_word(Word.power(a, x), Word.power(b, y))
                    corr = Word.from_factors([(g, -c) for g, c in reversed(commutator_terms(a, b, x, y))], p)
                    emit(comm + corr)
    return out


def symmetrize(relators: Iterable[Word]) -> set:
    """Cyclic rotations of the cyclic cores of relators and their inverses."""
    out = set()
    for r in relators:
        for w in (r, r.inverse()):
            c = cyclic_core(w).letters
            for k in range(len(c)):
                out.add(c[k:] + c[:k])
    out.discard(())
    return out


def _reduce_letters(seq) -> tuple:
    out: list = []
    for l in seq:
        if out and out[-1].root == l.root and out[-1].exponent == -l.exponent:
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def _core(letters: tuple) -> tuple:
    i, j = 0, len(letters) - 1
    while i < j and letters[i].root == letters[j].root and letters[i].exponent == -letters[j].exponent:
        i += 1
        j -= 1
    return letters[i:j + 1]


class AreaError(ValueError):
    pass


def area_search(w: Word, relators: Iterable[Word], max_len: int, max_cost: int) -> Optional[int]:
    """Minimal number of relator moves taking w to the empty word.

    Breadth-first search over freely reduced words of length <= max_len.  An
    edge inserts a cyclic rotation of a relator or its inverse at some position
    and freely reduces; free moves cost nothing and are absorbed into the
    reduction.  At most max_cost states are expanded; None when the cap is hit.
    """
    relators = list(relators)
    p = w.p or (relators[0].p if relators else 0)
    if w.letters and not evaluate(w).is_identity():
        raise AreaError("input word is not a relation")
    sym = symmetrize(relators)
    start = _reduce_letters(w.letters)
    if not start:
        return 0
    if not sym:
        return None
    cores = set(sym)
    pieces = sorted(sym, key=lambda c: (len(c), [str(l) for l in c]))
    seen = {start}
    frontier = [start]
    depth = 0
    expanded = 0
    while frontier:
        for u in frontier:
            if _core(u) in cores:
                return depth + 1
        nxt = []
        for u in frontier:
            expanded += 1
            if expanded > max_cost:
                return None
            for piece in pieces:
                for i in range(len(u) + 1):
                    v = _reduce_letters(u[:i] + piece + u[i:])
                    if not v:
                        return depth + 1
                    if len(v) <= max_len and v not in seen:
                        seen.add(v)
                        nxt.append(v)
        frontier = nxt
        depth += 1
    return None


def exponent_vector(w: Word) -> dict:
    out: dict = {}
    for l in w.letters:
        out[l.root] = out.get(l.root, 0) + l.exponent
    return {k: v for k, v in out.items() if v}


def area_lower_bound(w: Word, relators: Iterable[Word]) -> int:
    """ceil(|phi(w)|_1 / max_r |phi(r)|_1) for the exponent-sum map phi to Z^Phi."""
    norm = sum(abs(v) for v in exponent_vector(w).values())
    if not norm:
        return 0 if not free_reduce(w).letters else 1
    best = max((sum(abs(v) for v in exponent_vector(r).values()) for r in relators), default=0)
    if not best:
        raise AreaError("relators have trivial exponent sums but w does not")
    return -(-norm // best)


# ---------------------------------------------------------------- relation table

def _comm(a: Root, b: Root, x: int, y: int) -> SpMatrix:
    cols = SpMatrix.identity(a.p).columns()
    for r, v in ((a, x), (b, y), (a, -x), (b, -y)):
        apply_right(cols, r, v)
    return SpMatrix.from_columns(cols)


def _root_or_none(v) -> Optional[Root]:
    if not any(v):
        return None
    try:
        return Root(tuple(v))
    except InvalidInput:
        return None


def _leading(M: SpMatrix, g: Root) -> int:
    s, t = g.halves()
    return M[s.position(g.p), t.position(g.p)]


def relation_table_check(p: int, xbound: int = 3, rule: str = "full") -> list[dict]:
    """Check additivity and the commutator table exactly; return the failures.

    rule 'literal' asserts [e_a(x), e_b(y)] = e_{a+b}(k xy) with k read at x = y = 1.
    rule 'full' adds the factors e_{2a+b}(k' x^2 y) and e_{a+2b}(k'' x y^2) when
    those are roots, again with constants read at x = y = 1.
    Both rules check |k| (1 for short a+b, 2 for long), antisymmetry of k
    and plain commutation when a+b is not a root.
    """
    if rule not in ("full", "literal"):
        raise InvalidInput(f"unknown rule {rule!r}")
    roots = all_roots(p)
    rng = range(-xbound, xbound + 1)
    fails: list = []
    for a in roots:
        for x in rng:
            for y in rng:
                if elementary(a, x) @ elementary(a, y) != elementary(a, x + y):
                    fails.append({"kind": "additivity", "a": str(a), "x": x, "y": y})
    for a in roots:
        for b in roots:
            if a == b:
                continue
            s = [u + v for u, v in zip(a.coeffs, b.coeffs)]
            if not any(s):
                continue
            ab = _root_or_none(s)
            if ab is None:
                for x in rng:
                    for y in rng:
                        if not _comm(a, b, x, y).is_identity():
                            fails.append({"kind": "commute", "a": str(a), "b": str(b), "x": x, "y": y})
                continue
            C1 = _comm(a, b, 1, 1)
            k = _leading(C1, ab)
            if abs(k) != (2 if ab.is_long else 1):
                fails.append({"kind": "kappa_magnitude", "a": str(a), "b": str(b), "kappa": k})
            if _leading(_comm(b, a, 1, 1), ab) != -k:
                fails.append({"kind": "kappa_antisymmetry", "a": str(a), "b": str(b)})
            extra = []
            if rule == "full":
                for i, j in ((2, 1), (1, 2)):
                    g = _root_or_none([i * u + j * v for u, v in zip(a.coeffs, b.coeffs)])
                    if g is not None:
                        extra.append((g, i, j))
                # constants of the extra factors, read after stripping the e_{a+b} term
                base = C1 @ elementary(ab, -k)
                extra = [(g, i, j, _leading(base, g)) for g, i, j in extra]
            for x in rng:
                for y in rng:
                    rhs_cols = SpMatrix.identity(p).columns()
                    apply_right(rhs_cols, ab, k * x * y)
                    for g, i, j, kk in extra:
                        apply_right(rhs_cols, g, kk * x ** i * y ** j)
                    if _comm(a, b, x, y) != SpMatrix.from_columns(rhs_cols):
                        fails.append({"kind": "commutator", "a": str(a), "b": str(b), "x": x, "y": y})
    return fails
