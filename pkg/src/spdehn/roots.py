"""Half roots, roots and root subsets for the type C_p system."""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional


class InvalidInput(ValueError):
    """Raised for malformed roots, half roots or frames."""


@dataclass(frozen=True)
class HalfRoot:
    """The functional sign*[index]; labels the basis vector z_{sign[index]}."""

    sign: int
    index: int

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise InvalidInput(f"half root sign must be +1 or -1, got {self.sign}")
        if not isinstance(self.index, int) or self.index < 1:
            raise InvalidInput(f"half root index must be a positive integer, got {self.index}")

    def __neg__(self) -> "HalfRoot":
        return HalfRoot(-self.sign, self.index)

    def sort_key(self) -> tuple[int, int]:
        # + before - at equal index
        return (self.index, 0 if self.sign > 0 else 1)

    def __lt__(self, other: "HalfRoot") -> bool:
        return self.sort_key() < other.sort_key()

    def position(self, p: int) -> int:
        """0-based coordinate of z_self in Z^{2p}."""
        if self.index > p:
            raise InvalidInput(f"half root {self} out of range for p={p}")
        return self.index - 1 + (0 if self.sign > 0 else p)

    def coeffs(self, p: int) -> tuple[int, ...]:
        if self.index > p:
            raise InvalidInput(f"half root {self} out of range for p={p}")
        v = [0] * p
        v[self.index - 1] = self.sign
        return tuple(v)

    def __str__(self) -> str:
        return f"{'+' if self.sign > 0 else '-'}{self.index}"

    @classmethod
    def parse(cls, text: str) -> "HalfRoot":
        m = re.fullmatch(r"\s*([+-])(\d+)\s*", text)
        if not m:
            raise InvalidInput(f"cannot parse half root {text!r}")
        return cls(1 if m.group(1) == "+" else -1, int(m.group(2)))


def half_roots(p: int) -> list[HalfRoot]:
    """All 2p half roots in canonical order."""
    return sorted(HalfRoot(sg, i) for i in range(1, p + 1) for sg in (1, -1))


def sigma(h: HalfRoot) -> int:
    """Sign with J0 z_h = sigma(h) z_{-h}."""
    return -1 if h.sign > 0 else 1


def eps(h: HalfRoot) -> int:
    """omega(z_h, z_{-h})."""
    return h.sign


@dataclass(frozen=True)
class Root:
    """A root of C_p stored as its coefficient vector in Z^p."""

    coeffs: tuple[int, ...]

    def __post_init__(self):
        nz = [c for c in self.coeffs if c != 0]
        ok = (len(nz) == 2 and all(abs(c) == 1 for c in nz)) or (len(nz) == 1 and abs(nz[0]) == 2)
        if not ok:
            raise InvalidInput(f"{self.coeffs} is not a root of type C")

    @property
    def p(self) -> int:
        return len(self.coeffs)

    @property
    def is_long(self) -> bool:
        return sum(1 for c in self.coeffs if c) == 1

    @property
    def is_short(self) -> bool:
        return not self.is_long

    def __neg__(self) -> "Root":
        return Root(tuple(-c for c in self.coeffs))

    def halves(self) -> tuple[HalfRoot, HalfRoot]:
        """Canonical (s, t) with self = s - t; for a long root 2s this is (s, -s)."""
        nz = [(i + 1, c) for i, c in enumerate(self.coeffs) if c]
        if len(nz) == 1:
            i, c = nz[0]
            s = HalfRoot(1 if c > 0 else -1, i)
            return s, -s
        (i, a), (j, b) = nz
        if a > 0 and b < 0:
            return HalfRoot(1, i), HalfRoot(1, j)
        if a < 0 and b > 0:
            return HalfRoot(1, j), HalfRoot(1, i)
        if a > 0:
            return HalfRoot(1, i), HalfRoot(-1, j)
        return HalfRoot(-1, i), HalfRoot(1, j)

    def long_half(self) -> HalfRoot:
        if not self.is_long:
            raise InvalidInput(f"{self} is not long")
        return self.halves()[0]

    def sort_key(self):
        support = tuple(i for i, c in enumerate(self.coeffs) if c)
        return (self.is_long, support, tuple(-c for c in self.coeffs))

    def __lt__(self, other: "Root") -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        nz = [(i + 1, c) for i, c in enumerate(self.coeffs) if c]
        if len(nz) == 1:
            i, c = nz[0]
            return f"2*{'+' if c > 0 else '-'}{i}"
        return "".join(f"{'+' if c > 0 else '-'}{i}" for i, c in nz)

    @classmethod
    def parse(cls, text: str, p: int) -> "Root":
        t = text.replace(" ", "")
        m = re.fullmatch(r"2\*([+-]\d+)", t)
        if m:
            return long_root(HalfRoot.parse(m.group(1)), p)
        parts = re.findall(r"[+-]\d+", t)
        if not parts or "".join(parts) != t:
            raise InvalidInput(f"cannot parse root {text!r}")
        v = [0] * p
        for part in parts:
            h = HalfRoot.parse(part)
            if h.index > p:
                raise InvalidInput(f"index {h.index} out of range for p={p}")
            v[h.index - 1] += h.sign
        return cls(tuple(v))


def short_root(s: HalfRoot, t: HalfRoot, p: int) -> Root:
    """The root s - t (requires t != +-s)."""
    if s.index == t.index:
        raise InvalidInput(f"{s} - {t} is not a short root")
    v = [a - b for a, b in zip(s.coeffs(p), t.coeffs(p))]
    return Root(tuple(v))


def long_root(s: HalfRoot, p: int) -> Root:
    return Root(tuple(2 * c for c in s.coeffs(p)))


def difference(s: HalfRoot, t: HalfRoot, p: int) -> Root:
    """s - t for any t != s; gives the long root 2s when t = -s."""
    if s == t:
        raise InvalidInput("s - s is not a root")
    return long_root(s, p) if t == -s else short_root(s, t, p)


def all_roots(p: int) -> list[Root]:
    out = set()
    hs = half_roots(p)
    for s in hs:
        for t in hs:
            if s != t:
                out.add(difference(s, t, p))
    return sorted(out)


def root_add(a: Root, b: Root) -> Optional[Root]:
    if a.p != b.p:
        raise InvalidInput("roots of different rank")
    v = tuple(x + y for x, y in zip(a.coeffs, b.coeffs))
    try:
        return Root(v)
    except InvalidInput:
        return None


class SubsetKind(str, Enum):
    ISOTROPIC = "isotropic"
    SYMPLECTIC = "symplectic"
    NEITHER = "neither"


def classify_subset(X: Iterable[HalfRoot], p: int) -> SubsetKind:
    X = set(X)
    for h in X:
        if h.index > p:
            raise InvalidInput(f"half root {h} out of range for p={p}")
    if not any(-h in X for h in X):
        return SubsetKind.ISOTROPIC
    if all(-h in X for h in X):
        return SubsetKind.SYMPLECTIC
    return SubsetKind.NEITHER


@dataclass(frozen=True)
class SubgroupFrame:
    """An isotropic S and a symplectic T, disjoint from +-S, in rank p."""

    S: frozenset
    T: frozenset
    p: int

    def __post_init__(self):
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "T", frozenset(self.T))
        for h in self.S | self.T:
            if h.index > self.p:
                raise InvalidInput(f"half root {h} out of range for p={self.p}")
        if classify_subset(self.S, self.p) != SubsetKind.ISOTROPIC:
            raise InvalidInput("S must be isotropic")
        if self.T and classify_subset(self.T, self.p) != SubsetKind.SYMPLECTIC:
            raise InvalidInput("T must be symplectic")
        if any(s in self.T or -s in self.T for s in self.S):
            raise InvalidInput("+-S and T must be disjoint")

    @property
    def S_sorted(self) -> list[HalfRoot]:
        return sorted(self.S)

    @property
    def T_sorted(self) -> list[HalfRoot]:
        return sorted(self.T)

    @property
    def T_plus(self) -> list[HalfRoot]:
        return sorted(t for t in self.T if t.sign > 0)

    @property
    def T_minus(self) -> list[HalfRoot]:
        return sorted(t for t in self.T if t.sign < 0)

    @property
    def rest(self) -> list[HalfRoot]:
        """Half roots outside S, -S and T."""
        used = self.S | {-s for s in self.S} | self.T
        return [h for h in half_roots(self.p) if h not in used]

    def phi(self, kind: str) -> list[Root]:
        return phi_set(kind, self)

    def __str__(self) -> str:
        S = ",".join(str(s) for s in self.S_sorted)
        T = ",".join(str(t) for t in self.T_sorted)
        return f"S={{{S}}} T={{{T}}} p={self.p}"


def phi_set(kind: str, frame: SubgroupFrame) -> list[Root]:
    """Root sets attached to a frame, in canonical root order."""
    p = frame.p
    S, T = frame.S_sorted, frame.T_sorted
    out: set[Root] = set()
    kind = kind.upper()
    if kind == "Z":
        for s in S:
            for s2 in S:
                out.add(difference(s, -s2, p))
    elif kind == "N":
        out.update(phi_set("Z", frame))
        for s in S:
            for t in T:
                out.add(difference(s, t, p))
    elif kind == "GL":
        for s in S:
            for s2 in S:
                if s != s2:
                    out.add(difference(s, s2, p))
    elif kind == "SP":
        for t in T:
            for t2 in T:
                if t != t2:
                    out.add(difference(t, t2, p))
    elif kind == "P":
        out.update(phi_set("N", frame))
        out.update(phi_set("GL", frame))
        out.update(phi_set("SP", frame))
    else:
        raise InvalidInput(f"unknown root set kind {kind!r}")
    return sorted(out)


def parse_halfroot_set(text: str) -> frozenset:
    """Parse '+1,-2,±3' (also 'pm3' for ±3) into a set of half roots."""
    out = set()
    for tok in text.replace(" ", "").split(","):
        if not tok:
            continue
        m = re.fullmatch(r"(?:±|pm|\+-)(\d+)", tok)
        if m:
            i = int(m.group(1))
            out.update({HalfRoot(1, i), HalfRoot(-1, i)})
        else:
            out.add(HalfRoot.parse(tok))
    return frozenset(out)
