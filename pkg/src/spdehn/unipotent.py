"""Coordinates on the unipotent radical N_{S,T}: the maps u, u_Z and Ab."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .roots import HalfRoot, InvalidInput, SubgroupFrame, sigma
from .spmat import J0, SpMatrix, _canon, is_symplectic


class DomainError(ValueError):
    """An input matrix is outside the subgroup an operation needs."""


def _clean(coeffs: Mapping) -> dict:
    return {k: _canon(Fraction(v)) for k, v in coeffs.items() if v}


@dataclass(frozen=True)
class TensorElem:
    """An element of Z^S (x) Z^T, stored sparsely by (s, t)."""

    frame: SubgroupFrame
    coeffs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        c = _clean(self.coeffs)
        for s, t in c:
            if s not in self.frame.S or t not in self.frame.T:
                raise InvalidInput(f"key ({s}, {t}) not in S x T")
        object.__setattr__(self, "coeffs", c)

    def __getitem__(self, key) -> int:
        return self.coeffs.get(key, 0)

    def __add__(self, other: "TensorElem") -> "TensorElem":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return TensorElem(self.frame, out)

    def __neg__(self) -> "TensorElem":
        return TensorElem(self.frame, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other: "TensorElem") -> "TensorElem":
        return self + (-other)

    def __eq__(self, other) -> bool:
        return isinstance(other, TensorElem) and self.frame == other.frame and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.frame, frozenset(self.coeffs.items())))

    def items(self):
        """Nonzero entries in canonical (s, t) order."""
        return sorted(self.coeffs.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key()))

    def to_json(self) -> str:
        return json.dumps({f"{s}(x){t}": str(v) for (s, t), v in self.items()})

    @classmethod
    def outer(cls, frame: SubgroupFrame, v: Mapping, w: Mapping) -> "TensorElem":
        """v (x) w for v supported on S and w supported on T."""
        return cls(frame, {(s, t): a * b for s, a in v.items() for t, b in w.items()})


def _pair(s: HalfRoot, s2: HalfRoot) -> tuple:
    return (s, s2) if s.sort_key() <= s2.sort_key() else (s2, s)


@dataclass(frozen=True)
class SymElem:
    """An element of Sym^2 of the span of S, keyed by sorted pairs (s, s')."""

    frame: SubgroupFrame
    coeffs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        merged: dict = {}
        for (a, b), v in self.coeffs.items():
            if a not in self.frame.S or b not in self.frame.S:
                raise InvalidInput(f"key ({a}, {b}) not in S x S")
            k = _pair(a, b)
            merged[k] = merged.get(k, 0) + Fraction(v)
        object.__setattr__(self, "coeffs", _clean(merged))

    def __getitem__(self, key):
        return self.coeffs.get(_pair(*key), 0)

    def __add__(self, other: "SymElem") -> "SymElem":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return SymElem(self.frame, out)

    def __neg__(self) -> "SymElem":
        return SymElem(self.frame, {k: -v for k, v in self.coeffs.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, SymElem) and self.frame == other.frame and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.frame, frozenset(self.coeffs.items())))

    def items(self):
        return sorted(self.coeffs.items(), key=lambda kv: (kv[0][0].sort_key(), kv[0][1].sort_key()))

    def to_json(self) -> str:
        return json.dumps({f"{a}.{b}": str(v) for (a, b), v in self.items()})

    @classmethod
    def product(cls, frame: SubgroupFrame, v: Mapping, w: Mapping) -> "SymElem":
        """The symmetric product v w of two vectors supported on S."""
        out: dict = {}
        for a, x in v.items():
            for b, y in w.items():
                k = _pair(a, b)
                out[k] = out.get(k, 0) + x * y
        return cls(frame, out)


def _identity_rows(p: int) -> list[list]:
    return [[1 if i == j else 0 for j in range(2 * p)] for i in range(2 * p)]


def u_of(V: TensorElem) -> SpMatrix:
    """The section N -> matrix: literal u-formula plus the triangular Z_S completion.

    The R^S rows carry V in their R^T columns.  The forced entries in the R^T
    rows come from the symplectic condition.  The R^{-S} columns of the R^S
    rows are zero on and above the diagonal of the S order.  Below the diagonal
    they hold the smallest integer fix for non-simple tensors.
    """
    fr = V.frame
    p = fr.p
    M = _identity_rows(p)
    J = J0(p).rows
    # A = sum V_st z_s z_t^T and B = J0 A^T J0
    for (s, t), x in V.coeffs.items():
        M[s.position(p)][t.position(p)] += x
        # J0 z_t z_s^T J0 = sigma(t) z_{-t} (-sigma(s)) z_{-s}^T
        M[(-t).position(p)][(-s).position(p)] += -sigma(s) * sigma(t) * x
    # symplectic defect lives on the -S x -S block of M^T J M - J
    S = fr.S_sorted
    n = 2 * p

    def defect(a: HalfRoot, b: HalfRoot):
        i, j = (-a).position(p), (-b).position(p)
        return sum(M[k][i] * M[k + p][j] - M[k + p][i] * M[k][j] for k in range(p)) - \
            (1 if j == i + p else (-1 if i == j + p else 0))

    fixes = []
    for ia, a in enumerate(S):
        for b in S[ia + 1:]:
            d = defect(a, b)
            if d:
                # K[-b][-a] = D[-a][-b], with q_{b,-a} = sigma(b) K[-b][-a]
                fixes.append((b, a, sigma(b) * d))
    for b, a, q in fixes:
        M[b.position(p)][(-a).position(p)] += q
    out = SpMatrix(M)
    if not is_symplectic(out):  # pragma: no cover - guarded by tests
        raise AssertionError("u_of produced a non-symplectic matrix")
    return out


def u_simple(frame: SubgroupFrame, v: Mapping, w: Mapping) -> SpMatrix:
    """The formula u(v (x) w) z = z + (w^T z) v + omega(v, z) J0 w."""
    p = frame.p
    n = 2 * p
    J = J0(p).rows
    vv = [0] * n
    ww = [0] * n
    for s, x in v.items():
        vv[s.position(p)] += x
    for t, x in w.items():
        ww[t.position(p)] += x
    Jw = [sum(J[i][k] * ww[k] for k in range(n)) for i in range(n)]
    vJ = [sum(vv[k] * J[k][j] for k in range(n)) for j in range(n)]
    M = _identity_rows(p)
    for i in range(n):
        for j in range(n):
            M[i][j] += vv[i] * ww[j] + Jw[i] * vJ[j]
    return SpMatrix(M)


def u_product(V: TensorElem) -> SpMatrix:
    """Product of u(V_st z_s (x) z_t) over (s, t) in canonical order."""
    M = SpMatrix.identity(V.frame.p)
    for (s, t), x in V.items():
        M = M @ u_simple(V.frame, {s: x}, {t: 1})
    return M


def uz_of(q: SymElem) -> SpMatrix:
    """u_Z(v w) z = z + omega(v, z) w + omega(w, z) v, extended linearly."""
    p = q.frame.p
    M = _identity_rows(p)
    for (a, b), c in q.coeffs.items():
        # w v^T J0 with v^T J0 = -sigma(v) z_{-v}^T
        M[b.position(p)][(-a).position(p)] += -sigma(a) * c
        M[a.position(p)][(-b).position(p)] += -sigma(b) * c
    return SpMatrix(M)


def _allowed_N(frame: SubgroupFrame):
    p = frame.p
    S = {s.position(p) for s in frame.S}
    mS = {(-s).position(p) for s in frame.S}
    T = {t.position(p) for t in frame.T}
    return S, mS, T


def in_N(M: SpMatrix, frame: SubgroupFrame) -> bool:
    if M.p != frame.p:
        return False
    S, mS, T = _allowed_N(frame)
    for i, r in enumerate(M.rows):
        for j, v in enumerate(r):
            if v == (1 if i == j else 0):
                continue
            if not ((i in S and (j in T or j in mS)) or (i in T and j in mS)):
                return False
    return is_symplectic(M)


def in_Z(M: SpMatrix, frame: SubgroupFrame) -> bool:
    if M.p != frame.p:
        return False
    S, mS, _ = _allowed_N(frame)
    for i, r in enumerate(M.rows):
        for j, v in enumerate(r):
            if v != (1 if i == j else 0) and not (i in S and j in mS):
                return False
    return is_symplectic(M)


def ab_of(M: SpMatrix, frame: SubgroupFrame) -> TensorElem:
    """Read the R^T entries of the R^S rows."""
    if not in_N(M, frame):
        raise DomainError("matrix is not in N_{S,T}")
    p = frame.p
    return TensorElem(frame, {(s, t): M[s.position(p), t.position(p)] for s in frame.S for t in frame.T})


def uz_inverse(M: SpMatrix, frame: SubgroupFrame) -> SymElem:
    """-1/2 sum_s z_s . (M - 1) J0 z_s."""
    if not in_Z(M, frame):
        raise DomainError("matrix is not in Z_S")
    p = frame.p
    out: dict = {}
    for s in frame.S:
        # (M - 1) J0 z_s = sigma(s) (M - 1) z_{-s}
        col = (-s).position(p)
        for s2 in frame.S:
            v = M[s2.position(p), col]
            if v:
                k = _pair(s, s2)
                out[k] = out.get(k, 0) + Fraction(-sigma(s) * v, 2)
    return SymElem(frame, out)


def split_N(M: SpMatrix, frame: SubgroupFrame) -> tuple[TensorElem, SymElem]:
    """Write M in N as u_of(V) uz_of(q)."""
    V = ab_of(M, frame)
    rest = u_of(V).inverse() @ M
    return V, uz_inverse(rest, frame)


def omega(v: Sequence, w: Sequence) -> int:
    p = len(v) // 2
    return sum(v[k] * w[k + p] - v[k + p] * w[k] for k in range(p))


def vector(frame: SubgroupFrame, coeffs: Mapping) -> list:
    p = frame.p
    out = [0] * (2 * p)
    for h, x in coeffs.items():
        out[h.position(p)] += x
    return out


def _as_map(vec: Sequence, support, p: int) -> dict:
    return {h: vec[h.position(p)] for h in support if vec[h.position(p)]}


def _apply(M: SpMatrix, vec: Sequence) -> list:
    return [sum(a * b for a, b in zip(r, vec)) for r in M.rows]


def check_umanip(case: str, frame: SubgroupFrame, **inputs) -> bool:
    """Evaluate both sides of the u / u_Z manipulation rules exactly.

    case 'a': V (TensorElem) and/or q (SymElem)
    case 'b': d (SpMatrix in GL(S)), v, w or v, v2 (maps on S / T)
    case 'c': d (SpMatrix in Sp(T)), v, w
    case 'd': v, w, v2, w2
    """
    p = frame.p
    if case == "a":
        ok = True
        if "V" in inputs:
            V = inputs["V"]
            ok &= u_of(V).inverse() == u_of(-V)
        if "q" in inputs:
            q = inputs["q"]
            ok &= uz_of(q).inverse() == uz_of(-q)
        return ok
    if case == "b":
        d = inputs["d"]
        if not is_symplectic(d):
            raise InvalidInput("d must be symplectic")
        di = d.inverse()
        v = inputs["v"]
        dv = _as_map(_apply(d, vector(frame, v)), frame.S, p)
        ok = True
        if "w" in inputs:
            w = inputs["w"]
            ok &= d @ u_simple(frame, v, w) @ di == u_simple(frame, dv, w)
        if "v2" in inputs:
            v2 = inputs["v2"]
            dv2 = _as_map(_apply(d, vector(frame, v2)), frame.S, p)
            lhs = d @ uz_of(SymElem.product(frame, v, v2)) @ di
            ok &= lhs == uz_of(SymElem.product(frame, dv, dv2))
        return ok
    if case == "c":
        d = inputs["d"]
        if not is_symplectic(d):
            raise InvalidInput("d must be symplectic")
        v, w = inputs["v"], inputs["w"]
        dit = d.inverse().transpose()
        w2 = _as_map(_apply(dit, vector(frame, w)), frame.T, p)
        return d @ u_simple(frame, v, w) @ d.inverse() == u_simple(frame, v, w2)
    if case == "d":
        v, w, v2, w2 = inputs["v"], inputs["w"], inputs["v2"], inputs["w2"]
        A = u_simple(frame, v, w)
        B = u_simple(frame, v2, w2)
        lhs = A @ B @ A.inverse() @ B.inverse()
        c = omega(vector(frame, w), vector(frame, w2))
        rhs = uz_of(SymElem.product(frame, {s: c * x for s, x in v.items()}, v2))
        return lhs == rhs
    raise InvalidInput(f"unknown case {case!r}")
