"""Exact symplectic matrices over Z and Q, and the elementary generators."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .roots import HalfRoot, InvalidInput, Root, sigma

Number = Union[int, Fraction]


def _canon(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def root_data(alpha: Root) -> tuple[int, int, int, int, int]:
    """Column-operation data (s, t, ms, mt, c) for e_alpha.

    For a short root, X_alpha = z_s z_t^T + c z_{-t} z_{-s}^T; for a long
    root 2s, X_alpha = z_s z_{-s}^T and t = -s, c = 0.  Positions are 0-based.
    """
    p = alpha.p
    s, t = alpha.halves()
    if alpha.is_long:
        return s.position(p), t.position(p), t.position(p), s.position(p), 0
    c = -sigma(s) * sigma(t)
    return s.position(p), t.position(p), (-s).position(p), (-t).position(p), c


_DATA_CACHE: dict = {}


def _data(alpha: Root):
    d = _DATA_CACHE.get(alpha)
    if d is None:
        d = _DATA_CACHE[alpha] = root_data(alpha)
    return d


def apply_right(cols: list, alpha: Root, x: Number) -> None:
    """In place: cols <- cols * e_alpha(x), where cols[k] is column k."""
    if not x:
        return
    s, t, ms, mt, c = _data(alpha)
    cs, ct = cols[s], cols[t]
    for i in range(len(ct)):
        if cs[i]:
            ct[i] += x * cs[i]
    if c:
        cx = c * x
        cmt, cms = cols[mt], cols[ms]
        for i in range(len(cms)):
            if cmt[i]:
                cms[i] += cx * cmt[i]


def apply_left(rows: list, alpha: Root, x: Number) -> None:
    """In place: rows <- e_alpha(x) * rows, where rows[k] is row k."""
    if not x:
        return
    s, t, ms, mt, c = _data(alpha)
    rs, rt = rows[s], rows[t]
    for j in range(len(rs)):
        if rt[j]:
            rs[j] += x * rt[j]
    if c:
        cx = c * x
        rmt, rms = rows[mt], rows[ms]
        for j in range(len(rmt)):
            if rms[j]:
                rmt[j] += cx * rms[j]


class SpMatrix:
    """An immutable 2p x 2p matrix with integer or Fraction entries."""

    __slots__ = ("rows", "p", "_hash")

    def __init__(self, rows: Iterable[Iterable[Number]], check: bool = False):
        rows = tuple(tuple(_canon(v) for v in r) for r in rows)
        n = len(rows)
        if n % 2 or any(len(r) != n for r in rows):
            raise InvalidInput("expected a square matrix of even size")
        self.rows = rows
        self.p = n // 2
        self._hash = None
        if check and not is_symplectic(self):
            raise InvalidInput("matrix is not symplectic")

    @classmethod
    def identity(cls, p: int) -> "SpMatrix":
        return cls([[1 if i == j else 0 for j in range(2 * p)] for i in range(2 * p)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[Number]]) -> "SpMatrix":
        n = len(cols)
        return cls([[cols[j][i] for j in range(n)] for i in range(n)])

    def columns(self) -> list[list]:
        n = 2 * self.p
        return [[self.rows[i][j] for i in range(n)] for j in range(n)]

    def row_lists(self) -> list[list]:
        return [list(r) for r in self.rows]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, SpMatrix) and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __matmul__(self, other: "SpMatrix") -> "SpMatrix":
        if self.p != other.p:
            raise InvalidInput("rank mismatch")
        n = 2 * self.p
        cols = other.columns()
        out = []
        for r in self.rows:
            nzr = [(k, v) for k, v in enumerate(r) if v]
            out.append([sum(v * c[k] for k, v in nzr) for c in cols])
        return SpMatrix(out)

    def transpose(self) -> "SpMatrix":
        return SpMatrix(zip(*self.rows))

    def inverse(self) -> "SpMatrix":
        """Symplectic inverse -J0 M^T J0 (exact, no division)."""
        p, n = self.p, 2 * self.p
        # (-J0 M^T J0)[i][j] = sgn * M[j'][i'] with i' = i +- p, j' = j +- p
        out = [[0] * n for _ in range(n)]
        for i in range(n):
            ii, si = (i + p, 1) if i < p else (i - p, -1)
            for j in range(n):
                jj, sj = (j + p, 1) if j < p else (j - p, -1)
                out[i][j] = si * sj * self.rows[jj][ii]
        return SpMatrix(out)

    def is_integral(self) -> bool:
        return all(isinstance(v, int) for r in self.rows for v in r)

    def norm_inf(self):
        """Largest absolute entry."""
        return max(abs(v) for r in self.rows for v in r)

    def is_identity(self) -> bool:
        return all((v == 1) if i == j else (v == 0) for i, r in enumerate(self.rows) for j, v in enumerate(r))

    def tolist(self) -> list[list]:
        return [list(r) for r in self.rows]

    def to_text(self) -> str:
        lines = [f"p={self.p}"]
        lines += [" ".join(str(v) for v in r) for r in self.rows]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SpMatrix":
        text = text.strip()
        if text.startswith("["):
            return cls([[Fraction(v) if isinstance(v, str) else v for v in r] for r in json.loads(text)])
        lines = [ln for ln in text.splitlines() if ln.strip()]
        p = None
        if lines and lines[0].replace(" ", "").startswith("p="):
            p = int(lines[0].split("=", 1)[1])
            lines = lines[1:]
        rows = [[Fraction(tok) for tok in ln.split()] for ln in lines]
        m = cls(rows)
        if p is not None and m.p != p:
            raise InvalidInput(f"header says p={p} but matrix has p={m.p}")
        return m

    def __repr__(self) -> str:
        return f"SpMatrix({self.tolist()})"


def J0(p: int) -> SpMatrix:
    n = 2 * p
    rows = [[0] * n for _ in range(n)]
    for i in range(p):
        rows[i][p + i] = 1
        rows[p + i][i] = -1
    return SpMatrix(rows)


def is_symplectic(M) -> bool:
    rows = M.rows if isinstance(M, SpMatrix) else [tuple(r) for r in M]
    n = len(rows)
    if n % 2 or any(len(r) != n for r in rows):
        raise InvalidInput("is_symplectic needs a square matrix of even size")
    p = n // 2
    # (M^T J0 M)[i][j] = sum_k M[k][i] M[k+p][j] - M[k+p][i] M[k][j]
    for i in range(n):
        for j in range(i, n):
            v = sum(rows[k][i] * rows[k + p][j] - rows[k + p][i] * rows[k][j] for k in range(p))
            want = 1 if j == i + p else (-1 if i == j + p else 0)
            if v != want:
                return False
    return True


def elementary(alpha: Root, x: Number = 1) -> SpMatrix:
    cols = SpMatrix.identity(alpha.p).columns()
    apply_right(cols, alpha, x)
    return SpMatrix.from_columns(cols)


def elementary_formula(alpha: Root) -> SpMatrix:
    """e_alpha built directly from the defining vector formulas (independent route)."""
    p = alpha.p
    n = 2 * p
    J = J0(p).rows
    s, t = alpha.halves()
    zs = [1 if k == s.position(p) else 0 for k in range(n)]
    cols = []
    for k in range(n):
        v = [1 if i == k else 0 for i in range(n)]
        if alpha.is_long:
            coef = v[(-s).position(p)]
            w = [v[i] + coef * zs[i] for i in range(n)]
        else:
            a = v[t.position(p)]
            sJv = sum(zs[i] * sum(J[i][j] * v[j] for j in range(n)) for i in range(n))
            Jzt = [J[i][t.position(p)] for i in range(n)]
            w = [v[i] + a * zs[i] + sJv * Jzt[i] for i in range(n)]
        cols.append(w)
    return SpMatrix.from_columns(cols)


@dataclass(frozen=True)
class DiagSp:
    """diag(a_1..a_p, 1/a_1..1/a_p) with positive rational a_i."""

    a: tuple

    def __post_init__(self):
        vals = tuple(Fraction(v) for v in self.a)
        if any(v <= 0 for v in vals):
            raise InvalidInput("DiagSp entries must be positive")
        object.__setattr__(self, "a", vals)

    @property
    def p(self) -> int:
        return len(self.a)

    def matrix(self) -> SpMatrix:
        d = list(self.a) + [1 / v for v in self.a]
        n = len(d)
        return SpMatrix([[d[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def inverse(self) -> "DiagSp":
        return DiagSp(tuple(1 / v for v in self.a))


def conjugate_by_diag(D: DiagSp, alpha: Root, x: Number) -> tuple[Root, Fraction]:
    """D e_alpha(x) D^-1 = e_alpha(x') with x' = x * prod a_i^{c_i}."""
    if D.p != alpha.p:
        raise InvalidInput("rank mismatch")
    f = Fraction(x)
    for a, c in zip(D.a, alpha.coeffs):
        f *= a ** c
    return alpha, _canon(f)


def commutator(A: SpMatrix, B: SpMatrix) -> SpMatrix:
    """[A, B] = A B A^-1 B^-1."""
    return A @ B @ A.inverse() @ B.inverse()
