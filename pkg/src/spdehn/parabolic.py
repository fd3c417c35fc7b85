"""Parabolic subgroups P_{S,T}: membership, block projections and the Omega normal form."""

from __future__ import annotations

from dataclasses import dataclass

from .boundedgen import Decomposition, _entry_sign, sl2_factors, sp_decompose
from .roots import InvalidInput, SubgroupFrame, difference, long_root, phi_set
from .shortcuts import shortcut, shortcut_tensor
from .spmat import SpMatrix, apply_left, elementary, is_symplectic
from .unipotent import DomainError, SymElem, TensorElem, ab_of, in_N, u_of, uz_inverse, uz_of
from .words import Word, evaluate, root_coordinates


class UnsupportedCase(DomainError):
    pass


def parabolic_membership(M: SpMatrix, frame: SubgroupFrame) -> bool:
    """M symplectic, M R^S within R^S, and M z_h = z_h for h outside S, -S and T."""
    if M.p != frame.p:
        raise InvalidInput("rank mismatch")
    p = frame.p
    S = {s.position(p) for s in frame.S}
    rest = {h.position(p) for h in frame.rest}
    n = 2 * p
    for j in range(n):
        col = [M[i, j] for i in range(n)]
        if j in S and any(v for i, v in enumerate(col) if i not in S):
            return False
        if j in rest and any(v != (1 if i == j else 0) for i, v in enumerate(col)):
            return False
    return is_symplectic(M)


@dataclass(frozen=True)
class BlockSplit:
    gl_part: SpMatrix
    sp_part: SpMatrix
    n_tensor: TensorElem
    n_sym: SymElem

    def product(self) -> SpMatrix:
        return self.gl_part @ self.sp_part @ u_of(self.n_tensor) @ uz_of(self.n_sym)


def _sub_block(M: SpMatrix, idx: set) -> SpMatrix:
    n = 2 * M.p
    return SpMatrix([[M[i, j] if (i in idx and j in idx) else (1 if i == j else 0) for j in range(n)]
                     for i in range(n)])


def project_blocks(M: SpMatrix, frame: SubgroupFrame) -> BlockSplit:
    if not parabolic_membership(M, frame):
        raise DomainError("matrix is not in P_{S,T}")
    p = frame.p
    S = {s.position(p) for s in frame.S}
    mS = {(-s).position(p) for s in frame.S}
    T = {t.position(p) for t in frame.T}
    g = _sub_block(M, S)
    h = _sub_block(M, mS)
    gl = g @ h
    sp = _sub_block(M, T)
    n = (gl @ sp).inverse() @ M
    if not in_N(n, frame):  # pragma: no cover - follows from the semidirect structure
        raise AssertionError("unipotent part is not in N_{S,T}")
    V = ab_of(n, frame)
    q = uz_inverse(u_of(V).inverse() @ n, frame)
    split = BlockSplit(gl, sp, V, q)
    if split.product() != M:  # pragma: no cover
        raise AssertionError("block split does not reassemble")
    return split


def gl_factors(G: SpMatrix, frame: SubgroupFrame) -> list:
    """Factors (root, x) with prod elementary = G, for G acting on R^S and R^-S only.

    Integer row reduction of the S x S block with short roots s - s'; the
    remaining diagonal signs become -1 on {z_s, z_-s}, six long-root letters each.
    """
    p = frame.p
    S = frame.S_sorted
    rows = G.row_lists()
    left: list = []

    def op(a, b, y):  # row a += y row b on the S block
        if y:
            root = difference(S[a], S[b], p)
            x = _entry_sign(root, S[a], S[b]) * y
            apply_left(rows, root, x)
            left.append((root, x))

    def g(i, j):
        return rows[S[i].position(p)][S[j].position(p)]

    k = len(S)
    for j in range(k):
        while True:
            nz = [i for i in range(j, k) if g(i, j)]
            if len(nz) <= 1:
                break
            piv = min(nz, key=lambda i: abs(g(i, j)))
            for i in nz:
                if i != piv:
                    op(i, piv, -(g(i, j) // g(piv, j)))
        nz = [i for i in range(j, k) if g(i, j)]
        if not nz:
            raise DomainError("GL block is singular")
        if nz[0] != j:
            i = nz[0]
            op(j, i, 1)
            op(i, j, -(g(i, j) // g(j, j)))
        for i in range(k):
            if i != j and g(i, j):
                op(i, j, -(g(i, j) // g(j, j)))
    out = [(r, -x) for r, x in left]
    for i, s in enumerate(S):
        d = g(i, i)
        if d == -1:
            up, lo = long_root(s, p), long_root(-s, p)
            out += [((up if kk == 1 else lo), y) for kk, y in sl2_factors(-1, 0, 0, -1)]
        elif d != 1:
            raise DomainError("GL block is not unimodular")
    dec = Decomposition(G, out)
    if dec.product() != G:  # pragma: no cover
        raise AssertionError("GL factorization failed")
    return out


def _words(factors, p: int) -> Word:
    w = Word((), p)
    for r, x in factors:
        w = w + shortcut(r, x, check=False).ladder
    return w


def omega_normal_form(M: SpMatrix, frame: SubgroupFrame) -> Word:
    """The word d e n for M in P_{S,T}(Z): GL part, Sp part, then the unipotent radical."""
    if not M.is_integral():
        raise DomainError("Omega needs an integral matrix")
    p = frame.p
    if p < 2:
        raise UnsupportedCase("Omega words need p >= 2 for shortcut letters")
    split = project_blocks(M, frame)
    d = _words(gl_factors(split.gl_part, frame), p) if not split.gl_part.is_identity() else Word((), p)
    if split.sp_part.is_identity():
        e = Word((), p)
    else:
        e = _words(sp_decompose(split.sp_part, frame.T).factors, p)
    n = shortcut_tensor(split.n_tensor).ladder if split.n_tensor.coeffs else Word((), p)
    Zm = uz_of(split.n_sym)
    coords = root_coordinates(Zm, phi_set("Z", frame))
    n = n + _words(coords, p)
    word = d + e + n
    if evaluate(word, p) != M:  # pragma: no cover
        raise AssertionError("Omega word does not evaluate to M")
    return word
