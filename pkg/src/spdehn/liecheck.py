"""The graded nilpotent Lie algebra of N_{S,T}: weights, degree-0 homology and the Killing module."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional

from .roots import HalfRoot, InvalidInput, Root, SubgroupFrame, difference
from .spmat import root_data


@dataclass(frozen=True)
class Weight:
    """A weight on A = D x E; d_part has zero mean, e_part is indexed by T+."""

    d_part: tuple
    e_part: tuple

    @classmethod
    def canonical(cls, d_raw, e_part) -> "Weight":
        d_raw = [Fraction(v) for v in d_raw]
        m = sum(d_raw, Fraction(0)) / len(d_raw) if d_raw else Fraction(0)
        return cls(tuple(v - m for v in d_raw), tuple(int(v) for v in e_part))

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(tuple(a + b for a, b in zip(self.d_part, other.d_part)),
                      tuple(a + b for a, b in zip(self.e_part, other.e_part)))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-a for a in self.d_part), tuple(-a for a in self.e_part))

    def is_zero(self) -> bool:
        return not any(self.d_part) and not any(self.e_part)

    def vector(self) -> tuple:
        return tuple(self.d_part) + tuple(Fraction(v) for v in self.e_part)

    def __str__(self) -> str:
        d = ",".join(str(v) for v in self.d_part)
        e = ",".join(str(v) for v in self.e_part)
        return f"({d} | {e})"


def _sparse_x(alpha: Root) -> dict:
    """X_alpha = e_alpha(1) - 1 as a sparse {(row, col): value} map."""
    s, t, ms, mt, c = root_data(alpha)
    out = {(s, t): 1}
    if c:
        out[(mt, ms)] = out.get((mt, ms), 0) + c
    return out


def _sparse_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for (i, k), v in a.items():
        for (k2, j), w in b.items():
            if k == k2:
                out[(i, j)] = out.get((i, j), 0) + v * w
    return {k: v for k, v in out.items() if v}


def _sparse_bracket(a: dict, b: dict) -> dict:
    ab, ba = _sparse_mul(a, b), _sparse_mul(b, a)
    out = dict(ab)
    for k, v in ba.items():
        out[k] = out.get(k, 0) - v
    return {k: v for k, v in out.items() if v}


@dataclass
class GradedNilpotentAlgebra:
    frame: SubgroupFrame
    basis: list
    labels: list
    weights: list
    brackets: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.basis)

    def bracket(self, i: int, j: int) -> Optional[tuple[int, int]]:
        """[X_i, X_j] as (k, kappa) meaning kappa X_k, or None when it vanishes."""
        if i == j:
            return None
        if i < j:
            return self.brackets.get((i, j))
        got = self.brackets.get((j, i))
        return None if got is None else (got[0], -got[1])

    def index(self, alpha: Root) -> int:
        return self.basis.index(alpha)


def _weight_of(frame: SubgroupFrame, label: tuple) -> Weight:
    S = frame.S_sorted
    Tp = frame.T_plus
    d = [0] * len(S)
    e = [0] * len(Tp)
    kind, a, b = label
    if kind == "ST":
        d[S.index(a)] += 1
        k = Tp.index(b if b.sign > 0 else -b)
        e[k] += -1 if b.sign > 0 else 1
    else:
        d[S.index(a)] += 1
        d[S.index(b)] += 1
    return Weight.canonical(d, e)


def build_algebra(frame: SubgroupFrame) -> GradedNilpotentAlgebra:
    """Basis X_alpha for alpha in Phi_N, brackets from exact matrix commutators."""
    if not frame.S:
        raise InvalidInput("need #S >= 1")
    p = frame.p
    S, T = frame.S_sorted, frame.T_sorted
    basis: list = []
    labels: list = []
    for s in S:
        for t in T:
            basis.append(difference(s, t, p))
            labels.append(("ST", s, t))
    for a, b in combinations(S, 2):
        basis.append(difference(a, -b, p))
        labels.append(("SS", a, b))
    for s in S:
        basis.append(difference(s, -s, p))
        labels.append(("SS", s, s))
    weights = [_weight_of(frame, lab) for lab in labels]
    mats = [_sparse_x(r) for r in basis]
    where = {r: k for k, r in enumerate(basis)}
    alg = GradedNilpotentAlgebra(frame, basis, labels, weights)
    for i, j in combinations(range(len(basis)), 2):
        br = _sparse_bracket(mats[i], mats[j])
        if not br:
            continue
        target = tuple(u + v for u, v in zip(basis[i].coeffs, basis[j].coeffs))
        k = where.get(Root(target)) if any(target) else None
        if k is None:
            raise AssertionError(f"bracket of {basis[i]}, {basis[j]} leaves the algebra")
        s, t, *_ = root_data(basis[k])
        kappa = br.get((s, t), 0)
        if not kappa or {q: kappa * v for q, v in mats[k].items()} != br:
            raise AssertionError(f"bracket of {basis[i]}, {basis[j]} is not a multiple of X_{basis[k]}")
        alg.brackets[(i, j)] = (k, kappa)
    return alg


# ---------------------------------------------------------------- exact linear algebra

def rank(rows: list) -> int:
    """Rank over Q of an integer matrix, by fraction-free (Bareiss) elimination."""
    M = [list(r) for r in rows if any(r)]
    if not M:
        return 0
    n = len(M[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][c]), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pv = M[r][c]
        for i in range(r + 1, len(M)):
            a = M[i][c]
            M[i] = [(pv * M[i][k] - a * M[r][k]) // prev for k in range(n)]
        prev = pv
        r += 1
        if r == len(M):
            break
    return r


# ---------------------------------------------------------------- graded pieces

def _by_weight(alg: GradedNilpotentAlgebra) -> dict:
    out: dict = {}
    for k, w in enumerate(alg.weights):
        out.setdefault(w, []).append(k)
    return out


def zero_weight_component(space: str, alg: GradedNilpotentAlgebra) -> list[tuple]:
    """Basis of the degree-0 piece as sorted index tuples (ordered pairs for tensor2)."""
    table = _by_weight(alg)
    n = len(alg)
    W = alg.weights
    if space == "u":
        return [(k,) for k in range(n) if W[k].is_zero()]
    if space in ("tensor2", "wedge2", "sym2"):
        out = []
        for i in range(n):
            for j in table.get(-W[i], ()):
                if space == "tensor2" or (space == "wedge2" and i < j) or (space == "sym2" and i <= j):
                    out.append((i, j))
        return sorted(out)
    if space == "wedge3":
        out = set()
        for i, j in combinations(range(n), 2):
            for k in table.get(-(W[i] + W[j]), ()):
                if k != i and k != j:
                    out.add(tuple(sorted((i, j, k))))
        return sorted(out)
    raise InvalidInput(f"unknown space {space!r}")


def _wedge(i: int, j: int, coef: int) -> Optional[tuple[tuple, int]]:
    if i == j:
        return None
    return ((i, j), coef) if i < j else ((j, i), -coef)


def d3_image(alg: GradedNilpotentAlgebra, triple: tuple) -> dict:
    """d3(x ^ y ^ z) = [x,y]^z + [y,z]^x + [z,x]^y in the wedge2 basis."""
    x, y, z = triple
    out: dict = {}
    for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
        br = alg.bracket(a, b)
        if br is None:
            continue
        w = _wedge(br[0], c, br[1])
        if w:
            out[w[0]] = out.get(w[0], 0) + w[1]
    return {k: v for k, v in out.items() if v}


def d2_image(alg: GradedNilpotentAlgebra, pair: tuple) -> dict:
    br = alg.bracket(*pair)
    return {} if br is None else {br[0]: br[1]}


def _matrix(cols: list[dict], index: dict) -> list[list[int]]:
    """Rows = images of domain basis vectors, written in the codomain basis."""
    return [[img.get(key, 0) for key in index] for img in cols]


def _sym(i: int, j: int) -> tuple:
    return (i, j) if i <= j else (j, i)


def kill_relation(alg: GradedNilpotentAlgebra, x: int, y: int, z: int) -> dict:
    """[x,y] . z - [x,z] . y in the sym2 basis."""
    out: dict = {}
    for a, b, c, sign in ((x, y, z, 1), (x, z, y, -1)):
        br = alg.bracket(a, b)
        if br is not None:
            key = _sym(br[0], c)
            out[key] = out.get(key, 0) + sign * br[1]
    return {k: v for k, v in out.items() if v}


@dataclass
class DegreeZeroComplex:
    u0: list
    w2: list
    w3: list
    d2: list
    d3: list


def degree_zero_complex(alg: GradedNilpotentAlgebra) -> DegreeZeroComplex:
    u0 = [k for (k,) in zero_weight_component("u", alg)]
    w2 = zero_weight_component("wedge2", alg)
    w3 = zero_weight_component("wedge3", alg)
    d2 = _matrix([d2_image(alg, q) for q in w2], {k: None for k in u0})
    d3 = _matrix([d3_image(alg, t) for t in w3], {q: None for q in w2})
    return DegreeZeroComplex(u0, w2, w3, d2, d3)


def h2_zero_dim(alg: GradedNilpotentAlgebra) -> int:
    cx = degree_zero_complex(alg)
    ker = len(cx.w2) - rank(cx.d2)
    return ker - rank(cx.d3)


def chain_property(alg: GradedNilpotentAlgebra) -> bool:
    """d2 o d3 = 0 on the degree-0 piece, as an exact matrix product."""
    cx = degree_zero_complex(alg)
    for row in cx.d3:
        img = [sum(row[q] * cx.d2[q][k] for q in range(len(cx.w2))) for k in range(len(cx.u0))]
        if any(img):
            return False
    return True


def _ordered_zero_triples(alg: GradedNilpotentAlgebra):
    table = _by_weight(alg)
    W = alg.weights
    n = len(alg)
    for x in range(n):
        for y in range(n):
            for z in table.get(-(W[x] + W[y]), ()):
                yield x, y, z


def kill_zero_dim(alg: GradedNilpotentAlgebra) -> int:
    s2 = zero_weight_component("sym2", alg)
    if not s2:
        return 0
    index = {q: None for q in s2}
    rels = [kill_relation(alg, x, y, z) for x, y, z in _ordered_zero_triples(alg)]
    rels = [r for r in rels if r]
    return len(s2) - rank(_matrix(rels, index))


def jacobi_holds(alg: GradedNilpotentAlgebra) -> bool:
    n = len(alg)

    def bb(a, b, c):  # [[a, b], c] as {k: coef}
        br = alg.bracket(a, b)
        if br is None:
            return {}
        br2 = alg.bracket(br[0], c)
        return {} if br2 is None else {br2[0]: br[1] * br2[1]}

    for x, y, z in combinations(range(n), 3):
        tot: dict = {}
        for a, b, c in ((x, y, z), (y, z, x), (z, x, y)):
            for k, v in bb(a, b, c).items():
                tot[k] = tot.get(k, 0) + v
        if any(tot.values()):
            return False
    return True


def two_step_nilpotent(alg: GradedNilpotentAlgebra) -> bool:
    derived = {k for k, _ in alg.brackets.values()}
    return all(alg.bracket(k, j) is None for k in derived for j in range(len(alg)))


def weights_additive(alg: GradedNilpotentAlgebra) -> bool:
    return all(alg.weights[k] == alg.weights[i] + alg.weights[j] for (i, j), (k, _) in alg.brackets.items())


def antisymmetric(alg: GradedNilpotentAlgebra) -> bool:
    """Recompute each bracket in the opposite order from matrices and compare."""
    mats = [_sparse_x(r) for r in alg.basis]
    for (i, j), (k, kappa) in alg.brackets.items():
        rev = _sparse_bracket(mats[j], mats[i])
        if rev != {q: -kappa * v for q, v in mats[k].items()}:
            return False
    return True


# ---------------------------------------------------------------- criteria

def abelianization_weights(alg: GradedNilpotentAlgebra) -> dict:
    """Weight -> dimension of that graded piece of u/[u,u] (nonzero pieces only)."""
    hit = {k for k, _ in alg.brackets.values()}
    out: dict = {}
    for k, w in enumerate(alg.weights):
        if k not in hit:
            out[w] = out.get(w, 0) + 1
    return out


def _negatively_proportional(a: Weight, b: Weight) -> bool:
    u, v = a.vector(), b.vector()
    k = next((i for i, x in enumerate(v) if x), None)
    if k is None or not u[k]:
        return False
    c = u[k] / v[k]
    return c < 0 and all(x == c * y for x, y in zip(u, v))


def quasi_opposite_pairs(alg: GradedNilpotentAlgebra) -> list[tuple[Weight, Weight]]:
    ws = [w for w in abelianization_weights(alg) if not w.is_zero()]
    return [(a, b) for a, b in combinations(ws, 2) if _negatively_proportional(a, b)]


@dataclass(frozen=True)
class DctReport:
    frame: str
    dim: int
    standard_solvable: bool
    quasi_opposite_principal: bool
    h2_0: int
    kill_0: int

    @property
    def verdict(self) -> bool:
        return self.standard_solvable and not self.quasi_opposite_principal and self.h2_0 == 0 and self.kill_0 == 0

    def as_dict(self) -> dict:
        return {"frame": self.frame, "dim": self.dim, "standard_solvable": self.standard_solvable,
                "quasi_opposite_principal": self.quasi_opposite_principal, "h2_0": self.h2_0,
                "kill_0": self.kill_0, "verdict": self.verdict}


def dct_report(frame: SubgroupFrame, alg: Optional[GradedNilpotentAlgebra] = None) -> DctReport:
    alg = alg or build_algebra(frame)
    ab = abelianization_weights(alg)
    return DctReport(
        frame=str(frame),
        dim=len(alg),
        standard_solvable=not any(w.is_zero() for w in ab),
        quasi_opposite_principal=bool(quasi_opposite_pairs(alg)),
        h2_0=h2_zero_dim(alg),
        kill_0=kill_zero_dim(alg),
    )


def standard_frame(ns: int, nt_pairs: int) -> SubgroupFrame:
    """S = {[1]..[ns]}, T = {+-[ns+1]..+-[ns+nt_pairs]}."""
    p = ns + nt_pairs
    S = {HalfRoot(1, i) for i in range(1, ns + 1)}
    T = {HalfRoot(sg, i) for i in range(ns + 1, p + 1) for sg in (1, -1)}
    return SubgroupFrame(S, T, p)


def four_point_identities(alg: GradedNilpotentAlgebra) -> dict:
    """For #S = 4 and T nonempty: the explicit boundary and Killing relations.

    For every partition {s1, s2} | {s3, s4} of S, checks that
    d3(X_{s1+t} ^ X_{s2-t} ^ X_{s3+s4}) is a nonzero multiple of X_{s1+s2} ^ X_{s3+s4}
    and that [X_{s1+t}, X_{s2-t}] . X_{s3+s4} - [X_{s1+t}, X_{s3+s4}] . X_{s2-t}
    is a nonzero multiple of X_{s1+s2} . X_{s3+s4}.
    """
    frame = alg.frame
    S = frame.S_sorted
    if len(S) != 4 or not frame.T:
        raise InvalidInput("needs #S = 4 and T nonempty")
    p = frame.p
    t = frame.T_sorted[0]
    idx = {r: k for k, r in enumerate(alg.basis)}
    cx = degree_zero_complex(alg)
    r3 = rank(cx.d3)
    boundary_ok = kill_ok = span_ok = True
    s1 = S[0]
    for s2 in S[1:]:
        s3, s4 = [s for s in S if s not in (s1, s2)]
        x = idx[difference(s1, -t, p)]
        y = idx[difference(s2, t, p)]
        z = idx[difference(s3, -s4, p)]
        a, b = idx[difference(s1, -s2, p)], idx[difference(s3, -s4, p)]
        img = d3_image(alg, (x, y, z))
        key = (min(a, b), max(a, b))
        boundary_ok &= set(img) == {key} and img[key] != 0
        vec = [1 if q == key else 0 for q in cx.w2]
        span_ok &= rank(cx.d3 + [vec]) == r3
        rel = kill_relation(alg, x, y, z)
        kill_ok &= set(rel) == {_sym(a, b)} and rel[_sym(a, b)] != 0
    return {"boundary": boundary_ok, "in_image_d3": span_ok, "kill_relation": kill_ok}
