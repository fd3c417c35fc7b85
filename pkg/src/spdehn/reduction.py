"""Reduction theory at desk scale: Siegel points, short-vector sublattices, depth, triangulations."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

import mpmath

from .roots import InvalidInput, Root, all_roots
from .spmat import SpMatrix, apply_right

EPS_DEFAULT = Fraction(1, 4)
NBOX_DEFAULT = Fraction(1, 2)


def positive_roots(p: int) -> list[Root]:
    """Roots whose first nonzero coefficient is positive."""
    return [r for r in all_roots(p) if next(c for c in r.coeffs if c) > 0]


def triangular_order(p: int) -> list[int]:
    """Coordinates ordered so that N^+ is upper unitriangular: z_1..z_p, z_-p..z_-1."""
    return list(range(p)) + list(range(2 * p - 1, p - 1, -1))


@dataclass(frozen=True)
class SiegelPoint:
    n_coords: Mapping
    a_coords: tuple
    eps: Fraction = EPS_DEFAULT
    nbox: Fraction = NBOX_DEFAULT

    def __post_init__(self):
        a = tuple(Fraction(v) for v in self.a_coords)
        object.__setattr__(self, "a_coords", a)
        object.__setattr__(self, "eps", Fraction(self.eps))
        nc = {r: Fraction(v) for r, v in dict(self.n_coords).items() if v}
        object.__setattr__(self, "n_coords", nc)
        p = len(a)
        if p < 1:
            raise InvalidInput("need p >= 1")
        if not 0 < self.eps < 1:
            raise InvalidInput("eps must lie in (0, 1)")
        pos = set(positive_roots(p))
        for r, v in nc.items():
            if r not in pos:
                raise InvalidInput(f"{r} is not a positive root")
            if abs(v) > self.nbox:
                raise InvalidInput(f"coordinate {v} of {r} lies outside the N+ box")
        if any(v <= 0 for v in a):
            raise InvalidInput("a_i must be positive")
        for i in range(p - 1):
            if not a[i] > self.eps * a[i + 1]:
                raise InvalidInput(f"a_{i + 1} > eps a_{i + 2} fails")
        if not a[-1] ** 2 > self.eps:
            raise InvalidInput("a_p > sqrt(eps) fails")

    @property
    def p(self) -> int:
        return len(self.a_coords)

    def diagonal(self) -> list[Fraction]:
        """Diagonal of a in triangular order: a_1..a_p, 1/a_p..1/a_1."""
        a = list(self.a_coords)
        return a + [1 / v for v in reversed(a)]


def n_matrix(pt: SiegelPoint) -> SpMatrix:
    cols = SpMatrix.identity(pt.p).columns()
    for r in positive_roots(pt.p):
        apply_right(cols, r, pt.n_coords.get(r, 0))
    return SpMatrix.from_columns(cols)


def siegel_matrix(pt: SiegelPoint) -> SpMatrix:
    """n a, exactly."""
    cols = n_matrix(pt).columns()
    d = list(pt.a_coords) + [1 / v for v in pt.a_coords]
    return SpMatrix.from_columns([[v * d[j] for v in c] for j, c in enumerate(cols)])


# ---------------------------------------------------------------- integer lattices

def hnf(vectors: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Row-style Hermite normal form of the subgroup generated by `vectors`.

    Rows are in echelon form with positive pivots, and entries above each pivot
    are reduced into [0, pivot).
    """
    rows: dict = {}
    n = len(vectors[0]) if vectors else 0
    for v in vectors:
        _insert(rows, list(v), n)
    out = [rows[c] for c in sorted(rows)]
    for i, r in enumerate(out):
        if r[_lead(r)] < 0:
            out[i] = r = [-x for x in r]
    # left to right: reducing by row i only touches columns right of its pivot
    for i in range(len(out)):
        c = _lead(out[i])
        piv = out[i][c]
        for k in range(i):
            q = out[k][c] // piv
            if q:
                out[k] = [a - q * b for a, b in zip(out[k], out[i])]
    return [tuple(r) for r in out]


def _lead(v) -> int:
    for i, x in enumerate(v):
        if x:
            return i
    return -1


def _insert(rows: dict, v: list, n: int) -> None:
    while True:
        c = _lead(v)
        if c < 0:
            return
        if c not in rows:
            rows[c] = v
            return
        r = rows[c]
        a, b = r[c], v[c]
        if b % a == 0:
            q = b // a
            v = [x - q * y for x, y in zip(v, r)]
            continue
        g, s, t = _xgcd(a, b)
        new_r = [s * x + t * y for x, y in zip(r, v)]
        v = [(a // g) * y - (b // g) * x for x, y in zip(r, v)]
        rows[c] = new_r


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def in_lattice(basis: Sequence[Sequence[int]], v: Sequence[int]) -> bool:
    """Membership of v in the lattice spanned by an HNF basis."""
    v = list(v)
    for r in basis:
        c = _lead(r)
        if v[c] % r[c]:
            return False
        q = v[c] // r[c]
        v = [x - q * y for x, y in zip(v, r)]
    return not any(v)


def _ldl(G: list[list[Fraction]]):
    """G = L D L^T with L unit lower triangular, exact."""
    n = len(G)
    L = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    D = [Fraction(0)] * n
    for j in range(n):
        D[j] = G[j][j] - sum(L[j][k] ** 2 * D[k] for k in range(j))
        if D[j] <= 0:
            raise InvalidInput("Gram matrix is not positive definite")
        for i in range(j + 1, n):
            L[i][j] = (G[i][j] - sum(L[i][k] * L[j][k] * D[k] for k in range(j))) / D[j]
    return L, D


def _int_range(center: Fraction, rad2: Fraction, lo: int, hi: int) -> tuple[int, int]:
    """Integers m in [lo, hi] with (m - center)^2 <= rad2, as a closed interval (empty if lo > hi)."""
    if rad2 < 0:
        return 1, 0
    rad = math.sqrt(float(rad2)) if rad2 < 10 ** 300 else float("inf")
    a = max(lo, math.floor(float(center) - rad) - 1)
    b = min(hi, math.ceil(float(center) + rad) + 1)
    while a <= b and (a - center) ** 2 > rad2:
        a += 1
    while b >= a and (b - center) ** 2 > rad2:
        b -= 1
    return a, b


def short_vector_generators(x: SpMatrix, r, box: int) -> list[tuple[int, ...]]:
    """A generating set for the group spanned by integer v, |v|_inf <= box, |v x|_2 <= r.

    Fincke-Pohst enumeration on an exact LDL^T factorization of x x^T.  At the
    last level the admissible values form an interval; its lower end and (if
    it has two points) the unit vector generate the same group as all of it.
    """
    n = len(x.rows)
    # put the coordinate with the widest range on the last level, where the interval shortcut applies
    widths = _coordinate_widths(x)
    perm = sorted(range(n), key=lambda k: (-widths[k], k))
    rows = [x.rows[k] for k in perm]
    G = [[sum(Fraction(rows[i][k]) * rows[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
    L, D = _ldl(G)
    r2 = Fraction(r) ** 2
    # q(v) = sum_j D_j (v_j + sum_{k>j} L_kj v_k)^2; enumerate j = n-1 .. 0
    out: list = []
    v = [0] * n

    def rec(j: int, budget: Fraction):
        c = -sum((L[k][j] * v[k] for k in range(j + 1, n)), Fraction(0))
        lo, hi = _int_range(c, budget / D[j], -box, box)
        if lo > hi:
            return
        if j == 0:
            v[0] = lo
            out.append(_unpermute(v, perm))
            if hi > lo:
                out.append(_unpermute([1] + [0] * (n - 1), perm))
            v[0] = 0
            return
        for m in range(lo, hi + 1):
            v[j] = m
            rec(j - 1, budget - D[j] * (m - c) ** 2)
        v[j] = 0

    rec(n - 1, r2)
    return [w for w in out if any(w)]


def _unpermute(w, perm) -> tuple:
    v = [0] * len(w)
    for k, val in enumerate(w):
        v[perm[k]] = val
    return tuple(v)


def _coordinate_widths(x: SpMatrix) -> list[Fraction]:
    """Squared column norms of x^-1; |v_k| <= r sqrt(width_k) for |v x| <= r."""
    xi = x.inverse()
    n = len(x.rows)
    return [sum(Fraction(xi[j, k]) ** 2 for j in range(n)) for k in range(n)]


def v_lattice(x: SpMatrix, r, search_box: int) -> list[tuple[int, ...]]:
    """HNF basis of the subgroup generated by v with |v|_inf <= search_box and |v x| <= r."""
    gens = short_vector_generators(x, r, search_box)
    return hnf(gens) if gens else []


def sufficient_box(x: SpMatrix, r) -> int:
    """A box containing every v with |v x|_2 <= r: |v_k| <= r |column k of x^-1|_2."""
    r2 = Fraction(r) ** 2
    return max(math.isqrt(math.floor(r2 * s)) for s in _coordinate_widths(x))


def predicted_span(p: int, i: int) -> list[tuple[int, ...]]:
    """HNF basis of the last 2p - i coordinates in triangular order."""
    order = triangular_order(p)
    vecs = [tuple(1 if k == order[j] else 0 for k in range(2 * p)) for j in range(i, 2 * p)]
    return hnf(vecs)


def in_regime(pt: SiegelPoint, i: int, r, C) -> bool:
    """d_i / C > r > d_{i+1} C for the diagonal in triangular order (1-based i in 1..p)."""
    d = pt.diagonal()
    r, C = Fraction(r), Fraction(C)
    return d[i - 1] / C > r > d[i] * C


def rshort_check(pt: SiegelPoint, i: int, r, C, search_box: Optional[int] = None) -> str:
    """'confirmed', 'refuted' or 'outside_regime' for the predicted V(na, r)."""
    if not 1 <= i <= pt.p:
        raise InvalidInput("index out of range")
    if not in_regime(pt, i, r, C):
        return "outside_regime"
    x = siegel_matrix(pt)
    box = sufficient_box(x, r) if search_box is None else search_box
    got = v_lattice(x, r, box)
    return "confirmed" if got == predicted_span(pt.p, i) else "refuted"


def check_subgroup_basis(basis, gens) -> bool:
    """Every generator lies in the span of basis, and basis is echelon with positive pivots."""
    if any(not in_lattice(basis, g) for g in gens):
        return False
    leads = [_lead(b) for b in basis]
    return leads == sorted(set(leads)) and all(b[c] > 0 for b, c in zip(basis, leads))


# ---------------------------------------------------------------- sampling

def _rand_frac(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 64) -> Fraction:
    """A random rational strictly between lo and hi with denominator dividing den * k."""
    lo, hi = Fraction(lo), Fraction(hi)
    k = 1
    while True:
        a = math.floor(lo * den * k) + 1
        b = math.ceil(hi * den * k) - 1
        if a <= b:
            return Fraction(rng.randint(a, b), den * k)
        k *= 2


def random_n(p: int, rng: random.Random, nbox: Fraction = NBOX_DEFAULT, den: int = 8) -> dict:
    m = int(nbox * den)
    return {r: Fraction(rng.randint(-m, m), den) for r in positive_roots(p)}


def sample_regime(p: int, i: int, C, rng: random.Random, eps: Fraction = EPS_DEFAULT,
                  max_box: int = 50, r=None, tries: int = 2000):
    """A Siegel point and r inside the gap regime at index i, with a provably sufficient box <= max_box."""
    C = Fraction(C)
    for _ in range(tries):
        a = [Fraction(0)] * p
        a[p - 1] = _rand_frac(rng, C if i == p else max(eps, Fraction(1, 2)), 2 * C if i == p else Fraction(2))
        if a[p - 1] ** 2 <= eps:
            continue
        for k in range(p - 2, -1, -1):
            if k == i - 1:
                f = _rand_frac(rng, C * C, 2 * C * C)
            else:
                f = _rand_frac(rng, eps, Fraction(2))
            a[k] = a[k + 1] * f
        try:
            pt = SiegelPoint(random_n(p, rng), tuple(a), eps)
        except InvalidInput:
            continue
        d = pt.diagonal()
        lo, hi = d[i] * C, d[i - 1] / C
        if not lo < hi:
            continue
        rr = Fraction(r) if r is not None else _rand_frac(rng, lo, hi)
        if not lo < rr < hi:
            continue
        box = sufficient_box(siegel_matrix(pt), rr)
        if box <= max_box:
            return pt, rr, box
    raise RuntimeError("could not sample a point in the regime with a small enough box")


def calibrate_C(p: int, rng: random.Random, samples: int = 20, eps: Fraction = EPS_DEFAULT,
                max_box: int = 50, kmax: int = 8) -> tuple[int, list]:
    """Smallest power of two C for which a seeded sweep never refutes the prediction."""
    log = []
    for k in range(1, kmax + 1):
        C = 2 ** k
        bad = 0
        for _ in range(samples):
            for i in range(1, p + 1):
                try:
                    pt, r, box = sample_regime(p, i, C, rng, eps, max_box)
                except RuntimeError:
                    continue
                if rshort_check(pt, i, r, C, box) == "refuted":
                    bad += 1
        log.append((C, bad))
        if bad == 0:
            return C, log
    raise RuntimeError(f"no C up to 2^{kmax} passed: {log}")


# ---------------------------------------------------------------- depth

def depth_proxy(pt: SiegelPoint, prec_bits: int = 32) -> Fraction:
    """max(eps, max over simple roots |sigma(log2 a)|), rounded to 2^-prec_bits."""
    a = pt.a_coords
    p = pt.p
    terms = [a[k] / a[k + 1] for k in range(p - 1)] + [a[-1] ** 2]
    with mpmath.workdps(60):
        best = max(abs(mpmath.log(mpmath.mpf(t.numerator) / t.denominator, 2)) for t in terms)
        scaled = int(mpmath.nint(best * 2 ** prec_bits))
    val = Fraction(scaled, 2 ** prec_bits)
    return max(Fraction(pt.eps), val)


# ---------------------------------------------------------------- triangulation

@dataclass
class Triangulation:
    N: int
    vertices: list = field(default_factory=list)
    triangles: list = field(default_factory=list)

    def edges(self) -> dict:
        """Edge (i, j), i < j -> number of incident triangles."""
        out: dict = {}
        for tri in self.triangles:
            for u, v in ((tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])):
                e = (min(u, v), max(u, v))
                out[e] = out.get(e, 0) + 1
        return out


def check_lipschitz(h: Callable[[int, int], object], N: int) -> dict:
    """Tabulate h on the grid and check h >= 1 and |h(x) - h(y)| <= 1 on axis-adjacent pairs."""
    tab = {(x, y): Fraction(h(x, y)) for x in range(N + 1) for y in range(N + 1)}
    for (x, y), v in tab.items():
        if v < 1:
            raise InvalidInput(f"h({x}, {y}) = {v} < 1")
        for q in ((x + 1, y), (x, y + 1)):
            if q in tab and abs(tab[q] - v) > 1:
                raise InvalidInput(f"h is not 1-Lipschitz between {(x, y)} and {q}")
    return tab


def adaptive_triangulate(N: int, h: Callable[[int, int], object]) -> Triangulation:
    """Quadtree triangulation of [0, N]^2 graded by h.

    A cell of side L >= 2 is split iff 2L > h(center).  For 1-Lipschitz h this
    is automatically 2:1 balanced.  Leaves with a refined neighbour are fanned
    from their centre; the others are cut along one diagonal.
    """
    if N < 1 or N & (N - 1):
        raise InvalidInput("N must be a power of two")
    tab = check_lipschitz(h, N)
    leaves = []
    stack = [(0, 0, N)]
    while stack:
        x, y, L = stack.pop()
        if L >= 2 and 2 * L > tab[(x + L // 2, y + L // 2)]:
            H = L // 2
            stack.extend([(x, y, H), (x + H, y, H), (x, y + H, H), (x + H, y + H, H)])
        else:
            leaves.append((x, y, L))
    corners = set()
    for x, y, L in leaves:
        corners.update({(x, y), (x + L, y), (x, y + L), (x + L, y + L)})
    index: dict = {}
    verts: list = []

    def vid(pnt):
        if pnt not in index:
            index[pnt] = len(verts)
            verts.append(pnt)
        return index[pnt]

    tris = []
    for x, y, L in sorted(leaves):
        c = [(x, y), (x + L, y), (x + L, y + L), (x, y + L)]
        ring = []
        hanging = False
        for k in range(4):
            a, b = c[k], c[(k + 1) % 4]
            ring.append(a)
            if L >= 2:
                m = ((a[0] + b[0]) // 2, (a[1] + b[1]) // 2)
                if m in corners:
                    ring.append(m)
                    hanging = True
        if hanging:
            ctr = vid((x + L // 2, y + L // 2))
            for k in range(len(ring)):
                tris.append((ctr, vid(ring[k]), vid(ring[(k + 1) % len(ring)])))
        else:
            i0, i1, i2, i3 = (vid(q) for q in c)
            tris.append((i0, i1, i2))
            tris.append((i0, i2, i3))
    return Triangulation(N, verts, tris)


def triangulation_report(T: Triangulation, h: Callable[[int, int], object]) -> dict:
    """Check every edge against min(h/6, N/2) <= d <= sqrt(2) h (squared, exactly) and measure sizes."""
    N = T.N
    bad = []
    edges = T.edges()
    for (i, j), cnt in edges.items():
        (x1, y1), (x2, y2) = T.vertices[i], T.vertices[j]
        d2 = (x1 - x2) ** 2 + (y1 - y2) ** 2
        for (px, py) in ((x1, y1), (x2, y2)):
            hv = Fraction(h(px, py))
            lo = min(hv / 6, Fraction(N, 2))
            if not (lo * lo <= d2 <= 2 * hv * hv):
                bad.append(((x1, y1), (x2, y2)))
    # edge matching: interior edges meet two triangles, boundary edges one
    matching = True
    for (i, j), cnt in edges.items():
        (x1, y1), (x2, y2) = T.vertices[i], T.vertices[j]
        on_bd = (x1 == x2 and x1 in (0, N)) or (y1 == y2 and y1 in (0, N))
        if cnt != (1 if on_bd else 2):
            matching = False
    area2 = 0
    sq = Fraction(0)
    for a, b, c in T.triangles:
        pa, pb, pc = T.vertices[a], T.vertices[b], T.vertices[c]
        area2 += abs((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
        lens = [math.dist(pa, pb), math.dist(pb, pc), math.dist(pc, pa)]
        sq += Fraction(sum(lens) ** 2)
    sq += sum(Fraction((T.vertices[i][0] - T.vertices[j][0]) ** 2 + (T.vertices[i][1] - T.vertices[j][1]) ** 2)
              for i, j in edges)
    return {
        "N": N,
        "triangles": len(T.triangles),
        "bad_edges": bad,
        "edge_matching": matching,
        "area_ok": area2 == 2 * N * N,
        "K_count": len(T.triangles) / N ** 2,
        "K_perimeter": float(sq) / N ** 2,
    }


TRIANGULATION_K = 32
