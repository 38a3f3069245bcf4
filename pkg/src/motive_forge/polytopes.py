"""The reflexive pair (Delta(Q), Delta*(Q)) and Batyrev's Hodge numbers.

Delta lives in M = {x in Z^5 : sum q_i x_i = 0} and is cut out by x_i >= -1.
Its dual lives in N = Z^5 / Z Q and is the convex hull of the images of the
unit vectors.  Both are written in a 4-dimensional chart: a unimodular U
with Q U = (1, 0, 0, 0, 0) puts M on the last four columns of U, and the
dual coordinates of e_i are row i of those columns.  When q_1 = 1 the
chart is the usual one, x_1 eliminated and (x_2..x_5) kept.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np

from .weights import AdmissiblePair


# ---------------------------------------------------------------------------
# charts


def kernel_chart(Q) -> tuple[list, list]:
    """Unimodular U (5x5) and its inverse with Q U = (1,0,0,0,0).

    For q_1 = 1 the kernel columns are e_j - q_j e_1, giving the (x_2..x_5)
    chart.  Otherwise column operations run Euclid on the row Q.
    """
    n = len(Q)
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]  # V = U^{-1}
    row = list(Q)

    def colop(dst, src, k):
        # column dst -= k * column src  (U), row src += k * row dst (V)
        row[dst] -= k * row[src]
        for r in range(n):
            U[r][dst] -= k * U[r][src]
        for c in range(n):
            V[src][c] += k * V[dst][c]

    def swap(i, j):
        row[i], row[j] = row[j], row[i]
        for r in range(n):
            U[r][i], U[r][j] = U[r][j], U[r][i]
        V[i], V[j] = V[j], V[i]

    if row[0] == 1:
        for j in range(1, n):
            colop(j, 0, row[j])
    else:
        while any(row[1:]):
            j = min((j for j in range(n) if row[j]), key=lambda j: abs(row[j]))
            if j != 0:
                swap(0, j)
            for k in range(1, n):
                if row[k]:
                    colop(k, 0, row[k] // row[0])
        if row[0] < 0:
            for r in range(n):
                U[r][0] = -U[r][0]
            V[0] = [-x for x in V[0]]
            row[0] = -row[0]
    if row != [1] + [0] * (n - 1):
        raise ArithmeticError(f"gcd of {Q} is not 1")
    return U, V


@dataclass(frozen=True)
class Chart:
    Q: tuple
    U: tuple
    V: tuple

    def to_chart(self, x) -> tuple:
        """Coordinates of x in M (5-vector) in the chart."""
        y = [sum(self.V[r][c] * x[c] for c in range(5)) for r in range(5)]
        if y[0] != 0:
            raise ValueError(f"{x} is not in M")
        return tuple(y[1:])

    def from_chart(self, c) -> tuple:
        return tuple(sum(self.U[r][k + 1] * c[k] for k in range(4)) for r in range(5))

    def dual_image(self, i) -> tuple:
        """Image of e_i in N, i.e. the functional x -> x_i on M."""
        return tuple(self.U[i][1:])


@lru_cache(maxsize=None)
def chart_for(Q) -> Chart:
    U, V = kernel_chart(tuple(Q))
    return Chart(tuple(Q), tuple(map(tuple, U)), tuple(map(tuple, V)))


# ---------------------------------------------------------------------------
# polytopes


def _primitive(v):
    g = reduce(math.gcd, (abs(x) for x in v), 0)
    return tuple(x // g for x in v) if g else tuple(v)


def _hyperplane_normal(points):
    """Integer normal to the affine hull of four points in Z^4 (cofactors)."""
    p0 = points[0]
    rows = [[a - b for a, b in zip(p, p0)] for p in points[1:]]
    M = np.array(rows, dtype=object)
    n = []
    for k in range(4):
        minor = np.delete(M, k, axis=1)
        n.append((-1) ** k * _det3(minor))
    return _primitive(n)


def _det3(a):
    return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
            - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
            + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))


def _affine_rank(points) -> int:
    if len(points) <= 1:
        return 0
    p0 = points[0]
    M = np.array([[a - b for a, b in zip(p, p0)] for p in points[1:]], dtype=np.float64)
    return int(np.linalg.matrix_rank(M))


@dataclass
class Face:
    dim: int
    vertices: tuple  # vertex indices
    facets: tuple  # indices of facets containing the face
    interior: list = field(default_factory=list, repr=False)
    dual: "Face | None" = field(default=None, repr=False)

    @property
    def n_interior(self) -> int:
        return len(self.interior)


class LatticePolytope:
    """Full-dimensional lattice polytope in Z^4 given by vertices.

    Facets are stored as (n, c) meaning <n, x> >= -c with n primitive.
    """

    def __init__(self, vertices, name=""):
        self.vertices = [tuple(int(x) for x in v) for v in vertices]
        self.name = name
        if _affine_rank(self.vertices) != 4:
            raise ValueError("polytope is not full-dimensional")
        self.facets = self._facets()
        self._points = None
        self._faces = None

    def __repr__(self):
        return f"LatticePolytope({self.name or self.vertices})"

    def _facets(self):
        out = []
        seen = set()
        for sub in itertools.combinations(range(len(self.vertices)), 4):
            pts = [self.vertices[i] for i in sub]
            if _affine_rank(pts) != 3:
                continue
            n = _hyperplane_normal(pts)
            vals = [sum(a * b for a, b in zip(n, v)) for v in self.vertices]
            h = vals[sub[0]]
            if all(x >= h for x in vals):
                pass
            elif all(x <= h for x in vals):
                n = tuple(-a for a in n)
                h = -h
            else:
                continue
            if (n, h) not in seen:
                seen.add((n, h))
                out.append((n, -h))
        return out

    @property
    def origin_interior(self) -> bool:
        return all(c > 0 for _, c in self.facets)

    @property
    def is_reflexive(self) -> bool:
        return self.origin_interior and all(c == 1 for _, c in self.facets)

    def vertex_on_facet(self, vi, fi) -> bool:
        n, c = self.facets[fi]
        return sum(a * b for a, b in zip(n, self.vertices[vi])) == -c

    def lattice_points(self) -> list[tuple]:
        if self._points is None:
            self._points = self.box_scan()
        return self._points

    def box_scan(self) -> list[tuple]:
        """Bounding-box scan with all-facet membership (exact, independent)."""
        return sorted(tuple(int(x) for x in row) for row in self._scan())

    def _scan(self):
        V = np.array(self.vertices, dtype=np.int64)
        lo, hi = V.min(axis=0), V.max(axis=0)
        N = np.array([n for n, _ in self.facets], dtype=np.int64)
        C = np.array([c for _, c in self.facets], dtype=np.int64)
        axes = [np.arange(lo[k], hi[k] + 1, dtype=np.int64) for k in range(4)]
        found = []
        # chunk on the first axis to bound memory
        rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, 3)
        for x0 in axes[0]:
            pts = np.column_stack([np.full(len(rest), x0), rest])
            ok = ((pts @ N.T) >= -C).all(axis=1)
            if ok.any():
                found.append(pts[ok])
        return np.concatenate(found) if found else np.zeros((0, 4), dtype=np.int64)

    def tight_facets(self, x) -> frozenset:
        return frozenset(i for i, (n, c) in enumerate(self.facets)
                         if sum(a * b for a, b in zip(n, x)) == -c)

    def faces(self) -> list[Face]:
        """All proper nonempty faces (vertex subsets closed under the facet
        incidence), with relative-interior lattice points."""
        if self._faces is not None:
            return self._faces
        nv, nf = len(self.vertices), len(self.facets)
        inc = [frozenset(f for f in range(nf) if self.vertex_on_facet(v, f)) for v in range(nv)]
        faces = {}
        for r in range(1, nv + 1):
            for sub in itertools.combinations(range(nv), r):
                F = frozenset.intersection(*[inc[v] for v in sub])
                if not F:
                    continue
                closure = tuple(v for v in range(nv) if F <= inc[v])
                if closure == sub and F not in faces:
                    d = _affine_rank([self.vertices[v] for v in sub])
                    faces[F] = Face(d, sub, tuple(sorted(F)))
        for x in self.lattice_points():
            T = self.tight_facets(x)
            if T in faces:
                faces[T].interior.append(x)
        self._faces = sorted(faces.values(), key=lambda f: (f.dim, f.vertices))
        return self._faces

    def faces_of_dim(self, d) -> list[Face]:
        return [f for f in self.faces() if f.dim == d]


def polar_dual(P: LatticePolytope) -> LatticePolytope:
    """Vertices n/c for each facet <n,x> >= -c; integral iff P reflexive."""
    verts = []
    for n, c in P.facets:
        if c <= 0:
            raise ValueError("origin is not interior")
        if any(a % c for a in n):
            raise ValueError(f"non-integral dual vertex {n}/{c}: input is not reflexive")
        verts.append(tuple(a // c for a in n))
    return LatticePolytope(verts, name=f"dual({P.name})")


@dataclass
class PolytopePair:
    pair: AdmissiblePair
    chart: Chart
    delta: LatticePolytope
    dual: LatticePolytope

    def dual_face(self, face: Face) -> Face:
        """Theta* = {y in Delta* : <y, x> = -1 on Theta}."""
        D = self.dual
        ys = [y for y in D.vertices
              if all(sum(a * b for a, b in zip(y, self.delta.vertices[v])) == -1
                     for v in face.vertices)]
        idx = tuple(sorted(D.vertices.index(y) for y in ys))
        for f in D.faces():
            if f.vertices == idx:
                return f
        raise ArithmeticError("dual face not found")


def build_delta(p: AdmissiblePair) -> LatticePolytope:
    ch = chart_for(p.Q)
    verts = []
    for j, mj in enumerate(p.mi):
        x = [-1] * 5
        x[j] = mj - 1
        verts.append(ch.to_chart(x))
    return LatticePolytope(verts, name=f"Delta{p}")


def build_dual(p: AdmissiblePair) -> LatticePolytope:
    ch = chart_for(p.Q)
    P = LatticePolytope([ch.dual_image(i) for i in range(5)], name=f"Delta*{p}")
    P._points = dual_points_by_age(p)
    return P


def dual_points_by_age(p: AdmissiblePair) -> list[tuple]:
    """Lattice points of Delta* without a box scan.

    y = sum lambda_i e_i with lambda >= 0, sum lambda = 1.  Lifting y to
    z in Z^5 gives lambda = z - sQ with s = (sum z - 1)/m, so besides the
    five vertices the points are the k in Z/m with sum_i {-q_i k/m} = 1,
    lifted by z_i = ceil(q_i k / m).
    """
    ch = chart_for(p.Q)
    pts = {ch.dual_image(i) for i in range(5)}
    for k in range(p.m):
        if sum((-q * k) % p.m for q in p.Q) == p.m:
            z = [-((-q * k) // p.m) for q in p.Q]
            pts.add(tuple(sum(z[i] * ch.U[i][c + 1] for i in range(5)) for c in range(4)))
    return sorted(pts)


@lru_cache(maxsize=None)
def polytope_pair(p: AdmissiblePair) -> PolytopePair:
    return PolytopePair(p, chart_for(p.Q), build_delta(p), build_dual(p))


def lattice_points(P: LatticePolytope) -> list:
    return P.lattice_points()


def _hodge_side(P: LatticePolytope, Pd: LatticePolytope, pp: PolytopePair, primal: bool):
    total = len(P.lattice_points()) - 5
    total -= sum(f.n_interior for f in P.faces_of_dim(3))
    corr = 0
    for f in P.faces_of_dim(2):
        if f.n_interior:
            g = pp.dual_face(f) if primal else _dual_face_rev(pp, f)
            corr += f.n_interior * g.n_interior
    return total + corr, corr


def _dual_face_rev(pp: PolytopePair, face: Face) -> Face:
    D = pp.delta
    ys = [x for x in D.vertices
          if all(sum(a * b for a, b in zip(x, pp.dual.vertices[v])) == -1
                 for v in face.vertices)]
    idx = tuple(sorted(D.vertices.index(x) for x in ys))
    for f in D.faces():
        if f.vertices == idx:
            return f
    raise ArithmeticError("dual face not found")


@dataclass
class BatyrevResult:
    h11: int
    h21: int
    codim2_correction_h11: int
    codim2_correction_h21: int


def batyrev_hodge(pp: PolytopePair) -> BatyrevResult:
    if not (pp.delta.is_reflexive and pp.dual.is_reflexive):
        raise ValueError("Batyrev's formula needs a reflexive pair")
    h21, c21 = _hodge_side(pp.delta, pp.dual, pp, True)
    h11, c11 = _hodge_side(pp.dual, pp.delta, pp, False)
    return BatyrevResult(h11, h21, c11, c21)


def origin_intersection(pp: PolytopePair) -> list:
    """Integral points of Delta that also lie in Delta*, both taken inside the
    hyperplane sum q_i x_i = 0 of Q^5 with the standard dot product.

    Returned as 5-vectors.  Identifying M and N through the 4-dimensional
    chart instead is not canonical; see chart_intersection.
    """
    ch = pp.chart
    verts = [ch.from_chart(v) for v in pp.delta.vertices]
    out = []
    for c in pp.delta.lattice_points():
        y = ch.from_chart(c)
        if all(sum(a * b for a, b in zip(y, v)) >= -1 for v in verts):
            out.append(y)
    return sorted(out)


def chart_intersection(pp: PolytopePair) -> list:
    """Lattice points common to Delta and Delta* when both are drawn in the
    same 4-dimensional chart (diagnostic only)."""
    a = set(pp.delta.lattice_points())
    return sorted(x for x in pp.dual.lattice_points() if x in a)


def points_to_monomials(pp: PolytopePair) -> dict:
    """x -> v with v_i = x_i + 1 (five coordinates recovered from the chart)."""
    out = {}
    for c in pp.delta.lattice_points():
        x = pp.chart.from_chart(c)
        out[c] = tuple(xi + 1 for xi in x)
    return out


def face_duality_ok(pp: PolytopePair) -> bool:
    for f in pp.delta.faces():
        if f.dim == 4:
            continue
        g = pp.dual_face(f)
        if f.dim + g.dim != 3:
            return False
    return True
