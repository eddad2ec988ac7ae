"""Exact rational linear algebra and desk-scale polyhedral geometry.

Everything in this module is pure and exact: coordinates are
`fractions.Fraction`, inputs are never mutated, and no floating point is used
anywhere.  Algorithms favour subset enumeration over asymptotically clever
alternatives; the intended ambient dimension is small (<= 8).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction as Q
from functools import lru_cache
from typing import NamedTuple

VecQ = tuple[Q, ...]
IntVec = tuple[int, ...]

MAX_DIM = 8


# ---------------------------------------------------------------------------
# vectors and matrices


def qvec(xs) -> VecQ:
    return tuple(Q(x) for x in xs)


def dot(u, v):
    if len(u) != len(v):
        raise ValueError("dimension mismatch")
    return sum(a * b for a, b in zip(u, v))


def vadd(u, v):
    return tuple(a + b for a, b in zip(u, v))


def vsub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def vscale(c, u):
    return tuple(c * a for a in u)


def vneg(u):
    return tuple(-a for a in u)


def is_zero(u) -> bool:
    return all(a == 0 for a in u)


def primitive(v) -> IntVec:
    """Positive rescaling of a nonzero rational vector to a primitive lattice vector."""
    w = qvec(v)
    if is_zero(w):
        raise ValueError("zero vector has no primitive form")
    mult = math.lcm(*(x.denominator for x in w))
    ints = [int(x * mult) for x in w]
    g = math.gcd(*(abs(i) for i in ints))
    return tuple(i // g for i in ints)


def is_primitive_lattice(v) -> bool:
    w = qvec(v)
    if is_zero(w) or any(x.denominator != 1 for x in w):
        return False
    return math.gcd(*(abs(int(x)) for x in w)) == 1


def solve_unique(a, b):
    """Solve A x = b exactly; None unless a solution exists and is unique."""
    m = len(a)
    n = len(a[0]) if m else 0
    aug = [[Q(x) for x in row] + [Q(bi)] for row, bi in zip(a, b)]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
        if r == m:
            break
    if len(pivots) < n:
        return None
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    x = [Q(0)] * n
    for i, c in enumerate(pivots):
        x[c] = aug[i][n]
    return tuple(x)


def rank(rows) -> int:
    work = [[Q(x) for x in row] for row in rows]
    if not work:
        return 0
    n = len(work[0])
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        pv = work[r][c]
        work[r] = [x / pv for x in work[r]]
        for i in range(r + 1, len(work)):
            if work[i][c] != 0:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        r += 1
    return r


def nullspace(rows, n):
    """Basis of {x in Q^n : A x = 0}."""
    work = [[Q(x) for x in row] for row in rows]
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, len(work)) if work[i][c] != 0), None)
        if p is None:
            continue
        work[r], work[p] = work[p], work[r]
        pv = work[r][c]
        work[r] = [x / pv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][c] != 0:
                f = work[i][c]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Q(0)] * n
        vec[fc] = Q(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -work[i][fc]
        basis.append(tuple(vec))
    return basis


def det(rows) -> Q:
    n = len(rows)
    work = [[Q(x) for x in row] for row in rows]
    sign = 1
    out = Q(1)
    for c in range(n):
        p = next((i for i in range(c, n) if work[i][c] != 0), None)
        if p is None:
            return Q(0)
        if p != c:
            work[c], work[p] = work[p], work[c]
            sign = -sign
        pv = work[c][c]
        out *= pv
        for i in range(c + 1, n):
            if work[i][c] != 0:
                f = work[i][c] / pv
                work[i] = [x - f * y for x, y in zip(work[i], work[c])]
    return sign * out


def affine_dim(points) -> int:
    pts = [qvec(p) for p in points]
    if len(pts) <= 1:
        return 0
    return rank([vsub(p, pts[0]) for p in pts[1:]])


# ---------------------------------------------------------------------------
# polytopes


@dataclass(frozen=True)
class VPolytope:
    """Polytope as an irredundant, lexicographically sorted vertex tuple."""

    vertices: tuple[VecQ, ...]
    dim: int

    @property
    def ambient_dim(self) -> int:
        return len(self.vertices[0])


@dataclass(frozen=True)
class HPolytope:
    """Intersection of half-spaces <u, normal> >= offset with primitive integral normals."""

    constraints: tuple[tuple[IntVec, Q], ...]

    @property
    def ambient_dim(self) -> int:
        return len(self.constraints[0][0])


@dataclass(frozen=True)
class ConeH:
    """Closed convex cone {v : <a, v> <= 0 for each normal a}; contains 0."""

    normals: tuple[IntVec, ...]
    dim: int

    def contains(self, v) -> bool:
        return all(dot(a, v) <= 0 for a in self.normals)


class ConeGenerators(NamedTuple):
    rays: tuple[IntVec, ...]
    lineality: tuple[IntVec, ...]


@dataclass(frozen=True)
class Fan:
    """Maximal cones of a normal fan, each tagged by its generating vertex."""

    cones: tuple[tuple[VecQ, ConeH], ...]


def _in_convex_hull(p, points) -> bool:
    # Caratheodory: p lies in the hull iff some affinely independent subset
    # of size <= d+1 carries it with nonnegative barycentric weights.
    pts = [qvec(x) for x in points]
    p = qvec(p)
    if not pts:
        return False
    d = len(p)
    for k in range(1, min(len(pts), d + 1) + 1):
        for subset in itertools.combinations(pts, k):
            rows = [[subset[j][i] for j in range(k)] for i in range(d)]
            rows.append([Q(1)] * k)
            lam = solve_unique(rows, list(p) + [Q(1)])
            if lam is not None and all(x >= 0 for x in lam):
                return True
    return False


def vpolytope(points) -> VPolytope:
    """Convex hull of a finite rational point set, reduced to its extreme points."""
    pts = sorted({qvec(p) for p in points})
    if not pts:
        raise ValueError("empty point set")
    d = len(pts[0])
    if any(len(p) != d for p in pts):
        raise ValueError("dimension mismatch")
    ext = [p for p in pts if not _in_convex_hull(p, [q for q in pts if q != p])]
    return VPolytope(tuple(sorted(ext)), affine_dim(ext))


def _recession_cone(h: HPolytope) -> ConeH:
    # {u : <u, n_i> >= 0} written with <=-normals -n_i
    d = h.ambient_dim
    normals = sorted({primitive(vneg(n)) for n, _ in h.constraints})
    return ConeH(tuple(normals), d)


def vertices_from_facets(h: HPolytope) -> VPolytope:
    """Vertices of a bounded H-polytope by d-subset constraint intersections."""
    cons = h.constraints
    d = h.ambient_dim
    if d > MAX_DIM:
        raise ValueError("ambient dimension too large")
    cands = set()
    for subset in itertools.combinations(cons, d):
        sol = solve_unique([list(n) for n, _ in subset], [c for _, c in subset])
        if sol is None:
            continue
        if all(dot(n, sol) >= c for n, c in cons):
            cands.add(sol)
    gens = extreme_rays(_recession_cone(h))
    if gens.rays or gens.lineality:
        raise ValueError("unbounded polytope")
    if not cands:
        raise ValueError("infeasible")
    verts = tuple(sorted(cands))
    return VPolytope(verts, affine_dim(verts))


def facets_from_vertices(p: VPolytope) -> HPolytope:
    """Irredundant facet description of a full-dimensional polytope."""
    d = p.ambient_dim
    if p.dim != d:
        raise ValueError("not full-dimensional")
    verts = p.vertices
    facets = set()
    for subset in itertools.combinations(verts, d):
        diffs = [vsub(u, subset[0]) for u in subset[1:]]
        ns = nullspace(diffs, d)
        if len(ns) != 1:
            continue
        n = primitive(ns[0])
        c = dot(n, subset[0])
        sides = [dot(n, u) - c for u in verts]
        if all(s >= 0 for s in sides):
            facets.add((n, c))
        elif all(s <= 0 for s in sides):
            facets.add((vneg(n), -c))
    return HPolytope(tuple(sorted(facets)))


def normal_fan(p: VPolytope) -> Fan:
    """Maximal cones sigma_u = {v : <u, v> <= <u', v> for all vertices u'}."""
    if p.dim != p.ambient_dim:
        raise ValueError("not full-dimensional")
    d = p.ambient_dim
    cones = []
    for u in p.vertices:
        normals = sorted({primitive(vsub(u, w)) for w in p.vertices if w != u})
        cones.append((u, ConeH(tuple(normals), d)))
    return Fan(tuple(cones))


@lru_cache(maxsize=None)
def extreme_rays(c: ConeH) -> ConeGenerators:
    """Primitive extreme-ray generators of a cone, plus a lineality basis.

    The cone is {v : <a, v> <= 0}.  The lineality space is quotiented out
    first, extreme rays of the pointed quotient are found by enumerating
    (k-1)-subsets of constraints, and the result is lifted back.  For the
    full space (no constraints) the answer is no rays and the standard basis
    as lineality.
    """
    d = c.dim
    lin = nullspace(c.normals, d)
    lin_prims = tuple(sorted(primitive(l) for l in lin))
    # complement of the lineality inside the standard basis
    comp = []
    base = [list(l) for l in lin]
    for j in range(d):
        e = [Q(0)] * d
        e[j] = Q(1)
        if rank(base + [e]) > len(base):
            base.append(e)
            comp.append(tuple(e))
    k = len(comp)
    if k == 0:
        return ConeGenerators((), lin_prims)
    # nonzero normals stay nonzero in quotient coordinates: they kill lin already
    reduced = sorted({tuple(dot(a, e) for e in comp) for a in c.normals} - {tuple([Q(0)] * k)})
    rays = set()
    for subset in itertools.combinations(reduced, k - 1):
        ns = nullspace(list(subset), k)
        if len(ns) != 1:
            continue
        w = ns[0]
        for cand in (w, vneg(w)):
            if all(dot(row, cand) <= 0 for row in reduced):
                lift = [Q(0)] * d
                for coef, e in zip(cand, comp):
                    lift = [x + coef * y for x, y in zip(lift, e)]
                rays.add(primitive(lift))
    return ConeGenerators(tuple(sorted(rays)), lin_prims)


def cone_relint_contains(c: ConeH, v) -> bool:
    """Exact membership of v in the relative interior of the cone."""
    if not c.contains(v):
        return False
    gens = extreme_rays(c)
    pts = list(gens.rays) + [g for l in gens.lineality for g in (l, vneg(l))]
    for a in c.normals:
        implicit = all(dot(a, g) == 0 for g in pts)
        if implicit:
            if dot(a, v) != 0:
                return False
        elif dot(a, v) >= 0:
            return False
    return True


def cone_is_trivial(c: ConeH) -> bool:
    gens = extreme_rays(c)
    return not gens.rays and not gens.lineality


# ---------------------------------------------------------------------------
# Fano dual polytopes and triangulation


def dual_polytope(rays, coeffs=None):
    """Polytope {u : <u, ray_i> >= coeff_i - 1} of complete toric log Fano data.

    Rays must be primitive nonzero lattice vectors positively spanning the
    ambient space; coefficients are rationals in [0, 1).  Returns the
    (HPolytope, VPolytope) pair.
    """
    rays = [tuple(r) for r in rays]
    if not rays:
        raise ValueError("degenerate fan")
    d = len(rays[0])
    if d > MAX_DIM:
        raise ValueError("ambient dimension too large")
    for r in rays:
        if len(r) != d:
            raise ValueError("dimension mismatch")
        if not is_primitive_lattice(r):
            raise ValueError("ray must be a primitive nonzero lattice vector")
    if len(set(rays)) != len(rays):
        raise ValueError("duplicate ray")
    if coeffs is None:
        coeffs = [Q(0)] * len(rays)
    coeffs = [Q(c) for c in coeffs]
    if len(coeffs) != len(rays):
        raise ValueError("one coefficient per ray required")
    for c in coeffs:
        if c < 0:
            raise ValueError("coefficient must be >= 0")
        if c >= 1:
            raise ValueError("coefficient must be < 1")
    polar = ConeH(tuple(sorted({primitive(vneg(r)) for r in rays})), d)
    if not cone_is_trivial(polar):
        raise ValueError("degenerate fan")
    ints = [tuple(int(x) for x in r) for r in rays]
    h = HPolytope(tuple(sorted((n, c - 1) for n, c in zip(ints, coeffs))))
    try:
        v = vertices_from_facets(h)
    except ValueError as exc:
        raise ValueError("not a Fano configuration") from exc
    if v.dim != d:
        raise ValueError("not a Fano configuration")
    return h, v


def _triangulate_indices(pts, apex_index=None):
    # pts: vertex list of a full-dimensional polytope in R^k; returns index simplices
    k = len(pts[0])
    if len(pts) == k + 1:
        return [tuple(range(len(pts)))]
    if apex_index is None:
        apex_index = min(range(len(pts)), key=lambda i: pts[i])
    apex = pts[apex_index]
    poly = VPolytope(tuple(sorted(pts)), k)
    h = facets_from_vertices(poly)
    out = []
    for n, c in h.constraints:
        if dot(n, apex) == c:
            continue
        face_ids = [i for i in range(len(pts)) if dot(n, pts[i]) == c]
        face_pts = [pts[i] for i in face_ids]
        o = min(face_pts)
        basis = []
        for u in face_pts:
            dvec = vsub(u, o)
            if not is_zero(dvec) and rank(basis + [list(dvec)]) > len(basis):
                basis.append(list(dvec))
        mapped = []
        for u in face_pts:
            y = solve_unique([[basis[j][i] for j in range(len(basis))] for i in range(k)], list(vsub(u, o)))
            mapped.append(y)
        for simplex in _triangulate_indices(mapped):
            out.append(tuple(face_ids[j] for j in simplex) + (apex_index,))
    return out


def triangulate(p: VPolytope, apex_index=None):
    """Fan triangulation coned from the lexicographically smallest vertex.

    Returns a list of d-simplices (vertex tuples) whose interiors are
    disjoint and whose union is the polytope.  A different cone apex may be
    selected by index; the default is deterministic.
    """
    if p.dim != p.ambient_dim:
        raise ValueError("not full-dimensional")
    simplices = _triangulate_indices(list(p.vertices), apex_index)
    return [tuple(p.vertices[i] for i in s) for s in simplices]


def simplex_volume(simplex) -> Q:
    d = len(simplex[0])
    m = [vsub(v, simplex[0]) for v in simplex[1:]]
    return abs(det(m)) / math.factorial(d)
