"""Limit combinatorics of weighted points under one-parameter degenerations.

A weighted point is a list of lattice weights with a nonempty support; only
the support matters for limits.  Its weight polytope is the hull of the
supported weights; faces are identified by the index sets of the weights
lying on them, and each face carries the cone of directions whose limit
lands on it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction as Q

from .exactgeom import (
    ConeH,
    VPolytope,
    affine_dim,
    dot,
    facets_from_vertices,
    is_zero,
    nullspace,
    primitive,
    qvec,
    rank,
    solve_unique,
    vpolytope,
    vsub,
)


@dataclass(frozen=True)
class WeightedPoint:
    weights: tuple[tuple[int, ...], ...]
    support: frozenset[int]


def weighted_point(weights, support=None) -> WeightedPoint:
    """Validated weighted point; support defaults to all indices."""
    ws = tuple(tuple(int(x) for x in w) for w in weights)
    if not ws:
        raise ValueError("at least one weight required")
    d = len(ws[0])
    if any(len(w) != d for w in ws):
        raise ValueError("dimension mismatch")
    if support is None:
        support = range(len(ws))
    sup = frozenset(int(i) for i in support)
    if not sup:
        raise ValueError("support must be nonempty")
    if any(i < 0 or i >= len(ws) for i in sup):
        raise ValueError("support index out of range")
    return WeightedPoint(ws, sup)


@dataclass(frozen=True)
class WeightPolytope:
    """Hull of the supported weights with the full face lattice by member indices."""

    point: WeightedPoint
    polytope: VPolytope
    faces: tuple[frozenset[int], ...]


def _affine_members(indices, weights, face_pts):
    # indices whose weight lies in the affine hull of face_pts
    o = face_pts[0]
    basis = []
    for u in face_pts[1:]:
        dvec = vsub(qvec(u), qvec(o))
        if not is_zero(dvec) and rank(basis + [list(dvec)]) > len(basis):
            basis.append(list(dvec))
    out = set()
    d = len(o)
    for i in indices:
        w = weights[i]
        if not basis:
            if tuple(w) == tuple(o):
                out.add(i)
            continue
        cols = [[basis[j][k] for j in range(len(basis))] for k in range(d)]
        if solve_unique(cols, list(vsub(qvec(w), qvec(o)))) is not None:
            out.add(i)
    return frozenset(out)


def weight_polytope(w: WeightedPoint) -> WeightPolytope:
    """Weight polytope and its faces, each face given by its member index set."""
    sup = sorted(w.support)
    pts = [qvec(w.weights[i]) for i in sup]
    poly = vpolytope(pts)
    full = frozenset(sup)
    faces = {full}
    if len(poly.vertices) >= 2:
        d = poly.ambient_dim
        if poly.dim == d:
            mapped = list(poly.vertices)
            coords = {u: u for u in poly.vertices}
        else:
            # work in exact coordinates on the affine hull
            o = poly.vertices[0]
            basis = []
            for u in poly.vertices[1:]:
                dvec = vsub(u, o)
                if not is_zero(dvec) and rank(basis + [list(dvec)]) > len(basis):
                    basis.append(list(dvec))
            cols = [[basis[j][k] for j in range(len(basis))] for k in range(d)]
            mapped = [solve_unique(cols, list(vsub(u, o))) for u in poly.vertices]
            coords = dict(zip(poly.vertices, mapped))
        hull = VPolytope(tuple(sorted(mapped)), poly.dim)
        facet_sets = []
        for n, c in facets_from_vertices(hull).constraints:
            on_hull = [u for u in poly.vertices if dot(n, coords[u]) == c]
            members = _affine_members(sup, w.weights, on_hull)
            facet_sets.append(members)
        frontier = set(facet_sets)
        faces |= frontier
        while frontier:
            nxt = set()
            for f, g in itertools.product(frontier, facet_sets):
                meet = f & g
                if meet and meet not in faces:
                    # intersections of faces with facets stay faces
                    nxt.add(meet)
            faces |= nxt
            frontier = nxt
    ordered = tuple(sorted(faces, key=lambda f: (len(f), sorted(f))))
    return WeightPolytope(w, poly, ordered)


def limit_point(w: WeightedPoint, v) -> WeightedPoint:
    """Support of the limit under t -> 0 along v: the argmin of <u_i, v> on the support."""
    v = qvec(v)
    if is_zero(v):
        raise ValueError("zero direction")
    vals = {i: dot(w.weights[i], v) for i in w.support}
    best = min(vals.values())
    return WeightedPoint(w.weights, frozenset(i for i, val in vals.items() if val == best))


def is_fixed(w: WeightedPoint, v) -> bool:
    """True when the pairing is constant on the support, i.e. the limit is w itself."""
    v = qvec(v)
    if is_zero(v):
        raise ValueError("zero direction")
    vals = [dot(w.weights[i], v) for i in w.support]
    return all(x == vals[0] for x in vals)


def _require_face(q: WeightPolytope, face) -> frozenset[int]:
    f = frozenset(int(i) for i in face)
    if f not in set(q.faces):
        raise ValueError("not a face")
    return f


def normal_cone_of_face(q: WeightPolytope, face) -> ConeH:
    """Cone of directions v with <u, v> <= <u', v> for u on the face, u' in the polytope."""
    f = _require_face(q, face)
    sup = sorted(q.point.support)
    normals = set()
    for i in f:
        for j in sup:
            diff = vsub(qvec(q.point.weights[i]), qvec(q.point.weights[j]))
            if not is_zero(diff):
                normals.add(primitive(diff))
    return ConeH(tuple(sorted(normals)), len(q.point.weights[0]))


def face_limit(w: WeightedPoint, q: WeightPolytope, face) -> WeightedPoint:
    """The degeneration of w with support cut down to the face members."""
    f = _require_face(q, face)
    return WeightedPoint(w.weights, f)


def face_of_direction(q: WeightPolytope, v) -> frozenset[int]:
    """Member set of the face where <., v> is minimized; always one of q.faces."""
    lim = limit_point(q.point, v)
    if lim.support not in set(q.faces):
        raise ValueError("argmin set is not a recorded face")
    return lim.support
