"""Stability invariants of torus-invariant log Fano data.

The context bundles a full-dimensional moment polytope with its exact
moments and normal fan.  All invariants are either exact rationals or, for
the square-root-valued second invariant, carried as a sign together with an
exact rational square so comparisons never round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction as Q
from functools import cached_property, total_ordering

from .exactgeom import (
    Fan,
    HPolytope,
    VPolytope,
    dot,
    dual_polytope,
    facets_from_vertices,
    normal_fan,
    primitive,
    qvec,
    vertices_from_facets,
    vpolytope,
)
from .moments import MomentData, moment_data

SEMISTABLE = "semistable"
UNSTABLE = "unstable"


def _sq_cmp(s1, q1, s2, q2):
    """Compare sign*sqrt(square) values exactly: -1, 0 or 1."""
    if s1 != s2:
        return -1 if s1 < s2 else 1
    if s1 == 0 or q1 == q2:
        return 0
    if s1 > 0:
        return -1 if q1 < q2 else 1
    return -1 if q1 > q2 else 1


@total_ordering
@dataclass(frozen=True)
class StabilityValue:
    """The pair (mu1, mu2) with mu2 = mu2_sign * sqrt(mu2_sq), ordered lexicographically."""

    mu1: Q
    mu2_sign: int
    mu2_sq: Q

    def _cmp(self, other):
        if self.mu1 != other.mu1:
            return -1 if self.mu1 < other.mu1 else 1
        return _sq_cmp(self.mu2_sign, self.mu2_sq, other.mu2_sign, other.mu2_sq)

    def __eq__(self, other):
        return isinstance(other, StabilityValue) and self._cmp(other) == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __hash__(self):
        return hash((self.mu1, self.mu2_sign, self.mu2_sq))


@total_ordering
@dataclass(frozen=True)
class TruncatedInvariant:
    """First-order coefficients (c0, c1) of the blended invariant, c1 = c1_sign*sqrt(c1_sq)."""

    c0: Q
    c1_sign: int
    c1_sq: Q

    def _cmp(self, other):
        if self.c0 != other.c0:
            return -1 if self.c0 < other.c0 else 1
        return _sq_cmp(self.c1_sign, self.c1_sq, other.c1_sign, other.c1_sq)

    def __eq__(self, other):
        return isinstance(other, TruncatedInvariant) and self._cmp(other) == 0

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __hash__(self):
        return hash((self.c0, self.c1_sign, self.c1_sq))


@dataclass(frozen=True)
class StabilityContext:
    """Moment polytope with precomputed moments, facets and normal fan."""

    vpoly: VPolytope
    hpoly: HPolytope
    moments: MomentData
    fan: Fan
    rays: tuple[tuple[int, ...], ...] | None = None
    coeffs: tuple[Q, ...] | None = None
    name: str | None = None

    @property
    def dim(self) -> int:
        return self.vpoly.ambient_dim

    @property
    def zero_interior(self) -> bool:
        return all(c < 0 for _, c in self.hpoly.constraints)

    @cached_property
    def _fast(self):
        # integer-cleared copies for hot loops: verts/D, b_num/b_den, cov_num/cov_den
        verts = self.vpoly.vertices
        dv = math.lcm(*(x.denominator for u in verts for x in u))
        vert_rows = tuple(tuple(int(x * dv) for x in u) for u in verts)
        b = self.moments.barycenter
        db = math.lcm(*(x.denominator for x in b))
        b_row = tuple(int(x * db) for x in b)
        cov = self.moments.covariance
        dc = math.lcm(*(x.denominator for row in cov for x in row))
        cov_rows = tuple(tuple(int(x * dc) for x in row) for row in cov)
        return vert_rows, dv, b_row, db, cov_rows, dc


def _clear_direction(v):
    w = qvec(v)
    if all(x == 0 for x in w):
        raise ValueError("zero direction")
    mult = math.lcm(*(x.denominator for x in w))
    return tuple(int(x * mult) for x in w), mult


def _build(vp, hp, rays=None, coeffs=None, name=None) -> StabilityContext:
    if vp.dim != vp.ambient_dim:
        raise ValueError("not full-dimensional")
    return StabilityContext(vp, hp, moment_data(vp), normal_fan(vp), rays, coeffs, name)


def context_from_rays(rays, coeffs=None, name=None) -> StabilityContext:
    """Context of complete toric log Fano fan data (rays plus boundary coefficients)."""
    h, v = dual_polytope(rays, coeffs)
    rr = tuple(tuple(int(x) for x in r) for r in rays)
    cc = tuple(Q(c) for c in coeffs) if coeffs is not None else tuple(Q(0) for _ in rr)
    return _build(v, h, rr, cc, name)


def context_from_vertices(points, name=None) -> StabilityContext:
    """Context of a polytope given by (possibly redundant) rational points."""
    vp = vpolytope(points)
    if vp.dim != vp.ambient_dim:
        raise ValueError("not full-dimensional")
    return _build(vp, facets_from_vertices(vp), name=name)


def context_from_constraints(constraints, name=None) -> StabilityContext:
    """Context of a polytope given by half-space constraints (normal, offset)."""
    cons = tuple(sorted((primitive(n), Q(c)) for n, c in constraints))
    vp = vertices_from_facets(HPolytope(cons))
    if vp.dim != vp.ambient_dim:
        raise ValueError("not full-dimensional")
    return _build(vp, facets_from_vertices(vp), name=name)


def futaki(ctx: StabilityContext, v) -> Q:
    """Fut(v) = -<b, v> for the barycenter b; linear in v."""
    w, mult = _clear_direction(v)
    _, _, b_row, db, _, _ = ctx._fast
    return Q(-sum(a * x for a, x in zip(b_row, w)), db * mult)


def support_pairing_min(ctx: StabilityContext, v) -> Q:
    w, mult = _clear_direction(v)
    vert_rows, dv, _, _, _, _ = ctx._fast
    best = min(sum(a * x for a, x in zip(u, w)) for u in vert_rows)
    return Q(best, dv * mult)


def min_norm(ctx: StabilityContext, v) -> Q:
    """||v||_m = <b, v> - min_{u in P} <u, v>; positive for v != 0."""
    return -futaki(ctx, v) - support_pairing_min(ctx, v)


def l2_norm_sq(ctx: StabilityContext, v) -> Q:
    """||v||_2^2 = v^T Cov(P) v; positive definite for full-dimensional P."""
    w, mult = _clear_direction(v)
    _, _, _, _, cov_rows, dc = ctx._fast
    acc = 0
    for i, wi in enumerate(w):
        if wi:
            acc += wi * sum(cij * wj for cij, wj in zip(cov_rows[i], w))
    return Q(acc, dc * mult * mult)


def mu(ctx: StabilityContext, v) -> StabilityValue:
    """The invariant pair (Fut/||.||_m, Fut/||.||_2), second entry as signed square."""
    f = futaki(ctx, v)
    mn = min_norm(ctx, v)
    q = l2_norm_sq(ctx, v)
    sign = (f > 0) - (f < 0)
    return StabilityValue(f / mn, sign, f * f / q)


def log_discrepancy_S(ctx: StabilityContext, v):
    """(A, S) = (-min pairing, minimum norm); A - S = Fut identically."""
    a = -support_pairing_min(ctx, v)
    s = min_norm(ctx, v)
    return a, s


def verdict(ctx: StabilityContext) -> str:
    """Torus-equivariant verdict: semistable exactly when the barycenter vanishes."""
    return SEMISTABLE if all(x == 0 for x in ctx.moments.barycenter) else UNSTABLE


def mu_prime_trunc(ctx: StabilityContext, v) -> TruncatedInvariant:
    """Order <= 1 coefficients of Fut/(||.||_m + eps ||.||_2) around eps = 0.

    c0 = mu1(v) and c1 = -mu1(v) * ||v||_2 / ||v||_m; both are invariant
    under positive rescaling of v, and c1 is carried as a signed square.
    """
    f = futaki(ctx, v)
    mn = min_norm(ctx, v)
    q = l2_norm_sq(ctx, v)
    c0 = f / mn
    sign = (f < 0) - (f > 0)
    return TruncatedInvariant(c0, sign, c0 * c0 * q / (mn * mn))
