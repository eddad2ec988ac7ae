"""Two-stage lexicographic minimization of the stability invariant.

Stage 1 minimizes the first invariant over each maximal cone of the normal
fan, where it is linear-fractional with positive denominator, so the minimum
over a cone is attained on its extreme rays.  Stage 2 restricts to the cone
where stage 1 is attained, slices by <b, v> = 1 (the first invariant is
constant there) and minimizes the positive definite quadratic form v^T Cov v
by exhaustive active-set enumeration with exact KKT solves.  Strict
convexity makes the optimum unique; every certificate below is exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction as Q

from .exactgeom import (
    ConeH,
    cone_is_trivial,
    dot,
    extreme_rays,
    is_zero,
    primitive,
    rank,
    solve_unique,
    vneg,
    vscale,
    vsub,
)
from .moments import is_positive_definite
from .stability import SEMISTABLE, StabilityContext, StabilityValue, futaki, min_norm, mu, verdict


class CertificateError(RuntimeError):
    """An exact internal consistency check failed; results must not be trusted."""


@dataclass(frozen=True)
class Stage1Result:
    m1: Q
    witness_rays: tuple[tuple[int, ...], ...]
    per_cone_minima: tuple[tuple[tuple[Q, ...], Q], ...]


@dataclass(frozen=True)
class SigmaOne:
    cone: ConeH
    m1: Q


@dataclass(frozen=True)
class DestabReport:
    verdict: str
    m1: Q
    m2_sign: int
    m2_sq: Q
    delta: Q
    v_star_rational: tuple[Q, ...] | None = None
    v_star_primitive: tuple[int, ...] | None = None
    sigma1: SigmaOne | None = None
    stage1: Stage1Result | None = None

    @property
    def m_mu(self) -> StabilityValue:
        return StabilityValue(self.m1, self.m2_sign, self.m2_sq)


def minimize_mu1(ctx: StabilityContext) -> Stage1Result:
    """Global minimum of the first invariant over all nonzero one-parameter subgroups.

    Candidates are the extreme rays of every maximal normal-fan cone (plus
    both signs of any lineality directions); on each cone the invariant is
    linear-fractional with positive denominator, so this set is exhaustive.
    """
    if verdict(ctx) == SEMISTABLE:
        raise ValueError("semistable")
    per_cone = []
    best = None
    witnesses = set()
    for vertex, cone in ctx.fan.cones:
        gens = extreme_rays(cone)
        dirs = list(gens.rays)
        for l in gens.lineality:
            dirs.extend((l, vneg(l)))
        if not dirs:
            raise CertificateError("normal-fan cone without directions")
        vals = [(futaki(ctx, w) / min_norm(ctx, w), w) for w in dirs]
        cone_min = min(v for v, _ in vals)
        per_cone.append((vertex, cone_min))
        for val, w in vals:
            if best is None or val < best:
                best = val
                witnesses = {w}
            elif val == best:
                witnesses.add(w)
    if best >= 0:
        raise CertificateError("stage 1 found no destabilizing direction")
    if ctx.zero_interior and best <= -1:
        raise CertificateError("stage 1 minimum out of range")
    return Stage1Result(best, tuple(sorted(witnesses)), tuple(sorted(per_cone)))


def build_sigma1(ctx: StabilityContext, m1: Q) -> SigmaOne:
    """Cone where the first invariant attains its minimum m1.

    With g(v) = Fut(v) - m1 ||v||_m = max_j [-(1+m1)<b,v> + m1 <u_j,v>] over
    vertices u_j (m1 < 0 turns the scaled minimum into a maximum), the cone
    is {v : (1+m1)<b,v> - m1 <u_j,v> >= 0 for all j}, and g vanishes exactly
    on it.
    """
    m1 = Q(m1)
    if m1 >= 0:
        raise ValueError("stage-1 minimum must be negative")
    b = ctx.moments.barycenter
    normals = set()
    for u in ctx.vpoly.vertices:
        w = vsub(vscale(1 + m1, b), vscale(m1, u))
        if is_zero(w):
            continue
        normals.add(primitive(vneg(w)))
    cone = ConeH(tuple(sorted(normals)), ctx.dim)
    if cone_is_trivial(cone):
        raise CertificateError("inconsistent M1")
    return SigmaOne(cone, m1)


def _kkt_candidate(cov2, b, active, d):
    # unknowns: v (d), lambda, mu_w (len(active)); rows: stationarity, slice, active
    na = len(active)
    size = d + 1 + na
    rows = []
    for i in range(d):
        row = [Q(0)] * size
        for k in range(d):
            row[k] = cov2[i][k]
        row[d] = b[i]
        for j, a in enumerate(active):
            row[d + 1 + j] = Q(a[i])
        rows.append(row)
    rows.append(list(b) + [Q(0)] * (1 + na))
    for a in active:
        rows.append([Q(x) for x in a] + [Q(0)] * (1 + na))
    rhs = [Q(0)] * d + [Q(1)] + [Q(0)] * na
    sol = solve_unique(rows, rhs)
    if sol is None:
        return None
    return sol[:d], sol[d + 1 :]


def minimize_mu2_on_cone(ctx: StabilityContext, sigma1: SigmaOne):
    """Unique minimizer of v^T Cov v on {v in sigma1 : <b, v> = 1}.

    Active-set enumeration: every constraint subset that is linearly
    independent together with b yields one exact KKT solve; a solve with
    nonnegative multipliers and a primal-feasible point is the optimum of
    the strictly convex program.  All candidates found must agree.
    """
    cov = ctx.moments.covariance
    if not is_positive_definite(cov):
        raise CertificateError("covariance not positive definite")
    b = ctx.moments.barycenter
    d = ctx.dim
    cov2 = [[2 * x for x in row] for row in cov]
    cons = sigma1.cone.normals
    found = []
    for size in range(0, d):
        for subset in itertools.combinations(cons, size):
            if rank([list(b)] + [list(a) for a in subset]) != size + 1:
                continue
            cand = _kkt_candidate(cov2, b, subset, d)
            if cand is None:
                continue
            v, mults = cand
            if any(m < 0 for m in mults):
                continue
            if any(dot(a, v) > 0 for a in cons):
                continue
            found.append(v)
    if not found:
        raise CertificateError("infeasible slice")
    if any(v != found[0] for v in found[1:]):
        raise CertificateError("stage 2 optimum not unique")
    v_star = found[0]
    value = mu(ctx, v_star)
    if value.mu1 != sigma1.m1:
        raise CertificateError("stage 2 left the stage-1 level set")
    return v_star, value


def optimal_destabilizer(ctx: StabilityContext) -> DestabReport:
    """Verdict plus, when unstable, the unique optimal destabilizing direction."""
    if verdict(ctx) == SEMISTABLE:
        return DestabReport(SEMISTABLE, Q(0), 0, Q(0), Q(1))
    stage1 = minimize_mu1(ctx)
    sigma1 = build_sigma1(ctx, stage1.m1)
    for w in stage1.witness_rays:
        if not sigma1.cone.contains(w):
            raise CertificateError("witness ray outside sigma1")
    v_star, value = minimize_mu2_on_cone(ctx, sigma1)
    if value.mu2_sign != -1:
        raise CertificateError("optimal direction is not destabilizing")
    return DestabReport(
        "unstable",
        stage1.m1,
        value.mu2_sign,
        value.mu2_sq,
        stage1.m1 + 1,
        v_star,
        primitive(v_star),
        sigma1,
        stage1,
    )
