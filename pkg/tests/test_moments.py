"""Continuous moments and the discrete lattice-point series they bound."""

import itertools
from fractions import Fraction as Q

import numpy as np
import pytest

from conftest import fresh_rng, rand_nonzero_ivec
from toricstab.exactgeom import dot, facets_from_vertices, vpolytope
from toricstab.moments import (
    barycenter,
    covariance,
    denominator_lcm,
    extrapolate,
    is_positive_definite,
    lattice_series,
    moment_data,
    support_min,
    volume,
)

SQUARE = vpolytope([(0, 0), (1, 0), (0, 1), (1, 1)])
P2 = vpolytope([(-1, -1), (2, -1), (-1, 2)])
P112 = vpolytope([(-1, -1), (-1, 1), (3, -1)])


def test_volume_examples():
    assert volume(SQUARE) == 1
    assert volume(P112) == 4
    assert volume(P2) == Q(9, 2)


def test_barycenter_examples():
    assert barycenter(P2) == (0, 0)
    assert barycenter(P112) == (Q(1, 3), Q(-1, 3))
    assert barycenter(SQUARE) == (Q(1, 2), Q(1, 2))


def test_covariance_square():
    assert covariance(SQUARE) == ((Q(1, 12), Q(0)), (Q(0), Q(1, 12)))


def test_covariance_interval():
    # raw second moment of [0,1] is 1/3; recentering leaves 1/3 - 1/4 = 1/12
    seg = vpolytope([(Q(0),), (Q(1),)])
    md = moment_data(seg)
    assert md.covariance == ((Q(1, 12),),)
    raw = md.covariance[0][0] + md.barycenter[0] ** 2
    assert raw == Q(1, 3)


def test_covariance_weighted_triangle_exact():
    assert covariance(P112) == ((Q(8, 9), Q(-2, 9)), (Q(-2, 9), Q(2, 9)))


def test_covariance_weighted_triangle_monte_carlo():
    # independent stochastic check: uniform samples in the bounding box,
    # kept when under the hypotenuse x + 2y <= 1
    rng = np.random.default_rng(20230817)
    pts = rng.uniform((-1, -1), (3, 1), size=(10**7, 2))
    sel = pts[pts[:, 0] + 2 * pts[:, 1] <= 1]
    vol = 8 * sel.shape[0] / pts.shape[0]
    mean = sel.mean(axis=0)
    cov = np.cov(sel.T, bias=True)
    assert abs(vol - 4) < 4e-3
    assert np.allclose(mean, [1 / 3, -1 / 3], atol=1e-3)
    assert np.allclose(cov, [[8 / 9, -2 / 9], [-2 / 9, 2 / 9]], atol=2e-3)


def test_moments_triangulation_independent():
    for p in (P2, P112, SQUARE):
        base = moment_data(p)
        for apex in range(1, len(p.vertices)):
            other = moment_data(p, apex_index=apex)
            assert other.barycenter == base.barycenter
            assert other.covariance == base.covariance
            assert other.volume == base.volume


def test_covariance_positive_definite_on_corpus(contexts):
    for ctx in contexts.values():
        cov = ctx.moments.covariance
        assert is_positive_definite(cov)
        assert all(cov[i][j] == cov[j][i] for i in range(ctx.dim) for j in range(ctx.dim))
        # leading principal minors, spelled out
        minor = cov[0][0]
        assert minor > 0
        if ctx.dim >= 2:
            assert cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0] > 0


def test_support_min_examples():
    assert support_min(P112, (0, -1)) == -1
    assert support_min(P2, (1, 0)) == -1
    with pytest.raises(ValueError, match="zero direction"):
        support_min(P2, (0, 0))


# ---------------------------------------------------------------------------
# lattice series


def brute_rows(p, v, ms):
    """Direct box enumeration against the facet description."""
    h = facets_from_vertices(p)
    d = p.ambient_dim
    out = []
    for m in ms:
        ranges = []
        for k in range(d):
            los = min(u[k] for u in p.vertices) * m
            his = max(u[k] for u in p.vertices) * m
            ranges.append(range(int(los.__floor__()), int(his.__ceil__()) + 1))
        pts = [
            u
            for u in itertools.product(*ranges)
            if all(dot(n, u) >= m * c for n, c in h.constraints)
        ]
        vals = [dot(u, v) for u in pts]
        out.append((m, len(pts), sum(vals), sum(x * x for x in vals), min(vals)))
    return out


def test_series_plane_triangle_counts():
    s = lattice_series(P2, (1, 0), 4)
    got = [(r.m, r.count, r.weight_sum) for r in s.rows]
    assert got == [(1, 10, 0), (2, 28, 0), (3, 55, 0), (4, 91, 0)]


def test_series_square_corners():
    s = lattice_series(SQUARE, (1, 1), 3)
    assert s.rows[0] == (1, 4, 4, 6, 0)


def test_series_weighted_triangle_skew_direction():
    s = lattice_series(P112, (2, -3), 3)
    assert [tuple(r) for r in s.rows] == [
        (1, 9, 20, 198, -5),
        (2, 25, 100, 1650, -10),
        (3, 49, 280, 6468, -15),
    ]
    assert [tuple(r) for r in s.rows] == brute_rows(P112, (2, -3), [1, 2, 3])


def test_series_matches_brute_force_random():
    rng = fresh_rng("series-brute")
    for _ in range(12):
        while True:
            pts = [
                tuple(Q(rng.randint(-6, 6), rng.choice((1, 2))) for _ in range(2))
                for _ in range(5)
            ]
            p = vpolytope(pts)
            if p.dim == 2:
                break
        v = rand_nonzero_ivec(rng, 2, 4)
        r = denominator_lcm(p)
        s = lattice_series(p, v, 4 * r)
        assert [tuple(row) for row in s.rows] == brute_rows(p, v, [r, 2 * r, 3 * r, 4 * r])


def test_series_big_direction_uses_exact_integers():
    # huge components force the arbitrary-precision path; results must scale
    big = 10**12
    small = lattice_series(P112, (2, -3), 5)
    scaled = lattice_series(P112, (2 * big, -3 * big), 5)
    for a, b in zip(small.rows, scaled.rows):
        assert b.count == a.count
        assert b.weight_sum == a.weight_sum * big
        assert b.weight_sq_sum == a.weight_sq_sum * big * big
        assert b.weight_min == a.weight_min * big


def test_series_rows_at_denominator_multiples(contexts):
    p113 = contexts["p113"].vpoly
    assert denominator_lcm(p113) == 3
    s = lattice_series(p113, (0, -1), 12)
    assert [r.m for r in s.rows] == [3, 6, 9, 12]
    half = contexts["p2-halfline"].vpoly
    assert denominator_lcm(half) == 2
    assert [r.m for r in s.rows][0] == 3


def test_series_input_validation():
    with pytest.raises(ValueError, match="zero direction"):
        lattice_series(P2, (0, 0), 9)
    with pytest.raises(ValueError, match="integer vector"):
        lattice_series(P2, (Q(1, 2), Q(0)), 9)
    with pytest.raises(ValueError, match="insufficient series length"):
        lattice_series(P2, (1, 0), 2)


def test_lambda_min_rows_exact():
    for p, v in ((P112, (0, -1)), (P112, (1, 0)), (P2, (1, 0)), (SQUARE, (2, 1))):
        target = support_min(p, v)
        for row in lattice_series(p, v, 6).rows:
            assert Q(row.weight_min, row.m) == target


def test_series_error_envelope(contexts):
    # |w_m/(m N_m) - <b, v>| <= C/m with C calibrated on the first half of
    # the rows and holding on the second half; same shape for the second
    # moments against v' Cov v + <b, v>^2
    for ctx in contexts.values():
        p = ctx.vpoly
        b = ctx.moments.barycenter
        cov = ctx.moments.covariance
        r = denominator_lcm(p)
        rng = fresh_rng(f"envelope-{ctx.name}")
        for _ in range(20):
            v = rand_nonzero_ivec(rng, ctx.dim, 3)
            f_target = dot(b, v)
            q_target = dot(v, [dot(row, v) for row in cov]) + f_target * f_target
            rows = lattice_series(p, v, 12 * r).rows
            f_err = [abs(Q(row.weight_sum, row.m * row.count) - f_target) * row.m for row in rows]
            q_err = [
                abs(Q(row.weight_sq_sum, row.m**2 * row.count) - q_target) * row.m
                for row in rows
            ]
            for errs in (f_err, q_err):
                cal, hold = errs[:6], errs[6:]
                bound = 2 * max(cal)
                if bound == 0:
                    assert all(e == 0 for e in hold)
                else:
                    assert all(e <= bound for e in hold)


# ---------------------------------------------------------------------------
# extrapolation


def test_extrapolate_balanced_triangle_is_exact_zero():
    res = extrapolate(lattice_series(P2, (1, 0), 12))
    assert res.F0_est == 0
    assert all(x == 0 for x in res.residuals)


def test_extrapolate_weighted_triangle():
    res = extrapolate(lattice_series(P112, (0, -1), 60))
    assert abs(res.F0_est - Q(1, 3)) <= Q(1, 1000)
    q_target = Q(2, 9) + Q(1, 9)
    assert abs(res.Q0_est - q_target) / q_target <= Q(1, 1000)


def test_extrapolate_centered_square():
    centered = vpolytope(
        [(Q(-1, 2), Q(-1, 2)), (Q(1, 2), Q(-1, 2)), (Q(-1, 2), Q(1, 2)), (Q(1, 2), Q(1, 2))]
    )
    res = extrapolate(lattice_series(centered, (1, 0), 60))
    assert abs(res.F0_est) <= Q(1, 1000)
    assert abs(res.Q0_est - Q(1, 12)) <= Q(1, 1000)


def test_extrapolate_needs_rows():
    from toricstab.moments import LatticeSeries

    full = lattice_series(P2, (1, 0), 4)
    with pytest.raises(ValueError, match="insufficient series length"):
        extrapolate(LatticeSeries(full.r, full.rows[:2]))
