"""Command-line interface: structured text reports over exact results.

Commands parse JSON input documents, run the exact library, and emit JSON
documents whose rational values are "p/q" strings; decimal fields are
display-only annotations.  Output is deterministic: byte-identical across
runs and worker-thread counts.  Exit codes: 0 success, 2 invalid input,
3 internal certificate failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction as Q

from . import corpus as corpus_mod
from .exactgeom import dot
from .limits import (
    face_of_direction,
    is_fixed,
    limit_point,
    normal_cone_of_face,
    weight_polytope,
    weighted_point,
)
from .moments import extrapolate, lattice_series
from .optimizer import CertificateError, DestabReport, optimal_destabilizer
from .stability import (
    StabilityContext,
    context_from_constraints,
    context_from_rays,
    context_from_vertices,
    futaki,
    l2_norm_sq,
    log_discrepancy_S,
    min_norm,
    mu,
    verdict,
)

SCOPE = "torus-equivariant"


# ---------------------------------------------------------------------------
# rendering


def rat_str(x) -> str:
    x = Q(x)
    return f"{x.numerator}/{x.denominator}"


def dec_str(x, digits: int) -> str:
    """Fixed-point decimal of a rational, round half to even."""
    x = Q(x)
    sign = "-" if x < 0 else ""
    scaled = abs(x) * 10**digits
    n, rem_num = divmod(scaled.numerator, scaled.denominator)
    rem2 = 2 * rem_num
    if rem2 > scaled.denominator or (rem2 == scaled.denominator and n % 2 == 1):
        n += 1
    s = str(n).rjust(digits + 1, "0")
    if digits == 0:
        return f"{sign}{s}"
    return f"{sign}{s[:-digits]}.{s[-digits:]}"


def sqrt_dec_str(sign: int, square, digits: int) -> str:
    """Decimal of sign * sqrt(square) to the requested digits."""
    if sign == 0:
        return dec_str(0, digits)
    sq = Q(square)
    scaled = sq * 10 ** (2 * digits)
    n = math.isqrt(scaled.numerator // scaled.denominator)
    if Q(n * n + (n + 1) * (n + 1), 2) <= scaled:
        n += 1
    s = str(n).rjust(digits + 1, "0")
    body = s if digits == 0 else f"{s[:-digits]}.{s[-digits:]}"
    return ("-" if sign < 0 else "") + body


def vec_str(v) -> str:
    return ",".join(rat_str(x) for x in v)


def ivec_str(v) -> str:
    return ",".join(str(int(x)) for x in v)


def render_m2(sign: int, square, digits: int):
    if sign == 0:
        return "0/1"
    return {
        "sign": sign,
        "square": rat_str(square),
        "decimal": sqrt_dec_str(sign, square, digits),
    }


def render_m_mu(report: DestabReport, digits: int):
    return [rat_str(report.m1), render_m2(report.m2_sign, report.m2_sq, digits)]


# ---------------------------------------------------------------------------
# parsing


def parse_rational(s, field: str) -> Q:
    try:
        if isinstance(s, int):
            return Q(s)
        if isinstance(s, str):
            return Q(s)
    except (ValueError, ZeroDivisionError):
        pass
    raise ValueError(f"field {field}: expected a rational like 'p/q', got {s!r}")


def parse_int_vector(xs, field: str):
    if not isinstance(xs, (list, tuple)) or not xs:
        raise ValueError(f"field {field}: expected a nonempty list of integers")
    out = []
    for x in xs:
        if isinstance(x, bool) or not isinstance(x, int):
            raise ValueError(f"field {field}: expected integers, got {x!r}")
        out.append(x)
    return tuple(out)


def parse_direction(text: str, field: str = "v"):
    try:
        return tuple(int(p.strip()) for p in text.split(","))
    except ValueError:
        raise ValueError(f"field {field}: expected comma-separated integers") from None


def load_doc(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValueError(f"cannot read input {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"input {path} is not valid JSON: {exc}") from exc


def context_from_doc(doc) -> StabilityContext:
    if not isinstance(doc, dict):
        raise ValueError("input document must be a JSON object")
    name = doc.get("name")
    if not isinstance(name, str) or not name:
        raise ValueError("field name: required nonempty string")
    if "rays" in doc:
        rays = [parse_int_vector(r, "rays") for r in doc["rays"]]
        coeffs = None
        if doc.get("coeffs") is not None:
            coeffs = [parse_rational(c, "coeffs") for c in doc["coeffs"]]
        return context_from_rays(rays, coeffs, name=name)
    if "moment_polytope" in doc:
        body = doc["moment_polytope"]
        if not isinstance(body, dict):
            raise ValueError("field moment_polytope: expected an object")
        if "vertices" in body:
            pts = [
                [parse_rational(x, "vertices") for x in row] for row in body["vertices"]
            ]
            return context_from_vertices(pts, name=name)
        if "constraints" in body:
            cons = []
            for row in body["constraints"]:
                if not isinstance(row, dict):
                    raise ValueError("field constraints: expected objects")
                cons.append(
                    (
                        parse_int_vector(row.get("normal"), "constraints.normal"),
                        parse_rational(row.get("offset"), "constraints.offset"),
                    )
                )
            return context_from_constraints(cons, name=name)
        raise ValueError("field moment_polytope: needs vertices or constraints")
    raise ValueError("field rays or moment_polytope: required")


def weighted_point_from_doc(doc):
    if not isinstance(doc, dict):
        raise ValueError("input document must be a JSON object")
    weights = doc.get("weights")
    if not isinstance(weights, list) or not weights:
        raise ValueError("field weights: expected a nonempty list of lattice vectors")
    ws = [parse_int_vector(w, "weights") for w in weights]
    support = doc.get("support")
    if support is not None:
        support = [
            x for x in (parse_int_vector(support, "support") if support else ())
        ]
        if not support:
            raise ValueError("field support: must be nonempty when given")
    return weighted_point(ws, support)


def gather_contexts(args) -> list[StabilityContext]:
    if args.corpus and args.inputs:
        raise ValueError("give input files or --corpus, not both")
    if args.corpus:
        return corpus_mod.corpus_contexts()
    if not args.inputs:
        raise ValueError("no inputs given (pass files or --corpus)")
    out = []
    errors = []
    for path in args.inputs:
        try:
            out.append(context_from_doc(load_doc(path)))
        except ValueError as exc:
            errors.append(f"{path}: {exc}")
    if errors:
        raise ValueError("; ".join(errors))
    return out


# ---------------------------------------------------------------------------
# documents


def report_doc(ctx: StabilityContext, directions, digits: int):
    md = ctx.moments
    doc = {
        "name": ctx.name,
        "scope": SCOPE,
        "dim": ctx.dim,
        "vertices": [vec_str(u) for u in ctx.vpoly.vertices],
        "volume": rat_str(md.volume),
        "volume_decimal": dec_str(md.volume, digits),
        "barycenter": vec_str(md.barycenter),
        "covariance": [vec_str(row) for row in md.covariance],
        "verdict": verdict(ctx),
    }
    rendered = []
    for v in directions:
        value = mu(ctx, v)
        a, s = log_discrepancy_S(ctx, v)
        rendered.append(
            {
                "v": ivec_str(v),
                "futaki": rat_str(futaki(ctx, v)),
                "min_norm": rat_str(min_norm(ctx, v)),
                "l2_norm_sq": rat_str(l2_norm_sq(ctx, v)),
                "A": rat_str(a),
                "S": rat_str(s),
                "mu1": rat_str(value.mu1),
                "mu1_decimal": dec_str(value.mu1, digits),
                "mu2": render_m2(value.mu2_sign, value.mu2_sq, digits),
            }
        )
    if rendered:
        doc["directions"] = rendered
    return doc


def destab_doc(ctx: StabilityContext, digits: int):
    report = optimal_destabilizer(ctx)
    doc = {
        "name": ctx.name,
        "scope": SCOPE,
        "verdict": report.verdict,
        "delta": rat_str(report.delta),
        "delta_decimal": dec_str(report.delta, digits),
        "M_mu": render_m_mu(report, digits),
        "v_star_rational": None,
        "v_star_primitive": None,
    }
    if report.verdict == "unstable":
        doc["v_star_rational"] = vec_str(report.v_star_rational)
        doc["v_star_primitive"] = ivec_str(report.v_star_primitive)
        doc["sigma1"] = {
            "m1": rat_str(report.sigma1.m1),
            "normals": [ivec_str(a) for a in report.sigma1.cone.normals],
        }
        doc["stage1"] = {
            "witness_rays": [ivec_str(w) for w in report.stage1.witness_rays],
            "per_cone_minima": [
                {"vertex": vec_str(u), "min": rat_str(val)}
                for u, val in report.stage1.per_cone_minima
            ],
        }
    return doc


def stratum_table(contexts, digits: int, threads: int):
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        reports = list(pool.map(optimal_destabilizer, contexts))
    groups = {}
    for ctx, report in zip(contexts, reports):
        key = (report.m1, report.m2_sign, report.m2_sq)
        groups.setdefault(key, (report.m_mu, []))[1].append(ctx.name)
    ordered = sorted(groups.values(), key=lambda pair: pair[0], reverse=True)
    strata = []
    for value, members in ordered:
        strata.append(
            {
                "M_mu": [
                    rat_str(value.mu1),
                    render_m2(value.mu2_sign, value.mu2_sq, digits),
                ],
                "members": sorted(members),
            }
        )
    return {"scope": SCOPE, "count": len(contexts), "strata": strata}


def oracle_doc(ctx: StabilityContext, v, m_max: int, digits: int):
    series = lattice_series(ctx.vpoly, v, m_max)
    result = extrapolate(series)
    b = ctx.moments.barycenter
    f0_target = dot(b, [Q(x) for x in v])
    q0_target = l2_norm_sq(ctx, v) + f0_target * f0_target
    rows = []
    for row in series.rows:
        f = Q(row.weight_sum, row.m * row.count)
        g = Q(row.weight_sq_sum, row.m * row.m * row.count)
        rows.append(
            {
                "m": row.m,
                "count": row.count,
                "weight_sum": row.weight_sum,
                "weight_sq_sum": row.weight_sq_sum,
                "weight_min": row.weight_min,
                "f": rat_str(f),
                "f_decimal": dec_str(f, digits),
                "g": rat_str(g),
                "g_decimal": dec_str(g, digits),
                "lambda_min_over_m": rat_str(Q(row.weight_min, row.m)),
            }
        )
    return {
        "name": ctx.name,
        "v": ivec_str(v),
        "r": series.r,
        "m_max": m_max,
        "rows": rows,
        "F0_est": rat_str(result.F0_est),
        "F0_est_decimal": dec_str(result.F0_est, digits),
        "F0_target": rat_str(f0_target),
        "Q0_est": rat_str(result.Q0_est),
        "Q0_est_decimal": dec_str(result.Q0_est, digits),
        "Q0_target": rat_str(q0_target),
        "residuals": [rat_str(x) for x in result.residuals],
        "q_residuals": [rat_str(x) for x in result.q_residuals],
    }


def oracle_dump_text(doc, digits: int) -> str:
    lines = ["# m count f g lambda_min_over_m"]
    for row in doc["rows"]:
        lines.append(
            " ".join(
                [
                    str(row["m"]),
                    str(row["count"]),
                    row["f_decimal"],
                    row["g_decimal"],
                    dec_str(Q(row["lambda_min_over_m"]), digits),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def limits_doc(point, v):
    q = weight_polytope(point)
    lim = limit_point(point, v)
    face = face_of_direction(q, v)
    cone = normal_cone_of_face(q, face)
    return {
        "weights": [ivec_str(w) for w in point.weights],
        "support": sorted(point.support),
        "v": ivec_str(v),
        "fixed": is_fixed(point, v),
        "limit_support": sorted(lim.support),
        "faces": [sorted(f) for f in q.faces],
        "sigma_F": {"normals": [ivec_str(a) for a in cone.normals]},
    }


# ---------------------------------------------------------------------------
# commands


def emit(doc, out_path):
    text = json.dumps(doc, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_report(args) -> int:
    contexts = gather_contexts(args)
    directions = [parse_direction(t) for t in args.v or []]
    docs = [report_doc(ctx, directions, args.digits) for ctx in contexts]
    emit(docs[0] if len(docs) == 1 else {"entries": docs}, args.out)
    return 0


def cmd_destabilize(args) -> int:
    contexts = gather_contexts(args)
    docs = [destab_doc(ctx, args.digits) for ctx in contexts]
    emit(docs[0] if len(docs) == 1 else {"entries": docs}, args.out)
    return 0


def cmd_stratify(args) -> int:
    contexts = gather_contexts(args)
    emit(stratum_table(contexts, args.digits, args.threads), args.out)
    return 0


def cmd_oracle(args) -> int:
    contexts = gather_contexts(args)
    if len(contexts) != 1:
        raise ValueError("oracle takes exactly one input")
    v = parse_direction(args.v)
    ctx = contexts[0]
    doc = oracle_doc(ctx, v, args.mmax, args.digits)
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            fh.write(oracle_dump_text(doc, args.digits))
    emit(doc, args.out)
    return 0


def cmd_limits(args) -> int:
    point = weighted_point_from_doc(load_doc(args.input))
    v = parse_direction(args.v)
    emit(limits_doc(point, v), args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="toricstab",
        description="Exact toric K-stability invariants and destabilizers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, multi=True):
        if multi:
            p.add_argument("inputs", nargs="*", help="input JSON documents")
            p.add_argument("--corpus", action="store_true", help="run over bundled inputs")
        p.add_argument("--digits", type=int, default=12, help="decimal annotation digits")
        p.add_argument("--out", help="write the output document to this path")

    p = sub.add_parser("report", help="moments, verdict, invariants at directions")
    common(p)
    p.add_argument("--v", action="append", help="direction a,b,... (repeatable)")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("destabilize", help="optimal destabilizing direction")
    common(p)
    p.set_defaults(func=cmd_destabilize)

    p = sub.add_parser("stratify", help="group inputs by exact optimal invariant value")
    common(p)
    p.add_argument("--threads", type=int, default=1, help="worker threads")
    p.set_defaults(func=cmd_stratify)

    p = sub.add_parser("oracle", help="lattice-point series and extrapolation")
    common(p)
    p.add_argument("--v", required=True, help="direction a,b,...")
    p.add_argument("--mmax", type=int, required=True, help="largest dilation factor")
    p.add_argument("--dump", help="write a whitespace-separated columnar dump here")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("limits", help="limit support and face data of a weighted point")
    p.add_argument("input", help="weighted point JSON document")
    common(p, multi=False)
    p.add_argument("--v", required=True, help="direction a,b,...")
    p.set_defaults(func=cmd_limits)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "digits", 1) < 1:
        print("error: --digits must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CertificateError as exc:
        print(f"internal certificate failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
