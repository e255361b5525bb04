"""Command-line driver for the experiments.

Each subcommand writes one artifact (CSV, JSON or DOT) and a short summary.
With ``--out DIR`` the artifact goes to ``DIR/<subcommand>.<ext>`` and the
summary to stdout; otherwise the artifact goes to stdout and the summary to
stderr.  A failed verification exits with status 1 after printing the first
counterexample.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import growth, imbed, schreier, seqprop, wlimit
from .grig import GrigElement, depth_bound
from .wreath import BaseGroup, GrigAction, Sym3, base_by_name, delta, pure, w_identity, w_mul

JSON_SCHEMA = "grigrow.report.v1"
FORMATS = {
    "schreier": ("csv", "json", "dot"),
    "growth": ("csv", "json"),
    "inverted-orbit": ("csv", "json"),
    "rectify": ("json",),
    "imbed": ("json",),
    "two-gen": ("json",),
    "wlimit": ("json",),
}


@dataclass
class Result:
    artifact: str
    summary: list[str] = field(default_factory=list)
    failure: str | None = None


def _dump(report: dict) -> str:
    report = {"schema_version": JSON_SCHEMA, **report}
    return json.dumps(report, indent=2, sort_keys=True, default=str) + "\n"


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonnegative(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


# -- schreier --------------------------------------------------------------


def run_schreier(args) -> Result:
    n = args.max_i
    rows, mismatch = [], None
    for i in range(n + 1):
        for j in range(i + 1, n + 1):
            closed = schreier.designated_distance(i, j)
            d = schreier.distance(schreier.x(i), schreier.x(j), closed + 1)
            rows.append((i, j, d))
            if d != closed and mismatch is None:
                mismatch = f"d(x_{i}, x_{j}) = {d} by BFS, closed form gives {closed}"
    power_gap = sum(1 for i, j, d in rows if d != abs((1 << i) - (1 << j)))
    summary = [f"{len(rows)} pairs with 0 <= i < j <= {n}",
               f"BFS agrees with position law floor(2^(k+1)/3): {mismatch is None}",
               f"pairs where d differs from |2^i - 2^j|: {power_gap}"]
    if args.format == "dot":
        center = schreier.x(args.center)
        artifact = schreier.to_dot(schreier.ball(center, args.max_radius))
        summary.append(f"ball of radius {args.max_radius} around x_{args.center}")
    elif args.format == "json":
        stable = {}
        for i in range(n + 1):
            stable[str(i)] = schreier.designated_position(i) - 1
        artifact = _dump({
            "command": "schreier",
            "max_i": n,
            "distances": [{"i": i, "j": j, "d": d, "power_gap": abs((1 << i) - (1 << j))}
                          for i, j, d in rows],
            "ball_stable_radius": stable,
        })
    else:
        artifact = schreier.distance_csv(rows)
    return Result(artifact, summary, mismatch)


# -- growth ----------------------------------------------------------------


def _lamplighter(base: BaseGroup, r_max: int) -> growth.EnumerableGroup:
    """B wr_X G with one lamp generator at x_0."""
    action = GrigAction(depth_bound(2 * r_max + 2))
    labels, gens = [], []
    for k, b in enumerate(base.generators()):
        labels.append(f"l{k}")
        gens.append(delta(base, action, schreier.x(0), b))
        if not base.eq(base.mul(b, b), base.identity()):
            labels.append(f"L{k}")
            gens.append(delta(base, action, schreier.x(0), base.inv(b)))
    for s in "abcd":
        labels.append(s)
        gens.append(pure(base, action, GrigElement(s)))
    return growth.EnumerableGroup(f"{base.name}-wr-grigorchuk", labels, gens,
                                  w_identity(base, action), w_mul, lambda u: u.key())


_TRANSPOSITIONS = [(1, 0, 2), (0, 2, 1), (2, 1, 0)]


def _values(base: BaseGroup, count: int) -> list:
    """Values b_1, b_2, ... placed at the points x_{n(i)}."""
    if isinstance(base, Sym3):
        return [_TRANSPOSITIONS[k % 3] for k in range(count)]
    gens = base.generators()
    if not gens:
        raise ValueError("base group has no generators")
    return [gens[0]] * count


def _epsilon(args) -> list[Fraction]:
    return [Fraction(e) for e in args.epsilon.split(",")]


def run_growth(args) -> Result:
    r = args.max_radius
    failure = None
    if args.group == "grig":
        group = growth.grigorchuk_group(r)
    elif args.group == "z":
        group = growth.integers_group()
    elif args.group == "trivial":
        group = growth.trivial_group()
    elif args.group == "cyclic":
        group = growth.cyclic_group(args.modulus)
    elif args.group == "wreath":
        group = _lamplighter(base_by_name(args.base), r)
    else:  # W_i
        base = base_by_name(args.base)
        values = _values(base, args.level + 1)
        eps = _epsilon(args)
        schedule = wlimit.choose_schedule(base, values, eps, args.level, args.budget)
        group = wlimit.wi_group(schedule, base, values, args.level, r)
    table = growth.enumerate_balls(group, r, args.budget, args.threads)
    summary = [f"{table.descriptor}: balls {table.balls}" + ("" if table.complete else " (budget hit)")]
    oracle = None
    if args.oracle:
        if args.group != "grig":
            raise ValueError("--oracle is only available for --group grig")
        oracle = growth.naive_grigorchuk_balls(table.r_max)
        for k, (u, v) in enumerate(zip(table.balls, oracle.balls)):
            if u != v:
                failure = f"radius {k}: enumeration {u}, naive oracle {v}"
                break
        summary.append(f"naive oracle agrees: {failure is None}")
    if args.format == "json":
        artifact = _dump({"command": "growth", "group": table.descriptor,
                          "complete": table.complete,
                          "rows": [{"radius": k, "ball": b, "sphere": s} for k, b, s in table.rows()],
                          "oracle": None if oracle is None else oracle.balls})
    else:
        artifact = table.to_csv()
    return Result(artifact, summary, failure)


# -- inverted orbits -------------------------------------------------------


def run_inverted_orbit(args) -> Result:
    rows, failure = [], None
    for n in range(args.max_n + 1):
        mode = args.mode if n <= args.exact_cap or args.mode == "sampled" else "sampled"
        st = growth.inverted_orbit_growth(n, mode, args.trials, args.seed + n,
                                          cap=args.exact_cap)
        rows.append(st)
        if failure is None and st.exact_max is not None and st.sampled_max is not None \
                and st.sampled_max > st.exact_max:
            failure = f"n = {n}: sampled {st.sampled_max} exceeds exact {st.exact_max}"
        if failure is None and st.exact_max is not None and n > 0 \
                and rows[-2].exact_max is not None and st.exact_max < rows[-2].exact_max:
            failure = f"n = {n}: exact maximum {st.exact_max} drops below {rows[-2].exact_max}"
    summary = [f"exact: {[st.exact_max for st in rows]}",
               f"sampled: {[st.sampled_max for st in rows]}"]
    if args.format == "json":
        artifact = _dump({"command": "inverted-orbit", "seed": args.seed, "trials": args.trials,
                          "rows": [{"n": st.n, "exact": st.exact_max, "sampled": st.sampled_max,
                                    "samples": st.samples, "witness": st.witness} for st in rows]})
    else:
        artifact = growth.inverted_orbit_csv(rows)
    return Result(artifact, summary, failure)


# -- rectify ---------------------------------------------------------------


def run_rectify(args) -> Result:
    seq = seqprop.PointSequence.designated(args.max_i + 1)
    witnesses, failure = [], None
    for i in range(args.max_i + 1):
        for j in range(args.max_i + 1):
            if i == j:
                continue
            w = seqprop.check_rectifiable_pair(seq, i, j, args.search_radius)
            if w is None or not seqprop.alt_rectifiable(seq, w):
                failure = failure or f"pair ({i}, {j}): no certified witness"
                continue
            witnesses.append(w.to_json())
    report = {"command": "rectify", "max_i": args.max_i, "witnesses": witnesses}
    summary = [f"{len(witnesses)} certified witnesses for 0 <= i != j <= {args.max_i}"]
    if args.pf:
        z = schreier.x(0)
        gs = seqprop.build_pf_sequence(z, args.pf)
        ok = seqprop.is_parallelogram_free(z, gs)
        report["parallelogram_free"] = {"z": "x_0", "words": [g.word for g in gs], "verified": ok}
        summary.append(f"parallelogram-free sequence of {args.pf}: lengths {[len(g) for g in gs]}")
        if not ok:
            failure = failure or f"quadruple check failed for {[g.word for g in gs]}"
    return Result(_dump(report), summary, failure)


# -- imbed -----------------------------------------------------------------


def _random_rational(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-40, 40), rng.randint(1, 12))


def run_imbed(args) -> Result:
    rng = random.Random(args.seed)
    failure = None
    homs = []
    for _ in range(args.pairs):
        b1, b2 = _random_rational(rng), _random_rational(rng)
        ok = imbed.phi0_is_homomorphism(b1, b2)
        homs.append({"b1": imbed.fmt_q(b1), "b2": imbed.fmt_q(b2), "ok": ok})
        if not ok and failure is None:
            failure = f"Phi_0({b1}) Phi_0({b2}) != Phi_0({b1 + b2})"
    integral = []
    for b in (1, -1, 2, -2):
        w = imbed.commutator_witness_C(b)
        integral.append({"b": b, "ok": w.holds})
        if not w.holds and failure is None:
            failure = f"commutator witness fails for b = {b}"
    rational = []
    for b in ("1/2", "1/3", "2/3", "5/6"):
        n, w = imbed.commutator_witness_B(Fraction(b))
        rational.append({"b": b, "n": n, "ok": w.holds})
        if not w.holds and failure is None:
            failure = f"commutator witness fails for b = {b} with n = {n}"
    report = {"command": "imbed", "seed": args.seed, "homomorphism": homs,
              "integral_witnesses": integral, "rational_witnesses": rational}
    summary = [f"homomorphism law: {sum(h['ok'] for h in homs)}/{len(homs)}",
               f"integral witnesses: {all(r['ok'] for r in integral)}",
               f"rational witnesses: {all(r['ok'] for r in rational)}"]
    return Result(_dump(report), summary, failure)


# -- two-gen ---------------------------------------------------------------


def run_two_gen(args) -> Result:
    base = Sym3()
    reports = imbed.sym3_two_gen_report(args.count, args.seed, args.pairs)
    failure = None
    for k, r in enumerate(reports):
        if not r.ok:
            failure = (f"word {k} {r.word}: support {r.support}, value {base.fmt(r.value)}, "
                       f"expected {base.fmt(r.expected)}")
            break
    summary = [f"{sum(r.ok for r in reports)}/{len(reports)} balanced words realised at t"]
    return Result(_dump({"command": "two-gen", "seed": args.seed,
                         "reports": [r.to_json(base) for r in reports]}), summary, failure)


# -- wlimit ----------------------------------------------------------------


def run_wlimit(args) -> Result:
    base = base_by_name(args.base)
    levels = args.levels
    values = _values(base, levels + 1)
    schedule = wlimit.choose_schedule(base, values, _epsilon(args), levels, args.budget,
                                      args.max_radius)
    failure = None
    agreement = []
    for i, m in enumerate(schedule.m, start=1):
        ok = wlimit.ball_agreement(i, m, schedule, base, values, budget=args.budget)
        agreement.append({"level": i, "radius": m, "agree": ok})
        if not ok and failure is None:
            failure = f"balls of W_{i} and W_{i + 1} differ at radius {m} (n = {schedule.n})"
    broken = wlimit.broken_schedule(schedule)
    m_b = wlimit.first_disagreement(1, broken, base, values, schedule.m[0], budget=args.budget)
    if m_b is None and failure is None:
        failure = f"broken schedule n = {broken.n} agrees up to radius {schedule.m[0]}"
    commutators = []
    if isinstance(base, Sym3):
        f = wlimit.SparseF.truncated(base, schedule.n, values, levels + 1)
        for i in range(1, levels + 2):
            for j in range(1, levels + 2):
                r = wlimit.commutator_in_W(i, j, f, schedule.n)
                commutators.append({"i": i, "j": j, "g_i": r.g_i, "g_j": r.g_j,
                                    "expected": base.fmt(r.expected), "ok": r.ok})
                if not r.ok and failure is None:
                    failure = f"commutator ({i}, {j}) with g_i = {r.g_i}, g_j = {r.g_j}: {r.detail}"
    report = {"command": "wlimit", "base": args.base, "values": [base.fmt(v) for v in values],
              "schedule": schedule.to_json(), "agreement": agreement,
              "broken_schedule": {"n": broken.n, "first_disagreement": m_b},
              "commutators": commutators}
    summary = [f"schedule n = {schedule.n}, m = {schedule.m}",
               "agreement: " + ", ".join(f"W_{a['level']}~W_{a['level'] + 1} at r={a['radius']}: "
                                         f"{a['agree']}" for a in agreement),
               f"broken schedule first disagrees at radius {m_b}"]
    if commutators:
        summary.append(f"commutators: {sum(c['ok'] for c in commutators)}/{len(commutators)}")
    return Result(_dump(report), summary, failure)


RUNNERS = {
    "schreier": run_schreier,
    "growth": run_growth,
    "inverted-orbit": run_inverted_orbit,
    "rectify": run_rectify,
    "imbed": run_imbed,
    "two-gen": run_two_gen,
    "wlimit": run_wlimit,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--max-radius", type=_nonnegative, default=8)
    common.add_argument("--budget", type=_positive, default=200_000,
                        help="cap on enumerated elements")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=_positive, default=1,
                        help="accepted for compatibility; results do not depend on it")
    common.add_argument("--format", choices=("csv", "json", "dot"))
    common.add_argument("--out", type=Path, help="directory for the artifact")

    parser = argparse.ArgumentParser(prog="grigrow", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schreier", parents=[common], help="distance and ball tables, DOT")
    p.add_argument("--max-i", type=_nonnegative, default=8)
    p.add_argument("--center", type=_nonnegative, default=0, help="x_k for the DOT ball")

    p = sub.add_parser("growth", parents=[common], help="ball tables")
    p.add_argument("--group", choices=("grig", "z", "trivial", "cyclic", "wreath", "W"),
                   default="grig")
    p.add_argument("--modulus", type=_positive, default=2)
    p.add_argument("--base", choices=("z2", "z", "sym3"), default="z2")
    p.add_argument("--level", type=_positive, default=1)
    p.add_argument("--epsilon", default="3,29/10")
    p.add_argument("--oracle", action="store_true", help="compare with the naive oracle")

    p = sub.add_parser("inverted-orbit", parents=[common], help="inverted orbit growth")
    p.add_argument("--max-n", type=_nonnegative, default=12)
    p.add_argument("--mode", choices=("exact", "sampled", "both"), default="both")
    p.add_argument("--trials", type=_positive, default=2000)
    p.add_argument("--exact-cap", type=_nonnegative, default=growth.DEFAULT_EXACT_CAP)

    p = sub.add_parser("rectify", parents=[common], help="rectifying elements")
    p.add_argument("--max-i", type=_nonnegative, default=5)
    p.add_argument("--search-radius", type=_positive, default=4096)
    p.add_argument("--pf", type=_nonnegative, default=0,
                   help="also build a parallelogram-free sequence of this length")

    p = sub.add_parser("imbed", parents=[common], help="imbedding of Q into a commutator group")
    p.add_argument("--pairs", type=_positive, default=100)

    p = sub.add_parser("two-gen", parents=[common], help="two-generator imbedding")
    p.add_argument("--count", type=_positive, default=20)
    p.add_argument("--pairs", type=_positive, default=4)

    p = sub.add_parser("wlimit", parents=[common], help="schedule, ball agreement, commutators")
    p.add_argument("--base", choices=("z2", "sym3"), default="z2")
    p.add_argument("--levels", type=_positive, default=2)
    p.add_argument("--epsilon", default="3,29/10")
    p.set_defaults(max_radius=12)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    allowed = FORMATS[args.command]
    if args.format is None:
        args.format = allowed[0]
    if args.format not in allowed:
        parser.error(f"{args.command} supports --format {', '.join(allowed)}")
    try:
        result = RUNNERS[args.command](args)
    except (ValueError, wlimit.ScheduleError, seqprop.SearchExhausted) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        path = args.out / f"{args.command}.{args.format}"
        path.write_text(result.artifact)
        summary_stream = sys.stdout
        print(f"wrote {path}", file=summary_stream)
    else:
        sys.stdout.write(result.artifact)
        summary_stream = sys.stderr
    for line in result.summary:
        print(line, file=summary_stream)
    if result.failure is not None:
        print(f"FAILED: {result.failure}", file=summary_stream)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
