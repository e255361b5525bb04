"""Ball enumeration, inverted orbits and the wreath product growth bound."""

from __future__ import annotations

import csv
import io
import math
import random
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Sequence

from .grig import GrigElement, depth_bound, portrait_key, reduce, reduced_words, word_is_identity
from .schreier import ROOT, OrbitPoint, bfs_distances, step

GROWTH_SCHEMA = "# schema: grigrow.growth.v1"
INVERTED_SCHEMA = "# schema: grigrow.inverted_orbit.v1"


@dataclass
class EnumerableGroup:
    """A group presented for breadth-first enumeration.

    ``key`` must separate distinct elements of the balls being enumerated.
    """

    name: str
    labels: Sequence[str]
    generators: Sequence[Any]
    identity: Any
    mul: Callable[[Any, Any], Any]
    key: Callable[[Any], Hashable]


def grigorchuk_group(r_max: int) -> EnumerableGroup:
    # portraits at this depth separate all elements of length <= r_max
    depth = depth_bound(2 * max(r_max, 1))
    return EnumerableGroup(
        "grigorchuk", list("abcd"), [GrigElement(s) for s in "abcd"], GrigElement(""),
        lambda u, v: u * v, lambda u: portrait_key(u.word, depth))


def integers_group() -> EnumerableGroup:
    return EnumerableGroup("Z", ["+1", "-1"], [1, -1], 0, lambda u, v: u + v, lambda u: u)


def trivial_group() -> EnumerableGroup:
    return EnumerableGroup("trivial", [], [], 0, lambda u, v: 0, lambda u: 0)


def cyclic_group(n: int) -> EnumerableGroup:
    return EnumerableGroup(f"Z/{n}", ["+1"], [1 % n], 0, lambda u, v: (u + v) % n,
                           lambda u: u)


@dataclass
class GrowthTable:
    descriptor: str
    balls: list[int] = field(default_factory=list)
    complete: bool = True

    @property
    def r_max(self) -> int:
        return len(self.balls) - 1

    def ball(self, r: int) -> int:
        if r < 0:
            raise ValueError("negative radius")
        if r > self.r_max:
            raise KeyError(f"radius {r} not in table (max {self.r_max})")
        return self.balls[r]

    def sphere(self, r: int) -> int:
        return self.ball(r) - (self.ball(r - 1) if r > 0 else 0)

    def rows(self) -> list[tuple[int, int, int]]:
        return [(r, self.ball(r), self.sphere(r)) for r in range(len(self.balls))]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(GROWTH_SCHEMA + "\n")
        out.write(f"# group: {self.descriptor}; complete: {str(self.complete).lower()}\n")
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["radius", "ball", "sphere"])
        writer.writerows(self.rows())
        return out.getvalue()


def iter_spheres(group: EnumerableGroup, r_max: int | None = None,
                 budget: int | None = None):
    """Yield the spheres of the Cayley graph as lists of elements.

    Discovery order is deterministic: each sphere is scanned in order and
    generators in label order.  Stops silently after ``r_max`` or when the
    next sphere would push the ball past ``budget`` elements.
    """
    seen = {group.key(group.identity)}
    sphere = [group.identity]
    yield sphere
    r = 0
    while r_max is None or r < r_max:
        nxt = []
        for u in sphere:
            for s in group.generators:
                v = group.mul(u, s)
                k = group.key(v)
                if k in seen:
                    continue
                seen.add(k)
                nxt.append(v)
                if budget is not None and len(seen) > budget:
                    return
        sphere = nxt
        r += 1
        yield sphere


def enumerate_ball_elements(group: EnumerableGroup, r_max: int,
                            budget: int | None = None) -> tuple[list[list[Any]], bool]:
    """Spheres of radius 0..r_max and whether all of them were completed."""
    if r_max < 0:
        raise ValueError("r_max must be nonnegative")
    spheres = list(iter_spheres(group, r_max, budget))
    return spheres, len(spheres) == r_max + 1


def enumerate_balls(group: EnumerableGroup, r_max: int, budget: int | None = None,
                    threads: int = 1) -> GrowthTable:
    """Ball sizes of radius 0..r_max; a partial table is flagged incomplete.

    ``threads`` is accepted for interface compatibility; enumeration is
    sequential, so results never depend on it.
    """
    if threads < 1:
        raise ValueError("threads must be positive")
    spheres, complete = enumerate_ball_elements(group, r_max, budget)
    total, balls = 0, []
    for sphere in spheres:
        total += len(sphere)
        balls.append(total)
    return GrowthTable(group.name, balls, complete)


def _level_signature(word: str, depth: int) -> tuple[str, ...]:
    g = GrigElement(word)
    return tuple(g.act_prefix(format(v, f"0{depth}b")) for v in range(1 << depth))


def naive_grigorchuk_balls(r_max: int, bucket_depth: int = 4) -> GrowthTable:
    """Independent oracle: reduced words deduplicated by pairwise word problem.

    Words are bucketed by their action on one level of the tree (a necessary
    condition for equality), then compared with ``word_is_identity``.
    """
    buckets: dict[tuple, list[str]] = defaultdict(list)
    count, balls = 0, []
    for r in range(r_max + 1):
        for w in reduced_words(r):
            sig = _level_signature(w, bucket_depth)
            if any(word_is_identity(reduce(w + rep[::-1])) for rep in buckets[sig]):
                continue
            buckets[sig].append(w)
            count += 1
        balls.append(count)
    return GrowthTable("grigorchuk-naive", balls, True)


# -- inverted orbits -----------------------------------------------------


def inverted_orbit(word: Sequence[GrigElement], x: OrbitPoint = ROOT) -> set[OrbitPoint]:
    """{x g1...gn, x g2...gn, ..., x gn, x}."""
    points = {x}
    for k in range(len(word)):
        p = x
        for g in word[k:]:
            for s in g.word:
                p = step(p, s)
        points.add(p)
    return points


@dataclass
class InvertedOrbitStats:
    n: int
    exact_max: int | None = None
    sampled_max: int | None = None
    samples: int = 0
    witness: str | None = None


DEFAULT_EXACT_CAP = 14


def _extend(state: frozenset, s: str, x: OrbitPoint) -> frozenset:
    # O(w s) = O(w) s together with x
    return frozenset([step(p, s) for p in state] + [x])


def inverted_orbit_exact(n: int, x: OrbitPoint = ROOT,
                         cap: int = DEFAULT_EXACT_CAP) -> tuple[int, str]:
    """Max |O(w)| over words of length n in a, b, c, d, with a maximiser.

    Dynamic programming over the reachable orbit sets; a set that cannot
    exceed the incumbent even gaining one point per remaining letter is
    dropped.
    """
    if n > cap:
        raise ValueError(f"exact mode is capped at n = {cap}")
    # incumbent from a cheap greedy pass
    greedy = frozenset([x])
    word = ""
    for _ in range(n):
        best = max("abcd", key=lambda s: (len(_extend(greedy, s, x)), -ord(s)))
        greedy = _extend(greedy, best, x)
        word += best
    incumbent, incumbent_word = len(greedy), word
    states = {frozenset([x]): ""}
    for k in range(n):
        remaining = n - k - 1
        nxt: dict[frozenset, str] = {}
        for state in sorted(states, key=lambda st: states[st]):
            w = states[state]
            for s in "abcd":
                new = _extend(state, s, x)
                if len(new) + remaining <= incumbent and remaining > 0:
                    continue
                if new not in nxt or w + s < nxt[new]:
                    nxt[new] = w + s
        states = nxt
        for state, w in states.items():
            if len(w) == n and (len(state) > incumbent
                                or (len(state) == incumbent and w < incumbent_word)):
                incumbent, incumbent_word = len(state), w
    return incumbent, incumbent_word


def inverted_orbit_sampled(n: int, trials: int, seed: int,
                           x: OrbitPoint = ROOT) -> int:
    rng = random.Random(seed)
    best = 1
    for _ in range(trials):
        state = frozenset([x])
        for _ in range(n):
            state = _extend(state, rng.choice("abcd"), x)
        best = max(best, len(state))
    return best


def inverted_orbit_growth(n: int, mode: str = "exact", trials: int = 1000,
                          seed: int = 0, x: OrbitPoint = ROOT,
                          cap: int = DEFAULT_EXACT_CAP) -> InvertedOrbitStats:
    stats = InvertedOrbitStats(n)
    if mode in ("exact", "both"):
        stats.exact_max, stats.witness = inverted_orbit_exact(n, x, cap)
    if mode in ("sampled", "both"):
        stats.sampled_max = inverted_orbit_sampled(n, trials, seed, x)
        stats.samples = trials
    if mode not in ("exact", "sampled", "both"):
        raise ValueError(f"unknown mode {mode!r}")
    return stats


def inverted_orbit_csv(rows: list[InvertedOrbitStats]) -> str:
    out = io.StringIO()
    out.write(INVERTED_SCHEMA + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["n", "exact", "sampled", "samples"])
    for st in rows:
        writer.writerow([st.n, "" if st.exact_max is None else st.exact_max,
                         "" if st.sampled_max is None else st.sampled_max, st.samples])
    return out.getvalue()


# -- concave majorants ---------------------------------------------------


@dataclass(frozen=True)
class PiecewiseLinear:
    """Linear interpolation through knots, extended linearly past both ends."""

    knots: tuple[tuple[Fraction, Fraction], ...]

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        ks = self.knots
        if len(ks) == 1:
            return ks[0][1]
        if t <= ks[0][0]:
            (x0, y0), (x1, y1) = ks[0], ks[1]
        elif t >= ks[-1][0]:
            (x0, y0), (x1, y1) = ks[-2], ks[-1]
        else:
            k = next(i for i in range(1, len(ks)) if ks[i][0] >= t)
            (x0, y0), (x1, y1) = ks[k - 1], ks[k]
        return y0 + (y1 - y0) * (t - x0) / (x1 - x0)

    def slopes(self) -> list[Fraction]:
        return [(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(self.knots, self.knots[1:])]


def _cross(o, p, q) -> Fraction:
    return (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])


def concave_majorant(points) -> PiecewiseLinear:
    """Least concave function above the points (upper convex hull).

    ``points`` is a mapping n -> f(n) or a sequence of pairs.
    """
    items = points.items() if hasattr(points, "items") else points
    pts = sorted((Fraction(n), Fraction(v)) for n, v in items)
    if not pts:
        raise ValueError("empty table")
    for v in pts:
        if v[1] <= 0:
            raise ValueError("values must be positive")
    hull: list[tuple[Fraction, Fraction]] = []
    for p in pts:
        while len(hull) >= 2 and _cross(hull[-2], hull[-1], p) >= 0:
            hull.pop()
        hull.append(p)
    return PiecewiseLinear(tuple(hull))


# -- the growth bound for H wr_X G ---------------------------------------


def schreier_ball_constant(center: OrbitPoint, r_max: int) -> int:
    """Least integer C with |ball(center, n)| <= C n for 1 <= n <= r_max."""
    dist = bfs_distances(center, r_max)
    counts = [0] * (r_max + 1)
    for d in dist.values():
        counts[d] += 1
    total, best = 0, Fraction(0)
    for n in range(r_max + 1):
        total += counts[n]
        if n >= 1:
            best = max(best, Fraction(total, n))
    return math.ceil(best)


def wreath_growth_bound(vG: GrowthTable, vH_bar: PiecewiseLinear, C: int,
                        rho: dict[int, int] | Sequence[int], R: int) -> Fraction:
    """v_G(R) binom(C R, rho(R)) vbar_H(R / rho(R))^rho(R), exactly."""
    if R > vG.r_max:
        raise KeyError(f"v_G lacks radius {R}")
    try:
        r = rho[R]
    except (KeyError, IndexError):
        raise KeyError(f"rho lacks radius {R}")
    if r == 0:
        return Fraction(vG.ball(R))
    return (vG.ball(R) * math.comb(C * R, r)) * vH_bar(Fraction(R, r)) ** r


__all__ = [
    "EnumerableGroup", "GrowthTable", "grigorchuk_group", "integers_group",
    "trivial_group", "cyclic_group", "enumerate_balls", "enumerate_ball_elements",
    "naive_grigorchuk_balls", "iter_spheres", "inverted_orbit", "InvertedOrbitStats",
    "inverted_orbit_growth", "inverted_orbit_exact", "inverted_orbit_sampled",
    "inverted_orbit_csv", "PiecewiseLinear", "concave_majorant",
    "schreier_ball_constant", "wreath_growth_bound",
]
