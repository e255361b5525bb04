"""The limit group W = <G, f> and its finitely supported approximations W_i.

f: X -> B is sparse: f(x_{n(j)}) = b_j and trivial elsewhere.  W_i uses the
truncation f_i that keeps j <= i.  Elements of W are handled lazily as
products of translates of f, and equality is decided exactly with the tail
classification of G on the points x_m.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .grig import FIXES_TAIL, GrigElement, depth_bound, tail_class
from .growth import EnumerableGroup, enumerate_ball_elements, iter_spheres
from .schreier import (
    OrbitPoint,
    act_point,
    ball,
    designated_distance,
    designated_position,
    distance,
    x,
)
from .seqprop import PointSequence, check_rectifiable_pair, transport_words
from .wreath import (
    INF,
    BaseGroup,
    Cyclic,
    DirectProduct,
    GrigAction,
    Integers,
    WreathElement,
    pure,
    w_identity,
    w_inv,
    w_mul,
)

SCHEDULE_SCHEMA = "grigrow.schedule.v1"


class ScheduleError(RuntimeError):
    """Raised when a schedule cannot be completed within its budget."""

    def __init__(self, message: str, partial: "Schedule | None" = None):
        super().__init__(message)
        self.partial = partial


@dataclass
class Schedule:
    n: list[int]
    m: list[int]
    epsilon: list[Fraction]
    certificates: list[dict] = field(default_factory=list)

    def __post_init__(self) -> None:
        for seq, name in ((self.n, "n"), (self.m, "m")):
            if any(b <= a for a, b in zip(seq, seq[1:])):
                raise ValueError(f"{name} must be strictly increasing: {seq}")

    def to_json(self) -> dict:
        return {
            "schema_version": SCHEDULE_SCHEMA,
            "epsilon": [str(Fraction(e)) for e in self.epsilon],
            "m": list(self.m),
            "n": list(self.n),
            "certificates": self.certificates,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Schedule":
        return cls(list(data["n"]), list(data["m"]),
                   [Fraction(e) for e in data["epsilon"]], list(data.get("certificates", [])))

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


# -- order equalisation ----------------------------------------------------


def equalize_orders(base: BaseGroup, values: Sequence) -> tuple[BaseGroup, list]:
    """Replace B by B x Z and b_i by (b_i, z) so all values share one order.

    Z is Z/lcm of the orders when all are finite, otherwise Z.
    """
    orders = [base.order(v) for v in values]
    if any(o is INF for o in orders):
        z = Integers()
    else:
        z = Cyclic(math.lcm(*orders) if orders else 1)
    gen = z.generators()[0]
    return DirectProduct(base, z), [(v, gen) for v in values]


def common_order(base: BaseGroup, values: Sequence) -> int | None:
    orders = {base.order(v) for v in values}
    if len(orders) != 1:
        raise ValueError(f"values have different orders: {sorted(orders, key=str)}")
    return orders.pop()


# -- sparse functions ------------------------------------------------------


@dataclass(frozen=True)
class SparseF:
    """f(x_m) for designated points; identity off the designated points.

    ``points`` gives f(x_m) for m <= known_to.  Past ``known_to`` the value is
    ``tail(m)`` (identity when tail is None, the truncated case); all tail
    values must have order ``tail_order`` (None for infinite order).
    """

    base: BaseGroup
    points: dict
    known_to: int
    tail: Callable[[int], Any] | None = None
    tail_order: int | None = None

    def at_index(self, m: int):
        if m <= self.known_to:
            return self.points.get(m, self.base.identity())
        if self.tail is None:
            return self.base.identity()
        return self.tail(m)

    def __call__(self, p: OrbitPoint):
        m = p.designated_index
        if m is None:
            return self.base.identity()
        return self.at_index(m)

    @property
    def finite(self) -> bool:
        return self.tail is None

    def support_indices(self) -> list[int]:
        if not self.finite:
            raise ValueError("infinite support")
        return sorted(m for m, v in self.points.items() if not self.base.is_identity(v))

    @classmethod
    def truncated(cls, base: BaseGroup, n: Sequence[int], values: Sequence, i: int) -> "SparseF":
        if i > len(n) or i > len(values):
            raise ValueError(f"schedule too short for f_{i}")
        pts = {n[j]: values[j] for j in range(i)}
        return cls(base, pts, max(pts, default=-1))

    def to_wreath(self, action: GrigAction) -> WreathElement:
        return WreathElement.make(self.base, action,
                                  {x(m): self.points[m] for m in self.support_indices()})


def make_Wi(schedule: Schedule, base: BaseGroup, values: Sequence, i: int,
            key_depth: int = 10) -> tuple[list[str], list[WreathElement]]:
    """Labels and generators of W_i = <f_i, a, b, c, d>.

    f_i^-1 is added as its own generator when f_i is not an involution.
    """
    if i > len(schedule.n):
        raise ValueError(f"schedule has only {len(schedule.n)} points, need {i}")
    action = GrigAction(key_depth)
    labels: list[str] = []
    gens: list[WreathElement] = []
    if i > 0:
        f = SparseF.truncated(base, schedule.n, values, i).to_wreath(action)
        labels.append("f")
        gens.append(f)
        if not w_mul(f, f).is_identity():
            labels.append("F")
            gens.append(w_inv(f))
    for s in "abcd":
        labels.append(s)
        gens.append(pure(base, action, GrigElement(s)))
    return labels, gens


def wi_group(schedule: Schedule, base: BaseGroup, values: Sequence, i: int,
             radius: int) -> EnumerableGroup:
    # keys must separate elements of length up to radius + 1
    labels, gens = make_Wi(schedule, base, values, i, depth_bound(2 * radius + 2))
    return EnumerableGroup(f"W_{i}", labels, gens, w_identity(base, gens[0].action),
                           w_mul, lambda u: u.key())


# -- ball comparison -------------------------------------------------------


def cayley_ball_code(group: EnumerableGroup, radius: int,
                     budget: int | None = None) -> tuple | None:
    """Labelled Cayley ball as a tuple independent of element names.

    Vertices are numbered in BFS discovery order; for each vertex and label
    the code records the neighbour's number or -1 outside the ball.  None
    when the budget runs out.
    """
    spheres, complete = enumerate_ball_elements(group, radius, budget)
    if not complete:
        return None
    order = [v for sphere in spheres for v in sphere]
    index = {group.key(v): k for k, v in enumerate(order)}
    code = []
    for v in order:
        code.append(tuple(index.get(group.key(group.mul(v, s)), -1)
                          for s in group.generators))
    return tuple(code)


def ball_agreement(i: int, m: int, schedule: Schedule, base: BaseGroup,
                   values: Sequence, k: int = 1, budget: int | None = None) -> bool:
    """Radius-m labelled balls of W_i and W_{i+k} coincide under f_i <-> f_{i+k}."""
    if m == 0:
        return True
    a = cayley_ball_code(wi_group(schedule, base, values, i, m), m, budget)
    b = cayley_ball_code(wi_group(schedule, base, values, i + k, m), m, budget)
    if a is None or b is None:
        raise ScheduleError(f"budget {budget} too small for radius {m}")
    return a == b


def first_disagreement(i: int, schedule: Schedule, base: BaseGroup, values: Sequence,
                       m_max: int, k: int = 1, budget: int | None = None) -> int | None:
    for m in range(1, m_max + 1):
        if not ball_agreement(i, m, schedule, base, values, k, budget):
            return m
    return None


# -- schedules -------------------------------------------------------------


def gap(N: int) -> int:
    """min over k >= N and j != k of d(x_j, x_k)."""
    if N == 0:
        return designated_distance(0, 1)
    return designated_distance(N - 1, N)


def stable_radius(N: int) -> int:
    """Largest R with the radius-R balls at x_N and every x_j (j > N) equal."""
    return designated_position(N) - 1


def point_conditions(N: int, m: int) -> bool:
    return gap(N) >= m and stable_radius(N) >= m


def certify_point(N: int, m: int, lookahead: int = 3) -> dict:
    """Certificate that x_N is far from all other points and locally stable.

    Uses the closed forms for positions and checks them directly by BFS and
    ball comparison for the next ``lookahead`` indices.
    """
    checked = []
    centre = ball(x(N), m).normal_form()
    for j in range(N + 1, N + 1 + lookahead):
        same = ball(x(j), m).normal_form() == centre
        far = distance(x(N), x(j), m - 1) is None if m > 0 else True
        checked.append({"j": j, "ball_equal": same, "distance_ge_m": far})
    near = N - 1
    if near >= 0:
        checked.append({"j": near, "ball_equal": None,
                        "distance_ge_m": m == 0 or distance(x(N), x(near), m - 1) is None})
    ok = point_conditions(N, m) and all(
        c["distance_ge_m"] and c["ball_equal"] is not False for c in checked)
    return {"index": N, "radius": m, "gap": gap(N), "stable_radius": stable_radius(N),
            "checked": checked, "ok": ok}


def _first_point(after: int, m: int) -> int:
    N = after + 1
    while not point_conditions(N, m):
        N += 1
    return N


def choose_schedule(base: BaseGroup, values: Sequence, epsilon: Sequence,
                    i_max: int, budget: int = 200_000, r_cap: int = 12) -> Schedule:
    """Build n(1..i_max+1) and m(1..i_max).

    For each level i, m(i) is the least radius above m(i-1) with
    v_i(m) <= epsilon_i^m, where v_i is the growth of W_i.  Since W_i
    depends on n(i) and n(i) must be far and stable at radius m(i), n(i) is
    raised until both requirements hold simultaneously.  The last point
    n(i_max+1) is then chosen for radius m(i_max).
    """
    if len(values) < i_max + 1:
        raise ValueError(f"need {i_max + 1} values for {i_max} levels")
    if len(epsilon) < i_max:
        raise ValueError("need one epsilon per level")
    eps = [Fraction(e) for e in epsilon]
    if any(e <= 1 for e in eps) or any(b > a for a, b in zip(eps, eps[1:])):
        raise ValueError("epsilon must be > 1 and non-increasing")
    common_order(base, values)
    n: list[int] = []
    m: list[int] = []
    certs: list[dict] = []
    for i in range(1, i_max + 1):
        lo = m[-1] + 1 if m else 1
        N = _first_point(n[-1] if n else -1, lo)
        while True:
            trial = Schedule(n + [N], m, eps)
            group = wi_group(trial, base, values, i, r_cap)
            sizes, total, radius = [], 0, None
            for r, sphere in enumerate(iter_spheres(group, r_cap, budget)):
                total += len(sphere)
                sizes.append(total)
                if r >= lo and total <= eps[i - 1] ** r:
                    radius = r
                    break
            if radius is None:
                raise ScheduleError(
                    f"level {i}: no radius in [{lo}, {min(r_cap, len(sizes) - 1)}] with "
                    f"v_{i}(r) <= {eps[i - 1]}^r within budget {budget} (sizes {sizes})",
                    Schedule(n, m, eps[:len(m)], certs))
            if point_conditions(N, radius):
                break
            N = _first_point(N, radius)
        n.append(N)
        m.append(radius)
        certs.append({"level": i, "m": radius, "v": sizes[radius],
                      "bound": str(eps[i - 1] ** radius),
                      "point": certify_point(N, radius)})
    N = _first_point(n[-1], m[-1])
    n.append(N)
    certs.append({"level": i_max + 1, "point": certify_point(N, m[-1])})
    return Schedule(n, m, eps[:i_max], certs)


def broken_schedule(schedule: Schedule) -> Schedule:
    """The same radii with points crowded at the start: n = 0, 1, 2, ...

    x_0 and x_1 are adjacent, so f_1 and its translates meet after very few
    steps and the Cayley balls of W_1 and W_2 already differ at radius 2.
    """
    n = list(range(len(schedule.n)))
    return Schedule(n, list(schedule.m), list(schedule.epsilon),
                    [{"broken": "points placed at 0, 1, 2, ..."}])


# -- lazy elements of W ----------------------------------------------------


@dataclass(frozen=True)
class LazyWElement:
    """(c, g) with c(y) = prod over terms (s, e) of f(y s)^e, in order."""

    terms: tuple[tuple[GrigElement, int], ...]
    g: GrigElement

    @classmethod
    def make(cls, terms, g=GrigElement("")) -> "LazyWElement":
        merged: list[list] = []
        for s, e in terms:
            if e == 0:
                continue
            if merged and merged[-1][0] == s:
                merged[-1][1] += e
                if merged[-1][1] == 0:
                    merged.pop()
            else:
                merged.append([s, e])
        return cls(tuple((s, e) for s, e in merged), g)

    def __mul__(self, other: "LazyWElement") -> "LazyWElement":
        return lazy_mul(self, other)

    def value(self, f: SparseF, y: OrbitPoint):
        result = f.base.identity()
        for s, e in self.terms:
            result = f.base.mul(result, f.base.power(f(act_point(s, y)), e))
        return result

    def __str__(self) -> str:
        body = " ".join(f"f^{e}@{s}" for s, e in self.terms)
        return "{" + body + " | " + str(self.g) + "}"


LAZY_ONE = LazyWElement((), GrigElement(""))
LAZY_F = LazyWElement.make([(GrigElement(""), 1)])


def lazy_pure(g: GrigElement) -> LazyWElement:
    return LazyWElement((), g)


def lazy_mul(u: LazyWElement, v: LazyWElement) -> LazyWElement:
    # c2(y g1) turns f(y s) into f(y g1 s)
    moved = [(u.g * s, e) for s, e in v.terms]
    return LazyWElement.make(list(u.terms) + moved, u.g * v.g)


def lazy_inv(u: LazyWElement) -> LazyWElement:
    gi = u.g.inverse()
    return LazyWElement.make([(gi * s, -e) for s, e in reversed(u.terms)], gi)


def lazy_conj(u: LazyWElement, h: GrigElement) -> LazyWElement:
    return lazy_mul(lazy_mul(lazy_pure(h.inverse()), u), lazy_pure(h))


def lazy_commutator(u: LazyWElement, v: LazyWElement) -> LazyWElement:
    return lazy_mul(lazy_mul(lazy_inv(u), lazy_inv(v)), lazy_mul(u, v))


def lazy_word(word: str) -> LazyWElement:
    """Evaluate a word over f, F (= f^-1), a, b, c, d."""
    result = LAZY_ONE
    for ch in word:
        if ch == "f":
            result = lazy_mul(result, LAZY_F)
        elif ch == "F":
            result = lazy_mul(result, lazy_inv(LAZY_F))
        else:
            result = lazy_mul(result, lazy_pure(GrigElement(ch)))
    return result


class CertificationError(RuntimeError):
    pass


@dataclass
class EqualityCertificate:
    equal: bool
    window: int
    points_checked: int
    tail_classes: list[int]
    witness: str | None = None


def lazy_function_is(u: LazyWElement, f: SparseF, target: dict) -> EqualityCertificate:
    """Decide whether the function part of u equals the finite map ``target``.

    Points where some term can be nontrivial are y = x_m s^-1.  For m up to
    the largest tail horizon of the pairwise quotients s_t^-1 s_u, every such
    y is evaluated exactly.  Beyond it, terms that fix x_m together form
    classes whose exponent sums must vanish modulo the tail order.
    """
    base = f.base
    shifts = [s for s, _ in u.terms]
    horizon = f.known_to
    classes: list[list[int]] = []
    if not f.finite:
        tails = {}
        for a, sa in enumerate(shifts):
            for b_, sb in enumerate(shifts):
                tb = tail_class(sa.inverse() * sb)
                tails[a, b_] = tb
                horizon = max(horizon, tb.horizon)
        seen: set[int] = set()
        for a in range(len(shifts)):
            if a in seen:
                continue
            cls = [b_ for b_ in range(len(shifts)) if tails[a, b_].kind == FIXES_TAIL]
            seen.update(cls)
            classes.append(cls)
    candidates: set[OrbitPoint] = set(target)
    for s in shifts:
        s_inv = s.inverse()
        if f.finite:
            indices = f.support_indices()
        else:
            indices = range(horizon + 1)
        for m in indices:
            if not base.is_identity(f.at_index(m)):
                candidates.add(act_point(s_inv, x(m)))
    for y in sorted(candidates):
        want = target.get(y, base.identity())
        if not base.eq(u.value(f, y), want):
            return EqualityCertificate(False, horizon, len(candidates), [],
                                       f"value at {y} is {base.fmt(u.value(f, y))}, "
                                       f"expected {base.fmt(want)}")
    sums = []
    for cls in classes:
        total = sum(u.terms[k][1] for k in cls)
        sums.append(total)
        order = f.tail_order
        bad = total != 0 if order is INF else total % order != 0
        if bad:
            return EqualityCertificate(False, horizon, len(candidates), sums,
                                       f"exponent sum {total} on a tail class "
                                       f"(order {order})")
    return EqualityCertificate(True, horizon, len(candidates), sums)


def lazy_eq(u: LazyWElement, v: LazyWElement, f: SparseF) -> bool:
    w = lazy_mul(u, lazy_inv(v))
    if not w.g.is_identity():
        return False
    return lazy_function_is(w, f, {}).equal


def lazy_to_wreath(u: LazyWElement, f: SparseF, action: GrigAction | None = None) -> WreathElement:
    """Materialise u when f is finitely supported."""
    action = action or GrigAction()
    points = {act_point(s.inverse(), x(m)) for s, _ in u.terms for m in f.support_indices()}
    return WreathElement.make(f.base, action, {y: u.value(f, y) for y in points}, u.g)


# -- commutators -----------------------------------------------------------


@dataclass
class CommutatorReport:
    i: int
    j: int
    g_i: str
    g_j: str
    expected: Any
    ok: bool
    detail: str | None = None


def commutator_witnesses(n_i: int, n_j: int, search_radius: int = 4096) -> tuple[GrigElement, GrigElement]:
    """g_i, g_j with x_{n_i} g_i = x_{n_j} g_j = x_0 and g_i g_j^-1 rectifying."""
    d = distance(x(n_j), x(0), max(designated_position(n_j), 1))
    g_j = GrigElement(next(transport_words(x(n_j), x(0), d)))
    if n_i == n_j:
        return g_j, g_j
    seq = PointSequence.designated(max(n_i, n_j) + 1)
    w = check_rectifiable_pair(seq, n_i, n_j, search_radius)
    if w is None:
        raise CertificationError(f"no rectifying element for ({n_i}, {n_j})")
    return w.g * g_j, g_j


def commutator_in_W(i: int, j: int, f: SparseF, n: Sequence[int],
                    witnesses: tuple[GrigElement, GrigElement] | None = None) -> CommutatorReport:
    """[f^{g_i}, f^{g_j}] equals iota([b_i, b_j]) exactly (1-based i, j)."""
    n_i, n_j = n[i - 1], n[j - 1]
    g_i, g_j = witnesses or commutator_witnesses(n_i, n_j)
    if act_point(g_i, x(n_i)) != x(0) or act_point(g_j, x(n_j)) != x(0):
        raise CertificationError("witnesses must carry x_{n(i)}, x_{n(j)} to x_0")
    if n_i != n_j:
        r = g_i * g_j.inverse()
        tail = tail_class(r)
        if tail.exceptions != {n_i: n_j}:
            raise CertificationError(
                f"g_i g_j^-1 creates coincidences {tail.exceptions}")
    base = f.base
    b_i, b_j = f.at_index(n_i), f.at_index(n_j)
    expected = base.mul(base.mul(base.inv(b_i), base.inv(b_j)), base.mul(b_i, b_j))
    comm = lazy_commutator(lazy_conj(LAZY_F, g_i), lazy_conj(LAZY_F, g_j))
    if not comm.g.is_identity():
        return CommutatorReport(i, j, g_i.word, g_j.word, expected, False, "nontrivial group part")
    target = {} if base.is_identity(expected) else {x(0): expected}
    cert = lazy_function_is(comm, f, target)
    return CommutatorReport(i, j, g_i.word, g_j.word, expected, cert.equal, cert.witness)


__all__ = [
    "Schedule", "ScheduleError", "SparseF", "equalize_orders", "common_order",
    "make_Wi", "wi_group", "cayley_ball_code", "ball_agreement", "first_disagreement",
    "gap", "stable_radius", "certify_point", "choose_schedule", "broken_schedule",
    "LazyWElement", "LAZY_ONE", "LAZY_F", "lazy_pure", "lazy_mul", "lazy_inv",
    "lazy_conj", "lazy_commutator", "lazy_word", "lazy_function_is", "lazy_eq",
    "lazy_to_wreath", "EqualityCertificate", "CertificationError",
    "commutator_witnesses", "commutator_in_W", "CommutatorReport",
]
