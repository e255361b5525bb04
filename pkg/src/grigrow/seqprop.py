"""Spreading, locally stabilising, rectifiable and parallelogram-free sequences.

Searches over G are bounded: they either return an element with an exact
certificate or report failure.  Nothing here claims more than was checked.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .grig import (
    GrigElement,
    LETTERS,
    TailBehavior,
    reduce,
    reduced_words,
    tail_class,
    word_is_identity,
    word_sections,
)
from .schreier import (
    OrbitPoint,
    act_point,
    ball,
    balls_equal,
    bfs_distances,
    distance,
    step,
    x,
)


class SearchExhausted(RuntimeError):
    """A bounded search ran out of room; ``index`` says how far it got."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class PointSequence:
    """A finite prefix of a sequence of orbit points.

    ``source == "designated"`` marks the prefix of x_0, x_1, ...; witnesses
    for it are certified on the whole infinite sequence.
    """

    points: tuple[OrbitPoint, ...]
    source: str = "user"

    def __post_init__(self) -> None:
        if len(set(self.points)) != len(self.points):
            raise ValueError("points must be pairwise distinct")

    @classmethod
    def designated(cls, length: int) -> "PointSequence":
        return cls(tuple(x(i) for i in range(length)), "designated")

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, i: int) -> OrbitPoint:
        if self.source == "designated":
            return x(i)
        return self.points[i]

    def subsequence(self, indices) -> "PointSequence":
        return PointSequence(tuple(self.points[k] for k in indices), "user")


def check_spreading(seq: PointSequence, R: int) -> int | None:
    """Least N with d(x_i, x_j) >= R for all distinct i, j >= N in the prefix.

    Returns None when only the vacuous choice (fewer than two points left)
    works.
    """
    if R <= 0:
        return 0
    n = len(seq)
    # close[i]: some j > i with d(x_i, x_j) < R
    best = None
    for N in range(n - 1, -1, -1):
        ok = all(
            distance(seq.points[N], seq.points[j], R - 1) is None
            for j in range(N + 1, n)
        )
        if not ok:
            break
        best = N
    if best is None or best >= n - 1:
        return None
    return best


def check_locally_stabilizing(seq: PointSequence, R: int) -> int | None:
    """Least N such that the radius-R balls at x_i, i >= N, all coincide."""
    n = len(seq)
    forms = [ball(p, R).normal_form() for p in seq.points]
    best = None
    for N in range(n - 1, -1, -1):
        if forms[N] != forms[n - 1]:
            break
        best = N
    if best is None or best >= n - 1:
        return None
    return best


# -- rectifiability ------------------------------------------------------


@dataclass(frozen=True)
class RectifiabilityWitness:
    i: int
    j: int
    g: GrigElement
    tail_level: int
    verified_to: int

    def to_json(self) -> dict:
        return {
            "i": self.i,
            "j": self.j,
            "word": self.g.word,
            "tail_level": self.tail_level,
            "exceptions_checked": self.verified_to,
        }


def certify(seq: PointSequence, i: int, j: int, g: GrigElement,
            tail: TailBehavior | None = None) -> RectifiabilityWitness | None:
    """Check that g carries x_i to x_j and creates no other coincidence.

    For the designated sequence the check covers every index: indices up to
    the tail horizon are acted on directly, the rest are covered by the
    tail classification.  For other sequences only the prefix is checked.
    """
    if act_point(g, seq[i]) != seq[j]:
        return None
    if seq.source == "designated":
        if tail is None:
            tail = tail_class(g)
        if tail.exceptions != {i: j}:
            return None
        return RectifiabilityWitness(i, j, g, tail.level, tail.horizon)
    index = {p: k for k, p in enumerate(seq.points)}
    for k, p in enumerate(seq.points):
        ell = index.get(act_point(g, p))
        if ell is not None and ell != k and k != i:
            return None
    return RectifiabilityWitness(i, j, g, 0, len(seq) - 1)


class _NodeBudget(Exception):
    pass


def transport_words(start: OrbitPoint, target: OrbitPoint, length: int,
                    max_nodes: int | None = None):
    """Reduced words of the given length carrying start to target, in
    lexicographic order.

    Depth-first with distance pruning.  ``max_nodes`` caps the number of
    search nodes; the generator simply stops when the cap is reached.
    """
    dist = bfs_distances(target, length)
    if dist.get(start, length + 1) > length:
        return
    nodes = [0]

    def extend(word: str, point: OrbitPoint):
        nodes[0] += 1
        if max_nodes is not None and nodes[0] > max_nodes:
            raise _NodeBudget
        remaining = length - len(word)
        if remaining == 0:
            if point == target:
                yield word
            return
        last = word[-1] if word else ""
        for s in LETTERS:
            if word and (s == "a") == (last == "a"):
                continue
            nxt = step(point, s)
            if dist.get(nxt, length + 1) <= remaining - 1:
                yield from extend(word + s, nxt)

    try:
        yield from extend("", start)
    except _NodeBudget:
        return


def witness_of_length(seq: PointSequence, i: int, j: int, length: int,
                      max_nodes: int | None = None,
                      max_candidates: int | None = None) -> RectifiabilityWitness | None:
    """Shortlex-least witness among reduced words of exactly this length.

    With caps, None only means that no witness was found within them.
    """
    if i == j:
        raise ValueError("i and j must differ")
    for k, w in enumerate(transport_words(seq[i], seq[j], length, max_nodes)):
        if max_candidates is not None and k >= max_candidates:
            break
        found = certify(seq, i, j, GrigElement(w))
        if found is not None:
            return found
    return None


_LIFT = {"a": "aca", "b": "d", "c": "b", "d": "c"}
# sections (ca, ac): both swap the root, so no ray is fixed
_FIXED_POINT_FREE = "abab"


def _lift(word: str, bit: str) -> str:
    # a->aca, b->d, c->b, d->c maps w to (w', w) with w' in <a, d>
    lifted = "".join(_LIFT[s] for s in word)
    return reduce(lifted if bit == "1" else "a" + lifted + "a")


def supported_below(h: GrigElement, u: str) -> GrigElement | None:
    """Section of h at u if h fixes the path to u and is trivial off it."""
    word = h.word
    for bit in u:
        swap, left, right = word_sections(word)
        if swap:
            return None
        off = right if bit == "0" else left
        if not word_is_identity(off):
            return None
        word = left if bit == "0" else right
    return GrigElement(word)


def lift_h(u: str) -> GrigElement:
    """An element moving exactly the rays that start with u.

    Built by lifting abab down the tree; the result is verified exactly and
    its section at u swaps both children, so no ray below u is fixed.
    """
    word = _FIXED_POINT_FREE
    for bit in reversed(u):
        word = _lift(word, bit)
    h = GrigElement(word)
    section = supported_below(h, u)
    if section is None or section != GrigElement(_FIXED_POINT_FREE):
        raise AssertionError(f"lift for {u!r} failed verification")
    return h


def moves_level(g: GrigElement, depth: int) -> bool:
    """True if g fixes no vertex of the given level."""
    for bits in itertools.product("01", repeat=depth):
        w = "".join(bits)
        if g.act_prefix(w) == w:
            return False
    return True


def is_valid_h(h: GrigElement, u: str, inner_depth: int) -> bool:
    section = supported_below(h, u)
    return section is not None and moves_level(section, inner_depth)


def find_h(u: str, inner_depth: int, search_radius: int) -> GrigElement | None:
    """Shortlex-least h trivial off the subtree at u, fixing no vertex at
    relative depth ``inner_depth`` below u.  None if the radius is too small.
    """
    if not u:
        raise ValueError("u must be nonempty")
    for length in range(1, search_radius + 1):
        for w in reduced_words(length):
            h = GrigElement(w)
            if is_valid_h(h, u, inner_depth):
                return h
    return None


def check_rectifiable_pair(seq: PointSequence, i: int, j: int,
                           search_radius: int = 4096,
                           slack: int = 4,
                           max_fixups: int = 64,
                           max_nodes: int = 20_000,
                           max_candidates: int = 500) -> RectifiabilityWitness | None:
    """Find g with x_i g = x_j creating no other coincidence x_k g = x_l.

    Tries transport words of length d(x_i, x_j) up to d + slack first, each
    length explored within ``max_nodes`` search nodes and ``max_candidates``
    candidates.  If none qualifies, the shortlex-least geodesic transport is
    repaired by right multiplication with elements h_u that move exactly the
    rays below u: first to push a fixed tail off the sequence, then to
    destroy each spurious coincidence x_k -> x_l.  The total word length is
    capped by ``search_radius``.
    """
    if i == j:
        raise ValueError("i and j must differ")
    start, target = seq[i], seq[j]
    d = distance(start, target, search_radius)
    if d is None:
        return None
    for length in range(d, min(d + slack, search_radius) + 1):
        found = witness_of_length(seq, i, j, length, max_nodes, max_candidates)
        if found is not None:
            return found
    if seq.source != "designated":
        return None

    g = GrigElement(next(transport_words(start, target, d)))
    tail = tail_class(g)
    if tail.kind == "FixesTail":
        M = max(tail.horizon, i, j) + 1
        g = g * lift_h("0" * M)
        tail = tail_class(g)
    for _ in range(max_fixups):
        if len(g) > search_radius:
            return None
        found = certify(seq, i, j, g, tail)
        if found is not None:
            return found
        bad = sorted((k, ell) for k, ell in tail.exceptions.items() if k != i)
        if not bad:
            return None
        _, ell = bad[0]
        g = g * lift_h("0" * ell + "1")
        tail = tail_class(g)
    return None


def alt_rectifiable(seq: PointSequence, w: RectifiabilityWitness) -> bool:
    """The set-level reformulation: Sigma ∩ Sigma g ⊆ {x_j} ∪ Fix(g).

    For the designated sequence this is checked on the certified window
    (indices up to the tail horizon) together with the tail kind.
    """
    g = w.g
    if act_point(g, seq[w.i]) != seq[w.j]:
        return False
    if seq.source == "designated":
        tail = tail_class(g)
        window = range(tail.horizon + 1)
        members = {x(k) for k in window}
        for k in window:
            y = act_point(g, x(k))
            if y in members and y != x(w.j) and y != x(k):
                return False
            if y.designated_index is not None and y.designated_index > tail.horizon:
                return False
        return True
    members = set(seq.points)
    for p in seq.points:
        y = act_point(g, p)
        if y in members and y != seq[w.j] and y != p:
            return False
    return True


# -- parallelogram-free sequences ----------------------------------------


def is_parallelogram_free(z: OrbitPoint, gs: list[GrigElement]) -> bool:
    """No quadruple with i != j != k != l != i has z g_i^-1 g_j g_k^-1 g_l = z."""
    n = len(gs)
    inv = [g.inverse() for g in gs]
    after_i = [act_point(h, z) for h in inv]
    for i, j in itertools.product(range(n), repeat=2):
        if i == j:
            continue
        p = act_point(gs[j], after_i[i])
        for k in range(n):
            if k == j:
                continue
            q = act_point(inv[k], p)
            for ell in range(n):
                if ell == k or ell == i:
                    continue
                if act_point(gs[ell], q) == z:
                    return False
    return True


def _reachable(z: OrbitPoint, gs: list[GrigElement], r: int) -> set[OrbitPoint]:
    layer = {z}
    seen = {z}
    for _ in range(r):
        layer = {act_point(g, p) for p in layer for g in gs}
        seen |= layer
    seen.discard(z)
    return seen


def _ray_bits(p: OrbitPoint, n: int) -> str:
    return (p.prefix + "1" * n)[:n]


def separating_prefix(z: OrbitPoint, avoid) -> str:
    """Shortest nonempty prefix of the ray z that no point of ``avoid`` shares."""
    avoid = list(avoid)
    if z in avoid:
        raise ValueError("z must not be among the points to fix")
    n = 1
    while True:
        u = _ray_bits(z, n)
        if all(_ray_bits(y, n) != u for y in avoid):
            return u
        n += 1


def build_pf_sequence(z: OrbitPoint, count: int,
                      search_radius: int = 12,
                      fallback: bool = True) -> list[GrigElement]:
    """Iteratively choose g_i fixing X_i^3 pointwise and moving z.

    X_i^3 is the set of points z g_{j1} ... g_{js} with s <= 3 and all
    j < i, minus z.  Each g_i is the shortlex-least reduced word of minimal
    length up to ``search_radius``.  When that search fails and ``fallback``
    is set, g_i is ``lift_h(u)`` for the shortest prefix u of z shared by no
    point of X_i^3: it fixes every ray outside u and moves every ray below.
    """
    gs: list[GrigElement] = []
    for i in range(count):
        avoid = sorted(_reachable(z, gs, 3))
        chosen = None
        for length in range(1, search_radius + 1):
            for w in reduced_words(length):
                g = GrigElement(w)
                if act_point(g, z) == z:
                    continue
                if all(act_point(g, y) == y for y in avoid):
                    chosen = g
                    break
            if chosen is not None:
                break
        if chosen is None and fallback:
            chosen = lift_h(separating_prefix(z, avoid))
            if act_point(chosen, z) == z or any(act_point(chosen, y) != y for y in avoid):
                raise AssertionError("constructed fixator failed verification")
        if chosen is None:
            raise SearchExhausted(
                f"no element of length <= {search_radius} fixes X_{i}^3 "
                f"({len(avoid)} points) and moves {z}", index=i)
        gs.append(chosen)
    return gs


def derived_points(z: OrbitPoint, gs: list[GrigElement]) -> PointSequence:
    return PointSequence(tuple(act_point(g.inverse(), z) for g in gs))


def check_z_powers_rectifiable(k: int) -> bool:
    """2^j - 2^i = 2^l - 2^m only trivially, for exponents below k."""
    powers = [1 << e for e in range(k)]
    for i, j, m, ell in itertools.product(range(k), repeat=4):
        if powers[j] - powers[i] == powers[ell] - powers[m]:
            if not ((i == m and j == ell) or (i == j and m == ell)):
                return False
    return True
