"""The orbit X = 1^oo G as a labelled Schreier graph.

A point of X is a ray ``prefix + 1^oo``; the prefix is stored without
trailing 1s so the encoding is unique.  Edges are labelled by the four
generators, each of which is an involution, so the graph is undirected.
"""

from __future__ import annotations

import csv
import io
from collections import deque
from dataclasses import dataclass, field

from .grig import LETTERS, GrigElement, sigma_endo  # noqa: F401  (re-export)


@dataclass(frozen=True, order=True)
class OrbitPoint:
    prefix: str = ""

    def __post_init__(self) -> None:
        if set(self.prefix) - {"0", "1"}:
            raise ValueError(f"prefix must be binary: {self.prefix!r}")
        if self.prefix.endswith("1"):
            raise ValueError("prefix must not end in 1; use OrbitPoint.from_ray")

    @classmethod
    def from_ray(cls, prefix: str) -> "OrbitPoint":
        return cls(prefix.rstrip("1"))

    @property
    def designated_index(self) -> int | None:
        """i when this is x_i = 0^i 1^oo."""
        if "1" in self.prefix:
            return None
        return len(self.prefix)

    def __str__(self) -> str:
        return f"{self.prefix}1^oo"


ROOT = OrbitPoint("")


def x(i: int) -> OrbitPoint:
    """The designated point x_i = 0^i 1^oo."""
    if i < 0:
        raise ValueError("index must be nonnegative")
    return OrbitPoint("0" * i)


_NEXT = {"b": "c", "c": "d", "d": "b"}


def step(p: OrbitPoint, s: str) -> OrbitPoint:
    """p * s for a single generator s; exact on the infinite ray."""
    bits = list(p.prefix)
    if s == "a":
        if bits:
            bits[0] = "1" if bits[0] == "0" else "0"
        else:
            bits = ["0"]
    else:
        state = s
        k = 0
        while k < len(bits):
            if bits[k] == "0":
                if state != "d":
                    if k + 1 < len(bits):
                        bits[k + 1] = "1" if bits[k + 1] == "0" else "0"
                    else:
                        # the next letter comes from the 1^oo tail
                        bits.append("0")
                break
            state = _NEXT[state]
            k += 1
        # running into the 1^oo tail: b, c, d all fix 1^oo
    return OrbitPoint("".join(bits).rstrip("1"))


def act_point(g: GrigElement, p: OrbitPoint) -> OrbitPoint:
    for s in g.word:
        p = step(p, s)
    return p


def neighbours(p: OrbitPoint) -> list[tuple[str, OrbitPoint]]:
    return [(s, step(p, s)) for s in LETTERS]


def sigma_point(p: OrbitPoint) -> OrbitPoint:
    """The doubling self-map x -> 0x."""
    return OrbitPoint("0" + p.prefix)


def distance(p: OrbitPoint, q: OrbitPoint, r_max: int) -> int | None:
    """Graph distance, or None when it exceeds ``r_max``."""
    if r_max < 0:
        raise ValueError("r_max must be nonnegative")
    if p == q:
        return 0
    seen = [{p: 0}, {q: 0}]
    frontier = [[p], [q]]
    side = 0
    radius = [0, 0]
    while frontier[0] and frontier[1]:
        # grow the smaller frontier
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        if radius[0] + radius[1] >= r_max:
            return None
        radius[side] += 1
        nxt = []
        mine, other = seen[side], seen[1 - side]
        for v in frontier[side]:
            for _, w in neighbours(v):
                if w in mine:
                    continue
                mine[w] = radius[side]
                if w in other:
                    total = radius[side] + other[w]
                    return total if total <= r_max else None
                nxt.append(w)
        frontier[side] = nxt
    return None


def bfs_distances(center: OrbitPoint, radius: int) -> dict[OrbitPoint, int]:
    dist = {center: 0}
    queue = deque([center])
    while queue:
        v = queue.popleft()
        if dist[v] == radius:
            continue
        for _, w in neighbours(v):
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


@dataclass(frozen=True)
class MarkedBall:
    center: OrbitPoint
    radius: int
    vertices: tuple[OrbitPoint, ...]
    edges: frozenset[tuple[OrbitPoint, str, OrbitPoint]]
    dist: dict[OrbitPoint, int] = field(compare=False, repr=False)

    def normal_form(self) -> tuple:
        """Encoding of the rooted labelled graph independent of vertex names.

        Vertices are numbered in order of discovery by a BFS from the center
        that scans edges in label order; since every vertex has exactly one
        outgoing edge per label, this numbering is canonical.
        """
        adjacency: dict[OrbitPoint, dict[str, OrbitPoint]] = {}
        for u, s, v in self.edges:
            adjacency.setdefault(u, {})[s] = v
        index = {self.center: 0}
        order = [self.center]
        code = []
        k = 0
        while k < len(order):
            u = order[k]
            for s in LETTERS:
                v = adjacency.get(u, {}).get(s)
                if v is None:
                    code.append((k, s, -1))
                    continue
                if v not in index:
                    index[v] = len(order)
                    order.append(v)
                code.append((k, s, index[v]))
            k += 1
        return tuple(code)


def ball(center: OrbitPoint, radius: int) -> MarkedBall:
    """Vertices within ``radius`` of the center and all edges between them."""
    dist = bfs_distances(center, radius)
    vertices = tuple(sorted(dist, key=lambda v: (dist[v], v.prefix)))
    edges = set()
    for v in vertices:
        for s, w in neighbours(v):
            if w in dist:
                edges.add((v, s, w))
    return MarkedBall(center, radius, vertices, frozenset(edges), dist)


def balls_equal(b1: MarkedBall, b2: MarkedBall) -> bool:
    if b1.radius != b2.radius:
        raise ValueError(f"radius mismatch: {b1.radius} != {b2.radius}")
    return b1.normal_form() == b2.normal_form()


ENDPOINT = ROOT


def position(p: OrbitPoint, r_max: int) -> int:
    """Coordinate of p along the half-line: its distance from the endpoint.

    The endpoint is 1^oo, the only vertex with three loops.  Raises
    LookupError when p is farther than ``r_max``.
    """
    dist = distance(ENDPOINT, p, r_max)
    if dist is None:
        raise LookupError(f"{p} is not within {r_max} of the endpoint")
    return dist


def designated_position(i: int) -> int:
    """Closed form floor(2^(i+1) / 3) for the position of x_i.

    Checked against BFS in the test-suite; see ``position`` for the
    definition.
    """
    return (1 << (i + 1)) // 3


def designated_distance(i: int, j: int) -> int:
    return abs(designated_position(i) - designated_position(j))


def to_dot(b: MarkedBall) -> str:
    lines = ["digraph ball {", f'  // center {b.center} radius {b.radius}']
    names = {v: f"v{k}" for k, v in enumerate(b.vertices)}
    for v in b.vertices:
        shape = "doublecircle" if v == b.center else "circle"
        lines.append(f'  {names[v]} [label="{v.prefix or "-"}", shape={shape}];')
    for u, s, v in sorted(b.edges, key=lambda e: (e[0].prefix, e[1], e[2].prefix)):
        # involutions: draw each undirected edge once, loops included
        if v.prefix < u.prefix:
            continue
        lines.append(f'  {names[u]} -> {names[v]} [label="{s}", dir=none];')
    lines.append("}")
    return "\n".join(lines) + "\n"


DISTANCE_SCHEMA = "# schema: grigrow.distance.v1"


def distance_csv(rows: list[tuple[int, int, int | None]]) -> str:
    out = io.StringIO()
    out.write(DISTANCE_SCHEMA + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["i", "j", "d"])
    for i, j, dd in rows:
        writer.writerow([i, j, "" if dd is None else dd])
    return out.getvalue()
