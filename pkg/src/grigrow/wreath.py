"""Restricted permutational wreath products B wr_X G.

An element is a pair (f, g) with f: X -> B finitely supported and g in G.
G acts on X on the right and on functions by (g.f)(x) = f(x g), which
gives the product

    (f1, g1)(f2, g2) = (x -> f1(x) f2(x g1), g1 g2).

Base groups and acting groups are small objects with explicit operations,
so the same arithmetic serves Z/2, Sym(3), the rationals or G itself.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Sequence

from .grig import GrigElement, portrait_key
from .schreier import ROOT, act_point

INF = None  # order of an element of infinite order


class BaseGroup:
    """A group given by explicit operations on hashable values."""

    name = "group"

    def identity(self) -> Any:
        raise NotImplementedError

    def mul(self, u, v):
        raise NotImplementedError

    def inv(self, u):
        raise NotImplementedError

    def key(self, u) -> Hashable:
        return u

    def eq(self, u, v) -> bool:
        return self.key(u) == self.key(v)

    def is_identity(self, u) -> bool:
        return self.eq(u, self.identity())

    def generators(self) -> list:
        raise NotImplementedError

    def order(self, u) -> int | None:
        """Order of u, or None when infinite."""
        raise NotImplementedError

    def power(self, u, n: int):
        if n < 0:
            u, n = self.inv(u), -n
        result = self.identity()
        while n:
            if n & 1:
                result = self.mul(result, u)
            u = self.mul(u, u)
            n >>= 1
        return result

    def random(self, rng: random.Random):
        raise NotImplementedError

    def fmt(self, u) -> str:
        return str(u)

    def __repr__(self) -> str:
        return self.name


class Integers(BaseGroup):
    name = "Z"

    def identity(self):
        return 0

    def mul(self, u, v):
        return u + v

    def inv(self, u):
        return -u

    def generators(self):
        return [1]

    def order(self, u):
        return 1 if u == 0 else INF

    def random(self, rng):
        return rng.randint(-20, 20)


class Cyclic(BaseGroup):
    def __init__(self, n: int):
        if n < 1:
            raise ValueError("modulus must be positive")
        self.n = n
        self.name = f"Z/{n}"

    def identity(self):
        return 0

    def mul(self, u, v):
        return (u + v) % self.n

    def inv(self, u):
        return -u % self.n

    def generators(self):
        return [1 % self.n]

    def order(self, u):
        return self.n // math.gcd(u, self.n)

    def random(self, rng):
        return rng.randrange(self.n)

    def __eq__(self, other):
        return isinstance(other, Cyclic) and other.n == self.n

    def __hash__(self):
        return hash(("Z/", self.n))


class Rationals(BaseGroup):
    name = "Q"

    def identity(self):
        return Fraction(0)

    def mul(self, u, v):
        return Fraction(u) + Fraction(v)

    def inv(self, u):
        return -Fraction(u)

    def key(self, u):
        return Fraction(u)

    def generators(self):
        # Q is not finitely generated; these are the ones used in examples
        return [Fraction(1), Fraction(1, 2), Fraction(1, 3)]

    def order(self, u):
        return 1 if u == 0 else INF

    def random(self, rng):
        return Fraction(rng.randint(-12, 12), rng.randint(1, 12))


class DirectProduct(BaseGroup):
    def __init__(self, *factors: BaseGroup):
        if not factors:
            raise ValueError("need at least one factor")
        self.factors = factors
        self.name = " x ".join(f.name for f in factors)

    def identity(self):
        return tuple(f.identity() for f in self.factors)

    def mul(self, u, v):
        return tuple(f.mul(p, q) for f, p, q in zip(self.factors, u, v))

    def inv(self, u):
        return tuple(f.inv(p) for f, p in zip(self.factors, u))

    def key(self, u):
        return tuple(f.key(p) for f, p in zip(self.factors, u))

    def generators(self):
        out = []
        for k, f in enumerate(self.factors):
            for s in f.generators():
                e = list(self.identity())
                e[k] = s
                out.append(tuple(e))
        return out

    def order(self, u):
        result = 1
        for f, p in zip(self.factors, u):
            o = f.order(p)
            if o is INF:
                return INF
            result = math.lcm(result, o)
        return result

    def random(self, rng):
        return tuple(f.random(rng) for f in self.factors)

    def fmt(self, u):
        return "(" + ",".join(f.fmt(p) for f, p in zip(self.factors, u)) + ")"


class Sym3(BaseGroup):
    """Permutations of {0, 1, 2} as image tuples, composed left to right."""

    name = "S3"

    def identity(self):
        return (0, 1, 2)

    def mul(self, u, v):
        # apply u first, then v
        return tuple(v[u[k]] for k in range(3))

    def inv(self, u):
        out = [0, 0, 0]
        for k, image in enumerate(u):
            out[image] = k
        return tuple(out)

    def generators(self):
        return [(1, 0, 2), (0, 2, 1)]

    def elements(self):
        return list(itertools.permutations(range(3)))

    def order(self, u):
        n, p = 1, u
        while p != (0, 1, 2):
            p = self.mul(p, u)
            n += 1
        return n

    def random(self, rng):
        return rng.choice(self.elements())

    def fmt(self, u):
        return "".join(map(str, u))


class GrigBase(BaseGroup):
    """G itself as a base group; keys are portraits to ``key_depth`` levels."""

    name = "Grig"

    def __init__(self, key_depth: int = 10):
        self.key_depth = key_depth

    def identity(self):
        return GrigElement("")

    def mul(self, u, v):
        return u * v

    def inv(self, u):
        return u.inverse()

    def key(self, u):
        return portrait_key(u.word, self.key_depth)

    def eq(self, u, v):
        return u == v

    def is_identity(self, u):
        return u.is_identity()

    def generators(self):
        return [GrigElement(s) for s in "abcd"]

    def order(self, u):
        # G is a 2-group; orders are powers of 2
        n, p = 1, u
        while not p.is_identity():
            p = p * p
            n *= 2
            if n > 1 << 20:
                raise RuntimeError(f"order of {u} not found")
        return n

    def random(self, rng):
        return GrigElement("".join(rng.choice("abcd") for _ in range(rng.randint(0, 12))))


BASES = {
    "z": Integers,
    "z2": lambda: Cyclic(2),
    "q": Rationals,
    "sym3": Sym3,
    "grig": GrigBase,
}


def base_by_name(name: str) -> BaseGroup:
    try:
        return BASES[name]()
    except KeyError:
        raise ValueError(f"unknown base group {name!r}; choose from {sorted(BASES)}")


# -- acting groups -------------------------------------------------------


class Action:
    """A group acting on the right on a set of hashable points."""

    def identity(self):
        raise NotImplementedError

    def mul(self, g, h):
        raise NotImplementedError

    def inv(self, g):
        raise NotImplementedError

    def act(self, p, g):
        raise NotImplementedError

    def key(self, g) -> Hashable:
        raise NotImplementedError

    def is_identity(self, g) -> bool:
        return self.key(g) == self.key(self.identity())

    def point_key(self, p) -> Hashable:
        return p

    def fmt(self, g) -> str:
        return str(g)

    def fmt_point(self, p) -> str:
        return str(p)


class GrigAction(Action):
    """G acting on the orbit of 1^oo.

    Keys are portraits to ``key_depth`` levels, which decide equality for
    words of length up to the matching bound; ``is_identity`` is always
    exact.
    """

    def __init__(self, key_depth: int = 10):
        self.key_depth = key_depth

    def identity(self):
        return GrigElement("")

    def mul(self, g, h):
        return g * h

    def inv(self, g):
        return g.inverse()

    def act(self, p, g):
        return act_point(g, p)

    def key(self, g):
        return portrait_key(g.word, self.key_depth)

    def is_identity(self, g):
        return g.is_identity()

    def point_key(self, p):
        return p.prefix

    def fmt_point(self, p):
        return p.prefix + "1^oo"


class CyclicAction(Action):
    """Z/n acting on itself by translation; t^k is stored as k."""

    def __init__(self, n: int):
        self.n = n

    def identity(self):
        return 0

    def mul(self, g, h):
        return (g + h) % self.n

    def inv(self, g):
        return -g % self.n

    def act(self, p, g):
        return (p + g) % self.n

    def key(self, g):
        return g % self.n

    def fmt(self, g):
        return f"t^{g}"

    def fmt_point(self, p):
        return f"t^{p}"


# -- elements ------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class WreathElement:
    """(f, g) with f stored as sorted (point, value) pairs, no identities."""

    support: tuple
    g: Any
    base: BaseGroup
    action: Action

    @classmethod
    def make(cls, base: BaseGroup, action: Action, f: dict | None = None,
             g=None) -> "WreathElement":
        f = f or {}
        pairs = [(p, v) for p, v in f.items() if not base.is_identity(v)]
        pairs.sort(key=lambda pv: action.point_key(pv[0]))
        return cls(tuple(pairs), action.identity() if g is None else g, base, action)

    def __call__(self, p):
        for q, v in self.support:
            if q == p:
                return v
        return self.base.identity()

    def as_dict(self) -> dict:
        return dict(self.support)

    def key(self) -> Hashable:
        return (
            tuple((self.action.point_key(p), self.base.key(v)) for p, v in self.support),
            self.action.key(self.g),
        )

    def is_identity(self) -> bool:
        return not self.support and self.action.is_identity(self.g)

    def __eq__(self, other):
        if not isinstance(other, WreathElement):
            return NotImplemented
        return (self.support_key() == other.support_key()
                and self.action.is_identity(self.action.mul(self.g, self.action.inv(other.g))))

    def support_key(self):
        return tuple((self.action.point_key(p), self.base.key(v)) for p, v in self.support)

    def __hash__(self):
        return hash(self.key())

    def __mul__(self, other):
        return w_mul(self, other)

    def __str__(self):
        body = ", ".join(
            f"{self.action.fmt_point(p)}:{self.base.fmt(v)}" for p, v in self.support)
        return "{" + body + " | " + self.action.fmt(self.g) + "}"


def _check_same(u: WreathElement, v: WreathElement) -> None:
    if u.base is not v.base and u.base != v.base:
        raise ValueError(f"base group mismatch: {u.base!r} vs {v.base!r}")


def w_mul(u: WreathElement, v: WreathElement) -> WreathElement:
    _check_same(u, v)
    base, action = u.base, u.action
    g1_inv = action.inv(u.g)
    f = dict(u.support)
    for p, val in v.support:
        # f2(x g1) contributes at x = p g1^-1
        q = action.act(p, g1_inv)
        f[q] = base.mul(f[q], val) if q in f else val
    return WreathElement.make(base, action, f, action.mul(u.g, v.g))


def w_inv(u: WreathElement) -> WreathElement:
    base, action = u.base, u.action
    # (x -> f(x g^-1)^-1, g^-1): the value at p moves to p g
    f = {action.act(p, u.g): base.inv(val) for p, val in u.support}
    return WreathElement.make(base, action, f, action.inv(u.g))


def w_identity(base: BaseGroup, action: Action) -> WreathElement:
    return WreathElement.make(base, action)


def w_pow(u: WreathElement, n: int) -> WreathElement:
    if n < 0:
        u, n = w_inv(u), -n
    result = w_identity(u.base, u.action)
    for _ in range(n):
        result = w_mul(result, u)
    return result


def pure(base: BaseGroup, action: Action, g) -> WreathElement:
    """The element (1, g)."""
    return WreathElement.make(base, action, None, g)


def delta(base: BaseGroup, action: Action, p, value) -> WreathElement:
    """The element (p -> value, 1)."""
    return WreathElement.make(base, action, {p: value})


def iota(base: BaseGroup, b, action: Action | None = None,
         point=None) -> WreathElement:
    """b placed at x_0 = 1^oo (or at ``point``), trivial group part."""
    action = action or GrigAction()
    return delta(base, action, ROOT if point is None else point, b)


def conjugate(u: WreathElement, h: WreathElement) -> WreathElement:
    """u^h = h^-1 u h."""
    return w_mul(w_mul(w_inv(h), u), h)


def commutator(u: WreathElement, v: WreathElement) -> WreathElement:
    """[u, v] = u^-1 v^-1 u v."""
    return w_mul(w_mul(w_inv(u), w_inv(v)), w_mul(u, v))


def evaluate_word(gens: Sequence[WreathElement], word: Sequence[tuple[int, int]],
                  identity: WreathElement) -> WreathElement:
    """Product of gens[k]^e over the (k, e) pairs of ``word``."""
    result = identity
    for k, e in word:
        result = w_mul(result, w_pow(gens[k], e))
    return result


__all__ = [
    "BaseGroup", "Integers", "Cyclic", "Rationals", "DirectProduct", "Sym3",
    "GrigBase", "base_by_name", "Action", "GrigAction", "CyclicAction",
    "WreathElement", "w_mul", "w_inv", "w_identity", "w_pow", "pure", "delta",
    "iota", "conjugate", "commutator", "evaluate_word",
]
