"""Exact imbedding of B = Q (and Z) into derived subgroups.

Groups of functions with finitely many values are stored as step functions
on Q/Z = [0, 1) with rational breakpoints.  The construction:

    G0 = B wr (T x F)       T = Q/Z, F = Z/2 = {1, x}
    G  = G0 wr (Q/Z)

where "wr" keeps only functions with finitely many values.  B = Q is
written additively; G0 and G are not abelian.  Conventions: right
translation, (phi1, u1)(phi2, u2) = (y -> phi1(y) phi2(y u1), u1 u2), and
[u, v] = u^-1 v^-1 u v.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Sequence

from .wreath import (
    BaseGroup,
    CyclicAction,
    Sym3,
    WreathElement,
    conjugate,
    pure,
    w_identity,
    w_mul,
    w_pow,
)

Q = Fraction


def frac(r) -> Fraction:
    r = Fraction(r)
    return r - math.floor(r)


def fmt_q(r: Fraction) -> str:
    r = Fraction(r)
    return f"{r.numerator}/{r.denominator}"


# -- step functions on [0, 1) ---------------------------------------------


@dataclass(frozen=True)
class StepFunction:
    """values[k] holds on [breaks[k], breaks[k+1]), the last piece up to 1.

    breaks[0] == 0 and adjacent values differ, so equal functions have
    equal representations.
    """

    breaks: tuple[Fraction, ...]
    values: tuple

    @classmethod
    def make(cls, pieces: Sequence[tuple[Fraction, Any]]) -> "StepFunction":
        pieces = sorted(((Fraction(r), v) for r, v in pieces), key=lambda rv: rv[0])
        if not pieces or pieces[0][0] != 0:
            raise ValueError("a piece must start at 0")
        breaks, values = [], []
        for r, v in pieces:
            if not 0 <= r < 1:
                raise ValueError(f"breakpoint {r} outside [0, 1)")
            if breaks and r == breaks[-1]:
                raise ValueError(f"repeated breakpoint {r}")
            if values and values[-1] == v:
                continue
            breaks.append(r)
            values.append(v)
        return cls(tuple(breaks), tuple(values))

    @classmethod
    def constant(cls, value) -> "StepFunction":
        return cls((Fraction(0),), (value,))

    def __call__(self, r) -> Any:
        r = frac(r)
        lo, hi = 0, len(self.breaks)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.breaks[mid] <= r:
                lo = mid
            else:
                hi = mid
        return self.values[lo]

    def shift(self, delta) -> "StepFunction":
        """r -> self(r + delta mod 1)."""
        delta = frac(delta)
        if delta == 0:
            return self
        points = {frac(r - delta) for r in self.breaks} | {Fraction(0)}
        return StepFunction.make([(p, self(p + delta)) for p in points])

    def combine(self, other: "StepFunction", op: Callable[[Any, Any], Any]) -> "StepFunction":
        points = set(self.breaks) | set(other.breaks)
        return StepFunction.make([(p, op(self(p), other(p))) for p in points])

    def map(self, fn: Callable[[Any], Any]) -> "StepFunction":
        return StepFunction.make([(p, fn(v)) for p, v in zip(self.breaks, self.values)])

    def distinct_values(self) -> set:
        return set(self.values)

    def sample_points(self) -> list[Fraction]:
        """A point inside every piece (its midpoint)."""
        ends = list(self.breaks[1:]) + [Fraction(1)]
        return [(lo + hi) / 2 for lo, hi in zip(self.breaks, ends)]

    def to_json(self, value_json: Callable[[Any], Any] = None) -> dict:
        value_json = value_json or (lambda v: fmt_q(v) if isinstance(v, (Fraction, int)) else v)
        return {
            "breaks": [fmt_q(r) for r in self.breaks],
            "values": [value_json(v) for v in self.values],
        }


def step_shift(s: StepFunction, delta) -> StepFunction:
    return s.shift(delta)


# -- G0 = Q wr (T x F) ---------------------------------------------------

F_ORDER = 2  # F = Z/2; its nontrivial element is the basis letter x


@dataclass(frozen=True)
class G0Element:
    """(phi, t, f): phi[f] is the step function t -> phi(t, f)."""

    phi: tuple[StepFunction, ...]
    t_shift: Fraction = Fraction(0)
    f_shift: int = 0

    @classmethod
    def make(cls, phi: Sequence[StepFunction], t_shift=0, f_shift=0) -> "G0Element":
        if len(phi) != F_ORDER:
            raise ValueError(f"need one step function per element of F ({F_ORDER})")
        return cls(tuple(phi), frac(t_shift), f_shift % F_ORDER)

    def __call__(self, t, f: int) -> Fraction:
        return self.phi[f % F_ORDER](t)

    def __mul__(self, other: "G0Element") -> "G0Element":
        return g0_mul(self, other)

    def to_json(self) -> dict:
        return {
            "phi": [s.to_json() for s in self.phi],
            "t": fmt_q(self.t_shift),
            "f": self.f_shift,
        }


G0_ONE = G0Element.make([StepFunction.constant(Fraction(0))] * F_ORDER)


def g0_mul(u: G0Element, v: G0Element) -> G0Element:
    phi = []
    for f in range(F_ORDER):
        moved = v.phi[(f + u.f_shift) % F_ORDER].shift(u.t_shift)
        phi.append(u.phi[f].combine(moved, lambda p, q: p + q))
    return G0Element.make(phi, u.t_shift + v.t_shift, u.f_shift + v.f_shift)


def g0_inv(u: G0Element) -> G0Element:
    # (phi, s)^-1 = (y -> -phi(y s^-1), s^-1)
    phi = []
    for f in range(F_ORDER):
        src = u.phi[(f - u.f_shift) % F_ORDER].shift(-u.t_shift)
        phi.append(src.map(lambda p: -p))
    return G0Element.make(phi, -u.t_shift, -u.f_shift)


def g0_pow(u: G0Element, n: int) -> G0Element:
    if n < 0:
        u, n = g0_inv(u), -n
    result = G0_ONE
    base = u
    while n:
        if n & 1:
            result = g0_mul(result, base)
        base = g0_mul(base, base)
        n >>= 1
    return result


def g0_commutator(u: G0Element, v: G0Element) -> G0Element:
    return g0_mul(g0_mul(g0_inv(u), g0_inv(v)), g0_mul(u, v))


def g0_pure(t_shift=0, f_shift=0) -> G0Element:
    return G0Element.make(G0_ONE.phi, t_shift, f_shift)


# -- the splitting C <= B -----------------------------------------------


@dataclass(frozen=True)
class Splitting:
    """C contains [B, B], B/C is torsion, C/[B, B] is free on ``basis``."""

    descriptor: str
    c_generators: tuple[str, ...]
    basis: tuple[str, ...]
    torsion: str

    def section(self, t) -> Fraction:
        """sigma: T -> B, the representative in [0, 1) for T = Q/Z."""
        if self.torsion == "Q/Z":
            return frac(t)
        raise NotImplementedError(f"no section implemented for T = {self.torsion}")


def split_basis(descriptor: str) -> Splitting:
    """Splitting for direct sums of Z, Q and Z/n, written like "Q + Z/5"."""
    c_gens, basis, torsion = [], [], []
    terms = [term.strip() for term in descriptor.split("+")]
    for k, term in enumerate(terms):
        name = term if len(terms) == 1 else f"{term}[{k}]"
        if term in ("Z", "Q"):
            c_gens.append(f"1 in {name}")
            basis.append(f"1 in {name}")
            if term == "Q":
                torsion.append("Q/Z")
        elif term.startswith("Z/"):
            n = int(term[2:])
            if n < 1:
                raise ValueError(f"bad modulus in {term!r}")
            torsion.append(term)
        else:
            raise ValueError(f"unsupported factor {term!r}; use Z, Q or Z/n")
    return Splitting(descriptor, tuple(c_gens), tuple(basis),
                     " + ".join(torsion) if torsion else "0")


QSPLIT = split_basis("Q")


def theta(c: Fraction) -> Fraction:
    """theta_x on C = Z: b_x = 1 goes to its inverse."""
    c = Fraction(c)
    if c.denominator != 1:
        raise ValueError(f"{c} is not in C = Z")
    return -c


def phi0(b) -> G0Element:
    """Phi_0(b) = (phi, pi(b), 1) with phi(t, 1) = b and
    phi(t, x) = theta(sigma(t) + b - sigma(t + pi(b))) = -floor(t + b)."""
    b = Fraction(b)
    fb = frac(b)
    on_one = StepFunction.constant(b)
    # t + b crosses an integer at t = 1 - frac(b)
    low = theta(QSPLIT.section(0) + b - QSPLIT.section(fb))
    pieces = [(Fraction(0), low)]
    if fb != 0:
        cut = 1 - fb
        pieces.append((cut, theta(QSPLIT.section(cut) + b - QSPLIT.section(cut + fb))))
    on_x = StepFunction.make(pieces)
    return G0Element.make([on_one, on_x], fb, 0)


def phi0_is_homomorphism(b1, b2) -> bool:
    return g0_mul(phi0(b1), phi0(b2)) == phi0(Fraction(b1) + Fraction(b2))


@dataclass(frozen=True)
class CommutatorWitness:
    u: Any
    g: Any
    target: Any
    holds: bool


def commutator_witness_C(b) -> CommutatorWitness:
    """Phi_0(b) = [(1, 0, x), (psi, 0, 1)] with psi(t, 1) = b, else 0."""
    b = Fraction(b)
    if b.denominator != 1:
        raise ValueError(f"{b} is not in C = Z")
    u = g0_pure(0, 1)  # x = x^-1 in F = Z/2
    g = G0Element.make([StepFunction.constant(b), StepFunction.constant(Fraction(0))])
    target = phi0(b)
    return CommutatorWitness(u, g, target, g0_commutator(u, g) == target)


# -- G = G0 wr (Q/Z) -----------------------------------------------------


@dataclass(frozen=True)
class GElement:
    psi: StepFunction  # values are G0Element
    r_shift: Fraction = Fraction(0)

    @classmethod
    def make(cls, psi: StepFunction, r_shift=0) -> "GElement":
        return cls(psi, frac(r_shift))

    def __mul__(self, other: "GElement") -> "GElement":
        return g_mul(self, other)

    def to_json(self) -> dict:
        return {"psi": self.psi.to_json(lambda v: v.to_json()), "r": fmt_q(self.r_shift)}


G_ONE = GElement.make(StepFunction.constant(G0_ONE))


def g_mul(u: GElement, v: GElement) -> GElement:
    return GElement.make(u.psi.combine(v.psi.shift(u.r_shift), g0_mul),
                         u.r_shift + v.r_shift)


def g_inv(u: GElement) -> GElement:
    return GElement.make(u.psi.shift(-u.r_shift).map(g0_inv), -u.r_shift)


def g_commutator(u: GElement, v: GElement) -> GElement:
    return g_mul(g_mul(g_inv(u), g_inv(v)), g_mul(u, v))


def g_pure(r) -> GElement:
    return GElement.make(G_ONE.psi, r)


def Phi(b) -> GElement:
    return GElement.make(StepFunction.constant(phi0(b)))


def psi_n(b, n: int) -> GElement:
    """Phi_0(b) on [0, 1/n), trivial elsewhere."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return Phi(b)
    return GElement.make(StepFunction.make([(Fraction(0), phi0(b)),
                                            (Fraction(1, n), G0_ONE)]))


def order_multiplier(b) -> int:
    """Least n with n b in C = Z."""
    return Fraction(b).denominator


def commutator_witness_B(b, n: int | None = None) -> tuple[int, CommutatorWitness]:
    """Phi(b) = [(1, 1/n), g] * Psi_n(n b) with g(r) = Phi_0(b)^floor(r n)."""
    b = Fraction(b)
    if n is None:
        n = order_multiplier(b)
    if n < 1 or (n * b).denominator != 1:
        raise ValueError(f"n = {n} does not bring {b} into C = Z")
    h = phi0(b)
    g = GElement.make(StepFunction.make(
        [(Fraction(k, n), g0_pow(h, k)) for k in range(n)]))
    u = g_pure(Fraction(1, n))
    lhs = g_mul(g_commutator(u, g), psi_n(n * b, n))
    return n, CommutatorWitness(u, g, Phi(b), lhs == Phi(b))


def g0_distinct_values(u: G0Element) -> int:
    return len(set().union(*(s.distinct_values() for s in u.phi)))


# -- two generators ------------------------------------------------------


@dataclass
class TwoGenReport:
    n_generators: int
    modulus: int
    word: list[tuple[int, int]]
    value: Any
    expected: Any
    support: list[int]
    ok: bool

    def to_json(self, base: BaseGroup) -> dict:
        return {
            "generators": self.n_generators,
            "modulus": self.modulus,
            "word": [[k, e] for k, e in self.word],
            "support": [f"t^{p}" for p in self.support],
            "value": base.fmt(self.value),
            "expected": base.fmt(self.expected),
            "ok": self.ok,
        }


def is_balanced(word: Sequence[tuple[int, int]], n: int) -> bool:
    sums = [0] * n
    for k, e in word:
        sums[k] += e
    return not any(sums)


def two_gen_imbed(base: BaseGroup, gens: Sequence, word: Sequence[tuple[int, int]]) -> TwoGenReport:
    """Realise a balanced word over s_1..s_n inside <x, t> <= W wr C.

    C = Z/2^n; x(t^(2^(i-1))) = s_i; each s_i becomes x conjugated by
    t^(1 - 2^(i-1)), and the resulting product is checked to be supported
    at t with value w.  Letters are (generator index from 0, exponent).
    """
    n = len(gens)
    if n == 0:
        raise ValueError("need at least one generator")
    for k, _ in word:
        if not 0 <= k < n:
            raise ValueError(f"generator index {k} out of range")
    if not is_balanced(word, n):
        raise ValueError("word is not balanced")
    modulus = 1 << n
    action = CyclicAction(modulus)
    xfun = WreathElement.make(base, action, {(1 << i) % modulus: s for i, s in enumerate(gens)})
    bars = [conjugate(xfun, pure(base, action, (1 - (1 << i)) % modulus)) for i in range(n)]
    result = w_identity(base, action)
    expected = base.identity()
    for k, e in word:
        result = w_mul(result, w_pow(bars[k], e))
        expected = base.mul(expected, base.power(gens[k], e))
    support = sorted(p for p, _ in result.support)
    value = result(1)
    ok = (action.is_identity(result.g) and set(support) <= {1}
          and base.eq(value, expected))
    return TwoGenReport(n, modulus, list(word), value, expected, support, ok)


def random_balanced_word(n: int, pairs: int, rng: random.Random) -> list[tuple[int, int]]:
    letters = []
    for _ in range(pairs):
        k = rng.randrange(n)
        e = rng.choice((1, -1))
        letters += [(k, e), (k, -e)]
    rng.shuffle(letters)
    return letters


def sym3_two_gen_report(count: int, seed: int, pairs: int = 4) -> list[TwoGenReport]:
    base = Sym3()
    rng = random.Random(seed)
    gens = base.generators()
    return [two_gen_imbed(base, gens, random_balanced_word(len(gens), pairs, rng))
            for _ in range(count)]


__all__ = [
    "StepFunction", "step_shift", "G0Element", "GElement", "G0_ONE", "G_ONE",
    "g0_mul", "g0_inv", "g0_pow", "g0_commutator", "g0_pure", "g_mul", "g_inv",
    "g_commutator", "g_pure", "phi0", "Phi", "psi_n", "phi0_is_homomorphism",
    "commutator_witness_C", "commutator_witness_B", "split_basis", "Splitting",
    "two_gen_imbed", "is_balanced", "random_balanced_word",
]
