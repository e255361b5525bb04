"""Property suites over fixed seeds (hypothesis is derandomised in conftest)."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from grigrow.grig import GrigElement, tail_class
from grigrow.growth import (
    concave_majorant,
    inverted_orbit,
    inverted_orbit_exact,
    inverted_orbit_sampled,
)
from grigrow.imbed import (
    G0_ONE,
    G_ONE,
    G0Element,
    GElement,
    StepFunction,
    g0_inv,
    g0_mul,
    g_inv,
    g_mul,
    phi0,
)
from grigrow.schreier import ROOT, OrbitPoint, act_point
from grigrow.wlimit import LAZY_ONE, SparseF, lazy_eq, lazy_inv, lazy_mul, lazy_word
from grigrow.wreath import (
    Cyclic,
    CyclicAction,
    GrigAction,
    Integers,
    Rationals,
    Sym3,
    WreathElement,
    w_identity,
    w_inv,
    w_mul,
)

words = st.text(alphabet="abcd", max_size=16)
grig = words.map(GrigElement)
points = st.text(alphabet="01", max_size=8).map(lambda s: OrbitPoint(s.rstrip("1")))
rationals = st.fractions(min_value=-6, max_value=6, max_denominator=8)
unit_rationals = st.fractions(min_value=0, max_value=Fraction(7, 8), max_denominator=8)

# -- group axioms ----------------------------------------------------------


@given(grig, grig, grig)
def test_grigorchuk_axioms(g, h, k):
    assert (g * h) * k == g * (h * k)
    assert (g * g.inverse()).is_identity()
    assert g * GrigElement("") == g


@pytest.mark.parametrize("base", [Integers(), Cyclic(6), Rationals(), Sym3()], ids=str)
@given(seed=st.integers(0, 10_000))
def test_base_axioms(base, seed):
    rng = random.Random(seed)
    u, v, w = base.random(rng), base.random(rng), base.random(rng)
    assert base.eq(base.mul(base.mul(u, v), w), base.mul(u, base.mul(v, w)))
    assert base.is_identity(base.mul(base.inv(u), u))
    assert base.eq(base.mul(base.identity(), u), u)


def wreath_elements(base_values):
    action = GrigAction()
    return st.builds(
        lambda f, g: WreathElement.make(base_values[0], action,
                                        {act_point(GrigElement(w), ROOT): v for w, v in f}, g),
        st.lists(st.tuples(st.text(alphabet="abcd", max_size=8), base_values[1]), max_size=3),
        grig,
    )


SYM3_VALUES = st.sampled_from([(0, 1, 2), (1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)])


@pytest.mark.parametrize("case", [(Sym3(), SYM3_VALUES), (Integers(), st.integers(-5, 5)),
                                  (Rationals(), rationals)], ids=["sym3", "z", "q"])
@settings(max_examples=60)
@given(data=st.data())
def test_wreath_axioms(case, data):
    u, v, w = (data.draw(wreath_elements(case)) for _ in range(3))
    assert w_mul(w_mul(u, v), w) == w_mul(u, w_mul(v, w))
    assert w_mul(u, w_inv(u)).is_identity()
    assert w_mul(w_identity(case[0], u.action), u) == u


@given(st.lists(st.tuples(st.integers(0, 7), st.integers(-3, 3)), max_size=4),
       st.lists(st.tuples(st.integers(0, 7), st.integers(-3, 3)), max_size=4),
       st.integers(0, 7), st.integers(0, 7))
def test_cyclic_wreath_axioms(f1, f2, g1, g2):
    base, action = Integers(), CyclicAction(8)
    u = WreathElement.make(base, action, dict(f1), g1)
    v = WreathElement.make(base, action, dict(f2), g2)
    assert w_mul(w_inv(w_mul(u, v)), w_mul(u, v)).is_identity()
    assert w_inv(w_mul(u, v)) == w_mul(w_inv(v), w_inv(u))


def g0_elements():
    def build(b, t, f, b2):
        return g0_mul(phi0(b), G0Element.make(phi0(b2).phi, t, f))
    return st.builds(build, rationals, unit_rationals, st.integers(0, 1), rationals)


@settings(max_examples=60)
@given(g0_elements(), g0_elements(), g0_elements())
def test_g0_axioms(u, v, w):
    assert g0_mul(g0_mul(u, v), w) == g0_mul(u, g0_mul(v, w))
    assert g0_mul(u, g0_inv(u)) == G0_ONE
    assert g0_mul(G0_ONE, u) == u


@settings(max_examples=25)
@given(st.lists(st.tuples(unit_rationals, g0_elements()), min_size=1, max_size=3),
       unit_rationals, st.lists(st.tuples(unit_rationals, g0_elements()), min_size=1, max_size=3),
       unit_rationals)
def test_g_axioms(p1, r1, p2, r2):
    def make(pieces, r):
        pieces = dict(pieces)
        pieces.setdefault(Fraction(0), G0_ONE)
        return GElement.make(StepFunction.make(list(pieces.items())), r)
    u, v = make(p1, r1), make(p2, r2)
    assert g_mul(u, g_inv(u)) == G_ONE
    assert g_inv(g_mul(u, v)) == g_mul(g_inv(v), g_inv(u))


# -- the right action ------------------------------------------------------


@given(grig, grig, points)
def test_right_action_law(g, h, p):
    assert act_point(g * h, p) == act_point(h, act_point(g, p))
    assert act_point(GrigElement(""), p) == p


@given(grig, points)
def test_action_is_invertible(g, p):
    assert act_point(g.inverse(), act_point(g, p)) == p


# -- lazy equality ---------------------------------------------------------

TRANSPOSITIONS = [(1, 0, 2), (0, 2, 1), (2, 1, 0)]
LAZY_WORDS = st.text(alphabet="fabcd", max_size=8)


def tail_f():
    return SparseF(Sym3(), {2: TRANSPOSITIONS[0], 4: TRANSPOSITIONS[1], 7: TRANSPOSITIONS[2]},
                   known_to=7, tail=lambda m: (1, 0, 2), tail_order=2)


def padded(word: str, pads: list[tuple[int, str]]) -> str:
    """Insert trivial pairs (ff, aa, bb, ...) without changing the element."""
    for pos, ch in pads:
        pos = pos % (len(word) + 1)
        word = word[:pos] + ch + ch + word[pos:]
    return word


pads = st.lists(st.tuples(st.integers(0, 20), st.sampled_from("fabcd")), max_size=3)


@settings(max_examples=40)
@given(LAZY_WORDS, pads, pads)
def test_lazy_eq_is_an_equivalence(word, p1, p2):
    f = tail_f()
    u = lazy_word(word)
    v = lazy_word(padded(word, p1))
    w = lazy_word(padded(padded(word, p1), p2))
    assert lazy_eq(u, u, f)
    assert lazy_eq(u, v, f) and lazy_eq(v, u, f)
    assert lazy_eq(v, w, f) and lazy_eq(u, w, f)


@settings(max_examples=40)
@given(LAZY_WORDS, LAZY_WORDS)
def test_lazy_eq_is_symmetric(w1, w2):
    f = tail_f()
    u, v = lazy_word(w1), lazy_word(w2)
    assert lazy_eq(u, v, f) == lazy_eq(v, u, f)
    assert lazy_eq(lazy_mul(u, lazy_inv(u)), LAZY_ONE, f)


# -- concave majorants -----------------------------------------------------


@given(st.lists(st.integers(1, 200), min_size=1, max_size=12))
def test_concave_majorant(values):
    table = dict(enumerate(values))
    hull = concave_majorant(table)
    for n, v in table.items():
        assert hull(n) >= v
    slopes = hull.slopes()
    assert all(s >= t for s, t in zip(slopes, slopes[1:]))
    # knots are data points, so the hull is the least concave majorant
    for kx, ky in hull.knots:
        assert table[int(kx)] == ky


# -- inverted orbits -------------------------------------------------------


@given(st.text(alphabet="abcd", max_size=14), st.sampled_from("abcd"))
def test_inverted_orbit_grows_by_appending(word, s):
    w = [GrigElement(ch) for ch in word]
    assert len(inverted_orbit(w + [GrigElement(s)])) >= len(inverted_orbit(w))


def test_exact_inverted_orbit_is_monotone():
    values = [inverted_orbit_exact(n)[0] for n in range(13)]
    assert values == sorted(values)


@settings(max_examples=20)
@given(st.integers(0, 12), st.integers(0, 1000))
def test_sampled_never_beats_exact(n, seed):
    assert inverted_orbit_sampled(n, 50, seed) <= inverted_orbit_exact(n)[0]
