import itertools
import random

import pytest

from grigrow.grig import (
    FIXES_TAIL,
    GrigElement,
    ONE,
    a,
    b,
    c,
    d,
    depth_bound,
    designated_image,
    reduce,
    reduced_words,
    sigma_endo,
    tail_class,
    word_is_identity,
)


def acts_trivially(word: str, depth: int) -> bool:
    g = GrigElement(word)
    return all(g.act_prefix(format(v, f"0{depth}b")) == format(v, f"0{depth}b")
               for v in range(1 << depth))


def test_generators_are_involutions():
    for s in (a, b, c, d):
        assert (s * s).is_identity()
        assert s != ONE


def test_klein_relations():
    assert b * c == d
    assert c * d == b
    assert GrigElement("bcd").is_identity()


@pytest.mark.parametrize("word,order", [("ad", 4), ("ac", 8), ("ab", 16)])
def test_orders_of_products(word, order):
    g = GrigElement(word)
    powers = [g ** k for k in range(1, order + 1)]
    assert powers[-1].is_identity()
    assert not any(p.is_identity() for p in powers[:-1])


def test_reduce_alternates():
    assert reduce("abba") == ""
    assert reduce("abcad") == "adad"
    for w in reduced_words(5):
        assert all((x == "a") != (y == "a") for x, y in zip(w, w[1:]))


def test_reduced_word_counts():
    # 3^floor(n/2) words start with a, 3^ceil(n/2) with one of b, c, d
    assert [sum(1 for _ in reduced_words(n)) for n in range(5)] == [1, 4, 6, 12, 18]


def test_word_problem_matches_level_action():
    # a word of length L is trivial iff it acts trivially on level depth_bound(L)
    rng = random.Random(1)
    for _ in range(300):
        w = "".join(rng.choice("abcd") for _ in range(rng.randint(0, 14)))
        r = reduce(w)
        assert word_is_identity(r) == acts_trivially(r, min(depth_bound(len(r)), 10))


def test_equality_and_hash_agree():
    g, h = GrigElement("adadadad"), GrigElement("")
    assert g == h and hash(g) == hash(h)
    assert GrigElement("abab" * 8) == ONE


def test_inverse():
    rng = random.Random(2)
    for _ in range(100):
        g = GrigElement("".join(rng.choice("abcd") for _ in range(rng.randint(0, 20))))
        assert (g * g.inverse()).is_identity()


def test_parse():
    assert GrigElement.parse("a b b a") == ONE
    assert GrigElement.parse(" a b a ") == GrigElement("aba")
    with pytest.raises(ValueError):
        GrigElement.parse("abx")


def test_sections_follow_recursion():
    assert b.sections() == (False, a, c)
    assert c.sections() == (False, a, d)
    assert d.sections() == (False, ONE, b)
    swap, _, _ = a.sections()
    assert swap


def test_sigma_endo_images():
    assert sigma_endo(a) == c
    assert sigma_endo(b) == GrigElement("ada")


def test_tail_class_matches_direct_action():
    rng = random.Random(3)
    for _ in range(500):
        g = GrigElement("".join(rng.choice("abcd") for _ in range(rng.randint(0, 24))))
        t = tail_class(g)
        for m in range(t.horizon + 12):
            ell = designated_image(g, m)
            if m in t.exceptions:
                assert ell == t.exceptions[m]
            elif m <= t.horizon:
                assert ell in (None, m)
            elif t.kind == FIXES_TAIL:
                assert ell == m
            else:
                assert ell is None


def test_tail_class_examples():
    assert tail_class(ONE).kind == FIXES_TAIL
    assert tail_class(a).exceptions == {0: 1, 1: 0}
    assert tail_class(d).exceptions == {}
