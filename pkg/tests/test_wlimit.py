import random
from fractions import Fraction

import pytest

from grigrow.grig import GrigElement
from grigrow.schreier import x
from grigrow.seqprop import lift_h
from grigrow.wlimit import (
    LAZY_F,
    LAZY_ONE,
    Schedule,
    ScheduleError,
    SparseF,
    ball_agreement,
    broken_schedule,
    certify_point,
    choose_schedule,
    commutator_in_W,
    common_order,
    equalize_orders,
    first_disagreement,
    gap,
    lazy_commutator,
    lazy_conj,
    lazy_eq,
    lazy_inv,
    lazy_mul,
    lazy_to_wreath,
    lazy_word,
    stable_radius,
)
from grigrow.wreath import Cyclic, GrigAction, Integers, Sym3, pure, w_identity, w_mul

Q = Fraction
Z2 = Cyclic(2)
S3 = Sym3()
TRANSPOSITIONS = [(1, 0, 2), (0, 2, 1), (2, 1, 0)]


def test_schedule_round_trip():
    s = Schedule([5, 6, 7], [7, 8], [Q(3), Q(29, 10)])
    assert Schedule.from_json(s.to_json()) == s
    assert s.to_json()["schema_version"] == "grigrow.schedule.v1"
    with pytest.raises(ValueError):
        Schedule([3, 3], [1], [Q(2)])


def test_equalize_orders():
    base, vals = equalize_orders(Integers(), [1, 0])
    assert common_order(base, vals) is None
    base, vals = equalize_orders(Cyclic(6), [2, 3])
    assert common_order(base, vals) == 6


def test_point_conditions():
    assert gap(5) == 11 and stable_radius(5) == 20
    cert = certify_point(5, 7)
    assert cert["gap"] >= 7


def test_choose_schedule_z2():
    s = choose_schedule(Z2, [1, 1, 1], [3, Q(29, 10)], 2)
    assert s.n == [5, 6, 7] and s.m == [7, 8]


def test_choose_schedule_rejects_fast_growth():
    with pytest.raises(ScheduleError):
        choose_schedule(Z2, [1, 1, 1], [Q(5, 2), Q(12, 5)], 2)


def test_choose_schedule_validates_epsilon():
    with pytest.raises(ValueError):
        choose_schedule(Z2, [1, 1, 1], [2, 3], 2)


def test_ball_agreement_and_broken_schedule():
    s = Schedule([5, 6, 7], [7, 8], [Q(3), Q(29, 10)])
    assert ball_agreement(1, 7, s, Z2, [1, 1, 1])
    assert first_disagreement(1, broken_schedule(s), Z2, [1, 1, 1], 7) == 2


def test_lazy_matches_wreath_on_finite_f():
    f = SparseF.truncated(S3, [2, 4, 7], TRANSPOSITIONS, 3)
    action = GrigAction()
    fw = f.to_wreath(action)
    rng = random.Random(0)
    for _ in range(100):
        word = "".join(rng.choice("fabcd") for _ in range(rng.randint(0, 10)))
        acc = w_identity(S3, action)
        for ch in word:
            acc = w_mul(acc, fw if ch == "f" else pure(S3, action, GrigElement(ch)))
        assert lazy_to_wreath(lazy_word(word), f, action) == acc


def infinite_f():
    return SparseF(S3, {2: TRANSPOSITIONS[0], 4: TRANSPOSITIONS[1], 7: TRANSPOSITIONS[2]},
                   known_to=7, tail=lambda m: (1, 0, 2), tail_order=2)


def test_lazy_eq_basics():
    f = infinite_f()
    assert lazy_eq(lazy_mul(LAZY_F, LAZY_F), LAZY_ONE, f)
    assert not lazy_eq(LAZY_F, LAZY_ONE, f)
    u = lazy_word("fabfa")
    assert lazy_eq(lazy_mul(u, lazy_inv(u)), LAZY_ONE, f)


def test_lazy_eq_sees_the_tail():
    f = infinite_f()
    # d fixes every x_m, so conjugation by d leaves f alone
    assert lazy_eq(lazy_conj(LAZY_F, GrigElement("d")), LAZY_F, f)
    # h moves every x_m with m >= 10 off the sequence: f^h loses the tail
    h = lift_h("0" * 10)
    assert not lazy_eq(lazy_conj(LAZY_F, h), LAZY_F, f)
    # on a finitely supported f the same conjugate is equal
    finite = SparseF.truncated(S3, [2, 4, 7], TRANSPOSITIONS, 3)
    assert lazy_eq(lazy_conj(LAZY_F, h), LAZY_F, finite)


def test_commutators_in_W():
    f = infinite_f()
    for i, j in [(1, 2), (2, 1), (1, 3), (2, 2)]:
        r = commutator_in_W(i, j, f, [2, 4, 7])
        assert r.ok, r.detail
