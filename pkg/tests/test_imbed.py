import random
from fractions import Fraction

import pytest

from grigrow.imbed import (
    G0_ONE,
    G_ONE,
    Phi,
    StepFunction,
    commutator_witness_B,
    commutator_witness_C,
    g0_inv,
    g0_mul,
    g0_pure,
    g_inv,
    g_mul,
    g_pure,
    is_balanced,
    phi0,
    phi0_is_homomorphism,
    psi_n,
    random_balanced_word,
    split_basis,
    sym3_two_gen_report,
    two_gen_imbed,
)
from grigrow.wreath import Integers, Sym3

Q = Fraction


def test_step_function_canonical():
    s = StepFunction.make([(Q(0), 1), (Q(1, 2), 1), (Q(3, 4), 2)])
    assert s.breaks == (Q(0), Q(3, 4))
    assert s(Q(7, 8)) == 2 and s(Q(1, 3)) == 1 and s(Q(5, 4)) == 1


def test_step_function_shift():
    s = StepFunction.make([(Q(0), 0), (Q(1, 2), 1)])
    t = s.shift(Q(1, 4))
    for r in (Q(0), Q(1, 8), Q(1, 4), Q(1, 2), Q(7, 8)):
        assert t(r) == s(r + Q(1, 4))


def test_step_function_rejects_bad_pieces():
    with pytest.raises(ValueError):
        StepFunction.make([(Q(1, 2), 0)])
    with pytest.raises(ValueError):
        StepFunction.make([(Q(0), 0), (Q(1), 1)])


def test_phi0_values():
    u = phi0(Q(3, 2))
    assert u.t_shift == Q(1, 2) and u.f_shift == 0
    # slot 0 of F is the identity, slot 1 the letter x
    assert u(Q(0), 0) == Q(3, 2)
    # phi(t, x) = -floor(t + b)
    assert u(Q(1, 4), 1) == -1 and u(Q(3, 4), 1) == -2


def test_phi0_homomorphism():
    rng = random.Random(0)
    for _ in range(50):
        b1 = Q(rng.randint(-30, 30), rng.randint(1, 9))
        b2 = Q(rng.randint(-30, 30), rng.randint(1, 9))
        assert phi0_is_homomorphism(b1, b2)
    assert phi0(0) == G0_ONE


def test_g0_group_laws():
    u, v = phi0(Q(2, 3)), g0_pure(Q(1, 5), 1)
    assert g0_mul(u, g0_inv(u)) == G0_ONE
    assert g0_mul(g0_mul(u, v), u) == g0_mul(u, g0_mul(v, u))


@pytest.mark.parametrize("b", [1, -1, 2, -2, 0, 5])
def test_integral_witness(b):
    assert commutator_witness_C(b).holds


def test_integral_witness_rejects_fraction():
    with pytest.raises(ValueError):
        commutator_witness_C(Q(1, 2))


@pytest.mark.parametrize("b", ["1/2", "1/3", "2/3", "5/6", "1", "-7/4"])
def test_rational_witness(b):
    n, w = commutator_witness_B(Q(b))
    assert n == Q(b).denominator
    assert w.holds


def test_rational_witness_bad_n():
    with pytest.raises(ValueError):
        commutator_witness_B(Q(1, 3), n=2)


def test_Phi_is_homomorphism():
    for b1, b2 in [(Q(1, 2), Q(1, 3)), (Q(-3, 4), Q(5, 6))]:
        assert g_mul(Phi(b1), Phi(b2)) == Phi(b1 + b2)
    assert g_mul(g_pure(Q(1, 3)), g_inv(g_pure(Q(1, 3)))) == G_ONE


def test_psi_n_at_one_is_phi():
    assert psi_n(Q(2), 1) == Phi(Q(2))


def test_split_basis():
    s = split_basis("Q + Z/5")
    assert s.torsion == "Q/Z + Z/5"
    assert len(s.basis) == 1
    with pytest.raises(ValueError):
        split_basis("R")


def test_two_gen_reports():
    for r in sym3_two_gen_report(10, seed=1):
        assert r.ok and r.support in ([], [1])


def test_two_gen_over_integers():
    base = Integers()
    word = [(0, 2), (1, -1), (0, -2), (1, 1)]
    r = two_gen_imbed(base, [1, 1], word)
    assert r.ok and r.value == 0


def test_unbalanced_word_rejected():
    with pytest.raises(ValueError):
        two_gen_imbed(Sym3(), Sym3().generators(), [(0, 1)])


def test_random_balanced_word():
    rng = random.Random(2)
    for _ in range(20):
        assert is_balanced(random_balanced_word(3, 4, rng), 3)
