import pytest

from grigrow.grig import GrigElement, tail_class
from grigrow.schreier import OrbitPoint, act_point, designated_distance, x
from grigrow.seqprop import (
    PointSequence,
    alt_rectifiable,
    build_pf_sequence,
    certify,
    check_locally_stabilizing,
    check_rectifiable_pair,
    check_spreading,
    check_z_powers_rectifiable,
    derived_points,
    is_parallelogram_free,
    lift_h,
    separating_prefix,
    supported_below,
    transport_words,
    witness_of_length,
)


def test_designated_sequence_is_spreading():
    seq = PointSequence.designated(10)
    for R in (1, 5, 20):
        N = check_spreading(seq, R)
        assert N is not None
        assert all(designated_distance(i, j) >= R
                   for i in range(N, 10) for j in range(N, 10) if i != j)


def test_designated_sequence_is_locally_stabilizing():
    seq = PointSequence.designated(9)
    assert check_locally_stabilizing(seq, 3) is not None


def test_points_must_be_distinct():
    with pytest.raises(ValueError):
        PointSequence((x(0), x(0)))


def test_transport_words_reach_target():
    words = list(transport_words(x(1), x(3), 4))
    assert words
    assert words == sorted(words)
    for w in words:
        assert act_point(GrigElement(w), x(1)) == x(3)


def test_transport_words_node_cap_stops_quietly():
    assert len(list(transport_words(x(4), x(7), 75, max_nodes=50))) <= 50


@pytest.mark.parametrize("u", ["0", "1", "01", "000", "0010"])
def test_lift_h_is_supported_below(u):
    h = lift_h(u)
    assert supported_below(h, u) is not None
    # moves every ray below u, fixes everything else
    assert act_point(h, OrbitPoint(u + "0")) != OrbitPoint(u + "0")
    other = ("1" if u[0] == "0" else "0") + "0"
    assert act_point(h, OrbitPoint(other)) == OrbitPoint(other)


def test_known_witness_is_certified():
    seq = PointSequence.designated(4)
    w = certify(seq, 0, 3, GrigElement("bababad"))
    assert w is not None and w.g.word == "bababad"
    assert certify(seq, 0, 1, GrigElement("a")) is None


def test_rectifiable_pairs_small():
    seq = PointSequence.designated(4)
    for i in range(4):
        for j in range(4):
            if i == j:
                continue
            w = check_rectifiable_pair(seq, i, j)
            assert w is not None
            assert act_point(w.g, x(i)) == x(j)
            assert tail_class(w.g).exceptions == {i: j}
            assert alt_rectifiable(seq, w)


def test_rectifiable_pair_far_apart():
    seq = PointSequence.designated(8)
    w = check_rectifiable_pair(seq, 4, 7)
    assert tail_class(w.g).exceptions == {4: 7}


def test_witness_of_length_exhaustive():
    seq = PointSequence.designated(4)
    assert witness_of_length(seq, 0, 1, 1) is None
    assert witness_of_length(seq, 0, 3, 7).g.word == "bababad"


def test_same_index_rejected():
    with pytest.raises(ValueError):
        check_rectifiable_pair(PointSequence.designated(3), 1, 1)


def test_parallelogram_free_sequence():
    z = x(0)
    gs = build_pf_sequence(z, 4)
    assert is_parallelogram_free(z, gs)
    seq = derived_points(z, gs)
    for i in range(4):
        for j in range(4):
            if i != j:
                assert check_rectifiable_pair(seq, i, j) is not None


def test_parallelogram_detected():
    # g and g^-1 = g give z g_i^-1 g_j g_k^-1 g_l = z for i=k, j=l
    z = x(0)
    assert not is_parallelogram_free(z, [GrigElement("a"), GrigElement("b"), GrigElement("a")])


def test_separating_prefix():
    assert separating_prefix(x(0), [x(1)]) == "1"
    assert separating_prefix(x(2), [x(0), x(1)]) == "00"


def test_z_powers():
    assert check_z_powers_rectifiable(10)
