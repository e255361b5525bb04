import random

import pytest

from grigrow.grig import GrigElement, sigma_endo
from grigrow.schreier import (
    DISTANCE_SCHEMA,
    OrbitPoint,
    ROOT,
    act_point,
    ball,
    balls_equal,
    bfs_distances,
    designated_distance,
    designated_position,
    distance,
    distance_csv,
    neighbours,
    position,
    sigma_point,
    step,
    to_dot,
    x,
)


def random_point(rng, depth=10):
    g = GrigElement("".join(rng.choice("abcd") for _ in range(rng.randint(0, 40))))
    return act_point(g, ROOT)


def test_points_are_normalised():
    assert x(3).prefix == "000"
    with pytest.raises(ValueError):
        OrbitPoint("01")


def test_steps_are_involutions():
    rng = random.Random(0)
    for _ in range(100):
        p = random_point(rng)
        for s, q in neighbours(p):
            assert step(q, s) == p


def test_endpoint_has_three_loops():
    loops = [s for s, q in neighbours(ROOT) if q == ROOT]
    assert loops == ["b", "c", "d"]


@pytest.mark.parametrize("i", range(11))
def test_designated_position_closed_form(i):
    assert position(x(i), 2000) == designated_position(i)


def test_distances_are_position_gaps():
    for i in range(8):
        for j in range(8):
            assert distance(x(i), x(j), 200) == designated_distance(i, j)


def test_distance_none_beyond_cap():
    assert distance(x(0), x(6), 10) is None


def test_bfs_distances_triangle():
    dist = bfs_distances(x(4), 12)
    for p, dp in dist.items():
        for _, q in neighbours(p):
            if q in dist:
                assert abs(dist[q] - dp) <= 1


def test_balls_agree_below_position():
    for i in range(1, 6):
        for j in range(i + 1, 7):
            r = designated_position(i) - 1
            assert balls_equal(ball(x(i), r), ball(x(j), r))
            assert not balls_equal(ball(x(i), r + 1), ball(x(j), r + 1))


def test_ball_radius_mismatch():
    with pytest.raises(ValueError):
        balls_equal(ball(x(0), 1), ball(x(0), 2))


def test_sigma_point_prepends_zero():
    rng = random.Random(4)
    for _ in range(50):
        p = random_point(rng)
        assert sigma_point(p) == OrbitPoint("0" + p.prefix)


def test_sigma_equivariance():
    rng = random.Random(5)
    for _ in range(100):
        p = random_point(rng)
        g = GrigElement("".join(rng.choice("abcd") for _ in range(rng.randint(0, 10))))
        assert sigma_point(act_point(g, p)) == act_point(sigma_endo(g), sigma_point(p))


def test_outputs():
    text = to_dot(ball(x(2), 3))
    assert text.startswith("digraph ball {") and "doublecircle" in text
    csv_text = distance_csv([(0, 1, 1), (0, 9, None)])
    assert csv_text.splitlines()[0] == DISTANCE_SCHEMA
    assert csv_text.splitlines()[-1] == "0,9,"
