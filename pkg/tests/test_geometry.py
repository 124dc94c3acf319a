import numpy as np
import pytest
from hypothesis import given, strategies as st

from lpplab.errors import ParameterError
from lpplab.geometry import (DownRightPath, Rect, antidiagonal_path, is_up_right, l_shaped,
                             lattice_paths, path_steps, random_down_right, reachable_contains)


def test_steps_single_vertex():
    assert path_steps(DownRightPath((2, 3))) == (set(), set())


def test_steps_l_shape():
    nu = DownRightPath.from_vertices([(0, 1), (0, 0), (1, 0), (2, 0)])
    assert path_steps(nu) == ({2, 3}, {2})


def test_steps_all_right():
    assert path_steps(DownRightPath((0, 0), "RRR")) == ({1, 2, 3}, set())


def test_l_shaped_examples():
    assert l_shaped(0, 0, 2, 1).vertices == ((0, 1), (0, 0), (1, 0), (2, 0))
    assert l_shaped(0, 0, 2, 1).base_vertex == (0, 0)
    assert len(l_shaped(3, 4, 3, 4)) == 1
    for m, n in [(1, 1), (5, 2), (0, 7)]:
        assert len(l_shaped(0, 0, m, n)) == m + n + 1
    with pytest.raises(ParameterError):
        l_shaped(3, 0, 2, 1)


def test_reachable():
    nu = DownRightPath((1, 4), "RDDRRD", 2)
    for v in nu.vertices:
        assert reachable_contains(nu, v)
    # one step up and right of a path vertex, still inside the frame
    assert reachable_contains(nu, (2, 3))
    assert not reachable_contains(nu, (nu.last[0] + 1, 2))
    assert not reachable_contains(nu, (0, 4))


def test_parse():
    nu = DownRightPath.parse("0,3:DRRD@2")
    assert nu.vertices == ((0, 3), (0, 2), (1, 2), (2, 2), (2, 1))
    assert nu.base == 2
    assert DownRightPath.parse("4,0:").base == 1
    for bad in ["0,3:DXR", "0,1:DD", "1,1:R@5", "garbage"]:
        with pytest.raises(ParameterError):
            DownRightPath.parse(bad)


def test_rect():
    r = Rect(1, 2, 3, 5)
    assert r.shape == (3, 4)
    assert r.contains((3, 5)) and not r.contains((0, 2))
    with pytest.raises(ParameterError):
        Rect(2, 0, 1, 0)


def test_antidiagonal():
    nu = antidiagonal_path(3, 1)
    assert len(nu) == 7
    assert nu.base_vertex == (1, 2)
    assert all(i + j in (2, 3) for i, j in nu.vertices)


def test_column_ranges():
    nu = DownRightPath((0, 3), "DRDDR")
    assert nu.column_ranges() == [(0, 2, 3, 0), (1, 0, 2, 2), (2, 0, 0, 5)]


def test_lattice_paths_count():
    from math import comb
    assert sum(1 for _ in lattice_paths((0, 0), (3, 2))) == comb(5, 2)
    assert all(is_up_right(p) for p in lattice_paths((1, 1), (3, 3)))


paths = st.builds(lambda i, j, s, b: DownRightPath((i, j + s.count("D")), s,
                                                   1 + b % (len(s) + 1)),
                  st.integers(0, 10), st.integers(0, 10),
                  st.text(alphabet="RD", max_size=20), st.integers(0, 100))


@given(paths)
def test_step_count_identity(nu):
    R, D = path_steps(nu)
    assert len(R) + len(D) == len(nu) - 1
    assert R <= set(range(1, len(nu))) and D <= set(range(2, len(nu) + 1))


@given(paths)
def test_parse_round_trip(nu):
    back = DownRightPath.parse(str(nu))
    assert back == nu and back.vertices == nu.vertices


@given(st.integers(0, 2 ** 32 - 1))
def test_random_path_in_box(seed):
    nu = random_down_right(np.random.default_rng(seed), 6, 5)
    assert all(0 <= i <= 6 and 0 <= j <= 5 for i, j in nu.vertices)
    assert 1 <= nu.base <= len(nu)
