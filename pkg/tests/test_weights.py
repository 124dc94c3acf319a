import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lpplab.errors import ParameterError
from lpplab.geometry import DownRightPath, Rect, path_steps, random_down_right
from lpplab.noise import NoiseField, generate_noise
from lpplab.stats import ks_exponential
from lpplab.weights import (BulkOnly, Mixed, Northeast, PathInduced, TwoParam, build_weights,
                            path_coefficients, recipe_from_config)


def const_noise(shape, value=1.0):
    return NoiseField(0, 0, Rect(0, 0, shape[0] - 1, shape[1] - 1), np.full(shape, value))


def test_two_param_horizontal():
    vals = np.ones((5, 3))
    vals[3, 0] = 1.2
    wf = build_weights(NoiseField(0, 0, Rect(0, 0, 4, 2), vals), TwoParam(0.5, 0.2))
    assert wf(3, 0) == 2.4
    assert wf(0, 2) == 1 / 0.8
    assert wf(2, 2) == 1.0


@pytest.mark.parametrize("seed", range(5))
def test_origin_zero(seed):
    wf = build_weights(generate_noise(seed, 0, Rect(0, 0, 6, 6)), TwoParam(0.3, 0.8))
    assert wf(0, 0) == 0.0


def test_mixed_k0_is_two_param():
    noise = generate_noise(4, 1, Rect(0, 0, 9, 7))
    a = build_weights(noise, Mixed(0.35, 0.6, 0)).values
    b = build_weights(noise, TwoParam(0.35, 0.35)).values
    assert np.array_equal(a, b)


def test_mixed_segments():
    wf = build_weights(const_noise((6, 6)), Mixed(0.25, 0.5, 2))
    assert [wf(i, 0) for i in range(1, 6)] == [2.0, 2.0, 4.0, 4.0, 4.0]
    assert [wf(0, j) for j in range(1, 6)] == [2.0, 2.0, 1 / 0.75, 1 / 0.75, 1 / 0.75]


def test_northeast():
    wf = build_weights(const_noise((5, 4)), Northeast(0.5, 0.75, 3, 2))
    assert wf(4, 3) == 0.0
    assert [wf(i, 3) for i in (1, 2, 3)] == [2.0, 2.0, 2.0]
    assert [wf(4, j) for j in (1, 2)] == [4.0, 4.0]
    assert wf(2, 2) == 1.0


def test_path_induced_rule():
    nu = DownRightPath((0, 3), "RDDRDR", 4)
    wf = build_weights(const_noise((5, 5)), PathInduced(nu, 0.25))
    # vertices after the base: + 1/z after a right step, - 1/(1-z) after a down step
    # before it the signs flip: - 1/z on a right step out, + 1/(1-z) before a down step
    got = [wf(*v) for v in nu.vertices]
    assert got == [-4.0, 1 / 0.75, 1 / 0.75, 0.0, 4.0, -1 / 0.75, 4.0]
    assert wf(4, 4) == 1.0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.05, 0.95))
def test_path_induced_signs_scan(seed, z):
    rng = np.random.default_rng(seed)
    nu = random_down_right(rng, 6, 6)
    noise = generate_noise(seed, 0, Rect(0, 0, 6, 6))
    wf = build_weights(noise, PathInduced(nu, z))
    sgn, div, _ = path_coefficients(nu, z)
    R, D = path_steps(nu)
    for k, v in enumerate(nu.vertices, start=1):
        eta = noise(*v)
        if k == nu.base:
            assert wf(*v) == 0.0
            continue
        after = k > nu.base
        pos = (k - 1 in R) if after else (k + 1 in D)
        assert (wf(*v) > 0) == pos
        assert wf(*v) == sgn[k - 1] * (eta / div[k - 1])


def test_pure_function():
    noise = generate_noise(8, 2, Rect(0, 0, 12, 12))
    nu = DownRightPath((1, 9), "RRDDRDRD", 3)
    for recipe in [TwoParam(0.4, 0.6), Mixed(0.3, 0.7, 4), PathInduced(nu, 0.4), BulkOnly()]:
        assert build_weights(noise, recipe).values.tobytes() == \
            build_weights(noise, recipe).values.tobytes()


def test_bulk_only_is_raw():
    noise = generate_noise(1, 1, Rect(0, 0, 4, 4))
    assert np.array_equal(build_weights(noise, BulkOnly()).values, noise.values)


@pytest.mark.parametrize("make", [lambda: TwoParam(0.0, 0.5), lambda: TwoParam(0.5, 1.0),
                                  lambda: Mixed(0.5, 1.2, 1), lambda: Mixed(0.5, 0.5, -1),
                                  lambda: Northeast(-1, 0.5, 2, 2),
                                  lambda: PathInduced(DownRightPath((0, 0)), 1.0)])
def test_recipe_errors(make):
    with pytest.raises(ParameterError):
        make()


def test_wide_range_accepted():
    # w > 1 and negative z are admissible for the two-param recipe itself
    wf = build_weights(const_noise((3, 3)), TwoParam(2.0, -1.0))
    assert wf(1, 0) == 0.5 and wf(0, 1) == 0.5


def test_path_outside_noise():
    with pytest.raises(ParameterError):
        build_weights(const_noise((2, 2)), PathInduced(DownRightPath((0, 3), "DDD"), 0.5))


def test_recipe_from_config():
    assert recipe_from_config({"kind": "two-param", "w": "0.5", "z": "0.4"}) == TwoParam(0.5, 0.4)
    r = recipe_from_config({"kind": "path-induced", "path": "0,2:DDRR@3", "z": 0.5})
    assert r.base == 3
    with pytest.raises(ParameterError):
        recipe_from_config({"kind": "nope"})


def test_horizontal_axis_ks():
    w = 0.35
    noise = generate_noise(3, 0, Rect(0, 0, 100000, 0))
    wf = build_weights(noise, TwoParam(w, 0.5))
    assert ks_exponential(wf.values[1:, 0], w)[1] >= 0.01
