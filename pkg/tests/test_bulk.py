import math

import numpy as np
import pytest

from lpplab import analytic, bulk, lpp
from lpplab.errors import InvariantError, ParameterError, PreconditionError
from lpplab.geometry import DownRightPath, Rect, axes_path
from lpplab.noise import generate_noise
from lpplab.report import SCHEMAS
from lpplab.tasep import swap_times_from_lpp
from lpplab.weights import BulkOnly, build_weights


def bulk_field(seed, r, N):
    return build_weights(generate_noise(seed, r, Rect(0, 0, N + 1, N + 1)), BulkOnly())


# -- competition interface ------------------------------------------------------

@pytest.mark.parametrize("seed", range(5))
def test_cif_invariants(seed):
    path = bulk.cif_simulate(np.random.default_rng(seed).exponential(size=(40, 40)), 40)
    assert path[1] == (1, 1)
    assert path.check()
    assert all(sum(path[n]) == n + 1 for n in range(1, 41))


def test_cif_ties_move_horizontally():
    path = bulk.cif_simulate(np.ones((6, 6)), 6)
    assert [path[n] for n in range(1, 7)] == [(n, 1) for n in range(1, 7)]


@pytest.mark.parametrize("seed", range(5))
def test_cif_consistency(seed):
    w = np.random.default_rng(seed).exponential(size=(30, 30))
    assert bulk.check_cif_consistency(w, 30) == []


@pytest.mark.parametrize("seed", range(5))
def test_tree_monotone(seed):
    w = np.random.default_rng(100 + seed).exponential(size=(20, 20))
    assert bulk.check_tree_monotone(w, 20) == []


def test_cif_samples_match_walk():
    seed, N = 3, 60
    H = bulk.cif_samples(seed, 20, [10, 35, N])
    for r in range(20):
        path = bulk.cif_simulate(bulk_field(seed, r, N), N)
        assert [path[n][0] for n in (10, 35, N)] == list(H[r])


def test_cif_bad_invariant():
    with pytest.raises(InvariantError):
        bulk.CifPath(np.array([[1, 1], [3, 1]])).check()


def test_convergence_report_bounds():
    with pytest.raises(InvariantError):
        bulk.ConvergenceReport([10], [1.5], math.nan)


def test_cif_limit_symmetric():
    assert analytic.char_direction(0.5, 0.5) == 0.5


def test_cif_experiment_small():
    rep = bulk.cif_experiment((25, 50, 100), reps=400, seed=4, pilot_reps=200)
    assert rep.tables["convergence"].columns == SCHEMAS["convergence"]
    assert all(0 <= d <= 1 for d in rep.convergence.distances)
    assert set(rep.checks) == {"strictly_decreasing", "slope_band"}
    assert len(rep.metadata["thresholds"]) == 3


def test_cif_experiment_grid_guard():
    with pytest.raises(ParameterError):
        bulk.cif_experiment((10,), xs=[0.05, 0.5], reps=10)


# -- stationary interface -----------------------------------------------------------

@pytest.mark.parametrize("w,z", [(0.5, 0.5), (0.6, 0.3), (0.3, 0.6), (1.0, 0.0)])
def test_stationary_equivalences(w, z):
    rep = bulk.check_stationary_equivalences(w, z, 30, 300, seed=5)
    assert rep.passed, rep.estimates


def test_stationary_samples_match_walk():
    w, z, n = 0.6, 0.4, 25
    H = bulk.stationary_cif_samples(6, 15, w, z, n)
    for r in range(15):
        table = swap_times_from_lpp(w, z, n + 1, n + 1, 6, r)
        path = bulk.stationary_cif_walk(table, n)
        assert path.check() and path[0] == (0, 0)
        assert path[n][0] == H[r]


def test_stationary_cif_report():
    x = analytic.x_for_direction(0.8)
    rep = bulk.stationary_cif(0.5, 0.5, 100, 500, [x], seed=7, tol=0.2)
    assert rep.estimates[f"limit_{x:g}"] == 1.0
    assert analytic.cif_limit_cdf(0.7, 0.3, 1.0) == 1.0
    assert rep.passed


def test_stationary_cif_rates():
    with pytest.raises(ParameterError):
        bulk.stationary_cif(0.0, 0.5, 10, 10, [0.5])


# -- transversal fluctuations ------------------------------------------------------

def test_transversal_beyond_path():
    m = n = 10
    nu = axes_path(m, n)
    s_big = (len(nu) + 1) / (m + n) ** (2 / 3)
    curve = bulk.transversal_fluct(nu, m, n, [0.2, s_big], 2000, seed=8)
    assert curve.p_hat[-1] == 0.0
    assert curve.extra["colinearity"] == 0.0


def test_bulk_boundary_identity():
    assert bulk.verify_bulk_boundary(20, 20, 20000, seed=9).passed


def test_midpoint_displacement_small():
    d = bulk.midpoint_displacement(20, 300, seed=10)
    assert d.shape == (300,) and (np.abs(d) <= 19).all()
    assert abs(d.mean()) < 4 * d.std() / np.sqrt(300) + 1e-12


# -- Busemann -------------------------------------------------------------------

def test_busemann_large_s():
    nu = DownRightPath((1, 1), "R")
    bh, bv = bulk.busemann_samples(11, 500, nu, 30, 30)
    assert bulk.busemann_prob(bh, bv, [1e300], []) == 1.0
    assert bh.shape == (500, 1) and bv.shape == (500, 0)


def test_busemann_increments_match_tables():
    nu = DownRightPath((1, 3), "RDRD")
    m = n = 12
    bh, bv = bulk.busemann_samples(12, 5, nu, m, n)
    for r in range(5):
        arr = np.array(bulk_field(12, r, m).values[:m + 1, :n + 1])
        g = lambda v: lpp.point_to_point(arr, v, (m, n))
        assert bh[r, 0] == pytest.approx(g((1, 3)) - g((2, 3)), rel=1e-12)
        assert bh[r, 1] == pytest.approx(g((2, 2)) - g((3, 2)), rel=1e-12)
        assert bv[r, 0] == pytest.approx(g((2, 2)) - g((2, 3)), rel=1e-12)
        assert bv[r, 1] == pytest.approx(g((3, 1)) - g((3, 2)), rel=1e-12)


def test_busemann_dimension_mismatch():
    with pytest.raises(ParameterError):
        bulk.busemann_experiment(DownRightPath((1, 2), "RD"), [(100, 100)], [1, 2], [1], 10)


def test_busemann_box():
    with pytest.raises(PreconditionError):
        bulk.busemann_experiment(DownRightPath((1, 30), "R"), [(50, 50)], [1], [], 10)


@pytest.mark.slow
def test_busemann_single_edge_400():
    nu = DownRightPath((1, 1), "R")
    bh, bv = bulk.busemann_samples(13, 100000, nu, 400, 400)
    p = bulk.busemann_prob(bh, bv, [-1.0], [])
    assert abs(p - math.exp(-0.5)) <= 0.02
    assert analytic.busemann_cdf("hor", 0.5, [-1.0]) == pytest.approx(0.606531, abs=1e-6)


@pytest.mark.slow
def test_busemann_distance_shrinks():
    rep = bulk.busemann_experiment(DownRightPath((16, 2), "DR"), [(100, 100), (1600, 1600)],
                                   [-2.0], [1.0], 10000, seed=14)
    d = rep.convergence.distances
    assert d[1] < d[0], d


@pytest.mark.slow
def test_busemann_marginal():
    rep = bulk.busemann_marginal(800, 100000, seed=15)
    assert rep.passed, rep.estimates
