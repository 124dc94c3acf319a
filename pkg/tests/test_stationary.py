import math
from fractions import Fraction

import numpy as np
import pytest

from lpplab import stationary as St
from lpplab.errors import ParameterError, PreconditionError
from lpplab.geometry import DownRightPath, axes_path
from lpplab.sampling import axis_exit_samples, path_to_point_samples, stationary_values
from lpplab.stats import ks_statistic


def test_rains_desk_one_one():
    assert St.rains_desk_11(0.6, 0.5) == pytest.approx(1.5, rel=1e-10)


def test_rains_single_edge_mc():
    rep = St.verify_rains(0.6, 0.4, 1, 0, 200000, seed=1)
    assert rep.estimates["target"] == pytest.approx(1.5, rel=1e-14)
    assert rep.passed


def test_rains_equal_rates_exact():
    rep = St.verify_rains(0.45, 0.45, 4, 3, 1000)
    assert rep.estimates["moment"] == 1.0 and rep.stderrs["moment"] == 0.0
    assert rep.passed


def test_rains_guard():
    with pytest.raises(PreconditionError) as e:
        St.verify_rains(0.8, 0.2, 30, 30, 1000)
    assert "variance" in str(e.value)
    assert St.rains_guard(0.55, 0.45, 5, 5) < 8


def test_variance_desk():
    assert St.variance_desk_11_exact(Fraction(1, 2)) == (6, 6)
    var, rhs = St.variance_desk_11(0.5)
    assert var == pytest.approx(6.0, abs=1e-9) and rhs == pytest.approx(6.0, abs=1e-9)
    # the count form replaces the weight sum by P{Zhor > 0} = 1/2 and gives 2, not 6
    count_form = -1 / 0.25 + 1 / 0.25 + 2 / 0.5 * St.first_step_desk_11(0.5)
    assert count_form == 2.0


def test_variance_vertical_edge():
    rep = St.verify_variance(0.3, 0, 1, 20000, seed=2)
    assert rep.estimates["rhs_weight_sum"] == pytest.approx(1 / 0.49, rel=1e-14)
    assert rep.passed


def test_variance_small_grid():
    rep = St.verify_variance(0.5, 4, 6, 50000, seed=3)
    assert rep.passed
    assert "rhs_count_form" in rep.estimates


def test_variance_reps_guard():
    with pytest.raises(ParameterError):
        St.verify_variance(0.5, 2, 2, 100)


def test_burke_single_edge():
    nu = DownRightPath((0, 0), "R")
    inc, _ = St.burke_increments(4, 2000, nu, 0.3)
    g = stationary_values(4, 2000, 0.3, 0.3, [(1, 0)])[:, 0]
    assert np.array_equal(inc[:, 0], g)
    rep = St.verify_burke(nu, 0.3, 20000, seed=4)
    assert rep.passed and rep.estimates["max_abs_corr"] == 0.0


def test_burke_staircase_small():
    rep = St.verify_burke(DownRightPath((1, 4), "RDRDRD", 1), 0.4, 20000, seed=5)
    assert rep.passed


def test_burke_bad_rate():
    with pytest.raises(ParameterError):
        St.verify_burke(DownRightPath((0, 0), "R"), 1.0, 1000)


@pytest.mark.parametrize("z,want", [(0.5, 0.5), (0.7, 0.3)])
def test_first_step_one_one(z, want):
    assert St.first_step_desk_11(z) == pytest.approx(want, abs=1e-15)
    rep = St.first_step_prob(z, 1, 1, 100000, seed=6)
    key = f"p_hor_{z:.17g}"
    assert abs(rep.estimates[key] - want) <= 3 * rep.stderrs[key]


def test_exit_tail_beyond_path():
    m = n = 6
    nu = axes_path(m, n)
    s_big = (len(nu) + 1) / (m + n) ** (2 / 3)
    curve = St.exit_tail(("two-param", 0.5, 0.5), nu, m, n, [0.0, 0.5, s_big], 5000, seed=7)
    assert curve.p_hat[-1] == 0.0
    # s = 0 is the probability of any horizontal first step
    fs = St.first_step_prob(0.5, m, n, 5000, seed=7)
    assert curve.p_hat[0] == fs.estimates["p_hor_0.5"]


def test_exit_tail_path_induced():
    nu = DownRightPath((0, 12), "D" * 4 + "RDRDRDRD" + "R" * 8, 5)
    curve = St.exit_tail(("path-induced", None, 0.5), nu, 12, 4, [0.25, 0.5, 1.0], 4000, seed=8)
    assert (np.diff(curve.p_hat) <= 0).all()
    assert (curve.lo <= curve.p_hat).all() and (curve.p_hat <= curve.hi).all()


def test_exit_tail_unreachable():
    with pytest.raises(PreconditionError):
        St.exit_tail(("two-param", 0.5, 0.5), DownRightPath((0, 2), "DDRR", 1), 5, 5, [1.0], 10)


def test_tail_monotone_after_isotonic():
    curve = St.exit_tail(("two-param", 0.5, 0.5), axes_path(40, 40), 40, 40,
                         np.linspace(0.1, 2.0, 12), 3000, seed=9)
    assert (np.diff(curve.iso) <= 1e-15).all()
    assert (np.diff(curve.k) >= 0).all()


def test_stationarity():
    rep = St.verify_stationarity(0.4, 15, 10, 100000, seed=10)
    assert rep.passed, rep.tables["shifts"].rows


def test_exit_identity_trivial_shift():
    m, n, z = 12, 9, 0.45
    _, zp, zm = path_to_point_samples(11, 3000, axes_path(m, n), z, (m, n))
    zh, zv = axis_exit_samples(11, 3000, z, z, [(m, n)])
    assert ks_statistic(zp, zh[:, 0]) == 0.0 and ks_statistic(zm, zv[:, 0]) == 0.0


def test_exit_identity_small():
    rep = St.verify_exit_identity(0.5, 2, 1, 10, 10, 20000, seed=12)
    assert rep.passed
    assert rep.checks["support"]


def test_lemmas_small():
    rep = St.check_deterministic_lemmas(100, seed=13)
    assert rep.passed, rep.metadata.get("counterexamples")


def test_lemmas_zero_perturbation():
    rep = St.check_deterministic_lemmas(50, seed=14, delta=0.0)
    assert rep.estimates["violations_monotonicity"] == 0


def test_assess_tail_flags():
    curve = St.exit_tail(("two-param", 0.5, 0.5), axes_path(60, 60), 60, 60,
                         [0.5 + 0.25 * k for k in range(7)], 40000, seed=15)
    rep = St.assess_tail(St.tail_report(curve, "exit-tail", 15), curve)
    assert rep.checks["fit_present"] and rep.checks["positive_slope"]
    assert math.isfinite(rep.estimates["lower_bound_C"])
