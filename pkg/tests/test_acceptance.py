"""Acceptance criteria A1-A12 at their stated sizes and tolerances.

Each test prints one PASS/FAIL line as it finishes; the terminal summary
repeats them in order.  Several of these runs take minutes.
"""

import math
import time
from fractions import Fraction

import pytest

from lpplab import analytic as A
from lpplab import bulk, harness, tasep
from lpplab import stationary as St
from lpplab.errors import ParameterError
from lpplab.geometry import axes_path

SEED = 2024


def timed(fn, *args, **kw):
    t0 = time.perf_counter()
    out = fn(*args, **kw)
    return out, time.perf_counter() - t0


def spec(name, **given):
    return harness.ExperimentSpec.build(name, dict(given, seed=SEED))


@pytest.mark.acceptance("A1")
def test_a1_rains(criterion):
    rep, dt = timed(St.verify_rains, 0.55, 0.45, 5, 5, 10**6, seed=SEED, threads=1)
    target = (11 / 9) ** 10
    ok = rep.passed and dt < 30 and abs(rep.estimates["target"] - target) < 1e-12
    est, se = rep.estimates["moment"], rep.stderrs["moment"]
    criterion(ok, f"moment {est:.5f} +- {se:.5f} vs {target:.5f}, {dt:.1f} s")
    assert ok


@pytest.mark.acceptance("A2")
def test_a2_burke(criterion):
    s = spec("verify.burke", reps=10**5)
    nu = harness._path(s.params)
    assert len(nu) - 1 == 10 and set(nu.steps[:2]) == {"R", "D"}
    rep, dt = timed(St.verify_burke, nu, 0.5, 10**5, seed=SEED)
    ok = rep.passed and dt < 60
    min_p = min(row[6] for row in rep.tables["increments"].rows)
    criterion(ok, f"min KS p {min_p:.3g}, max |corr| "
                  f"{rep.estimates['max_abs_corr']:.4f} (limit {5 / math.sqrt(1e5):.4f}), {dt:.1f} s")
    assert ok


@pytest.mark.acceptance("A3")
def test_a3_variance(criterion):
    exact = St.variance_desk_11_exact(Fraction(1, 2))
    rep = St.verify_variance(0.5, 20, 30, 10**5, seed=SEED)
    ok = exact == (6, 6) and rep.passed
    criterion(ok, f"(1,1) exact {exact[0]} vs {exact[1]}; (20,30) Var {rep.estimates['variance']:.3f} "
                  f"vs weight-sum {rep.estimates['rhs_weight_sum']:.3f}")
    assert ok


@pytest.mark.acceptance("A4")
def test_a4_exit_identity(criterion):
    rep = St.verify_exit_identity(0.5, 3, 2, 20, 20, 10**5, seed=SEED)
    ok = rep.passed
    criterion(ok, f"KS p plus {rep.estimates['ks_p_plus']:.3g}, minus {rep.estimates['ks_p_minus']:.3g}")
    assert ok


@pytest.mark.acceptance("A5")
def test_a5_lemmas(criterion):
    rep = St.check_deterministic_lemmas(1000, seed=SEED, max_side=8)
    viol = {k: v for k, v in rep.estimates.items() if k.startswith("violations_")}
    ok = rep.passed and not any(viol.values())
    criterion(ok, ", ".join(f"{k[11:]}={v}" for k, v in viol.items()))
    assert ok


@pytest.mark.acceptance("A6")
def test_a6_first_step(criterion):
    rep, dt = timed(harness.run, spec("first-step", m=400, n=400, s=[1.5, 2.0, 2.5],
                                      reps=10**7, tol=0.35))
    rows = rep.tables["first_step"].rows
    parts = [f"s={s:.1f}: -ln p {nl:.3f} vs {pred:.3f}" for _, s, _, _, nl, pred in rows]
    ok = rep.passed and len(rep.checks) == 3
    # one worker here; the time limit is stated for eight
    criterion(ok, "; ".join(parts) + f"; {dt / 60:.1f} min on 1 worker")
    assert ok


@pytest.mark.acceptance("A7")
def test_a7_exit_tail(criterion):
    grid = [0.5 + 0.25 * k for k in range(9)]
    curve = St.exit_tail(("two-param", 0.5, 0.5), axes_path(200, 200), 200, 200, grid,
                         10**6, seed=SEED)
    rep = St.assess_tail(St.tail_report(curve, "exit-tail", SEED), curve, 0.95)
    fit = curve.fit
    ok = rep.passed and fit is not None
    detail = (f"r2 {fit.r2:.4f}, slope {fit.slope:.4f}, C {rep.estimates['lower_bound_C']:.4f}, "
              f"{fit.npoints} points" if fit else "no usable fit window")
    criterion(ok, detail)
    assert ok


@pytest.mark.acceptance("A8")
def test_a8_midpoint(criterion):
    rep = bulk.midpoint_exponent((250, 500, 1000, 2000), reps=4000, seed=SEED)
    ok = rep.passed
    criterion(ok, f"log-log slope {rep.estimates['slope']:.4f} (band 0.57..0.77)")
    assert ok


@pytest.mark.acceptance("A9")
def test_a9_cif(criterion):
    rep = bulk.cif_experiment((250, 500, 1000, 2000, 4000), reps=10**4, seed=SEED)
    d = rep.convergence.distances
    ok = rep.passed
    criterion(ok, "distances " + ", ".join(f"{v:.4f}" for v in d)
              + f"; slope {rep.convergence.slope:.3f} (band -0.48..-0.18)")
    assert ok


@pytest.mark.acceptance("A10")
def test_a10_stationary_cif(criterion):
    eq = bulk.check_stationary_equivalences(0.5, 0.5, 50, 1000, seed=SEED)
    viol = sum(v for k, v in eq.estimates.items() if k.startswith("violations_"))
    viol += eq.estimates["tree_mismatches"]
    xs = [A.x_for_direction(0.7), A.x_for_direction(0.3)]
    lim = bulk.stationary_cif(0.5, 0.5, 500, 2000, xs, seed=SEED, tol=0.05)
    ok = eq.passed and viol == 0 and lim.passed
    parts = [f"x={x:.4f}: {lim.estimates[f'p_{x:g}']:.4f} vs {lim.estimates[f'limit_{x:g}']:g}"
             for x in xs]
    criterion(ok, f"{viol} equivalence violations; " + "; ".join(parts))
    assert ok


@pytest.mark.acceptance("A11")
def test_a11_tasep(criterion):
    parts, ok = [], True
    for w, z in [(1.0, 0.0), (0.6, 0.3), (0.5, 0.5)]:
        rep, dt = timed(tasep.second_class_vs_cif, w, z, 30, SEED)
        good = rep.passed and dt < 5
        ok &= good
        parts.append(f"({w},{z}) err {rep.estimates['swap_max_abs_err']:.1e} "
                     f"{'ok' if good else 'BAD'} {dt:.2f} s")
    criterion(ok, "; ".join(parts))
    assert ok


def _analytic_examples():
    """(label, holds) for each analytic example, to exactness or 1e-10."""
    def close(a, b, tol=1e-10):
        return abs(a - b) <= tol

    def raises(fn, *args):
        try:
            fn(*args)
        except ParameterError:
            return True
        return False

    q11, q41 = A.shape_quantities(1, 1), A.shape_quantities(4, 1)
    ex = [
        ("mean z=.5 (3,2) = 10", A.mean_fn(0.5, 3, 2) == 10),
        ("mean at zeta = gamma", all(close(A.mean_fn(A.char_direction(x, y), x, y), A.shape(x, y))
                                     for x, y in [(1, 1), (4, 1), (2, 7)])),
        ("mean z=.25 (1,1) = 16/3", close(A.mean_fn(0.25, 1, 1), 16 / 3)),
        ("mean rejects z outside (0,1)", all(raises(A.mean_fn, z, 1, 1) for z in (0.0, 1.0))),
        ("shape (1,1)", q11.gamma == 4 and q11.zeta == 0.5 and close(q11.sigma, 16 ** (1 / 3))),
        ("shape (4,1)", q41.gamma == 9 and close(q41.zeta, 2 / 3) and close(q41.sigma, 40.5 ** (1 / 3))),
        ("zeta (1,0) = 1", A.shape_quantities(1, 0).zeta == 1),
        ("shape rejects (0,0)", raises(A.shape_quantities, 0, 0)),
        ("lmgf w=z = 0", A.lmgf(0.3, 0.3, 5, 2) == 0),
        ("lmgf (.6,.4,1,1) = 2 ln 1.5", close(A.lmgf(0.6, 0.4, 1, 1), 2 * math.log(1.5))),
        ("lmgf quadrature (.7,.3,2,5)", close(A.lmgf_integral(0.7, 0.3, 2, 5), A.lmgf(0.7, 0.3, 2, 5))),
        ("lmgf rejects w=1", raises(A.lmgf, 1.0, 0.5, 1, 1)),
        ("residual at zeta = 0", A.taylor_residuals(0.6, 0.5, 1, 1)[0] == 0),
        ("residual (1,1) z=.6 = 1/150", close(A.taylor_residuals(0.5, 0.6, 1, 1)[0], 1 / 150)),
        ("residual bound with C=10 on the cone grid", A.residual_constant(0.5, 0.1)[0] <= 10),
        ("busemann empty = 1", A.busemann_cdf("hor", 0.5) == 1 and A.busemann_cdf("ver", 0.5) == 1),
        ("busemann hor s=(-1)", close(A.busemann_cdf("hor", 0.5, s=[-1]), math.exp(-0.5))),
        ("busemann hor t=(2)", close(A.busemann_cdf("hor", 0.5, t=[2]), 1 - math.exp(-1))),
        ("cif limit w=1 z=0 x=.5", close(A.cif_limit_cdf(1, 0, 0.5), 0.5)),
        ("cif limit x=0, x=1", A.cif_limit_cdf(0.7, 0.3, 0) == 0 and A.cif_limit_cdf(0.7, 0.3, 1) == 1),
        ("cif limit x=.36 = 3/7", close(A.cif_limit_cdf(1, 0, 0.36), 3 / 7)),
        ("zeta shift delta=0", A.zeta_shift(1, 1, 0) == 0),
        ("zeta shift (1,1) 3 hor = 1/6", close(A.zeta_shift(1, 1, 3, "hor"), 1 / 6)),
        ("zeta shift (1,1) 3 matches difference",
         close(A.zeta_shift(1, 1, 3, "hor"), A.char_direction(4, 1) - A.char_direction(1, 1))),
        ("zeta shift ver negative", A.zeta_shift(1, 1, 3, "ver") < 0),
    ]
    for x, y in [(1, 1), (4, 1), (1, 3)]:
        fd = A.curvature_fd(x, y, 1e-5)
        ex.append((f"curvature fd ({x},{y})", abs(fd - A.scale(x, y) ** 3) <= 1e-5 * A.scale(x, y) ** 3))
    return ex


@pytest.mark.acceptance("A12")
def test_a12_analytic(criterion):
    ex = _analytic_examples()
    bad = [label for label, held in ex if not held]
    C = A.residual_constant(0.5, 0.1)[0]
    detail = f"{len(ex) - len(bad)}/{len(ex)} examples hold; grid residual sup {C:.4f}"
    if bad:
        detail += "; failing: " + ", ".join(bad)
    criterion(not bad, detail)
    assert not bad, bad
