"""Experiments on the increment-stationary boundary model."""

import json
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import integrate

from . import analytic, lpp
from . import _fallback
from .errors import ParameterError, PreconditionError, require
from .geometry import (DownRightPath, Rect, antidiagonal_path, axes_path, l_shaped,
                       reachable_contains)
from .noise import COPY, MAIN, NoiseField
from .report import McReport, Table
from .sampling import (axis_exit_samples, first_step_samples, path_exit_samples,
                       path_to_point_samples, stationary_values, sweep)
from .stats import (ALPHA, Accumulator, binomial_se, corr_matrix, isotonic_decreasing,
                    ks_exponential, ks_two_sample, mean_se, tail_fit, wilson)
from .weights import PathInduced, build_weights


def _rate(z, name="z"):
    if not 0 < z < 1:
        raise ParameterError(f"{name}={z} must lie in (0, 1)")


def _meta(seed, **params):
    return {"seed": int(seed), **params}


# -- equilibrium increments -------------------------------------------------

def burke_increments(seed, reps, nu, z, **kw):
    """Increments of the stationary values between consecutive vertices of nu:
    G(next) - G(this) after a right step, G(this) - G(next) after a down step.
    Returns (increments[reps, l-1], step letters)."""
    require(len(nu) >= 2, "need a path with at least one step")
    G = stationary_values(seed, reps, z, z, list(nu.vertices), **kw)
    inc = np.empty((G.shape[0], len(nu) - 1))
    for k, s in enumerate(nu.steps):
        inc[:, k] = G[:, k + 1] - G[:, k] if s == "R" else G[:, k] - G[:, k + 1]
    return inc, nu.steps


def verify_burke(nu, z, reps, seed=0, alpha=ALPHA, **kw):
    _rate(z)
    require(reps >= 1000, "Burke check needs reps >= 1000")
    t0 = time.time()
    inc, steps = burke_increments(seed, reps, nu, z, **kw)
    rep = McReport("burke", reps, metadata=_meta(seed, z=z, path=str(nu)))
    rows = []
    for k, s in enumerate(steps):
        rate = z if s == "R" else 1.0 - z
        d, p = ks_exponential(inc[:, k], rate)
        m, se = mean_se(inc[:, k])
        rep.add_estimate(f"mean_{k + 1}", m, se)
        rep.checks[f"ks_{k + 1}"] = p >= alpha
        rows.append([k + 1, s, rate, m, se, d, p])
    c = corr_matrix(inc)
    off = np.abs(c[~np.eye(len(steps), dtype=bool)]) if len(steps) > 1 else np.zeros(0)
    bound = 5.0 / math.sqrt(reps)
    rep.estimates["max_abs_corr"] = float(off.max()) if off.size else 0.0
    rep.checks["correlations"] = bool((off <= bound).all())
    rep.metadata.update(corr_bound=bound, wall_time=time.time() - t0)
    rep.tables["increments"] = Table(["edge", "step", "rate", "mean", "stderr", "ks_d", "ks_p"], rows)
    return rep


def stationarity_samples(seed, reps, z, p, q, m, n, **kw):
    """(shifted difference G(m+p,n+q) - G(p,q), G(m,n) on an independent stream)."""
    G = stationary_values(seed, reps, z, z, [(p, q), (m + p, n + q)], **kw)
    H = stationary_values(seed, reps, z, z, [(m, n)], stream=COPY, **kw)
    return G[:, 1] - G[:, 0], H[:, 0]


def verify_stationarity(z, m, n, reps, shifts=((0, 0), (2, 1), (5, 5)), seed=0, alpha=ALPHA, **kw):
    _rate(z)
    rep = McReport("stationarity", reps, metadata=_meta(seed, z=z, m=m, n=n,
                                                       shifts=[list(s) for s in shifts]))
    rows = []
    for p, q in shifts:
        a, b = stationarity_samples(seed, reps, z, p, q, m, n, **kw)
        d, pv = ks_two_sample(a, b)
        rep.checks[f"ks_{p}_{q}"] = pv >= alpha
        rows.append([p, q, d, pv])
    rep.tables["shifts"] = Table(["p", "q", "ks_d", "ks_p"], rows)
    return rep


# -- exponential moment ------------------------------------------------------

def rains_guard(w, z, m, n):
    return abs(w - z) * (m / min(w, z) + n / (1.0 - max(w, z)))


def verify_rains(w, z, m, n, reps, seed=0, **kw):
    _rate(w, "w")
    _rate(z)
    g = rains_guard(w, z, m, n)
    if g > 8:
        raise PreconditionError(
            f"exponential moment not estimable: |w-z|(m/min(w,z) + n/(1-max(w,z))) = {g:.3g} > 8;"
            " the estimator variance blows up")
    t0 = time.time()
    G = stationary_values(seed, reps, w, z, [(m, n)], **kw)[:, 0]
    x = np.exp((w - z) * G)
    est, se = mean_se(x)
    target = math.exp(analytic.lmgf(w, z, m, n))
    rep = McReport("rains", reps, metadata=_meta(seed, w=w, z=z, m=m, n=n, guard=g))
    rep.add_estimate("moment", est, se)
    rep.estimates["target"] = target
    rep.checks["within_3se"] = abs(est - target) <= 3.0 * se
    rep.metadata["wall_time"] = time.time() - t0
    return rep


def rains_desk_11(w, z):
    """E exp{(w - z)(max(X, Y) + W)} with X ~ Exp(w), Y ~ Exp(1 - z), W ~ Exp(1),
    by one-dimensional quadrature of the maximum's density."""
    a, b, lam = w, 1.0 - z, w - z
    require(lam < min(a, b), "moment is infinite")
    # exp(lam t) times the density of max(X, Y), exponents merged to avoid overflow
    f = lambda t: (a * (math.exp((lam - a) * t) - math.exp((lam - a - b) * t))
                   + b * (math.exp((lam - b) * t) - math.exp((lam - a - b) * t)))
    mx, _ = integrate.quad(f, 0, math.inf, epsabs=1e-13, epsrel=1e-12)
    return mx / (1.0 - lam)


# -- variance identity -------------------------------------------------------

def variance_samples(seed, reps, z, m, n, **kw):
    """Per replica: G(m, n), the horizontal exit, and the boundary-weight sum of
    the geodesic along the horizontal axis (the scaled noise eta(i,0)/z, i <= Zhor)."""
    g, lab = sweep(seed, reps, z, 1.0 - z, [(m, n)], M=m, N=n, marks=axes_path(m, n), **kw)
    G = g[:, 0]
    zh = np.maximum(lab[:, 0] - n, 0)
    r0 = kw.get("r0", 0)
    stream = kw.get("stream", MAIN)
    reps_ids = np.arange(r0, r0 + len(G), dtype=np.uint64)
    wsum = np.zeros(len(G))
    for i in range(1, m + 1):
        eta = _fallback.column(seed, reps_ids, stream, i, 0, 0)[:, 0]
        wsum = np.where(zh >= i, wsum + eta / z, wsum)
    return G, zh, wsum


def variance_desk_11(z):
    """Exact (Var, rhs) at (1, 1) from order statistics of two exponentials.

    G = max(X, Y) + W with X ~ Exp(z) on the horizontal axis, Y ~ Exp(1-z);
    the weight sum is X on {X > Y}.  Computed by quadrature."""
    a, b = z, 1.0 - z
    fx = lambda t: a * math.exp(-a * t)
    Fy = lambda t: 1 - math.exp(-b * t)
    dens = lambda t: fx(t) * Fy(t) + b * math.exp(-b * t) * (1 - math.exp(-a * t))
    q = lambda f: integrate.quad(f, 0, math.inf, epsabs=1e-13, epsrel=1e-12)[0]
    m1, m2 = q(lambda t: t * dens(t)), q(lambda t: t * t * dens(t))
    var = m2 - m1 * m1 + 1.0
    eb = q(lambda t: t * fx(t) * Fy(t))
    rhs = -1.0 / z ** 2 + 1.0 / (1 - z) ** 2 + 2.0 / z * eb
    return var, rhs


def variance_desk_11_exact(z):
    """Same pair in rational arithmetic for rational z."""
    z = Fraction(z)
    a, b = z, 1 - z
    # E max = 1/a + 1/b - 1/(a+b), E max^2 = 2/a^2 + 2/b^2 - 2/(a+b)^2, E[X; X > Y] = 1/a - a/(a+b)^2
    m1 = 1 / a + 1 / b - 1 / (a + b)
    m2 = 2 / a ** 2 + 2 / b ** 2 - 2 / (a + b) ** 2
    var = m2 - m1 * m1 + 1
    rhs = -1 / z ** 2 + 1 / (1 - z) ** 2 + 2 / z * (1 / a - a / (a + b) ** 2)
    return var, rhs


def verify_variance(z, m, n, reps, seed=0, **kw):
    _rate(z)
    require(reps >= 10000, "variance check needs reps >= 10^4")
    t0 = time.time()
    G, zh, wsum = variance_samples(seed, reps, z, m, n, **kw)
    base = -m / z ** 2 + n / (1 - z) ** 2
    acc = Accumulator.of(G)
    var = acc.var
    mu = acc.mean
    eb, eb_se = mean_se(wsum)
    rhs = base + 2.0 / z * eb
    # combined error of var - rhs from per-replica influence values
    psi = (G - mu) ** 2 - 2.0 / z * wsum
    _, comb = mean_se(psi)
    ez, ez_se = mean_se(zh.astype(np.float64))
    rep = McReport("variance", reps, metadata=_meta(seed, z=z, m=m, n=n))
    rep.add_estimate("variance", var, float(np.sqrt(np.var((G - mu) ** 2, ddof=1) / reps)))
    rep.add_estimate("rhs_weight_sum", rhs, 2.0 / z * eb_se)
    rep.add_estimate("difference", var - rhs, comb)
    rep.add_estimate("rhs_count_form", base + 2.0 / z * ez, 2.0 / z * ez_se)
    rep.checks["weight_sum_form"] = abs(var - rhs) <= 3.0 * comb
    rep.metadata.update(count_form="reported only", wall_time=time.time() - t0)
    return rep


# -- exit tails ----------------------------------------------------------------

@dataclass
class TailCurve:
    s: np.ndarray
    k: np.ndarray
    p_hat: np.ndarray
    stderr: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    reps: int
    fit: object = None
    iso: np.ndarray = None
    extra: dict = field(default_factory=dict)

    def table(self):
        return Table(["s", "k", "p_hat", "stderr", "lo", "hi"],
                     [[float(a), int(b), float(c), float(d), float(e), float(f)]
                      for a, b, c, d, e, f in zip(self.s, self.k, self.p_hat, self.stderr,
                                                  self.lo, self.hi)])


def tail_curve(Z, s_grid, scale_len, reps):
    s = np.asarray(s_grid, dtype=np.float64)
    k = np.floor(s * scale_len).astype(np.int64)
    Z = np.asarray(Z)
    cnt = np.array([(Z > kk).sum() for kk in k])
    p = cnt / reps
    se = binomial_se(p, reps)
    lo, hi = wilson(cnt, reps)
    fit = tail_fit(s, p, se, reps=reps)
    iso = isotonic_decreasing(p)
    return TailCurve(s, k, p, se, lo, hi, reps, fit, iso)


def exit_samples(seed, reps, recipe, nu, target, side="+", **kw):
    """Zplus or Zminus under a two-param(w, z) or path-induced(z) model."""
    kind, w, z = recipe
    if kind == "two-param":
        zp, zm = path_exit_samples(seed, reps, w, z, nu, target, **kw)
    elif kind == "path-induced":
        _, zp, zm = path_to_point_samples(seed, reps, nu, z, target, **kw)
    else:
        raise ParameterError(f"exit tails support two-param and path-induced, got {kind!r}")
    return zp if side == "+" else zm


def exit_tail(recipe, nu, m, n, s_grid, reps, seed=0, side="+", strict=False, **kw):
    """Exceedance curve of the exit offset past floor(s (m+n)^(2/3)).

    recipe is ("two-param", w, z) or ("path-induced", None, z); the target is
    (m + i0, n + j0) with (i0, j0) the base vertex of nu.
    """
    kind, w, z = recipe
    _rate(z)
    i0, j0 = nu.base_vertex
    target = (m + i0, n + j0)
    if not reachable_contains(nu, target):
        raise PreconditionError(f"target {target} is not reachable from the path")
    if strict:
        c = analytic.char_direction(m, n)
        sig = analytic.scale(m, n)
        require(abs(z - c) * sig <= 3 and (w is None or abs(w - c) * sig <= 3),
                "strict regime: rates must lie within 3 / sigma of zeta(m, n)")
    Z = exit_samples(seed, reps, recipe, nu, target, side, **kw)
    curve = tail_curve(Z, s_grid, (m + n) ** (2.0 / 3.0), reps)
    curve.extra["path_length"] = len(nu)
    return curve


def tail_report(curve, name, seed, **params):
    rep = McReport(name, curve.reps, metadata=_meta(seed, **params))
    for s, p, se in zip(curve.s, curve.p_hat, curve.stderr):
        rep.add_estimate(f"p_{s:g}", float(p), float(se))
    if curve.fit is None:
        rep.metadata["fit"] = "absent"
    else:
        rep.estimates.update(fit_slope=curve.fit.slope, fit_intercept=curve.fit.intercept,
                             fit_r2=curve.fit.r2)
    rep.tables["tail"] = curve.table()
    return rep


def lower_bound_consistency(curve):
    """Check p(s) >= exp(-C s^3) on the fit window.

    The fitted law exp(-a - b s^3) gives, for s at or above the smallest
    window point s0, the pure cubic bound with C = b + max(a, 0) / s0^3.
    Each point's upper Wilson limit is compared with it.  Returns
    (ok, C, per-point list).
    """
    if curve.fit is None:
        return False, math.nan, []
    lo = 10.0 / curve.reps
    use = (curve.p_hat > lo) & (curve.p_hat < 0.5)
    s0 = curve.s[use].min()
    C = curve.fit.slope + max(curve.fit.intercept, 0.0) / s0 ** 3
    ok = curve.hi[use] >= np.exp(-C * curve.s[use] ** 3)
    return bool(ok.all()), float(C), list(zip(curve.s[use].tolist(), ok.tolist()))


def assess_tail(rep, curve, r2_min=0.95):
    """Cubic-scaling checks on a tail report: fit present with r^2 >= r2_min,
    positive slope, and lower-bound consistency over the fit window."""
    fit = curve.fit
    rep.checks["fit_present"] = fit is not None
    if fit is None:
        return rep
    rep.checks["fit_r2"] = fit.r2 >= r2_min
    rep.checks["positive_slope"] = fit.slope > 0
    ok, C, pts = lower_bound_consistency(curve)
    rep.estimates["lower_bound_C"] = C
    rep.checks["lower_bound"] = ok
    rep.metadata["lower_bound_points"] = [[s, bool(v)] for s, v in pts]
    return rep


# -- first steps ---------------------------------------------------------------

def first_step_prob(z, m, n, reps, seed=0, **kw):
    zs = np.atleast_1d(np.asarray(z, dtype=np.float64))
    for zz in zs:
        _rate(zz)
    t0 = time.time()
    ind = first_step_samples(seed, reps, m, n, zs, **kw)
    c = analytic.char_direction(m, n)
    sig = analytic.scale(m, n)
    rep = McReport("first-step", reps, report_only=True,
                   metadata=_meta(seed, z=zs.tolist(), m=m, n=n, zeta=c, sigma=sig))
    rows = []
    for t, zz in enumerate(zs):
        k = int(ind[:, t].sum())
        ph = k / reps
        se = float(binomial_se(ph, reps))
        rep.add_estimate(f"p_hor_{zz:.17g}", ph, se)
        rep.add_estimate(f"p_ver_{zz:.17g}", 1.0 - ph, se)
        s = (zz - c) * sig
        pred = analytic.first_step_prediction(s) if zz > c else math.nan
        nl = -math.log(ph) if ph > 0 else math.inf
        rows.append([zz, s, ph, se, nl, pred])
    rep.tables["first_step"] = Table(["z", "s", "p_hor", "stderr", "neg_log_p", "prediction"], rows)
    rep.metadata["wall_time"] = time.time() - t0
    return rep


def first_step_desk_11(z):
    """P{Zhor > 0} at (1, 1): the horizontal weight Exp(z) beats Exp(1 - z)."""
    return (1.0 - z) / (z + (1.0 - z))


def refined_rate_check(rep, tol=0.35):
    """-ln p within tol (relative) of s^3/6 for every rate above zeta."""
    ok = True
    for zz, s, ph, se, nl, pred in rep.tables["first_step"].rows:
        if not math.isnan(pred):
            good = abs(nl - pred) <= tol * pred
            rep.checks[f"refined_{s:.3g}"] = good
            ok = ok and good
    return ok


# -- exit distributional identity ---------------------------------------------

def exit_identity_samples(seed, reps, z, p, q, m, n, **kw):
    nu = l_shaped(p, q, m + p, n + q)
    _, zp, zm = path_to_point_samples(seed, reps, nu, z, (m + p, n + q), **kw)
    zh, zv = axis_exit_samples(seed, reps, z, z, [(m, n)], stream=COPY, **kw)
    return zp, zm, zh[:, 0], zv[:, 0]


def verify_exit_identity(z, p, q, m, n, reps, seed=0, alpha=ALPHA, **kw):
    _rate(z)
    zp, zm, zh, zv = exit_identity_samples(seed, reps, z, p, q, m, n, **kw)
    rep = McReport("exit-identity", reps, metadata=_meta(seed, z=z, p=p, q=q, m=m, n=n))
    for name, a, b in (("plus", zp, zh), ("minus", zm, zv)):
        d, pv = ks_two_sample(a, b)
        rep.estimates[f"ks_d_{name}"] = d
        rep.estimates[f"ks_p_{name}"] = pv
        rep.checks[f"ks_{name}"] = pv >= alpha
    rep.checks["support"] = bool((zp <= m).all() and (zh <= m).all() and (zm <= n).all()
                                 and (zv <= n).all())
    for name, a in (("path_plus", zp), ("axis_hor", zh), ("path_minus", zm), ("axis_ver", zv)):
        rep.add_estimate(f"mean_{name}", *mean_se(a.astype(np.float64)))
    return rep


# -- deterministic lemmas -------------------------------------------------------

def _dyadic(rng, shape, lo=-8, hi=16, den=8):
    return rng.integers(lo, hi + 1, size=shape) / den


def _frame_path(rng, m, n):
    """Random down-right path with the target (m, n) in its frame."""
    i0 = int(rng.integers(0, m + 1))
    j1 = int(rng.integers(0, n + 1))
    steps = np.array(list("R" * (m - i0) + "D" * (n - j1)))
    rng.shuffle(steps)
    nu = DownRightPath((i0, n), "".join(steps.tolist()), 1)
    return nu.with_base(int(rng.integers(1, len(nu) + 1)))


def check_monotonicity(w, nu, target, p=None, q=None, delta=1.0):
    """Violations of the exit monotonicity under raising w(p, 0) or w(0, q)."""
    zp, zm = lpp.maximal_exits(w, nu, target)
    bad = []
    if p is not None:
        w2 = np.array(w, copy=True)
        w2[p, 0] += delta
        zp2, zm2 = lpp.maximal_exits(w2, nu, target)
        if zp2 < zp or zm2 > zm:
            bad.append(("row", p, (zp, zm), (zp2, zm2)))
    if q is not None:
        w2 = np.array(w, copy=True)
        w2[0, q] += delta
        zp2, zm2 = lpp.maximal_exits(w2, nu, target)
        if zp2 > zp or zm2 < zm:
            bad.append(("column", q, (zp, zm), (zp2, zm2)))
    return bad


def check_crossing(w, i, j, m, n):
    """The four crossing inequalities at (i, j) <= (m, n); w must cover (m+1, n+1)."""
    G = lambda a, b, c, d: lpp.point_to_point(w, (a, b), (c, d)) if a <= c and b <= d else -math.inf
    dh = lambda c, d: G(i, j, c, d) - G(i + 1, j, c, d)
    dv = lambda c, d: G(i, j, c, d) - G(i, j + 1, c, d)
    out = []
    if not dh(m + 1, n) <= dh(m, n) <= dh(m, n + 1):
        out.append(("hor", i, j, m, n, dh(m + 1, n), dh(m, n), dh(m, n + 1)))
    if not dv(m, n + 1) <= dv(m, n) <= dv(m + 1, n):
        out.append(("ver", i, j, m, n, dv(m, n + 1), dv(m, n), dv(m + 1, n)))
    return out


def check_induced(w, nu, target):
    wi, table = lpp.induced_weights(w, nu)
    full = lpp.last_passage_table(w, (0, 0), Rect(0, 0, target[0], target[1]))
    val, rec = lpp.path_to_point(wi, target, nu)
    want = full(target) - full(nu.base_vertex)
    exits = lpp.maximal_exits(w, nu, target)
    ok = val == want and (rec.Zplus, rec.Zminus) == exits
    return ok, (val, want, (rec.Zplus, rec.Zminus), exits)


def check_antidiagonal(eta, n, i0, z=0.5):
    nu = antidiagonal_path(n, i0)
    noise = NoiseField(0, 0, Rect(0, 0, n, n), eta)
    wf = build_weights(noise, PathInduced(nu, z))
    val, _ = lpp.path_to_point(wf, (n, n))
    red = lpp.antidiagonal_reduction(wf, nu, eta)
    return val == red, (val, red)


def check_deterministic_lemmas(trials, seed=0, max_side=8, delta=None):
    """Random small instances; returns a report with zero-violation checks and
    the first counterexample of each kind."""
    require(trials >= 1, "need trials >= 1")
    rng = np.random.default_rng(seed)
    counts = dict(monotonicity=0, crossing=0, induced=0, antidiagonal=0)
    first = {}
    for t in range(trials):
        m, n = (int(v) for v in rng.integers(1, max_side, size=2))
        w = _dyadic(rng, (m + 1, n + 1))
        nu = _frame_path(rng, m, n)
        p = int(rng.integers(0, nu.last[0] + 1))
        q = int(rng.integers(0, nu.first[1] + 1))
        d = float(rng.integers(1, 17) / 8) if delta is None else delta
        bad = check_monotonicity(w, nu, (m, n), p, q, d)
        if bad:
            counts["monotonicity"] += 1
            first.setdefault("monotonicity", dict(w=w.tolist(), path=str(nu), detail=repr(bad)))
        mm, nn = (int(v) for v in rng.integers(0, max_side - 1, size=2))
        wc = _dyadic(rng, (mm + 2, nn + 2))
        i, j = int(rng.integers(0, mm + 1)), int(rng.integers(0, nn + 1))
        bad = check_crossing(wc, i, j, mm, nn)
        if bad:
            counts["crossing"] += 1
            first.setdefault("crossing", dict(w=wc.tolist(), detail=repr(bad)))
        ok, detail = check_induced(w, nu, (m, n))
        if not ok:
            counts["induced"] += 1
            first.setdefault("induced", dict(w=w.tolist(), path=str(nu), detail=repr(detail)))
        na = int(rng.integers(1, max_side))
        eta = rng.integers(1, 49, size=(na + 1, na + 1)) / 16.0
        i0 = int(rng.integers(0, na + 1))
        ok, detail = check_antidiagonal(eta, na, i0)
        if not ok:
            counts["antidiagonal"] += 1
            first.setdefault("antidiagonal", dict(eta=eta.tolist(), i0=i0, detail=repr(detail)))
    rep = McReport("lemmas", trials, metadata=_meta(seed, max_side=max_side))
    for k, v in counts.items():
        rep.estimates[f"violations_{k}"] = v
        rep.checks[k] = v == 0
    if first:
        rep.metadata["counterexamples"] = json.dumps(first)
    return rep
