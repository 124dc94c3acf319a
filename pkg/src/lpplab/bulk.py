"""Experiments on the i.i.d. bulk model: transversal fluctuations, Busemann
increments and competition interfaces."""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import _fallback, analytic, lpp
from .errors import InvariantError, ParameterError, PreconditionError, require
from .geometry import Rect, antidiagonal_path, path_steps, reachable_contains
from .noise import COPY
from .report import McReport, Table
from .sampling import (axis_exit_samples, bulk_reverse, path_exit_samples, sweep,
                       triangle_count_samples)
from .stationary import _meta, tail_curve
from .stats import ALPHA, binomial_se, ks_exponential, ks_two_sample, loglog_slope

BUSEMANN_EPS = 0.5
CONVERGENCE_COLUMNS = ["n", "x", "p_hat", "limit", "abs_err"]


@dataclass
class ConvergenceReport:
    """Sup distance between empirical and limiting CDFs along a size ladder."""
    ns: list
    distances: list
    slope: float
    rows: list = field(default_factory=list)

    def __post_init__(self):
        d = np.asarray(self.distances, dtype=np.float64)
        if d.size and not ((d >= 0) & (d <= 1)).all():
            raise InvariantError("CDF distances must lie in [0, 1]")

    def table(self):
        return Table(list(CONVERGENCE_COLUMNS), [list(r) for r in self.rows])


def _convergence(ns, rows):
    """Group (n, x, p_hat, limit, abs_err) rows by n into a ConvergenceReport."""
    ns = list(ns)
    dist = [max(r[4] for r in rows if r[0] == n) for n in ns]
    slope = loglog_slope(ns, dist) if len(ns) >= 2 and min(dist) > 0 else math.nan
    return ConvergenceReport(ns, dist, slope, rows)


# -- transversal fluctuations -------------------------------------------------

def colinearity(nu, m, n):
    """|zeta(m + i0 + 1, n + j0 + 1) - zeta(m, n)| (m + n)^(1/3): the smallest
    product eps0 * s for which the base vertex counts as colinear."""
    i0, j0 = nu.base_vertex
    d = abs(analytic.char_direction(m + i0 + 1, n + j0 + 1) - analytic.char_direction(m, n))
    return d * (m + n) ** (1.0 / 3.0)


def transversal_fluct(nu, m, n, s_grid, reps, seed=0, side="+", **kw):
    """Exit offsets of bulk geodesics (the w = 1, z = 0 boundary model) across nu.

    Same exceedance curve as the stationary exit tail, target (m + i0, n + j0).
    The colinearity of the base vertex is reported, not enforced."""
    require(m >= 1 and n >= 1, "transversal fluctuations need m, n >= 1")
    i0, j0 = nu.base_vertex
    target = (m + i0, n + j0)
    if not reachable_contains(nu, target):
        raise PreconditionError(f"target {target} is not reachable from the path")
    zp, zm = path_exit_samples(seed, reps, 1.0, 0.0, nu, target, **kw)
    curve = tail_curve(zp if side == "+" else zm, s_grid, (m + n) ** (2.0 / 3.0), reps)
    curve.extra.update(path_length=len(nu), colinearity=colinearity(nu, m, n))
    return curve


def bulk_boundary_samples(seed, reps, m, n, r0=0, **kw):
    """Two independent samples: the w = 1, z = 0 boundary value at (m, n), and
    the bulk value from (1, 1) to (m + 1, n + 1) minus the weight at (1, 1)."""
    a = sweep(seed, reps, 1.0, 1.0, [(m, n)], r0=r0, **kw)[0][:, 0]
    g = sweep(seed, reps, 1.0, 1.0, [(m, n)], offset=(1, 1), origin_noise=True,
              r0=r0, stream=COPY, **kw)[0][:, 0]
    reps_idx = np.arange(r0, r0 + reps, dtype=np.uint64)
    return a, g - _fallback.point(seed, reps_idx, COPY, 1, 1)


def verify_bulk_boundary(m, n, reps, seed=0, alpha=ALPHA, **kw):
    t0 = time.time()
    a, b = bulk_boundary_samples(seed, reps, m, n, **kw)
    d, p = ks_two_sample(a, b)
    rep = McReport("bulk-boundary", reps, metadata=_meta(seed, m=m, n=n))
    rep.estimates.update(ks_d=d, ks_p=p)
    rep.checks["ks"] = p >= alpha
    rep.metadata["wall_time"] = time.time() - t0
    return rep


def midpoint_displacement(N, reps, seed=0, **kw):
    """i - j at the exit of the bulk geodesic (1, 1) -> (N, N) through the
    staircase around the middle antidiagonal."""
    require(N >= 2, "midpoint displacement needs N >= 2")
    L = N - 1
    nu = antidiagonal_path(L)
    V = np.array(nu.vertices, dtype=np.int64)
    _, lab = sweep(seed, reps, 1.0, 1.0, [(L, L)], M=L, N=L, offset=(1, 1),
                   origin_noise=True, marks=nu, **kw)
    lab = lab[:, 0]
    if (lab < 0).any():
        raise InvariantError("a bulk geodesic missed the middle staircase")
    return V[lab, 0] - V[lab, 1]


def midpoint_exponent(Ns=(250, 500, 1000, 2000), reps=4000, seed=0, band=(0.57, 0.77), **kw):
    """Log-log slope of the midpoint displacement std against N (target 2/3)."""
    t0 = time.time()
    Ns = [int(x) for x in Ns]
    rep = McReport("fluctuation", reps, metadata=_meta(seed, Ns=Ns))
    stds = []
    for N in Ns:
        d = midpoint_displacement(N, reps, seed, **kw).astype(np.float64)
        sd = float(d.std(ddof=1))
        stds.append(sd)
        rep.add_estimate(f"std_{N}", sd, sd / math.sqrt(2.0 * (reps - 1)))
        rep.estimates[f"mean_{N}"] = float(d.mean())
    slope = loglog_slope(Ns, stds)
    rep.estimates["slope"] = slope
    rep.checks["slope_band"] = band[0] <= slope <= band[1]
    rep.tables["midpoint"] = Table(["n", "std"], [[N, s] for N, s in zip(Ns, stds)])
    rep.metadata.update(target_slope=2.0 / 3.0, wall_time=time.time() - t0)
    return rep


# -- Busemann increments --------------------------------------------------------

def check_busemann_box(nu, m, n, eps=BUSEMANN_EPS):
    hi = eps * (m + n) ** (2.0 / 3.0)
    for v in nu.vertices:
        if not (1 <= v[0] <= hi and 1 <= v[1] <= hi):
            raise PreconditionError(
                f"path vertex {v} outside [1, {hi:.3g}]^2 required for the Busemann bound at ({m}, {n})")


def busemann_samples(seed, reps, nu, m, n, **kw):
    """Horizontal increments at the right-step vertices and vertical increments
    at the down-step vertices of nu, toward (m, n): arrays (reps, p), (reps, q)."""
    R, D = path_steps(nu)
    H = bulk_reverse(seed, reps, m, n, list(nu.vertices), **kw)
    bh = np.stack([H[:, r - 1] - H[:, r] for r in sorted(R)], axis=1) if R else np.empty((reps, 0))
    bv = np.stack([H[:, d - 1] - H[:, d - 2] for d in sorted(D)], axis=1) if D else np.empty((reps, 0))
    return bh, bv


def busemann_prob(bh, bv, s, t, kind="hor"):
    """Empirical joint probability matching busemann_cdf(kind, ...)."""
    s = np.asarray(s, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if kind == "hor":
        ok = (bh >= -s).all(axis=1) & (bv <= t).all(axis=1)
    elif kind == "ver":
        ok = (bh <= s).all(axis=1) & (bv >= -t).all(axis=1)
    else:
        raise ParameterError(f"kind must be 'hor' or 'ver', got {kind!r}")
    return float(ok.mean())


def busemann_experiment(nu, sizes, s, t, reps, seed=0, eps=BUSEMANN_EPS, scales=(0.5, 1.0, 2.0),
                        **kw):
    """Empirical Busemann CDFs against the product limit at zeta(m, n).

    Each size (m, n) contributes the sup over kinds and over the evaluation
    points c * (s, t), c in scales; the ver kind is read at the mirrored
    point -c * (s, t), where it is not trivially zero.  The convergence
    tables use n = m + n and x = c.
    """
    t0 = time.time()
    R, D = path_steps(nu)
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    t = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if s.size != len(R) or t.size != len(D):
        raise ParameterError(f"path has {len(R)} right and {len(D)} down steps; "
                             f"got {s.size} s values and {t.size} t values")
    sizes = [(int(a), int(b)) for a, b in sizes]
    for m, n in sizes:
        check_busemann_box(nu, m, n, eps)
    rows = {"hor": [], "ver": []}
    for m, n in sizes:
        bh, bv = busemann_samples(seed, reps, nu, m, n, **kw)
        c = analytic.char_direction(m, n)
        for kind in ("hor", "ver"):
            sg = 1.0 if kind == "hor" else -1.0
            for sc in scales:
                p = busemann_prob(bh, bv, sg * sc * s, sg * sc * t, kind)
                f = analytic.busemann_cdf(kind, c, sg * sc * s, sg * sc * t)
                rows[kind].append([m + n, float(sc), p, f, abs(p - f)])
    ns = [m + n for m, n in sizes]
    both = [[r[0], r[1], r[2], r[3], r[4]] for r in rows["hor"] + rows["ver"]]
    conv = _convergence(ns, both)
    rep = McReport("busemann", reps, metadata=_meta(seed, path=str(nu), sizes=sizes,
                                                     s=s.tolist(), t=t.tolist(), eps=eps))
    for n_, d in zip(ns, conv.distances):
        rep.add_estimate(f"distance_{n_}", d, 0.5 / math.sqrt(reps))
    rep.estimates["slope"] = conv.slope
    if len(ns) >= 2:
        rep.checks["largest_beats_smallest"] = conv.distances[-1] < conv.distances[0]
    rep.tables["convergence"] = Table(list(CONVERGENCE_COLUMNS), rows["hor"])
    rep.tables["convergence_ver"] = Table(list(CONVERGENCE_COLUMNS), rows["ver"])
    rep.metadata.update(target_slope=-1.0 / 3.0, wall_time=time.time() - t0)
    rep.convergence = conv
    return rep


def busemann_marginal(N, reps, seed=0, alpha=ALPHA, **kw):
    """KS of G_{1,1}(N, N) - G_{2,1}(N, N) against Exp(zeta(N, N))."""
    t0 = time.time()
    H = bulk_reverse(seed, reps, N, N, [(1, 1), (2, 1)], **kw)
    b = H[:, 0] - H[:, 1]
    c = analytic.char_direction(N, N)
    d, p = ks_exponential(b, c)
    rep = McReport("busemann-marginal", reps, metadata=_meta(seed, N=N))
    rep.estimates.update(ks_d=d, ks_p=p, mean=float(b.mean()), limit_mean=1.0 / c)
    rep.checks["ks"] = p >= alpha
    rep.metadata["wall_time"] = time.time() - t0
    return rep


# -- competition interface -------------------------------------------------------

@dataclass
class CifPath:
    """Interface points; start 1 for the bulk (phi_1 = (1, 1)), 0 for the
    boundary model (phi_0 = (0, 0))."""
    points: np.ndarray
    start: int = 1

    def __len__(self):
        return len(self.points)

    def __getitem__(self, n):
        return tuple(int(v) for v in self.points[n - self.start])

    def check(self):
        P = np.asarray(self.points)
        first = (1, 1) if self.start == 1 else (0, 0)
        if tuple(P[0]) != first:
            raise InvariantError(f"interface starts at {tuple(P[0])}, expected {first}")
        ns = np.arange(self.start, self.start + len(P))
        want = ns + 1 if self.start == 1 else ns
        if (P.sum(axis=1) != want).any():
            raise InvariantError("interface left its antidiagonal")
        d = np.diff(P, axis=0)
        if len(d) and not (((d == [1, 0]) | (d == [0, 1])).all(axis=1)).all():
            raise InvariantError("interface step is not a unit step")
        return True


def _bulk_array(weights):
    """Weights as an array indexed from 0 with the bulk in [1, .] x [1, .]."""
    if hasattr(weights, "values") and hasattr(weights, "rect"):
        return weights
    a = np.asarray(weights, dtype=np.float64)
    out = np.zeros((a.shape[0] + 1, a.shape[1] + 1))
    out[1:, 1:] = a
    return out


def _walk(table, first, steps=None):
    """Interface by the minimal-increment rule; with steps None, walk until
    the next comparison would leave the table."""
    phi = [first]
    r = table.rect
    while steps is None or len(phi) <= steps:
        i, j = phi[-1]
        if steps is None and (i >= r.i1 or j >= r.j1):
            break
        gh, gv = table.value((i + 1, j)), table.value((i, j + 1))
        phi.append((i, j + 1) if gv < gh else (i + 1, j))
    return np.array(phi, dtype=np.int64)


def cif_simulate(weights, N):
    """Bulk interface phi_1..phi_N by the local recursion on G from (1, 1).

    ``weights`` is a WeightField covering [1, N] x [1, N] or an array with
    a[i-1, j-1] the weight of (i, j).  Exact ties move horizontally.
    """
    require(N >= 1, "interface needs N >= 1")
    w = _bulk_array(weights)
    table = lpp.last_passage_table(w, (1, 1), Rect(1, 1, N, N))
    return CifPath(_walk(table, (1, 1), N - 1), 1)


def tree_sets(weights, N):
    """Boolean array hor[k, l] for k, l in 0..N: True when G_{2,1}(k, l) > G_{1,2}(k, l)
    (the tree through (2, 1)); cells below k + l = 3 are False."""
    w = _bulk_array(weights)
    t21 = lpp.last_passage_table(w, (2, 1), Rect(2, 1, N, N))
    t12 = lpp.last_passage_table(w, (1, 2), Rect(1, 2, N, N))
    hor = np.zeros((N + 1, N + 1), dtype=bool)
    ver = np.zeros((N + 1, N + 1), dtype=bool)
    for k in range(1, N + 1):
        for l in range(1, N + 1):
            if k + l < 3:
                continue
            a, b = t21.value((k, l)), t12.value((k, l))
            hor[k, l], ver[k, l] = a > b, a < b
    return hor, ver


def check_cif_consistency(weights, N):
    """Violations of (phi + e1) in the hor tree and (phi + e2) in the ver tree."""
    path = cif_simulate(weights, N)
    path.check()
    hor, ver = tree_sets(weights, N)
    bad = []
    for n in range(1, N):
        i, j = path[n]
        if i + 1 <= N and not hor[i + 1, j]:
            bad.append((n, "hor"))
        if j + 1 <= N and not ver[i, j + 1]:
            bad.append((n, "ver"))
    return bad


def check_tree_monotone(weights, N):
    """(k, l) in the hor tree forces every (k', l') with k' >= k, l' <= l in it."""
    hor, ver = tree_sets(weights, N)
    bad = []
    for k in range(1, N + 1):
        for l in range(1, N + 1):
            if hor[k, l]:
                blk = hor[k:, 1:l + 1]
                if not blk.all():
                    bad.append((k, l))
            if ver[k, l]:
                blk = ver[1:k + 1, l:]
                if not blk.all():
                    bad.append((k, l))
    return bad


def cif_samples(seed, reps, ns, **kw):
    """phi_n^hor for each n: the number of cells of the local antidiagonal n
    (bulk shifted by (1, 1)) whose geodesic starts vertically."""
    ns = np.asarray(ns, dtype=np.int64)
    require((ns >= 1).all(), "interface steps start at n = 1")
    return triangle_count_samples(seed, reps, int(ns.max()), ns, 1.0, 1.0, (1, 1), **kw)


def _cif_rows(H, ns, xs, limit):
    rows = []
    for a, n in enumerate(ns):
        for x in xs:
            p = float((H[:, a] <= n * x).mean())
            f = limit(x)
            rows.append([int(n), float(x), p, f, abs(p - f)])
    return rows


def cif_pilot(ns, xs, reps, seed=0, r0=None, margin=3.0, **kw):
    """Thresholds per n from a pilot on a disjoint replica range: pilot
    distance plus margin binomial standard errors at p = 1/2."""
    r0 = 10 ** 9 if r0 is None else r0
    H = cif_samples(seed, reps, ns, r0=r0, **kw)
    conv = _convergence(ns, _cif_rows(H, ns, xs, lambda x: analytic.char_direction(x, 1 - x)))
    pad = margin * 0.5 / math.sqrt(reps)
    return {int(n): d + pad for n, d in zip(ns, conv.distances)}


def cif_experiment(ns=(250, 500, 1000, 2000, 4000), xs=None, reps=10000, seed=0, delta=0.1,
                   band=(-0.48, -0.18), thresholds=None, pilot_reps=None, **kw):
    """Empirical P{phi_n^hor <= n x} against zeta(x, 1 - x)."""
    t0 = time.time()
    xs = np.linspace(delta, 1 - delta, 17) if xs is None else np.asarray(xs, dtype=np.float64)
    require(((xs >= delta) & (xs <= 1 - delta)).all(), f"x grid must lie in [{delta}, {1 - delta}]")
    ns = [int(n) for n in ns]
    if thresholds is None:
        pilot_reps = pilot_reps or max(reps // 10, 200)
        thresholds = cif_pilot(ns, xs, pilot_reps, seed, **kw)
    H = cif_samples(seed, reps, ns, **kw)
    conv = _convergence(ns, _cif_rows(H, ns, xs, lambda x: analytic.char_direction(x, 1 - x)))
    rep = McReport("cif", reps, metadata=_meta(seed, ns=ns, xs=xs.tolist(),
                                                thresholds={str(k): v for k, v in thresholds.items()}))
    for n, d in zip(ns, conv.distances):
        rep.add_estimate(f"distance_{n}", d, 0.5 / math.sqrt(reps))
    rep.estimates["slope"] = conv.slope
    d = conv.distances
    rep.checks["strictly_decreasing"] = all(a > b for a, b in zip(d, d[1:]))
    rep.checks["slope_band"] = band[0] <= conv.slope <= band[1]
    for n, dn in zip(ns, d):
        if n in thresholds and n == 2000:
            rep.checks["pilot_threshold_2000"] = dn <= thresholds[n]
    rep.tables["convergence"] = conv.table()
    rep.metadata.update(target_slope=-1.0 / 3.0, wall_time=time.time() - t0)
    rep.convergence = conv
    return rep


# -- stationary interface ----------------------------------------------------------

def _rates(w, z):
    if not (0 < w <= 1 and 0 <= z < 1):
        raise ParameterError(f"boundary interface needs w in (0, 1] and z in [0, 1), got {(w, z)}")


def stationary_cif_walk(table, n=None):
    """phi-hat_0..phi-hat_n from a boundary-model table by the local recursion;
    n None walks to the edge of the table."""
    return CifPath(_walk(table, (0, 0), n), 0)


def stationary_cif_samples(seed, reps, w, z, n, **kw):
    """phi-hat_n^hor: one less than the number of cells on antidiagonal n + 1
    whose geodesic leaves the origin vertically."""
    _rates(w, z)
    out = triangle_count_samples(seed, reps, n + 1, [n + 1], w, 1.0 - z, (0, 0), **kw)
    return out[:, 0] - 1


def _triangle(n):
    return [(i, j) for i in range(n + 2) for j in range(n + 2 - i)]


def check_stationary_equivalences(w, z, n, reps, seed=0, **kw):
    """Per realization: the interface from the local recursion on the sampled
    values, checked against the axis exits on antidiagonal n + 1 and against
    the tree count.  Returns a McReport with violation counts."""
    _rates(w, z)
    t0 = time.time()
    pts = _triangle(n)
    G = sweep(seed, reps, w, 1.0 - z, pts, **kw)[0]
    dense = np.full((reps, n + 2, n + 2), np.nan)
    P = np.array(pts)
    dense[:, P[:, 0], P[:, 1]] = G
    phi = np.zeros((reps, 2), dtype=np.int64)
    r = np.arange(reps)
    for _ in range(n):
        gh = dense[r, phi[:, 0] + 1, phi[:, 1]]
        gv = dense[r, phi[:, 0], phi[:, 1] + 1]
        up = gv < gh
        phi[:, 0] += ~up
        phi[:, 1] += up
    ph = phi[:, 0]
    ks_lt = np.arange(0, n + 2)
    ks_gt = np.arange(0, n + 1)
    targets = [(k, n - k + 1) for k in ks_lt] + [(k + 1, n - k) for k in ks_gt]
    zh, zv = axis_exit_samples(seed, reps, w, z, targets, **kw)
    a = len(ks_lt)
    lt_bad = ((ph[:, None] < ks_lt[None, :]) != (zh[:, :a] > 0)).sum()
    gt_bad = ((ph[:, None] > ks_gt[None, :]) != (zv[:, a:] > 0)).sum()
    tree = stationary_cif_samples(seed, reps, w, z, n, **kw)
    tree_bad = (tree != ph).sum()
    rep = McReport("cif-equivalence", reps, metadata=_meta(seed, w=w, z=z, n=n))
    rep.estimates.update(violations_below=int(lt_bad), violations_above=int(gt_bad),
                         tree_mismatches=int(tree_bad))
    rep.checks["below"] = lt_bad == 0
    rep.checks["above"] = gt_bad == 0
    rep.checks["tree_count"] = tree_bad == 0
    rep.metadata["wall_time"] = time.time() - t0
    return rep


def stationary_cif(w, z, n, reps, xs, seed=0, tol=None, **kw):
    """Empirical P{phi-hat_n^hor <= n x} against the limit for the boundary model;
    with ``tol`` each point is checked to lie within tol of the limit."""
    _rates(w, z)
    t0 = time.time()
    xs = np.atleast_1d(np.asarray(xs, dtype=np.float64))
    H = stationary_cif_samples(seed, reps, w, z, n, **kw)[:, None]
    rows = _cif_rows(H, [n], xs, lambda x: analytic.cif_limit_cdf(w, z, x))
    conv = _convergence([n], rows)
    rep = McReport("cif-stationary", reps, metadata=_meta(seed, w=w, z=z, n=n, xs=xs.tolist()))
    for row in rows:
        rep.add_estimate(f"p_{row[1]:g}", row[2], float(binomial_se(row[2], reps)))
        rep.estimates[f"limit_{row[1]:g}"] = row[3]
    rep.estimates["distance"] = conv.distances[0]
    if tol is not None:
        rep.checks["within_tol"] = conv.distances[0] <= tol
    else:
        rep.report_only = True
    rep.tables["convergence"] = conv.table()
    rep.metadata["wall_time"] = time.time() - t0
    rep.convergence = conv
    return rep
