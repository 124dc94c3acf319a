"""Last-passage tables, geodesics, exit points and path-to-point values.

Everything here works on one realized weight array.  Weights are either a
``WeightField`` or a plain 2-D array ``w[i, j]`` anchored at (0, 0).
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, PreconditionError, require
from .geometry import Rect, axes_path, frame, leq, path_steps, reachable_contains
from .kernels import get

INF = float("inf")


def _field(weights):
    """(array, rect) for either a WeightField or a raw array at the origin."""
    if hasattr(weights, "values") and hasattr(weights, "rect"):
        return np.asarray(weights.values, dtype=np.float64), weights.rect
    arr = np.asarray(weights, dtype=np.float64)
    require(arr.ndim == 2 and arr.size > 0, "weights must be a nonempty 2-D array")
    return arr, Rect(0, 0, arr.shape[0] - 1, arr.shape[1] - 1)


def _block(weights, lo, hi):
    arr, r = _field(weights)
    require(r.contains(lo) and r.contains(hi), f"[{lo}, {hi}] not inside the weights {r}")
    return arr[lo[0] - r.i0:hi[0] - r.i0 + 1, lo[1] - r.j0:hi[1] - r.j0 + 1]


@dataclass(frozen=True)
class LppTable:
    origin: tuple
    rect: Rect
    G: np.ndarray

    def __call__(self, v):
        if not self.rect.contains(v):
            raise ParameterError(f"{v} outside table {self.rect}")
        return float(self.G[v[0] - self.rect.i0, v[1] - self.rect.j0])

    def value(self, v):
        """G(v), or -inf when v does not dominate the origin."""
        if not leq(self.origin, v):
            return -INF
        return self(v)

    def to_csv(self, path):
        np.savetxt(path, self.G.T[::-1], delimiter=",", fmt="%.17g")


def last_passage_table(weights, origin=(0, 0), rect=None, blocked=(), start=0.0):
    """DP table from ``origin`` over ``rect`` (default: up to the weights' corner).

    ``blocked`` cells get weight -inf; used for forced first steps.  ``start``
    is added to the origin weight before anything else is summed.
    """
    arr, wr = _field(weights)
    if rect is None:
        rect = Rect(origin[0], origin[1], wr.i1, wr.j1)
    if not rect.contains(origin):
        raise ParameterError(f"origin {origin} outside {rect}")
    rect = Rect(origin[0], origin[1], rect.i1, rect.j1)
    w = np.array(_block(weights, rect.origin, (rect.i1, rect.j1)), dtype=np.float64)
    for v in blocked:
        if rect.contains(v):
            w[v[0] - rect.i0, v[1] - rect.j0] = -INF
    w[0, 0] = start + w[0, 0]
    G = get("lpp_table")(np.ascontiguousarray(w))
    G.setflags(write=False)
    return LppTable(tuple(origin), rect, G)


def geodesic(table, target):
    """Backtrack from target; strict comparison, exact ties go horizontal."""
    o = table.origin
    if not leq(o, target) or not table.rect.contains(target):
        raise ParameterError(f"target {target} does not dominate origin {o}")
    i, j = target
    path = [(i, j)]
    while (i, j) != o:
        if i == o[0]:
            j -= 1
        elif j == o[1]:
            i -= 1
        elif table((i - 1, j)) >= table((i, j - 1)):
            i -= 1
        else:
            j -= 1
        path.append((i, j))
    return path[::-1]


def all_geodesics(table, target, limit=100000):
    """Every maximizing path from the origin to target (tie DAG enumeration)."""
    o = table.origin
    out = []

    def preds(v):
        i, j = v
        ps = []
        if i > o[0]:
            ps.append((i - 1, j))
        if j > o[1]:
            ps.append((i, j - 1))
        if len(ps) == 2:
            a, b = table(ps[0]), table(ps[1])
            if a > b:
                ps = [ps[0]]
            elif b > a:
                ps = [ps[1]]
        return ps

    stack = [[tuple(target)]]
    while stack:
        rev = stack.pop()
        v = rev[-1]
        if v == o:
            out.append(rev[::-1])
            if len(out) > limit:
                raise ParameterError("too many tied geodesics to enumerate")
            continue
        for p in preds(v):
            stack.append(rev + [p])
    return out


@dataclass(frozen=True)
class ExitRecord:
    Z: int
    Zplus: int
    Zminus: int

    @classmethod
    def from_index(cls, Z, b):
        return cls(Z, max(Z - b, 0), max(b - Z, 0))


def exit_index(pi, nu):
    """1-based index on nu of the last vertex of pi that lies on nu (0 if none)."""
    pos = {v: k for k, v in enumerate(nu.vertices, start=1)}
    z = 0
    for v in pi:
        if tuple(v) in pos:
            z = pos[tuple(v)]
    return z


def exit_record(pi, nu, b=None):
    b = nu.base if b is None else b
    Z = exit_index(pi, nu)
    if Z == 0:
        raise PreconditionError("up-right path does not meet the down-right path")
    return ExitRecord.from_index(Z, b)


def axis_exits(weights, m, n):
    """(Zhor, Zver) of the geodesic from (0, 0) to (m, n)."""
    require(m >= 0 and n >= 0 and (m, n) != (0, 0), "axis exits need (m, n) != (0, 0)")
    table = last_passage_table(weights, (0, 0), Rect(0, 0, m, n))
    pi = geodesic(table, (m, n))
    zh = sum(1 for v in pi if v[1] == 0 and v[0] > 0)
    zv = sum(1 for v in pi if v[0] == 0 and v[1] > 0)
    return zh, zv


def maximal_exits(weights, nu, target, origin=(0, 0)):
    """Maximal (Zplus, Zminus) over all geodesics from origin to target."""
    table = last_passage_table(weights, origin, Rect(origin[0], origin[1], target[0], target[1]))
    b = nu.base
    zp = zm = 0
    for pi in all_geodesics(table, target):
        Z = exit_index(pi, nu)
        if Z == 0:
            raise PreconditionError("geodesic misses the down-right path")
        zp, zm = max(zp, Z - b), max(zm, b - Z)
    return zp, zm


def point_to_point(weights, src, dst):
    if not leq(src, dst):
        return -INF
    return last_passage_table(weights, src, Rect(src[0], src[1], dst[0], dst[1]))(dst)


def increments(weights, i, j, target):
    """(Bhor, Bver) = (G_{i,j} - G_{i+1,j}, G_{i,j} - G_{i,j+1}) at target,
    +inf when the shifted origin leaves the rectangle."""
    m, n = target
    require(0 <= i <= m and 0 <= j <= n, f"({i}, {j}) outside [0, {m}] x [0, {n}]")
    g = point_to_point(weights, (i, j), target)
    bh = INF if i == m else g - point_to_point(weights, (i + 1, j), target)
    bv = INF if j == n else g - point_to_point(weights, (i, j + 1), target)
    return bh, bv


def forced_step(nu, k):
    """Forced first step out of nu_k (1-based): (1, 0), (0, 1) or None."""
    R, D = path_steps(nu)
    b = nu.base
    if k > b and k in D:
        return (1, 0)
    if k < b and k in R:
        return (0, 1)
    return None


def restricted_last_passage(weights, nu, k, target, start=0.0):
    """Best path from nu_k to target honoring the forced first step; -inf if none.

    A nonzero ``start`` is accumulated first, ahead of the path weights.
    """
    src = nu[k]
    if not leq(src, target):
        return -INF
    step = forced_step(nu, k)
    rect = Rect(src[0], src[1], target[0], target[1])
    if step is None:
        return last_passage_table(weights, src, rect, start=start)(target)
    if tuple(target) == src:
        return -INF
    if step == (1, 0):
        blocked = [(src[0], jj) for jj in range(src[1] + 1, target[1] + 1)]
    else:
        blocked = [(ii, src[1]) for ii in range(src[0] + 1, target[0] + 1)]
    return last_passage_table(weights, src, rect, blocked=blocked, start=start)(target)


def _path_sums(nu, wvals):
    """Signed-path prefix terms: for k > b the sum of w(nu_b..nu_{k-1}), for
    k < b the sum of w(nu_{k+1}..nu_b), accumulated outward from the base."""
    b, ell = nu.base, len(nu)
    A = np.zeros(ell + 1)
    acc = 0.0
    for k in range(b + 1, ell + 1):
        acc = acc + wvals[k - 1]
        A[k] = acc
    acc = 0.0
    for k in range(b - 1, 0, -1):
        acc = acc + wvals[k + 1]
        A[k] = acc
    return A


def path_to_point_terms(weights, nu, target):
    """Per-index terms of the path-to-point maximum (index 0 unused)."""
    arr, r = _field(weights)
    wv = [None] + [float(arr[v[0] - r.i0, v[1] - r.j0]) for v in nu.vertices]
    A = _path_sums(nu, wv)
    terms = np.full(len(nu) + 1, -INF)
    for k in range(1, len(nu) + 1):
        terms[k] = restricted_last_passage(weights, nu, k, target, start=A[k])
    return terms


def path_to_point(weights, target, nu=None):
    """Path-to-point value and maximal exit record.

    ``nu`` defaults to the path of a path-induced recipe.  Among all exact
    maximizers the largest positive and negative offsets are reported; Z is
    the index achieving the larger of them (the positive side on a tie).
    """
    if nu is None:
        nu = weights.recipe.path
    if not reachable_contains(nu, target):
        raise PreconditionError(f"target {target} is not reachable from the path")
    terms = path_to_point_terms(weights, nu, target)
    best = terms[1:].max()
    ks = [k for k in range(1, len(nu) + 1) if terms[k] == best]
    b = nu.base
    zp = max(max(k - b, 0) for k in ks)
    zm = max(max(b - k, 0) for k in ks)
    Z = b + zp if zp > 0 or zm == 0 else b - zm
    return float(best), ExitRecord(Z, zp, zm)


def induced_weights(weights, nu, origin=(0, 0)):
    """Weights with nu vertices replaced by successive G increments along nu."""
    arr, r = _field(weights)
    u, top = frame(nu)
    table = last_passage_table(weights, origin, Rect(origin[0], origin[1], u, top))
    out = np.array(arr, dtype=np.float64, copy=True)
    b = nu.base
    for k in range(1, len(nu) + 1):
        v = nu[k]
        if k > b:
            val = table(v) - table(nu[k - 1])
        elif k < b:
            val = table(v) - table(nu[k + 1])
        else:
            val = 0.0
        out[v[0] - r.i0, v[1] - r.j0] = val
    return out, table


def antidiagonal_reduction(weights, nu, eta):
    """Right side of the line-to-point identity on the antidiagonal path:
    max over i in 0..n of S_i + G'_{(i, n-i)}(n, n), where G' uses the raw
    noise off the path and zero on it."""
    n = nu.first[1]
    arr, r = _field(weights)
    w = lambda k: float(arr[nu[k][0] - r.i0, nu[k][1] - r.j0])
    i0 = (nu.base - 1) // 2
    eta_arr, er = _field(eta)
    wprime = np.array(eta_arr, dtype=np.float64, copy=True)
    for v in nu.vertices:
        wprime[v[0] - er.i0, v[1] - er.j0] = 0.0
    best = -INF
    for i in range(0, n + 1):
        s = 0.0
        if i > i0:
            for t in range(i0 + 1, i + 1):
                s = s + (w(2 * t) + w(2 * t + 1))
        elif i < i0:
            for t in range(i + 1, i0 + 1):
                s = s + (w(2 * t) + w(2 * t - 1))
        g = point_to_point(wprime, (i, n - i), (n, n))
        best = max(best, s + g)
    return best


def brute_force_lpp(weights, src, dst):
    """Exhaustive maximum over up-right paths, summing in path order."""
    from .geometry import lattice_paths
    arr, r = _field(weights)
    best = -INF
    for p in lattice_paths(tuple(src), tuple(dst)):
        s = 0.0
        for v in p:
            s = s + arr[v[0] - r.i0, v[1] - r.j0]
        best = max(best, s)
    return best


def brute_force_restricted(weights, nu, k, target, start=0.0):
    from .geometry import lattice_paths
    arr, r = _field(weights)
    src = nu[k]
    step = forced_step(nu, k)
    best = -INF
    for p in lattice_paths(src, tuple(target)):
        if step is not None and (len(p) < 2 or (p[1][0] - p[0][0], p[1][1] - p[0][1]) != step):
            continue
        s = start
        for v in p:
            s = s + arr[v[0] - r.i0, v[1] - r.j0]
        best = max(best, s)
    return best


def brute_force_path_to_point(weights, nu, target):
    arr, r = _field(weights)
    wv = [None] + [float(arr[v[0] - r.i0, v[1] - r.j0]) for v in nu.vertices]
    A = _path_sums(nu, wv)
    terms = [-INF] + [brute_force_restricted(weights, nu, k, target, start=A[k])
                      for k in range(1, len(nu) + 1)]
    return max(terms[1:]), terms


def axes_exit_record(weights, m, n):
    """Exit record of the geodesic to (m, n) from the axes path based at the origin."""
    nu = axes_path(m, n)
    table = last_passage_table(weights, (0, 0), Rect(0, 0, m, n))
    return exit_record(geodesic(table, (m, n)), nu)
