"""Replica-batched samplers built on the sweep kernels.

All samplers draw replicas ``r0 .. r0 + reps - 1`` of the noise keyed by
``seed``; nothing is stored between calls, and splitting a replica range
across calls or threads reproduces the same samples.
"""

import numpy as np

from .errors import ParameterError, PreconditionError, require
from .geometry import axes_path, reachable_contains
from .kernels import get, run_replicas
from .noise import MAIN
from .weights import path_coefficients

_I64 = np.int64


def _reps(reps):
    reps = int(reps)
    if reps < 1:
        raise ParameterError(f"reps must be >= 1, got {reps}")
    return reps


def _column_marks(nu, M, di=0, dj=0):
    """Marking arrays for forward_sweep: per local column the path row range
    and the 0-based index of its highest vertex; empty columns get lo > hi."""
    mlo = np.ones(M + 1, dtype=_I64)
    mhi = np.zeros(M + 1, dtype=_I64)
    mk = np.zeros(M + 1, dtype=_I64)
    if nu is None:
        return mlo, mhi, mk
    for col, lo, hi, k0 in nu.column_ranges():
        a = col - di
        require(0 <= a <= M and lo - dj >= 0, "marked path leaves the sweep rectangle")
        mlo[a], mhi[a], mk[a] = lo - dj, hi - dj, k0
    return mlo, mhi, mk


def sweep(seed, reps, hdiv, vdiv, points, *, M=None, N=None, offset=(0, 0),
          origin_noise=False, marks=None, r0=0, stream=MAIN, threads=None, impl=None):
    """Last-passage values and labels at ``points`` (local coordinates).

    The local rectangle is [0, M] x [0, N] reading noise at offset + (a, b);
    row 0 is divided by ``hdiv`` and column 0 by ``vdiv``.  With ``marks`` (a
    down-right path in local coordinates) the label of a point is the
    0-based index of the last path vertex on its geodesic, -1 if none.
    """
    reps = _reps(reps)
    pts = np.asarray(points, dtype=_I64).reshape(-1, 2)
    require(len(pts) > 0 and (pts >= 0).all(), "need nonnegative query points")
    M = int(pts[:, 0].max()) if M is None else int(M)
    N = int(pts[:, 1].max()) if N is None else int(N)
    require((pts[:, 0] <= M).all() and (pts[:, 1] <= N).all(), "query outside the sweep")
    order = np.argsort(pts[:, 0], kind="stable")
    qa = np.ascontiguousarray(pts[order, 0])
    qb = np.ascontiguousarray(pts[order, 1])
    mlo, mhi, mk = _column_marks(marks, M)
    g = np.empty((reps, len(pts)))
    lab = np.empty((reps, len(pts)), dtype=_I64)
    fn = get("forward_sweep", impl)
    run_replicas(fn, r0, r0 + reps, [g, lab],
                 lambda lo, hi: (seed, lo, hi, stream, M, N, offset[0], offset[1],
                                 float(hdiv), float(vdiv), bool(origin_noise),
                                 mlo, mhi, mk, qa, qb), threads)
    inv = np.empty_like(order)
    inv[order] = np.arange(len(order))
    return g[:, inv], lab[:, inv]


def stationary_values(seed, reps, w, z, points, **kw):
    """Two-parameter model values at each point, shape (reps, len(points))."""
    return sweep(seed, reps, w, 1.0 - z, points, **kw)[0]


def axis_exit_samples(seed, reps, w, z, targets, **kw):
    """(Zhor, Zver) of the geodesics from the origin to each target."""
    pts = np.asarray(targets, dtype=_I64).reshape(-1, 2)
    M, N = int(pts[:, 0].max()), int(pts[:, 1].max())
    nu = axes_path(M, N)
    _, lab = sweep(seed, reps, w, 1.0 - z, pts, M=M, N=N, marks=nu, **kw)
    off = lab - N
    zh = np.maximum(off, 0)
    zv = np.maximum(-off, 0)
    return zh, zv


def path_exit_samples(seed, reps, w, z, nu, target, **kw):
    """(Zplus, Zminus) of the two-parameter geodesic from the origin crossing nu."""
    require(reachable_contains(nu, target), f"target {target} is not reachable from the path")
    require(nu.last[1] >= 0 and nu.first[0] >= 0, "path outside the quadrant")
    M, N = int(target[0]), int(target[1])
    require(any(v[0] <= M and v[1] <= N for v in nu.vertices), "path misses the target rectangle")
    # the geodesic only meets vertices inside [0, M] x [0, N]; marks there suffice
    sub = _clip(nu, M, N)
    _, lab = sweep(seed, reps, w, 1.0 - z, [target], M=M, N=N, marks=sub, **kw)
    lab = lab[:, 0]
    if (lab < 0).any():
        raise PreconditionError("a geodesic missed the down-right path")
    k = lab + _clip_shift(nu, M, N) + 1
    return np.maximum(k - nu.base, 0), np.maximum(nu.base - k, 0)


def _clip_range(nu, M, N):
    ks = [k for k, v in enumerate(nu.vertices) if v[0] <= M and v[1] <= N]
    return ks[0], ks[-1]


def _clip(nu, M, N):
    from .geometry import DownRightPath
    a, b = _clip_range(nu, M, N)
    return DownRightPath(nu.vertices[a], nu.steps[a:b], 1)


def _clip_shift(nu, M, N):
    return _clip_range(nu, M, N)[0]


def path_to_point_samples(seed, reps, nu, z, target, r0=0, stream=MAIN, threads=None, impl=None):
    """Path-to-point values and exit records under the path-induced recipe.

    Returns (value, Zplus, Zminus) arrays of length reps.
    """
    reps = _reps(reps)
    require(0 < z < 1, f"path-induced recipe needs z in (0,1), got {z}")
    if not reachable_contains(nu, target):
        raise PreconditionError(f"target {target} is not reachable from the path")
    sgn, div, kind = path_coefficients(nu, z)
    cols = nu.column_ranges()
    u0, u1 = cols[0][0], cols[-1][0]
    vtop = nu.first[1]
    clo = np.array([c[1] for c in cols], dtype=_I64)
    chi = np.array([c[2] for c in cols], dtype=_I64)
    ck = np.array([c[3] for c in cols], dtype=_I64)
    pi = np.array([v[0] for v in nu.vertices], dtype=_I64)
    pj = np.array([v[1] for v in nu.vertices], dtype=_I64)
    val = np.empty(reps)
    k = np.empty(reps, dtype=_I64)
    fn = get("path_sweep", impl)
    run_replicas(fn, r0, r0 + reps, [val, k],
                 lambda lo, hi: (seed, lo, hi, stream, u0, u1, vtop, clo, chi, ck, pi, pj,
                                 np.ascontiguousarray(sgn), np.ascontiguousarray(div),
                                 np.ascontiguousarray(kind), nu.base - 1,
                                 int(target[0]), int(target[1])), threads)
    k1 = k + 1
    return val, np.maximum(k1 - nu.base, 0), np.maximum(nu.base - k1, 0)


def bulk_reverse(seed, reps, m, n, queries, imin=1, jmin=1, r0=0, stream=MAIN, threads=None,
                 impl=None):
    """Bulk last-passage values from each query vertex to (m, n) over cells
    with i >= imin, j >= jmin; shape (reps, len(queries))."""
    reps = _reps(reps)
    q = np.asarray(queries, dtype=_I64).reshape(-1, 2)
    require(((q[:, 0] >= imin) & (q[:, 0] <= m) & (q[:, 1] >= jmin) & (q[:, 1] <= n)).all(),
            "reverse query outside the rectangle")
    order = np.argsort(-q[:, 0], kind="stable")
    qi = np.ascontiguousarray(q[order, 0])
    qj = np.ascontiguousarray(q[order, 1])
    out = np.empty((reps, len(q)))
    fn = get("reverse_queries", impl)
    run_replicas(fn, r0, r0 + reps, [out],
                 lambda lo, hi: (seed, lo, hi, stream, m, n, imin, jmin, qi, qj), threads)
    inv = np.empty_like(order)
    inv[order] = np.arange(len(order))
    return out[:, inv]


def first_step_samples(seed, reps, m, n, zs, r0=0, stream=MAIN, threads=None, impl=None):
    """Indicator of Zhor > 0 in the stationary model for each rate in zs.

    A tie of the two first steps has probability zero and counts as
    horizontal.  Needs m, n >= 1.
    """
    reps = _reps(reps)
    require(m >= 1 and n >= 1, "first-step sampler needs m, n >= 1")
    zs = np.ascontiguousarray(np.atleast_1d(np.asarray(zs, dtype=np.float64)))
    require(((zs > 0) & (zs < 1)).all(), "rates must lie in (0, 1)")
    out = np.empty((reps, len(zs)), dtype=np.uint8)
    fn = get("first_step", impl)
    run_replicas(fn, r0, r0 + reps, [out],
                 lambda lo, hi: (seed, lo, hi, stream, m, n, zs), threads)
    return out


def triangle_count_samples(seed, reps, D, ds, hdiv=1.0, vdiv=1.0, offset=(1, 1),
                           r0=0, stream=MAIN, threads=None, impl=None):
    """Per local antidiagonal d in ds, the number of cells whose geodesic
    from the local origin starts with a vertical step."""
    reps = _reps(reps)
    ds = np.ascontiguousarray(np.asarray(ds, dtype=_I64))
    require(((ds >= 0) & (ds <= D)).all(), "antidiagonal outside the triangle")
    out = np.empty((reps, len(ds)), dtype=_I64)
    fn = get("triangle_counts", impl)
    run_replicas(fn, r0, r0 + reps, [out],
                 lambda lo, hi: (seed, lo, hi, stream, D, offset[0], offset[1],
                                 float(hdiv), float(vdiv), ds), threads)
    return out
