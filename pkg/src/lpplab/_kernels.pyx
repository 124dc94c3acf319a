# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled sweeps over the counter-based noise field.

Every kernel works on a contiguous replica range [r0, r1) and writes into
caller-owned arrays, so the Python side can split ranges across threads.
Semantics are mirrored operation-for-operation by ``_fallback``.
"""

from libc.stdint cimport uint64_t, int64_t, int8_t, uint8_t
from libc.stdlib cimport malloc, free
from libc.math cimport INFINITY

import numpy as np


cdef extern from "_rng.h" nogil:
    void lpp_column(uint64_t k0, uint64_t k1, uint64_t stream, int64_t col,
                    int64_t ja, int64_t jb, uint64_t *raw, double *out)
    double lpp_point(uint64_t k0, uint64_t k1, uint64_t stream, int64_t i, int64_t j)


cdef inline double* _dalloc(int64_t n) nogil:
    return <double*>malloc((n if n > 0 else 1) * sizeof(double))


cdef inline uint64_t* _ualloc(int64_t nrows) nogil:
    # scratch for lpp_column over nrows consecutive rows at any offset
    return <uint64_t*>malloc(4 * (nrows // 4 + 2) * sizeof(uint64_t))


def backend_name():
    return "compiled"


def noise_block(uint64_t seed, uint64_t replica, uint64_t stream,
                int64_t i0, int64_t j0, int64_t ni, int64_t nj):
    out = np.empty((ni, nj), dtype=np.float64)
    if ni == 0 or nj == 0:
        return out
    cdef double[:, ::1] o = out
    cdef uint64_t *raw = _ualloc(nj)
    cdef int64_t a
    with nogil:
        for a in range(ni):
            lpp_column(seed, replica, stream, i0 + a, j0, j0 + nj - 1, raw, &o[a, 0])
    free(raw)
    return out


def lpp_table(double[:, ::1] w):
    cdef int64_t ni = w.shape[0], nj = w.shape[1], a, b
    out = np.empty((ni, nj), dtype=np.float64)
    cdef double[:, ::1] g = out
    cdef double left, down
    if ni == 0 or nj == 0:
        return out
    with nogil:
        g[0, 0] = w[0, 0]
        for b in range(1, nj):
            g[0, b] = w[0, b] + g[0, b - 1]
        for a in range(1, ni):
            g[a, 0] = w[a, 0] + g[a - 1, 0]
            for b in range(1, nj):
                left = g[a - 1, b]
                down = g[a, b - 1]
                g[a, b] = w[a, b] + (left if left >= down else down)
    return out


def forward_sweep(uint64_t seed, uint64_t r0, uint64_t r1, uint64_t stream,
                  int64_t M, int64_t N, int64_t di, int64_t dj,
                  double hdiv, double vdiv, bint origin_noise,
                  const int64_t[::1] mlo, const int64_t[::1] mhi, const int64_t[::1] mk,
                  const int64_t[::1] qa, const int64_t[::1] qb,
                  double[:, ::1] g_out, int64_t[:, ::1] lab_out):
    """Column sweep of the local rectangle [0..M]x[0..N] for replicas r0..r1-1.

    Local (a, b) reads noise at (di+a, dj+b).  Row 0 is divided by hdiv,
    column 0 by vdiv, the origin is 0 unless origin_noise.  Labels follow the
    argmax predecessor (ties horizontal) and are reset on marked cells as the
    sweep passes them: column a marks rows mlo[a]..mhi[a] with mk[a] + (mhi[a] - b).  Queries
    must be sorted by column.
    """
    cdef int64_t nq = qa.shape[0], a, b, q, lo, hi, base
    cdef uint64_t r
    cdef double left, down
    cdef double *G = _dalloc(N + 1)
    cdef int64_t *L = <int64_t*>malloc((N + 1) * sizeof(int64_t))
    cdef double *x = _dalloc(N + 1)
    cdef uint64_t *raw = _ualloc(N + 1)
    with nogil:
        for r in range(r0, r1):
            q = 0
            for a in range(M + 1):
                lpp_column(seed, r, stream, di + a, dj, dj + N, raw, x)
                lo = mlo[a]
                hi = mhi[a]
                base = mk[a] + hi
                if a == 0:
                    G[0] = x[0] if origin_noise else 0.0
                    L[0] = base if lo <= 0 <= hi else -1
                    for b in range(1, N + 1):
                        G[b] = x[b] / vdiv + G[b - 1]
                        L[b] = L[b - 1]
                        if lo <= b <= hi:
                            L[b] = base - b
                else:
                    G[0] = x[0] / hdiv + G[0]
                    if lo <= 0 <= hi:
                        L[0] = base
                    for b in range(1, N + 1):
                        left = G[b]
                        down = G[b - 1]
                        if left >= down:
                            G[b] = x[b] + left
                        else:
                            G[b] = x[b] + down
                            L[b] = L[b - 1]
                        if lo <= b <= hi:
                            L[b] = base - b
                while q < nq and qa[q] == a:
                    g_out[r - r0, q] = G[qb[q]]
                    lab_out[r - r0, q] = L[qb[q]]
                    q += 1
    free(G)
    free(L)
    free(x)
    free(raw)


def path_sweep(uint64_t seed, uint64_t r0, uint64_t r1, uint64_t stream,
               int64_t u0, int64_t u1, int64_t vtop,
               const int64_t[::1] clo, const int64_t[::1] chi, const int64_t[::1] ck,
               const int64_t[::1] pi, const int64_t[::1] pj,
               const double[::1] sgn, const double[::1] dv, const int8_t[::1] kind, int64_t b,
               int64_t tm, int64_t tn,
               double[::1] val_out, int64_t[::1] k_out):
    """Path-to-point values to (tm, tn) with path-induced weights.

    The path occupies columns u0..u1; column c holds path rows clo..chi with
    index ck + (chi - row).  Path vertex k (0-based) weighs
    sgn[k] * (noise / dv[k]); kind[k] is 0 for a free start, 1 when the first step must go
    right, 2 when it must go up.  Off-path cells carry raw noise.  The row
    range of column c is clo[c]..vtop; cells stop at the target.
    """
    cdef int64_t ell = pi.shape[0], nrow = vtop + 1
    cdef int64_t c, col, j, k, lo, hi, top, jj
    cdef uint64_t r
    cdef double inl, ind, free_v, st, cur, best
    cdef int64_t lab_l, lab_d, lab_f, lab_c
    cdef double *R = _dalloc(nrow)     # value passed right from previous column
    cdef int64_t *RL = <int64_t*>malloc(nrow * sizeof(int64_t))
    cdef double *x = _dalloc(nrow)
    cdef double *pw = _dalloc(ell)
    cdef double *A = _dalloc(ell)
    cdef uint64_t *raw = _ualloc(nrow)
    cdef double U
    cdef int64_t UL
    with nogil:
        for r in range(r0, r1):
            for k in range(ell):
                pw[k] = sgn[k] * (lpp_point(seed, r, stream, pi[k], pj[k]) / dv[k])
            A[b] = 0.0
            for k in range(b + 1, ell):
                A[k] = A[k - 1] + pw[k - 1]
            for k in range(b - 1, -1, -1):
                A[k] = A[k + 1] + pw[k + 1]
            for j in range(nrow):
                R[j] = -INFINITY
                RL[j] = -1
            for c in range(0, tm - u0 + 1):
                col = u0 + c
                lo = clo[c]
                hi = chi[c]
                top = tn
                lpp_column(seed, r, stream, col, lo, top, raw, x)
                U = -INFINITY
                UL = -1
                for j in range(lo, top + 1):
                    jj = j - lo
                    inl = R[j]
                    ind = U
                    if inl >= ind:
                        best = inl
                        lab_f = RL[j]
                    else:
                        best = ind
                        lab_f = UL
                    if j <= hi:
                        k = ck[c] + (hi - j)
                        cur = pw[k]
                        free_v = cur + best
                        st = A[k] + cur
                        if kind[k] == 0:
                            if st >= free_v:
                                R[j] = st
                                RL[j] = k
                            else:
                                R[j] = free_v
                                RL[j] = lab_f
                            U = R[j]
                            UL = RL[j]
                        elif kind[k] == 1:
                            # start may only continue to the right
                            U = free_v
                            UL = lab_f
                            if st >= free_v:
                                R[j] = st
                                RL[j] = k
                            else:
                                R[j] = free_v
                                RL[j] = lab_f
                        else:
                            R[j] = free_v
                            RL[j] = lab_f
                            if st >= free_v:
                                U = st
                                UL = k
                            else:
                                U = free_v
                                UL = lab_f
                        if j == top and col == tm:
                            val_out[r - r0] = free_v if kind[k] != 0 else R[j]
                            k_out[r - r0] = lab_f if kind[k] != 0 else RL[j]
                    else:
                        R[j] = x[jj] + best
                        RL[j] = lab_f
                        U = R[j]
                        UL = lab_f
                        if j == top and col == tm:
                            val_out[r - r0] = R[j]
                            k_out[r - r0] = lab_f
                for j in range(top + 1, nrow):
                    R[j] = -INFINITY
    free(R)
    free(RL)
    free(x)
    free(pw)
    free(A)
    free(raw)


def reverse_queries(uint64_t seed, uint64_t r0, uint64_t r1, uint64_t stream,
                    int64_t m, int64_t n, int64_t imin, int64_t jmin,
                    const int64_t[::1] qi, const int64_t[::1] qj, double[:, ::1] out):
    """Bulk last-passage values from each query (i, j) to (m, n).

    Sweeps columns m down to imin over rows n down to jmin.  Queries sorted
    by decreasing column.
    """
    cdef int64_t nq = qi.shape[0], i, j, q, nr = n - jmin + 1
    cdef uint64_t r
    cdef double right, up
    cdef double *H = _dalloc(nr + 1)
    cdef double *x = _dalloc(nr)
    cdef uint64_t *raw = _ualloc(nr)
    with nogil:
        for r in range(r0, r1):
            for j in range(nr + 1):
                H[j] = -INFINITY
            q = 0
            for i in range(m, imin - 1, -1):
                lpp_column(seed, r, stream, i, jmin, n, raw, x)
                H[nr] = 0.0 if i == m else -INFINITY
                for j in range(nr - 1, -1, -1):
                    right = H[j]
                    up = H[j + 1]
                    H[j] = x[j] + (right if right >= up else up)
                while q < nq and qi[q] == i:
                    out[r - r0, q] = H[qj[q] - jmin]
                    q += 1
    free(H)
    free(x)
    free(raw)


def first_step(uint64_t seed, uint64_t r0, uint64_t r1, uint64_t stream,
               int64_t m, int64_t n, const double[::1] zs, uint8_t[:, ::1] out):
    """Stationary first-step indicator Zhor > 0 for every rate in zs.

    One reversed bulk sweep over [1..m]x[1..n] per replica serves all rates;
    columns are advanced in pairs so two dependency chains interleave.
    """
    cdef int64_t nz = zs.shape[0], i, j, t
    cdef uint64_t r
    cdef double a_up, b_up, h, right, up, s, bh, bv, z
    cdef double *H = _dalloc(n + 2)
    cdef double *xa = _dalloc(n + 1)
    cdef double *xb = _dalloc(n + 1)
    cdef double *row1 = _dalloc(m + 2)
    cdef double *e0 = _dalloc(m + 1)
    cdef double *c0 = _dalloc(n + 1)
    cdef uint64_t *raw = _ualloc(n + 1)
    with nogil:
        for r in range(r0, r1):
            for i in range(1, m + 1):
                e0[i] = lpp_point(seed, r, stream, i, 0)
            lpp_column(seed, r, stream, 0, 0, n, raw, c0)
            for j in range(n + 2):
                H[j] = -INFINITY
            i = m
            while i >= 1:
                lpp_column(seed, r, stream, i, 0, n, raw, xa)
                a_up = 0.0 if i == m else -INFINITY
                if i >= 2:
                    lpp_column(seed, r, stream, i - 1, 0, n, raw, xb)
                    b_up = -INFINITY
                    j = n
                    # column i at row j, column i-1 at row j+1
                    right = H[j]
                    h = xa[j] + (right if right >= a_up else a_up)
                    H[j] = h
                    a_up = h
                    for j in range(n - 1, 0, -1):
                        right = H[j]
                        h = xa[j] + (right if right >= a_up else a_up)
                        up = H[j + 1]
                        s = xb[j + 1] + (up if up >= b_up else b_up)
                        H[j + 1] = s
                        b_up = s
                        H[j] = h
                        a_up = h
                    row1[i] = H[1]
                    up = H[1]
                    s = xb[1] + (up if up >= b_up else b_up)
                    H[1] = s
                    row1[i - 1] = s
                    i -= 2
                else:
                    for j in range(n, 0, -1):
                        right = H[j]
                        h = xa[j] + (right if right >= a_up else a_up)
                        H[j] = h
                        a_up = h
                    row1[i] = H[1]
                    i -= 1
            # H now holds column 1, row1[i] = H(i, 1)
            for t in range(nz):
                z = zs[t]
                s = 0.0
                bh = -INFINITY
                for i in range(1, m + 1):
                    s = e0[i] / z + s
                    h = s + row1[i]
                    if h > bh:
                        bh = h
                s = 0.0
                bv = -INFINITY
                for j in range(1, n + 1):
                    s = c0[j] / (1.0 - z) + s
                    h = s + H[j]
                    if h > bv:
                        bv = h
                out[r - r0, t] = 1 if bh >= bv else 0
    free(H)
    free(xa)
    free(xb)
    free(row1)
    free(e0)
    free(c0)
    free(raw)


def triangle_counts(uint64_t seed, uint64_t r0, uint64_t r1, uint64_t stream,
                    int64_t D, int64_t di, int64_t dj, double hdiv, double vdiv,
                    const int64_t[::1] ds, int64_t[:, ::1] out):
    """Count cells on local antidiagonals ds whose argmax path from the local
    origin enters through (0, 1) rather than (1, 0).  Triangle a + b <= D."""
    cdef int64_t nd = ds.shape[0], a, b, t, top, d
    cdef uint64_t r
    cdef double left, down
    cdef double *G = _dalloc(D + 1)
    cdef int8_t *S = <int8_t*>malloc(D + 1)
    cdef double *x = _dalloc(D + 1)
    cdef uint64_t *raw = _ualloc(D + 1)
    with nogil:
        for r in range(r0, r1):
            for t in range(nd):
                out[r - r0, t] = 0
            for a in range(D + 1):
                top = D - a
                lpp_column(seed, r, stream, di + a, dj, dj + top, raw, x)
                if a == 0:
                    G[0] = 0.0
                    S[0] = 0
                    for b in range(1, top + 1):
                        G[b] = x[b] / vdiv + G[b - 1]
                        S[b] = 1
                else:
                    G[0] = x[0] / hdiv + G[0]
                    S[0] = 0
                    for b in range(1, top + 1):
                        left = G[b]
                        down = G[b - 1]
                        if left >= down:
                            G[b] = x[b] + left
                        else:
                            G[b] = x[b] + down
                            S[b] = S[b - 1]
                for t in range(nd):
                    d = ds[t]
                    if d >= a and d - a <= top:
                        out[r - r0, t] += S[d - a]
    free(G)
    free(S)
    free(x)
    free(raw)
