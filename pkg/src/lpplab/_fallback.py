"""Pure numpy mirror of the compiled kernels.

The arithmetic is transcribed operation by operation from ``_rng.h`` and
``_kernels.pyx`` so both backends produce identical bits.  Loops run over
lattice cells while numpy vectorizes across the replicas of a chunk.
"""

import numpy as np

M0 = np.uint64(0xD2E7470EE14C6C93)
M1 = np.uint64(0xCA5A826395121157)
W0 = np.uint64(0x9E3779B97F4A7C15)
W1 = np.uint64(0xBB67AE8584CAA73B)
LO32 = np.uint64(0xFFFFFFFF)
S32 = np.uint64(32)

LN2_HI = 6.93147180369123816490e-01
LN2_LO = 1.90821492927058770002e-10
LG1 = 6.666666666666735130e-01
LG2 = 3.999999999940941908e-01
LG3 = 2.857142874366239149e-01
LG4 = 2.222219843214978396e-01
LG5 = 1.818357216161805012e-01
LG6 = 1.531383769920937332e-01
LG7 = 1.479819860511658591e-01

CHUNK = 2048


def backend_name():
    return "python"


def _mulhilo(a, b):
    a0, a1 = a & LO32, a >> S32
    b0, b1 = b & LO32, b >> S32
    p00, p01, p10, p11 = a0 * b0, a0 * b1, a1 * b0, a1 * b1
    mid = (p00 >> S32) + (p01 & LO32) + (p10 & LO32)
    hi = p11 + (p01 >> S32) + (p10 >> S32) + (mid >> S32)
    return a * b, hi


def philox(c0, c1, c2, c3, k0, k1):
    """Philox4x64-10 on broadcast uint64 arrays; returns the four output words."""
    c0, c1, c2, c3, k0, k1 = np.broadcast_arrays(
        *(np.asarray(v, dtype=np.uint64) for v in (c0, c1, c2, c3, k0, k1)))
    c0, c1, c2, c3 = c0.copy(), c1.copy(), c2.copy(), c3.copy()
    k0, k1 = k0.copy(), k1.copy()
    with np.errstate(over="ignore"):
        for _ in range(10):
            l0, h0 = _mulhilo(M0, c0)
            l1, h1 = _mulhilo(M1, c2)
            c0, c1, c2, c3 = h1 ^ c1 ^ k0, l1, h0 ^ c3 ^ k1, l0
            k0 = k0 + W0
            k1 = k1 + W1
    return c0, c1, c2, c3


def neglog(v):
    """-log(v) for normal v in (0, 1], same operation order as the C helper."""
    v = np.ascontiguousarray(v, dtype=np.float64)
    u = v.view(np.uint64)
    hx = (u >> S32).astype(np.int64)
    k = (hx >> 20) - 1023
    hx = hx & 0x000FFFFF
    i = (hx + 0x95F64) & 0x100000
    k = k + (i >> 20)
    nu = ((hx | (i ^ 0x3FF00000)).astype(np.uint64) << S32) | (u & LO32)
    x = nu.view(np.float64)
    f = x - 1.0
    s = f / (2.0 + f)
    dk = k.astype(np.float64)
    z = s * s
    w = z * z
    t1 = w * (LG2 + w * (LG4 + w * LG6))
    t2 = z * (LG1 + w * (LG3 + w * (LG5 + w * LG7)))
    r = t2 + t1
    hfsq = 0.5 * f * f
    return -(dk * LN2_HI - ((hfsq - (s * (hfsq + r) + dk * LN2_LO)) - f))


def exp_bits(b):
    b = np.asarray(b, dtype=np.uint64)
    return neglog(((b >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53)


def raw_bits(seed, replicas, stream, col, rows):
    """Raw 64-bit words for sites (col, rows) of each replica; shape (R, len(rows))."""
    rows = np.asarray(rows, dtype=np.int64)
    reps = np.asarray(replicas, dtype=np.uint64).reshape(-1, 1)
    blocks = (rows >> 2).astype(np.uint64)
    ub, inv = np.unique(blocks, return_inverse=True)
    words = philox(ub[None, :], np.uint64(col), np.uint64(stream), 0, np.uint64(seed), reps)
    stacked = np.stack(words, axis=-1)
    return stacked[:, inv, rows & 3]


def column(seed, replicas, stream, col, ja, jb):
    """Noise at (col, ja..jb) for each replica; shape (R, jb - ja + 1)."""
    return exp_bits(raw_bits(seed, replicas, stream, col, np.arange(ja, jb + 1)))


def point(seed, replicas, stream, i, j):
    return column(seed, replicas, stream, i, j, j)[:, 0]


def noise_block(seed, replica, stream, i0, j0, ni, nj):
    out = np.empty((ni, nj), dtype=np.float64)
    for a in range(ni):
        out[a] = column(seed, [replica], stream, i0 + a, j0, j0 + nj - 1)[0]
    return out


def lpp_table(w):
    w = np.ascontiguousarray(w, dtype=np.float64)
    ni, nj = w.shape
    g = np.empty_like(w)
    if ni == 0 or nj == 0:
        return g
    g[0, 0] = w[0, 0]
    for b in range(1, nj):
        g[0, b] = w[0, b] + g[0, b - 1]
    for a in range(1, ni):
        g[a, 0] = w[a, 0] + g[a - 1, 0]
    # antidiagonals of the interior
    for d in range(2, ni + nj - 1):
        a = np.arange(max(1, d - nj + 1), min(ni - 1, d - 1) + 1)
        if a.size == 0:
            continue
        b = d - a
        left, down = g[a - 1, b], g[a, b - 1]
        g[a, b] = w[a, b] + np.where(left >= down, left, down)
    return g


def _chunks(r0, r1):
    for s in range(r0, r1, CHUNK):
        yield s, min(s + CHUNK, r1)


def forward_sweep(seed, r0, r1, stream, M, N, di, dj, hdiv, vdiv, origin_noise,
                  mlo, mhi, mk, qa, qb, g_out, lab_out):
    nq = len(qa)
    for s, e in _chunks(r0, r1):
        reps = np.arange(s, e, dtype=np.uint64)
        R = e - s
        G = np.empty((R, N + 1))
        L = np.empty((R, N + 1), dtype=np.int64)
        q = 0
        for a in range(M + 1):
            x = column(seed, reps, stream, di + a, dj, dj + N)
            lo, hi = mlo[a], mhi[a]
            base = mk[a] + hi
            if a == 0:
                G[:, 0] = x[:, 0] if origin_noise else 0.0
                L[:, 0] = base if lo <= 0 <= hi else -1
                for b in range(1, N + 1):
                    G[:, b] = x[:, b] / vdiv + G[:, b - 1]
                    L[:, b] = base - b if lo <= b <= hi else L[:, b - 1]
            else:
                G[:, 0] = x[:, 0] / hdiv + G[:, 0]
                if lo <= 0 <= hi:
                    L[:, 0] = base
                for b in range(1, N + 1):
                    left, down = G[:, b], G[:, b - 1]
                    keep = left >= down
                    G[:, b] = x[:, b] + np.where(keep, left, down)
                    if lo <= b <= hi:
                        L[:, b] = base - b
                    else:
                        L[:, b] = np.where(keep, L[:, b], L[:, b - 1])
            while q < nq and qa[q] == a:
                g_out[s - r0:e - r0, q] = G[:, qb[q]]
                lab_out[s - r0:e - r0, q] = L[:, qb[q]]
                q += 1


def path_sweep(seed, r0, r1, stream, u0, u1, vtop, clo, chi, ck, pi, pj, sgn, dv, kind,
               b, tm, tn, val_out, k_out):
    ell = len(pi)
    nrow = vtop + 1
    ninf = -np.inf
    for s, e in _chunks(r0, r1):
        reps = np.arange(s, e, dtype=np.uint64)
        R = e - s
        pw = np.empty((R, ell))
        for k in range(ell):
            pw[:, k] = sgn[k] * (point(seed, reps, stream, pi[k], pj[k]) / dv[k])
        A = np.empty((R, ell))
        A[:, b] = 0.0
        for k in range(b + 1, ell):
            A[:, k] = A[:, k - 1] + pw[:, k - 1]
        for k in range(b - 1, -1, -1):
            A[:, k] = A[:, k + 1] + pw[:, k + 1]
        Rv = np.full((R, nrow), ninf)
        RL = np.full((R, nrow), -1, dtype=np.int64)
        for c in range(tm - u0 + 1):
            col = u0 + c
            lo, hi, top = clo[c], chi[c], tn
            x = column(seed, reps, stream, col, lo, top)
            U = np.full(R, ninf)
            UL = np.full(R, -1, dtype=np.int64)
            for j in range(lo, top + 1):
                inl, ind = Rv[:, j], U
                pick = inl >= ind
                best = np.where(pick, inl, ind)
                lab_f = np.where(pick, RL[:, j], UL)
                last = j == top and col == tm
                if j <= hi:
                    k = ck[c] + (hi - j)
                    cur = pw[:, k]
                    free_v = cur + best
                    st = A[:, k] + cur
                    take = st >= free_v
                    joined = np.where(take, st, free_v)
                    jlab = np.where(take, k, lab_f)
                    if kind[k] == 0:
                        Rv[:, j], RL[:, j] = joined, jlab
                        U, UL = joined, jlab
                    elif kind[k] == 1:
                        U, UL = free_v, lab_f
                        Rv[:, j], RL[:, j] = joined, jlab
                    else:
                        Rv[:, j], RL[:, j] = free_v, lab_f
                        U, UL = joined, jlab
                    if last:
                        val_out[s - r0:e - r0] = free_v if kind[k] != 0 else joined
                        k_out[s - r0:e - r0] = lab_f if kind[k] != 0 else jlab
                else:
                    v = x[:, j - lo] + best
                    Rv[:, j], RL[:, j] = v, lab_f
                    U, UL = v, lab_f
                    if last:
                        val_out[s - r0:e - r0] = v
                        k_out[s - r0:e - r0] = lab_f


def reverse_queries(seed, r0, r1, stream, m, n, imin, jmin, qi, qj, out):
    nq = len(qi)
    nr = n - jmin + 1
    for s, e in _chunks(r0, r1):
        reps = np.arange(s, e, dtype=np.uint64)
        R = e - s
        H = np.full((R, nr + 1), -np.inf)
        q = 0
        for i in range(m, imin - 1, -1):
            x = column(seed, reps, stream, i, jmin, n)
            H[:, nr] = 0.0 if i == m else -np.inf
            for j in range(nr - 1, -1, -1):
                right, up = H[:, j], H[:, j + 1]
                H[:, j] = x[:, j] + np.where(right >= up, right, up)
            while q < nq and qi[q] == i:
                out[s - r0:e - r0, q] = H[:, qj[q] - jmin]
                q += 1


def first_step(seed, r0, r1, stream, m, n, zs, out):
    for s, e in _chunks(r0, r1):
        reps = np.arange(s, e, dtype=np.uint64)
        R = e - s
        e0 = np.empty((R, m + 1))
        for i in range(1, m + 1):
            e0[:, i] = point(seed, reps, stream, i, 0)
        c0 = column(seed, reps, stream, 0, 0, n)
        H = np.full((R, n + 2), -np.inf)
        row1 = np.empty((R, m + 1))
        for i in range(m, 0, -1):
            x = column(seed, reps, stream, i, 0, n)
            up = np.full(R, 0.0 if i == m else -np.inf)
            for j in range(n, 0, -1):
                right = H[:, j]
                h = x[:, j] + np.where(right >= up, right, up)
                H[:, j] = h
                up = h
            row1[:, i] = H[:, 1]
        for t, z in enumerate(zs):
            acc = np.zeros(R)
            bh = np.full(R, -np.inf)
            for i in range(1, m + 1):
                acc = e0[:, i] / z + acc
                bh = np.maximum(bh, acc + row1[:, i])
            acc = np.zeros(R)
            bv = np.full(R, -np.inf)
            for j in range(1, n + 1):
                acc = c0[:, j] / (1.0 - z) + acc
                bv = np.maximum(bv, acc + H[:, j])
            out[s - r0:e - r0, t] = (bh >= bv).astype(np.uint8)


def triangle_counts(seed, r0, r1, stream, D, di, dj, hdiv, vdiv, ds, out):
    ds = np.asarray(ds)
    for s, e in _chunks(r0, r1):
        reps = np.arange(s, e, dtype=np.uint64)
        R = e - s
        G = np.empty((R, D + 1))
        S = np.zeros((R, D + 1), dtype=np.int8)
        cnt = np.zeros((R, len(ds)), dtype=np.int64)
        for a in range(D + 1):
            top = D - a
            x = column(seed, reps, stream, di + a, dj, dj + top)
            if a == 0:
                G[:, 0] = 0.0
                S[:, 0] = 0
                for b in range(1, top + 1):
                    G[:, b] = x[:, b] / vdiv + G[:, b - 1]
                    S[:, b] = 1
            else:
                G[:, 0] = x[:, 0] / hdiv + G[:, 0]
                S[:, 0] = 0
                for b in range(1, top + 1):
                    left, down = G[:, b], G[:, b - 1]
                    keep = left >= down
                    G[:, b] = x[:, b] + np.where(keep, left, down)
                    S[:, b] = np.where(keep, S[:, b], S[:, b - 1])
            for t, d in enumerate(ds):
                if a <= d <= a + top:
                    cnt[:, t] += S[:, d - a]
        out[s - r0:e - r0] = cnt
