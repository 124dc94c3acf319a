/* Counter-based noise shared by the compiled kernels.
 *
 * Philox4x64-10 keyed by (seed, replica).  Site (i, j) of stream s lives in
 * block counter (j >> 2, i, s, 0), lane j & 3.  The 64x64->128 products are
 * written with 32-bit halves so the block loop vectorizes.  The logarithm is a
 * fixed, branch-free polynomial evaluation so that a numpy transcription of the
 * same operations reproduces every bit.  Build with -ffp-contract=off.
 */
#ifndef LPPLAB_RNG_H
#define LPPLAB_RNG_H

#include <stdint.h>
#include <string.h>

#define LPP_M0 0xD2E7470EE14C6C93ULL
#define LPP_M1 0xCA5A826395121157ULL
#define LPP_W0 0x9E3779B97F4A7C15ULL
#define LPP_W1 0xBB67AE8584CAA73BULL

static inline uint64_t lpp_mulhilo(uint64_t a, uint64_t b, uint64_t *hi)
{
    uint64_t a0 = a & 0xffffffffULL, a1 = a >> 32;
    uint64_t b0 = b & 0xffffffffULL, b1 = b >> 32;
    uint64_t p00 = a0 * b0, p01 = a0 * b1, p10 = a1 * b0, p11 = a1 * b1;
    uint64_t mid = (p00 >> 32) + (p01 & 0xffffffffULL) + (p10 & 0xffffffffULL);
    *hi = p11 + (p01 >> 32) + (p10 >> 32) + (mid >> 32);
    return a * b;
}

static inline void lpp_philox(uint64_t c0, uint64_t c1, uint64_t c2, uint64_t c3,
                              uint64_t k0, uint64_t k1, uint64_t *out)
{
    int r;
    for (r = 0; r < 10; r++) {
        uint64_t h0, h1;
        uint64_t l0 = lpp_mulhilo(LPP_M0, c0, &h0);
        uint64_t l1 = lpp_mulhilo(LPP_M1, c2, &h1);
        uint64_t n0 = h1 ^ c1 ^ k0;
        uint64_t n2 = h0 ^ c3 ^ k1;
        c0 = n0; c1 = l1; c2 = n2; c3 = l0;
        k0 += LPP_W0; k1 += LPP_W1;
    }
    out[0] = c0; out[1] = c1; out[2] = c2; out[3] = c3;
}

static const double
    LPP_LN2_HI = 6.93147180369123816490e-01,
    LPP_LN2_LO = 1.90821492927058770002e-10,
    LPP_LG1 = 6.666666666666735130e-01,
    LPP_LG2 = 3.999999999940941908e-01,
    LPP_LG3 = 2.857142874366239149e-01,
    LPP_LG4 = 2.222219843214978396e-01,
    LPP_LG5 = 1.818357216161805012e-01,
    LPP_LG6 = 1.531383769920937332e-01,
    LPP_LG7 = 1.479819860511658591e-01;

/* -log(v) for normal v in (0, 1] */
static inline double lpp_neglog(double v)
{
    uint64_t u, nu;
    int64_t hx, k, i;
    double x, f, s, dk, z, w, t1, t2, r, hfsq;
    memcpy(&u, &v, 8);
    hx = (int64_t)(u >> 32);
    k = (hx >> 20) - 1023;
    hx &= 0x000fffff;
    i = (hx + 0x95f64) & 0x100000;
    k += i >> 20;
    nu = ((uint64_t)(hx | (i ^ 0x3ff00000)) << 32) | (u & 0xffffffffULL);
    memcpy(&x, &nu, 8);
    f = x - 1.0;
    s = f / (2.0 + f);
    dk = (double)k;
    z = s * s;
    w = z * z;
    t1 = w * (LPP_LG2 + w * (LPP_LG4 + w * LPP_LG6));
    t2 = z * (LPP_LG1 + w * (LPP_LG3 + w * (LPP_LG5 + w * LPP_LG7)));
    r = t2 + t1;
    hfsq = 0.5 * f * f;
    return -(dk * LPP_LN2_HI - ((hfsq - (s * (hfsq + r) + dk * LPP_LN2_LO)) - f));
}

/* 53 random bits -> v in (0, 1), value -log(v) = -log(1 - U) with U = 1 - v */
static inline double lpp_exp_bits(uint64_t b)
{
    return lpp_neglog(((double)(b >> 11) + 0.5) * 0x1.0p-53);
}

/* raw must hold 4 * ((jb >> 2) - (ja >> 2) + 1) words; out[j - ja] for ja <= j <= jb */
static inline void lpp_column(uint64_t k0, uint64_t k1, uint64_t stream, int64_t col,
                              int64_t ja, int64_t jb, uint64_t *restrict raw,
                              double *restrict out)
{
    int64_t b0 = ja >> 2, nb = (jb >> 2) - b0 + 1, b, t, off, len;
    for (b = 0; b < nb; b++) {
        uint64_t c0 = (uint64_t)(b0 + b), c1 = (uint64_t)col, c2 = stream, c3 = 0;
        uint64_t kk0 = k0, kk1 = k1;
        int r;
        for (r = 0; r < 10; r++) {
            uint64_t h0, h1;
            uint64_t l0 = lpp_mulhilo(LPP_M0, c0, &h0);
            uint64_t l1 = lpp_mulhilo(LPP_M1, c2, &h1);
            uint64_t n0 = h1 ^ c1 ^ kk0;
            uint64_t n2 = h0 ^ c3 ^ kk1;
            c0 = n0; c1 = l1; c2 = n2; c3 = l0;
            kk0 += LPP_W0; kk1 += LPP_W1;
        }
        raw[4 * b] = c0; raw[4 * b + 1] = c1; raw[4 * b + 2] = c2; raw[4 * b + 3] = c3;
    }
    off = ja - 4 * b0;
    len = jb - ja + 1;
    for (t = 0; t < len; t++)
        out[t] = lpp_exp_bits(raw[off + t]);
}

static inline double lpp_point(uint64_t k0, uint64_t k1, uint64_t stream, int64_t i, int64_t j)
{
    uint64_t o[4];
    lpp_philox((uint64_t)(j >> 2), (uint64_t)i, stream, 0, k0, k1, o);
    return lpp_exp_bits(o[j & 3]);
}

#endif
