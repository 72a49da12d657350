#include "hofa/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#endif

namespace hofa {
namespace kernels {
namespace detail {

#if defined(__AVX2__)

// AVX2 backend.  One __m256d holds two complex<double> values.  Accumulator
// slots, combination order and tail handling match the scalar reference
// exactly (mul + add, no FMA), so results are bitwise identical to it.

namespace avx2 {

static cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    __m256d accp = _mm256_setzero_pd();
    __m256d accq = _mm256_setzero_pd();
    const std::size_t m = n & ~std::size_t(1);
    for (std::size_t i = 0; i < m; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        accp = _mm256_add_pd(accp, _mm256_mul_pd(va, vb));
        const __m256d vbs = _mm256_permute_pd(vb, 0x5);
        accq = _mm256_add_pd(accq, _mm256_mul_pd(va, vbs));
    }
    alignas(32) double p[4], q[4];
    _mm256_store_pd(p, accp);
    _mm256_store_pd(q, accq);
    double re = (p[0] + p[1]) + (p[2] + p[3]);
    double im = (q[1] - q[0]) + (q[3] - q[2]);
    if (m < n) {
        const double ar = pa[2 * m], ai = pa[2 * m + 1];
        const double br = pb[2 * m], bi = pb[2 * m + 1];
        re += ar * br + ai * bi;
        im += ai * br - ar * bi;
    }
    return cplx(re, im);
}

static double cnorm2(const cplx* a, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    const std::size_t m = n & ~std::size_t(1);
    for (std::size_t i = 0; i < m; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(va, va));
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    double out = (s[0] + s[1]) + (s[2] + s[3]);
    if (m < n) out += pa[2 * m] * pa[2 * m] + pa[2 * m + 1] * pa[2 * m + 1];
    return out;
}

static cplx csum(const cplx* a, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    __m256d acc = _mm256_setzero_pd();
    const std::size_t m = n & ~std::size_t(1);
    for (std::size_t i = 0; i < m; i += 2) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(pa + 2 * i));
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, acc);
    double re = s[0] + s[2];
    double im = s[1] + s[3];
    if (m < n) {
        re += pa[2 * m];
        im += pa[2 * m + 1];
    }
    return cplx(re, im);
}

// dst = a .* b:  re = ar*br - ai*bi, im = ar*bi + ai*br
static void cmul(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* pd = reinterpret_cast<double*>(dst);
    const std::size_t m = n & ~std::size_t(1);
    const __m256d sign = _mm256_setr_pd(-1.0, 1.0, -1.0, 1.0);
    for (std::size_t i = 0; i < m; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d ar = _mm256_movedup_pd(va);                  // [ar0 ar0 ar1 ar1]
        const __m256d ai = _mm256_permute_pd(va, 0xF);             // [ai0 ai0 ai1 ai1]
        const __m256d bs = _mm256_permute_pd(vb, 0x5);             // [bi0 br0 bi1 br1]
        const __m256d t0 = _mm256_mul_pd(ar, vb);                  // [ar*br ar*bi ...]
        const __m256d t1 = _mm256_mul_pd(_mm256_mul_pd(ai, sign), bs); // [-ai*bi ai*br ...]
        _mm256_storeu_pd(pd + 2 * i, _mm256_add_pd(t0, t1));
    }
    for (std::size_t i = m; i < n; ++i) {
        const double ar = pa[2 * i], ai = pa[2 * i + 1];
        const double br = pb[2 * i], bi = pb[2 * i + 1];
        pd[2 * i] = ar * br - ai * bi;
        pd[2 * i + 1] = ar * bi + ai * br;
    }
}

// dst = a .* conj(b):  re = ar*br + ai*bi, im = ai*br - ar*bi
static void cmul_conj(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* pd = reinterpret_cast<double*>(dst);
    const std::size_t m = n & ~std::size_t(1);
    const __m256d sign = _mm256_setr_pd(1.0, -1.0, 1.0, -1.0);
    for (std::size_t i = 0; i < m; i += 2) {
        const __m256d va = _mm256_loadu_pd(pa + 2 * i);
        const __m256d vb = _mm256_loadu_pd(pb + 2 * i);
        const __m256d ar = _mm256_movedup_pd(va);
        const __m256d ai = _mm256_permute_pd(va, 0xF);
        const __m256d bs = _mm256_permute_pd(vb, 0x5);
        const __m256d t0 = _mm256_mul_pd(_mm256_mul_pd(ar, sign), vb); // [ar*br -ar*bi ...]
        const __m256d t1 = _mm256_mul_pd(ai, bs);                      // [ai*bi ai*br ...]
        _mm256_storeu_pd(pd + 2 * i, _mm256_add_pd(t0, t1));
    }
    for (std::size_t i = m; i < n; ++i) {
        const double ar = pa[2 * i], ai = pa[2 * i + 1];
        const double br = pb[2 * i], bi = pb[2 * i + 1];
        pd[2 * i] = ar * br + ai * bi;
        pd[2 * i + 1] = ai * br - ar * bi;
    }
}

static void caxpy(cplx* dst, cplx alpha, const cplx* x, std::size_t n) {
    const double* px = reinterpret_cast<const double*>(x);
    double* pd = reinterpret_cast<double*>(dst);
    const double wr = alpha.real(), wi = alpha.imag();
    const std::size_t m = n & ~std::size_t(1);
    const __m256d vwr = _mm256_set1_pd(wr);
    const __m256d vwi = _mm256_set1_pd(wi);
    const __m256d sign = _mm256_setr_pd(-1.0, 1.0, -1.0, 1.0);
    for (std::size_t i = 0; i < m; i += 2) {
        const __m256d vx = _mm256_loadu_pd(px + 2 * i);
        const __m256d vd = _mm256_loadu_pd(pd + 2 * i);
        const __m256d xs = _mm256_permute_pd(vx, 0x5);
        const __m256d t0 = _mm256_mul_pd(vwr, vx);                     // [wr*xr wr*xi ...]
        const __m256d t1 = _mm256_mul_pd(_mm256_mul_pd(vwi, sign), xs); // [-wi*xi wi*xr ...]
        _mm256_storeu_pd(pd + 2 * i, _mm256_add_pd(vd, _mm256_add_pd(t0, t1)));
    }
    for (std::size_t i = m; i < n; ++i) {
        const double xr = px[2 * i], xi = px[2 * i + 1];
        pd[2 * i] = pd[2 * i] + (wr * xr - wi * xi);
        pd[2 * i + 1] = pd[2 * i + 1] + (wr * xi + wi * xr);
    }
}

} // namespace avx2

const backend_table& avx2_table() {
    static const backend_table t = {&avx2::cdot,      &avx2::cnorm2,
                                    &avx2::csum,      &avx2::cmul,
                                    &avx2::cmul_conj, &avx2::caxpy,
                                    "avx2"};
    return t;
}

bool avx2_supported() { return __builtin_cpu_supports("avx2") != 0; }

#else

// Translation unit compiled without AVX2 support; dispatcher never asks for it.

#endif

} // namespace detail
} // namespace kernels
} // namespace hofa
