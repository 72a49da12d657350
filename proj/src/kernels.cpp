#include "hofa/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace hofa {
namespace kernels {
namespace detail {

// Scalar reference backend.  The accumulation pattern deliberately mirrors
// the AVX2 register layout: two complex elements per block, one partial sum
// per double slot, fixed combination order, tail folded in last.

namespace scalar {

static cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double p0 = 0, p1 = 0, p2 = 0, p3 = 0;
    double q0 = 0, q1 = 0, q2 = 0, q3 = 0;
    const std::size_t m = n & ~std::size_t(1);
    for (std::size_t i = 0; i < m; i += 2) {
        const double ar0 = pa[2 * i], ai0 = pa[2 * i + 1];
        const double ar1 = pa[2 * i + 2], ai1 = pa[2 * i + 3];
        const double br0 = pb[2 * i], bi0 = pb[2 * i + 1];
        const double br1 = pb[2 * i + 2], bi1 = pb[2 * i + 3];
        p0 += ar0 * br0;
        p1 += ai0 * bi0;
        p2 += ar1 * br1;
        p3 += ai1 * bi1;
        q0 += ar0 * bi0;
        q1 += ai0 * br0;
        q2 += ar1 * bi1;
        q3 += ai1 * br1;
    }
    double re = (p0 + p1) + (p2 + p3);
    double im = (q1 - q0) + (q3 - q2);
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
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    const std::size_t m = n & ~std::size_t(1);
    for (std::size_t i = 0; i < m; i += 2) {
        s0 += pa[2 * i] * pa[2 * i];
        s1 += pa[2 * i + 1] * pa[2 * i + 1];
        s2 += pa[2 * i + 2] * pa[2 * i + 2];
        s3 += pa[2 * i + 3] * pa[2 * i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    if (m < n) s += pa[2 * m] * pa[2 * m] + pa[2 * m + 1] * pa[2 * m + 1];
    return s;
}

static cplx csum(const cplx* a, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    const std::size_t m = n & ~std::size_t(1);
    for (std::size_t i = 0; i < m; i += 2) {
        s0 += pa[2 * i];
        s1 += pa[2 * i + 1];
        s2 += pa[2 * i + 2];
        s3 += pa[2 * i + 3];
    }
    double re = s0 + s2;
    double im = s1 + s3;
    if (m < n) {
        re += pa[2 * m];
        im += pa[2 * m + 1];
    }
    return cplx(re, im);
}

static void cmul(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* pd = reinterpret_cast<double*>(dst);
    for (std::size_t i = 0; i < n; ++i) {
        const double ar = pa[2 * i], ai = pa[2 * i + 1];
        const double br = pb[2 * i], bi = pb[2 * i + 1];
        pd[2 * i] = ar * br - ai * bi;
        pd[2 * i + 1] = ar * bi + ai * br;
    }
}

static void cmul_conj(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    double* pd = reinterpret_cast<double*>(dst);
    for (std::size_t i = 0; i < n; ++i) {
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
    for (std::size_t i = 0; i < n; ++i) {
        const double xr = px[2 * i], xi = px[2 * i + 1];
        pd[2 * i] = pd[2 * i] + (wr * xr - wi * xi);
        pd[2 * i + 1] = pd[2 * i + 1] + (wr * xi + wi * xr);
    }
}

} // namespace scalar

const backend_table& scalar_table() {
    static const backend_table t = {&scalar::cdot,      &scalar::cnorm2,
                                    &scalar::csum,      &scalar::cmul,
                                    &scalar::cmul_conj, &scalar::caxpy,
                                    "scalar"};
    return t;
}

#ifdef HOFA_HAVE_AVX2_TU
const backend_table& avx2_table();
bool avx2_supported();
#endif

namespace {

const backend_table* pick_default() {
#ifdef HOFA_HAVE_AVX2_TU
    if (avx2_supported()) {
        const char* env = std::getenv("HOFA_KERNEL");
        if (!env || std::strcmp(env, "scalar") != 0) return &avx2_table();
    }
#endif
    return &scalar_table();
}

std::atomic<const backend_table*> g_active{nullptr};

const backend_table* active() {
    const backend_table* t = g_active.load(std::memory_order_acquire);
    if (!t) {
        t = pick_default();
        g_active.store(t, std::memory_order_release);
    }
    return t;
}

} // namespace
} // namespace detail

cplx cdot(const cplx* a, const cplx* b, std::size_t n) {
    return detail::active()->cdot(a, b, n);
}

double cnorm2(const cplx* a, std::size_t n) { return detail::active()->cnorm2(a, n); }

cplx csum(const cplx* a, std::size_t n) { return detail::active()->csum(a, n); }

void cmul(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    detail::active()->cmul(dst, a, b, n);
}

void cmul_conj(cplx* dst, const cplx* a, const cplx* b, std::size_t n) {
    detail::active()->cmul_conj(dst, a, b, n);
}

void caxpy(cplx* dst, cplx alpha, const cplx* x, std::size_t n) {
    detail::active()->caxpy(dst, alpha, x, n);
}

const char* backend() { return detail::active()->name; }

void force_backend(const char* name) {
    if (std::strcmp(name, "scalar") == 0) {
        detail::g_active.store(&detail::scalar_table(), std::memory_order_release);
        return;
    }
#ifdef HOFA_HAVE_AVX2_TU
    if (std::strcmp(name, "avx2") == 0 && detail::avx2_supported()) {
        detail::g_active.store(&detail::avx2_table(), std::memory_order_release);
        return;
    }
#endif
    throw std::invalid_argument(std::string("unknown or unavailable kernel backend: ") + name);
}

} // namespace kernels
} // namespace hofa
