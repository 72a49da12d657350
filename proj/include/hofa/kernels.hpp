#pragma once

#include <complex>
#include <cstddef>

namespace hofa {
namespace kernels {

using cplx = std::complex<double>;

/**
 * Complex array primitives used by the numeric hot loops (inner products,
 * pointwise phase products, norm accumulation).
 *
 * Both backends (scalar reference and AVX2) implement the same algorithm:
 * elements are consumed in blocks of two complex values with one partial
 * accumulator per double slot, partials are combined in a fixed order, and
 * any tail element is folded in last.  No FMA contractions are used.  The
 * results are therefore bitwise identical across backends, which is what the
 * equivalence tests assert.
 */

/// sum_i a[i] * conj(b[i])
cplx cdot(const cplx* a, const cplx* b, std::size_t n);

/// sum_i |a[i]|^2
double cnorm2(const cplx* a, std::size_t n);

/// sum_i a[i]
cplx csum(const cplx* a, std::size_t n);

/// dst[i] = a[i] * b[i]
void cmul(cplx* dst, const cplx* a, const cplx* b, std::size_t n);

/// dst[i] = a[i] * conj(b[i])
void cmul_conj(cplx* dst, const cplx* a, const cplx* b, std::size_t n);

/// dst[i] += alpha * x[i]
void caxpy(cplx* dst, cplx alpha, const cplx* x, std::size_t n);

/// Name of the backend currently dispatched to: "avx2" or "scalar".
const char* backend();

/// Force a backend by name (tests only).  Throws std::invalid_argument if the
/// backend is unknown or not available on this machine.
void force_backend(const char* name);

namespace detail {

struct backend_table {
    cplx (*cdot)(const cplx*, const cplx*, std::size_t);
    double (*cnorm2)(const cplx*, std::size_t);
    cplx (*csum)(const cplx*, std::size_t);
    void (*cmul)(cplx*, const cplx*, const cplx*, std::size_t);
    void (*cmul_conj)(cplx*, const cplx*, const cplx*, std::size_t);
    void (*caxpy)(cplx*, cplx, const cplx*, std::size_t);
    const char* name;
};

const backend_table& scalar_table();

} // namespace detail

} // namespace kernels
} // namespace hofa
