#include "hofa/fft.hpp"

#include <algorithm>
#include <cmath>

namespace hofa {

namespace {

// In-place transform along one axis of the mixed-radix array. sign = -1 for
// the analysis direction, +1 for synthesis. Each run of the axis is gathered
// into scratch, transformed against a precomputed twiddle table, and written
// back. Work is O(order * n) for axis length n, which is comfortably small
// at the group sizes this library targets.
void axis_transform(std::vector<cplx>& v, long long order, long long n, long long stride,
                    int sign) {
    std::vector<cplx> tw(static_cast<std::size_t>(n));
    for (long long j = 0; j < n; ++j)
        tw[static_cast<std::size_t>(j)] =
            unit_angle(sign * static_cast<double>(j) / static_cast<double>(n));

    std::vector<cplx> in(static_cast<std::size_t>(n));
    std::vector<cplx> out(static_cast<std::size_t>(n));
    const long long run = n * stride;
    for (long long base = 0; base < order; base += run) {
        for (long long off = 0; off < stride; ++off) {
            const long long at = base + off;
            for (long long j = 0; j < n; ++j)
                in[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(at + j * stride)];
            for (long long m = 0; m < n; ++m) {
                cplx acc{0.0, 0.0};
                long long idx = 0;
                for (long long j = 0; j < n; ++j) {
                    acc += in[static_cast<std::size_t>(j)] * tw[static_cast<std::size_t>(idx)];
                    idx += m;
                    if (idx >= n) idx -= n;
                }
                out[static_cast<std::size_t>(m)] = acc;
            }
            for (long long m = 0; m < n; ++m)
                v[static_cast<std::size_t>(at + m * stride)] = out[static_cast<std::size_t>(m)];
        }
    }
}

void full_transform(std::vector<cplx>& v, const FiniteAbelianGroup& g, int sign) {
    long long stride = 1;
    for (std::size_t j = g.rank(); j-- > 0;) {
        const long long n = g.factors()[j];
        axis_transform(v, g.order(), n, stride, sign);
        stride *= n;
    }
}

} // namespace

std::vector<cplx> fourier_coefficients(const GroupFunction& f) {
    std::vector<cplx> v = f.values();
    full_transform(v, f.group(), -1);
    const double inv = 1.0 / static_cast<double>(f.group().order());
    for (auto& c : v) c *= inv;
    return v;
}

GroupFunction from_fourier(const FiniteAbelianGroup& g, const std::vector<cplx>& coeff) {
    if (coeff.size() != static_cast<std::size_t>(g.order()))
        throw validation_error("coefficient vector length does not match group order");
    std::vector<cplx> v = coeff;
    full_transform(v, g, +1);
    return GroupFunction(g, std::move(v));
}

std::vector<std::pair<long long, cplx>> dominant_spectrum(const GroupFunction& f, double tau) {
    auto coeff = fourier_coefficients(f);
    std::vector<std::pair<long long, cplx>> out;
    for (long long chi = 0; chi < static_cast<long long>(coeff.size()); ++chi) {
        if (std::abs(coeff[static_cast<std::size_t>(chi)]) >= tau)
            out.emplace_back(chi, coeff[static_cast<std::size_t>(chi)]);
    }
    std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        double ma = std::abs(a.second), mb = std::abs(b.second);
        if (ma != mb) return ma > mb;
        return a.first < b.first;
    });
    return out;
}

} // namespace hofa
