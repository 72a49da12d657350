#include "hofa/gowers.hpp"

#include <bit>
#include <cmath>

#include "hofa/fft.hpp"

namespace hofa {

namespace {

bool odd_popcount(unsigned mask) { return std::popcount(mask) & 1u; }

std::uint64_t pow_u64(std::uint64_t b, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > UINT64_MAX / b) return UINT64_MAX;
        r *= b;
    }
    return r;
}

// elementary-term count of the literal grid evaluation
std::uint64_t grid_cost(long long order, int k) {
    std::uint64_t c = pow_u64(static_cast<std::uint64_t>(order), k + 1);
    std::uint64_t m = std::uint64_t(1) << k;
    if (c > UINT64_MAX / m) return UINT64_MAX;
    return c * m;
}

void require_budget(std::uint64_t cost, const RunConfig& cfg, const char* what) {
    if (cost > cfg.budget)
        throw resource_error(std::string(what) +
                             " would exceed the term budget; raise HOFA_BUDGET to allow it");
}

// Walks all shift tuples t in A^k; for each, sigma[S] = sum_{i in S} t_i is
// maintained incrementally and `body(tuple_index, sigma)` is invoked.
template <typename Body>
void for_each_tuple(const AdditionTable& add, long long order, int k, Body&& body) {
    const unsigned nsub = 1u << k;
    std::vector<long long> t(static_cast<std::size_t>(k), 0);
    std::vector<long long> sigma(nsub, 0);
    std::uint64_t total = pow_u64(static_cast<std::uint64_t>(order), k);
    for (std::uint64_t idx = 0; idx < total; ++idx) {
        body(idx, sigma);
        // odometer step: coordinate k-1 is fastest, matching power_group order
        for (int j = k - 1; j >= 0; --j) {
            t[j] = (t[j] + 1) % order;
            // refresh sigma entries involving coordinate j (bit j set)
            for (unsigned S = 0; S < nsub; ++S) {
                if (S & (1u << j)) {
                    long long s = 0;
                    for (int i = 0; i < k; ++i)
                        if (S & (1u << i)) s = add.add(s, t[i]);
                    sigma[S] = s;
                }
            }
            if (t[j] != 0) break;
        }
    }
}

} // namespace

FunctionSystem::FunctionSystem(int k, std::vector<GroupFunction> fs) : order(k), f(std::move(fs)) {
    if (k < 1 || k > 20) throw validation_error("system order must be between 1 and 20");
    if (f.size() != (std::size_t(1) << k))
        throw validation_error("system needs exactly 2^k functions");
    for (const auto& fn : f)
        if (fn.group() != f.front().group())
            throw validation_error("system functions must share one group");
}

FunctionSystem FunctionSystem::constant(const GroupFunction& fn, int k) {
    if (k < 1 || k > 20) throw validation_error("system order must be between 1 and 20");
    return FunctionSystem(k, std::vector<GroupFunction>(std::size_t(1) << k, fn));
}

FiniteAbelianGroup power_group(const FiniteAbelianGroup& g, int k) {
    if (k < 1) throw validation_error("power group exponent must be positive");
    std::vector<long long> factors;
    factors.reserve(g.rank() * static_cast<std::size_t>(k));
    for (int j = 0; j < k; ++j)
        factors.insert(factors.end(), g.factors().begin(), g.factors().end());
    return FiniteAbelianGroup(std::move(factors));
}

GroupFunction convolution(const FunctionSystem& F, const RunConfig& cfg) {
    const auto& g = F.group();
    const int k = F.order;
    require_budget(grid_cost(g.order(), k), cfg, "convolution");
    AdditionTable add(g);
    FiniteAbelianGroup pg = power_group(g, k);
    GroupFunction out(pg);

    const unsigned nsub = 1u << k;
    const long long n = g.order();
    const double inv = 1.0 / static_cast<double>(n);
    for_each_tuple(add, n, k, [&](std::uint64_t idx, const std::vector<long long>& sigma) {
        cplx acc{0.0, 0.0};
        for (long long x = 0; x < n; ++x) {
            cplx prod = F.f[0][static_cast<std::size_t>(x)];
            for (unsigned S = 1; S < nsub; ++S)
                prod *= F.f[S][static_cast<std::size_t>(add.add(x, sigma[S]))];
            acc += prod;
        }
        out[static_cast<std::size_t>(idx)] = acc * inv;
    });
    return out;
}

cplx box_inner(const FunctionSystem& F, const RunConfig& cfg) {
    const auto& g = F.group();
    const int k = F.order;
    require_budget(grid_cost(g.order(), k), cfg, "box inner product");
    AdditionTable add(g);

    const unsigned nsub = 1u << k;
    const long long n = g.order();
    cplx total{0.0, 0.0};
    for_each_tuple(add, n, k, [&](std::uint64_t, const std::vector<long long>& sigma) {
        cplx acc{0.0, 0.0};
        for (long long x = 0; x < n; ++x) {
            cplx prod = F.f[0][static_cast<std::size_t>(x)];
            for (unsigned S = 1; S < nsub; ++S) {
                cplx v = F.f[S][static_cast<std::size_t>(add.add(x, sigma[S]))];
                prod *= odd_popcount(S) ? std::conj(v) : v;
            }
            acc += prod;
        }
        total += acc;
    });
    double terms = std::pow(static_cast<double>(n), k + 1);
    return total / terms;
}

namespace {

double u2_norm_power(const GroupFunction& fn) {
    auto coeff = fourier_coefficients(fn);
    double s = 0.0;
    for (const auto& c : coeff) {
        double m = std::norm(c);
        s += m * m;
    }
    return s;
}

std::uint64_t uk_cost(long long order, int k) {
    // recursion peels k-2 averaged derivatives off an order-2 base case
    std::uint64_t base = static_cast<std::uint64_t>(order) * static_cast<std::uint64_t>(order);
    std::uint64_t c = base;
    for (int i = 0; i < k - 2; ++i) {
        if (c > UINT64_MAX / static_cast<std::uint64_t>(order)) return UINT64_MAX;
        c *= static_cast<std::uint64_t>(order);
    }
    return c;
}

} // namespace

double uk_norm_power(const GroupFunction& fn, int k, const RunConfig& cfg) {
    if (k < 1) throw validation_error("uniformity norm order must be >= 1");
    if (k == 1) {
        double m = std::abs(fn.mean());
        return m * m;
    }
    if (k == 2) return u2_norm_power(fn);
    require_budget(uk_cost(fn.group().order(), k), cfg, "uniformity norm");
    const long long n = fn.group().order();
    double acc = 0.0;
    for (long long t = 0; t < n; ++t) acc += uk_norm_power(delta(fn, t), k - 1, cfg);
    return acc / static_cast<double>(n);
}

double uk_norm(const GroupFunction& fn, int k, const RunConfig& cfg) {
    double p = uk_norm_power(fn, k, cfg);
    if (p < 0.0) p = 0.0; // roundoff guard; the exact value is nonnegative
    return std::pow(p, 1.0 / std::ldexp(1.0, k));
}

double box_inner_norm_bound(const FunctionSystem& F, const RunConfig& cfg) {
    double prod = 1.0;
    for (const auto& fn : F.f) prod *= uk_norm(fn, F.order, cfg);
    return prod;
}

FunctionSystem bottom_system(const FunctionSystem& F) {
    if (F.order < 2) throw validation_error("splitting needs order >= 2");
    const int k = F.order - 1;
    std::vector<GroupFunction> fs;
    fs.reserve(std::size_t(1) << k);
    for (unsigned S = 0; S < (1u << k); ++S)
        fs.push_back(odd_popcount(S) ? F.f[S].conjugated() : F.f[S]);
    return FunctionSystem(k, std::move(fs));
}

FunctionSystem top_system(const FunctionSystem& F) {
    if (F.order < 2) throw validation_error("splitting needs order >= 2");
    const int k = F.order - 1;
    const unsigned topbit = 1u << k;
    std::vector<GroupFunction> fs;
    fs.reserve(std::size_t(1) << k);
    for (unsigned S = 0; S < (1u << k); ++S) {
        const GroupFunction& fn = F.f[S | topbit];
        fs.push_back(odd_popcount(S) ? fn.conjugated() : fn);
    }
    return FunctionSystem(k, std::move(fs));
}

FunctionSystem doubled_system(const FunctionSystem& F) {
    const int k = F.order;
    const unsigned topbit = 1u << k;
    std::vector<GroupFunction> fs(std::size_t(1) << (k + 1), GroupFunction(F.group()));
    for (unsigned S = 0; S < topbit; ++S) {
        GroupFunction g = odd_popcount(S) ? F.f[S].conjugated() : F.f[S];
        fs[S] = g;
        fs[S | topbit] = std::move(g);
    }
    return FunctionSystem(k + 1, std::move(fs));
}

double conv_l2_interpolation_bound(const FunctionSystem& F, int i, const RunConfig& cfg) {
    const int k = F.order;
    if (i < 0 || i >= k) throw validation_error("interpolation coordinate out of range");
    const auto& g = F.group();
    const long long n = g.order();
    const unsigned ibit = 1u << i;

    double acc = 0.0;
    for (long long u = 0; u < n; ++u) {
        double prod = 1.0;
        for (unsigned S = 0; S < (1u << k); ++S) {
            if (S & ibit) continue;
            GroupFunction paired = F.f[S].pointwise_times(shift(F.f[S | ibit], u));
            prod *= uk_norm(paired, k, cfg);
        }
        acc += prod;
    }
    return acc / static_cast<double>(n);
}

} // namespace hofa
