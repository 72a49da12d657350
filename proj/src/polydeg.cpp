#include "hofa/polydeg.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <utility>

#include "hofa/errors.hpp"

namespace hofa {

namespace {

// n^e with saturation, for budget comparisons.
std::uint64_t pow_saturating(std::uint64_t n, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (n != 0 && r > UINT64_MAX / n) return UINT64_MAX;
        r *= n;
    }
    return r;
}

long long mulmod(long long a, long long b, long long m) {
    return static_cast<long long>(static_cast<__int128>(a) * b % m);
}

bool all_zero(const std::vector<Angle>& a) {
    for (const Angle& x : a) {
        if (x.rat().num != 0) return false;
    }
    return true;
}

std::vector<Angle> derived_angles(const FiniteAbelianGroup& g, const std::vector<Angle>& a,
                                  long long t) {
    const long long n = g.order();
    std::vector<Angle> out(static_cast<std::size_t>(n));
    for (long long x = 0; x < n; ++x) {
        out[static_cast<std::size_t>(x)] =
            a[static_cast<std::size_t>(g.add(x, t))] - a[static_cast<std::size_t>(x)];
    }
    return out;
}

// Depth-first walk of the shift grid; returns false with `tuple` holding the
// refuting shifts as soon as one iterated derivative is not constant one.
bool degree_walk(const FiniteAbelianGroup& g, const std::vector<Angle>& a, int remaining,
                 std::vector<long long>& tuple, std::uint64_t& samples) {
    if (remaining == 0) {
        ++samples;
        return all_zero(a);
    }
    for (long long t = 0; t < g.order(); ++t) {
        tuple.push_back(t);
        if (!degree_walk(g, derived_angles(g, a, t), remaining - 1, tuple, samples)) return false;
        tuple.pop_back();
    }
    return true;
}

} // namespace

UnimodularFunction::UnimodularFunction(FiniteAbelianGroup g, std::vector<Angle> angles)
    : g_(std::move(g)), angles_(std::move(angles)) {
    if (angles_.size() != static_cast<std::size_t>(g_.order()))
        throw validation_error("unimodular function needs one angle per group element");
    exact_ = true;
    for (const Angle& a : angles_) exact_ = exact_ && a.exact();
}

UnimodularFunction UnimodularFunction::adopt(const GroupFunction& f) {
    std::vector<Angle> angles;
    angles.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (std::abs(std::abs(f[i]) - 1.0) > 1e-12)
            throw validation_error("adopt needs unit-modulus values (within 1e-12)");
        double t = std::arg(f[i]) / (2.0 * std::numbers::pi);
        if (t < 0.0) t += 1.0;
        if (t >= 1.0) t = 0.0;
        angles.push_back(Angle::real(t));
    }
    return UnimodularFunction(f.group(), std::move(angles));
}

GroupFunction UnimodularFunction::to_function() const {
    GroupFunction f(g_);
    for (std::size_t i = 0; i < angles_.size(); ++i) f[i] = angles_[i].unit();
    return f;
}

UnimodularFunction UnimodularFunction::derivative(long long t) const {
    if (t < 0 || t >= g_.order()) throw validation_error("derivative shift out of range");
    return UnimodularFunction(g_, derived_angles(g_, angles_, t));
}

UnimodularFunction UnimodularFunction::times(const UnimodularFunction& other) const {
    if (other.g_.factors() != g_.factors())
        throw validation_error("pointwise product needs matching groups");
    std::vector<Angle> out(angles_.size());
    for (std::size_t i = 0; i < angles_.size(); ++i) out[i] = angles_[i] + other.angles_[i];
    return UnimodularFunction(g_, std::move(out));
}

UnimodularFunction UnimodularFunction::conjugated() const {
    std::vector<Angle> out(angles_.size());
    for (std::size_t i = 0; i < angles_.size(); ++i) out[i] = -angles_[i];
    return UnimodularFunction(g_, std::move(out));
}

DegreeVerdict is_degree_d(const UnimodularFunction& f, int d, const RunConfig& cfg,
                          std::uint64_t seed) {
    if (d < 0 || d > 60) throw validation_error("degree must lie in [0, 60]");
    if (!f.exact())
        throw validation_error(
            "degree verification needs exact angles; refusing a float-mode claim");

    const FiniteAbelianGroup& g = f.group();
    const auto n = static_cast<std::uint64_t>(g.order());
    DegreeVerdict v;

    if (pow_saturating(n, d + 2) <= cfg.budget) {
        v.exhaustive = true;
        std::vector<long long> tuple;
        v.holds = degree_walk(g, f.angles(), d + 1, tuple, v.samples);
        if (!v.holds) v.witness = tuple;
        return v;
    }

    v.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> pick(0, g.order() - 1);
    const std::uint64_t wanted = 10 * n;
    v.holds = true;
    for (std::uint64_t s = 0; s < wanted; ++s) {
        std::vector<long long> tuple(static_cast<std::size_t>(d + 1));
        for (auto& t : tuple) t = pick(rng);
        std::vector<Angle> a = f.angles();
        for (long long t : tuple) a = derived_angles(g, a, t);
        ++v.samples;
        if (!all_zero(a)) {
            v.holds = false;
            v.witness = tuple;
            break;
        }
    }
    return v;
}

PolyMap::PolyMap(FiniteAbelianGroup s, const GroupOps* d, std::vector<long long> t)
    : src(std::move(s)), dst(d), table(std::move(t)) {
    if (dst == nullptr) throw validation_error("polynomial map needs a target group");
    if (table.size() != static_cast<std::size_t>(src.order()))
        throw validation_error("polynomial map table needs one entry per source element");
    for (long long v : table) {
        if (v < 0 || v >= dst->order())
            throw validation_error("polynomial map value out of target range");
    }
}

PolyMap map_derivative(const PolyMap& phi, long long h) {
    if (h < 0 || h >= phi.src.order()) throw validation_error("derivative shift out of range");
    std::vector<long long> out(phi.table.size());
    for (long long g = 0; g < phi.src.order(); ++g) {
        out[static_cast<std::size_t>(g)] =
            phi.dst->mul(phi.dst->inv(phi.at(g)), phi.at(phi.src.add(g, h)));
    }
    return PolyMap(phi.src, phi.dst, std::move(out));
}

namespace {

bool map_is_identity(const PolyMap& phi) {
    for (long long v : phi.table) {
        if (v != phi.dst->identity()) return false;
    }
    return true;
}

bool poly_walk(const PolyMap& phi, int remaining, std::vector<long long>& tuple,
               std::uint64_t& samples) {
    if (remaining == 0) {
        ++samples;
        return map_is_identity(phi);
    }
    for (long long h = 0; h < phi.src.order(); ++h) {
        tuple.push_back(h);
        if (!poly_walk(map_derivative(phi, h), remaining - 1, tuple, samples)) return false;
        tuple.pop_back();
    }
    return true;
}

} // namespace

DegreeVerdict is_polynomial_map(const PolyMap& phi, int k, const RunConfig& cfg,
                                std::uint64_t seed) {
    if (k < 0 || k > 60) throw validation_error("polynomial degree must lie in [0, 60]");
    const auto n = static_cast<std::uint64_t>(phi.src.order());
    DegreeVerdict v;

    if (pow_saturating(n, k + 2) <= cfg.budget) {
        v.exhaustive = true;
        std::vector<long long> tuple;
        v.holds = poly_walk(phi, k + 1, tuple, v.samples);
        if (!v.holds) v.witness = tuple;
        return v;
    }

    v.exhaustive = false;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long long> pick(0, phi.src.order() - 1);
    const std::uint64_t wanted = 10 * n;
    v.holds = true;
    for (std::uint64_t s = 0; s < wanted; ++s) {
        std::vector<long long> tuple(static_cast<std::size_t>(k + 1));
        for (auto& h : tuple) h = pick(rng);
        PolyMap cur = phi;
        for (long long h : tuple) cur = map_derivative(cur, h);
        ++v.samples;
        if (!map_is_identity(cur)) {
            v.holds = false;
            v.witness = tuple;
            break;
        }
    }
    return v;
}

namespace {

long long nonneg_mod(long long a, long long m) {
    long long r = a % m;
    return r < 0 ? r + m : r;
}

bool small_odd_prime(long long p) {
    if (p < 3 || p % 2 == 0) return false;
    for (long long q = 3; q * q <= p; q += 2) {
        if (p % q == 0) return false;
    }
    return true;
}

} // namespace

UnimodularFunction quadratic_phase_cyclic(long long n, long long a, long long b) {
    if (n < 1) throw validation_error("cyclic phase needs modulus >= 1");
    FiniteAbelianGroup g({n});
    a = nonneg_mod(a, n);
    b = nonneg_mod(b, n);
    std::vector<Angle> angles(static_cast<std::size_t>(n));
    for (long long x = 0; x < n; ++x) {
        long long num = nonneg_mod(mulmod(mulmod(a, x, n), x, n) + mulmod(b, x, n), n);
        angles[static_cast<std::size_t>(x)] = Angle::rational(num, n);
    }
    return UnimodularFunction(std::move(g), std::move(angles));
}

UnimodularFunction quadratic_phase_half(long long n, long long a, long long b) {
    if (n < 2 || n % 2 != 0) throw validation_error("half-modulus phase needs an even modulus");
    const long long m = 2 * n;
    a = nonneg_mod(a, n);
    b = nonneg_mod(b, m);
    // b = a N (mod 2), computed factor-wise to avoid overflowing a * N
    if ((a % 2 * (n % 2) + b % 2) % 2 != 0)
        throw validation_error(
            "ill-defined phase: the half-modulus family needs b = a N (mod 2)");
    FiniteAbelianGroup g({n});
    std::vector<Angle> angles(static_cast<std::size_t>(n));
    for (long long x = 0; x < n; ++x) {
        long long num = nonneg_mod(mulmod(mulmod(a, x, m), x, m) + mulmod(b, x, m), m);
        angles[static_cast<std::size_t>(x)] = Angle::rational(num, m);
    }
    return UnimodularFunction(std::move(g), std::move(angles));
}

UnimodularFunction quadratic_phase_vector(long long p,
                                          const std::vector<std::vector<long long>>& m,
                                          const std::vector<long long>& b) {
    if (!small_odd_prime(p)) throw validation_error("vector phase needs an odd prime modulus");
    const std::size_t dim = b.size();
    if (dim == 0) throw validation_error("vector phase needs dimension >= 1");
    if (m.size() != dim) throw validation_error("matrix and vector dimensions differ");
    for (const auto& row : m) {
        if (row.size() != dim) throw validation_error("phase matrix must be square");
    }
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            if (nonneg_mod(m[i][j] - m[j][i], p) != 0)
                throw validation_error("phase matrix must be symmetric mod p");
        }
    }

    FiniteAbelianGroup g(std::vector<long long>(dim, p));
    std::vector<Angle> angles(static_cast<std::size_t>(g.order()));
    std::vector<long long> x;
    for (long long idx = 0; idx < g.order(); ++idx) {
        x = g.decode(idx);
        long long num = 0;
        for (std::size_t i = 0; i < dim; ++i) {
            num = nonneg_mod(num + b[i] % p * x[i], p);
            for (std::size_t j = 0; j < dim; ++j)
                num = nonneg_mod(num + nonneg_mod(m[i][j], p) * x[i] % p * x[j], p);
        }
        angles[static_cast<std::size_t>(idx)] = Angle::rational(num, p);
    }
    return UnimodularFunction(std::move(g), std::move(angles));
}

} // namespace hofa
