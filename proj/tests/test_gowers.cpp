#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <vector>

#include "hofa/gowers.hpp"

using hofa::cplx;
using hofa::FiniteAbelianGroup;
using hofa::FunctionSystem;
using hofa::GroupFunction;

namespace {

// ---- oracles: literal grid sums straight from the definitions ----

int popcount_parity(unsigned m) { return __builtin_popcount(m) & 1; }

// walks shift tuples (t_1, ..., t_k) recursively, no incremental tricks
template <typename Body>
void walk(const FiniteAbelianGroup& g, int k, std::vector<long long>& t, Body&& body) {
    if (static_cast<int>(t.size()) == k) {
        body(t);
        return;
    }
    for (long long v = 0; v < g.order(); ++v) {
        t.push_back(v);
        walk(g, k, t, body);
        t.pop_back();
    }
}

cplx naive_conv_at(const FunctionSystem& F, const std::vector<long long>& t) {
    const auto& g = F.group();
    cplx acc{0.0, 0.0};
    for (long long x = 0; x < g.order(); ++x) {
        cplx prod{1.0, 0.0};
        for (unsigned S = 0; S < (1u << F.order); ++S) {
            long long y = x;
            for (int i = 0; i < F.order; ++i)
                if (S & (1u << i)) y = g.add(y, t[static_cast<std::size_t>(i)]);
            prod *= F.f[S][static_cast<std::size_t>(y)];
        }
        acc += prod;
    }
    return acc / static_cast<double>(g.order());
}

cplx naive_box_inner(const FunctionSystem& F) {
    const auto& g = F.group();
    cplx total{0.0, 0.0};
    std::vector<long long> t;
    std::uint64_t tuples = 0;
    walk(g, F.order, t, [&](const std::vector<long long>& tt) {
        ++tuples;
        for (long long x = 0; x < g.order(); ++x) {
            cplx prod{1.0, 0.0};
            for (unsigned S = 0; S < (1u << F.order); ++S) {
                long long y = x;
                for (int i = 0; i < F.order; ++i)
                    if (S & (1u << i)) y = g.add(y, tt[static_cast<std::size_t>(i)]);
                cplx v = F.f[S][static_cast<std::size_t>(y)];
                prod *= popcount_parity(S) ? std::conj(v) : v;
            }
            total += prod;
        }
    });
    return total / (static_cast<double>(tuples) * static_cast<double>(g.order()));
}

double naive_uk_norm(const GroupFunction& f, int k) {
    return std::pow(std::abs(naive_box_inner(FunctionSystem::constant(f, k))),
                    1.0 / std::ldexp(1.0, k));
}

FunctionSystem random_system(const FiniteAbelianGroup& g, int k, std::uint64_t seed,
                             bool unimodular = false) {
    std::mt19937_64 rng(seed);
    std::vector<GroupFunction> fs;
    for (unsigned S = 0; S < (1u << k); ++S)
        fs.push_back(unimodular ? hofa::random_unimodular(g, rng) : hofa::random_disk(g, rng));
    return FunctionSystem(k, std::move(fs));
}

} // namespace

TEST_CASE("convolution matches the literal definition") {
    for (auto& [factors, k] : std::vector<std::pair<std::vector<long long>, int>>{
             {{5}, 1}, {{5}, 2}, {{2, 3}, 2}, {{4}, 3}}) {
        FiniteAbelianGroup g(factors);
        FunctionSystem F = random_system(g, k, 100 + g.order() + k);
        GroupFunction c = hofa::convolution(F);
        FiniteAbelianGroup pg = hofa::power_group(g, k);
        REQUIRE(c.group() == pg);

        std::vector<long long> t;
        std::uint64_t idx = 0;
        walk(g, k, t, [&](const std::vector<long long>& tt) {
            cplx expect = naive_conv_at(F, tt);
            CHECK(std::abs(c[static_cast<std::size_t>(idx)] - expect) < 1e-12);
            // tuple index arithmetic agrees with the power group encoding
            long long enc = 0;
            for (int j = 0; j < k; ++j) enc = enc * g.order() + tt[static_cast<std::size_t>(j)];
            CHECK(enc == static_cast<long long>(idx));
            ++idx;
        });
    }
}

TEST_CASE("box inner product matches the literal definition") {
    for (auto& [factors, k] : std::vector<std::pair<std::vector<long long>, int>>{
             {{5}, 1}, {{5}, 2}, {{2, 3}, 2}, {{3}, 3}}) {
        FiniteAbelianGroup g(factors);
        FunctionSystem F = random_system(g, k, 200 + g.order() + k);
        CHECK(std::abs(hofa::box_inner(F) - naive_box_inner(F)) < 1e-12);
    }
}

TEST_CASE("uniformity norm equals the constant-system box inner product") {
    std::mt19937_64 rng(42);
    for (auto factors : std::vector<std::vector<long long>>{{5}, {2, 3}, {7}}) {
        FiniteAbelianGroup g(factors);
        GroupFunction f = hofa::random_disk(g, rng);
        for (int k = 1; k <= 3; ++k)
            CHECK(hofa::uk_norm(f, k) == doctest::Approx(naive_uk_norm(f, k)).epsilon(1e-9));
    }
}

TEST_CASE("order one norm is the absolute mean") {
    std::mt19937_64 rng(7);
    FiniteAbelianGroup g({9});
    GroupFunction f = hofa::random_disk(g, rng);
    CHECK(hofa::uk_norm(f, 1) == doctest::Approx(std::abs(f.mean())).epsilon(1e-12));
}

TEST_CASE("order two fast path agrees with the literal grid on a large group") {
    std::mt19937_64 rng(11);
    FiniteAbelianGroup g({101});
    GroupFunction f = hofa::random_disk(g, rng);
    // |A|^3 * 4 terms is still within the default budget
    double lit = std::pow(std::abs(hofa::box_inner(FunctionSystem::constant(f, 2))), 0.25);
    CHECK(hofa::uk_norm(f, 2) == doctest::Approx(lit).epsilon(1e-9));
}

TEST_CASE("norm of a character and of the constant function is one") {
    FiniteAbelianGroup g({12});
    GroupFunction one = GroupFunction::constant(g, cplx{1.0, 0.0});
    for (int k = 1; k <= 3; ++k) CHECK(hofa::uk_norm(one, k) == doctest::Approx(1.0));
    GroupFunction chi = GroupFunction::character(g, 5);
    CHECK(hofa::uk_norm(chi, 2) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(hofa::uk_norm(chi, 3) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(hofa::uk_norm(chi, 1)) < 1e-9);
}

TEST_CASE("norm is invariant under multiplication by a character") {
    std::mt19937_64 rng(13);
    FiniteAbelianGroup g({10});
    GroupFunction f = hofa::random_disk(g, rng);
    GroupFunction chi = GroupFunction::character(g, 3);
    GroupFunction fchi = f.pointwise_times(chi);
    for (int k = 2; k <= 3; ++k)
        CHECK(hofa::uk_norm(fchi, k) == doctest::Approx(hofa::uk_norm(f, k)).epsilon(1e-9));
}

TEST_CASE("norms grow with the order") {
    std::mt19937_64 rng(17);
    for (auto factors : std::vector<std::vector<long long>>{{5}, {6}, {2, 4}}) {
        FiniteAbelianGroup g(factors);
        for (int rep = 0; rep < 3; ++rep) {
            GroupFunction f = hofa::random_disk(g, rng);
            double u1 = hofa::uk_norm(f, 1);
            double u2 = hofa::uk_norm(f, 2);
            double u3 = hofa::uk_norm(f, 3);
            CHECK(u1 <= u2 + 1e-12);
            CHECK(u2 <= u3 + 1e-12);
        }
    }
}

TEST_CASE("box inner product splits through convolutions") {
    for (auto& [factors, k1] : std::vector<std::pair<std::vector<long long>, int>>{
             {{5}, 2}, {{2, 3}, 2}, {{3}, 3}}) {
        FiniteAbelianGroup g(factors);
        FunctionSystem F = random_system(g, k1, 300 + g.order() + k1);
        GroupFunction cb = hofa::convolution(hofa::bottom_system(F));
        GroupFunction ct = hofa::convolution(hofa::top_system(F));
        cplx via_split = cb.inner(ct);
        CHECK(std::abs(hofa::box_inner(F) - via_split) < 1e-12);
    }
}

TEST_CASE("doubled system computes the convolution energy") {
    for (auto& [factors, k] : std::vector<std::pair<std::vector<long long>, int>>{
             {{5}, 1}, {{4}, 1}, {{3}, 2}}) {
        FiniteAbelianGroup g(factors);
        FunctionSystem F = random_system(g, k, 400 + g.order() + k);
        GroupFunction c = hofa::convolution(F);
        double energy = c.norm2() * c.norm2();
        cplx via_doubled = hofa::box_inner(hofa::doubled_system(F));
        CHECK(std::abs(via_doubled.imag()) < 1e-12);
        CHECK(via_doubled.real() == doctest::Approx(energy).epsilon(1e-9));
    }
}

TEST_CASE("box inner product is bounded by the norm product") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        for (auto& [factors, k] : std::vector<std::pair<std::vector<long long>, int>>{
                 {{5}, 2}, {{6}, 2}, {{2, 3}, 2}, {{3}, 3}}) {
            FiniteAbelianGroup g(factors);
            FunctionSystem F = random_system(g, k, 500 + 31 * seed + g.order() + k);
            double lhs = std::abs(hofa::box_inner(F));
            double rhs = hofa::box_inner_norm_bound(F);
            CHECK(lhs <= rhs + 1e-9);
        }
    }
}

TEST_CASE("convolution energy is bounded by next-order norms") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        for (auto& [factors, k] : std::vector<std::pair<std::vector<long long>, int>>{
                 {{5}, 1}, {{2, 3}, 1}, {{4}, 2}}) {
            FiniteAbelianGroup g(factors);
            FunctionSystem F = random_system(g, k, 600 + 37 * seed + g.order() + k);
            GroupFunction c = hofa::convolution(F);
            double prod = 1.0;
            for (const auto& fn : F.f) prod *= hofa::uk_norm(fn, k + 1);
            CHECK(c.norm2() <= prod + 1e-9);
        }
    }
}

TEST_CASE("interpolation bound dominates the convolution energy") {
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        for (auto& [factors, k] : std::vector<std::pair<std::vector<long long>, int>>{
                 {{5}, 2}, {{7}, 2}, {{2, 3}, 2}}) {
            FiniteAbelianGroup g(factors);
            // bound requires functions of modulus at most one
            FunctionSystem F = random_system(g, k, 700 + 41 * seed + g.order(), true);
            GroupFunction c = hofa::convolution(F);
            double energy = c.norm2() * c.norm2();
            for (int i = 0; i < k; ++i)
                CHECK(energy <= hofa::conv_l2_interpolation_bound(F, i) + 1e-9);
        }
    }
}

TEST_CASE("grid evaluation respects the term budget") {
    FiniteAbelianGroup g({101});
    std::mt19937_64 rng(3);
    GroupFunction f = hofa::random_disk(g, rng);
    hofa::RunConfig small;
    small.budget = 1000;
    CHECK_THROWS_AS(hofa::box_inner(FunctionSystem::constant(f, 2), small),
                    hofa::resource_error);
    CHECK_THROWS_AS(hofa::uk_norm(f, 4, small), hofa::resource_error);
    // order three on a group of order 101 fits the default budget through
    // the derivative recursion even though the literal grid would not
    hofa::RunConfig dflt;
    double u3 = hofa::uk_norm(f, 3, dflt);
    CHECK(u3 > 0.0);
    CHECK(u3 < 1.0);
}

TEST_CASE("system construction is validated") {
    FiniteAbelianGroup g({4}), h({5});
    std::mt19937_64 rng(5);
    std::vector<GroupFunction> fs(4, hofa::random_disk(g, rng));
    CHECK_NOTHROW(FunctionSystem(2, fs));
    CHECK_THROWS_AS(FunctionSystem(3, fs), hofa::validation_error);
    fs[2] = hofa::random_disk(h, rng);
    CHECK_THROWS_AS(FunctionSystem(2, fs), hofa::validation_error);
}
