#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <complex>
#include <random>
#include <vector>

#include "hofa/errors.hpp"
#include "hofa/gowers.hpp"
#include "hofa/polydeg.hpp"

using hofa::AbelianOps;
using hofa::Angle;
using hofa::cplx;
using hofa::FiniteAbelianGroup;
using hofa::GroupFunction;
using hofa::PolyMap;
using hofa::Rat;
using hofa::RunConfig;
using hofa::UnimodularFunction;

namespace {

RunConfig default_cfg;

// Value-space oracle: walks every shift tuple and checks the iterated
// multiplicative derivative numerically, with no angle arithmetic involved.
bool naive_is_degree(const GroupFunction& f, int d) {
    const long long n = f.group().order();
    std::vector<long long> t(static_cast<std::size_t>(d) + 1, 0);
    for (;;) {
        GroupFunction h = f;
        for (long long tt : t) h = hofa::delta(h, tt);
        for (std::size_t i = 0; i < h.size(); ++i) {
            if (std::abs(h[i] - cplx{1.0, 0.0}) > 1e-8) return false;
        }
        std::size_t j = 0;
        while (j < t.size() && ++t[j] == n) t[j++] = 0;
        if (j == t.size()) return true;
    }
}

UnimodularFunction rational_noise(const FiniteAbelianGroup& g, std::mt19937_64& rng,
                                  long long den) {
    std::vector<Angle> a;
    for (long long i = 0; i < g.order(); ++i)
        a.push_back(Angle::rational(static_cast<long long>(rng() % static_cast<std::uint64_t>(den)),
                                    den));
    return UnimodularFunction(g, std::move(a));
}

// Upper unitriangular 3x3 matrices over Z_p; element (a, b, c) packed as
// (a p + b) p + c, identity at index 0.
struct HeisenbergOps final : hofa::GroupOps {
    long long p;
    explicit HeisenbergOps(long long prime) : p(prime) {}

    long long order() const override { return p * p * p; }
    long long pack(long long a, long long b, long long c) const { return (a * p + b) * p + c; }
    long long mul(long long x, long long y) const override {
        long long a1 = x / (p * p), b1 = x / p % p, c1 = x % p;
        long long a2 = y / (p * p), b2 = y / p % p, c2 = y % p;
        return pack((a1 + a2) % p, (b1 + b2) % p, (c1 + c2 + a1 * b2) % p);
    }
    long long inv(long long x) const override {
        long long a = x / (p * p), b = x / p % p, c = x % p;
        return pack((p - a) % p, (p - b) % p, ((a * b % p - c) % p + p) % p);
    }
};

} // namespace

TEST_CASE("cyclic quadratic phase matches its closed form") {
    UnimodularFunction q = hofa::quadratic_phase_cyclic(5, 1, 0);
    GroupFunction qf = q.to_function();
    const std::vector<long long> nums = {0, 1, 4, 4, 1};
    for (std::size_t x = 0; x < 5; ++x) {
        CHECK(q.angle_at(x).equals_exact(Angle::rational(nums[x], 5)));
        CHECK(std::abs(qf[x] - hofa::unit_angle(static_cast<double>(nums[x]) / 5.0)) < 1e-14);
    }
    CHECK(q.exact());
    CHECK_THROWS_AS(hofa::quadratic_phase_cyclic(0, 1, 0), hofa::validation_error);
}

TEST_CASE("iterated derivatives of a quadratic phase collapse to the cross term") {
    for (auto [n, a, b] : {std::tuple<long long, long long, long long>{7, 3, 2}, {6, 2, 1}}) {
        UnimodularFunction q = hofa::quadratic_phase_cyclic(n, a, b);
        for (long long t1 = 0; t1 < n; ++t1) {
            for (long long t2 = 0; t2 < n; ++t2) {
                UnimodularFunction dd = q.derivative(t1).derivative(t2);
                Angle expect = Angle::rational(2 * a * t1 * t2 % n, n);
                for (long long x = 0; x < n; ++x)
                    CHECK(dd.angle_at(static_cast<std::size_t>(x)).equals_exact(expect));
                UnimodularFunction ddd = dd.derivative(1);
                for (long long x = 0; x < n; ++x)
                    CHECK(ddd.angle_at(static_cast<std::size_t>(x)).rat().num == 0);
            }
        }
    }
}

TEST_CASE("degree verdicts agree with the value-space oracle") {
    std::mt19937_64 rng(2026);
    for (long long n : {5LL, 6LL}) {
        FiniteAbelianGroup g({n});
        std::vector<UnimodularFunction> pool;
        pool.push_back(hofa::quadratic_phase_cyclic(n, 1, 0));
        pool.push_back(hofa::quadratic_phase_cyclic(n, 0, 2));
        pool.push_back(hofa::quadratic_phase_cyclic(n, 0, 0));
        for (int i = 0; i < 6; ++i) pool.push_back(rational_noise(g, rng, 12));
        for (const auto& f : pool) {
            for (int d = 0; d <= 2; ++d) {
                hofa::DegreeVerdict v = hofa::is_degree_d(f, d, default_cfg);
                CHECK(v.exhaustive);
                CHECK(v.holds == naive_is_degree(f.to_function(), d));
            }
        }
    }
}

TEST_CASE("quadratic phases sit exactly at degree two") {
    UnimodularFunction q = hofa::quadratic_phase_cyclic(5, 1, 0);
    CHECK(hofa::is_degree_d(q, 2, default_cfg).holds);
    CHECK_FALSE(hofa::is_degree_d(q, 1, default_cfg).holds);
    for (long long t = 0; t < 5; ++t) {
        UnimodularFunction dq = q.derivative(t);
        CHECK(hofa::is_degree_d(dq, 1, default_cfg).holds);
        bool constant = hofa::is_degree_d(dq, 0, default_cfg).holds;
        CHECK(constant == (t == 0));
    }
}

TEST_CASE("exhaustive refutation reports the first witness in walk order") {
    FiniteAbelianGroup g({7});
    std::vector<Angle> cubic;
    for (long long x = 0; x < 7; ++x) cubic.push_back(Angle::rational(x * x * x % 7, 7));
    UnimodularFunction f(g, cubic);

    hofa::DegreeVerdict v = hofa::is_degree_d(f, 2, default_cfg);
    CHECK(v.exhaustive);
    CHECK_FALSE(v.holds);
    REQUIRE(v.witness.size() == 3);
    CHECK(v.witness == std::vector<long long>{1, 1, 1});

    UnimodularFunction walked = f;
    for (long long t : v.witness) walked = walked.derivative(t);
    bool refutes = false;
    for (long long x = 0; x < 7; ++x)
        refutes = refutes || walked.angle_at(static_cast<std::size_t>(x)).rat().num != 0;
    CHECK(refutes);

    CHECK(hofa::is_degree_d(f, 3, default_cfg).holds);
}

TEST_CASE("oversized shift grids fall back to seeded sampling") {
    // 101^4 term grids exceed the default budget, so degree-2 checks on Z_101
    // run in randomized mode with a declared sample count.
    UnimodularFunction q = hofa::quadratic_phase_cyclic(101, 3, 7);
    hofa::DegreeVerdict ok = hofa::is_degree_d(q, 2, default_cfg, 1);
    CHECK(ok.holds);
    CHECK_FALSE(ok.exhaustive);
    CHECK(ok.samples == 1010);

    FiniteAbelianGroup g({101});
    std::vector<Angle> cubic;
    for (long long x = 0; x < 101; ++x)
        cubic.push_back(Angle::rational(x * x * x % 101, 101));
    UnimodularFunction f(g, cubic);

    hofa::DegreeVerdict bad = hofa::is_degree_d(f, 2, default_cfg, 1);
    CHECK_FALSE(bad.holds);
    CHECK_FALSE(bad.exhaustive);
    REQUIRE(bad.witness.size() == 3);
    UnimodularFunction walked = f;
    for (long long t : bad.witness) walked = walked.derivative(t);
    bool refutes = false;
    for (long long x = 0; x < 101; ++x)
        refutes = refutes || walked.angle_at(static_cast<std::size_t>(x)).rat().num != 0;
    CHECK(refutes);

    hofa::DegreeVerdict again = hofa::is_degree_d(f, 2, default_cfg, 1);
    CHECK(again.holds == bad.holds);
    CHECK(again.samples == bad.samples);
    CHECK(again.witness == bad.witness);
}

TEST_CASE("products and conjugates keep the degree bound") {
    FiniteAbelianGroup g({6});
    std::vector<std::pair<UnimodularFunction, int>> pool;
    pool.emplace_back(UnimodularFunction(g, std::vector<Angle>(6, Angle::rational(1, 4))), 0);
    for (long long c = 0; c < 6; ++c)
        pool.emplace_back(hofa::quadratic_phase_cyclic(6, 0, c), 1);
    for (long long a : {1LL, 2LL, 3LL}) {
        for (long long b : {0LL, 5LL}) pool.emplace_back(hofa::quadratic_phase_cyclic(6, a, b), 2);
    }

    for (const auto& [f, d] : pool) {
        CHECK(hofa::is_degree_d(f, d, default_cfg).holds);
        CHECK(hofa::is_degree_d(f.conjugated(), d, default_cfg).holds);
        for (const auto& [h, e] : pool) {
            hofa::DegreeVerdict v = hofa::is_degree_d(f.times(h), std::max(d, e), default_cfg);
            CHECK(v.exhaustive);
            CHECK(v.holds);
        }
    }
}

TEST_CASE("half-modulus phases exist exactly for matching parities") {
    UnimodularFunction q = hofa::quadratic_phase_half(4, 1, 0);
    const std::vector<Rat> expect = {Rat(0, 1), Rat(1, 8), Rat(1, 2), Rat(1, 8)};
    for (std::size_t x = 0; x < 4; ++x) CHECK(q.angle_at(x).rat() == expect[x]);

    // Descent to Z_N: the numerator gains a multiple of 2N under x -> x + N
    // exactly when the parity condition holds.
    for (long long n : {4LL, 6LL}) {
        for (long long a = 0; a < n; ++a) {
            for (long long b = 0; b < 2 * n; ++b) {
                const bool parity_ok = (a * n + b) % 2 == 0;
                if (!parity_ok) {
                    CHECK_THROWS_AS(hofa::quadratic_phase_half(n, a, b), hofa::validation_error);
                    continue;
                }
                for (long long x = 0; x < n; ++x) {
                    long long jump = a * (x + n) * (x + n) + b * (x + n) - a * x * x - b * x;
                    CHECK(jump % (2 * n) == 0);
                }
                CHECK(hofa::is_degree_d(hofa::quadratic_phase_half(n, a, b), 2, default_cfg)
                          .holds);
            }
        }
    }
    CHECK_THROWS_AS(hofa::quadratic_phase_half(5, 1, 5), hofa::validation_error);
}

TEST_CASE("every quadratic phase has unit third Gowers norm") {
    std::vector<UnimodularFunction> phases;
    phases.push_back(hofa::quadratic_phase_cyclic(5, 1, 0));
    phases.push_back(hofa::quadratic_phase_cyclic(6, 2, 3));
    phases.push_back(hofa::quadratic_phase_half(4, 1, 2));
    phases.push_back(hofa::quadratic_phase_half(6, 3, 2));
    phases.push_back(hofa::quadratic_phase_vector(3, {{1, 2}, {2, 0}}, {1, 0}));
    phases.push_back(hofa::quadratic_phase_vector(5, {{2}}, {3}));
    for (const auto& q : phases) {
        CHECK(hofa::is_degree_d(q, 2, default_cfg).holds);
        CHECK(hofa::uk_norm(q.to_function(), 3, default_cfg) == doctest::Approx(1.0).epsilon(1e-9));
    }

    // A fully quadratic cyclic phase is flat in the frequency domain, which
    // pins its second-order norm at |A|^(-1/4).
    double u2 = hofa::uk_norm(phases[0].to_function(), 2, default_cfg);
    CHECK(u2 == doctest::Approx(std::pow(5.0, -0.25)).epsilon(1e-9));
}

TEST_CASE("vector phase validation and degree") {
    CHECK_THROWS_AS(hofa::quadratic_phase_vector(3, {{0, 1}, {2, 0}}, {0, 0}),
                    hofa::validation_error);
    CHECK_THROWS_AS(hofa::quadratic_phase_vector(4, {{1}}, {0}), hofa::validation_error);
    CHECK_THROWS_AS(hofa::quadratic_phase_vector(9, {{1}}, {0}), hofa::validation_error);
    CHECK_THROWS_AS(hofa::quadratic_phase_vector(3, {{1, 0}}, {0}), hofa::validation_error);

    UnimodularFunction q = hofa::quadratic_phase_vector(3, {{1, 2}, {2, 0}}, {1, 0});
    CHECK(q.group().order() == 9);
    hofa::DegreeVerdict v = hofa::is_degree_d(q, 2, default_cfg);
    CHECK(v.exhaustive);
    CHECK(v.holds);
    CHECK_FALSE(hofa::is_degree_d(q, 1, default_cfg).holds);

    // Zero matrix: a plain character, degree one.
    UnimodularFunction lin = hofa::quadratic_phase_vector(3, {{0, 0}, {0, 0}}, {1, 2});
    CHECK(hofa::is_degree_d(lin, 1, default_cfg).holds);
}

TEST_CASE("group-valued map derivatives and polynomiality") {
    HeisenbergOps heis(2);

    // Group law sanity against the packed representation.
    for (long long x = 0; x < 8; ++x) {
        CHECK(heis.mul(x, heis.inv(x)) == 0);
        CHECK(heis.mul(heis.inv(x), x) == 0);
        for (long long y = 0; y < 8; ++y) {
            for (long long z = 0; z < 8; ++z)
                CHECK(heis.mul(heis.mul(x, y), z) == heis.mul(x, heis.mul(y, z)));
        }
    }
    // Non-abelian: the two standard generators do not commute.
    CHECK(heis.mul(heis.pack(1, 0, 0), heis.pack(0, 1, 0)) !=
          heis.mul(heis.pack(0, 1, 0), heis.pack(1, 0, 0)));

    // x -> (x, 0, x(x-1)/2) with entries reduced mod 2.  The central slot is
    // a genuine quadratic, so three derivatives trivialize but two do not.
    auto binom_table = [&](long long n) {
        std::vector<long long> t(static_cast<std::size_t>(n));
        for (long long x = 0; x < n; ++x) {
            t[static_cast<std::size_t>(x)] = heis.pack(x % 2, 0, x * (x - 1) / 2 % 2);
            // descends from the integers to Z_n
            long long y = x + n;
            REQUIRE(t[static_cast<std::size_t>(x)] == heis.pack(y % 2, 0, y * (y - 1) / 2 % 2));
        }
        return t;
    };

    PolyMap phi4(FiniteAbelianGroup({4}), &heis, binom_table(4));
    hofa::DegreeVerdict deg2 = hofa::is_polynomial_map(phi4, 2, default_cfg);
    CHECK(deg2.exhaustive);
    CHECK(deg2.holds);

    hofa::DegreeVerdict deg1 = hofa::is_polynomial_map(phi4, 1, default_cfg);
    CHECK_FALSE(deg1.holds);
    REQUIRE(deg1.witness.size() == 2);
    PolyMap walked = phi4;
    for (long long h : deg1.witness) walked = hofa::map_derivative(walked, h);
    bool refutes = false;
    for (long long v : walked.table) refutes = refutes || v != 0;
    CHECK(refutes);

    // On Z_8 three derivatives still trivialize the map.
    PolyMap phi8(FiniteAbelianGroup({8}), &heis, binom_table(8));
    CHECK(hofa::is_polynomial_map(phi8, 2, default_cfg).holds);

    // The group law matters: x -> (x, x, x) mod 2 has linear entries, yet the
    // commutator pushed into the center makes it degree two, not one.
    std::vector<long long> diag(4);
    for (long long x = 0; x < 4; ++x)
        diag[static_cast<std::size_t>(x)] = heis.pack(x % 2, x % 2, x % 2);
    PolyMap rho(FiniteAbelianGroup({4}), &heis, diag);
    CHECK(hofa::is_polynomial_map(rho, 2, default_cfg).holds);
    hofa::DegreeVerdict rho1 = hofa::is_polynomial_map(rho, 1, default_cfg);
    CHECK_FALSE(rho1.holds);
    REQUIRE(rho1.witness.size() == 2);
    PolyMap rwalk = rho;
    for (long long h : rho1.witness) rwalk = hofa::map_derivative(rwalk, h);
    bool rref = false;
    for (long long v : rwalk.table) rref = rref || v != 0;
    CHECK(rref);
}

TEST_CASE("map derivatives of constants and homomorphisms") {
    FiniteAbelianGroup z6({6});
    AbelianOps target(z6);

    PolyMap constant(z6, &target, std::vector<long long>(6, 4));
    for (long long h = 0; h < 6; ++h) {
        PolyMap d = hofa::map_derivative(constant, h);
        for (long long v : d.table) CHECK(v == 0);
    }
    CHECK(hofa::is_polynomial_map(constant, 0, default_cfg).holds);

    std::vector<long long> hom(6);
    for (long long x = 0; x < 6; ++x) hom[static_cast<std::size_t>(x)] = 5 * x % 6;
    PolyMap psi(z6, &target, hom);
    for (long long h = 0; h < 6; ++h) {
        PolyMap d = hofa::map_derivative(psi, h);
        for (long long v : d.table) CHECK(v == 5 * h % 6);
    }
    CHECK(hofa::is_polynomial_map(psi, 1, default_cfg).holds);
    CHECK_FALSE(hofa::is_polynomial_map(psi, 0, default_cfg).holds);

    std::vector<long long> square(6);
    for (long long x = 0; x < 6; ++x) square[static_cast<std::size_t>(x)] = x * x % 6;
    PolyMap sq(z6, &target, square);
    CHECK(hofa::is_polynomial_map(sq, 2, default_cfg).holds);
    CHECK_FALSE(hofa::is_polynomial_map(sq, 1, default_cfg).holds);
}

TEST_CASE("oversized map grids fall back to seeded sampling") {
    FiniteAbelianGroup z101({101});
    AbelianOps target(z101);

    std::vector<long long> square(101);
    for (long long x = 0; x < 101; ++x) square[static_cast<std::size_t>(x)] = x * x % 101;
    hofa::DegreeVerdict ok = hofa::is_polynomial_map(PolyMap(z101, &target, square), 2,
                                                     default_cfg, 1);
    CHECK(ok.holds);
    CHECK_FALSE(ok.exhaustive);
    CHECK(ok.samples == 1010);

    std::vector<long long> cube(101);
    for (long long x = 0; x < 101; ++x) cube[static_cast<std::size_t>(x)] = x * x * x % 101;
    hofa::DegreeVerdict bad = hofa::is_polynomial_map(PolyMap(z101, &target, cube), 2,
                                                      default_cfg, 1);
    CHECK_FALSE(bad.holds);
    CHECK(bad.witness.size() == 3);
}

TEST_CASE("float-mode functions are adopted but refused exact claims") {
    FiniteAbelianGroup g({6});
    std::mt19937_64 rng(7);
    GroupFunction f = hofa::random_unimodular(g, rng);

    UnimodularFunction u = UnimodularFunction::adopt(f);
    CHECK_FALSE(u.exact());
    GroupFunction back = u.to_function();
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(std::abs(back[i] - f[i]) < 1e-10);

    CHECK_THROWS_AS(hofa::is_degree_d(u, 1, default_cfg), hofa::validation_error);
    CHECK_THROWS_AS(UnimodularFunction::adopt(GroupFunction::constant(g, cplx{0.5, 0.0})),
                    hofa::validation_error);
}

TEST_CASE("input validation") {
    FiniteAbelianGroup g({6});
    CHECK_THROWS_AS(UnimodularFunction(g, std::vector<Angle>(5)), hofa::validation_error);

    UnimodularFunction q = hofa::quadratic_phase_cyclic(6, 1, 1);
    CHECK_THROWS_AS(q.derivative(6), hofa::validation_error);
    CHECK_THROWS_AS(q.derivative(-1), hofa::validation_error);
    CHECK_THROWS_AS(hofa::is_degree_d(q, -1, default_cfg), hofa::validation_error);

    AbelianOps target(g);
    CHECK_THROWS_AS(PolyMap(g, nullptr, std::vector<long long>(6, 0)), hofa::validation_error);
    CHECK_THROWS_AS(PolyMap(g, &target, std::vector<long long>(5, 0)), hofa::validation_error);
    CHECK_THROWS_AS(PolyMap(g, &target, std::vector<long long>(6, 6)), hofa::validation_error);

    FiniteAbelianGroup z22({2, 2});
    UnimodularFunction other(z22, std::vector<Angle>(4));
    CHECK_THROWS_AS(q.times(other), hofa::validation_error);
}
