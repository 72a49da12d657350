#pragma once

#include <cstdint>
#include <vector>

#include "hofa/config.hpp"
#include "hofa/function.hpp"

namespace hofa {

/**
 * Unit-modulus function stored as a circle angle per point.  When every
 * angle is rational the function is in exact mode and identities like
 * "this iterated derivative is constant one" are decidable exactly.
 */
class UnimodularFunction {
public:
    UnimodularFunction(FiniteAbelianGroup g, std::vector<Angle> angles);

    /// Float-mode adoption of a pointwise-unimodular function (|f| within
    /// 1e-12 of one everywhere; rejected otherwise).
    static UnimodularFunction adopt(const GroupFunction& f);

    const FiniteAbelianGroup& group() const { return g_; }
    bool exact() const { return exact_; }
    const Angle& angle_at(std::size_t i) const { return angles_[i]; }
    const std::vector<Angle>& angles() const { return angles_; }

    GroupFunction to_function() const;

    /// x -> f(x+t) * conj(f(x)), performed on angles (exactness preserved).
    UnimodularFunction derivative(long long t) const;

    /// Pointwise product (angles add).
    UnimodularFunction times(const UnimodularFunction& other) const;
    /// Pointwise conjugate (angles negate).
    UnimodularFunction conjugated() const;

private:
    FiniteAbelianGroup g_;
    std::vector<Angle> angles_;
    bool exact_;
};

/// Outcome of a degree or polynomiality check.
struct DegreeVerdict {
    bool holds = false;
    bool exhaustive = false;      // full shift grid covered
    std::uint64_t samples = 0;    // shift tuples checked
    std::vector<long long> witness; // refuting shift tuple (empty if none found)

    explicit operator bool() const { return holds; }
};

/**
 * Whether every (d+1)-fold iterated derivative of f is the constant one
 * function.  Exact-angle input is mandatory.  Runs the full |A|^(d+1) shift
 * grid when |A|^(d+2) fits the budget; otherwise checks 10|A| random tuples
 * drawn from the given seed and reports the sample count.
 */
DegreeVerdict is_degree_d(const UnimodularFunction& f, int d,
                          const RunConfig& cfg = RunConfig::from_env(), std::uint64_t seed = 1);

/// Finite group presented operationally; targets of polynomial maps.
struct GroupOps {
    virtual ~GroupOps() = default;
    virtual long long order() const = 0;
    virtual long long mul(long long a, long long b) const = 0;
    virtual long long inv(long long a) const = 0;
    long long identity() const { return 0; } // index 0 is the identity by convention
};

/// Abelian group viewed through the generic interface.
class AbelianOps final : public GroupOps {
public:
    explicit AbelianOps(FiniteAbelianGroup g) : g_(std::move(g)) {}
    long long order() const override { return g_.order(); }
    long long mul(long long a, long long b) const override { return g_.add(a, b); }
    long long inv(long long a) const override { return g_.neg(a); }
    const FiniteAbelianGroup& group() const { return g_; }

private:
    FiniteAbelianGroup g_;
};

/// Map from an abelian group into a finite group, given by a value table.
struct PolyMap {
    FiniteAbelianGroup src;
    const GroupOps* dst; // not owned
    std::vector<long long> table;

    PolyMap(FiniteAbelianGroup s, const GroupOps* d, std::vector<long long> t);
    long long at(long long g) const { return table[static_cast<std::size_t>(g)]; }
};

/// D_h phi (g) = phi(g)^{-1} phi(g+h).
PolyMap map_derivative(const PolyMap& phi, long long h);

/**
 * Whether k+1 consecutive derivatives always trivialize the map.  Exhaustive
 * when |G|^(k+2) fits the budget, randomized (10|G| tuples) otherwise.
 */
DegreeVerdict is_polynomial_map(const PolyMap& phi, int k,
                                const RunConfig& cfg = RunConfig::from_env(),
                                std::uint64_t seed = 1);

/// q(x) = e((a x^2 + b x)/N) on Z_N; well defined for every (a, b).
UnimodularFunction quadratic_phase_cyclic(long long n, long long a, long long b);

/**
 * Half-modulus family q(x) = e((a x^2 + b x)/(2N)) on Z_N for even N.
 * Requires b = aN (mod 2); other parities do not descend to Z_N.
 */
UnimodularFunction quadratic_phase_half(long long n, long long a, long long b);

/**
 * q(x) = e((x^T M x + b^T x)/p) on Z_p^n for odd prime p, M symmetric.
 */
UnimodularFunction quadratic_phase_vector(long long p,
                                          const std::vector<std::vector<long long>>& m,
                                          const std::vector<long long>& b);

} // namespace hofa
