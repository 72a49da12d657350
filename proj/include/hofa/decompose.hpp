#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hofa/config.hpp"
#include "hofa/function.hpp"
#include "hofa/polydeg.hpp"

namespace hofa {

/**
 * Exhaustive family of exact degree-2 unit-modulus phases on one group,
 * addressable by a flat index. Members factor as a pure square part times a
 * linear character; the flat index is square-major, so entry s * linear_count()
 * + chi pairs square part s with character chi. Only the parameters are
 * stored; member functions and tags are materialized on demand, which keeps
 * large dictionaries cheap to hold.
 *
 * Supported groups: any cyclic Z_N (the half-modulus family when N is even,
 * since it subsumes the plain one), and Z_p^n for odd prime p <= 5 and
 * 2 <= n <= 3.
 */
class PhaseDictionary {
public:
    const FiniteAbelianGroup& group() const { return g_; }
    std::size_t size() const { return square_count_ * linear_count_; }
    std::size_t square_count() const { return square_count_; }
    std::size_t linear_count() const { return linear_count_; }
    std::size_t entry_index(std::size_t square, long long chi) const;

    /// Human-readable parameter tag, unique per entry, in enumeration order.
    std::string tag(std::size_t index) const;
    /// The entry itself, rebuilt from its parameters.
    UnimodularFunction member(std::size_t index) const;
    /// Square part shared by the entries with the given square index.
    UnimodularFunction square_part(std::size_t square) const;

private:
    enum class Family { cyclic, half, vector_form };

    PhaseDictionary(FiniteAbelianGroup g, Family family, std::size_t squares,
                    std::size_t linears)
        : g_(std::move(g)), family_(family), square_count_(squares), linear_count_(linears) {}

    std::vector<std::vector<long long>> square_matrix(std::size_t square) const;

    friend PhaseDictionary build_dictionary(const FiniteAbelianGroup& g, const RunConfig& cfg);

    FiniteAbelianGroup g_;
    Family family_;
    std::size_t square_count_ = 0;
    std::size_t linear_count_ = 0;
};

/**
 * Enumerates every quadratic phase on the group. Entry counts: N^2 on Z_N
 * (both parities), p^(n(n+3)/2) on Z_p^n. A dictionary larger than the term
 * budget is refused with a resource error naming the count.
 */
PhaseDictionary build_dictionary(const FiniteAbelianGroup& g,
                                 const RunConfig& cfg = RunConfig::from_env());

/// Winning dictionary entry of a correlation scan, with its coefficient
/// <f, q> = E_x f(x) conj(q(x)).
struct CorrelationHit {
    std::size_t index = 0;
    std::string tag;
    cplx coefficient{0.0, 0.0};
};

/**
 * Argmax of |<f, q>| over the whole dictionary; ties go to the earliest
 * entry. For each square part one Fourier transform of f times the
 * conjugated square part covers all linear characters at once.
 */
CorrelationHit best_correlation(const GroupFunction& f, const PhaseDictionary& dict,
                                const RunConfig& cfg = RunConfig::from_env());

/// One fitted dictionary term.
struct FittedPhase {
    std::size_t index = 0;
    std::string tag;
    cplx coefficient{0.0, 0.0};
};

struct DecompositionReport {
    double g_u3 = 0.0;               // third uniformity norm of the residual g
    double h_l2 = 0.0;               // L2 norm of the discarded part h
    cplx h_g{0.0, 0.0};              // <h, g>
    cplx h_structured{0.0, 0.0};     // <h, structured>
    cplx g_structured{0.0, 0.0};     // <g, structured>
    double f_energy = 0.0;           // squared L2 norm of the input
    double structured_energy = 0.0;  // squared L2 norm of the structured part
    double rest_energy = 0.0;        // squared L2 norm of g + h
    double cross_energy = 0.0;       // 2 Re <structured, g + h>
    std::vector<double> residual_l2; // residual L2 norm before and after each round
    std::size_t rounds = 0;          // greedy selections performed
    bool budget_exhausted = false;   // the round budget ended the loop, not the threshold
};

/// Split f = structured + h + g: a span of fitted quadratic phases, a small
/// L2 leftover of that fit, and the final residual.
struct Decomposition {
    GroupFunction structured;
    GroupFunction h;
    GroupFunction g;
    std::vector<FittedPhase> structured_terms;
    std::vector<FittedPhase> discarded_terms;
    DecompositionReport report;
};

/**
 * Greedy energy-increment decomposition. Each round picks the dictionary
 * phase best correlated with the residual; while the coefficient magnitude
 * stays above theta and rounds remain, the selection grows and f is
 * re-projected onto its span (the selected phases need not be orthogonal, so
 * the projection re-solves the normal equations every round). Fitted terms
 * with coefficient magnitude below eps divided by the number of terms are
 * moved into h. Exhausting the round budget is reported in the result, not
 * thrown. Requires sup norm at most one and theta > 0.
 */
Decomposition structure_decompose(const GroupFunction& f, const PhaseDictionary& dict,
                                  double eps, double theta, long long max_rounds,
                                  const RunConfig& cfg = RunConfig::from_env());

/// Same, with the dictionary built from f's group.
Decomposition structure_decompose(const GroupFunction& f, double eps, double theta,
                                  long long max_rounds,
                                  const RunConfig& cfg = RunConfig::from_env());

/// A named test function, typically a base function pulled back through a
/// structured map into the group.
struct Feature {
    std::string tag;
    GroupFunction values;
};

/// Correlation witness against a plain feature.
struct FeatureWitness {
    std::size_t index = 0; // position in the feature list, starting at one
    std::string tag;
    cplx value{0.0, 0.0};  // <f, feature>
};

/**
 * Scans the first floor(1/delta) features in order and returns the first
 * whose correlation magnitude strictly exceeds delta, or nothing. The
 * feature list must not be empty and delta must be positive.
 */
std::optional<FeatureWitness> delta_correlates_monomial(
    const GroupFunction& f, const std::vector<Feature>& features, double delta,
    const RunConfig& cfg = RunConfig::from_env());

/// Correlation witness against a feature twisted by a linear character.
struct TwistedWitness {
    std::size_t index = 0;   // position in the feature list, starting at one
    std::string tag;
    long long character = 0; // witnessing character index
    cplx value{0.0, 0.0};    // <f, chi * feature>
};

/**
 * Like the plain scan, but each feature may be twisted by any linear
 * character: one Fourier transform of f times the conjugated feature
 * maximizes over all characters at once. Returns the first feature index
 * whose best twisted correlation strictly exceeds delta, together with the
 * maximizing character.
 */
std::optional<TwistedWitness> delta_correlates_twisted(
    const GroupFunction& f, const std::vector<Feature>& features, double delta,
    const RunConfig& cfg = RunConfig::from_env());

} // namespace hofa
