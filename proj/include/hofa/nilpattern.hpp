#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "hofa/config.hpp"
#include "hofa/errors.hpp"
#include "hofa/group.hpp"

namespace hofa {

/// Construction-time axiom failures, one type per violated axiom.
struct cocycle_error : validation_error {
    using validation_error::validation_error;
};
struct centrality_error : validation_error {
    using validation_error::validation_error;
};
struct commutator_error : validation_error {
    using validation_error::validation_error;
};

/// Element (chi, (t, z)) of the extension group; chi indexes a character of
/// the base group, t an element of it, z an element of Z_m.
struct NilElement {
    long long chi = 0;
    long long t = 0;
    long long z = 0;
    bool operator==(const NilElement& o) const = default;
};

/**
 * Central-extension data 0 -> T x Z_m -> N -> dual(T) -> 0 presented by a
 * normalized 2-cocycle with values in T x Z_m, where a character acts on
 * (t, z) by (t, z + chi(t)).  Construction validates every axiom and names
 * the violated one on failure; instances are immutable afterwards.
 */
class NilPattern {
public:
    const FiniteAbelianGroup& base() const { return t_; }
    long long circle_order() const { return m_; }
    /// |N| = |T|^2 m.
    long long order() const { return t_.order() * t_.order() * m_; }

    NilElement identity() const { return {}; }
    NilElement mul(const NilElement& a, const NilElement& b) const;
    NilElement inv(const NilElement& a) const;

    NilElement element_at(long long index) const;
    long long index_of(const NilElement& n) const;

    /// chi(t) as an element of Z_m (well defined since exp(T) divides m).
    long long chi_eval(long long chi, long long t) const;
    long long omega_t(long long chi1, long long chi2) const;
    long long omega_z(long long chi1, long long chi2) const;

    bool operator==(const NilPattern& o) const;

    friend NilPattern make_nilpattern(FiniteAbelianGroup t, long long m,
                                      std::vector<long long> omega_t,
                                      std::vector<long long> omega_z, const RunConfig& cfg);

private:
    NilPattern(FiniteAbelianGroup t, long long m, std::vector<long long> wt,
               std::vector<long long> wz)
        : t_(std::move(t)), m_(m), wt_(std::move(wt)), wz_(std::move(wz)) {}

    FiniteAbelianGroup t_;
    long long m_;
    std::vector<long long> wt_, wz_; // row-major |T| x |T| cocycle tables
};

/**
 * Validated construction.  The cocycle tables are indexed by character pairs
 * (row-major); non-normalized cocycles are shifted by a coboundary first.
 * Throws cocycle_error / centrality_error / commutator_error naming the
 * violated axiom, or validation_error for malformed input.
 */
NilPattern make_nilpattern(FiniteAbelianGroup t, long long m, std::vector<long long> omega_t,
                           std::vector<long long> omega_z,
                           const RunConfig& cfg = RunConfig::from_env());

/**
 * The left coset space of T in N.  Cosets are indexed by (chi, z) pairs as
 * chi * m + z; the representative of a coset is its lexicographically least
 * element, which has t = 0.
 */
class Core {
public:
    explicit Core(NilPattern pattern);

    const NilPattern& pattern() const { return n_; }
    long long size() const { return n_.base().order() * n_.circle_order(); }

    long long coset_of(const NilElement& n) const;
    NilElement representative(long long coset) const;
    /// Left action of N on the coset space.
    long long act(const NilElement& n, long long coset) const;
    /// Central action of Z_m on the coset space.
    long long z_shift(long long coset, long long z) const;
    /// First-degree map: the character component of a coset.
    long long first_degree(long long coset) const;

private:
    NilPattern n_;
};

/// Interpretation along the quotient T -> T/T3.
struct EpiInterpretation {
    NilPattern pattern;                          // type (T/T3, Z_m)
    std::vector<long long> core_injection;       // C(N2) index -> C(N) index
    std::vector<long long> character_embedding;  // dual(T/T3) index -> dual(T) index
};
EpiInterpretation interpret_epi(const NilPattern& n, const std::vector<long long>& t3_elements,
                                const RunConfig& cfg = RunConfig::from_env());

/// Interpretation along an injective homomorphism T -> T2.
struct MonoInterpretation {
    NilPattern pattern;                            // type (T2, Z_m)
    std::vector<long long> core_projection;        // C(N2) index -> C(N) index
    std::vector<long long> character_restriction;  // dual(T2) index -> dual(T) index
};
MonoInterpretation interpret_mono(const NilPattern& n, const AbelianHom& alpha,
                                  const RunConfig& cfg = RunConfig::from_env());

/**
 * A coset-valued map A -> C(N) that satisfies psi(a+b) = chi_a(b) n_a psi(b),
 * together with the witnesses found for each a.
 */
struct NilMorphism {
    FiniteAbelianGroup domain;
    NilPattern pattern;
    std::vector<long long> psi;                   // coset index per domain element
    std::vector<NilElement> witness_n;            // n_a
    std::vector<std::vector<long long>> witness_chi; // chi_a value table, Z_m-valued
    bool normalized = false;                      // psi(0) is the identity coset
};

/// Verification outcome: either witnesses for every a, or a failing pair.
struct VerifyOutcome {
    std::optional<NilMorphism> morphism;
    long long bad_a = -1; // diagnostic pair where the witness search failed
    long long bad_b = -1;
    bool ok() const { return morphism.has_value(); }
};
VerifyOutcome verify_nilmorphism(const FiniteAbelianGroup& domain, const NilPattern& n,
                                 const std::vector<long long>& psi,
                                 const RunConfig& cfg = RunConfig::from_env());

/**
 * Lift of psi through the interpretation of N over the first-degree
 * composition u = c . psi.  The lifted pattern has type (dual(A), Z_m); its
 * cosets are (a, z) pairs, and psi_2(a) = (a, z-part of psi(a)).
 */
struct LiftResult {
    NilPattern pattern;                      // type (dual(A), Z_m)
    NilMorphism morphism;                    // verified psi_2 into the new core
    std::vector<long long> core_projection;  // C(N2) index -> C(N) index
};
LiftResult lift(const FiniteAbelianGroup& domain, const NilPattern& n,
                const std::vector<long long>& psi, const RunConfig& cfg = RunConfig::from_env());

/**
 * Split-extension certificate: a genuine homomorphism A -> N2 that projects
 * to the identity on A and induces psi on the original core.
 */
struct SplitCertificate {
    NilPattern pattern;               // the lifted pattern, type (dual(A), Z_m)
    std::vector<NilElement> hom;      // phi_3(a), one element of pattern per a
    std::vector<long long> core_composition; // coset in C(N) induced by phi_3(a)
};
SplitCertificate split_hom(const NilMorphism& psi, const RunConfig& cfg = RunConfig::from_env());

/// f(coset) tables over a core, plain dense storage.
using CoreFunction = std::vector<std::complex<double>>;

/// The canonical unimodular circular function f((chi, z)) = e(z / m).
CoreFunction canonical_circular(const Core& core);

/**
 * Decomposition f = sum_i phi^i f_i with every f_i invariant under the
 * central Z_m action; returns the m component functions f_i.
 */
std::vector<CoreFunction> circular_decompose(const Core& core, const CoreFunction& f,
                                             const CoreFunction& phi);

} // namespace hofa
