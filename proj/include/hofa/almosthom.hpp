#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hofa/angle.hpp"
#include "hofa/config.hpp"
#include "hofa/errors.hpp"
#include "hofa/group.hpp"
#include "hofa/nilpattern.hpp"

namespace hofa {

/// Raised when a sample set fails the concentration precondition.
struct concentration_error : validation_error {
    using validation_error::validation_error;
};

/// Element of a central extension of the circle: the index of its base coset
/// and the fiber angle within that coset.
struct ExtElement {
    long long b = 0;
    Angle theta;
};

/**
 * Central extension of the circle group by a finite abelian base group,
 * presented by an angle-valued 2-cocycle on the base.  The circle sits in
 * the center; multiplying two elements adds their fiber angles plus the
 * cocycle value of their base parts.  Construction normalizes the cocycle
 * so that the identity is (0, 0).
 */
class CircleExtension {
  public:
    const FiniteAbelianGroup& base() const { return b_; }
    const Angle& cocycle(long long x, long long y) const;

    ExtElement identity() const { return {0, Angle()}; }
    ExtElement mul(const ExtElement& x, const ExtElement& y) const;
    ExtElement inv(const ExtElement& x) const;

    /// Shift-invariant metric: infinite across distinct circle cosets,
    /// shorter-arc distance of the fiber angles within a coset.
    static double dist(const ExtElement& x, const ExtElement& y);

  private:
    friend CircleExtension make_circle_extension(FiniteAbelianGroup, std::vector<Angle>,
                                                 const RunConfig&);
    CircleExtension(FiniteAbelianGroup b, std::vector<Angle> c)
        : b_(std::move(b)), c_(std::move(c)) {}

    FiniteAbelianGroup b_;
    std::vector<Angle> c_; // row-major |B| x |B|, normalized
};

/// Validated construction; cocycle entries are indexed row-major by base
/// pairs.  Exact entries are checked exactly, float entries within 1e-9.
CircleExtension make_circle_extension(FiniteAbelianGroup base, std::vector<Angle> cocycle,
                                      const RunConfig& cfg = RunConfig::from_env());

/**
 * Mean of circle points that fit on a closed arc of a third of the circle,
 * computed through a coherent lift of the samples to the line.  The branch
 * is canonical (it starts after the unique largest gap), so the result is
 * equivariant under rotating every sample.  Exact when every sample is
 * exact.  Throws concentration_error, naming a maximally separated pair,
 * when no such arc exists.
 */
Angle concentrated_mean(const std::vector<Angle>& samples);
/// Weighted variant.  Weights are nonnegative counts with a positive total;
/// zero-weight samples are ignored entirely.
Angle concentrated_mean(const std::vector<Angle>& samples,
                        const std::vector<long long>& weights);

/**
 * A map into a circle extension whose base part is a homomorphism and whose
 * multiplicative defect max d(h(a+b), h(a) h(b)) is at most eps.  Both
 * facts are validated by make_almost_hom.
 */
struct AlmostHom {
    FiniteAbelianGroup domain;
    CircleExtension target;
    std::vector<ExtElement> h; // one element per domain index
    double eps = 0.0;
};

/// Largest distance d(h(a+b), h(a) h(b)) over all pairs; infinite when the
/// base parts fail to be a homomorphism.
double hom_defect(const FiniteAbelianGroup& domain, const CircleExtension& target,
                  const std::vector<ExtElement>& h,
                  const RunConfig& cfg = RunConfig::from_env());

AlmostHom make_almost_hom(FiniteAbelianGroup domain, CircleExtension target,
                          std::vector<ExtElement> h, double eps,
                          const RunConfig& cfg = RunConfig::from_env());

/**
 * Inverse-symmetric modification: the result satisfies h'(a)^{-1} = h'(-a)
 * for every a, each value stays within eps of the original, and the defect
 * of h' is at most three times the defect of h.  For a paired with a
 * distinct -a the value at the smaller index is kept and the partner is its
 * inverse; at 2-torsion points the value moves to the nearest solution of
 * x^2 = identity within the coset (ties toward the smaller fiber angle),
 * which makes the inverse symmetry exact there as well.
 */
std::vector<ExtElement> symmetrize(const AlmostHom& h);

/**
 * Defect-erasing correction: averages h'(a_1) h'(a_2) over the pair fibers
 * and returns the table of a genuine homomorphism g with g(a) in the same
 * circle coset as h(a) and d(g(a), h(a)) <= 4 eps.  Requires eps <= 1/40.
 * The output is re-verified: exactly when every angle involved is exact,
 * within 1e-9 otherwise.  Applying the correction to its own output
 * returns it unchanged.
 */
std::vector<ExtElement> correct_almost_hom(const AlmostHom& h,
                                           const RunConfig& cfg = RunConfig::from_env());

/// Affine recovery of an almost-linear tuple-valued table.  The recovered
/// map sends a to offset[j] + linear[a][j] in every coordinate j.
struct EpsLinearResult {
    std::vector<std::vector<Angle>> linear; // exact homomorphism part, per element
    std::vector<Angle> offset;              // constant part, the row of f at 0
    double deviation = 0.0;                 // max distance between f and the recovery
};

/**
 * Corrects a table f: A -> (circle)^k whose difference functions
 * f(a+b) - f(b) are within eps of a constant in every coordinate.  Each
 * coordinate is reduced to an almost homomorphism (defect at most 2 eps,
 * required to be at most 1/40) and corrected independently.  Errors name
 * the offending coordinate.
 */
EpsLinearResult correct_eps_linear(const FiniteAbelianGroup& domain,
                                   const std::vector<std::vector<Angle>>& f, double eps,
                                   const RunConfig& cfg = RunConfig::from_env());

/**
 * Outcome of the staged correction of an approximate coset-valued map.  On
 * success `morphism` is verified over `pattern`, which is the input pattern
 * with its circle grid refined by `scale` (1 means unchanged), and
 * `displacement` bounds the fiber distance from the input table.  On
 * failure `stage` names the pipeline stage whose precondition failed and
 * `detail` says where.
 */
struct NilCorrection {
    bool ok = false;
    std::string stage;
    std::string detail;
    std::optional<NilPattern> pattern;
    std::optional<NilMorphism> morphism;
    long long scale = 1;
    double displacement = 0.0;
};

/**
 * Staged correction of f: A -> C(N) within fiber tolerance delta.  Exact
 * inputs are returned unchanged.  Otherwise the table is normalized at 0,
 * its first-degree part is checked to be affine ("base linearity"),
 * the pattern is restricted to the image of the base part, fiber witnesses
 * within delta are searched for every element ("witness search"), the
 * displacement data is assembled into an almost homomorphism into a central
 * extension of the circle by A x dual(A) ("lifted base cocycle",
 * "assembly"), and the defect-erasing correction is applied ("defect
 * bound").  The corrected table is projected back over a refined circle
 * grid and re-verified.
 */
NilCorrection correct_almost_nilmorphism(const FiniteAbelianGroup& domain, const NilPattern& n,
                                         const std::vector<long long>& f, double delta,
                                         const RunConfig& cfg = RunConfig::from_env());

} // namespace hofa
