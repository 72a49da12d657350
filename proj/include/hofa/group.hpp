#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hofa/angle.hpp"
#include "hofa/errors.hpp"

namespace hofa {

/**
 * Finite abelian group presented as a product of cyclic factors
 * Z_{n_1} x ... x Z_{n_r}.  Elements are integer indices in [0, order):
 * mixed-radix encodings of digit vectors, row-major with the LAST factor
 * varying fastest.
 */
class FiniteAbelianGroup {
  public:
    explicit FiniteAbelianGroup(std::vector<long long> factors);

    const std::vector<long long>& factors() const { return factors_; }
    long long order() const { return order_; }
    std::size_t rank() const { return factors_.size(); }

    std::vector<long long> decode(long long index) const;
    long long encode(const std::vector<long long>& digits) const; // digits reduced mod n_j

    long long add(long long a, long long b) const;
    long long sub(long long a, long long b) const;
    long long neg(long long a) const;
    long long scale(long long a, long long k) const; // k-fold sum of a

    /// lcm of the cyclic factors.
    long long exponent() const;

    bool operator==(const FiniteAbelianGroup& o) const { return factors_ == o.factors_; }
    bool operator!=(const FiniteAbelianGroup& o) const { return !(*this == o); }

    /**
     * Characters of the group are indexed by the same mixed-radix scheme:
     * character m sends x to e(sum_j m_j x_j / n_j).  The dual group is
     * identified with the group itself; characters multiply by add().
     */
    Rat character_angle(long long chi, long long x) const;
    std::complex<double> character_value(long long chi, long long x) const;

  private:
    std::vector<long long> factors_;
    std::vector<long long> strides_;
    long long order_;
};

/// Dense addition table for small groups; used by brute-force grid loops.
class AdditionTable {
  public:
    explicit AdditionTable(const FiniteAbelianGroup& g);
    long long order() const { return order_; }
    int32_t add(long long a, long long b) const { return table_[a * order_ + b]; }
    int32_t neg(long long a) const { return neg_[a]; }

  private:
    long long order_;
    std::vector<int32_t> table_;
    std::vector<int32_t> neg_;
};

/// Homomorphism between finite abelian groups, given by generator images.
struct AbelianHom {
    FiniteAbelianGroup src;
    FiniteAbelianGroup dst;
    std::vector<long long> images; // image of the j-th unit vector, as dst index

    AbelianHom(FiniteAbelianGroup s, FiniteAbelianGroup d, std::vector<long long> imgs);
    long long apply(long long x) const;
    /// Dual homomorphism: maps a character of dst to a character of src.
    long long dual_apply(long long chi_dst) const;
};

/// Closure of a generating set under the group operation.
std::vector<long long> subgroup_closure(const FiniteAbelianGroup& g,
                                        const std::vector<long long>& gens);

/// Whether the element list is exactly a subgroup (contains 0, closed).
bool is_subgroup(const FiniteAbelianGroup& g, const std::vector<long long>& elems);

/// Characters annihilating every element of the given subset.
std::vector<long long> annihilator(const FiniteAbelianGroup& g,
                                   const std::vector<long long>& elems);

/**
 * Quotient of a finite abelian group by the subgroup generated by the given
 * elements, computed via Smith normal form.  Provides the quotient group as
 * a cyclic-factor product together with the projection map and the lifting
 * of quotient characters to characters of the original group.
 */
class QuotientData {
  public:
    QuotientData(const FiniteAbelianGroup& g, const std::vector<long long>& subgroup_gens);

    const FiniteAbelianGroup& group() const { return src_; }
    const FiniteAbelianGroup& quotient() const { return quo_; }

    long long project(long long x) const;

    /// Character of the quotient -> character of the source group
    /// (composition with the projection).
    long long lift_character(long long chi_quo) const;

  private:
    FiniteAbelianGroup src_;
    FiniteAbelianGroup quo_;
    std::vector<std::vector<long long>> u_; // unimodular row transform
};

} // namespace hofa
