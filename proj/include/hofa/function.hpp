#pragma once

#include <complex>
#include <random>
#include <vector>

#include "hofa/group.hpp"
#include "hofa/kernels.hpp"

namespace hofa {

using cplx = std::complex<double>;

/// A complex-valued function on a finite abelian group, stored densely in
/// element-index order.
class GroupFunction {
public:
    explicit GroupFunction(FiniteAbelianGroup g)
        : g_(std::move(g)), v_(static_cast<std::size_t>(g_.order()), cplx{0.0, 0.0}) {}
    GroupFunction(FiniteAbelianGroup g, std::vector<cplx> values);

    static GroupFunction constant(const FiniteAbelianGroup& g, cplx value);
    static GroupFunction character(const FiniteAbelianGroup& g, long long chi);

    const FiniteAbelianGroup& group() const { return g_; }
    std::size_t size() const { return v_.size(); }
    cplx& operator[](std::size_t i) { return v_[i]; }
    const cplx& operator[](std::size_t i) const { return v_[i]; }
    const cplx* data() const { return v_.data(); }
    cplx* data() { return v_.data(); }
    const std::vector<cplx>& values() const { return v_; }

    /// E_x f(x)
    cplx mean() const;
    /// E_x f(x) conj(other(x))
    cplx inner(const GroupFunction& other) const;
    /// sqrt(E_x |f(x)|^2)
    double norm2() const;
    double sup_norm() const;

    GroupFunction conjugated() const;
    GroupFunction pointwise_times(const GroupFunction& other) const;
    GroupFunction pointwise_times_conj(const GroupFunction& other) const;
    GroupFunction scaled(cplx w) const;
    GroupFunction plus(const GroupFunction& other) const;
    GroupFunction minus(const GroupFunction& other) const;

private:
    FiniteAbelianGroup g_;
    std::vector<cplx> v_;
};

/// x -> f(x + t)
GroupFunction shift(const GroupFunction& f, long long t);

/// Multiplicative derivative: x -> f(x + t) * conj(f(x)).
GroupFunction delta(const GroupFunction& f, long long t);

/// Uniformly random unit-modulus values (seeded, reproducible).
GroupFunction random_unimodular(const FiniteAbelianGroup& g, std::mt19937_64& rng);

/// Values uniform in the closed unit disk.
GroupFunction random_disk(const FiniteAbelianGroup& g, std::mt19937_64& rng);

} // namespace hofa
