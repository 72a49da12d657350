#include "hofa/function.hpp"

#include <cmath>

#include "hofa/errors.hpp"

namespace hofa {

GroupFunction::GroupFunction(FiniteAbelianGroup g, std::vector<cplx> values)
    : g_(std::move(g)), v_(std::move(values)) {
    if (v_.size() != static_cast<std::size_t>(g_.order()))
        throw validation_error("value vector length does not match group order");
}

GroupFunction GroupFunction::constant(const FiniteAbelianGroup& g, cplx value) {
    GroupFunction f(g);
    for (auto& x : f.v_) x = value;
    return f;
}

GroupFunction GroupFunction::character(const FiniteAbelianGroup& g, long long chi) {
    GroupFunction f(g);
    for (long long x = 0; x < g.order(); ++x)
        f.v_[static_cast<std::size_t>(x)] = g.character_value(chi, x);
    return f;
}

cplx GroupFunction::mean() const {
    return kernels::csum(v_.data(), v_.size()) / static_cast<double>(v_.size());
}

cplx GroupFunction::inner(const GroupFunction& other) const {
    if (other.v_.size() != v_.size())
        throw validation_error("inner product of functions on different groups");
    return kernels::cdot(v_.data(), other.v_.data(), v_.size()) / static_cast<double>(v_.size());
}

double GroupFunction::norm2() const {
    return std::sqrt(kernels::cnorm2(v_.data(), v_.size()) / static_cast<double>(v_.size()));
}

double GroupFunction::sup_norm() const {
    double m = 0.0;
    for (const auto& x : v_) m = std::max(m, std::abs(x));
    return m;
}

GroupFunction GroupFunction::conjugated() const {
    GroupFunction out(g_);
    for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] = std::conj(v_[i]);
    return out;
}

GroupFunction GroupFunction::pointwise_times(const GroupFunction& other) const {
    if (other.v_.size() != v_.size()) throw validation_error("pointwise product size mismatch");
    GroupFunction out(g_);
    kernels::cmul(out.v_.data(), v_.data(), other.v_.data(), v_.size());
    return out;
}

GroupFunction GroupFunction::pointwise_times_conj(const GroupFunction& other) const {
    if (other.v_.size() != v_.size()) throw validation_error("pointwise product size mismatch");
    GroupFunction out(g_);
    kernels::cmul_conj(out.v_.data(), v_.data(), other.v_.data(), v_.size());
    return out;
}

GroupFunction GroupFunction::scaled(cplx w) const {
    GroupFunction out(g_); // zero-initialized, so caxpy writes w * f
    kernels::caxpy(out.v_.data(), w, v_.data(), v_.size());
    return out;
}

GroupFunction GroupFunction::plus(const GroupFunction& other) const {
    if (other.v_.size() != v_.size()) throw validation_error("sum size mismatch");
    GroupFunction out(g_);
    for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] = v_[i] + other.v_[i];
    return out;
}

GroupFunction GroupFunction::minus(const GroupFunction& other) const {
    if (other.v_.size() != v_.size()) throw validation_error("difference size mismatch");
    GroupFunction out(g_);
    for (std::size_t i = 0; i < v_.size(); ++i) out.v_[i] = v_[i] - other.v_[i];
    return out;
}

GroupFunction shift(const GroupFunction& f, long long t) {
    const auto& g = f.group();
    GroupFunction out(g);
    for (long long x = 0; x < g.order(); ++x)
        out[static_cast<std::size_t>(x)] = f[static_cast<std::size_t>(g.add(x, t))];
    return out;
}

GroupFunction delta(const GroupFunction& f, long long t) {
    const auto& g = f.group();
    GroupFunction out(g);
    const long long n_last = g.factors().back();
    const long long rows = g.order() / n_last;
    const auto tdig = g.decode(t);
    const long long t_last = tdig.back();

    // The shift acts digit-wise, so within each run of the fastest axis the
    // source is a circular rotation of another run: two contiguous segments.
    FiniteAbelianGroup prefix(g.rank() > 1
                                  ? std::vector<long long>(g.factors().begin(),
                                                           g.factors().end() - 1)
                                  : std::vector<long long>{1});
    long long t_prefix = 0;
    if (g.rank() > 1)
        t_prefix = prefix.encode(std::vector<long long>(tdig.begin(), tdig.end() - 1));

    for (long long r = 0; r < rows; ++r) {
        const long long sr = g.rank() > 1 ? prefix.add(r, t_prefix) : 0;
        const cplx* dst_base = f.data() + sr * n_last;
        const cplx* src_base = f.data() + r * n_last;
        cplx* out_base = out.data() + r * n_last;
        const std::size_t head = static_cast<std::size_t>(n_last - t_last);
        kernels::cmul_conj(out_base, dst_base + t_last, src_base, head);
        kernels::cmul_conj(out_base + head, dst_base, src_base + head,
                           static_cast<std::size_t>(t_last));
    }
    return out;
}

GroupFunction random_unimodular(const FiniteAbelianGroup& g, std::mt19937_64& rng) {
    GroupFunction f(g);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = unit_angle(u(rng));
    return f;
}

GroupFunction random_disk(const FiniteAbelianGroup& g, std::mt19937_64& rng) {
    GroupFunction f(g);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        double r = std::sqrt(u(rng));
        f[i] = r * unit_angle(u(rng));
    }
    return f;
}

} // namespace hofa
