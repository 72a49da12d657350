#include "hofa/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <string>
#include <utility>

#include "hofa/errors.hpp"
#include "hofa/fft.hpp"
#include "hofa/gowers.hpp"

namespace hofa {

namespace {

void require_budget(std::uint64_t cost, const RunConfig& cfg, const std::string& what) {
    if (cost > cfg.budget)
        throw resource_error(what +
                             " would exceed the term budget; raise HOFA_BUDGET to allow it");
}

bool is_odd_prime(long long p) {
    if (p < 3 || p % 2 == 0) return false;
    for (long long q = 3; q * q <= p; q += 2) {
        if (p % q == 0) return false;
    }
    return true;
}

std::string vec_str(const std::vector<long long>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i > 0) s += ",";
        s += std::to_string(v[i]);
    }
    return s + "]";
}

std::string matrix_str(const std::vector<std::vector<long long>>& m) {
    std::string s = "[";
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i > 0) s += ",";
        s += vec_str(m[i]);
    }
    return s + "]";
}

void check_same_group(const GroupFunction& f, const PhaseDictionary& dict) {
    if (!(f.group() == dict.group()))
        throw validation_error("the dictionary was built for a different group");
}

/**
 * Least-squares coefficients for projecting f onto span(q), by the normal
 * equations with partial pivoting. The basis stays tiny (one phase per
 * greedy round), so a dense solve is the whole cost. Returns false when a
 * pivot vanishes, meaning the newest phase is numerically dependent on the
 * earlier ones.
 */
bool solve_projection(const std::vector<GroupFunction>& q, const GroupFunction& f,
                      std::vector<cplx>& out) {
    const std::size_t k = q.size();
    std::vector<std::vector<cplx>> a(k, std::vector<cplx>(k + 1));
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < k; ++j) a[i][j] = q[j].inner(q[i]);
        a[i][k] = f.inner(q[i]);
    }
    for (std::size_t col = 0; col < k; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < k; ++row) {
            if (std::abs(a[row][col]) > std::abs(a[piv][col])) piv = row;
        }
        if (std::abs(a[piv][col]) < 1e-12) return false;
        if (piv != col) std::swap(a[piv], a[col]);
        for (std::size_t row = col + 1; row < k; ++row) {
            const cplx factor = a[row][col] / a[col][col];
            for (std::size_t j = col; j <= k; ++j) a[row][j] -= factor * a[col][j];
        }
    }
    out.assign(k, cplx{0.0, 0.0});
    for (std::size_t i = k; i-- > 0;) {
        cplx acc = a[i][k];
        for (std::size_t j = i + 1; j < k; ++j) acc -= a[i][j] * out[j];
        out[i] = acc / a[i][i];
    }
    return true;
}

void check_features(const GroupFunction& f, const std::vector<Feature>& features,
                    double delta) {
    if (features.empty()) throw validation_error("the feature list must not be empty");
    if (!(delta > 0.0)) throw validation_error("the correlation threshold must be positive");
    for (const Feature& ft : features) {
        if (!(ft.values.group() == f.group()))
            throw validation_error("feature '" + ft.tag + "' is defined on a different group");
    }
}

std::size_t scan_limit(std::size_t count, double delta) {
    const double cap = std::floor(1.0 / delta);
    if (cap >= static_cast<double>(count)) return count;
    return static_cast<std::size_t>(cap);
}

} // namespace

std::size_t PhaseDictionary::entry_index(std::size_t square, long long chi) const {
    if (square >= square_count_ || chi < 0 || static_cast<std::size_t>(chi) >= linear_count_)
        throw validation_error("dictionary entry out of range");
    return square * linear_count_ + static_cast<std::size_t>(chi);
}

std::vector<std::vector<long long>> PhaseDictionary::square_matrix(std::size_t square) const {
    const std::size_t dim = g_.factors().size();
    const long long p = g_.factors()[0];
    std::vector<std::vector<long long>> m(dim, std::vector<long long>(dim, 0));
    // upper-triangle slots in row-major order, last slot fastest
    std::size_t rest = square;
    for (std::size_t i = dim; i-- > 0;) {
        for (std::size_t j = dim; j-- > i;) {
            const long long digit = static_cast<long long>(rest % static_cast<std::size_t>(p));
            rest /= static_cast<std::size_t>(p);
            m[i][j] = digit;
            m[j][i] = digit;
        }
    }
    return m;
}

std::string PhaseDictionary::tag(std::size_t index) const {
    if (index >= size()) throw validation_error("dictionary entry out of range");
    const std::size_t square = index / linear_count_;
    const long long chi = static_cast<long long>(index % linear_count_);
    switch (family_) {
    case Family::cyclic:
        return "cyclic a=" + std::to_string(square) + " b=" + std::to_string(chi);
    case Family::half:
        return "half a=" + std::to_string(square) + " b=" + std::to_string(2 * chi);
    case Family::vector_form:
        return "vector m=" + matrix_str(square_matrix(square)) + " b=" + vec_str(g_.decode(chi));
    }
    throw internal_error("unknown dictionary family");
}

UnimodularFunction PhaseDictionary::member(std::size_t index) const {
    if (index >= size()) throw validation_error("dictionary entry out of range");
    const std::size_t square = index / linear_count_;
    const long long chi = static_cast<long long>(index % linear_count_);
    const long long n = g_.factors()[0];
    switch (family_) {
    case Family::cyclic:
        return quadratic_phase_cyclic(n, static_cast<long long>(square), chi);
    case Family::half:
        return quadratic_phase_half(n, static_cast<long long>(square), 2 * chi);
    case Family::vector_form:
        return quadratic_phase_vector(n, square_matrix(square), g_.decode(chi));
    }
    throw internal_error("unknown dictionary family");
}

UnimodularFunction PhaseDictionary::square_part(std::size_t square) const {
    if (square >= square_count_) throw validation_error("dictionary entry out of range");
    const long long n = g_.factors()[0];
    switch (family_) {
    case Family::cyclic:
        return quadratic_phase_cyclic(n, static_cast<long long>(square), 0);
    case Family::half:
        return quadratic_phase_half(n, static_cast<long long>(square), 0);
    case Family::vector_form:
        return quadratic_phase_vector(n, square_matrix(square),
                                      std::vector<long long>(g_.factors().size(), 0));
    }
    throw internal_error("unknown dictionary family");
}

PhaseDictionary build_dictionary(const FiniteAbelianGroup& g, const RunConfig& cfg) {
    const auto& factors = g.factors();
    PhaseDictionary::Family family = PhaseDictionary::Family::cyclic;
    std::uint64_t squares = 0;
    std::uint64_t linears = 0;
    if (factors.size() == 1) {
        const long long n = factors[0];
        family = (n % 2 == 0) ? PhaseDictionary::Family::half : PhaseDictionary::Family::cyclic;
        squares = static_cast<std::uint64_t>(n);
        linears = static_cast<std::uint64_t>(n);
    } else {
        const long long p = factors[0];
        bool uniform = true;
        for (long long f : factors) uniform = uniform && (f == p);
        if (!uniform || !is_odd_prime(p))
            throw validation_error(
                "the phase dictionary covers cyclic groups and vector groups over an odd prime");
        const std::size_t dim = factors.size();
        if (p > 5 || dim > 3)
            throw validation_error("vector phase dictionaries are limited to p <= 5 and n <= 3");
        squares = 1;
        for (std::size_t slot = 0; slot < dim * (dim + 1) / 2; ++slot)
            squares *= static_cast<std::uint64_t>(p);
        linears = static_cast<std::uint64_t>(g.order());
        family = PhaseDictionary::Family::vector_form;
    }
    const std::uint64_t count = squares * linears;
    require_budget(count, cfg, "a phase dictionary of " + std::to_string(count) + " entries");
    return PhaseDictionary(g, family, static_cast<std::size_t>(squares),
                           static_cast<std::size_t>(linears));
}

CorrelationHit best_correlation(const GroupFunction& f, const PhaseDictionary& dict,
                                const RunConfig& cfg) {
    check_same_group(f, dict);
    const std::size_t linears = dict.linear_count();
    struct Best {
        double mag = -1.0;
        std::size_t index = 0;
        cplx coeff{0.0, 0.0};
    };
    const std::uint64_t squares = dict.square_count();
    const std::uint64_t chunks = parallel_chunk_count(squares);
    std::vector<Best> found(chunks);
    std::vector<std::exception_ptr> errs(chunks);
    parallel_for(squares, cfg.threads,
                 [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
                     try {
                         Best local;
                         for (std::uint64_t s = begin; s < end; ++s) {
                             const GroupFunction twisted = f.pointwise_times_conj(
                                 dict.square_part(static_cast<std::size_t>(s)).to_function());
                             const std::vector<cplx> coeffs = fourier_coefficients(twisted);
                             for (std::size_t chi = 0; chi < linears; ++chi) {
                                 const double mag = std::abs(coeffs[chi]);
                                 if (mag > local.mag) {
                                     local.mag = mag;
                                     local.index = static_cast<std::size_t>(s) * linears + chi;
                                     local.coeff = coeffs[chi];
                                 }
                             }
                         }
                         found[chunk] = local;
                     } catch (...) {
                         errs[chunk] = std::current_exception();
                     }
                 });
    for (const std::exception_ptr& e : errs) {
        if (e) std::rethrow_exception(e);
    }
    Best win;
    for (const Best& b : found) {
        if (b.mag > win.mag) win = b;
    }
    return CorrelationHit{win.index, dict.tag(win.index), win.coeff};
}

Decomposition structure_decompose(const GroupFunction& f, const PhaseDictionary& dict,
                                  double eps, double theta, long long max_rounds,
                                  const RunConfig& cfg) {
    check_same_group(f, dict);
    if (f.sup_norm() > 1.0 + 1e-9)
        throw validation_error("the input must have sup norm at most one");
    if (!(theta > 0.0)) throw validation_error("the correlation threshold must be positive");
    if (eps < 0.0) throw validation_error("the discard budget must be nonnegative");
    if (max_rounds < 0) throw validation_error("the round budget must be nonnegative");

    const FiniteAbelianGroup& g = f.group();
    std::vector<std::size_t> selected;
    std::vector<GroupFunction> basis;
    std::vector<cplx> coeff;
    GroupFunction fitted(g);
    bool exhausted = false;

    DecompositionReport rep;
    rep.residual_l2.push_back(f.norm2());
    for (;;) {
        if (static_cast<long long>(selected.size()) >= max_rounds) {
            exhausted = true;
            break;
        }
        const GroupFunction residual = f.minus(fitted);
        const CorrelationHit hit = best_correlation(residual, dict, cfg);
        if (!(std::abs(hit.coefficient) > theta)) break;
        if (std::find(selected.begin(), selected.end(), hit.index) != selected.end()) break;
        selected.push_back(hit.index);
        basis.push_back(dict.member(hit.index).to_function());
        std::vector<cplx> next;
        if (!solve_projection(basis, f, next)) {
            selected.pop_back();
            basis.pop_back();
            break;
        }
        coeff = std::move(next);
        fitted = GroupFunction(g);
        for (std::size_t j = 0; j < basis.size(); ++j)
            fitted = fitted.plus(basis[j].scaled(coeff[j]));
        rep.residual_l2.push_back(f.minus(fitted).norm2());
    }

    const std::size_t terms = selected.size();
    const double cut = terms > 0 ? eps / static_cast<double>(terms) : 0.0;
    Decomposition out{GroupFunction(g), GroupFunction(g), GroupFunction(g), {}, {}, {}};
    for (std::size_t j = 0; j < terms; ++j) {
        const FittedPhase part{selected[j], dict.tag(selected[j]), coeff[j]};
        if (std::abs(coeff[j]) < cut) {
            out.h = out.h.plus(basis[j].scaled(coeff[j]));
            out.discarded_terms.push_back(part);
        } else {
            out.structured = out.structured.plus(basis[j].scaled(coeff[j]));
            out.structured_terms.push_back(part);
        }
    }
    for (std::size_t x = 0; x < f.size(); ++x) out.g[x] = f[x] - out.structured[x] - out.h[x];

    rep.rounds = terms;
    rep.budget_exhausted = exhausted;
    rep.g_u3 = uk_norm(out.g, 3, cfg);
    rep.h_l2 = out.h.norm2();
    rep.h_g = out.h.inner(out.g);
    rep.h_structured = out.h.inner(out.structured);
    rep.g_structured = out.g.inner(out.structured);
    const GroupFunction rest = out.g.plus(out.h);
    rep.f_energy = f.norm2() * f.norm2();
    rep.structured_energy = out.structured.norm2() * out.structured.norm2();
    rep.rest_energy = rest.norm2() * rest.norm2();
    rep.cross_energy = 2.0 * std::real(out.structured.inner(rest));
    out.report = std::move(rep);
    return out;
}

Decomposition structure_decompose(const GroupFunction& f, double eps, double theta,
                                  long long max_rounds, const RunConfig& cfg) {
    return structure_decompose(f, build_dictionary(f.group(), cfg), eps, theta, max_rounds, cfg);
}

std::optional<FeatureWitness> delta_correlates_monomial(const GroupFunction& f,
                                                        const std::vector<Feature>& features,
                                                        double delta, const RunConfig& cfg) {
    check_features(f, features, delta);
    const std::size_t limit = scan_limit(features.size(), delta);
    require_budget(static_cast<std::uint64_t>(limit) * static_cast<std::uint64_t>(f.size()),
                   cfg, "the feature correlation scan");
    for (std::size_t i = 0; i < limit; ++i) {
        const cplx c = f.inner(features[i].values);
        if (std::abs(c) > delta) return FeatureWitness{i + 1, features[i].tag, c};
    }
    return std::nullopt;
}

std::optional<TwistedWitness> delta_correlates_twisted(const GroupFunction& f,
                                                       const std::vector<Feature>& features,
                                                       double delta, const RunConfig& cfg) {
    check_features(f, features, delta);
    const std::size_t limit = scan_limit(features.size(), delta);
    require_budget(static_cast<std::uint64_t>(limit) * static_cast<std::uint64_t>(f.size()),
                   cfg, "the feature correlation scan");
    for (std::size_t i = 0; i < limit; ++i) {
        const std::vector<cplx> coeffs =
            fourier_coefficients(f.pointwise_times_conj(features[i].values));
        std::size_t arg = 0;
        double mag = -1.0;
        for (std::size_t chi = 0; chi < coeffs.size(); ++chi) {
            const double m = std::abs(coeffs[chi]);
            if (m > mag) {
                mag = m;
                arg = chi;
            }
        }
        if (mag > delta)
            return TwistedWitness{i + 1, features[i].tag, static_cast<long long>(arg),
                                  coeffs[arg]};
    }
    return std::nullopt;
}

} // namespace hofa
