#include "hofa/nilpattern.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "hofa/function.hpp"

namespace hofa {

namespace {

void require_budget(std::uint64_t cost, const RunConfig& cfg, const char* what) {
    if (cost > cfg.budget)
        throw resource_error(std::string(what) +
                             " would exceed the term budget; raise HOFA_BUDGET to allow it");
}

long long nonneg_mod(long long a, long long m) {
    long long r = a % m;
    return r < 0 ? r + m : r;
}

std::string pair_str(long long i, long long j) {
    return "(" + std::to_string(i) + ", " + std::to_string(j) + ")";
}

} // namespace

long long NilPattern::chi_eval(long long chi, long long t) const {
    Rat angle = t_.character_angle(chi, t);
    long long q = m_ / angle.den; // den divides exp(T) divides m
    return nonneg_mod(angle.num * q, m_);
}

long long NilPattern::omega_t(long long chi1, long long chi2) const {
    return wt_[static_cast<std::size_t>(chi1 * t_.order() + chi2)];
}

long long NilPattern::omega_z(long long chi1, long long chi2) const {
    return wz_[static_cast<std::size_t>(chi1 * t_.order() + chi2)];
}

NilElement NilPattern::mul(const NilElement& a, const NilElement& b) const {
    NilElement r;
    r.chi = t_.add(a.chi, b.chi);
    r.t = t_.add(t_.add(a.t, b.t), omega_t(a.chi, b.chi));
    r.z = nonneg_mod(a.z + chi_eval(b.chi, a.t) + b.z + omega_z(a.chi, b.chi), m_);
    return r;
}

NilElement NilPattern::inv(const NilElement& a) const {
    NilElement r;
    r.chi = t_.neg(a.chi);
    r.t = t_.neg(t_.add(a.t, omega_t(a.chi, r.chi)));
    r.z = nonneg_mod(-(a.z + chi_eval(r.chi, a.t)) - omega_z(a.chi, r.chi), m_);
    return r;
}

NilElement NilPattern::element_at(long long index) const {
    if (index < 0 || index >= order()) throw validation_error("element index out of range");
    NilElement r;
    r.z = index % m_;
    index /= m_;
    r.t = index % t_.order();
    r.chi = index / t_.order();
    return r;
}

long long NilPattern::index_of(const NilElement& n) const {
    if (n.chi < 0 || n.chi >= t_.order() || n.t < 0 || n.t >= t_.order() || n.z < 0 ||
        n.z >= m_)
        throw validation_error("element components out of range");
    return (n.chi * t_.order() + n.t) * m_ + n.z;
}

bool NilPattern::operator==(const NilPattern& o) const {
    return t_ == o.t_ && m_ == o.m_ && wt_ == o.wt_ && wz_ == o.wz_;
}

NilPattern make_nilpattern(FiniteAbelianGroup t, long long m, std::vector<long long> omega_t,
                           std::vector<long long> omega_z, const RunConfig& cfg) {
    const long long k = t.order();
    if (m < 1) throw validation_error("circle order must be at least 1");
    if (m % t.exponent() != 0)
        throw validation_error(
            "circle order must be a multiple of the base-group exponent for the character "
            "action to close");
    if (omega_t.size() != static_cast<std::size_t>(k * k) ||
        omega_z.size() != static_cast<std::size_t>(k * k))
        throw validation_error("cocycle tables need one entry per character pair");
    for (long long v : omega_t) {
        if (v < 0 || v >= k) throw validation_error("cocycle base component out of range");
    }
    for (long long v : omega_z) {
        if (v < 0 || v >= m) throw validation_error("cocycle circle component out of range");
    }
    require_budget(static_cast<std::uint64_t>(k) * k * k +
                       static_cast<std::uint64_t>(k) * k * m,
                   cfg, "nil-pattern validation");

    NilPattern n(std::move(t), m, std::move(omega_t), std::move(omega_z));
    const FiniteAbelianGroup& g = n.base();

    // Associativity of the derived multiplication, checked as the cocycle
    // identity w(x,y)^z w(xy,z) = w(y,z) w(x,yz) over every character triple.
    for (long long x = 0; x < k; ++x) {
        for (long long y = 0; y < k; ++y) {
            long long xy = g.add(x, y);
            long long txy = n.omega_t(x, y);
            long long zxy = n.omega_z(x, y);
            for (long long z = 0; z < k; ++z) {
                long long lt = g.add(txy, n.omega_t(xy, z));
                long long rt = g.add(n.omega_t(y, z), n.omega_t(x, g.add(y, z)));
                long long lz = nonneg_mod(zxy + n.chi_eval(z, txy) + n.omega_z(xy, z), m);
                long long rz = nonneg_mod(n.omega_z(y, z) + n.omega_z(x, g.add(y, z)), m);
                if (lt != rt || lz != rz)
                    throw cocycle_error("cocycle identity fails at characters (" +
                                        std::to_string(x) + ", " + std::to_string(y) + ", " +
                                        std::to_string(z) + ")");
            }
        }
    }

    // Normalize by the coboundary of the constant cochain -w(1,1).
    const long long t0 = n.omega_t(0, 0);
    const long long z0 = n.omega_z(0, 0);
    if (t0 != 0 || z0 != 0) {
        for (long long i = 0; i < k; ++i) {
            for (long long j = 0; j < k; ++j) {
                auto idx = static_cast<std::size_t>(i * k + j);
                n.wt_[idx] = g.sub(n.wt_[idx], t0);
                n.wz_[idx] = nonneg_mod(n.wz_[idx] - z0 - n.chi_eval(j, t0), m);
            }
        }
    }
    for (long long i = 0; i < k; ++i) {
        if (n.omega_t(0, i) != 0 || n.omega_z(0, i) != 0 || n.omega_t(i, 0) != 0 ||
            n.omega_z(i, 0) != 0)
            throw internal_error("cocycle normalization failed");
    }

    // Commutators land in the circle factor exactly when the base component
    // of the cocycle is symmetric.
    for (long long i = 0; i < k; ++i) {
        for (long long j = i + 1; j < k; ++j) {
            if (n.omega_t(i, j) != n.omega_t(j, i))
                throw commutator_error(
                    "commutators leave the circle factor: base cocycle component asymmetric "
                    "at " +
                    pair_str(i, j));
        }
    }

    // Centrality of the circle factor; the generator suffices.
    if (m > 1) {
        NilElement zgen{0, 0, 1};
        for (long long idx = 0; idx < n.order(); ++idx) {
            NilElement e = n.element_at(idx);
            if (!(n.mul(zgen, e) == n.mul(e, zgen)))
                throw centrality_error("circle generator fails to commute with element " +
                                       std::to_string(idx));
        }
    }
    return n;
}

Core::Core(NilPattern pattern) : n_(std::move(pattern)) {}

long long Core::coset_of(const NilElement& n) const { return n.chi * n_.circle_order() + n.z; }

NilElement Core::representative(long long coset) const {
    if (coset < 0 || coset >= size()) throw validation_error("coset index out of range");
    return {coset / n_.circle_order(), 0, coset % n_.circle_order()};
}

long long Core::act(const NilElement& n, long long coset) const {
    return coset_of(n_.mul(n, representative(coset)));
}

long long Core::z_shift(long long coset, long long z) const {
    if (coset < 0 || coset >= size()) throw validation_error("coset index out of range");
    const long long m = n_.circle_order();
    return coset - coset % m + nonneg_mod(coset % m + z, m);
}

long long Core::first_degree(long long coset) const {
    if (coset < 0 || coset >= size()) throw validation_error("coset index out of range");
    return coset / n_.circle_order();
}

EpiInterpretation interpret_epi(const NilPattern& n, const std::vector<long long>& t3_elements,
                                const RunConfig& cfg) {
    const FiniteAbelianGroup& t = n.base();
    if (!is_subgroup(t, t3_elements))
        throw validation_error("the given elements do not form a subgroup of the base group");

    QuotientData q(t, t3_elements);
    const FiniteAbelianGroup& quo = q.quotient();
    const long long kq = quo.order();
    const long long m = n.circle_order();

    std::vector<long long> embed(static_cast<std::size_t>(kq));
    for (long long mu = 0; mu < kq; ++mu) embed[static_cast<std::size_t>(mu)] = q.lift_character(mu);

    std::vector<long long> wt2(static_cast<std::size_t>(kq * kq));
    std::vector<long long> wz2(static_cast<std::size_t>(kq * kq));
    for (long long i = 0; i < kq; ++i) {
        for (long long j = 0; j < kq; ++j) {
            auto idx = static_cast<std::size_t>(i * kq + j);
            long long ci = embed[static_cast<std::size_t>(i)];
            long long cj = embed[static_cast<std::size_t>(j)];
            wt2[idx] = q.project(n.omega_t(ci, cj));
            wz2[idx] = n.omega_z(ci, cj);
        }
    }
    EpiInterpretation out{make_nilpattern(quo, m, std::move(wt2), std::move(wz2), cfg), {}, {}};

    out.character_embedding = embed;
    out.core_injection.resize(static_cast<std::size_t>(kq * m));
    for (long long mu = 0; mu < kq; ++mu) {
        for (long long z = 0; z < m; ++z)
            out.core_injection[static_cast<std::size_t>(mu * m + z)] =
                embed[static_cast<std::size_t>(mu)] * m + z;
    }
    return out;
}

MonoInterpretation interpret_mono(const NilPattern& n, const AbelianHom& alpha,
                                  const RunConfig& cfg) {
    const FiniteAbelianGroup& t = n.base();
    if (alpha.src != t) throw validation_error("embedding must start at the base group");
    for (long long x = 1; x < t.order(); ++x) {
        if (alpha.apply(x) == 0)
            throw validation_error("embedding is not injective: element " + std::to_string(x) +
                                   " maps to zero");
    }
    const FiniteAbelianGroup& t2 = alpha.dst;
    const long long m = n.circle_order();
    if (m % t2.exponent() != 0)
        throw validation_error(
            "circle order must be a multiple of the target-group exponent for the character "
            "action to close");

    const long long k2 = t2.order();
    std::vector<long long> restr(static_cast<std::size_t>(k2));
    std::vector<char> seen(static_cast<std::size_t>(t.order()), 0);
    for (long long u = 0; u < k2; ++u) {
        restr[static_cast<std::size_t>(u)] = alpha.dual_apply(u);
        seen[static_cast<std::size_t>(restr[static_cast<std::size_t>(u)])] = 1;
    }
    if (std::count(seen.begin(), seen.end(), 1) != t.order())
        throw internal_error("dual of an injective embedding failed to be surjective");

    std::vector<long long> wt2(static_cast<std::size_t>(k2 * k2));
    std::vector<long long> wz2(static_cast<std::size_t>(k2 * k2));
    for (long long i = 0; i < k2; ++i) {
        for (long long j = 0; j < k2; ++j) {
            auto idx = static_cast<std::size_t>(i * k2 + j);
            long long ci = restr[static_cast<std::size_t>(i)];
            long long cj = restr[static_cast<std::size_t>(j)];
            wt2[idx] = alpha.apply(n.omega_t(ci, cj));
            wz2[idx] = n.omega_z(ci, cj);
        }
    }
    MonoInterpretation out{make_nilpattern(t2, m, std::move(wt2), std::move(wz2), cfg), {}, {}};

    out.character_restriction = restr;
    out.core_projection.resize(static_cast<std::size_t>(k2 * m));
    for (long long u = 0; u < k2; ++u) {
        for (long long z = 0; z < m; ++z)
            out.core_projection[static_cast<std::size_t>(u * m + z)] =
                restr[static_cast<std::size_t>(u)] * m + z;
    }
    return out;
}

namespace {

void check_coset_table(const FiniteAbelianGroup& domain, const Core& core,
                       const std::vector<long long>& psi) {
    if (psi.size() != static_cast<std::size_t>(domain.order()))
        throw validation_error("coset table needs one entry per domain element");
    for (long long c : psi) {
        if (c < 0 || c >= core.size()) throw validation_error("coset index out of range");
    }
}

} // namespace

VerifyOutcome verify_nilmorphism(const FiniteAbelianGroup& domain, const NilPattern& n,
                                 const std::vector<long long>& psi, const RunConfig& cfg) {
    Core core(n);
    check_coset_table(domain, core, psi);
    const long long na = domain.order();
    const long long nt = n.base().order();
    const long long m = n.circle_order();
    require_budget(static_cast<std::uint64_t>(nt) * na * na * na, cfg,
                   "nil-morphism verification");

    VerifyOutcome out;
    NilMorphism mor{domain, n, psi, {}, {}, psi[0] == 0};
    mor.witness_n.resize(static_cast<std::size_t>(na));
    mor.witness_chi.resize(static_cast<std::size_t>(na));

    const NilElement rep0_inv = n.inv(core.representative(psi[0]));

    for (long long a = 0; a < na; ++a) {
        // The character part of any witness is forced by the b = 0 instance.
        const long long chi_n = n.base().sub(core.first_degree(psi[static_cast<std::size_t>(a)]),
                                             core.first_degree(psi[0]));
        bool mismatch = false;
        for (long long b = 0; b < na && !mismatch; ++b) {
            long long lhs = core.first_degree(psi[static_cast<std::size_t>(domain.add(a, b))]);
            long long rhs =
                n.base().add(chi_n, core.first_degree(psi[static_cast<std::size_t>(b)]));
            if (lhs != rhs) {
                out.bad_a = a;
                out.bad_b = b;
                mismatch = true;
            }
        }
        if (mismatch) return out;

        bool found = false;
        long long first_bad_b = -1;
        for (long long t = 0; t < nt && !found; ++t) {
            NilElement cand = n.mul(
                n.mul(core.representative(psi[static_cast<std::size_t>(a)]), {0, t, 0}),
                rep0_inv);
            std::vector<long long> d(static_cast<std::size_t>(na));
            for (long long b = 0; b < na; ++b) {
                long long moved = core.act(cand, psi[static_cast<std::size_t>(b)]);
                d[static_cast<std::size_t>(b)] =
                    nonneg_mod(psi[static_cast<std::size_t>(domain.add(a, b))] % m - moved % m,
                               m);
            }
            bool additive = true;
            for (long long b1 = 0; b1 < na && additive; ++b1) {
                for (long long b2 = b1; b2 < na && additive; ++b2) {
                    long long sum = domain.add(b1, b2);
                    if (d[static_cast<std::size_t>(sum)] !=
                        (d[static_cast<std::size_t>(b1)] + d[static_cast<std::size_t>(b2)]) % m) {
                        additive = false;
                        if (t == 0) first_bad_b = sum;
                    }
                }
            }
            if (additive) {
                mor.witness_n[static_cast<std::size_t>(a)] = cand;
                mor.witness_chi[static_cast<std::size_t>(a)] = std::move(d);
                found = true;
            }
        }
        if (!found) {
            out.bad_a = a;
            out.bad_b = first_bad_b;
            return out;
        }
    }
    out.morphism = std::move(mor);
    return out;
}

namespace {

// Common part of lift and split_hom: the interpreted pattern of type
// (dual(A), Z_m) obtained by transporting the cocycle along u = c . psi.
struct LiftedPattern {
    NilPattern pattern;
    std::vector<long long> u; // first-degree composition, per domain element
};

LiftedPattern build_lifted_pattern(const FiniteAbelianGroup& domain, const NilPattern& n,
                                   const std::vector<long long>& psi, const RunConfig& cfg) {
    Core core(n);
    check_coset_table(domain, core, psi);
    const long long na = domain.order();
    const long long m = n.circle_order();

    std::vector<long long> u(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a)
        u[static_cast<std::size_t>(a)] = core.first_degree(psi[static_cast<std::size_t>(a)]);
    for (long long a = 0; a < na; ++a) {
        for (long long b = 0; b < na; ++b) {
            if (u[static_cast<std::size_t>(domain.add(a, b))] !=
                n.base().add(u[static_cast<std::size_t>(a)], u[static_cast<std::size_t>(b)]))
                throw validation_error("first-degree composition is not a homomorphism");
        }
    }
    if (m % domain.exponent() != 0)
        throw validation_error(
            "circle order must be a multiple of the domain exponent to interpret over the "
            "dual; refine the circle grid first");

    // u as a homomorphism into the character index space, so its dual maps
    // base-group elements to characters of the domain.
    std::vector<long long> images;
    images.reserve(domain.rank());
    for (std::size_t j = 0; j < domain.rank(); ++j) {
        std::vector<long long> digits(domain.rank(), 0);
        digits[j] = 1;
        images.push_back(u[static_cast<std::size_t>(domain.encode(digits))]);
    }
    AbelianHom u_hom(domain, n.base(), images);

    std::vector<long long> wt2(static_cast<std::size_t>(na * na));
    std::vector<long long> wz2(static_cast<std::size_t>(na * na));
    for (long long a = 0; a < na; ++a) {
        for (long long b = 0; b < na; ++b) {
            auto idx = static_cast<std::size_t>(a * na + b);
            long long ca = u[static_cast<std::size_t>(a)];
            long long cb = u[static_cast<std::size_t>(b)];
            wt2[idx] = u_hom.dual_apply(n.omega_t(ca, cb));
            wz2[idx] = n.omega_z(ca, cb);
        }
    }
    return {make_nilpattern(FiniteAbelianGroup(domain.factors()), m, std::move(wt2),
                            std::move(wz2), cfg),
            std::move(u)};
}

} // namespace

LiftResult lift(const FiniteAbelianGroup& domain, const NilPattern& n,
                const std::vector<long long>& psi, const RunConfig& cfg) {
    LiftedPattern lp = build_lifted_pattern(domain, n, psi, cfg);
    const long long na = domain.order();
    const long long m = n.circle_order();

    std::vector<long long> psi2(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a)
        psi2[static_cast<std::size_t>(a)] = a * m + psi[static_cast<std::size_t>(a)] % m;

    VerifyOutcome vo = verify_nilmorphism(domain, lp.pattern, psi2, cfg);
    if (!vo.ok())
        throw validation_error("lifted table fails the defining identity at (a, b) = " +
                               pair_str(vo.bad_a, vo.bad_b) +
                               "; the input is not a nil-morphism");

    LiftResult out{std::move(lp.pattern), std::move(*vo.morphism), {}};
    out.core_projection.resize(static_cast<std::size_t>(na * m));
    for (long long a = 0; a < na; ++a) {
        for (long long z = 0; z < m; ++z)
            out.core_projection[static_cast<std::size_t>(a * m + z)] =
                lp.u[static_cast<std::size_t>(a)] * m + z;
    }
    return out;
}

SplitCertificate split_hom(const NilMorphism& psi, const RunConfig& cfg) {
    const FiniteAbelianGroup& domain = psi.domain;
    const NilPattern& n = psi.pattern;
    Core core(n);
    check_coset_table(domain, core, psi.psi);
    const long long na = domain.order();
    const long long m = n.circle_order();
    if (!psi.normalized || psi.psi[0] != 0)
        throw validation_error("split certificate needs a normalized nil-morphism");
    if (psi.witness_n.size() != static_cast<std::size_t>(na) ||
        psi.witness_chi.size() != static_cast<std::size_t>(na))
        throw validation_error("split certificate needs witnesses for every element");
    require_budget(static_cast<std::uint64_t>(na) * na * na, cfg, "split certificate");
    for (long long a = 0; a < na; ++a) {
        const auto& chi = psi.witness_chi[static_cast<std::size_t>(a)];
        if (chi.size() != static_cast<std::size_t>(na))
            throw validation_error("split certificate needs witnesses for every element");
        for (long long b = 0; b < na; ++b) {
            long long moved = core.z_shift(
                core.act(psi.witness_n[static_cast<std::size_t>(a)],
                         psi.psi[static_cast<std::size_t>(b)]),
                chi[static_cast<std::size_t>(b)]);
            if (moved != psi.psi[static_cast<std::size_t>(domain.add(a, b))])
                throw validation_error("witnesses do not certify the nil-morphism identity");
        }
    }

    LiftedPattern lp = build_lifted_pattern(domain, n, psi.psi, cfg);
    const NilPattern& n2 = lp.pattern;

    // The character slot of the certificate is forced by the coset data:
    // its pairing with b must equal z(a+b) - z(a) - z(b) - w_z(u(a), u(b)).
    SplitCertificate out{n2, {}, {}};
    out.hom.resize(static_cast<std::size_t>(na));
    out.core_composition.resize(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a) {
        std::vector<long long> need(static_cast<std::size_t>(na));
        for (long long b = 0; b < na; ++b) {
            long long za = psi.psi[static_cast<std::size_t>(a)] % m;
            long long zb = psi.psi[static_cast<std::size_t>(b)] % m;
            long long zab = psi.psi[static_cast<std::size_t>(domain.add(a, b))] % m;
            need[static_cast<std::size_t>(b)] =
                nonneg_mod(zab - za - zb -
                               n.omega_z(lp.u[static_cast<std::size_t>(a)],
                                         lp.u[static_cast<std::size_t>(b)]),
                           m);
        }
        long long chosen = -1;
        for (long long chi = 0; chi < na && chosen < 0; ++chi) {
            bool match = true;
            for (long long b = 0; b < na && match; ++b)
                match = n2.chi_eval(b, chi) == need[static_cast<std::size_t>(b)];
            if (match) chosen = chi;
        }
        if (chosen < 0)
            throw validation_error("no character matches the coset data at element " +
                                   std::to_string(a) + "; the map does not split");
        out.hom[static_cast<std::size_t>(a)] = {a, chosen,
                                                psi.psi[static_cast<std::size_t>(a)] % m};
        out.core_composition[static_cast<std::size_t>(a)] =
            lp.u[static_cast<std::size_t>(a)] * m + psi.psi[static_cast<std::size_t>(a)] % m;
        if (out.core_composition[static_cast<std::size_t>(a)] !=
            psi.psi[static_cast<std::size_t>(a)])
            throw internal_error("split certificate stopped inducing the original map");
    }

    for (long long a = 0; a < na; ++a) {
        for (long long b = 0; b < na; ++b) {
            NilElement prod = n2.mul(out.hom[static_cast<std::size_t>(a)],
                                     out.hom[static_cast<std::size_t>(b)]);
            if (!(prod == out.hom[static_cast<std::size_t>(domain.add(a, b))]))
                throw validation_error("certificate is not a homomorphism at " + pair_str(a, b));
        }
    }
    return out;
}

CoreFunction canonical_circular(const Core& core) {
    const long long m = core.pattern().circle_order();
    std::vector<cplx> roots(static_cast<std::size_t>(m));
    for (long long z = 0; z < m; ++z)
        roots[static_cast<std::size_t>(z)] = unit_angle(static_cast<double>(z) / static_cast<double>(m));
    CoreFunction f(static_cast<std::size_t>(core.size()));
    for (long long c = 0; c < core.size(); ++c) f[static_cast<std::size_t>(c)] = roots[static_cast<std::size_t>(c % m)];
    return f;
}

std::vector<CoreFunction> circular_decompose(const Core& core, const CoreFunction& f,
                                             const CoreFunction& phi) {
    const long long size = core.size();
    const long long m = core.pattern().circle_order();
    if (f.size() != static_cast<std::size_t>(size) || phi.size() != static_cast<std::size_t>(size))
        throw validation_error("core functions need one value per coset");
    for (long long x = 0; x < size; ++x) {
        if (std::abs(std::abs(phi[static_cast<std::size_t>(x)]) - 1.0) > 1e-9)
            throw validation_error("reference is not circular: values must be unimodular");
        for (long long z = 0; z < m; ++z) {
            cplx want = unit_angle(static_cast<double>(z) / static_cast<double>(m)) *
                        phi[static_cast<std::size_t>(x)];
            if (std::abs(phi[static_cast<std::size_t>(core.z_shift(x, z))] - want) > 1e-9)
                throw validation_error("reference is not circular: central shifts do not "
                                       "rotate its values");
        }
    }

    std::vector<CoreFunction> comp(static_cast<std::size_t>(m),
                                   CoreFunction(static_cast<std::size_t>(size)));
    for (long long x = 0; x < size; ++x) {
        for (long long z = 0; z < m; ++z) {
            long long zx = core.z_shift(x, z);
            cplx val = f[static_cast<std::size_t>(zx)];
            cplx p = phi[static_cast<std::size_t>(zx)];
            cplx pow{1.0, 0.0};
            for (long long i = 0; i < m; ++i) {
                comp[static_cast<std::size_t>(i)][static_cast<std::size_t>(x)] +=
                    val * std::conj(pow) / static_cast<double>(m);
                pow *= p;
            }
        }
    }
    return comp;
}

} // namespace hofa
