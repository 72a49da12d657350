#include "hofa/almosthom.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <numeric>
#include <string>
#include <utility>

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

// Tolerance for identities that involve at least one floating angle.
constexpr double kFloatTol = 1e-9;

bool angles_close(const Angle& x, const Angle& y) {
    if (x.exact() && y.exact()) return x.equals_exact(y);
    return Angle::dist(x, y) <= kFloatTol;
}

// Length of the shortest closed arc containing every value; values in [0, 1).
double min_enclosing_arc(std::vector<double> v) {
    if (v.size() < 2) return 0.0;
    std::sort(v.begin(), v.end());
    double gap = v.front() + 1.0 - v.back();
    for (std::size_t i = 0; i + 1 < v.size(); ++i) gap = std::max(gap, v[i + 1] - v[i]);
    return 1.0 - gap;
}

NilCorrection fail_stage(std::string stage, std::string detail) {
    NilCorrection r;
    r.ok = false;
    r.stage = std::move(stage);
    r.detail = std::move(detail);
    return r;
}

} // namespace

const Angle& CircleExtension::cocycle(long long x, long long y) const {
    const long long n = b_.order();
    if (x < 0 || x >= n || y < 0 || y >= n)
        throw validation_error("base element index out of range");
    return c_[static_cast<std::size_t>(x * n + y)];
}

ExtElement CircleExtension::mul(const ExtElement& x, const ExtElement& y) const {
    return {b_.add(x.b, y.b), x.theta + y.theta + cocycle(x.b, y.b)};
}

ExtElement CircleExtension::inv(const ExtElement& x) const {
    const long long bn = b_.neg(x.b);
    return {bn, -(x.theta + cocycle(x.b, bn))};
}

double CircleExtension::dist(const ExtElement& x, const ExtElement& y) {
    if (x.b != y.b) return std::numeric_limits<double>::infinity();
    return Angle::dist(x.theta, y.theta);
}

CircleExtension make_circle_extension(FiniteAbelianGroup base, std::vector<Angle> cocycle,
                                      const RunConfig& cfg) {
    const long long n = base.order();
    if (cocycle.size() != static_cast<std::size_t>(n * n))
        throw validation_error("circle cocycle table needs one entry per ordered base pair");
    require_budget(static_cast<std::uint64_t>(n) * n * n + static_cast<std::uint64_t>(n) * n,
                   cfg, "circle extension validation");

    auto at = [&](long long x, long long y) -> const Angle& {
        return cocycle[static_cast<std::size_t>(x * n + y)];
    };
    for (long long x = 0; x < n; ++x) {
        for (long long y = 0; y < n; ++y) {
            const long long xy = base.add(x, y);
            for (long long z = 0; z < n; ++z) {
                const Angle lhs = at(x, y) + at(xy, z);
                const Angle rhs = at(y, z) + at(x, base.add(y, z));
                if (!angles_close(lhs, rhs))
                    throw cocycle_error("circle cocycle identity fails at (" +
                                        std::to_string(x) + ", " + std::to_string(y) + ", " +
                                        std::to_string(z) + ")");
            }
        }
    }

    // Normalize by the coboundary of the constant -c(0,0); the identity row
    // and column then vanish and multiplying by (0, 0) is exactly neutral.
    const Angle c00 = at(0, 0);
    if (!(c00.exact() && c00.equals_exact(Angle()))) {
        for (Angle& e : cocycle) e = e - c00;
    }
    for (long long x = 0; x < n; ++x) {
        cocycle[static_cast<std::size_t>(x)] = Angle();
        cocycle[static_cast<std::size_t>(x * n)] = Angle();
    }
    return CircleExtension(std::move(base), std::move(cocycle));
}

Angle concentrated_mean(const std::vector<Angle>& samples) {
    return concentrated_mean(samples, std::vector<long long>(samples.size(), 1));
}

Angle concentrated_mean(const std::vector<Angle>& samples,
                        const std::vector<long long>& weights) {
    if (samples.empty()) throw validation_error("concentrated mean needs at least one sample");
    if (weights.size() != samples.size())
        throw validation_error("concentrated mean needs one weight per sample");
    long long total = 0;
    std::vector<std::size_t> pts;
    pts.reserve(samples.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0) throw validation_error("sample weights must be nonnegative");
        if (weights[i] == 0) continue;
        total += weights[i];
        pts.push_back(i);
    }
    if (total == 0) throw validation_error("sample weights must not all be zero");

    bool exact = true;
    for (std::size_t i : pts) exact = exact && samples[i].exact();

    std::sort(pts.begin(), pts.end(), [&](std::size_t i, std::size_t j) {
        if (exact) {
            const Rat& ri = samples[i].rat();
            const Rat& rj = samples[j].rat();
            if (ri != rj) return ri < rj;
        } else if (samples[i].value() != samples[j].value()) {
            return samples[i].value() < samples[j].value();
        }
        return i < j;
    });

    // The samples fit on a closed arc of a third of the circle exactly when
    // some cyclic gap between consecutive sorted values is at least 2/3, and
    // such a gap is unique, so the branch cut it induces is canonical.
    const std::size_t k = pts.size();
    std::size_t start = k; // index into pts of the first value after the gap
    if (exact) {
        const Rat bound(2, 3);
        for (std::size_t i = 0; i < k; ++i) {
            const Rat& cur = samples[pts[i]].rat();
            const Rat& nxt = samples[pts[(i + 1) % k]].rat();
            const Rat gap = (i + 1 == k) ? nxt + Rat::of(1) - cur : nxt - cur;
            if (!(gap < bound)) {
                start = (i + 1) % k;
                break;
            }
        }
    } else {
        const double bound = 2.0 / 3.0;
        for (std::size_t i = 0; i < k; ++i) {
            const double cur = samples[pts[i]].value();
            const double nxt = samples[pts[(i + 1) % k]].value();
            const double gap = (i + 1 == k) ? nxt + 1.0 - cur : nxt - cur;
            if (gap >= bound) {
                start = (i + 1) % k;
                break;
            }
        }
    }
    if (start == k) {
        std::size_t wi = 0, wj = 0;
        double worst = -1.0;
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = i + 1; j < k; ++j) {
                const double d = Angle::dist(samples[pts[i]], samples[pts[j]]);
                if (d > worst) {
                    worst = d;
                    wi = pts[i];
                    wj = pts[j];
                }
            }
        }
        throw concentration_error(
            "samples do not fit on a closed arc of a third of the circle: samples " +
            std::to_string(wi) + " and " + std::to_string(wj) + " are " +
            std::to_string(worst) + " apart");
    }

    if (exact) {
        const Rat s = samples[pts[start]].rat();
        Rat acc = Rat::of(0);
        for (std::size_t i : pts) {
            Rat l = samples[i].rat();
            if (l < s) l = l + Rat::of(1);
            acc = acc + l * Rat::of(weights[i]);
        }
        return Angle::rational((acc / Rat::of(total)).mod1());
    }
    const double s = samples[pts[start]].value();
    double acc = 0.0;
    for (std::size_t i : pts) {
        double l = samples[i].value();
        if (l < s) l += 1.0;
        acc += l * static_cast<double>(weights[i]);
    }
    double mean = acc / static_cast<double>(total);
    mean -= std::floor(mean);
    if (mean >= 1.0) mean -= 1.0;
    return Angle::real(mean);
}

double hom_defect(const FiniteAbelianGroup& domain, const CircleExtension& target,
                  const std::vector<ExtElement>& h, const RunConfig& cfg) {
    const long long n = domain.order();
    if (h.size() != static_cast<std::size_t>(n))
        throw validation_error("almost homomorphism table needs one value per domain element");
    require_budget(static_cast<std::uint64_t>(n) * n, cfg, "almost-homomorphism validation");
    double worst = 0.0;
    for (long long a = 0; a < n; ++a) {
        for (long long b = 0; b < n; ++b) {
            const double d =
                CircleExtension::dist(h[domain.add(a, b)], target.mul(h[a], h[b]));
            worst = std::max(worst, d);
        }
    }
    return worst;
}

AlmostHom make_almost_hom(FiniteAbelianGroup domain, CircleExtension target,
                          std::vector<ExtElement> h, double eps, const RunConfig& cfg) {
    const long long n = domain.order();
    if (h.size() != static_cast<std::size_t>(n))
        throw validation_error("almost homomorphism table needs one value per domain element");
    if (!(eps >= 0.0)) throw validation_error("the defect bound must be nonnegative");
    require_budget(static_cast<std::uint64_t>(n) * n, cfg, "almost-homomorphism validation");
    const FiniteAbelianGroup& bg = target.base();
    for (long long a = 0; a < n; ++a) {
        if (h[a].b < 0 || h[a].b >= bg.order())
            throw validation_error("base coset index out of range at element " +
                                   std::to_string(a));
    }
    for (long long a = 0; a < n; ++a) {
        for (long long b = 0; b < n; ++b) {
            if (h[domain.add(a, b)].b != bg.add(h[a].b, h[b].b))
                throw validation_error("the base parts fail to be a homomorphism at " +
                                       pair_str(a, b));
        }
    }
    const double defect = hom_defect(domain, target, h, cfg);
    if (defect > eps)
        throw validation_error("measured defect " + std::to_string(defect) +
                               " exceeds the declared bound " + std::to_string(eps));
    return {std::move(domain), std::move(target), std::move(h), eps};
}

std::vector<ExtElement> symmetrize(const AlmostHom& h) {
    const FiniteAbelianGroup& A = h.domain;
    const CircleExtension& N = h.target;
    const long long n = A.order();
    std::vector<ExtElement> out(static_cast<std::size_t>(n));
    for (long long a = 0; a < n; ++a) {
        const long long na = A.neg(a);
        if (a < na) {
            out[a] = h.h[a];
        } else if (a > na) {
            out[a] = N.inv(h.h[na]);
        } else {
            // 2-torsion: move the value to the nearest square root of the
            // identity inside its coset, so inversion fixes it exactly.
            const Angle& c = N.cocycle(h.h[a].b, h.h[a].b);
            const Angle& th = h.h[a].theta;
            if (c.exact() && th.exact()) {
                const Rat mc = (-c.rat()).mod1();
                const Rat half(mc.num, mc.den * 2);
                const Angle r0 = Angle::rational(half);
                const Angle r1 = Angle::rational(half + Rat(1, 2));
                const Rat d0 = Angle::dist_exact(r0, th);
                const Rat d1 = Angle::dist_exact(r1, th);
                out[a] = {h.h[a].b, d0 <= d1 ? r0 : r1};
            } else {
                const double cv = c.value();
                const double mc = cv == 0.0 ? 0.0 : 1.0 - cv;
                const Angle r0 = Angle::real(mc / 2.0);
                const Angle r1 = Angle::real(mc / 2.0 + 0.5);
                out[a] = {h.h[a].b,
                          Angle::dist(r0, th) <= Angle::dist(r1, th) ? r0 : r1};
            }
        }
    }
    return out;
}

std::vector<ExtElement> correct_almost_hom(const AlmostHom& h, const RunConfig& cfg) {
    if (h.eps > 1.0 / 40.0)
        throw validation_error(
            "the defect bound must be at most 1/40 for the correction to apply");
    const FiniteAbelianGroup& A = h.domain;
    const CircleExtension& N = h.target;
    const long long n = A.order();
    require_budget(static_cast<std::uint64_t>(n) * n * 3, cfg,
                   "almost-homomorphism correction");

    const std::vector<ExtElement> hp = symmetrize(h);
    std::vector<ExtElement> g(static_cast<std::size_t>(n));

    const std::uint64_t chunks = parallel_chunk_count(static_cast<std::uint64_t>(n));
    std::vector<std::exception_ptr> errs(chunks);
    parallel_for(static_cast<std::uint64_t>(n), cfg.threads,
                 [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
                     try {
                         std::vector<Angle> fiber(static_cast<std::size_t>(n));
                         for (std::uint64_t ai = begin; ai < end; ++ai) {
                             const long long a = static_cast<long long>(ai);
                             for (long long a1 = 0; a1 < n; ++a1) {
                                 const ExtElement e = N.mul(hp[a1], hp[A.sub(a, a1)]);
                                 if (e.b != hp[a].b)
                                     throw internal_error(
                                         "pair products left the expected coset");
                                 fiber[static_cast<std::size_t>(a1)] = e.theta;
                             }
                             try {
                                 g[a] = {hp[a].b, concentrated_mean(fiber)};
                             } catch (const concentration_error&) {
                                 throw internal_error("pair products failed to concentrate; "
                                                      "the validated defect bound cannot hold");
                             }
                         }
                     } catch (...) {
                         errs[chunk] = std::current_exception();
                     }
                 });
    for (const std::exception_ptr& e : errs) {
        if (e) std::rethrow_exception(e);
    }

    // The averaged table must now be a genuine homomorphism.
    for (long long a = 0; a < n; ++a) {
        for (long long b = 0; b < n; ++b) {
            const ExtElement p = N.mul(g[a], g[b]);
            const ExtElement& lhs = g[A.add(a, b)];
            if (p.b != lhs.b)
                throw internal_error("corrected base parts stopped being a homomorphism");
            if (!angles_close(lhs.theta, p.theta))
                throw internal_error("the corrected table failed to be a homomorphism");
        }
    }
    for (long long a = 0; a < n; ++a) {
        if (CircleExtension::dist(g[a], h.h[a]) > 4.0 * h.eps + 1e-12)
            throw internal_error("the corrected table drifted more than four defect bounds");
    }
    return g;
}

EpsLinearResult correct_eps_linear(const FiniteAbelianGroup& domain,
                                   const std::vector<std::vector<Angle>>& f, double eps,
                                   const RunConfig& cfg) {
    const long long n = domain.order();
    if (f.size() != static_cast<std::size_t>(n))
        throw validation_error("the table needs one row per domain element");
    if (!(eps >= 0.0)) throw validation_error("the linearity bound must be nonnegative");
    const std::size_t k = f.empty() ? 0 : f[0].size();
    for (const auto& row : f) {
        if (row.size() != k)
            throw validation_error("every row must have the same number of coordinates");
    }
    require_budget(static_cast<std::uint64_t>(n) * n * std::max<std::size_t>(k, 1), cfg,
                   "almost-homomorphism correction");

    const CircleExtension circle =
        make_circle_extension(FiniteAbelianGroup({1}), {Angle()}, cfg);
    EpsLinearResult out;
    out.linear.assign(static_cast<std::size_t>(n), std::vector<Angle>(k));
    out.offset.assign(k, Angle());
    out.deviation = 0.0;

    for (std::size_t j = 0; j < k; ++j) {
        const std::string where = "coordinate " + std::to_string(j) + ": ";
        std::vector<ExtElement> hj(static_cast<std::size_t>(n));
        for (long long a = 0; a < n; ++a) hj[a] = {0, f[a][j] - f[0][j]};
        const double defect = hom_defect(domain, circle, hj, cfg);
        if (defect > 2.0 * eps)
            throw validation_error(where + "the reduced defect " + std::to_string(defect) +
                                   " exceeds twice the declared linearity bound");
        if (defect > 1.0 / 40.0)
            throw validation_error(where + "the reduced defect " + std::to_string(defect) +
                                   " exceeds 1/40");
        std::vector<ExtElement> gj;
        try {
            gj = correct_almost_hom(make_almost_hom(domain, circle, std::move(hj), defect, cfg),
                                    cfg);
        } catch (const validation_error& e) {
            throw validation_error(where + e.what());
        }
        out.offset[j] = f[0][j];
        for (long long a = 0; a < n; ++a) {
            out.linear[a][j] = gj[a].theta;
            out.deviation =
                std::max(out.deviation, Angle::dist(f[a][j], f[0][j] + gj[a].theta));
        }
    }
    return out;
}

NilCorrection correct_almost_nilmorphism(const FiniteAbelianGroup& domain, const NilPattern& n,
                                         const std::vector<long long>& f, double delta,
                                         const RunConfig& cfg) {
    const long long na = domain.order();
    const long long m = n.circle_order();
    Core core(n);
    const long long csize = core.size();
    if (f.size() != static_cast<std::size_t>(na))
        throw validation_error("the table needs one coset per domain element");
    for (long long v : f) {
        if (v < 0 || v >= csize) throw validation_error("coset index out of range");
    }
    if (!(delta >= 0.0)) throw validation_error("the fiber tolerance must be nonnegative");

    // A table that already verifies is returned unchanged.
    VerifyOutcome v0 = verify_nilmorphism(domain, n, f, cfg);
    if (v0.ok()) {
        NilCorrection r;
        r.ok = true;
        r.pattern = n;
        r.morphism = std::move(*v0.morphism);
        r.scale = 1;
        r.displacement = 0.0;
        return r;
    }

    const FiniteAbelianGroup& T = n.base();
    const long long nt = T.order();
    require_budget(static_cast<std::uint64_t>(na) * na * na * nt +
                       static_cast<std::uint64_t>(na) * na,
                   cfg, "nil-morphism correction");

    // Normalize so the table starts at the identity coset; the translation
    // is undone at the end and does not move fiber distances.
    const NilElement e0 = core.representative(f[0]);
    const NilElement g0 = n.inv(e0);
    std::vector<long long> f1(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a) f1[a] = core.act(g0, f[a]);

    std::vector<long long> alpha(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a) alpha[a] = core.first_degree(f1[a]);
    if (alpha[0] != 0)
        throw internal_error("normalization failed to move the table to the identity coset");
    for (long long a = 0; a < na; ++a) {
        for (long long b = 0; b < na; ++b) {
            if (alpha[domain.add(a, b)] != T.add(alpha[a], alpha[b]))
                return fail_stage("base linearity",
                                  "the first-degree part is not affine at " + pair_str(a, b));
        }
    }

    // Restrict the pattern to the image of the base part.  The annihilator
    // of the image, read back as a subgroup through the symmetric pairing,
    // is exactly the kernel the quotient has to kill.
    std::vector<long long> image = alpha;
    std::sort(image.begin(), image.end());
    image.erase(std::unique(image.begin(), image.end()), image.end());
    const std::vector<long long> ann = annihilator(T, image);
    const EpiInterpretation epi = interpret_epi(n, ann, cfg);
    const NilPattern& n3 = epi.pattern;
    const FiniteAbelianGroup& T3 = n3.base();
    const long long nt3 = T3.order();
    Core core3(n3);

    std::vector<long long> rev(static_cast<std::size_t>(csize), -1);
    for (std::size_t c2 = 0; c2 < epi.core_injection.size(); ++c2)
        rev[epi.core_injection[c2]] = static_cast<long long>(c2);
    std::vector<long long> f2(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a) {
        f2[a] = rev[f1[a]];
        if (f2[a] < 0) throw internal_error("the restricted core does not cover the table");
    }
    std::vector<long long> chi_rev(static_cast<std::size_t>(nt), -1);
    for (std::size_t c3 = 0; c3 < epi.character_embedding.size(); ++c3)
        chi_rev[epi.character_embedding[c3]] = static_cast<long long>(c3);
    std::vector<long long> alpha3(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a) {
        alpha3[a] = chi_rev[alpha[a]];
        if (alpha3[a] < 0)
            throw internal_error("the image character is missing from the restricted dual");
    }

    // Fiber witness search: for every a find a coset representative and a
    // character of the domain that explain the displacement of f2 within
    // the tolerance.  The scan order makes the witnesses canonical.
    std::vector<long long> wit_t(static_cast<std::size_t>(na), -1);
    std::vector<long long> wit_chi(static_cast<std::size_t>(na), -1);
    const NilElement rep0inv = n3.inv(core3.representative(f2[0]));
    const std::uint64_t chunks = parallel_chunk_count(static_cast<std::uint64_t>(na));
    std::vector<std::exception_ptr> errs(chunks);
    parallel_for(
        static_cast<std::uint64_t>(na), cfg.threads,
        [&](std::uint64_t chunk, std::uint64_t begin, std::uint64_t end) {
            try {
                std::vector<double> resid(static_cast<std::size_t>(na));
                std::vector<double> s(static_cast<std::size_t>(na));
                for (std::uint64_t ai = begin; ai < end; ++ai) {
                    const long long a = static_cast<long long>(ai);
                    bool found = false;
                    for (long long t = 0; t < nt3 && !found; ++t) {
                        const NilElement cand = n3.mul(
                            n3.mul(core3.representative(f2[a]), NilElement{0, t, 0}), rep0inv);
                        for (long long b = 0; b < na; ++b) {
                            const long long zr = core3.act(cand, f2[b]) % m;
                            const long long zl = f2[domain.add(a, b)] % m;
                            resid[b] = static_cast<double>(nonneg_mod(zl - zr, m)) /
                                       static_cast<double>(m);
                        }
                        for (long long chi = 0; chi < na && !found; ++chi) {
                            for (long long b = 0; b < na; ++b) {
                                double sv = resid[b] - domain.character_angle(chi, b).value();
                                sv -= std::floor(sv);
                                if (sv >= 1.0) sv -= 1.0;
                                s[b] = sv;
                            }
                            if (min_enclosing_arc(s) <= 2.0 * delta + 1e-12) {
                                wit_t[a] = t;
                                wit_chi[a] = chi;
                                found = true;
                            }
                        }
                    }
                }
            } catch (...) {
                errs[chunk] = std::current_exception();
            }
        });
    for (const std::exception_ptr& e : errs) {
        if (e) std::rethrow_exception(e);
    }
    for (long long a = 0; a < na; ++a) {
        if (wit_t[a] < 0)
            return fail_stage("witness search",
                              "no fiber witness within the tolerance at element " +
                                  std::to_string(a));
    }

    // The base cocycle of the restricted pattern must vanish when pulled
    // back along the base part, otherwise the displacement data has no
    // componentwise model over the domain and its dual.
    std::vector<long long> unit_imgs;
    unit_imgs.reserve(domain.factors().size());
    for (std::size_t j = 0; j < domain.factors().size(); ++j) {
        std::vector<long long> digits(domain.factors().size(), 0);
        digits[j] = 1;
        unit_imgs.push_back(alpha3[domain.encode(digits)]);
    }
    std::optional<AbelianHom> u_hom;
    try {
        u_hom.emplace(domain, T3, std::move(unit_imgs));
    } catch (const validation_error&) {
        throw internal_error("the image map failed to define a homomorphism");
    }
    for (long long a = 0; a < na; ++a) {
        for (long long b = 0; b < na; ++b) {
            if (u_hom->dual_apply(n3.omega_t(alpha3[a], alpha3[b])) != 0)
                return fail_stage("lifted base cocycle",
                                  "the base cocycle does not vanish on the image at " +
                                      pair_str(a, b) +
                                      "; corrections over a twisted base are not supported");
        }
    }

    // Assemble the displacement data into an almost homomorphism into the
    // extension of the circle by the domain times its dual.
    std::vector<long long> bf = domain.factors();
    bf.insert(bf.end(), domain.factors().begin(), domain.factors().end());
    FiniteAbelianGroup B(bf);
    const long long nb = B.order();
    std::vector<Angle> coc(static_cast<std::size_t>(nb * nb));
    for (long long x = 0; x < nb; ++x) {
        const long long ax = x / na, mux = x % na;
        for (long long y = 0; y < nb; ++y) {
            const long long ay = y / na;
            const Rat pairing = domain.character_angle(mux, ay);
            const Rat grid(n3.omega_z(alpha3[ax], alpha3[ay]), m);
            coc[static_cast<std::size_t>(x * nb + y)] = Angle::rational(pairing + grid);
        }
    }
    CircleExtension ext = make_circle_extension(std::move(B), std::move(coc), cfg);

    std::vector<long long> mu(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a)
        mu[a] = domain.add(u_hom->dual_apply(wit_t[a]), wit_chi[a]);
    for (long long a = 0; a < na; ++a) {
        for (long long b = 0; b < na; ++b) {
            if (mu[domain.add(a, b)] != domain.add(mu[a], mu[b]))
                return fail_stage("assembly",
                                  "the fiber characters fail to combine additively at " +
                                      pair_str(a, b));
        }
    }
    std::vector<ExtElement> h(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a)
        h[a] = {a * na + mu[a], Angle::rational(f2[a] % m, m)};
    const double defect = hom_defect(domain, ext, h, cfg);
    if (defect > 1.0 / 40.0)
        return fail_stage("defect bound", "measured defect " + std::to_string(defect) +
                                              " exceeds 1/40");

    std::vector<ExtElement> g;
    try {
        g = correct_almost_hom(
            make_almost_hom(domain, std::move(ext), std::move(h), defect, cfg), cfg);
    } catch (const validation_error& e) {
        throw internal_error(std::string("the assembled correction failed unexpectedly: ") +
                             e.what());
    }

    // Refine the circle grid so it carries the corrected angles exactly.
    long long mp = m;
    for (long long a = 0; a < na; ++a) {
        if (!g[a].theta.exact())
            throw internal_error("correction produced a floating fiber angle from exact data");
        const long long q = g[a].theta.rat().den;
        mp = mp / std::gcd(mp, q) * q;
    }
    const long long scale = mp / m;

    std::vector<long long> wt_full(static_cast<std::size_t>(nt * nt));
    std::vector<long long> wz_full(static_cast<std::size_t>(nt * nt));
    for (long long i = 0; i < nt; ++i) {
        for (long long j = 0; j < nt; ++j) {
            wt_full[static_cast<std::size_t>(i * nt + j)] = n.omega_t(i, j);
            wz_full[static_cast<std::size_t>(i * nt + j)] = n.omega_z(i, j) * scale;
        }
    }
    NilPattern nref = make_nilpattern(T, mp, std::move(wt_full), std::move(wz_full), cfg);
    Core coreref(nref);

    // Project back onto the refined core and undo the normalization.
    const NilElement e0ref{e0.chi, e0.t, e0.z * scale};
    std::vector<long long> fout(static_cast<std::size_t>(na));
    for (long long a = 0; a < na; ++a) {
        const Rat th = g[a].theta.rat();
        const long long zp = th.num * (mp / th.den);
        fout[a] = coreref.act(e0ref, alpha[a] * mp + zp);
    }
    VerifyOutcome vf = verify_nilmorphism(domain, nref, fout, cfg);
    if (!vf.ok()) throw internal_error("the corrected table failed to verify as a morphism");

    double disp = 0.0;
    for (long long a = 0; a < na; ++a) {
        if (coreref.first_degree(fout[a]) != core.first_degree(f[a]))
            throw internal_error("the corrected table left its base coset");
        disp = std::max(disp, Angle::dist(Angle::rational(f[a] % m, m),
                                          Angle::rational(fout[a] % mp, mp)));
    }

    NilCorrection r;
    r.ok = true;
    r.pattern = std::move(nref);
    r.morphism = std::move(*vf.morphism);
    r.scale = scale;
    r.displacement = disp;
    return r;
}

} // namespace hofa
