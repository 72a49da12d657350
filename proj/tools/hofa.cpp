#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "hofa/almosthom.hpp"
#include "hofa/angle.hpp"
#include "hofa/config.hpp"
#include "hofa/cube.hpp"
#include "hofa/decompose.hpp"
#include "hofa/errors.hpp"
#include "hofa/fft.hpp"
#include "hofa/function.hpp"
#include "hofa/gowers.hpp"
#include "hofa/group.hpp"
#include "hofa/json_io.hpp"
#include "hofa/nilpattern.hpp"
#include "hofa/polydeg.hpp"

namespace {

using namespace hofa;

constexpr const char* kToolVersion = "hofa 0.1.0";

/// Options every subcommand accepts.
struct Common {
    int threads = 0;
    std::string out;
    std::string mode = "auto";
    double tolerance = 1e-9;
    long long seed = 0;
    bool seed_given = false;
};

RunConfig make_cfg(const Common& c) {
    RunConfig cfg = RunConfig::from_env();
    cfg.threads = c.threads;
    return cfg;
}

/// Report skeleton shared by every subcommand; body fields follow.
Report make_header(const Common& c, const std::string& mode) {
    Report r = Report::object();
    r.set("tool-version", Report::str(kToolVersion));
    r.set("seed", c.seed_given ? Report::integer(c.seed) : Report::null());
    r.set("mode", Report::str(mode));
    return r;
}

/// Subcommands with one numeric mode reject a --mode request for the other.
std::string fixed_mode(const Common& c, const char* natural) {
    if (c.mode != "auto" && c.mode != natural)
        throw validation_error(std::string("this subcommand computes in ") + natural +
                               " mode only");
    return natural;
}

void emit(const Report& r, const Common& c) {
    std::string text = r.dump();
    text += '\n';
    if (c.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw validation_error(c.out + ": cannot open the output file");
    f << text;
}

std::vector<long long> parse_index_list(const std::string& spec, long long bound,
                                        const char* what) {
    std::vector<long long> out;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        long long value = 0;
        const char* first = spec.data() + pos;
        const char* last = spec.data() + comma;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || value < 0 || value >= bound)
            throw validation_error(std::string(what) + " \"" + spec +
                                   "\" must be comma separated indices in [0, " +
                                   std::to_string(bound) + ")");
        out.push_back(value);
        pos = comma + 1;
    }
    return out;
}

Report nil_triple(const NilElement& e) { return Report::int_array({e.chi, e.t, e.z}); }

Angle degraded(const Angle& a) { return a.exact() ? Angle::real(a.value()) : a; }

bool exhaustive_grid_fits(long long order, int d, std::uint64_t budget) {
    unsigned __int128 cost = 1;
    for (int i = 0; i < d + 2; ++i) {
        cost *= static_cast<unsigned __int128>(order);
        if (cost > budget) return false;
    }
    return true;
}

// norm ----------------------------------------------------------------

struct NormArgs {
    int k = 0;
    std::string file, group, random;
};

int run_norm(const NormArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "float");
    RunConfig cfg = make_cfg(c);
    std::optional<GroupFunction> f;
    if (!a.random.empty()) {
        if (!a.file.empty())
            throw validation_error("give a function file or --random, not both");
        if (a.group.empty()) throw validation_error("--random needs --group factors");
        if (!c.seed_given) throw validation_error("--random needs --seed");
        FiniteAbelianGroup g = parse_group_factors(a.group);
        std::mt19937_64 rng(static_cast<std::uint64_t>(c.seed));
        f = a.random == "unimodular" ? random_unimodular(g, rng) : random_disk(g, rng);
    } else {
        if (a.file.empty()) throw validation_error("a function file or --random is required");
        ParsedFunction p = read_function_file(a.file);
        if (!a.group.empty() && !(parse_group_factors(a.group) == p.group))
            throw validation_error("the --group flag does not match the function file");
        f = std::move(p.values);
    }
    double v = uk_norm(*f, a.k, cfg);
    Report r = make_header(c, mode);
    r.set("k", Report::integer(a.k));
    r.set("group", Report::int_array(f->group().factors()));
    r.set("norm", Report::num(v));
    emit(r, c);
    return 0;
}

// conv and gowers-inner -------------------------------------------------

struct SystemArgs {
    int k = 0;
    bool k_given = false;
    std::string file;
};

int run_conv(const SystemArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "float");
    RunConfig cfg = make_cfg(c);
    SystemInput si = read_system_file(a.file);
    if (a.k_given && a.k != si.k)
        throw validation_error("the --k flag does not match the system file");
    GroupFunction conv = convolution(si.system, cfg);
    Report r = make_header(c, mode);
    r.set("k", Report::integer(si.k));
    r.set("convolution", function_report(conv));
    emit(r, c);
    return 0;
}

int run_gowers_inner(const SystemArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "float");
    RunConfig cfg = make_cfg(c);
    SystemInput si = read_system_file(a.file);
    if (a.k_given && a.k != si.k)
        throw validation_error("the --k flag does not match the system file");
    cplx inner = box_inner(si.system, cfg);
    Report r = make_header(c, mode);
    r.set("k", Report::integer(si.k));
    r.set("inner", Report::complex_pair(inner));
    emit(r, c);
    return 0;
}

// cube ------------------------------------------------------------------

struct CubeArgs {
    int d = 0;
    int k = 0;
    std::string group, member, decompose;
    bool census = false;
};

int run_cube_bdk(const CubeArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    RunConfig cfg = make_cfg(c);
    int chosen = (a.census ? 1 : 0) + (a.member.empty() ? 0 : 1) + (a.decompose.empty() ? 0 : 1);
    if (chosen != 1)
        throw validation_error("choose exactly one of --census, --member, --decompose");

    if (a.census) {
        if (a.d < 1) throw validation_error("--census needs --d");
        if (a.group.empty()) throw validation_error("--census needs --group");
        FiniteAbelianGroup g = parse_group_factors(a.group);
        if (a.k < 1 || a.k > a.d)
            throw validation_error("order k must satisfy 1 <= k <= d");
        const std::uint64_t verts = std::uint64_t{1} << a.d;
        std::uint64_t total = 1;
        bool saturated = false;
        for (std::uint64_t i = 0; i < verts; ++i) {
            if (total > cfg.budget / static_cast<std::uint64_t>(g.order()) + 1) {
                saturated = true;
                break;
            }
            total *= static_cast<std::uint64_t>(g.order());
        }
        if (saturated || total > cfg.budget) {
            std::string count = saturated ? std::to_string(g.order()) + "^" +
                                                std::to_string(verts)
                                          : std::to_string(total);
            throw resource_error("a cube census of " + count +
                                 " labelings would exceed the term budget; raise "
                                 "HOFA_BUDGET to allow it");
        }
        CubeLabeling h(a.d, g);
        std::uint64_t members = 0;
        for (;;) {
            if (bdk_membership(h, a.k)) ++members;
            std::size_t i = 0;
            for (; i < h.values.size(); ++i) {
                if (++h.values[i] < g.order()) break;
                h.values[i] = 0;
            }
            if (i == h.values.size()) break;
        }
        Report r = make_header(c, mode);
        r.set("d", Report::integer(a.d));
        r.set("k", Report::integer(a.k));
        r.set("group", Report::int_array(g.factors()));
        r.set("total", Report::integer(static_cast<long long>(total)));
        r.set("members", Report::integer(static_cast<long long>(members)));
        emit(r, c);
        return 0;
    }

    CubeInput ci = read_cube_file(a.member.empty() ? a.decompose : a.member);
    if (a.d != 0 && a.d != ci.d)
        throw validation_error("the --d flag does not match the labeling file");
    if (!a.group.empty() && !(parse_group_factors(a.group) == ci.group))
        throw validation_error("the --group flag does not match the labeling file");
    CubeLabeling h(ci.d, ci.group);
    h.values = ci.labels;

    if (!a.member.empty()) {
        bool ok = bdk_membership(h, a.k);
        Report r = make_header(c, mode);
        r.set("d", Report::integer(ci.d));
        r.set("k", Report::integer(a.k));
        r.set("member", Report::boolean(ok));
        if (!ok) {
            for (const Face& face : enumerate_faces(ci.d, ci.d - a.k + 1)) {
                long long prod = 0;
                for (std::uint32_t v : face.members()) prod = ci.group.add(prod, h.at(v));
                if (prod != 0) {
                    Report w = Report::object();
                    w.set("free-mask", Report::integer(face.free_mask));
                    w.set("offset-mask", Report::integer(face.offset_mask));
                    w.set("face-product", Report::integer(prod));
                    r.set("witness-face", std::move(w));
                    break;
                }
            }
        }
        emit(r, c);
        return ok ? 0 : 1;
    }

    auto factors = bdk_decompose(h, a.k);
    Report r = make_header(c, mode);
    r.set("d", Report::integer(ci.d));
    r.set("k", Report::integer(a.k));
    r.set("member", Report::boolean(factors.has_value()));
    if (!factors) {
        emit(r, c);
        return 1;
    }
    if (!(recompose(ci.d, ci.group, *factors) == h))
        throw internal_error("generator decomposition fails to recompose");
    r.set("count", Report::integer(static_cast<long long>(factors->size())));
    Report fs = Report::array();
    for (const GeneratorFactor& gf : *factors) {
        Report e = Report::object();
        e.set("free-mask", Report::integer(gf.face.free_mask));
        e.set("offset-mask", Report::integer(gf.face.offset_mask));
        e.set("value", Report::integer(gf.value));
        fs.push(std::move(e));
    }
    r.set("factors", std::move(fs));
    emit(r, c);
    return 0;
}

// poly ------------------------------------------------------------------

struct PolyVerifyArgs {
    int degree = 0;
    std::string file;
};

int run_poly_verify(const PolyVerifyArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    RunConfig cfg = make_cfg(c);
    ParsedFunction p = read_function_file(a.file);
    if (!p.phases)
        throw validation_error("degree verification needs an \"angles\" function file");
    if (!p.phases->exact())
        throw validation_error("degree verification needs exact [p, q] angles throughout");
    if (!exhaustive_grid_fits(p.group.order(), a.degree, cfg.budget) && !c.seed_given)
        throw validation_error(
            "this verification samples shift tuples; provide --seed");
    DegreeVerdict v = is_degree_d(*p.phases, a.degree, cfg,
                                  c.seed_given ? static_cast<std::uint64_t>(c.seed) : 1);
    Report r = make_header(c, mode);
    r.set("degree", Report::integer(a.degree));
    r.set("holds", Report::boolean(v.holds));
    r.set("exhaustive", Report::boolean(v.exhaustive));
    r.set("samples", Report::integer(static_cast<long long>(v.samples)));
    r.set("witness", v.holds ? Report::null() : Report::int_array(v.witness));
    emit(r, c);
    return v.holds ? 0 : 1;
}

struct PolyPhaseArgs {
    long long n = 0, a = 0, b = 0;
    bool half = false;
};

int run_poly_phase(const PolyPhaseArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    UnimodularFunction q = a.half ? quadratic_phase_half(a.n, a.a, a.b)
                                  : quadratic_phase_cyclic(a.n, a.a, a.b);
    Report r = make_header(c, mode);
    r.set("family", Report::str(a.half ? "half" : "cyclic"));
    r.set("a", Report::integer(a.a));
    r.set("b", Report::integer(a.b));
    r.set("phase", function_report(q));
    emit(r, c);
    return 0;
}

// nil -------------------------------------------------------------------

struct NilArgs {
    std::string pattern, morphism, kernel, target, images;
};

int run_nil_validate(const NilArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    RunConfig cfg = make_cfg(c);
    std::string axiom, detail;
    try {
        NilPattern n = read_pattern_file(a.pattern, cfg);
        Core core(n);
        Report r = make_header(c, mode);
        r.set("valid", Report::boolean(true));
        r.set("base", Report::int_array(n.base().factors()));
        r.set("circle-order", Report::integer(n.circle_order()));
        r.set("order", Report::integer(n.order()));
        r.set("core-size", Report::integer(core.size()));
        emit(r, c);
        return 0;
    } catch (const cocycle_error& e) {
        axiom = "cocycle";
        detail = e.what();
    } catch (const centrality_error& e) {
        axiom = "centrality";
        detail = e.what();
    } catch (const commutator_error& e) {
        axiom = "commutator";
        detail = e.what();
    }
    Report r = make_header(c, mode);
    r.set("valid", Report::boolean(false));
    r.set("axiom", Report::str(axiom));
    r.set("detail", Report::str(detail));
    emit(r, c);
    return 1;
}

int run_nil_core(const NilArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    RunConfig cfg = make_cfg(c);
    NilPattern n = read_pattern_file(a.pattern, cfg);
    Core core(n);
    Report r = make_header(c, mode);
    r.set("base", Report::int_array(n.base().factors()));
    r.set("circle-order", Report::integer(n.circle_order()));
    r.set("size", Report::integer(core.size()));
    Report reps = Report::array();
    for (long long i = 0; i < core.size(); ++i) reps.push(nil_triple(core.representative(i)));
    r.set("representatives", std::move(reps));
    emit(r, c);
    return 0;
}

int run_nil_interpret_epi(const NilArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    RunConfig cfg = make_cfg(c);
    NilPattern n = read_pattern_file(a.pattern, cfg);
    std::vector<long long> kernel =
        parse_index_list(a.kernel, n.base().order(), "the kernel list");
    EpiInterpretation ei = interpret_epi(n, kernel, cfg);
    Report r = make_header(c, mode);
    r.set("pattern", pattern_report(ei.pattern));
    r.set("core-injection", Report::int_array(ei.core_injection));
    r.set("character-embedding", Report::int_array(ei.character_embedding));
    emit(r, c);
    return 0;
}

int run_nil_interpret_mono(const NilArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    RunConfig cfg = make_cfg(c);
    NilPattern n = read_pattern_file(a.pattern, cfg);
    FiniteAbelianGroup t2 = parse_group_factors(a.target);
    std::vector<long long> images =
        parse_index_list(a.images, t2.order(), "the generator image list");
    AbelianHom alpha(n.base(), t2, images);
    MonoInterpretation mi = interpret_mono(n, alpha, cfg);
    Report r = make_header(c, mode);
    r.set("pattern", pattern_report(mi.pattern));
    r.set("core-projection", Report::int_array(mi.core_projection));
    r.set("character-restriction", Report::int_array(mi.character_restriction));
    emit(r, c);
    return 0;
}

/// Shared refutation report for the table-verifying nil subcommands.
int refuted_morphism(const VerifyOutcome& out, const Common& c, const std::string& mode) {
    Report r = make_header(c, mode);
    r.set("verified", Report::boolean(false));
    r.set("bad-pair", Report::int_array({out.bad_a, out.bad_b}));
    emit(r, c);
    return 1;
}

int run_nil_verify(const NilArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    RunConfig cfg = make_cfg(c);
    NilPattern n = read_pattern_file(a.pattern, cfg);
    MorphismInput mi = read_morphism_file(a.morphism);
    VerifyOutcome out = verify_nilmorphism(mi.domain, n, mi.psi, cfg);
    if (!out.ok()) return refuted_morphism(out, c, mode);
    Report r = make_header(c, mode);
    r.set("verified", Report::boolean(true));
    r.set("normalized", Report::boolean(out.morphism->normalized));
    emit(r, c);
    return 0;
}

int run_nil_lift(const NilArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    RunConfig cfg = make_cfg(c);
    NilPattern n = read_pattern_file(a.pattern, cfg);
    MorphismInput mi = read_morphism_file(a.morphism);
    VerifyOutcome out = verify_nilmorphism(mi.domain, n, mi.psi, cfg);
    if (!out.ok()) return refuted_morphism(out, c, mode);
    LiftResult lr = lift(mi.domain, n, mi.psi, cfg);
    Report r = make_header(c, mode);
    r.set("pattern", pattern_report(lr.pattern));
    Report m = Report::object();
    m.set("domain", Report::int_array(lr.morphism.domain.factors()));
    m.set("psi", Report::int_array(lr.morphism.psi));
    m.set("normalized", Report::boolean(lr.morphism.normalized));
    r.set("morphism", std::move(m));
    r.set("core-projection", Report::int_array(lr.core_projection));
    emit(r, c);
    return 0;
}

int run_nil_split(const NilArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    RunConfig cfg = make_cfg(c);
    NilPattern n = read_pattern_file(a.pattern, cfg);
    MorphismInput mi = read_morphism_file(a.morphism);
    VerifyOutcome out = verify_nilmorphism(mi.domain, n, mi.psi, cfg);
    if (!out.ok()) return refuted_morphism(out, c, mode);
    SplitCertificate sc = split_hom(*out.morphism, cfg);
    Report r = make_header(c, mode);
    r.set("pattern", pattern_report(sc.pattern));
    Report hom = Report::array();
    for (const NilElement& e : sc.hom) hom.push(nil_triple(e));
    r.set("hom", std::move(hom));
    r.set("core-composition", Report::int_array(sc.core_composition));
    emit(r, c);
    return 0;
}

// hom -------------------------------------------------------------------

struct HomArgs {
    double eps = 0.0;
    std::string file;
};

/// Effective numeric mode of the table subcommands: exact when the whole
/// input stayed exact, degradable to float on request.
std::string table_mode(const Common& c, bool& exact) {
    if (c.mode == "exact" && !exact)
        throw validation_error("exact mode needs exact angles throughout the input");
    if (c.mode == "float") exact = false;
    return exact ? "exact" : "float";
}

int run_hom_correct(const HomArgs& a, const Common& c) {
    RunConfig cfg = make_cfg(c);
    HomTableInput in = read_hom_table_file(a.file);
    bool exact = in.exact;
    std::string mode = table_mode(c, exact);
    if (!exact && in.exact) {
        for (Angle& v : in.cocycle) v = degraded(v);
        for (ExtElement& e : in.h) e.theta = degraded(e.theta);
    }
    CircleExtension ext = make_circle_extension(in.base, std::move(in.cocycle), cfg);
    AlmostHom ah = make_almost_hom(in.domain, ext, in.h, a.eps, cfg);
    std::vector<ExtElement> corrected = correct_almost_hom(ah, cfg);
    double max_disp = 0.0;
    for (std::size_t x = 0; x < corrected.size(); ++x)
        max_disp = std::max(max_disp, CircleExtension::dist(corrected[x], in.h[x]));
    double out_defect = hom_defect(in.domain, ext, corrected, cfg);
    Report r = make_header(c, mode);
    r.set("eps", Report::num(a.eps));
    r.set("displacement-bound", Report::num(4.0 * a.eps));
    r.set("max-displacement", Report::num(max_disp));
    r.set("corrected-defect", Report::num(out_defect));
    r.set("corrected", hom_table_report(in.domain, ext, corrected));
    emit(r, c);
    return 0;
}

int run_hom_eps_linear(const HomArgs& a, const Common& c) {
    RunConfig cfg = make_cfg(c);
    EpsLinearInput in = read_eps_linear_file(a.file);
    bool exact = in.exact;
    std::string mode = table_mode(c, exact);
    if (!exact && in.exact)
        for (std::vector<Angle>& row : in.table)
            for (Angle& v : row) v = degraded(v);
    EpsLinearResult res = correct_eps_linear(in.domain, in.table, a.eps, cfg);
    Report r = make_header(c, mode);
    r.set("eps", Report::num(a.eps));
    r.set("k", Report::integer(in.k));
    r.set("deviation", Report::num(res.deviation));
    Report offset = Report::array();
    for (const Angle& v : res.offset) offset.push(Report::angle_value(v));
    r.set("offset", std::move(offset));
    Report linear = Report::array();
    for (const std::vector<Angle>& row : res.linear) {
        Report rr = Report::array();
        for (const Angle& v : row) rr.push(Report::angle_value(v));
        linear.push(std::move(rr));
    }
    r.set("linear", std::move(linear));
    emit(r, c);
    return 0;
}

// decomp ----------------------------------------------------------------

struct DecompRunArgs {
    double eps = 0.0, theta = 0.0;
    long long rounds = 0;
    std::string file;
};

Report fitted_terms(const std::vector<FittedPhase>& terms) {
    Report out = Report::array();
    for (const FittedPhase& t : terms) {
        Report e = Report::object();
        e.set("index", Report::integer(static_cast<long long>(t.index)));
        e.set("tag", Report::str(t.tag));
        e.set("coefficient", Report::complex_pair(t.coefficient));
        out.push(std::move(e));
    }
    return out;
}

int run_decomp_run(const DecompRunArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "float");
    RunConfig cfg = make_cfg(c);
    ParsedFunction p = read_function_file(a.file);
    Decomposition d = structure_decompose(p.values, a.eps, a.theta, a.rounds, cfg);
    Report r = make_header(c, mode);
    r.set("eps", Report::num(a.eps));
    r.set("theta", Report::num(a.theta));
    r.set("round-budget", Report::integer(a.rounds));
    r.set("structured-terms", fitted_terms(d.structured_terms));
    r.set("discarded-terms", fitted_terms(d.discarded_terms));
    Report rep = Report::object();
    rep.set("g-u3", Report::num(d.report.g_u3));
    rep.set("h-l2", Report::num(d.report.h_l2));
    rep.set("h-g", Report::complex_pair(d.report.h_g));
    rep.set("h-structured", Report::complex_pair(d.report.h_structured));
    rep.set("g-structured", Report::complex_pair(d.report.g_structured));
    rep.set("f-energy", Report::num(d.report.f_energy));
    rep.set("structured-energy", Report::num(d.report.structured_energy));
    rep.set("rest-energy", Report::num(d.report.rest_energy));
    rep.set("cross-energy", Report::num(d.report.cross_energy));
    Report hist = Report::array();
    for (double v : d.report.residual_l2) hist.push(Report::num(v));
    rep.set("residual-l2", std::move(hist));
    rep.set("rounds", Report::integer(static_cast<long long>(d.report.rounds)));
    rep.set("budget-exhausted", Report::boolean(d.report.budget_exhausted));
    r.set("report", std::move(rep));
    r.set("structured", function_report(d.structured));
    r.set("h", function_report(d.h));
    r.set("g", function_report(d.g));
    emit(r, c);
    return 0;
}

struct DecompCorrelateArgs {
    std::string file, features;
    double delta = 0.0;
    bool delta_given = false;
    bool twisted = false;
};

int run_decomp_correlate(const DecompCorrelateArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "float");
    RunConfig cfg = make_cfg(c);
    ParsedFunction p = read_function_file(a.file);

    if (a.features.empty()) {
        if (a.delta_given || a.twisted)
            throw validation_error("the delta scan needs --features");
        PhaseDictionary dict = build_dictionary(p.group, cfg);
        CorrelationHit hit = best_correlation(p.values, dict, cfg);
        Report r = make_header(c, mode);
        r.set("index", Report::integer(static_cast<long long>(hit.index)));
        r.set("tag", Report::str(hit.tag));
        r.set("coefficient", Report::complex_pair(hit.coefficient));
        emit(r, c);
        return 0;
    }

    if (!a.delta_given) throw validation_error("--features needs --delta");
    std::vector<Feature> features = read_features_file(a.features);
    Report r = make_header(c, mode);
    r.set("delta", Report::num(a.delta));
    if (a.twisted) {
        auto w = delta_correlates_twisted(p.values, features, a.delta, cfg);
        if (!w) {
            r.set("witness", Report::null());
            emit(r, c);
            return 1;
        }
        Report wr = Report::object();
        wr.set("index", Report::integer(static_cast<long long>(w->index)));
        wr.set("tag", Report::str(w->tag));
        wr.set("character", Report::integer(w->character));
        wr.set("value", Report::complex_pair(w->value));
        r.set("witness", std::move(wr));
        emit(r, c);
        return 0;
    }
    auto w = delta_correlates_monomial(p.values, features, a.delta, cfg);
    if (!w) {
        r.set("witness", Report::null());
        emit(r, c);
        return 1;
    }
    Report wr = Report::object();
    wr.set("index", Report::integer(static_cast<long long>(w->index)));
    wr.set("tag", Report::str(w->tag));
    wr.set("value", Report::complex_pair(w->value));
    r.set("witness", std::move(wr));
    emit(r, c);
    return 0;
}

// spectrum ----------------------------------------------------------------

struct SpectrumArgs {
    std::string json, file, group;
    double tau = 0.0;
};

int run_spectrum(const SpectrumArgs& a, const Common& c) {
    std::string mode = fixed_mode(c, "float");
    if (a.json.empty() == a.file.empty())
        throw validation_error("give the function file once, positionally or via --json");
    const std::string& path = a.json.empty() ? a.file : a.json;
    ParsedFunction p = read_function_file(path);
    if (!a.group.empty() && !(parse_group_factors(a.group) == p.group))
        throw validation_error("the --group flag does not match the function file");
    auto spec = dominant_spectrum(p.values, a.tau);
    double energy = p.values.norm2();
    energy *= energy;
    double captured = 0.0;
    for (const auto& [chi, coeff] : spec) captured += std::norm(coeff);
    double residual = energy - captured;
    if (residual < 0.0) residual = 0.0;
    Report r = make_header(c, mode);
    r.set("tau", Report::num(a.tau));
    r.set("tolerance", Report::num(c.tolerance));
    r.set("group", Report::int_array(p.group.factors()));
    r.set("count", Report::integer(static_cast<long long>(spec.size())));
    Report entries = Report::array();
    for (const auto& [chi, coeff] : spec) {
        Report e = Report::object();
        e.set("character", Report::integer(chi));
        e.set("coefficient", Report::complex_pair(coeff));
        e.set("magnitude", Report::num(std::abs(coeff)));
        entries.push(std::move(e));
    }
    r.set("spectrum", std::move(entries));
    r.set("residual-energy", Report::num(residual));
    r.set("complete", Report::boolean(residual <= c.tolerance));
    emit(r, c);
    return 0;
}

// group -------------------------------------------------------------------

int run_group(const std::string& spec, const Common& c) {
    std::string mode = fixed_mode(c, "exact");
    FiniteAbelianGroup g = parse_group_factors(spec);
    Report r = make_header(c, mode);
    r.set("factors", Report::int_array(g.factors()));
    r.set("order", Report::integer(g.order()));
    r.set("rank", Report::integer(static_cast<long long>(g.rank())));
    r.set("exponent", Report::integer(g.exponent()));
    emit(r, c);
    return 0;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--threads", c.threads, "worker thread cap, 0 means one per hardware thread")
        ->check(CLI::Range(0, 4096));
    sub->add_option("--out", c.out, "write the report to this file instead of stdout");
    sub->add_option("--mode", c.mode, "numeric mode (default: follow the input)")
        ->check(CLI::IsMember({"auto", "exact", "float"}));
    sub->add_option("--tolerance", c.tolerance, "slack for report-level float comparisons")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", c.seed, "seed for randomized inputs or sampling")
        ->each([&c](const std::string&) { c.seed_given = true; });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite higher-order Fourier analysis toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    Common common;
    int result = 0;

    auto* group_cmd = app.add_subcommand("group", "structure of a finite abelian group");
    add_common(group_cmd, common);
    auto group_spec = std::make_shared<std::string>();
    group_cmd->add_option("--group", *group_spec, "cyclic factors, comma separated")->required();
    group_cmd->callback([&, group_spec] { result = run_group(*group_spec, common); });

    auto* norm_cmd = app.add_subcommand("norm", "uniformity norm of order k");
    add_common(norm_cmd, common);
    auto norm_args = std::make_shared<NormArgs>();
    norm_cmd->add_option("--k,--order", norm_args->k, "norm order")
        ->required()
        ->check(CLI::Range(1, 20));
    norm_cmd->add_option("file", norm_args->file, "function file");
    norm_cmd->add_option("--group", norm_args->group,
                         "expected cyclic factors; with --random, the generated group");
    norm_cmd->add_option("--random", norm_args->random, "generate the input (needs --seed)")
        ->check(CLI::IsMember({"unimodular", "disk"}));
    norm_cmd->callback([&, norm_args] { result = run_norm(*norm_args, common); });

    auto* conv_cmd = app.add_subcommand("conv", "convolution of order k of a function system");
    add_common(conv_cmd, common);
    auto conv_args = std::make_shared<SystemArgs>();
    conv_cmd->add_option("--k", conv_args->k, "expected system order")
        ->check(CLI::Range(1, 20))
        ->each([conv_args](const std::string&) { conv_args->k_given = true; });
    conv_cmd->add_option("file", conv_args->file, "system file")->required();
    conv_cmd->callback([&, conv_args] { result = run_conv(*conv_args, common); });

    auto* inner_cmd = app.add_subcommand("gowers-inner", "box inner product of a function system");
    add_common(inner_cmd, common);
    auto inner_args = std::make_shared<SystemArgs>();
    inner_cmd->add_option("--k", inner_args->k, "expected system order")
        ->check(CLI::Range(1, 20))
        ->each([inner_args](const std::string&) { inner_args->k_given = true; });
    inner_cmd->add_option("file", inner_args->file, "system file")->required();
    inner_cmd->callback([&, inner_args] { result = run_gowers_inner(*inner_args, common); });

    auto* cube_cmd = app.add_subcommand("cube", "cube labeling combinatorics");
    cube_cmd->require_subcommand(1);
    auto* bdk_cmd = cube_cmd->add_subcommand("bdk", "face-closed labeling sets of order k");
    add_common(bdk_cmd, common);
    auto cube_args = std::make_shared<CubeArgs>();
    bdk_cmd->add_option("--d", cube_args->d, "cube dimension")->check(CLI::Range(1, 20));
    bdk_cmd->add_option("--k", cube_args->k, "membership order")
        ->required()
        ->check(CLI::Range(1, 20));
    bdk_cmd->add_option("--group", cube_args->group, "cyclic factors, comma separated");
    bdk_cmd->add_flag("--census", cube_args->census, "count members over all labelings");
    bdk_cmd->add_option("--member", cube_args->member, "labeling file to test for membership");
    bdk_cmd->add_option("--decompose", cube_args->decompose,
                        "labeling file to write as generator factors");
    bdk_cmd->callback([&, cube_args] { result = run_cube_bdk(*cube_args, common); });

    auto* poly_cmd = app.add_subcommand("poly", "polynomial phase functions");
    poly_cmd->require_subcommand(1);
    auto* pverify_cmd = poly_cmd->add_subcommand("verify", "check the degree of a phase");
    add_common(pverify_cmd, common);
    auto pverify_args = std::make_shared<PolyVerifyArgs>();
    pverify_cmd->add_option("--degree", pverify_args->degree, "claimed degree")
        ->required()
        ->check(CLI::Range(0, 60));
    pverify_cmd->add_option("file", pverify_args->file, "function file with exact angles")
        ->required();
    pverify_cmd->callback([&, pverify_args] { result = run_poly_verify(*pverify_args, common); });

    auto* pphase_cmd = poly_cmd->add_subcommand("phase", "generate a quadratic phase");
    add_common(pphase_cmd, common);
    auto pphase_args = std::make_shared<PolyPhaseArgs>();
    pphase_cmd->add_option("--group", pphase_args->n, "cyclic group order")
        ->required()
        ->check(CLI::PositiveNumber);
    pphase_cmd->add_option("--a", pphase_args->a, "square coefficient")->required();
    pphase_cmd->add_option("--b", pphase_args->b, "linear coefficient")->required();
    pphase_cmd->add_flag("--half", pphase_args->half, "half-modulus family (even orders)");
    pphase_cmd->callback([&, pphase_args] { result = run_poly_phase(*pphase_args, common); });

    auto* nil_cmd = app.add_subcommand("nil", "finite quadratic nil-patterns");
    nil_cmd->require_subcommand(1);
    auto nil_args = std::make_shared<NilArgs>();
    auto nil_sub = [&](const char* name, const char* desc, bool morphism) {
        CLI::App* s = nil_cmd->add_subcommand(name, desc);
        add_common(s, common);
        s->add_option("pattern", nil_args->pattern, "nil-pattern file")->required();
        if (morphism)
            s->add_option("--morphism", nil_args->morphism, "coset table file")->required();
        return s;
    };
    nil_sub("validate", "check the pattern axioms", false)->callback([&, nil_args] {
        result = run_nil_validate(*nil_args, common);
    });
    nil_sub("core", "coset space of the pattern", false)->callback([&, nil_args] {
        result = run_nil_core(*nil_args, common);
    });
    CLI::App* epi_cmd = nil_sub("interpret-epi", "interpretation along a base quotient", false);
    epi_cmd->add_option("--kernel", nil_args->kernel, "subgroup elements, comma separated")
        ->required();
    epi_cmd->callback([&, nil_args] { result = run_nil_interpret_epi(*nil_args, common); });
    CLI::App* mono_cmd =
        nil_sub("interpret-mono", "interpretation along a base embedding", false);
    mono_cmd->add_option("--target", nil_args->target, "target cyclic factors")->required();
    mono_cmd->add_option("--images", nil_args->images, "generator images, comma separated")
        ->required();
    mono_cmd->callback([&, nil_args] { result = run_nil_interpret_mono(*nil_args, common); });
    nil_sub("verify", "check a coset table against the defining identity", true)
        ->callback([&, nil_args] { result = run_nil_verify(*nil_args, common); });
    nil_sub("lift", "lift a verified table over its first-degree part", true)
        ->callback([&, nil_args] { result = run_nil_lift(*nil_args, common); });
    nil_sub("split", "split-extension certificate of a verified table", true)
        ->callback([&, nil_args] { result = run_nil_split(*nil_args, common); });

    auto* hom_cmd = app.add_subcommand("hom", "almost-homomorphism correction");
    hom_cmd->require_subcommand(1);
    auto hom_args = std::make_shared<HomArgs>();
    auto* hcorrect_cmd = hom_cmd->add_subcommand("correct", "erase the defect of a table");
    add_common(hcorrect_cmd, common);
    hcorrect_cmd->add_option("--eps", hom_args->eps, "defect bound")
        ->required()
        ->check(CLI::PositiveNumber);
    hcorrect_cmd->add_option("file", hom_args->file, "almost-homomorphism table file")
        ->required();
    hcorrect_cmd->callback([&, hom_args] { result = run_hom_correct(*hom_args, common); });
    auto* heps_cmd = hom_cmd->add_subcommand("eps-linear", "affine recovery of a tuple table");
    add_common(heps_cmd, common);
    heps_cmd->add_option("--eps", hom_args->eps, "difference concentration bound")
        ->required()
        ->check(CLI::PositiveNumber);
    heps_cmd->add_option("file", hom_args->file, "tuple table file")->required();
    heps_cmd->callback([&, hom_args] { result = run_hom_eps_linear(*hom_args, common); });

    auto* decomp_cmd = app.add_subcommand("decomp", "quadratic structure decomposition");
    decomp_cmd->require_subcommand(1);
    auto* drun_cmd = decomp_cmd->add_subcommand("run", "greedy phase decomposition");
    add_common(drun_cmd, common);
    auto drun_args = std::make_shared<DecompRunArgs>();
    drun_cmd->add_option("--eps", drun_args->eps, "discard budget")
        ->required()
        ->check(CLI::NonNegativeNumber);
    drun_cmd->add_option("--theta", drun_args->theta, "correlation threshold")
        ->required()
        ->check(CLI::PositiveNumber);
    drun_cmd->add_option("--budget", drun_args->rounds, "round budget")
        ->required()
        ->check(CLI::NonNegativeNumber);
    drun_cmd->add_option("file", drun_args->file, "function file")->required();
    drun_cmd->callback([&, drun_args] { result = run_decomp_run(*drun_args, common); });
    auto* dcorr_cmd = decomp_cmd->add_subcommand("correlate", "correlation scans");
    add_common(dcorr_cmd, common);
    auto dcorr_args = std::make_shared<DecompCorrelateArgs>();
    dcorr_cmd->add_option("file", dcorr_args->file, "function file")->required();
    dcorr_cmd->add_option("--features", dcorr_args->features, "feature list file");
    dcorr_cmd->add_option("--delta", dcorr_args->delta, "correlation threshold")
        ->each([dcorr_args](const std::string&) { dcorr_args->delta_given = true; });
    dcorr_cmd->add_flag("--twisted", dcorr_args->twisted, "allow a linear character twist");
    dcorr_cmd->callback([&, dcorr_args] { result = run_decomp_correlate(*dcorr_args, common); });

    auto* spectrum_cmd = app.add_subcommand("spectrum", "dominant Fourier coefficients");
    add_common(spectrum_cmd, common);
    auto spectrum_args = std::make_shared<SpectrumArgs>();
    spectrum_cmd->add_option("file", spectrum_args->file, "function file");
    spectrum_cmd->add_option("--json", spectrum_args->json, "function file (flag form)");
    spectrum_cmd->add_option("--tau", spectrum_args->tau, "magnitude threshold")
        ->required()
        ->check(CLI::NonNegativeNumber);
    spectrum_cmd->add_option("--group", spectrum_args->group, "expected cyclic factors");
    spectrum_cmd->callback([&, spectrum_args] { result = run_spectrum(*spectrum_args, common); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "hofa: " << e.what() << '\n';
        return 2;
    } catch (const resource_error& e) {
        std::cerr << "hofa: " << e.what() << '\n';
        return 3;
    } catch (const internal_error& e) {
        std::cerr << "hofa: internal error: " << e.what() << '\n';
        return 4;
    } catch (const validation_error& e) {
        std::cerr << "hofa: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "hofa: internal error: " << e.what() << '\n';
        return 4;
    }
    return result;
}
