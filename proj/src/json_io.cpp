#include "hofa/json_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>

#include <json.hpp>

namespace hofa {

namespace {

using njson = nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw validation_error(where + ": " + msg);
}

njson load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(path, "cannot open the file");
    try {
        return njson::parse(in);
    } catch (const njson::parse_error& e) {
        fail(path, std::string("not valid JSON: ") + e.what());
    }
}

/// Object shape check: every required key present, nothing outside the
/// required and optional lists.
void require_keys(const njson& j, const std::string& where,
                  std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional) {
    if (!j.is_object()) fail(where, "expected a JSON object");
    for (const char* k : required)
        if (!j.contains(k)) fail(where, std::string("missing required key \"") + k + "\"");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : required) known = known || it.key() == k;
        for (const char* k : optional) known = known || it.key() == k;
        if (!known) fail(where, "unknown key \"" + it.key() + "\"");
    }
}

long long get_int(const njson& v, const std::string& where, const char* what) {
    if (!v.is_number_integer()) fail(where, std::string(what) + " must be an integer");
    return v.get<long long>();
}

FiniteAbelianGroup get_group(const njson& v, const std::string& where, const char* what) {
    if (!v.is_array() || v.empty())
        fail(where, std::string(what) + " must be a nonempty array of positive integers");
    std::vector<long long> fs;
    fs.reserve(v.size());
    for (const njson& e : v) {
        long long n = get_int(e, where, what);
        if (n < 1) fail(where, std::string(what) + " must list positive cyclic factors");
        fs.push_back(n);
    }
    return FiniteAbelianGroup(std::move(fs));
}

Angle get_angle(const njson& v, const std::string& where) {
    if (v.is_number()) return Angle::real(v.get<double>());
    if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
        long long p = v[0].get<long long>();
        long long q = v[1].get<long long>();
        if (q == 0) fail(where, "an exact angle needs a nonzero denominator");
        return Angle::rational(p, q);
    }
    fail(where, "angles are plain numbers or [numerator, denominator] integer pairs");
}

cplx get_complex(const njson& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        fail(where, "complex values are [real, imaginary] number pairs");
    return {v[0].get<double>(), v[1].get<double>()};
}

/// "(i,j)" in canonical form with both components inside [0, bound).
std::pair<long long, long long> parse_pair_key(const std::string& key, const std::string& where,
                                               long long bound) {
    long long i = 0, j = 0;
    char close = 0;
    if (std::sscanf(key.c_str(), "(%lld,%lld%c", &i, &j, &close) != 3 || close != ')' ||
        key != "(" + std::to_string(i) + "," + std::to_string(j) + ")")
        fail(where, "key \"" + key + "\" is not in canonical \"(i,j)\" form");
    if (i < 0 || i >= bound || j < 0 || j >= bound)
        fail(where, "key \"" + key + "\" is out of range for order " + std::to_string(bound));
    return {i, j};
}

/// Core of the function file format; the caller has already screened the
/// key set, leaving the group plus exactly one of values and angles.
ParsedFunction function_from(const njson& j, const std::string& where) {
    bool has_values = j.contains("values");
    bool has_angles = j.contains("angles");
    if (has_values == has_angles)
        fail(where, "exactly one of \"values\" and \"angles\" is required");
    FiniteAbelianGroup g = get_group(j.at("group"), where, "\"group\"");
    const std::size_t n = static_cast<std::size_t>(g.order());

    if (has_values) {
        const njson& vv = j.at("values");
        if (!vv.is_array() || vv.size() != n)
            fail(where, "\"values\" must hold exactly " + std::to_string(n) + " entries");
        std::vector<cplx> vals;
        vals.reserve(n);
        for (const njson& e : vv) vals.push_back(get_complex(e, where));
        GroupFunction f(g, std::move(vals));
        return {std::move(g), std::move(f), std::nullopt};
    }

    const njson& av = j.at("angles");
    if (!av.is_array() || av.size() != n)
        fail(where, "\"angles\" must hold exactly " + std::to_string(n) + " entries");
    std::vector<Angle> angles;
    angles.reserve(n);
    for (const njson& e : av) angles.push_back(get_angle(e, where));
    UnimodularFunction u(g, std::move(angles));
    GroupFunction f = u.to_function();
    return {std::move(g), std::move(f), std::move(u)};
}

std::string mask_key(unsigned mask, int k) {
    std::string key(static_cast<std::size_t>(k), '0');
    for (int b = 0; b < k; ++b)
        if (mask & (1u << (k - 1 - b))) key[static_cast<std::size_t>(b)] = '1';
    return key;
}

} // namespace

Report Report::object() {
    Report r;
    r.kind_ = Kind::object_value;
    return r;
}

Report Report::array() {
    Report r;
    r.kind_ = Kind::array_value;
    return r;
}

Report Report::str(std::string s) {
    Report r;
    r.kind_ = Kind::string_value;
    r.s_ = std::move(s);
    return r;
}

Report Report::num(double v) {
    Report r;
    r.kind_ = Kind::number_value;
    r.d_ = v;
    return r;
}

Report Report::integer(long long v) {
    Report r;
    r.kind_ = Kind::integer_value;
    r.i_ = v;
    return r;
}

Report Report::boolean(bool v) {
    Report r;
    r.kind_ = Kind::boolean_value;
    r.b_ = v;
    return r;
}

Report Report::null() { return Report(); }

Report Report::complex_pair(cplx v) {
    Report r = array();
    r.push(num(v.real()));
    r.push(num(v.imag()));
    return r;
}

Report Report::angle_value(const Angle& a) {
    if (!a.exact()) return num(a.value());
    Report r = array();
    r.push(integer(a.rat().num));
    r.push(integer(a.rat().den));
    return r;
}

Report Report::int_array(const std::vector<long long>& v) {
    Report r = array();
    for (long long x : v) r.push(integer(x));
    return r;
}

Report& Report::set(const std::string& key, Report v) {
    if (kind_ != Kind::object_value) throw internal_error("report key set on a non-object");
    fields_.emplace_back(key, std::move(v));
    return *this;
}

Report& Report::push(Report v) {
    if (kind_ != Kind::array_value) throw internal_error("report push on a non-array");
    items_.push_back(std::move(v));
    return *this;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
    out += '"';
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", static_cast<unsigned>(c));
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
}

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

} // namespace

void Report::write(std::string& out, int depth) const {
    switch (kind_) {
    case Kind::null_value: out += "null"; return;
    case Kind::boolean_value: out += b_ ? "true" : "false"; return;
    case Kind::integer_value: out += std::to_string(i_); return;
    case Kind::number_value: {
        if (!std::isfinite(d_)) throw internal_error("non-finite value in a report");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", d_);
        out += buf;
        return;
    }
    case Kind::string_value: write_escaped(out, s_); return;
    case Kind::array_value: {
        if (items_.empty()) {
            out += "[]";
            return;
        }
        bool flat = true;
        for (const Report& r : items_) flat = flat && r.scalar();
        if (flat) {
            out += '[';
            for (std::size_t i = 0; i < items_.size(); ++i) {
                if (i) out += ", ";
                items_[i].write(out, depth);
            }
            out += ']';
            return;
        }
        out += "[\n";
        for (std::size_t i = 0; i < items_.size(); ++i) {
            indent(out, depth + 1);
            items_[i].write(out, depth + 1);
            if (i + 1 < items_.size()) out += ',';
            out += '\n';
        }
        indent(out, depth);
        out += ']';
        return;
    }
    case Kind::object_value: {
        if (fields_.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            indent(out, depth + 1);
            write_escaped(out, fields_[i].first);
            out += ": ";
            fields_[i].second.write(out, depth + 1);
            if (i + 1 < fields_.size()) out += ',';
            out += '\n';
        }
        indent(out, depth);
        out += '}';
        return;
    }
    }
}

std::string Report::dump() const {
    std::string out;
    write(out, 0);
    return out;
}

ParsedFunction read_function_file(const std::string& path) {
    njson j = load(path);
    require_keys(j, path, {"group"}, {"values", "angles"});
    return function_from(j, path);
}

Report function_report(const GroupFunction& f) {
    Report r = Report::object();
    r.set("group", Report::int_array(f.group().factors()));
    Report vals = Report::array();
    for (const cplx& v : f.values()) vals.push(Report::complex_pair(v));
    r.set("values", std::move(vals));
    return r;
}

Report function_report(const UnimodularFunction& f) {
    Report r = Report::object();
    r.set("group", Report::int_array(f.group().factors()));
    Report angles = Report::array();
    for (const Angle& a : f.angles()) angles.push(Report::angle_value(a));
    r.set("angles", std::move(angles));
    return r;
}

SystemInput read_system_file(const std::string& path) {
    njson j = load(path);
    require_keys(j, path, {"k", "functions"}, {});
    long long k = get_int(j.at("k"), path, "\"k\"");
    if (k < 1 || k > 20) fail(path, "\"k\" must lie in [1, 20]");
    const njson& fo = j.at("functions");
    if (!fo.is_object()) fail(path, "\"functions\" must map subset masks to file paths");
    const unsigned count = 1u << k;
    if (fo.size() != count)
        fail(path, "\"functions\" must hold exactly " + std::to_string(count) + " entries");
    std::filesystem::path base = std::filesystem::path(path).parent_path();

    std::vector<GroupFunction> fs;
    fs.reserve(count);
    for (unsigned mask = 0; mask < count; ++mask) {
        std::string key = mask_key(mask, static_cast<int>(k));
        if (!fo.contains(key)) fail(path, "missing function for mask \"" + key + "\"");
        const njson& pv = fo.at(key);
        if (!pv.is_string()) fail(path, "mask \"" + key + "\" must name a function file");
        std::filesystem::path member(pv.get<std::string>());
        if (!member.is_absolute()) member = base / member;
        ParsedFunction p = read_function_file(member.string());
        if (!fs.empty() && p.group != fs.front().group())
            fail(path, "mask \"" + key + "\" lives on a different group than mask \"" +
                           mask_key(0, static_cast<int>(k)) + "\"");
        fs.push_back(std::move(p.values));
    }
    return {static_cast<int>(k), FunctionSystem(static_cast<int>(k), std::move(fs))};
}

CubeInput read_cube_file(const std::string& path) {
    njson j = load(path);
    require_keys(j, path, {"d", "group", "labels"}, {});
    long long d = get_int(j.at("d"), path, "\"d\"");
    if (d < 1 || d > 20) fail(path, "\"d\" must lie in [1, 20]");
    FiniteAbelianGroup g = get_group(j.at("group"), path, "\"group\"");
    const njson& lv = j.at("labels");
    const std::size_t n = static_cast<std::size_t>(1) << d;
    if (!lv.is_array() || lv.size() != n)
        fail(path, "\"labels\" must hold exactly " + std::to_string(n) + " entries");
    std::vector<long long> labels;
    labels.reserve(n);
    for (const njson& e : lv) {
        long long v = get_int(e, path, "every label");
        if (v < 0 || v >= g.order()) fail(path, "every label must be a group element index");
        labels.push_back(v);
    }
    return {static_cast<int>(d), std::move(g), std::move(labels)};
}

NilPattern read_pattern_file(const std::string& path, const RunConfig& cfg) {
    njson j = load(path);
    require_keys(j, path, {"T", "Zm"}, {"cocycle"});
    FiniteAbelianGroup t = get_group(j.at("T"), path, "\"T\"");
    long long m = get_int(j.at("Zm"), path, "\"Zm\"");
    if (m < 1) fail(path, "\"Zm\" must be a positive integer");
    const long long nt = t.order();
    std::vector<long long> wt(static_cast<std::size_t>(nt * nt), 0);
    std::vector<long long> wz(static_cast<std::size_t>(nt * nt), 0);
    if (j.contains("cocycle")) {
        const njson& co = j.at("cocycle");
        if (!co.is_object()) fail(path, "\"cocycle\" must map \"(i,j)\" keys to [t, z] pairs");
        for (auto it = co.begin(); it != co.end(); ++it) {
            auto [i, jj] = parse_pair_key(it.key(), path, nt);
            const njson& v = it.value();
            if (!v.is_array() || v.size() != 2)
                fail(path, "cocycle values are [t, z] integer pairs");
            long long tv = get_int(v[0], path, "the cocycle t component");
            long long zv = get_int(v[1], path, "the cocycle z component");
            if (tv < 0 || tv >= nt) fail(path, "the cocycle t component must index the base group");
            if (zv < 0 || zv >= m) fail(path, "the cocycle z component must lie in [0, Zm)");
            wt[static_cast<std::size_t>(i * nt + jj)] = tv;
            wz[static_cast<std::size_t>(i * nt + jj)] = zv;
        }
    }
    return make_nilpattern(std::move(t), m, std::move(wt), std::move(wz), cfg);
}

Report pattern_report(const NilPattern& n) {
    Report r = Report::object();
    r.set("T", Report::int_array(n.base().factors()));
    r.set("Zm", Report::integer(n.circle_order()));
    Report co = Report::object();
    const long long nt = n.base().order();
    for (long long i = 0; i < nt; ++i)
        for (long long j = 0; j < nt; ++j) {
            long long tv = n.omega_t(i, j);
            long long zv = n.omega_z(i, j);
            if (tv == 0 && zv == 0) continue;
            Report pair = Report::array();
            pair.push(Report::integer(tv));
            pair.push(Report::integer(zv));
            co.set("(" + std::to_string(i) + "," + std::to_string(j) + ")", std::move(pair));
        }
    r.set("cocycle", std::move(co));
    return r;
}

MorphismInput read_morphism_file(const std::string& path) {
    njson j = load(path);
    require_keys(j, path, {"domain", "psi"}, {});
    FiniteAbelianGroup domain = get_group(j.at("domain"), path, "\"domain\"");
    const njson& pv = j.at("psi");
    const std::size_t n = static_cast<std::size_t>(domain.order());
    if (!pv.is_array() || pv.size() != n)
        fail(path, "\"psi\" must hold exactly " + std::to_string(n) + " coset indices");
    std::vector<long long> psi;
    psi.reserve(n);
    for (const njson& e : pv) {
        long long v = get_int(e, path, "every psi entry");
        if (v < 0) fail(path, "every psi entry must be a nonnegative coset index");
        psi.push_back(v);
    }
    return {std::move(domain), std::move(psi)};
}

HomTableInput read_hom_table_file(const std::string& path) {
    njson j = load(path);
    require_keys(j, path, {"A", "B", "values"}, {"cocycle"});
    FiniteAbelianGroup a = get_group(j.at("A"), path, "\"A\"");
    FiniteAbelianGroup b = get_group(j.at("B"), path, "\"B\"");
    const long long nb = b.order();
    bool exact = true;

    std::vector<Angle> cocycle(static_cast<std::size_t>(nb * nb), Angle());
    if (j.contains("cocycle")) {
        const njson& co = j.at("cocycle");
        if (!co.is_object()) fail(path, "\"cocycle\" must map \"(i,j)\" keys to angles");
        for (auto it = co.begin(); it != co.end(); ++it) {
            auto [x, y] = parse_pair_key(it.key(), path, nb);
            Angle v = get_angle(it.value(), path);
            exact = exact && v.exact();
            cocycle[static_cast<std::size_t>(x * nb + y)] = v;
        }
    }

    const njson& vals = j.at("values");
    const long long na = a.order();
    if (!vals.is_object() || vals.size() != static_cast<std::size_t>(na))
        fail(path, "\"values\" must hold exactly " + std::to_string(na) + " entries");
    std::vector<ExtElement> h;
    h.reserve(static_cast<std::size_t>(na));
    for (long long x = 0; x < na; ++x) {
        std::string key = std::to_string(x);
        if (!vals.contains(key)) fail(path, "missing value for domain index " + key);
        const njson& e = vals.at(key);
        if (!e.is_array() || e.size() != 2)
            fail(path, "table values are [base index, angle] pairs");
        long long bi = get_int(e[0], path, "every base index");
        if (bi < 0 || bi >= nb) fail(path, "every base index must index B");
        Angle theta = get_angle(e[1], path);
        exact = exact && theta.exact();
        h.push_back({bi, theta});
    }
    return {std::move(a), std::move(b), std::move(cocycle), std::move(h), exact};
}

Report hom_table_report(const FiniteAbelianGroup& domain, const CircleExtension& target,
                        const std::vector<ExtElement>& h) {
    Report r = Report::object();
    r.set("A", Report::int_array(domain.factors()));
    r.set("B", Report::int_array(target.base().factors()));
    Report vals = Report::object();
    for (std::size_t x = 0; x < h.size(); ++x) {
        Report pair = Report::array();
        pair.push(Report::integer(h[x].b));
        pair.push(Report::angle_value(h[x].theta));
        vals.set(std::to_string(x), std::move(pair));
    }
    r.set("values", std::move(vals));
    Report co = Report::object();
    const long long nb = target.base().order();
    for (long long x = 0; x < nb; ++x)
        for (long long y = 0; y < nb; ++y) {
            const Angle& v = target.cocycle(x, y);
            if (v.value() == 0.0) continue;
            co.set("(" + std::to_string(x) + "," + std::to_string(y) + ")",
                   Report::angle_value(v));
        }
    r.set("cocycle", std::move(co));
    return r;
}

EpsLinearInput read_eps_linear_file(const std::string& path) {
    njson j = load(path);
    require_keys(j, path, {"A", "k", "values"}, {});
    FiniteAbelianGroup a = get_group(j.at("A"), path, "\"A\"");
    long long k = get_int(j.at("k"), path, "\"k\"");
    if (k < 1 || k > 64) fail(path, "\"k\" must lie in [1, 64]");
    const njson& vals = j.at("values");
    const long long na = a.order();
    if (!vals.is_object() || vals.size() != static_cast<std::size_t>(na))
        fail(path, "\"values\" must hold exactly " + std::to_string(na) + " entries");
    bool exact = true;
    std::vector<std::vector<Angle>> table;
    table.reserve(static_cast<std::size_t>(na));
    for (long long x = 0; x < na; ++x) {
        std::string key = std::to_string(x);
        if (!vals.contains(key)) fail(path, "missing value for domain index " + key);
        const njson& row = vals.at(key);
        if (!row.is_array() || row.size() != static_cast<std::size_t>(k))
            fail(path, "every value must hold exactly " + std::to_string(k) + " angles");
        std::vector<Angle> angles;
        angles.reserve(static_cast<std::size_t>(k));
        for (const njson& e : row) {
            Angle v = get_angle(e, path);
            exact = exact && v.exact();
            angles.push_back(v);
        }
        table.push_back(std::move(angles));
    }
    return {std::move(a), static_cast<int>(k), std::move(table), exact};
}

std::vector<Feature> read_features_file(const std::string& path) {
    njson j = load(path);
    require_keys(j, path, {"features"}, {});
    const njson& fv = j.at("features");
    if (!fv.is_array() || fv.empty())
        fail(path, "\"features\" must be a nonempty array of tagged functions");
    std::vector<Feature> out;
    out.reserve(fv.size());
    for (std::size_t i = 0; i < fv.size(); ++i) {
        std::string where = path + ": features[" + std::to_string(i) + "]";
        const njson& e = fv[i];
        require_keys(e, where, {"tag", "group"}, {"values", "angles"});
        if (!e.at("tag").is_string() || e.at("tag").get<std::string>().empty())
            fail(where, "\"tag\" must be a nonempty string");
        ParsedFunction p = function_from(e, where);
        out.push_back({e.at("tag").get<std::string>(), std::move(p.values)});
    }
    return out;
}

FiniteAbelianGroup parse_group_factors(const std::string& spec) {
    std::vector<long long> fs;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        std::size_t comma = spec.find(',', pos);
        if (comma == std::string::npos) comma = spec.size();
        long long value = 0;
        const char* first = spec.data() + pos;
        const char* last = spec.data() + comma;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last || value < 1)
            throw validation_error("the group argument \"" + spec +
                                   "\" must be comma separated positive cyclic factors");
        fs.push_back(value);
        pos = comma + 1;
    }
    return FiniteAbelianGroup(std::move(fs));
}

} // namespace hofa
