#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hofa/almosthom.hpp"
#include "hofa/angle.hpp"
#include "hofa/config.hpp"
#include "hofa/decompose.hpp"
#include "hofa/function.hpp"
#include "hofa/gowers.hpp"
#include "hofa/group.hpp"
#include "hofa/nilpattern.hpp"
#include "hofa/polydeg.hpp"

namespace hofa {

/**
 * JSON value tree for machine-readable reports.  Object keys keep their
 * insertion order and floats are printed with 17 significant digits, so a
 * report built from the same data is always the same bytes.  Building is
 * write-only; misuse (pushing onto a non-array, setting a key on a
 * non-object) is a programming error and throws internal_error.
 */
class Report {
public:
    Report() : kind_(Kind::null_value) {}

    static Report object();
    static Report array();
    static Report str(std::string s);
    static Report num(double v);
    static Report integer(long long v);
    static Report boolean(bool v);
    static Report null();

    /// [re, im]
    static Report complex_pair(cplx v);
    /// [num, den] when the angle is exact, a plain number otherwise.
    static Report angle_value(const Angle& a);
    static Report int_array(const std::vector<long long>& v);

    Report& set(const std::string& key, Report v);
    Report& push(Report v);

    /// Two-space indented text without a trailing newline.  Arrays whose
    /// elements are all scalar stay on one line.
    std::string dump() const;

private:
    enum class Kind { null_value, boolean_value, integer_value, number_value, string_value, array_value, object_value };

    void write(std::string& out, int depth) const;
    bool scalar() const { return kind_ != Kind::array_value && kind_ != Kind::object_value; }

    Kind kind_;
    bool b_ = false;
    long long i_ = 0;
    double d_ = 0.0;
    std::string s_;
    std::vector<Report> items_;
    std::vector<std::pair<std::string, Report>> fields_;
};

/**
 * Function file: {"group": [n1, ..., nr]} plus exactly one of
 *   "values": [[re, im], ...]     dense complex values, or
 *   "angles": [t, [p, q], ...]    unit-modulus values as circle angles,
 * both in element-index order.  A plain number angle is a floating-point
 * position in turns; a [p, q] pair is the exact rational p/q.
 */
struct ParsedFunction {
    FiniteAbelianGroup group;
    GroupFunction values;
    /// Present when the file carried angles; exact() iff all were rational.
    std::optional<UnimodularFunction> phases;
};

ParsedFunction read_function_file(const std::string& path);

/// {"group", "values"} fragment in the function file format.
Report function_report(const GroupFunction& f);
/// {"group", "angles"} fragment in the function file format.
Report function_report(const UnimodularFunction& f);

/**
 * Function system file for the box operations:
 *   {"k": K, "functions": {"00": "path", "01": "path", ...}}.
 * Keys are the 2^K subset masks written in binary, most significant bit
 * first; bit i from the right selects the i-th shift coordinate.  Member
 * paths are resolved relative to the system file's directory.
 */
struct SystemInput {
    int k;
    FunctionSystem system;
};

SystemInput read_system_file(const std::string& path);

/// Cube labeling file: {"d": D, "group": [...], "labels": [...]} with one
/// group element index per vertex mask, 2^D in total.
struct CubeInput {
    int d;
    FiniteAbelianGroup group;
    std::vector<long long> labels;
};

CubeInput read_cube_file(const std::string& path);

/**
 * Nil-pattern file: {"T": [...], "Zm": m, "cocycle": {"(i,j)": [t, z], ...}}.
 * The cocycle maps character index pairs of T to elements of T x Z_m;
 * missing pairs default to the identity [0, 0].
 */
NilPattern read_pattern_file(const std::string& path, const RunConfig& cfg = RunConfig::from_env());

/// {"T", "Zm", "cocycle"} fragment in the nil-pattern file format, with
/// identity cocycle values omitted.
Report pattern_report(const NilPattern& n);

/// Coset-valued table file: {"domain": [...], "psi": [...]} with one coset
/// index per domain element.
struct MorphismInput {
    FiniteAbelianGroup domain;
    std::vector<long long> psi;
};

MorphismInput read_morphism_file(const std::string& path);

/**
 * Almost-homomorphism table file:
 *   {"A": [...], "B": [...], "values": {"0": [b, angle], ...},
 *    "cocycle": {"(i,j)": angle, ...}}
 * with one [base index, fiber angle] pair per domain index.  The optional
 * cocycle on B defaults to zero everywhere (the split extension).  Angles
 * follow the number-or-[p, q] convention of function files.
 */
struct HomTableInput {
    FiniteAbelianGroup domain;
    FiniteAbelianGroup base;
    std::vector<Angle> cocycle;
    std::vector<ExtElement> h;
    /// Every angle in the file was exact.
    bool exact = false;
};

HomTableInput read_hom_table_file(const std::string& path);

/// {"A", "B", "values", "cocycle"} fragment in the almost-homomorphism
/// table format; zero cocycle entries are omitted.
Report hom_table_report(const FiniteAbelianGroup& domain, const CircleExtension& target,
                        const std::vector<ExtElement>& h);

/// Tuple-valued table file: {"A": [...], "k": K, "values": {"0": [angle
/// per coordinate], ...}} with K angles per domain index.
struct EpsLinearInput {
    FiniteAbelianGroup domain;
    int k;
    std::vector<std::vector<Angle>> table;
    bool exact = false;
};

EpsLinearInput read_eps_linear_file(const std::string& path);

/// Feature list file: {"features": [{"tag": ..., "group": ..., "values" or
/// "angles": ...}, ...]} with every feature function inlined.
std::vector<Feature> read_features_file(const std::string& path);

/// Comma-separated cyclic factors of a command-line group argument.
FiniteAbelianGroup parse_group_factors(const std::string& spec);

} // namespace hofa
