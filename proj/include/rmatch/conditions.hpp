#pragma once

#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rmatch/hypergraph.hpp"
#include "rmatch/rational.hpp"

namespace rmatch {

struct InvalidSides : Error { using Error::Error; };
struct InvalidSubset : Error { using Error::Error; };
struct UnsupportedArity : Error { using Error::Error; };

enum class ConditionName {
    MainDegree,    // strict side: every co-(r-1)-tuple degree > n/2; weak side: >= n/2
    KoThreshold,   // every (r-1)-tuple degree >= n/2 + sqrt(2 n ln n)
    ITuple,        // I-tuples > n^{r-|I|}/2 and I^c-tuples >= n^{|I|}/2
    Fractional,    // every non-edge z: d(z|I)/n^{r-|I|} + d(z|I^c)/n^{|I|} >= 1
    VertexDegree,  // every vertex degree >= fraction * n^{r-1}
    Latin,         // every legal 2-tuple degree exactly 1
};

inline const char* condition_name_str(ConditionName c) {
    switch (c) {
        case ConditionName::MainDegree: return "main";
        case ConditionName::KoThreshold: return "ko";
        case ConditionName::ITuple: return "ituple";
        case ConditionName::Fractional: return "fractional";
        case ConditionName::VertexDegree: return "vertex";
        case ConditionName::Latin: return "latin";
    }
    return "?";
}

enum class Cmp { Greater, GreaterEqual, Equal };

inline const char* cmp_str(Cmp c) {
    switch (c) {
        case Cmp::Greater: return ">";
        case Cmp::GreaterEqual: return ">=";
        case Cmp::Equal: return "=";
    }
    return "?";
}

struct Violation {
    PartialTuple tuple;
    Rational observed;  // degree, or the normalized-degree sum for Fractional
    Cmp cmp = Cmp::GreaterEqual;
    Rational bound;
    // Set only for the floating-point KO threshold.
    std::optional<double> float_bound;
};

struct ConditionReport {
    ConditionName condition_name = ConditionName::MainDegree;
    bool holds = false;
    std::vector<Violation> violations;
    /// Worst (in-part, out-part) normalized degrees for the fractional check.
    std::optional<std::pair<Rational, Rational>> normalized_degrees;
    std::optional<PartialTuple> worst_tuple;
    std::vector<std::string> notes;
};

struct ConditionViolated : Error {
    ConditionReport report;
    explicit ConditionViolated(ConditionReport rep)
        : Error(std::string("condition does not hold: ") +
                condition_name_str(rep.condition_name)),
          report(std::move(rep)) {}
};

/// Line-oriented report form: a verdict line, then one VIOLATION line per
/// witness (capped at 20) and a TOTAL line when any exist.
inline std::string to_text(const ConditionReport& rep) {
    std::ostringstream out;
    out << "CONDITION " << condition_name_str(rep.condition_name) << ' '
        << (rep.holds ? "HOLDS" : "FAILS") << '\n';
    for (const std::string& note : rep.notes) out << "NOTE " << note << '\n';
    std::size_t shown = 0;
    for (const Violation& v : rep.violations) {
        if (shown == 20) break;
        ++shown;
        out << "VIOLATION " << v.tuple.to_string() << " d=";
        if (denominator(v.observed) == 1) out << numerator(v.observed).str();
        else out << to_fraction_string(v.observed);
        out << " need" << cmp_str(v.cmp);
        if (v.float_bound) out << *v.float_bound;
        else out << to_fraction_string(v.bound);
        out << '\n';
    }
    if (!rep.violations.empty())
        out << "TOTAL " << rep.violations.size() << " violations\n";
    return out.str();
}

namespace detail {

inline std::vector<int> complement_sides(int r, const std::vector<int>& sides) {
    std::vector<char> in(r, 0);
    for (int s : sides) in[s] = 1;
    std::vector<int> out;
    for (int s = 0; s < r; ++s)
        if (!in[s]) out.push_back(s);
    return out;
}

inline std::vector<int> checked_subset(const Hypergraph& h, std::vector<int> sides) {
    std::sort(sides.begin(), sides.end());
    if (std::unique(sides.begin(), sides.end()) != sides.end())
        throw InvalidSubset("repeated side in subset");
    for (int s : sides)
        if (s < 0 || s >= h.side_count()) throw InvalidSubset("side out of range");
    if (sides.empty() || static_cast<int>(sides.size()) == h.side_count())
        throw InvalidSubset("subset must be proper and nonempty");
    return sides;
}

}  // namespace detail

/// Every legal (r-1)-tuple avoiding strict_side must have degree > n/2, and
/// every one avoiding weak_side degree >= n/2. Comparisons are exact (2d vs n).
inline ConditionReport check_main_condition(const Hypergraph& h, int strict_side,
                                            int weak_side) {
    if (strict_side == weak_side) throw InvalidSides("strict and weak side coincide");
    if (strict_side < 0 || strict_side >= h.side_count() || weak_side < 0 ||
        weak_side >= h.side_count())
        throw InvalidSides("side out of range");
    ConditionReport rep;
    rep.condition_name = ConditionName::MainDegree;
    const long long n = h.side_size();
    const Rational half_n(n, 2);
    auto scan = [&](int avoided, Cmp cmp) {
        auto sides = detail::complement_sides(h.side_count(), {avoided});
        for_each_legal_tuple(h.side_count(), h.side_size(), sides,
                             [&](const PartialTuple& t) {
                                 long long d = h.degree(t);
                                 bool ok = cmp == Cmp::Greater ? (2 * d > n) : (2 * d >= n);
                                 if (!ok)
                                     rep.violations.push_back(
                                         Violation{t, Rational(d), cmp, half_n, {}});
                             });
    };
    scan(strict_side, Cmp::Greater);
    scan(weak_side, Cmp::GreaterEqual);
    rep.notes.push_back("strict_side=" + std::to_string(strict_side) +
                        " weak_side=" + std::to_string(weak_side));
    rep.holds = rep.violations.empty();
    return rep;
}

/// Degree >= n/2 + sqrt(2 n ln n) for every legal (r-1)-tuple, any avoided
/// side. Informational: the threshold is evaluated in floating point with the
/// natural logarithm, and degrees within 1 ulp of it are flagged.
inline ConditionReport check_ko_threshold(const Hypergraph& h) {
    ConditionReport rep;
    rep.condition_name = ConditionName::KoThreshold;
    const double n = static_cast<double>(h.side_size());
    const double threshold = n / 2.0 + std::sqrt(2.0 * n * std::log(n));
    rep.notes.push_back("threshold=" + std::to_string(threshold) + " log=natural");
    bool guard_band = false;
    for (int avoided = 0; avoided < h.side_count(); ++avoided) {
        auto sides = detail::complement_sides(h.side_count(), {avoided});
        for_each_legal_tuple(h.side_count(), h.side_size(), sides,
                             [&](const PartialTuple& t) {
                                 double d = static_cast<double>(h.degree(t));
                                 double lo = std::nextafter(threshold, -1.0);
                                 double hi = std::nextafter(threshold, threshold + 1.0);
                                 if (d >= lo && d <= hi) guard_band = true;
                                 if (d < threshold)
                                     rep.violations.push_back(Violation{
                                         t, Rational(h.degree(t)), Cmp::GreaterEqual,
                                         Rational(0), threshold});
                             });
    }
    if (guard_band) rep.notes.push_back("degrees within 1 ulp of the threshold");
    rep.holds = rep.violations.empty();
    return rep;
}

/// Every I-tuple degree > n^{r-|I|}/2 and every I^c-tuple degree >= n^{|I|}/2.
inline ConditionReport check_itupl_condition(const Hypergraph& h, std::vector<int> I) {
    I = detail::checked_subset(h, std::move(I));
    ConditionReport rep;
    rep.condition_name = ConditionName::ITuple;
    const auto comp = detail::complement_sides(h.side_count(), I);
    const BigInt n(h.side_size());
    auto scan = [&](const std::vector<int>& sides, unsigned codim, Cmp cmp) {
        const BigInt full = int_pow(n, codim);
        const Rational bound(full, 2);
        for_each_legal_tuple(h.side_count(), h.side_size(), sides,
                             [&](const PartialTuple& t) {
                                 BigInt d2 = BigInt(h.degree(t)) * 2;
                                 bool ok = cmp == Cmp::Greater ? (d2 > full) : (d2 >= full);
                                 if (!ok)
                                     rep.violations.push_back(Violation{
                                         t, Rational(h.degree(t)), cmp, bound, {}});
                             });
    };
    scan(I, static_cast<unsigned>(comp.size()), Cmp::Greater);
    scan(comp, static_cast<unsigned>(I.size()), Cmp::GreaterEqual);
    rep.holds = rep.violations.empty();
    return rep;
}

/// For every legal r-tuple z outside the edge set,
/// d(z|I)/n^{r-|I|} + d(z|I^c)/n^{|I|} must be >= 1 (or > 1 when strict).
inline ConditionReport check_fractional_condition(const Hypergraph& h,
                                                  std::vector<int> I,
                                                  bool strict = false) {
    I = detail::checked_subset(h, std::move(I));
    ConditionReport rep;
    rep.condition_name = ConditionName::Fractional;
    const auto comp = detail::complement_sides(h.side_count(), I);
    const int r = h.side_count();
    const BigInt n(h.side_size());
    const BigInt in_norm = int_pow(n, static_cast<unsigned>(comp.size()));
    const BigInt out_norm = int_pow(n, static_cast<unsigned>(I.size()));
    std::vector<int> all_sides(r);
    for (int s = 0; s < r; ++s) all_sides[s] = s;
    std::optional<Rational> worst_sum;
    Edge buf(r);
    for_each_legal_tuple(r, h.side_size(), all_sides, [&](const PartialTuple& z) {
        for (int s = 0; s < r; ++s) buf[s] = z.at(s);
        if (h.has_edge(buf)) return;
        Rational in_ratio(h.degree(z.restricted_to(I)), in_norm);
        Rational out_ratio(h.degree(z.restricted_to(comp)), out_norm);
        Rational sum = in_ratio + out_ratio;
        if (!worst_sum || sum < *worst_sum) {
            worst_sum = sum;
            rep.worst_tuple = z;
            rep.normalized_degrees = std::make_pair(in_ratio, out_ratio);
        }
        bool ok = strict ? (sum > 1) : (sum >= 1);
        if (!ok)
            rep.violations.push_back(Violation{
                z, sum, strict ? Cmp::Greater : Cmp::GreaterEqual, Rational(1), {}});
    });
    if (!rep.worst_tuple) rep.notes.push_back("no non-edges; vacuously true");
    rep.holds = rep.violations.empty();
    return rep;
}

/// Every vertex degree >= fraction * n^{r-1}, exact rational comparison.
inline ConditionReport check_vertex_degree(const Hypergraph& h, const Rational& fraction) {
    if (fraction < 0 || fraction > 1)
        throw InvalidQuery("fraction must lie in [0, 1]");
    ConditionReport rep;
    rep.condition_name = ConditionName::VertexDegree;
    rep.notes.push_back("fraction=" + to_fraction_string(fraction));
    const Rational bound =
        fraction * Rational(int_pow(BigInt(h.side_size()),
                                    static_cast<unsigned>(h.side_count() - 1)));
    for (int s = 0; s < h.side_count(); ++s) {
        for_each_legal_tuple(h.side_count(), h.side_size(), {s},
                             [&](const PartialTuple& t) {
                                 Rational d(h.degree(t));
                                 if (d < bound)
                                     rep.violations.push_back(Violation{
                                         t, d, Cmp::GreaterEqual, bound, {}});
                             });
    }
    rep.holds = rep.violations.empty();
    return rep;
}

/// Tripartite only: every legal 2-tuple (on any pair of sides) has degree 1.
inline ConditionReport check_latin_property(const Hypergraph& h) {
    if (h.side_count() != 3)
        throw UnsupportedArity("latin check requires exactly 3 sides");
    ConditionReport rep;
    rep.condition_name = ConditionName::Latin;
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            for_each_legal_tuple(3, h.side_size(), {a, b},
                                 [&](const PartialTuple& t) {
                                     long long d = h.degree(t);
                                     if (d != 1)
                                         rep.violations.push_back(Violation{
                                             t, Rational(d), Cmp::Equal, Rational(1), {}});
                                 });
        }
    }
    rep.holds = rep.violations.empty();
    return rep;
}

}  // namespace rmatch
