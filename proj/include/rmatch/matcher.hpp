#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rmatch/conditions.hpp"
#include "rmatch/hypergraph.hpp"
#include "rmatch/oracle.hpp"

namespace rmatch {

struct NothingToContract : Error { using Error::Error; };

struct NoNearPerfectFound : Error { using Error::Error; };

/// Raised when an exchange search finds no candidate; the witness certifies
/// that the degree hypothesis was in fact violated.
struct HypothesisViolated : Error {
    PartialTuple witness;
    long long observed = 0;
    bool strict_part = true;  // true: needed > n/2, false: needed >= n/2
    HypothesisViolated(PartialTuple w, long long d, bool strict, int n)
        : Error("degree hypothesis violated at " + w.to_string() + ": d=" +
                std::to_string(d) + (strict ? " needs > " : " needs >= ") +
                std::to_string(n) + "/2"),
          witness(std::move(w)), observed(d), strict_part(strict) {}
};

/// Reduction data for r > 3: the middle sides are replaced by the identity
/// diagonal matching g_i = (i, i, ..., i) of their complete graph.
struct ContractionMap {
    int original_side_count = 0;
    int side_size = 0;

    Edge expand(const Edge& tri) const {
        Edge out(original_side_count, tri[1]);
        out[0] = tri[0];
        out[original_side_count - 1] = tri[2];
        return out;
    }
};

/// Collapses sides 1..r-2 onto the identity diagonal: image edge (x, i, y)
/// exists iff (x, i, i, ..., i, y) is an edge. The image keeps side 0 and
/// side r-1 in positions 0 and 2.
inline std::pair<Hypergraph, ContractionMap> contract_to_tripartite(const Hypergraph& h) {
    if (h.side_count() <= 3)
        throw NothingToContract("contraction needs more than 3 sides");
    const int r = h.side_count();
    std::vector<Edge> tri;
    for (const Edge& e : h.edges()) {
        bool diagonal = true;
        for (int s = 2; s < r - 1; ++s)
            if (e[s] != e[1]) {
                diagonal = false;
                break;
            }
        if (diagonal) tri.push_back(Edge{e[0], e[1], e[r - 1]});
    }
    return {Hypergraph(3, h.side_size(), std::move(tri)),
            ContractionMap{r, h.side_size()}};
}

/// Expands a perfect matching of the contracted image back to the original
/// side count.
inline Matching decontract_matching(const Hypergraph& image, const Matching& m,
                                    const ContractionMap& map) {
    MatchingCheck check = validate_matching(image, m);
    if (!check.valid || !check.perfect)
        throw InvalidMatching("input is not a perfect matching of the image");
    Matching out;
    for (const Edge& e : m.edges) out.edges.push_back(map.expand(e));
    out.canonicalize();
    return out;
}

struct NearPerfect {
    Matching matching;   // exactly n-1 edges
    Edge unmatched;      // the single free vertex on each side
};

/// Deterministic near-perfect construction: greedy by edge order, then
/// exchanges removing up to 2 matching edges to add one more, and finally a
/// budgeted exhaustive search. Fails loudly if even the search cannot reach
/// n-1 edges.
inline NearPerfect build_near_perfect(const Hypergraph& h,
                                      long long budget = kDefaultOracleBudget) {
    const int r = h.side_count();
    const int n = h.side_size();
    const int target = n - 1;
    std::vector<std::vector<char>> covered(r, std::vector<char>(n, 0));
    std::vector<Edge> m;

    auto is_free = [&](const Edge& e) {
        for (int s = 0; s < r; ++s)
            if (covered[s][e[s]]) return false;
        return true;
    };
    auto cover = [&](const Edge& e, char flag) {
        for (int s = 0; s < r; ++s) covered[s][e[s]] = flag;
    };
    auto take_free_edge = [&]() {
        for (const Edge& e : h.edges())
            if (is_free(e)) {
                cover(e, 1);
                m.push_back(e);
                return true;
            }
        return false;
    };
    auto free_edges = [&]() {
        std::vector<Edge> out;
        for (const Edge& e : h.edges())
            if (is_free(e)) out.push_back(e);
        return out;
    };
    auto disjoint = [&](const Edge& a, const Edge& b) {
        for (int s = 0; s < r; ++s)
            if (a[s] == b[s]) return false;
        return true;
    };

    while (static_cast<int>(m.size()) < target) {
        if (take_free_edge()) continue;

        // Remove one edge, add two.
        bool applied = false;
        std::sort(m.begin(), m.end());
        for (std::size_t i = 0; i < m.size() && !applied; ++i) {
            Edge removed = m[i];
            cover(removed, 0);
            auto pool = free_edges();
            for (std::size_t a = 0; a < pool.size() && !applied; ++a)
                for (std::size_t b = a + 1; b < pool.size() && !applied; ++b)
                    if (disjoint(pool[a], pool[b])) {
                        m.erase(m.begin() + static_cast<long>(i));
                        cover(pool[a], 1);
                        cover(pool[b], 1);
                        m.push_back(pool[a]);
                        m.push_back(pool[b]);
                        applied = true;
                    }
            if (!applied) cover(removed, 1);
        }
        if (applied) continue;

        // Remove two edges, add three.
        std::sort(m.begin(), m.end());
        for (std::size_t i = 0; i < m.size() && !applied; ++i) {
            for (std::size_t j = i + 1; j < m.size() && !applied; ++j) {
                Edge ri = m[i], rj = m[j];
                cover(ri, 0);
                cover(rj, 0);
                auto pool = free_edges();
                for (std::size_t a = 0; a < pool.size() && !applied; ++a)
                    for (std::size_t b = a + 1; b < pool.size() && !applied; ++b) {
                        if (!disjoint(pool[a], pool[b])) continue;
                        for (std::size_t c = b + 1; c < pool.size() && !applied; ++c) {
                            if (!disjoint(pool[a], pool[c]) || !disjoint(pool[b], pool[c]))
                                continue;
                            m.erase(m.begin() + static_cast<long>(j));
                            m.erase(m.begin() + static_cast<long>(i));
                            cover(pool[a], 1);
                            cover(pool[b], 1);
                            cover(pool[c], 1);
                            m.push_back(pool[a]);
                            m.push_back(pool[b]);
                            m.push_back(pool[c]);
                            applied = true;
                        }
                    }
                if (!applied) {
                    cover(ri, 1);
                    cover(rj, 1);
                }
            }
        }
        if (applied) continue;

        // Exhaustive fallback.
        OracleResult res = find_matching_of_size(h, target, budget);
        if (res.max_matching_size < target)
            throw NoNearPerfectFound(
                res.exact ? "no matching of size n-1 exists"
                          : "search budget exhausted before reaching size n-1");
        m.assign(res.witness.edges.begin(), res.witness.edges.begin() + target);
        for (auto& side : covered) std::fill(side.begin(), side.end(), 0);
        for (const Edge& e : m) cover(e, 1);
        break;
    }

    NearPerfect out;
    out.matching = Matching(std::move(m));
    out.unmatched.assign(r, 0);
    for (int s = 0; s < r; ++s)
        for (int v = 0; v < n; ++v)
            if (!covered[s][v]) out.unmatched[s] = v;
    return out;
}

struct AugmentationTrace {
    enum class Tag { Case1, Case2a, Case2b, Case3Direct, Case3Recount };
    Tag tag = Tag::Case1;
    int pivot = 0;  // the side-0 vertex w
    std::vector<Edge> removed;
    std::vector<Edge> added;
    // The named exchange edges, for replay diagnostics (empty when unused).
    Edge edge_f, edge_g, edge_e;
};

inline const char* trace_tag_str(AugmentationTrace::Tag t) {
    switch (t) {
        case AugmentationTrace::Tag::Case1: return "case1";
        case AugmentationTrace::Tag::Case2a: return "case2a";
        case AugmentationTrace::Tag::Case2b: return "case2b";
        case AugmentationTrace::Tag::Case3Direct: return "case3direct";
        case AugmentationTrace::Tag::Case3Recount: return "case3recount";
    }
    return "?";
}

inline std::optional<AugmentationTrace::Tag> trace_tag_from(const std::string& s) {
    using Tag = AugmentationTrace::Tag;
    if (s == "case1") return Tag::Case1;
    if (s == "case2a") return Tag::Case2a;
    if (s == "case2b") return Tag::Case2b;
    if (s == "case3direct") return Tag::Case3Direct;
    if (s == "case3recount") return Tag::Case3Recount;
    return std::nullopt;
}

namespace detail {

inline PartialTuple pair23(int r, int v1, int v2) {
    PartialTuple t(r);
    t.assign(1, v1);
    t.assign(2, v2);
    return t;
}

}  // namespace detail

/// One exchange step turning a near-perfect matching into a perfect one,
/// assuming side 0 is the strict side and side 2 the weak side. The step is
/// one of: inserting the free triple directly; swapping through the pivot's
/// own pair when the pivot is the free side-0 vertex; a one- or two-edge
/// exchange through the pivot's matching edge; or, when the free pair misses
/// the pivot edge entirely, rebuilding through an intermediate matching and
/// re-running the first exchange with the pivot in the free role.
inline std::pair<Matching, AugmentationTrace> augment_near_perfect(
    const Hypergraph& h, const Matching& m, const Edge& unmatched) {
    const int n = h.side_size();
    if (h.side_count() != 3) throw InvalidMatching("augmentation expects 3 sides");
    {
        MatchingCheck check = validate_matching(h, m);
        if (!check.valid || static_cast<int>(m.size()) != n - 1)
            throw InvalidMatching("need a valid matching of size n-1");
        std::vector<std::vector<char>> covered(3, std::vector<char>(n, 0));
        for (const Edge& e : m.edges)
            for (int s = 0; s < 3; ++s) covered[s][e[s]] = 1;
        if (static_cast<int>(unmatched.size()) != 3)
            throw InvalidMatching("unmatched triple must have three entries");
        for (int s = 0; s < 3; ++s)
            if (unmatched[s] < 0 || unmatched[s] >= n || covered[s][unmatched[s]])
                throw InvalidMatching("unmatched triple inconsistent with the matching");
    }
    const int x1 = unmatched[0], x2 = unmatched[1], x3 = unmatched[2];

    auto finish = [&](std::vector<Edge> final_edges, AugmentationTrace trace) {
        Matching result(std::move(final_edges));
        trace.removed.clear();
        trace.added.clear();
        std::set_difference(m.edges.begin(), m.edges.end(), result.edges.begin(),
                            result.edges.end(), std::back_inserter(trace.removed));
        std::set_difference(result.edges.begin(), result.edges.end(), m.edges.begin(),
                            m.edges.end(), std::back_inserter(trace.added));
        return std::make_pair(std::move(result), std::move(trace));
    };
    auto strict_violation = [&](const PartialTuple& t) -> std::optional<HypothesisViolated> {
        long long d = h.degree(t);
        if (2 * d <= n) return HypothesisViolated(t, d, true, n);
        return std::nullopt;
    };
    // A failed search means some matched side-{1,2} pair breaks the strict bound.
    auto scan_matched_pairs = [&]() -> HypothesisViolated {
        for (const Edge& e : m.edges)
            if (auto v = strict_violation(detail::pair23(3, e[1], e[2]))) return *v;
        throw Error("augmentation: exchange search failed with the hypothesis intact");
    };

    if (h.has_edge(Edge{x1, x2, x3})) {
        AugmentationTrace trace;
        trace.tag = AugmentationTrace::Tag::Case1;
        trace.pivot = x1;
        std::vector<Edge> final_edges = m.edges;
        final_edges.push_back(Edge{x1, x2, x3});
        return finish(std::move(final_edges), std::move(trace));
    }

    // Pivot: the side-0 vertex adjacent to the most matched pairs. Averaging
    // over the n-1 matched pairs, each with more than n/2 side-0 neighbors,
    // guarantees the exact integer bound below.
    int pivot = 0;
    long long pivot_count = -1;
    for (int v = 0; v < n; ++v) {
        long long count = 0;
        for (const Edge& e : m.edges)
            if (h.has_edge(Edge{v, e[1], e[2]})) ++count;
        if (count > pivot_count) {
            pivot = v;
            pivot_count = count;
        }
    }
    const long long required =
        ceil_div(BigInt(n - 1) * (n / 2 + 1), BigInt(n)).convert_to<long long>();
    if (pivot_count < required) throw scan_matched_pairs();
    const int w = pivot;

    if (w == x1) {
        for (const Edge& e : m.edges) {
            if (h.has_edge(Edge{x1, e[1], e[2]}) && h.has_edge(Edge{e[0], x2, x3})) {
                AugmentationTrace trace;
                trace.tag = AugmentationTrace::Tag::Case1;
                trace.pivot = w;
                trace.edge_e = e;
                std::vector<Edge> final_edges;
                for (const Edge& me : m.edges)
                    if (me != e) final_edges.push_back(me);
                final_edges.push_back(Edge{x1, e[1], e[2]});
                final_edges.push_back(Edge{e[0], x2, x3});
                return finish(std::move(final_edges), std::move(trace));
            }
        }
        if (auto v = strict_violation(detail::pair23(3, x2, x3))) throw *v;
        throw scan_matched_pairs();
    }

    Edge f;
    for (const Edge& e : m.edges)
        if (e[0] == w) f = e;

    if (h.has_edge(Edge{x1, x2, f[2]})) {
        // The free pair reaches into the pivot edge's last coordinate.
        for (const Edge& g : m.edges) {
            if (!h.has_edge(Edge{g[0], f[1], x3})) continue;
            if (!h.has_edge(Edge{w, g[1], g[2]})) continue;
            AugmentationTrace trace;
            trace.pivot = w;
            trace.edge_f = f;
            trace.edge_g = g;
            std::vector<Edge> final_edges;
            if (g[0] == w) {  // g coincides with f
                trace.tag = AugmentationTrace::Tag::Case2a;
                for (const Edge& me : m.edges)
                    if (me != f) final_edges.push_back(me);
                final_edges.push_back(Edge{x1, x2, f[2]});
                final_edges.push_back(Edge{w, f[1], x3});
            } else {
                trace.tag = AugmentationTrace::Tag::Case2b;
                for (const Edge& me : m.edges)
                    if (me != f && me != g) final_edges.push_back(me);
                final_edges.push_back(Edge{x1, x2, f[2]});
                final_edges.push_back(Edge{g[0], f[1], x3});
                final_edges.push_back(Edge{w, g[1], g[2]});
            }
            return finish(std::move(final_edges), std::move(trace));
        }
        if (auto v = strict_violation(detail::pair23(3, f[1], x3))) throw *v;
        throw scan_matched_pairs();
    }

    // The free pair misses the pivot edge: rebuild through an intermediate
    // matching that frees the pivot, then close as in the first exchange.
    std::optional<Edge> g_pick;
    for (const Edge& g : m.edges) {
        if (h.has_edge(Edge{g[0], f[1], f[2]}) && h.has_edge(Edge{x1, x2, g[2]})) {
            g_pick = g;
            break;
        }
    }
    if (!g_pick) {
        if (auto v = strict_violation(detail::pair23(3, f[1], f[2]))) throw *v;
        PartialTuple weak_pair(3);
        weak_pair.assign(0, x1);
        weak_pair.assign(1, x2);
        long long d = h.degree(weak_pair);
        if (2 * d < n) throw HypothesisViolated(weak_pair, d, false, n);
        throw Error("augmentation: exchange search failed with the hypothesis intact");
    }
    const Edge g = *g_pick;
    std::vector<Edge> mid;
    for (const Edge& me : m.edges)
        if (me != f && me != g) mid.push_back(me);
    mid.push_back(Edge{g[0], f[1], f[2]});
    mid.push_back(Edge{x1, x2, g[2]});
    std::sort(mid.begin(), mid.end());
    // Free vertices are now w, g[1], x3.
    if (h.has_edge(Edge{w, g[1], x3})) {
        AugmentationTrace trace;
        trace.tag = AugmentationTrace::Tag::Case3Direct;
        trace.pivot = w;
        trace.edge_f = f;
        trace.edge_g = g;
        mid.push_back(Edge{w, g[1], x3});
        return finish(std::move(mid), std::move(trace));
    }
    for (const Edge& e : mid) {
        if (h.has_edge(Edge{w, e[1], e[2]}) && h.has_edge(Edge{e[0], g[1], x3})) {
            AugmentationTrace trace;
            trace.tag = AugmentationTrace::Tag::Case3Recount;
            trace.pivot = w;
            trace.edge_f = f;
            trace.edge_g = g;
            trace.edge_e = e;
            std::vector<Edge> final_edges;
            for (const Edge& me : mid)
                if (me != e) final_edges.push_back(me);
            final_edges.push_back(Edge{w, e[1], e[2]});
            final_edges.push_back(Edge{e[0], g[1], x3});
            return finish(std::move(final_edges), std::move(trace));
        }
    }
    if (auto v = strict_violation(detail::pair23(3, g[1], x3))) throw *v;
    throw scan_matched_pairs();
}

struct PerfectMatchingResult {
    enum class Mode { Direct, Contracted, Lifted };
    Matching matching;                      // in the original labeling
    std::vector<AugmentationTrace> traces;  // in the solve image
    std::vector<int> side_order;            // image side j = original side side_order[j]
    Mode mode = Mode::Direct;
    Matching base;                          // near-perfect matching in the solve image
};

inline const char* mode_str(PerfectMatchingResult::Mode m) {
    switch (m) {
        case PerfectMatchingResult::Mode::Direct: return "direct";
        case PerfectMatchingResult::Mode::Contracted: return "contract";
        case PerfectMatchingResult::Mode::Lifted: return "lift";
    }
    return "?";
}

namespace detail {

/// Bipartite instances solve through a 3-partite image whose middle side is
/// fully connected; projecting a perfect matching back drops the middle.
inline Hypergraph lift_bipartite(const Hypergraph& h) {
    std::vector<Edge> tri;
    for (const Edge& e : h.edges())
        for (int i = 0; i < h.side_size(); ++i) tri.push_back(Edge{e[0], i, e[1]});
    return Hypergraph(3, h.side_size(), std::move(tri));
}

}  // namespace detail

/// Full solve: pick an ordered (strict, weak) side pair whose degree
/// hypothesis holds (lexicographic search), relabel it to (first, last),
/// reduce to 3 sides when needed, build a near-perfect matching and augment.
inline PerfectMatchingResult find_perfect_matching(const Hypergraph& h,
                                                   long long budget = kDefaultOracleBudget) {
    const int r = h.side_count();
    const int n = h.side_size();
    std::optional<std::pair<int, int>> chosen;
    for (int a = 0; a < r && !chosen; ++a)
        for (int b = 0; b < r && !chosen; ++b)
            if (a != b && check_main_condition(h, a, b).holds) chosen = {a, b};
    if (!chosen) throw ConditionViolated(check_main_condition(h, 0, r - 1));

    PerfectMatchingResult out;
    out.side_order.push_back(chosen->first);
    for (int s = 0; s < r; ++s)
        if (s != chosen->first && s != chosen->second) out.side_order.push_back(s);
    out.side_order.push_back(chosen->second);

    Hypergraph permuted = permute_sides(h, out.side_order);
    std::optional<Hypergraph> image;
    ContractionMap cmap;
    if (r == 2) {
        out.mode = PerfectMatchingResult::Mode::Lifted;
        image = detail::lift_bipartite(permuted);
    } else if (r == 3) {
        out.mode = PerfectMatchingResult::Mode::Direct;
        image = permuted;
    } else {
        out.mode = PerfectMatchingResult::Mode::Contracted;
        auto [img, map] = contract_to_tripartite(permuted);
        image = std::move(img);
        cmap = map;
    }

    NearPerfect near = build_near_perfect(*image, budget);
    auto [image_pm, trace] = augment_near_perfect(*image, near.matching, near.unmatched);
    out.base = near.matching;
    out.traces.push_back(std::move(trace));

    Matching in_permuted;
    switch (out.mode) {
        case PerfectMatchingResult::Mode::Lifted:
            for (const Edge& e : image_pm.edges) in_permuted.edges.push_back(Edge{e[0], e[2]});
            in_permuted.canonicalize();
            break;
        case PerfectMatchingResult::Mode::Direct:
            in_permuted = image_pm;
            break;
        case PerfectMatchingResult::Mode::Contracted:
            in_permuted = decontract_matching(*image, image_pm, cmap);
            break;
    }
    for (const Edge& e : in_permuted.edges) {
        Edge orig(r);
        for (int j = 0; j < r; ++j) orig[out.side_order[j]] = e[j];
        out.matching.edges.push_back(std::move(orig));
    }
    out.matching.canonicalize();
    MatchingCheck check = validate_matching(h, out.matching);
    if (!check.valid || !check.perfect)
        throw Error("engine bug: solver produced a non-perfect matching for n=" +
                    std::to_string(n));
    return out;
}

inline std::string trace_line(const AugmentationTrace& t) {
    std::string out = std::string("CASE ") + trace_tag_str(t.tag) +
                      " w=" + std::to_string(t.pivot);
    for (const Edge& e : t.removed) out += " -" + edge_to_string(e);
    for (const Edge& e : t.added) out += " +" + edge_to_string(e);
    return out;
}

/// Self-contained replayable trace: header, side relabeling, reduction mode,
/// the near-perfect base in the solve image, one CASE line per augmentation,
/// and the claimed perfect matching of the original instance.
inline std::string serialize_trace(const PerfectMatchingResult& res) {
    std::ostringstream out;
    out << "# rmatch trace v1\n";
    out << "PERM";
    for (int s : res.side_order) out << ' ' << s;
    out << '\n';
    out << "MODE " << mode_str(res.mode) << '\n';
    out << "BASE";
    for (const Edge& e : res.base.edges) out << ' ' << edge_to_string(e);
    out << '\n';
    for (const AugmentationTrace& t : res.traces) out << trace_line(t) << '\n';
    out << "FINAL";
    for (const Edge& e : res.matching.edges) out << ' ' << edge_to_string(e);
    out << '\n';
    return out.str();
}

namespace detail {

inline std::optional<Edge> parse_edge_token(const std::string& token) {
    if (token.size() < 2 || token.front() != '(' || token.back() != ')')
        return std::nullopt;
    Edge e;
    std::string body = token.substr(1, token.size() - 2);
    std::istringstream in(body);
    std::string part;
    while (std::getline(in, part, ',')) {
        try {
            std::size_t used = 0;
            int v = std::stoi(part, &used);
            if (used != part.size()) return std::nullopt;
            e.push_back(v);
        } catch (const std::exception&) {
            return std::nullopt;
        }
    }
    if (e.empty()) return std::nullopt;
    return e;
}

}  // namespace detail

/// Replays a serialized trace against the instance it claims to solve.
/// Returns true iff every step is a legal exchange in the reconstructed solve
/// image and the mapped-back result equals the claimed perfect matching.
inline bool replay_trace(const Hypergraph& h, const std::string& trace_text,
                         std::string* why = nullptr) {
    auto fail = [&](const std::string& reason) {
        if (why) *why = reason;
        return false;
    };
    std::vector<int> perm;
    std::string mode;
    std::vector<Edge> base, final_claimed;
    std::vector<std::pair<AugmentationTrace::Tag, std::pair<std::vector<Edge>, std::vector<Edge>>>> cases;
    std::istringstream in(trace_text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "PERM") {
            int s;
            while (ls >> s) perm.push_back(s);
        } else if (key == "MODE") {
            ls >> mode;
        } else if (key == "BASE" || key == "FINAL") {
            std::string token;
            std::vector<Edge> edges;
            while (ls >> token) {
                auto e = detail::parse_edge_token(token);
                if (!e) return fail("bad edge token: " + token);
                edges.push_back(*e);
            }
            (key == "BASE" ? base : final_claimed) = std::move(edges);
        } else if (key == "CASE") {
            std::string tag_str, token;
            ls >> tag_str;
            auto tag = trace_tag_from(tag_str);
            if (!tag) return fail("unknown case tag: " + tag_str);
            std::vector<Edge> removed, added;
            while (ls >> token) {
                if (token.rfind("w=", 0) == 0) continue;
                bool minus = token[0] == '-';
                bool plus = token[0] == '+';
                if (!minus && !plus) return fail("bad case token: " + token);
                auto e = detail::parse_edge_token(token.substr(1));
                if (!e) return fail("bad edge token: " + token);
                (minus ? removed : added).push_back(*e);
            }
            cases.emplace_back(*tag, std::make_pair(std::move(removed), std::move(added)));
        } else {
            return fail("unknown trace line: " + line);
        }
    }
    const int r = h.side_count();
    if (static_cast<int>(perm.size()) != r) return fail("bad side permutation");
    Hypergraph permuted = permute_sides(h, perm);
    std::optional<Hypergraph> image;
    ContractionMap cmap;
    if (mode == "direct") {
        if (r != 3) return fail("direct mode needs 3 sides");
        image = permuted;
    } else if (mode == "lift") {
        if (r != 2) return fail("lift mode needs 2 sides");
        image = detail::lift_bipartite(permuted);
    } else if (mode == "contract") {
        if (r <= 3) return fail("contract mode needs more than 3 sides");
        auto [img, map] = contract_to_tripartite(permuted);
        image = std::move(img);
        cmap = map;
    } else {
        return fail("unknown mode: " + mode);
    }
    Matching current{std::vector<Edge>(base)};
    MatchingCheck base_check = validate_matching(*image, current);
    if (!base_check.valid || static_cast<int>(current.size()) != h.side_size() - 1)
        return fail("base is not a valid matching of size n-1 in the image");
    for (const auto& [tag, ops] : cases) {
        (void)tag;
        const auto& [removed, added] = ops;
        if (added.size() != removed.size() + 1) return fail("case does not grow by one edge");
        std::vector<Edge> next;
        for (const Edge& e : removed)
            if (!current.contains(e)) return fail("removed edge not in the matching");
        for (const Edge& e : current.edges)
            if (std::find(removed.begin(), removed.end(), e) == removed.end())
                next.push_back(e);
        for (const Edge& e : added) {
            if (!image->has_edge(e)) return fail("added edge not in the image");
            next.push_back(e);
        }
        current = Matching(std::move(next));
        if (!validate_matching(*image, current).valid)
            return fail("case step left an invalid matching");
    }
    if (!validate_matching(*image, current).perfect)
        return fail("replay did not end in a perfect matching of the image");
    Matching in_permuted;
    if (mode == "lift") {
        for (const Edge& e : current.edges) in_permuted.edges.push_back(Edge{e[0], e[2]});
        in_permuted.canonicalize();
    } else if (mode == "contract") {
        in_permuted = decontract_matching(*image, current, cmap);
    } else {
        in_permuted = current;
    }
    Matching mapped;
    for (const Edge& e : in_permuted.edges) {
        Edge orig(r);
        for (int j = 0; j < r; ++j) orig[perm[j]] = e[j];
        mapped.edges.push_back(std::move(orig));
    }
    mapped.canonicalize();
    Matching claimed{std::vector<Edge>(final_claimed)};
    if (!(mapped == claimed)) return fail("replayed matching differs from the claimed one");
    if (!validate_matching(h, claimed).perfect)
        return fail("claimed matching is not perfect in the original instance");
    return true;
}

}  // namespace rmatch
