#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace rmatch {

/// An edge of an r-partite r-graph: entry i is the vertex index used on side i.
using Edge = std::vector<int>;

struct Vertex {
    int side = 0;
    int index = 0;
    friend bool operator==(const Vertex&, const Vertex&) = default;
    friend auto operator<=>(const Vertex&, const Vertex&) = default;
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InvalidTuple : Error { using Error::Error; };
struct InvalidQuery : Error { using Error::Error; };
struct InvalidMatching : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };

/// A legal tuple: at most one vertex per side, occupying a subset of the sides.
class PartialTuple {
public:
    static constexpr int kUnset = -1;

    PartialTuple() = default;
    explicit PartialTuple(int side_count) : slot_(side_count, kUnset) {}
    PartialTuple(int side_count, std::initializer_list<std::pair<int, int>> assignments)
        : slot_(side_count, kUnset) {
        for (auto [side, vertex] : assignments) assign(side, vertex);
    }

    static PartialTuple from_edge(const Edge& e) {
        PartialTuple t(static_cast<int>(e.size()));
        t.slot_.assign(e.begin(), e.end());
        return t;
    }

    int side_count() const { return static_cast<int>(slot_.size()); }

    bool occupied(int side) const { return slot_.at(side) != kUnset; }

    int at(int side) const { return slot_.at(side); }

    void assign(int side, int vertex) {
        if (side < 0 || side >= side_count())
            throw InvalidTuple("side out of range: " + std::to_string(side));
        slot_[side] = vertex;
    }

    void clear(int side) { slot_.at(side) = kUnset; }

    int occupied_count() const {
        int k = 0;
        for (int v : slot_)
            if (v != kUnset) ++k;
        return k;
    }

    std::vector<int> occupied_sides() const {
        std::vector<int> out;
        for (int s = 0; s < side_count(); ++s)
            if (slot_[s] != kUnset) out.push_back(s);
        return out;
    }

    /// Keeps only the given sides, clearing the rest.
    PartialTuple restricted_to(const std::vector<int>& sides) const {
        PartialTuple out(side_count());
        for (int s : sides)
            if (occupied(s)) out.slot_[s] = slot_[s];
        return out;
    }

    bool agrees_with(const Edge& e) const {
        if (static_cast<int>(e.size()) != side_count()) return false;
        for (int s = 0; s < side_count(); ++s)
            if (slot_[s] != kUnset && slot_[s] != e[s]) return false;
        return true;
    }

    /// Textual form, e.g. "(0,_,2)".
    std::string to_string() const {
        std::string out = "(";
        for (int s = 0; s < side_count(); ++s) {
            if (s) out += ',';
            out += slot_[s] == kUnset ? std::string("_") : std::to_string(slot_[s]);
        }
        out += ')';
        return out;
    }

    friend bool operator==(const PartialTuple&, const PartialTuple&) = default;
    friend auto operator<=>(const PartialTuple&, const PartialTuple&) = default;

private:
    std::vector<int> slot_;
};

struct Matching {
    std::vector<Edge> edges;

    Matching() = default;
    explicit Matching(std::vector<Edge> e) : edges(std::move(e)) { canonicalize(); }

    void canonicalize() { std::sort(edges.begin(), edges.end()); }
    std::size_t size() const { return edges.size(); }
    bool contains(const Edge& e) const {
        return std::binary_search(edges.begin(), edges.end(), e);
    }

    friend bool operator==(const Matching&, const Matching&) = default;
};

struct MatchingCheck {
    bool valid = false;
    bool perfect = false;
};

namespace detail {

struct IntVecHash {
    std::size_t operator()(const std::vector<int>& v) const noexcept {
        std::uint64_t h = 1469598103934665603ull;
        for (int x : v) {
            h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        return static_cast<std::size_t>(h);
    }
};

}  // namespace detail

/// An n-balanced r-partite r-graph. Immutable after construction; edges are
/// kept deduplicated in canonical (lexicographic) order, with a per-side
/// projection index for fast degree and neighbor queries on (r-1)-tuples.
class Hypergraph {
public:
    Hypergraph(int side_count, int side_size, std::vector<Edge> edge_list = {})
        : r_(side_count), n_(side_size) {
        if (r_ < 2) throw InvalidTuple("side count must be at least 2");
        if (n_ < 1) throw InvalidTuple("side size must be at least 1");
        for (const Edge& e : edge_list) check_edge(e);
        std::sort(edge_list.begin(), edge_list.end());
        auto last = std::unique(edge_list.begin(), edge_list.end());
        dropped_ = static_cast<std::size_t>(edge_list.end() - last);
        edge_list.erase(last, edge_list.end());
        edges_ = std::move(edge_list);
        build_index();
    }

    int side_count() const { return r_; }
    int side_size() const { return n_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t edge_count() const { return edges_.size(); }

    /// How many duplicate edges were silently dropped at construction.
    std::size_t duplicates_dropped() const { return dropped_; }

    bool has_edge(const Edge& e) const {
        return std::binary_search(edges_.begin(), edges_.end(), e);
    }

    /// Number of edges containing (extending) the legal tuple f.
    long long degree(const PartialTuple& f) const {
        check_tuple(f);
        int k = f.occupied_count();
        if (k == 0) return static_cast<long long>(edges_.size());
        if (k == r_) {
            Edge e(r_);
            for (int s = 0; s < r_; ++s) e[s] = f.at(s);
            return has_edge(e) ? 1 : 0;
        }
        if (k == r_ - 1) {
            int missing = missing_side(f);
            auto it = by_missing_side_[missing].find(reduced_key(f, missing));
            return it == by_missing_side_[missing].end()
                       ? 0
                       : static_cast<long long>(it->second.size());
        }
        long long count = 0;
        for (const Edge& e : edges_)
            if (f.agrees_with(e)) ++count;
        return count;
    }

    /// Vertex indices v on `side` such that f extended by v lies in some edge.
    std::vector<int> neighbors(const PartialTuple& f, int side) const {
        check_tuple(f);
        if (side < 0 || side >= r_)
            throw InvalidQuery("side out of range: " + std::to_string(side));
        if (f.occupied(side))
            throw InvalidQuery("queried side is already occupied by the tuple");
        if (f.occupied_count() == r_ - 1) {
            auto it = by_missing_side_[side].find(reduced_key(f, side));
            return it == by_missing_side_[side].end() ? std::vector<int>{} : it->second;
        }
        std::vector<int> out;
        for (const Edge& e : edges_)
            if (f.agrees_with(e)) out.push_back(e[side]);
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

private:
    void check_edge(const Edge& e) const {
        if (static_cast<int>(e.size()) != r_)
            throw InvalidTuple("edge arity != side count");
        for (int v : e)
            if (v < 0 || v >= n_)
                throw InvalidTuple("vertex index out of range: " + std::to_string(v));
    }

    void check_tuple(const PartialTuple& f) const {
        if (f.side_count() != r_)
            throw InvalidTuple("tuple side count != hypergraph side count");
        for (int s = 0; s < r_; ++s)
            if (f.occupied(s) && (f.at(s) < 0 || f.at(s) >= n_))
                throw InvalidTuple("tuple vertex out of range on side " + std::to_string(s));
    }

    int missing_side(const PartialTuple& f) const {
        for (int s = 0; s < r_; ++s)
            if (!f.occupied(s)) return s;
        throw InvalidQuery("tuple occupies every side");
    }

    std::vector<int> reduced_key(const PartialTuple& f, int missing) const {
        std::vector<int> key;
        key.reserve(r_ - 1);
        for (int s = 0; s < r_; ++s)
            if (s != missing) key.push_back(f.at(s));
        return key;
    }

    void build_index() {
        by_missing_side_.assign(r_, {});
        std::vector<int> key(r_ - 1);
        for (const Edge& e : edges_) {
            for (int s = 0; s < r_; ++s) {
                key.clear();
                for (int t = 0; t < r_; ++t)
                    if (t != s) key.push_back(e[t]);
                by_missing_side_[s][key].push_back(e[s]);
            }
        }
        // Canonical edge order makes every neighbor list sorted already.
    }

    int r_;
    int n_;
    std::vector<Edge> edges_;
    std::size_t dropped_ = 0;
    std::vector<std::unordered_map<std::vector<int>, std::vector<int>, detail::IntVecHash>>
        by_missing_side_;
};

/// valid: every edge present in h and the edges pairwise disjoint on each side.
/// perfect: valid and exactly one edge per side-index, i.e. |m| = n.
inline MatchingCheck validate_matching(const Hypergraph& h, const Matching& m) {
    MatchingCheck out;
    std::vector<std::vector<char>> used(h.side_count(),
                                        std::vector<char>(h.side_size(), 0));
    for (const Edge& e : m.edges) {
        if (static_cast<int>(e.size()) != h.side_count()) return out;
        if (!h.has_edge(e)) return out;
        for (int s = 0; s < h.side_count(); ++s) {
            if (used[s][e[s]]) return out;
            used[s][e[s]] = 1;
        }
    }
    out.valid = true;
    out.perfect = m.edges.size() == static_cast<std::size_t>(h.side_size());
    return out;
}

/// Calls fn once per legal tuple over `sides` (ascending side order, last side
/// varying fastest), i.e. in lexicographic order. `sides` must be strictly
/// increasing.
template <class Fn>
void for_each_legal_tuple(int side_count, int side_size, const std::vector<int>& sides,
                          Fn&& fn) {
    for (std::size_t i = 0; i < sides.size(); ++i) {
        if (sides[i] < 0 || sides[i] >= side_count)
            throw InvalidQuery("side out of range: " + std::to_string(sides[i]));
        if (i > 0 && sides[i] <= sides[i - 1])
            throw InvalidQuery("sides must be strictly increasing");
    }
    PartialTuple t(side_count);
    for (int s : sides) t.assign(s, 0);
    if (sides.empty()) {
        fn(static_cast<const PartialTuple&>(t));
        return;
    }
    while (true) {
        fn(static_cast<const PartialTuple&>(t));
        int i = static_cast<int>(sides.size()) - 1;
        while (i >= 0) {
            int v = t.at(sides[i]) + 1;
            if (v < side_size) {
                t.assign(sides[i], v);
                break;
            }
            t.assign(sides[i], 0);
            --i;
        }
        if (i < 0) return;
    }
}

/// All n^{|sides|} legal tuples over `sides`, lexicographically.
inline std::vector<PartialTuple> enumerate_legal_tuples(const Hypergraph& h,
                                                        std::vector<int> sides) {
    std::sort(sides.begin(), sides.end());
    std::vector<PartialTuple> out;
    for_each_legal_tuple(h.side_count(), h.side_size(), sides,
                         [&](const PartialTuple& t) { out.push_back(t); });
    return out;
}

/// Sides of the result are ordered per `order`: result side j = input side order[j].
inline Hypergraph permute_sides(const Hypergraph& h, const std::vector<int>& order) {
    if (static_cast<int>(order.size()) != h.side_count())
        throw InvalidQuery("permutation size != side count");
    std::vector<char> seen(h.side_count(), 0);
    for (int s : order) {
        if (s < 0 || s >= h.side_count() || seen[s])
            throw InvalidQuery("not a permutation of the sides");
        seen[s] = 1;
    }
    std::vector<Edge> edges;
    edges.reserve(h.edge_count());
    for (const Edge& e : h.edges()) {
        Edge p(h.side_count());
        for (int j = 0; j < h.side_count(); ++j) p[j] = e[order[j]];
        edges.push_back(std::move(p));
    }
    return Hypergraph(h.side_count(), h.side_size(), std::move(edges));
}

inline std::string edge_to_string(const Edge& e) {
    std::string out = "(";
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(e[i]);
    }
    out += ')';
    return out;
}

/// Text format: line 1 is "r n"; every following non-empty, non-# line holds
/// r space-separated 0-based vertex indices (position i = side i).
inline std::string serialize(const Hypergraph& h) {
    std::string out = std::to_string(h.side_count()) + " " + std::to_string(h.side_size()) + "\n";
    for (const Edge& e : h.edges()) {
        for (int s = 0; s < h.side_count(); ++s) {
            if (s) out += ' ';
            out += std::to_string(e[s]);
        }
        out += '\n';
    }
    return out;
}

inline Hypergraph parse_hypergraph(std::istream& in) {
    std::string line;
    int r = 0, n = 0;
    bool have_header = false;
    std::vector<Edge> edges;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        if (!have_header) {
            if (!(ls >> r >> n)) {
                std::string token;
                std::istringstream probe(line);
                if (probe >> token)
                    throw ParseError("line " + std::to_string(line_no) + ": expected \"r n\" header");
                continue;  // blank or comment-only line before the header
            }
            std::string extra;
            if (ls >> extra)
                throw ParseError("line " + std::to_string(line_no) + ": trailing tokens after header");
            if (r < 2 || n < 1)
                throw ParseError("line " + std::to_string(line_no) + ": need r >= 2 and n >= 1");
            have_header = true;
            continue;
        }
        Edge e;
        int v;
        while (ls >> v) e.push_back(v);
        if (!ls.eof()) throw ParseError("line " + std::to_string(line_no) + ": non-integer token");
        if (e.empty()) continue;
        if (static_cast<int>(e.size()) != r)
            throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(r) +
                             " indices, got " + std::to_string(e.size()));
        for (int x : e)
            if (x < 0 || x >= n)
                throw ParseError("line " + std::to_string(line_no) + ": vertex index out of range");
        edges.push_back(std::move(e));
    }
    if (!have_header) throw ParseError("missing \"r n\" header line");
    return Hypergraph(r, n, std::move(edges));
}

inline Hypergraph parse_hypergraph_text(const std::string& text) {
    std::istringstream in(text);
    return parse_hypergraph(in);
}

}  // namespace rmatch
