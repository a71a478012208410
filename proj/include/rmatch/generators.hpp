#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmatch/hypergraph.hpp"

namespace rmatch {

struct NotLatin : Error { using Error::Error; };

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Streams are keyed by (family, seed): mt19937_64 seeded with
// splitmix64(seed ^ family salt). Documented in the README; the mt19937_64
// sequence is fixed by the standard, so corpora reproduce across platforms.
inline std::mt19937_64 family_rng(std::uint64_t family_salt, std::uint64_t seed) {
    return std::mt19937_64(splitmix64(seed ^ family_salt));
}

inline constexpr std::uint64_t kRandomFamilySalt = 0x726d617463685f72ull;

}  // namespace detail

/// All n^r legal tuples.
inline Hypergraph gen_complete(int r, int n) {
    std::vector<Edge> edges;
    std::vector<int> all_sides(r);
    for (int s = 0; s < r; ++s) all_sides[s] = s;
    for_each_legal_tuple(r, n, all_sides, [&](const PartialTuple& t) {
        Edge e(r);
        for (int s = 0; s < r; ++s) e[s] = t.at(s);
        edges.push_back(std::move(e));
    });
    return Hypergraph(r, n, std::move(edges));
}

struct ParityInstance {
    Hypergraph graph;
    // Marked set on side i = the first marked_sizes[i] vertex indices.
    std::vector<int> marked_sizes;
};

/// Edges are the legal tuples containing an even number of marked vertices,
/// with marked-set sizes within 1 of n/2 and an odd total, so a perfect
/// matching (which would cover all marked vertices) cannot exist.
inline ParityInstance gen_parity_sharpness(int r, int n) {
    std::vector<int> sizes(r);
    if (n % 2 == 0) {
        for (int i = 0; i < r; ++i) sizes[i] = n / 2;
    } else {
        for (int i = 0; i < r; ++i) sizes[i] = (i % 2 == 0) ? (n + 1) / 2 : n / 2;
    }
    long long total = 0;
    for (int s : sizes) total += s;
    if (total % 2 == 0) {
        // Smallest-index adjustment, staying within n/2 +- 1.
        if (n % 2 == 0) sizes[0] = n / 2 + 1;
        else sizes[0] = n / 2;
    }
    std::vector<Edge> edges;
    std::vector<int> all_sides(r);
    for (int s = 0; s < r; ++s) all_sides[s] = s;
    for_each_legal_tuple(r, n, all_sides, [&](const PartialTuple& t) {
        int marked = 0;
        for (int s = 0; s < r; ++s)
            if (t.at(s) < sizes[s]) ++marked;
        if (marked % 2 == 0) {
            Edge e(r);
            for (int s = 0; s < r; ++s) e[s] = t.at(s);
            edges.push_back(std::move(e));
        }
    });
    return ParityInstance{Hypergraph(r, n, std::move(edges)), std::move(sizes)};
}

/// Edges are the legal tuples meeting the union of the X_i, where X_i is the
/// first k indices on each side.
inline Hypergraph gen_union_cover(int r, int n, int k) {
    if (k < 0 || k > n) throw InvalidQuery("k must lie in [0, n]");
    std::vector<Edge> edges;
    std::vector<int> all_sides(r);
    for (int s = 0; s < r; ++s) all_sides[s] = s;
    for_each_legal_tuple(r, n, all_sides, [&](const PartialTuple& t) {
        for (int s = 0; s < r; ++s) {
            if (t.at(s) < k) {
                Edge e(r);
                for (int q = 0; q < r; ++q) e[q] = t.at(q);
                edges.push_back(std::move(e));
                return;
            }
        }
    });
    return Hypergraph(r, n, std::move(edges));
}

/// Tripartite instance {(i, j, L(i,j))} of a Latin square L; every legal pair
/// then has degree exactly 1.
inline Hypergraph gen_latin(const std::vector<std::vector<int>>& table) {
    int n = static_cast<int>(table.size());
    if (n == 0) throw NotLatin("empty table");
    for (const auto& row : table)
        if (static_cast<int>(row.size()) != n) throw NotLatin("table is not square");
    for (int i = 0; i < n; ++i) {
        std::vector<char> in_row(n, 0), in_col(n, 0);
        for (int j = 0; j < n; ++j) {
            int a = table[i][j], b = table[j][i];
            if (a < 0 || a >= n || b < 0 || b >= n) throw NotLatin("symbol out of range");
            if (in_row[a]) throw NotLatin("repeated symbol in row " + std::to_string(i));
            if (in_col[b]) throw NotLatin("repeated symbol in column " + std::to_string(i));
            in_row[a] = in_col[b] = 1;
        }
    }
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) edges.push_back(Edge{i, j, table[i][j]});
    return Hypergraph(3, n, std::move(edges));
}

inline Hypergraph gen_latin_cyclic(int n) {
    std::vector<std::vector<int>> table(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) table[i][j] = (i + j) % n;
    return gen_latin(table);
}

/// Each legal tuple is kept independently with probability p, reproducibly
/// from the seed.
inline Hypergraph gen_random(int r, int n, double p, std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw InvalidQuery("p must lie in [0, 1]");
    auto rng = detail::family_rng(detail::kRandomFamilySalt, seed);
    const auto threshold =
        static_cast<std::uint64_t>(p * 9007199254740992.0);  // p * 2^53
    std::vector<Edge> edges;
    std::vector<int> all_sides(r);
    for (int s = 0; s < r; ++s) all_sides[s] = s;
    for_each_legal_tuple(r, n, all_sides, [&](const PartialTuple& t) {
        if ((rng() >> 11) < threshold) {
            Edge e(r);
            for (int s = 0; s < r; ++s) e[s] = t.at(s);
            edges.push_back(std::move(e));
        }
    });
    return Hypergraph(r, n, std::move(edges));
}

}  // namespace rmatch
