#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rmatch/conditions.hpp"
#include "rmatch/hypergraph.hpp"
#include "rmatch/rational.hpp"

namespace rmatch {

struct NotACover : Error { using Error::Error; };

struct FractionalAssignment {
    enum class Kind { EdgeWeights, VertexWeights };
    Kind kind = Kind::EdgeWeights;
    std::vector<std::pair<Edge, Rational>> edge_weights;      // canonical edge order
    std::vector<std::pair<Vertex, Rational>> vertex_weights;  // side-major order
    Rational total;
};

namespace lp_detail {

// Dense two-phase simplex over exact rationals, Bland's rule throughout
// (entering: lowest-index improving column; leaving: lowest-index basic
// variable among the minimum ratios), which rules out cycling.
//
// Solves: maximize c'x subject to A x <= b, x >= 0 (b may be negative).
struct SimplexOutcome {
    Rational value;
    std::vector<Rational> solution;
};

class DenseSimplex {
public:
    DenseSimplex(std::vector<std::vector<Rational>> A, std::vector<Rational> b,
                 std::vector<Rational> c)
        : num_vars_(static_cast<int>(c.size())), objective_(std::move(c)) {
        const int m = static_cast<int>(A.size());
        std::vector<int> art_rows;
        for (int i = 0; i < m; ++i) {
            bool neg = b[i] < 0;
            std::vector<Rational> row(num_vars_ + m);
            for (int j = 0; j < num_vars_; ++j) row[j] = neg ? -A[i][j] : A[i][j];
            row[num_vars_ + i] = neg ? Rational(-1) : Rational(1);
            rows_.push_back(std::move(row));
            rhs_.push_back(neg ? -b[i] : b[i]);
            basis_.push_back(num_vars_ + i);
            if (neg) art_rows.push_back(i);
        }
        first_artificial_ = num_vars_ + m;
        int total = first_artificial_ + static_cast<int>(art_rows.size());
        for (auto& row : rows_) row.resize(total);
        for (std::size_t k = 0; k < art_rows.size(); ++k) {
            rows_[art_rows[k]][first_artificial_ + static_cast<int>(k)] = 1;
            basis_[art_rows[k]] = first_artificial_ + static_cast<int>(k);
        }
        num_cols_ = total;
    }

    SimplexOutcome solve() {
        if (num_cols_ > first_artificial_) {
            std::vector<Rational> phase1(num_cols_);
            for (int j = first_artificial_; j < num_cols_; ++j) phase1[j] = -1;
            iterate(phase1, num_cols_);
            Rational infeas = 0;
            for (std::size_t i = 0; i < rows_.size(); ++i)
                if (basis_[i] >= first_artificial_) infeas += rhs_[i];
            if (infeas != 0) throw Error("simplex: infeasible program");
            evict_artificials();
        }
        std::vector<Rational> cost(first_artificial_);
        for (int j = 0; j < num_vars_; ++j) cost[j] = objective_[j];
        iterate(cost, first_artificial_);
        SimplexOutcome out;
        out.solution.assign(num_vars_, Rational(0));
        for (std::size_t i = 0; i < rows_.size(); ++i)
            if (basis_[i] < num_vars_) out.solution[basis_[i]] = rhs_[i];
        for (int j = 0; j < num_vars_; ++j) out.value += objective_[j] * out.solution[j];
        return out;
    }

private:
    void pivot(int pr, int pc) {
        const Rational inv = Rational(1) / rows_[pr][pc];
        for (auto& cell : rows_[pr]) cell *= inv;
        rhs_[pr] *= inv;
        for (std::size_t i = 0; i < rows_.size(); ++i) {
            if (static_cast<int>(i) == pr || rows_[i][pc] == 0) continue;
            const Rational factor = rows_[i][pc];
            for (int j = 0; j < num_cols_; ++j)
                if (rows_[pr][j] != 0) rows_[i][j] -= factor * rows_[pr][j];
            rows_[i][pc] = 0;
            rhs_[i] -= factor * rhs_[pr];
        }
        basis_[pr] = pc;
    }

    // cost covers columns [0, limit); columns at or beyond limit never enter.
    void iterate(const std::vector<Rational>& cost, int limit) {
        for (long long guard = 0;; ++guard) {
            if (guard > 2'000'000) throw Error("simplex: iteration guard tripped");
            int entering = -1;
            for (int j = 0; j < limit; ++j) {
                Rational reduced = cost[j];
                for (std::size_t i = 0; i < rows_.size(); ++i) {
                    int bj = basis_[i];
                    if (bj < limit && cost[bj] != 0 && rows_[i][j] != 0)
                        reduced -= cost[bj] * rows_[i][j];
                }
                if (reduced > 0) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) return;
            int leaving = -1;
            Rational best_ratio;
            for (std::size_t i = 0; i < rows_.size(); ++i) {
                if (rows_[i][entering] <= 0) continue;
                Rational ratio = rhs_[i] / rows_[i][entering];
                if (leaving < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[leaving])) {
                    leaving = static_cast<int>(i);
                    best_ratio = ratio;
                }
            }
            if (leaving < 0) throw Error("simplex: unbounded program");
            pivot(leaving, entering);
        }
    }

    void evict_artificials() {
        for (std::size_t i = 0; i < rows_.size();) {
            if (basis_[i] < first_artificial_) {
                ++i;
                continue;
            }
            int pc = -1;
            for (int j = 0; j < first_artificial_; ++j)
                if (rows_[i][j] != 0) {
                    pc = j;
                    break;
                }
            if (pc >= 0) {
                pivot(static_cast<int>(i), pc);
                ++i;
            } else {
                // Redundant constraint; drop the row.
                rows_.erase(rows_.begin() + static_cast<long>(i));
                rhs_.erase(rhs_.begin() + static_cast<long>(i));
                basis_.erase(basis_.begin() + static_cast<long>(i));
            }
        }
    }

    int num_vars_;
    int num_cols_ = 0;
    int first_artificial_;
    std::vector<Rational> objective_;
    std::vector<std::vector<Rational>> rows_;
    std::vector<Rational> rhs_;
    std::vector<int> basis_;
};

inline int vertex_id(const Hypergraph& h, int side, int index) {
    return side * h.side_size() + index;
}

}  // namespace lp_detail

struct LpOptimum {
    Rational value;
    FractionalAssignment assignment;
};

/// Maximum total edge weight with per-vertex load at most 1 (the fractional
/// matching number), with an optimal exact assignment.
inline LpOptimum fractional_matching_number(const Hypergraph& h) {
    LpOptimum out;
    out.assignment.kind = FractionalAssignment::Kind::EdgeWeights;
    const auto& edges = h.edges();
    if (edges.empty()) return out;
    const int nv = h.side_count() * h.side_size();
    const int ne = static_cast<int>(edges.size());
    std::vector<std::vector<Rational>> A(nv, std::vector<Rational>(ne));
    for (int j = 0; j < ne; ++j)
        for (int s = 0; s < h.side_count(); ++s)
            A[lp_detail::vertex_id(h, s, edges[j][s])][j] = 1;
    std::vector<Rational> b(nv, Rational(1)), c(ne, Rational(1));
    auto res = lp_detail::DenseSimplex(std::move(A), std::move(b), std::move(c)).solve();
    out.value = res.value;
    for (int j = 0; j < ne; ++j) {
        out.assignment.edge_weights.emplace_back(edges[j], res.solution[j]);
        out.assignment.total += res.solution[j];
    }
    return out;
}

/// Minimum total vertex weight covering every edge with mass at least 1 (the
/// fractional cover number), solved as its own program rather than read off a
/// dual tableau.
inline LpOptimum fractional_cover_number(const Hypergraph& h) {
    LpOptimum out;
    out.assignment.kind = FractionalAssignment::Kind::VertexWeights;
    const int nv = h.side_count() * h.side_size();
    const auto& edges = h.edges();
    std::vector<Rational> solution(nv, Rational(0));
    if (!edges.empty()) {
        const int ne = static_cast<int>(edges.size());
        std::vector<std::vector<Rational>> A(ne, std::vector<Rational>(nv));
        for (int i = 0; i < ne; ++i)
            for (int s = 0; s < h.side_count(); ++s)
                A[i][lp_detail::vertex_id(h, s, edges[i][s])] = -1;
        std::vector<Rational> b(ne, Rational(-1)), c(nv, Rational(-1));
        auto res = lp_detail::DenseSimplex(std::move(A), std::move(b), std::move(c)).solve();
        out.value = -res.value;
        solution = std::move(res.solution);
    }
    for (int s = 0; s < h.side_count(); ++s)
        for (int i = 0; i < h.side_size(); ++i) {
            const Rational& w = solution[lp_detail::vertex_id(h, s, i)];
            out.assignment.vertex_weights.emplace_back(Vertex{s, i}, w);
            out.assignment.total += w;
        }
    return out;
}

/// Exact equality of the two independently computed optima. Always true; a
/// failure indicates an engine bug.
inline bool verify_duality(const Hypergraph& h) {
    return fractional_matching_number(h).value == fractional_cover_number(h).value;
}

/// Per-vertex loads of an edge-weight assignment, side-major order.
inline std::vector<Rational> matching_loads(const Hypergraph& h,
                                            const FractionalAssignment& fa) {
    std::vector<Rational> loads(h.side_count() * h.side_size());
    for (const auto& [e, w] : fa.edge_weights)
        for (int s = 0; s < h.side_count(); ++s)
            loads[lp_detail::vertex_id(h, s, e[s])] += w;
    return loads;
}

/// The complete k-partite k-graph on n-element sides splits into exactly
/// n^{k-1} perfect matchings, indexed by offset vectors c: matching M_c is
/// {(i, i+c_1 mod n, ..., i+c_{k-1} mod n)}.
inline std::vector<Matching> decompose_complete_multipartite(int n, int k) {
    if (n < 1 || k < 1) throw InvalidQuery("need n >= 1 and k >= 1");
    std::vector<Matching> out;
    std::vector<int> offset(k - 1, 0);
    while (true) {
        Matching m;
        for (int i = 0; i < n; ++i) {
            Edge e(k);
            e[0] = i;
            for (int t = 1; t < k; ++t) e[t] = (i + offset[t - 1]) % n;
            m.edges.push_back(std::move(e));
        }
        m.canonicalize();
        out.push_back(std::move(m));
        int t = k - 2;
        while (t >= 0 && offset[t] == n - 1) offset[t--] = 0;
        if (t < 0) break;
        ++offset[t];
    }
    return out;
}

struct GoodTupleSelection {
    /// Offset vector of the chosen matching in the diagonal decomposition.
    std::vector<int> offset;
    /// Disjoint I-tuples whose union with z's complement part is an edge.
    std::vector<PartialTuple> family;
};

/// Among the diagonal decomposition of the complete |I|-partite graph, picks
/// a matching carrying the most good I-tuples (an I-tuple y is good when
/// y together with z restricted to the complement forms an edge). Pigeonhole
/// over the n^{|I|-1} classes guarantees at least ceil(d * n / n^{|I|}) good
/// members, d being the degree of z's complement part.
inline GoodTupleSelection select_good_matching(const Hypergraph& h, std::vector<int> I,
                                               const PartialTuple& z) {
    I = detail::checked_subset(h, std::move(I));
    if (z.side_count() != h.side_count() || z.occupied_count() != h.side_count())
        throw InvalidTuple("z must occupy every side");
    const auto comp = detail::complement_sides(h.side_count(), I);
    const int n = h.side_size();
    const int k = static_cast<int>(I.size());
    PartialTuple anchor = z.restricted_to(comp);
    // Good I-parts, keyed by their offset class in the decomposition.
    std::map<std::vector<int>, std::vector<PartialTuple>> by_class;
    for (const Edge& e : h.edges()) {
        if (!anchor.agrees_with(e)) continue;
        std::vector<int> cls(k - 1);
        for (int t = 1; t < k; ++t) cls[t - 1] = ((e[I[t]] - e[I[0]]) % n + n) % n;
        PartialTuple y(h.side_count());
        for (int s : I) y.assign(s, e[s]);
        by_class[cls].push_back(std::move(y));
    }
    GoodTupleSelection out;
    out.offset.assign(k - 1, 0);
    std::size_t best = 0;
    for (const auto& [cls, members] : by_class) {
        if (members.size() > best) {
            best = members.size();
            out.offset = cls;
            out.family = members;
        }
    }
    std::sort(out.family.begin(), out.family.end());
    // Pigeonhole floor: |family| >= ceil(zeta * n).
    BigInt good_total = h.degree(anchor);
    BigInt guarantee = ceil_div(good_total * n, int_pow(BigInt(n), static_cast<unsigned>(k)));
    if (BigInt(static_cast<long long>(out.family.size())) < guarantee)
        throw Error("good-tuple selection fell short of its pigeonhole bound");
    return out;
}

struct CoverAnalysis {
    /// Minimum cover value per side, with the lowest-index attaining vertex.
    std::vector<Rational> side_min;
    std::vector<int> side_argmin;
    Rational min_sum_selected;    // sum of side minima over I
    Rational min_sum_complement;  // sum over the complement
    /// Degrees of the argmin tuple's two parts, each normalized by its value
    /// in the complete r-partite graph.
    Rational norm_deg_selected;
    Rational norm_deg_complement;
    /// True when the argmin tuple had total mass < 1 (it is then a non-edge
    /// and the good-tuple accounting below applies).
    bool split_branch = false;
    std::vector<PartialTuple> good_selected;    // disjoint good I-tuples
    std::vector<PartialTuple> good_complement;  // disjoint good I^c-tuples
    Rational bound;        // certified lower bound on the cover total
    Rational cover_total;  // the actual total
};

/// Replays the cover-mass accounting for a fractional cover g: either the
/// per-side minima already sum to at least 1 (bound n * that sum), or the
/// argmin tuple z is a non-edge and disjoint good-tuple families on both
/// parts force bound = zn(1-c) + (1-z)nb + tn(1-b) + (1-t)nc in the
/// normalized quantities. The bound never exceeds the actual cover total,
/// and reaches n whenever the two normalized degrees sum to at least 1.
inline CoverAnalysis analyze_cover(const Hypergraph& h, const FractionalAssignment& g,
                                   std::vector<int> I) {
    I = detail::checked_subset(h, std::move(I));
    if (g.kind != FractionalAssignment::Kind::VertexWeights ||
        g.vertex_weights.size() !=
            static_cast<std::size_t>(h.side_count() * h.side_size()))
        throw InvalidQuery("expected a full vertex-weight assignment");
    const int r = h.side_count();
    const int n = h.side_size();
    std::vector<Rational> weight(r * n);
    for (const auto& [v, w] : g.vertex_weights) {
        if (w < 0) throw NotACover("negative vertex weight");
        weight[lp_detail::vertex_id(h, v.side, v.index)] = w;
    }
    for (const Edge& e : h.edges()) {
        Rational mass = 0;
        for (int s = 0; s < r; ++s) mass += weight[lp_detail::vertex_id(h, s, e[s])];
        if (mass < 1) throw NotACover("edge " + edge_to_string(e) + " has mass < 1");
    }

    CoverAnalysis out;
    out.side_min.resize(r);
    out.side_argmin.resize(r);
    for (int s = 0; s < r; ++s) {
        int arg = 0;
        for (int i = 1; i < n; ++i)
            if (weight[lp_detail::vertex_id(h, s, i)] <
                weight[lp_detail::vertex_id(h, s, arg)])
                arg = i;
        out.side_argmin[s] = arg;
        out.side_min[s] = weight[lp_detail::vertex_id(h, s, arg)];
    }
    const auto comp = detail::complement_sides(r, I);
    for (int s : I) out.min_sum_selected += out.side_min[s];
    for (int s : comp) out.min_sum_complement += out.side_min[s];
    for (const Rational& w : weight) out.cover_total += w;

    PartialTuple z(r);
    for (int s = 0; s < r; ++s) z.assign(s, out.side_argmin[s]);
    const Rational min_sum = out.min_sum_selected + out.min_sum_complement;

    const BigInt nb(n);
    out.norm_deg_selected =
        Rational(h.degree(z.restricted_to(I)), int_pow(nb, static_cast<unsigned>(comp.size())));
    out.norm_deg_complement =
        Rational(h.degree(z.restricted_to(comp)), int_pow(nb, static_cast<unsigned>(I.size())));

    if (min_sum >= 1) {
        out.bound = Rational(n) * min_sum;
    } else {
        out.split_branch = true;
        Edge ze(r);
        for (int s = 0; s < r; ++s) ze[s] = z.at(s);
        if (h.has_edge(ze))
            throw Error("cover analysis: argmin tuple is an edge with mass < 1");
        out.good_selected = select_good_matching(h, I, z).family;
        out.good_complement = select_good_matching(h, comp, z).family;
        const Rational t = out.norm_deg_selected;
        const Rational zt = out.norm_deg_complement;
        const Rational b = out.min_sum_selected;
        const Rational c = out.min_sum_complement;
        const Rational N(n);
        out.bound = zt * N * (1 - c) + (1 - zt) * N * b + t * N * (1 - b) + (1 - t) * N * c;
        if (t + zt >= 1 && out.bound < N)
            throw Error("cover analysis: bound fell below n despite the degree condition");
    }
    if (out.bound > out.cover_total)
        throw Error("cover analysis: certified bound exceeds the actual cover total");
    return out;
}

/// Edge weights with per-vertex load exactly 1. Exists whenever the
/// normalized-degree condition holds for I; otherwise throws ConditionViolated
/// carrying the worst non-edge.
inline FractionalAssignment perfect_fractional_matching(const Hypergraph& h,
                                                        std::vector<int> I) {
    ConditionReport rep = check_fractional_condition(h, I, false);
    if (!rep.holds) throw ConditionViolated(std::move(rep));
    LpOptimum opt = fractional_matching_number(h);
    if (opt.value != h.side_size())
        throw Error("engine bug: optimum below n under the degree condition");
    for (const Rational& load : matching_loads(h, opt.assignment))
        if (load != 1) throw Error("engine bug: non-unit load at the optimum");
    return opt.assignment;
}

/// Lines "<edge-or-vertex> <p>/<q>", canonical order, exact.
inline std::string to_text(const FractionalAssignment& fa) {
    std::ostringstream out;
    if (fa.kind == FractionalAssignment::Kind::EdgeWeights) {
        for (const auto& [e, w] : fa.edge_weights)
            out << edge_to_string(e) << ' ' << to_fraction_string(w) << '\n';
    } else {
        for (const auto& [v, w] : fa.vertex_weights)
            out << v.side << ':' << v.index << ' ' << to_fraction_string(w) << '\n';
    }
    return out.str();
}

}  // namespace rmatch
