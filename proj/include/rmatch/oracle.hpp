#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "rmatch/hypergraph.hpp"

namespace rmatch {

enum class TriBool { False, True, Unknown };

struct OracleResult {
    int max_matching_size = 0;
    Matching witness;
    bool perfect_exists = false;
    /// False when the node budget ran out; max_matching_size is then only a
    /// lower bound and perfect_exists is unreliable (use has_perfect_matching
    /// for the tri-state answer).
    bool exact = true;
    long long nodes_explored = 0;
};

inline constexpr long long kDefaultOracleBudget = 10'000'000;

namespace detail {

// Exhaustive backtracking over side-0 vertices: each is matched by one of its
// still-available edges or left unmatched. Branches on the undecided vertex
// with the fewest available edges. Stops early once `stop_at` is reached.
class MatchingSearch {
public:
    MatchingSearch(const Hypergraph& h, long long budget, int stop_at)
        : h_(h), budget_(budget), stop_at_(stop_at),
          covered_(h.side_count(), std::vector<char>(h.side_size(), 0)),
          skipped_(h.side_size(), 0), by_first_(h.side_size()) {
        for (const Edge& e : h.edges()) by_first_[e[0]].push_back(&e);
    }

    OracleResult run() {
        current_.clear();
        best_.clear();
        nodes_ = 0;
        out_of_budget_ = false;
        recurse();
        OracleResult res;
        res.max_matching_size = static_cast<int>(best_.size());
        res.witness = Matching(best_);
        res.exact = !out_of_budget_;
        res.perfect_exists = res.exact && res.max_matching_size == h_.side_size();
        res.nodes_explored = nodes_;
        return res;
    }

private:
    bool available(const Edge& e) const {
        for (int s = 0; s < h_.side_count(); ++s)
            if (covered_[s][e[s]]) return false;
        return true;
    }

    int count_available(int v) const {
        int c = 0;
        for (const Edge* e : by_first_[v])
            if (available(*e)) ++c;
        return c;
    }

    void record_best() {
        if (current_.size() > best_.size()) best_ = current_;
    }

    bool done() const {
        return out_of_budget_ || static_cast<int>(best_.size()) >= stop_at_;
    }

    void recurse() {
        if (done()) return;
        if (++nodes_ > budget_) {
            out_of_budget_ = true;
            return;
        }
        record_best();
        // Undecided side-0 vertices bound what the branch can still reach.
        int undecided = 0;
        int pick = -1, pick_count = 0;
        for (int v = 0; v < h_.side_size(); ++v) {
            if (covered_[0][v] || skipped_[v]) continue;
            ++undecided;
            int c = count_available(v);
            if (pick < 0 || c < pick_count) {
                pick = v;
                pick_count = c;
            }
        }
        if (pick < 0) return;
        if (static_cast<int>(current_.size()) + undecided <= static_cast<int>(best_.size()))
            return;
        if (pick_count > 0) {
            for (const Edge* e : by_first_[pick]) {
                if (!available(*e)) continue;
                for (int s = 0; s < h_.side_count(); ++s) covered_[s][(*e)[s]] = 1;
                current_.push_back(*e);
                recurse();
                current_.pop_back();
                for (int s = 0; s < h_.side_count(); ++s) covered_[s][(*e)[s]] = 0;
                if (done()) return;
            }
        }
        skipped_[pick] = 1;
        recurse();
        skipped_[pick] = 0;
    }

    const Hypergraph& h_;
    long long budget_;
    int stop_at_;
    std::vector<std::vector<char>> covered_;
    std::vector<char> skipped_;
    std::vector<std::vector<const Edge*>> by_first_;
    std::vector<Edge> current_, best_;
    long long nodes_ = 0;
    bool out_of_budget_ = false;
};

}  // namespace detail

/// Exact maximum matching size with a witness, by budgeted backtracking.
inline OracleResult max_matching(const Hypergraph& h,
                                 long long budget = kDefaultOracleBudget) {
    return detail::MatchingSearch(h, budget, h.side_size()).run();
}

/// Early-exit variant; Unknown when the budget ran out before a proof either way.
inline TriBool has_perfect_matching(const Hypergraph& h,
                                    long long budget = kDefaultOracleBudget) {
    OracleResult res = detail::MatchingSearch(h, budget, h.side_size()).run();
    if (res.max_matching_size == h.side_size()) return TriBool::True;
    return res.exact ? TriBool::False : TriBool::Unknown;
}

/// Lower-bound search used by the near-perfect builder: stops as soon as a
/// matching of `target` edges is found.
inline OracleResult find_matching_of_size(const Hypergraph& h, int target,
                                          long long budget = kDefaultOracleBudget) {
    return detail::MatchingSearch(h, budget, target).run();
}

}  // namespace rmatch
