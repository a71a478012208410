#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "rmatch/generators.hpp"
#include "rmatch/lp.hpp"
#include "rmatch/oracle.hpp"

using namespace rmatch;

namespace {

bool feasible_matching(const Hypergraph& h, const FractionalAssignment& fa) {
    for (const auto& [e, w] : fa.edge_weights)
        if (w < 0 || !h.has_edge(e)) return false;
    for (const Rational& load : matching_loads(h, fa))
        if (load > 1) return false;
    return true;
}

bool feasible_cover(const Hypergraph& h, const FractionalAssignment& fa) {
    std::vector<Rational> weight(h.side_count() * h.side_size());
    for (const auto& [v, w] : fa.vertex_weights) {
        if (w < 0) return false;
        weight[v.side * h.side_size() + v.index] = w;
    }
    for (const Edge& e : h.edges()) {
        Rational mass = 0;
        for (int s = 0; s < h.side_count(); ++s) mass += weight[s * h.side_size() + e[s]];
        if (mass < 1) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("fractional matching number") {
    SECTION("complete 3-partite n=3") {
        auto opt = fractional_matching_number(gen_complete(3, 3));
        REQUIRE(opt.value == 3);
        REQUIRE(feasible_matching(gen_complete(3, 3), opt.assignment));
    }
    SECTION("sharpness instance reaches n fractionally") {
        Hypergraph h = gen_parity_sharpness(3, 2).graph;
        auto opt = fractional_matching_number(h);
        REQUIRE(opt.value == 2);
        REQUIRE(feasible_matching(h, opt.assignment));
        // Certificate pair: uniform weight 1/2 on the 4 edges is feasible with
        // value 2, and the uniform 1/3 cover gives the same total, so both are
        // optimal independently of the solver.
        std::vector<Rational> loads(6);
        for (const Edge& e : h.edges())
            for (int s = 0; s < 3; ++s) loads[s * 2 + e[s]] += Rational(1, 2);
        for (const Rational& load : loads) REQUIRE(load == 1);
    }
    SECTION("empty edge set") {
        auto opt = fractional_matching_number(Hypergraph(3, 2));
        REQUIRE(opt.value == 0);
        REQUIRE(opt.assignment.edge_weights.empty());
    }
}

TEST_CASE("fractional cover number") {
    SECTION("complete 3-partite n=2 needs one full side") {
        auto opt = fractional_cover_number(gen_complete(3, 2));
        REQUIRE(opt.value == 2);
        REQUIRE(feasible_cover(gen_complete(3, 2), opt.assignment));
    }
    SECTION("single edge") {
        Hypergraph h(3, 1, {{0, 0, 0}});
        REQUIRE(fractional_cover_number(h).value == 1);
    }
    SECTION("sharpness instance") {
        REQUIRE(fractional_cover_number(gen_parity_sharpness(3, 2).graph).value == 2);
    }
    SECTION("empty edge set has cover number 0") {
        auto opt = fractional_cover_number(Hypergraph(3, 2));
        REQUIRE(opt.value == 0);
        REQUIRE(opt.assignment.total == 0);
    }
}

TEST_CASE("duality and the integrality sandwich") {
    REQUIRE(verify_duality(gen_complete(3, 3)));
    REQUIRE(verify_duality(gen_parity_sharpness(3, 2).graph));
    for (std::uint64_t seed = 100; seed < 150; ++seed) {
        int r = 2 + static_cast<int>(seed % 2);
        int n = 2 + static_cast<int>(seed % 3);
        double p = 0.25 + 0.15 * (seed % 5);
        Hypergraph h = gen_random(r, n, p, seed);
        auto nu = fractional_matching_number(h);
        auto tau = fractional_cover_number(h);
        REQUIRE(nu.value == tau.value);
        REQUIRE(feasible_matching(h, nu.assignment));
        REQUIRE(feasible_cover(h, tau.assignment));
        // weak duality between the two produced assignments
        REQUIRE(nu.assignment.total <= tau.assignment.total);
        OracleResult oracle = max_matching(h);
        REQUIRE(oracle.exact);
        REQUIRE(Rational(oracle.max_matching_size) <= nu.value);
        REQUIRE(nu.value <= n);
    }
}

TEST_CASE("integrality gap exhibit") {
    Hypergraph h = gen_parity_sharpness(3, 2).graph;
    REQUIRE(fractional_matching_number(h).value == 2);
    REQUIRE(max_matching(h).max_matching_size == 1);
}

TEST_CASE("complete multipartite decomposition") {
    SECTION("n=2 k=2: the two diagonals") {
        auto ms = decompose_complete_multipartite(2, 2);
        REQUIRE(ms.size() == 2);
        REQUIRE(ms[0].edges == std::vector<Edge>{{0, 0}, {1, 1}});
        REQUIRE(ms[1].edges == std::vector<Edge>{{0, 1}, {1, 0}});
    }
    SECTION("k=1: a single matching of singletons") {
        auto ms = decompose_complete_multipartite(3, 1);
        REQUIRE(ms.size() == 1);
        REQUIRE(ms[0].edges == std::vector<Edge>{{0}, {1}, {2}});
    }
    SECTION("n=3 k=3: nine disjoint perfect matchings") {
        auto ms = decompose_complete_multipartite(3, 3);
        REQUIRE(ms.size() == 9);
        std::set<Edge> all;
        for (const Matching& m : ms) {
            REQUIRE(m.size() == 3);
            for (const Edge& e : m.edges) REQUIRE(all.insert(e).second);
        }
        REQUIRE(all.size() == 27);
    }
    SECTION("partition property over the whole desk range") {
        for (int n = 1; n <= 5; ++n)
            for (int k = 1; k <= 3; ++k) {
                auto ms = decompose_complete_multipartite(n, k);
                long long expect = 1;
                for (int i = 0; i < k - 1; ++i) expect *= n;
                REQUIRE(static_cast<long long>(ms.size()) == expect);
                std::set<Edge> all;
                Hypergraph complete = gen_complete(std::max(k, 2), n);
                for (const Matching& m : ms) {
                    REQUIRE(m.size() == static_cast<std::size_t>(n));
                    std::vector<std::set<int>> used(k);
                    for (const Edge& e : m.edges) {
                        REQUIRE(all.insert(e).second);
                        for (int s = 0; s < k; ++s) REQUIRE(used[s].insert(e[s]).second);
                    }
                }
                REQUIRE(static_cast<long long>(all.size()) == expect * n);
            }
    }
}

TEST_CASE("good tuple selection") {
    SECTION("complete graph: every I-tuple is good") {
        Hypergraph h = gen_complete(3, 3);
        PartialTuple z = PartialTuple::from_edge({0, 1, 2});
        auto sel = select_good_matching(h, {0, 1}, z);
        REQUIRE(sel.family.size() == 3);
    }
    SECTION("empty graph: empty family, vacuous bound") {
        Hypergraph h(3, 2);
        auto sel = select_good_matching(h, {0, 1}, PartialTuple::from_edge({0, 0, 0}));
        REQUIRE(sel.family.empty());
    }
    SECTION("sharpness instance: one diagonal holds both good pairs") {
        Hypergraph h = gen_parity_sharpness(3, 2).graph;
        // z = (0,1,1) is a non-edge; good pairs y have (y0,y1,1) an edge.
        PartialTuple z = PartialTuple::from_edge({0, 1, 1});
        auto sel = select_good_matching(h, {0, 1}, z);
        REQUIRE(sel.offset == std::vector<int>{0});
        REQUIRE(sel.family.size() == 2);
        REQUIRE(sel.family[0] == PartialTuple(3, {{0, 0}, {1, 0}}));
        REQUIRE(sel.family[1] == PartialTuple(3, {{0, 1}, {1, 1}}));
    }
    SECTION("family members are pairwise disjoint and good") {
        for (std::uint64_t seed = 160; seed < 170; ++seed) {
            Hypergraph h = gen_random(3, 4, 0.7, seed);
            PartialTuple z = PartialTuple::from_edge({0, 0, 0});
            for (std::vector<int> I : {std::vector<int>{0, 1}, std::vector<int>{2}}) {
                auto sel = select_good_matching(h, I, z);
                std::vector<int> comp;
                for (int s = 0; s < 3; ++s)
                    if (std::find(I.begin(), I.end(), s) == I.end()) comp.push_back(s);
                for (std::size_t a = 0; a < sel.family.size(); ++a) {
                    Edge e(3);
                    for (int s : I) e[s] = sel.family[a].at(s);
                    for (int s : comp) e[s] = z.at(s);
                    REQUIRE(h.has_edge(e));
                    for (std::size_t b = a + 1; b < sel.family.size(); ++b)
                        for (int s : I)
                            REQUIRE(sel.family[a].at(s) != sel.family[b].at(s));
                }
            }
        }
    }
}

TEST_CASE("cover analysis") {
    auto vertex_assignment = [](const Hypergraph& h, std::vector<Rational> w) {
        FractionalAssignment fa;
        fa.kind = FractionalAssignment::Kind::VertexWeights;
        for (int s = 0; s < h.side_count(); ++s)
            for (int i = 0; i < h.side_size(); ++i) {
                fa.vertex_weights.emplace_back(Vertex{s, i},
                                               w[s * h.side_size() + i]);
                fa.total += w[s * h.side_size() + i];
            }
        return fa;
    };

    SECTION("uniform 1/r cover on the complete graph: minima already sum to 1") {
        Hypergraph h = gen_complete(3, 3);
        auto fa = vertex_assignment(h, std::vector<Rational>(9, Rational(1, 3)));
        CoverAnalysis ca = analyze_cover(h, fa, {0});
        REQUIRE_FALSE(ca.split_branch);
        REQUIRE(ca.bound == 3);
        REQUIRE(ca.cover_total == 3);
    }
    SECTION("sharpness instance, lopsided-but-tight cover") {
        Hypergraph h = gen_parity_sharpness(3, 2).graph;
        auto fa = vertex_assignment(
            h, {Rational(1, 2), Rational(1, 2), Rational(1, 4), Rational(1, 4),
                Rational(1, 4), Rational(1, 4)});
        CoverAnalysis ca = analyze_cover(h, fa, {0});
        REQUIRE_FALSE(ca.split_branch);
        REQUIRE(ca.min_sum_selected == Rational(1, 2));
        REQUIRE(ca.min_sum_complement == Rational(1, 2));
        REQUIRE(ca.bound == 2);
    }
    SECTION("perturbed cover drives the split branch") {
        Hypergraph h = gen_parity_sharpness(3, 2).graph;
        auto fa = vertex_assignment(h, {Rational(1, 2), Rational(1), Rational(0),
                                        Rational(1, 2), Rational(0), Rational(1, 2)});
        CoverAnalysis ca = analyze_cover(h, fa, {0});
        REQUIRE(ca.split_branch);
        REQUIRE(ca.norm_deg_selected == Rational(1, 2));
        REQUIRE(ca.norm_deg_complement == Rational(1, 2));
        REQUIRE(ca.bound == 2);  // still reaches n
        REQUIRE(ca.bound <= ca.cover_total);
        REQUIRE_FALSE(ca.good_selected.empty());
        REQUIRE_FALSE(ca.good_complement.empty());
        // |Y| >= ceil(zeta * n)
        REQUIRE(BigInt(static_cast<long long>(ca.good_selected.size())) >=
                rational_ceil(ca.norm_deg_complement * h.side_size()));
    }
    SECTION("non-covers are rejected") {
        Hypergraph h = gen_complete(3, 2);
        auto fa = vertex_assignment(h, std::vector<Rational>(6, Rational(1, 4)));
        REQUIRE_THROWS_AS(analyze_cover(h, fa, {0}), NotACover);
    }
    SECTION("bound never exceeds the cover total on solver outputs") {
        for (std::uint64_t seed = 180; seed < 190; ++seed) {
            Hypergraph h = gen_random(3, 3, 0.85, seed);
            if (h.edge_count() == 0) continue;
            auto tau = fractional_cover_number(h);
            CoverAnalysis ca = analyze_cover(h, tau.assignment, {0});
            REQUIRE(ca.bound <= ca.cover_total);
            REQUIRE(ca.cover_total == tau.value);
        }
    }
}

TEST_CASE("perfect fractional matching") {
    SECTION("complete 3-partite n=2") {
        Hypergraph h = gen_complete(3, 2);
        auto fa = perfect_fractional_matching(h, {0});
        for (const Rational& load : matching_loads(h, fa)) REQUIRE(load == 1);
        REQUIRE(fa.total == 2);
    }
    SECTION("sharpness instance with I={0}") {
        Hypergraph h = gen_parity_sharpness(3, 2).graph;
        auto fa = perfect_fractional_matching(h, {0});
        for (const Rational& load : matching_loads(h, fa)) REQUIRE(load == 1);
    }
    SECTION("refusal carries the violating tuple") {
        try {
            perfect_fractional_matching(Hypergraph(3, 2), {0});
            FAIL("expected ConditionViolated");
        } catch (const ConditionViolated& e) {
            REQUIRE_FALSE(e.report.holds);
            REQUIRE(e.report.worst_tuple.has_value());
        }
    }
    SECTION("degree condition forces a fractionally perfect optimum") {
        int holds = 0;
        for (std::uint64_t seed = 200; seed < 230; ++seed) {
            Hypergraph h = gen_random(3, 3, 0.9, seed);
            if (!check_fractional_condition(h, {0}).holds) continue;
            ++holds;
            REQUIRE(fractional_matching_number(h).value == h.side_size());
        }
        REQUIRE(holds > 0);
    }
}

TEST_CASE("assignment serialization") {
    Hypergraph h = gen_parity_sharpness(3, 2).graph;
    auto nu = fractional_matching_number(h);
    std::string text = to_text(nu.assignment);
    // one line per edge, canonical order, exact fractions
    REQUIRE(text.find("(0,0,1) ") == 0);
    std::size_t lines = std::count(text.begin(), text.end(), '\n');
    REQUIRE(lines == h.edge_count());
    auto tau = fractional_cover_number(h);
    std::string cover_text = to_text(tau.assignment);
    REQUIRE(cover_text.find("0:0 ") == 0);
    REQUIRE(std::count(cover_text.begin(), cover_text.end(), '\n') == 6);
}
