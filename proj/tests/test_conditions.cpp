#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "rmatch/conditions.hpp"
#include "rmatch/generators.hpp"

using namespace rmatch;

TEST_CASE("main condition") {
    SECTION("complete graph satisfies every ordered side pair") {
        Hypergraph h = gen_complete(3, 3);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                if (a != b) REQUIRE(check_main_condition(h, a, b).holds);
    }
    SECTION("sharpness instance fails the strict part only") {
        Hypergraph h = gen_parity_sharpness(3, 2).graph;
        ConditionReport rep = check_main_condition(h, 0, 2);
        REQUIRE_FALSE(rep.holds);
        REQUIRE(rep.violations.size() == 4);  // all strict pairs at exactly n/2
        for (const Violation& v : rep.violations) {
            REQUIRE(v.cmp == Cmp::Greater);        // no weak-side violations
            REQUIRE_FALSE(v.tuple.occupied(0));    // all avoid the strict side
            REQUIRE(v.observed == 1);
            REQUIRE(h.degree(v.tuple) == 1);       // witness re-checks
        }
    }
    SECTION("empty hypergraph fails with a violation per tuple per part") {
        Hypergraph h(3, 2);
        ConditionReport rep = check_main_condition(h, 0, 2);
        REQUIRE_FALSE(rep.holds);
        REQUIRE(rep.violations.size() == 8);  // n^{r-1} per checked side
    }
    SECTION("equal sides are rejected") {
        Hypergraph h = gen_complete(3, 2);
        REQUIRE_THROWS_AS(check_main_condition(h, 1, 1), InvalidSides);
        REQUIRE_THROWS_AS(check_main_condition(h, 0, 3), InvalidSides);
    }
    SECTION("all-pairs conjunction equals the all-strict scan") {
        for (std::uint64_t seed : {21u, 22u, 23u, 24u, 25u, 26u, 27u, 28u}) {
            Hypergraph h = gen_random(3, 3, 0.75 + 0.02 * (seed % 5), seed);
            bool all_pairs = true;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    if (a != b && !check_main_condition(h, a, b).holds) all_pairs = false;
            bool all_strict = true;
            for (int avoided = 0; avoided < 3; ++avoided) {
                std::vector<int> sides;
                for (int s = 0; s < 3; ++s)
                    if (s != avoided) sides.push_back(s);
                for (const PartialTuple& f : enumerate_legal_tuples(h, sides))
                    if (2 * h.degree(f) <= h.side_size()) all_strict = false;
            }
            REQUIRE(all_pairs == all_strict);
        }
    }
}

TEST_CASE("ko threshold") {
    SECTION("complete n=4 falls below n/2 + sqrt(2n ln n)") {
        Hypergraph h = gen_complete(3, 4);
        double threshold = 2.0 + std::sqrt(8.0 * std::log(4.0));
        REQUIRE(threshold > 4.0);  // the degree everywhere is n = 4
        REQUIRE_FALSE(check_ko_threshold(h).holds);
    }
    SECTION("n=1 complete holds (threshold 0.5)") {
        REQUIRE(check_ko_threshold(gen_complete(3, 1)).holds);
    }
    SECTION("empty fails") {
        REQUIRE_FALSE(check_ko_threshold(Hypergraph(3, 2)).holds);
    }
}

TEST_CASE("ituple condition") {
    SECTION("complete holds") {
        Hypergraph h = gen_complete(3, 2);
        ConditionReport rep = check_itupl_condition(h, {0});
        REQUIRE(rep.holds);  // vertex degrees 4 > 2, pair degrees 2 >= 1
    }
    SECTION("sharpness fails the strict part for |I|=2") {
        Hypergraph h = gen_parity_sharpness(3, 2).graph;
        ConditionReport rep = check_itupl_condition(h, {0, 1});
        REQUIRE_FALSE(rep.holds);
        for (const Violation& v : rep.violations) {
            REQUIRE(v.cmp == Cmp::Greater);
            REQUIRE(h.degree(v.tuple) == v.observed);
        }
    }
    SECTION("empty fails") {
        REQUIRE_FALSE(check_itupl_condition(Hypergraph(3, 2), {1}).holds);
    }
    SECTION("improper subsets are rejected") {
        Hypergraph h = gen_complete(3, 2);
        REQUIRE_THROWS_AS(check_itupl_condition(h, {}), InvalidSubset);
        REQUIRE_THROWS_AS(check_itupl_condition(h, {0, 1, 2}), InvalidSubset);
        REQUIRE_THROWS_AS(check_itupl_condition(h, {0, 0}), InvalidSubset);
        REQUIRE_THROWS_AS(check_itupl_condition(h, {3}), InvalidSubset);
    }
}

TEST_CASE("fractional condition") {
    SECTION("no non-edges: vacuously true") {
        ConditionReport rep = check_fractional_condition(gen_complete(3, 2), {0});
        REQUIRE(rep.holds);
        REQUIRE_FALSE(rep.worst_tuple.has_value());
    }
    SECTION("sharpness instance sits exactly at 1") {
        Hypergraph h = gen_parity_sharpness(3, 2).graph;
        ConditionReport rep = check_fractional_condition(h, {0}, false);
        REQUIRE(rep.holds);
        REQUIRE(rep.normalized_degrees);
        REQUIRE(rep.normalized_degrees->first + rep.normalized_degrees->second == 1);
        // The strict form fails on the same instance.
        ConditionReport strict = check_fractional_condition(h, {0}, true);
        REQUIRE_FALSE(strict.holds);
        REQUIRE(strict.violations.size() == 4);  // every non-edge
    }
    SECTION("empty n=1 fails") {
        Hypergraph h(2, 1);
        ConditionReport rep = check_fractional_condition(h, {0});
        REQUIRE_FALSE(rep.holds);
        REQUIRE(rep.worst_tuple);
        REQUIRE(rep.normalized_degrees->first == 0);
        REQUIRE(rep.normalized_degrees->second == 0);
    }
    SECTION("strict implies non-strict") {
        for (std::uint64_t seed : {31u, 32u, 33u, 34u, 35u, 36u}) {
            Hypergraph h = gen_random(3, 3, 0.8, seed);
            if (check_fractional_condition(h, {0}, true).holds)
                REQUIRE(check_fractional_condition(h, {0}, false).holds);
        }
    }
    SECTION("per-tuple bounds imply the strict pairwise sum") {
        int checked = 0;
        for (std::uint64_t seed = 41; seed < 61; ++seed) {
            Hypergraph h = gen_random(3, 2, 0.9, seed);
            for (std::vector<int> I : {std::vector<int>{0}, std::vector<int>{0, 1}}) {
                if (check_itupl_condition(h, I).holds) {
                    ++checked;
                    REQUIRE(check_fractional_condition(h, I, true).holds);
                }
            }
        }
        REQUIRE(checked > 0);
    }
}

TEST_CASE("vertex degree condition") {
    SECTION("complete at fraction 1") {
        REQUIRE(check_vertex_degree(gen_complete(3, 2), Rational(1)).holds);
    }
    SECTION("union-cover instance has slack vertices") {
        ConditionReport rep = check_vertex_degree(gen_union_cover(3, 3, 1), Rational(1));
        REQUIRE_FALSE(rep.holds);
        for (const Violation& v : rep.violations) {
            REQUIRE(v.tuple.at(v.tuple.occupied_sides()[0]) >= 1);  // not an X vertex
            REQUIRE(v.observed == 5);  // n^2 - (n-1)^2 = 5
        }
    }
    SECTION("fraction 0 always holds") {
        REQUIRE(check_vertex_degree(Hypergraph(3, 2), Rational(0)).holds);
    }
    SECTION("default fraction is recorded") {
        ConditionReport rep = check_vertex_degree(gen_complete(3, 2), Rational(465, 724));
        REQUIRE(rep.holds);
        REQUIRE(rep.notes[0] == "fraction=465/724");
    }
}

TEST_CASE("latin property") {
    REQUIRE(check_latin_property(gen_latin_cyclic(3)).holds);
    REQUIRE_FALSE(check_latin_property(gen_complete(3, 2)).holds);
    REQUIRE(check_latin_property(gen_parity_sharpness(3, 2).graph).holds);
    REQUIRE_THROWS_AS(check_latin_property(gen_complete(4, 2)), UnsupportedArity);
}

TEST_CASE("report serialization") {
    Hypergraph h = gen_parity_sharpness(3, 2).graph;
    std::string text = to_text(check_main_condition(h, 0, 2));
    REQUIRE(text.find("CONDITION main FAILS") == 0);
    REQUIRE(text.find("VIOLATION (_,0,0) d=1 need>1/1") != std::string::npos);
    REQUIRE(text.find("TOTAL 4 violations") != std::string::npos);
    std::string holds = to_text(check_main_condition(gen_complete(3, 2), 0, 2));
    REQUIRE(holds.find("CONDITION main HOLDS") == 0);
    REQUIRE(holds.find("VIOLATION") == std::string::npos);

    SECTION("violation lines are capped at 20") {
        std::string empty_rep = to_text(check_main_condition(Hypergraph(3, 4), 0, 2));
        std::size_t count = 0, pos = 0;
        while ((pos = empty_rep.find("VIOLATION", pos)) != std::string::npos) {
            ++count;
            pos += 9;
        }
        REQUIRE(count == 20);
        REQUIRE(empty_rep.find("TOTAL 32 violations") != std::string::npos);
    }
}
