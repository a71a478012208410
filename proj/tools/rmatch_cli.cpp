// Command-line front end: instance generators, condition checkers, the
// constructive solver, the brute-force oracle, the exact LP engine, trace
// verification, and a CSV sweep harness.
//
// Exit codes: 0 success / condition holds; 1 failure (check fails, bad input,
// replay mismatch); 2 usage; 3 degree condition violated; 4 no perfect (or
// near-perfect) matching; 5 oracle budget exhausted.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rmatch/rmatch.hpp"

namespace {

struct ExitWith {
    int code;
};

long long oracle_budget() {
    if (const char* env = std::getenv("RMATCH_BUDGET")) {
        try {
            long long v = std::stoll(env);
            if (v > 0) return v;
        } catch (const std::exception&) {
        }
        std::cerr << "warning: ignoring unparsable RMATCH_BUDGET\n";
    }
    return rmatch::kDefaultOracleBudget;
}

rmatch::Hypergraph load_instance(const std::string& path) {
    if (path == "-") return rmatch::parse_hypergraph(std::cin);
    std::ifstream in(path);
    if (!in) throw rmatch::ParseError("cannot open " + path);
    rmatch::Hypergraph h = rmatch::parse_hypergraph(in);
    if (h.duplicates_dropped() > 0)
        std::cerr << "warning: dropped " << h.duplicates_dropped()
                  << " duplicate edge(s)\n";
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw rmatch::ParseError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit(const rmatch::Hypergraph& h, const std::string& spec_comment) {
    if (!spec_comment.empty()) std::cout << "# gen " << spec_comment << '\n';
    std::cout << rmatch::serialize(h);
}

std::vector<std::vector<int>> parse_table(const std::string& text) {
    std::vector<std::vector<int>> table;
    std::istringstream rows(text);
    std::string row;
    while (std::getline(rows, row, ';')) {
        std::vector<int> vals;
        std::istringstream cells(row);
        std::string cell;
        while (std::getline(cells, cell, ',')) vals.push_back(std::stoi(cell));
        table.push_back(std::move(vals));
    }
    return table;
}

std::pair<double, double> parse_range_d(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        double v = std::stod(text);
        return {v, v};
    }
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
}

std::pair<int, int> parse_range_i(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        int v = std::stoi(text);
        return {v, v};
    }
    return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
}

const char* tri_str(rmatch::TriBool t) {
    switch (t) {
        case rmatch::TriBool::True: return "yes";
        case rmatch::TriBool::False: return "no";
        case rmatch::TriBool::Unknown: return "unknown";
    }
    return "?";
}

void run_check(const std::string& file, const std::string& condition, int strict_side,
               int weak_side, std::vector<int> I, bool strict_form,
               const std::string& fraction) {
    rmatch::Hypergraph h = load_instance(file);
    rmatch::ConditionReport rep;
    if (condition == "main") {
        int weak = weak_side < 0 ? h.side_count() - 1 : weak_side;
        rep = rmatch::check_main_condition(h, strict_side, weak);
    } else if (condition == "ko") {
        rep = rmatch::check_ko_threshold(h);
    } else if (condition == "ituple") {
        rep = rmatch::check_itupl_condition(h, I);
    } else if (condition == "fractional") {
        rep = rmatch::check_fractional_condition(h, I, strict_form);
    } else if (condition == "vertex") {
        rep = rmatch::check_vertex_degree(h, rmatch::parse_fraction(fraction));
    } else if (condition == "latin") {
        rep = rmatch::check_latin_property(h);
    } else {
        std::cerr << "unknown condition: " << condition << '\n';
        throw ExitWith{2};
    }
    std::cout << rmatch::to_text(rep);
    throw ExitWith{rep.holds ? 0 : 1};
}

void run_match(const std::string& file, const std::string& trace_out) {
    rmatch::Hypergraph h = load_instance(file);
    rmatch::PerfectMatchingResult res;
    try {
        res = rmatch::find_perfect_matching(h, oracle_budget());
    } catch (const rmatch::ConditionViolated& e) {
        std::cout << rmatch::to_text(e.report);
        throw ExitWith{3};
    } catch (const rmatch::NoNearPerfectFound& e) {
        std::cerr << "error: " << e.what() << '\n';
        throw ExitWith{4};
    }
    std::cout << "# perfect matching, size " << res.matching.size() << '\n';
    for (const rmatch::Edge& e : res.matching.edges) {
        for (std::size_t s = 0; s < e.size(); ++s)
            std::cout << (s ? " " : "") << e[s];
        std::cout << '\n';
    }
    if (!trace_out.empty()) {
        std::ofstream out(trace_out);
        if (!out) throw rmatch::ParseError("cannot write " + trace_out);
        out << rmatch::serialize_trace(res);
    }
}

void run_oracle(const std::string& file) {
    rmatch::Hypergraph h = load_instance(file);
    rmatch::OracleResult res = rmatch::max_matching(h, oracle_budget());
    rmatch::TriBool perfect = res.exact
                                  ? (res.perfect_exists ? rmatch::TriBool::True
                                                        : rmatch::TriBool::False)
                                  : (res.max_matching_size == h.side_size()
                                         ? rmatch::TriBool::True
                                         : rmatch::TriBool::Unknown);
    std::cout << "max=" << res.max_matching_size << (res.exact ? "" : " (lower bound)")
              << " perfect=" << tri_str(perfect) << " nodes=" << res.nodes_explored
              << '\n';
    for (const rmatch::Edge& e : res.witness.edges)
        std::cout << rmatch::edge_to_string(e) << '\n';
    if (perfect == rmatch::TriBool::Unknown) throw ExitWith{5};
    if (perfect == rmatch::TriBool::False) throw ExitWith{4};
}

void run_lp(const std::string& file, const std::vector<int>& I, bool print_matching,
            bool print_cover) {
    rmatch::Hypergraph h = load_instance(file);
    auto nu = rmatch::fractional_matching_number(h);
    auto tau = rmatch::fractional_cover_number(h);
    std::cout << "nu*=" << rmatch::to_fraction_string(nu.value)
              << " tau*=" << rmatch::to_fraction_string(tau.value)
              << " duality=" << (nu.value == tau.value ? "ok" : "MISMATCH") << '\n';
    if (print_matching) std::cout << rmatch::to_text(nu.assignment);
    if (print_cover) std::cout << rmatch::to_text(tau.assignment);
    if (!I.empty()) {
        try {
            rmatch::FractionalAssignment pfm = rmatch::perfect_fractional_matching(h, I);
            std::cout << "# perfect fractional matching\n" << rmatch::to_text(pfm);
        } catch (const rmatch::ConditionViolated& e) {
            std::cout << rmatch::to_text(e.report);
            throw ExitWith{3};
        }
    }
}

void run_decompose(int n, int k) {
    for (const rmatch::Matching& m : rmatch::decompose_complete_multipartite(n, k)) {
        // Recover the offset vector from the edge through index 0.
        const rmatch::Edge& anchor = *std::find_if(
            m.edges.begin(), m.edges.end(), [](const rmatch::Edge& e) { return e[0] == 0; });
        std::cout << "c=(";
        for (int t = 1; t < k; ++t) std::cout << (t > 1 ? "," : "") << anchor[t];
        std::cout << ") :";
        for (const rmatch::Edge& e : m.edges) std::cout << ' ' << rmatch::edge_to_string(e);
        std::cout << '\n';
    }
}

void run_verify_trace(const std::string& file, const std::string& trace_path) {
    rmatch::Hypergraph h = load_instance(file);
    std::string why;
    if (rmatch::replay_trace(h, read_file(trace_path), &why)) {
        std::cout << "trace ok\n";
        return;
    }
    std::cout << "trace rejected: " << why << '\n';
    throw ExitWith{1};
}

void run_sweep(const std::string& family, int r, const std::string& n_range,
               const std::string& p_range, int count, std::uint64_t seed0, bool timing) {
    if (family != "random") {
        std::cerr << "only --family random is supported\n";
        throw ExitWith{2};
    }
    auto [n_lo, n_hi] = parse_range_i(n_range);
    auto [p_lo, p_hi] = parse_range_d(p_range);
    if (n_lo < 1 || n_hi < n_lo || count < 1) {
        std::cerr << "bad sweep ranges\n";
        throw ExitWith{2};
    }
    using Clock = std::chrono::steady_clock;
    auto ms_since = [](Clock::time_point t0) {
        return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0)
            .count();
    };
    std::cout << "# rmatch sweep v1\n";
    std::cout << "seed,family,r,n,p,edges,main_holds,solver,solver_ok,oracle_max,"
                 "oracle_perfect,nu_star,tau_star,duality,ms_check,ms_solve,ms_oracle,"
                 "ms_lp\n";
    const long long budget = oracle_budget();
    for (int i = 0; i < count; ++i) {
        std::uint64_t seed = seed0 + static_cast<std::uint64_t>(i);
        int n = n_lo + (n_hi > n_lo ? i % (n_hi - n_lo + 1) : 0);
        double p = count > 1 ? p_lo + (p_hi - p_lo) * (static_cast<double>(i) / (count - 1))
                             : p_lo;
        rmatch::Hypergraph h = rmatch::gen_random(r, n, p, seed);

        auto t0 = Clock::now();
        bool main_holds = rmatch::check_main_condition(h, 0, r - 1).holds;
        long long ms_check = ms_since(t0);

        t0 = Clock::now();
        std::string solver = "pm";
        bool solver_ok = false;
        try {
            auto res = rmatch::find_perfect_matching(h, budget);
            solver_ok = rmatch::validate_matching(h, res.matching).perfect &&
                        rmatch::replay_trace(h, rmatch::serialize_trace(res));
        } catch (const rmatch::ConditionViolated&) {
            solver = "condition_violated";
        } catch (const rmatch::NoNearPerfectFound&) {
            solver = "no_near_perfect";
        }
        long long ms_solve = ms_since(t0);

        t0 = Clock::now();
        rmatch::OracleResult oracle = rmatch::max_matching(h, budget);
        rmatch::TriBool perfect =
            oracle.exact ? (oracle.perfect_exists ? rmatch::TriBool::True
                                                  : rmatch::TriBool::False)
                         : (oracle.max_matching_size == n ? rmatch::TriBool::True
                                                          : rmatch::TriBool::Unknown);
        long long ms_oracle = ms_since(t0);

        t0 = Clock::now();
        auto nu = rmatch::fractional_matching_number(h);
        auto tau = rmatch::fractional_cover_number(h);
        long long ms_lp = ms_since(t0);

        std::ostringstream row;
        row << seed << ',' << family << ',' << r << ',' << n << ',' << p << ','
            << h.edge_count() << ',' << (main_holds ? 1 : 0) << ',' << solver << ','
            << (solver_ok ? 1 : 0) << ',' << oracle.max_matching_size << ','
            << tri_str(perfect) << ',' << rmatch::to_fraction_string(nu.value) << ','
            << rmatch::to_fraction_string(tau.value) << ','
            << (nu.value == tau.value ? "ok" : "MISMATCH") << ',';
        if (timing)
            row << ms_check << ',' << ms_solve << ',' << ms_oracle << ',' << ms_lp;
        else
            row << ",,,";
        std::cout << row.str() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"n-balanced r-partite hypergraph matching toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate an instance on stdout");
    gen->require_subcommand(1);
    int g_r = 3, g_n = 2, g_k = 0;
    double g_p = 0.5;
    std::uint64_t g_seed = 0;
    std::string g_rule = "cyclic", g_table;
    bool g_spec = false;
    auto add_spec = [&](CLI::App* cmd) {
        cmd->add_flag("--spec", g_spec, "echo the generator spec as a comment header");
    };
    auto* gen_complete = gen->add_subcommand("complete", "all n^r legal tuples");
    gen_complete->add_option("--r", g_r)->required();
    gen_complete->add_option("--n", g_n)->required();
    add_spec(gen_complete);
    gen_complete->callback([&] {
        emit(rmatch::gen_complete(g_r, g_n),
             g_spec ? "family=complete r=" + std::to_string(g_r) + " n=" + std::to_string(g_n)
                    : "");
    });
    auto* gen_parity = gen->add_subcommand(
        "parity", "sharp instance: even count of marked vertices per edge");
    gen_parity->add_option("--r", g_r)->required();
    gen_parity->add_option("--n", g_n)->required();
    add_spec(gen_parity);
    gen_parity->callback([&] {
        auto inst = rmatch::gen_parity_sharpness(g_r, g_n);
        std::string spec;
        if (g_spec) {
            spec = "family=parity r=" + std::to_string(g_r) + " n=" + std::to_string(g_n) +
                   " a_sizes=";
            for (std::size_t i = 0; i < inst.marked_sizes.size(); ++i)
                spec += (i ? "," : "") + std::to_string(inst.marked_sizes[i]);
        }
        emit(inst.graph, spec);
    });
    auto* gen_union = gen->add_subcommand("union", "all edges meeting the first k indices");
    gen_union->add_option("--r", g_r)->required();
    gen_union->add_option("--n", g_n)->required();
    gen_union->add_option("--k", g_k)->required();
    add_spec(gen_union);
    gen_union->callback([&] {
        emit(rmatch::gen_union_cover(g_r, g_n, g_k),
             g_spec ? "family=union r=" + std::to_string(g_r) + " n=" + std::to_string(g_n) +
                          " k=" + std::to_string(g_k)
                    : "");
    });
    auto* gen_latin = gen->add_subcommand("latin", "tripartite instance of a Latin square");
    gen_latin->add_option("--n", g_n);
    gen_latin->add_option("--rule", g_rule, "cyclic or explicit");
    gen_latin->add_option("--table", g_table, "rows 0,1;1,0 for --rule explicit");
    add_spec(gen_latin);
    gen_latin->callback([&] {
        rmatch::Hypergraph h = g_rule == "explicit"
                                   ? rmatch::gen_latin(parse_table(g_table))
                                   : rmatch::gen_latin_cyclic(g_n);
        emit(h, g_spec ? "family=latin n=" + std::to_string(h.side_size()) +
                             " rule=" + g_rule
                       : "");
    });
    auto* gen_random = gen->add_subcommand("random", "each tuple kept with probability p");
    gen_random->add_option("--r", g_r)->required();
    gen_random->add_option("--n", g_n)->required();
    gen_random->add_option("--p", g_p)->required();
    gen_random->add_option("--seed", g_seed)->required();
    add_spec(gen_random);
    gen_random->callback([&] {
        std::ostringstream spec;
        if (g_spec)
            spec << "family=random r=" << g_r << " n=" << g_n << " p=" << g_p
                 << " seed=" << g_seed;
        emit(rmatch::gen_random(g_r, g_n, g_p, g_seed), spec.str());
    });

    // check
    auto* check = app.add_subcommand("check", "evaluate a degree condition");
    std::string c_file, c_condition, c_fraction = "465/724";
    int c_strict = 0, c_weak = -1;
    std::vector<int> c_I;
    bool c_strict_form = false;
    check->add_option("file", c_file)->required();
    check->add_option("--condition", c_condition, "main|ko|ituple|fractional|vertex|latin")
        ->required();
    check->add_option("--strict", c_strict, "strict side (main)");
    check->add_option("--weak", c_weak, "weak side (main), default last");
    check->add_option("--I", c_I, "side subset, comma separated")->delimiter(',');
    check->add_flag("--strict-form", c_strict_form, "require > 1 instead of >= 1");
    check->add_option("--fraction", c_fraction, "vertex-degree fraction, default ~ 1-1/e");
    check->callback(
        [&] { run_check(c_file, c_condition, c_strict, c_weak, c_I, c_strict_form, c_fraction); });

    // match
    auto* match = app.add_subcommand("match", "find a perfect matching constructively");
    std::string m_file, m_trace_out;
    match->add_option("file", m_file)->required();
    match->add_option("--trace-out", m_trace_out, "write a replayable trace here");
    match->callback([&] { run_match(m_file, m_trace_out); });

    // oracle
    auto* oracle = app.add_subcommand("oracle", "exact maximum matching by backtracking");
    std::string o_file;
    oracle->add_option("file", o_file)->required();
    oracle->callback([&] { run_oracle(o_file); });

    // lp
    auto* lp = app.add_subcommand("lp", "exact fractional matching/cover optima");
    std::string l_file;
    std::vector<int> l_I;
    bool l_pm = false, l_pc = false;
    lp->add_option("file", l_file)->required();
    lp->add_option("--I", l_I, "side subset for the perfect fractional matching")
        ->delimiter(',');
    lp->add_flag("--print-matching", l_pm, "print the optimal edge weights");
    lp->add_flag("--print-cover", l_pc, "print the optimal vertex weights");
    lp->callback([&] { run_lp(l_file, l_I, l_pm, l_pc); });

    // decompose
    auto* decompose =
        app.add_subcommand("decompose", "perfect-matching partition of the complete k-graph");
    int d_n = 2, d_k = 2;
    decompose->add_option("--n", d_n)->required();
    decompose->add_option("--k", d_k)->required();
    decompose->callback([&] { run_decompose(d_n, d_k); });

    // verify_trace
    auto* verify = app.add_subcommand("verify_trace", "replay a solver trace");
    std::string v_file, v_trace;
    verify->add_option("file", v_file)->required();
    verify->add_option("--trace", v_trace)->required();
    verify->callback([&] { run_verify_trace(v_file, v_trace); });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "seeded random batch, CSV on stdout");
    std::string s_family = "random", s_n_range = "4", s_p_range = "0.9";
    int s_r = 3, s_count = 10;
    std::uint64_t s_seed0 = 1;
    bool s_timing = false;
    sweep->add_option("--family", s_family);
    sweep->add_option("--r", s_r);
    sweep->add_option("--n-range", s_n_range, "e.g. 3:5 or 4");
    sweep->add_option("--p-range", s_p_range, "e.g. 0.8:0.95 or 0.9");
    sweep->add_option("--count", s_count);
    sweep->add_option("--seed0", s_seed0);
    sweep->add_flag("--timing", s_timing,
                    "fill the ms_* columns (off keeps output byte-reproducible)");
    sweep->callback(
        [&] { run_sweep(s_family, s_r, s_n_range, s_p_range, s_count, s_seed0, s_timing); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const ExitWith& e) {
        return e.code;
    } catch (const rmatch::ConditionViolated& e) {
        std::cout << rmatch::to_text(e.report);
        return 3;
    } catch (const rmatch::NoNearPerfectFound& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const rmatch::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
