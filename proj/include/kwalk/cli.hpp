#pragma once

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kwalk/bounds.hpp"
#include "kwalk/estimate.hpp"
#include "kwalk/exact.hpp"
#include "kwalk/experiments.hpp"
#include "kwalk/generators.hpp"
#include "kwalk/graph.hpp"
#include "kwalk/spectral.hpp"

namespace kwalk::cli {

namespace detail {

/// Shared flags for subcommands that need a graph: either --graph FILE or an
/// inline --family description.
struct GraphArgs {
    std::string path;
    std::string family;
    Vertex n = 0;
    std::uint32_t d = 0;       // torus dimensions / regular degree
    double p = 0.0;            // erdos_renyi edge probability
    bool self_loops = false;   // complete graph option
    std::uint64_t gen_seed = 0;
    bool gen_seed_given = false;
    Vertex barbell_center = 0;

    void attach(CLI::App* cmd, bool with_gen_seed_note = false) {
        auto* graph_opt = cmd->add_option("--graph", path, "Edge-list graph file");
        auto* family_opt =
            cmd->add_option("--family", family,
                            "Generate in-process: cycle|complete|torus|hypercube|"
                            "random_regular|barbell|erdos_renyi")
                ->check(CLI::IsMember({"cycle", "complete", "torus", "hypercube",
                                       "random_regular", "barbell", "erdos_renyi"}));
        graph_opt->excludes(family_opt);
        family_opt->excludes(graph_opt);
        cmd->add_option("--n", n, "Vertex count for --family")->capture_default_str();
        cmd->add_option("--d", d,
                        "Torus dimensions (default 2) or regular degree (default 8)")
            ->capture_default_str();
        cmd->add_option("--p", p, "Edge probability for erdos_renyi (default 2 ln n / n)")
            ->capture_default_str();
        cmd->add_flag("--self-loops", self_loops, "Complete graph: add a loop at every vertex");
        if (with_gen_seed_note) {
            auto* gs = cmd->add_option("--gen-seed", gen_seed,
                                       "Seed for random families when generating inline");
            gs->each([this](const std::string&) { gen_seed_given = true; });
        }
    }

    bool stochastic_family() const {
        return family == "random_regular" || family == "erdos_renyi";
    }

    Graph build() {
        if (!path.empty()) {
            std::ifstream in(path);
            if (!in) throw UsageError("cannot open graph file '" + path + "'");
            try {
                return read_graph_file(in);
            } catch (const ParseError& e) {
                throw UsageError("unreadable graph file '" + path + "': " + e.what());
            }
        }
        if (family.empty())
            throw UsageError("either --graph or --family is required");
        if (n == 0) throw UsageError("--family needs --n");
        if (stochastic_family() && !gen_seed_given)
            throw UsageError("random families need --gen-seed (or use the gen subcommand)");
        if (family == "cycle") return gen_cycle(n);
        if (family == "complete") return gen_complete(n, self_loops);
        if (family == "torus") {
            std::uint32_t dims = d == 0 ? 2 : d;
            auto side = static_cast<Vertex>(
                std::llround(std::pow(static_cast<double>(n), 1.0 / dims)));
            std::uint64_t check = 1;
            for (std::uint32_t i = 0; i < dims; ++i) check *= side;
            if (check != n) throw UsageError("torus --n must be a perfect d-th power");
            return gen_torus_grid(side, dims);
        }
        if (family == "hypercube") {
            std::uint32_t dim = 0;
            while ((Vertex{1} << dim) < n && dim < 31) ++dim;
            if ((Vertex{1} << dim) != n) throw UsageError("hypercube --n must be a power of two");
            return gen_hypercube(dim);
        }
        if (family == "random_regular") return gen_random_regular(n, d == 0 ? 8 : d, gen_seed);
        if (family == "barbell") {
            auto bg = gen_barbell(n);
            barbell_center = bg.center;
            return std::move(bg.graph);
        }
        if (family == "erdos_renyi") {
            double prob = p == 0.0 ? 2.0 * std::log(static_cast<double>(n)) / n : p;
            return gen_erdos_renyi(n, prob, gen_seed);
        }
        throw UsageError("unknown family '" + family + "'");
    }
};

inline StartSpec parse_start(const std::string& text, const GraphArgs& args) {
    if (text.empty() || text == "fixed:0") {
        if (args.family == "barbell") return StartSpec::fixed(args.barbell_center);
        return StartSpec::fixed(0);
    }
    if (text == "center") {
        if (args.family != "barbell")
            throw UsageError("start 'center' only applies to --family barbell");
        return StartSpec::fixed(args.barbell_center);
    }
    if (text == "stationary") return StartSpec::stationary();
    if (text == "uniform") return StartSpec::uniform();
    if (text.rfind("fixed:", 0) == 0) {
        try {
            return StartSpec::fixed(static_cast<Vertex>(std::stoul(text.substr(6))));
        } catch (const std::exception&) {
            throw UsageError("bad start vertex in '" + text + "'");
        }
    }
    if (text.rfind("explicit:", 0) == 0) {
        std::vector<Vertex> vs;
        std::stringstream ss(text.substr(9));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                vs.push_back(static_cast<Vertex>(std::stoul(item)));
            } catch (const std::exception&) {
                throw UsageError("bad start vertex in '" + text + "'");
            }
        }
        if (vs.empty()) throw UsageError("explicit start list is empty");
        return StartSpec::explicit_starts(std::move(vs));
    }
    throw UsageError("unknown start spec '" + text + "' (fixed:V|center|stationary|uniform|explicit:V,V,...)");
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty()) {
        out << text;
        if (!text.empty() && text.back() != '\n') out << '\n';
        return;
    }
    std::ofstream f(out_path);
    if (!f) throw UsageError("cannot write to '" + out_path + "'");
    f << text;
    if (!text.empty() && text.back() != '\n') f << '\n';
}

inline nlohmann::json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("bad JSON in '" + path + "': " + e.what());
    }
}

}  // namespace detail

/// Parses and runs one invocation. Returns the process exit status:
/// 0 success, 1 invariant/soundness failure, 2 usage error.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"k parallel random walks on graphs: simulation, exact Markov-chain "
                 "quantities, closed-form bounds, and speed-up experiments"};
    app.set_version_flag("--version", "kwalk 1.0.0");
    app.require_subcommand(1);

    unsigned workers = 1;
    app.add_option("--workers", workers,
                   "Monte Carlo worker threads (0 = all hardware threads); results "
                   "do not depend on this")
        ->envname("KWALK_WORKERS")
        ->capture_default_str();

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a graph and write its edge list");
    std::string gen_family;
    Vertex gen_n = 0;
    std::uint32_t gen_d = 0;
    double gen_p = 0.0;
    bool gen_self_loops = false;
    std::uint64_t gen_seed = 0;
    bool gen_seed_given = false;
    std::string gen_out;
    gen->add_option("--family", gen_family,
                    "cycle|complete|torus|hypercube|random_regular|barbell|erdos_renyi")
        ->required()
        ->check(CLI::IsMember({"cycle", "complete", "torus", "hypercube", "random_regular",
                               "barbell", "erdos_renyi"}));
    gen->add_option("--n", gen_n, "Vertex count")->required();
    gen->add_option("--d", gen_d, "Torus dimensions (default 2) or regular degree (default 8)")
        ->capture_default_str();
    gen->add_option("--p", gen_p, "Edge probability for erdos_renyi (default 2 ln n / n)")
        ->capture_default_str();
    gen->add_flag("--self-loops", gen_self_loops, "Complete graph: add a loop at every vertex");
    gen->add_option("--seed", gen_seed, "Seed (required for random families)")
        ->each([&gen_seed_given](const std::string&) { gen_seed_given = true; });
    gen->add_option("--out", gen_out, "Output file (default stdout)");

    // cover
    auto* cover = app.add_subcommand("cover", "Estimate k-walk cover time (JSON Estimate)");
    detail::GraphArgs cover_graph;
    cover_graph.attach(cover, true);
    std::uint32_t cover_k = 1, cover_trials = kDefaultTrials;
    std::uint64_t cover_seed = 0, cover_cap = 0;
    std::string cover_start, cover_out;
    bool cover_max = false;
    cover->add_option("--k", cover_k, "Number of parallel walkers")->capture_default_str();
    cover->add_option("--trials", cover_trials, "Monte Carlo trials")->capture_default_str();
    cover->add_option("--seed", cover_seed, "Seed (mandatory: reproducibility is the product)")
        ->required();
    cover->add_option("--cap", cover_cap, "Round cap per trial (0 = 64 n^3)")
        ->capture_default_str();
    cover->add_option("--start", cover_start,
                      "fixed:V|center|stationary|uniform|explicit:V,V,... "
                      "(default fixed:0; barbell defaults to its center)");
    cover->add_flag("--max", cover_max,
                    "Maximize over heuristic candidate starts and report the argmax");
    cover->add_option("--out", cover_out, "Output file (default stdout)");

    // hit
    auto* hit = app.add_subcommand("hit", "Hitting time: Monte Carlo estimate or exact solve");
    detail::GraphArgs hit_graph;
    hit_graph.attach(hit, true);
    Vertex hit_from = 0, hit_to = 0;
    std::uint32_t hit_trials = kDefaultTrials;
    std::uint64_t hit_seed = 0, hit_cap = 0;
    bool hit_seed_given = false, hit_exact = false, hit_all = false;
    std::string hit_out;
    hit->add_option("--from", hit_from, "Start vertex")->capture_default_str();
    hit->add_option("--to", hit_to, "Target vertex")->capture_default_str();
    hit->add_option("--trials", hit_trials, "Monte Carlo trials")->capture_default_str();
    hit->add_option("--seed", hit_seed, "Seed (required unless --exact)")
        ->each([&hit_seed_given](const std::string&) { hit_seed_given = true; });
    hit->add_option("--cap", hit_cap, "Step cap per trial (0 = 64 n^3)")->capture_default_str();
    hit->add_flag("--exact", hit_exact, "Dense fundamental-matrix solve instead of Monte Carlo");
    hit->add_flag("--all", hit_all, "With --exact: emit the full n x n matrix as CSV");
    hit->add_option("--out", hit_out, "Output file (default stdout)");

    // mix
    auto* mix = app.add_subcommand("mix", "Exact mixing time (JSON)");
    detail::GraphArgs mix_graph;
    mix_graph.attach(mix, true);
    std::string mix_kernel = "auto";
    std::uint64_t mix_cap = 1u << 20;
    std::string mix_out;
    mix->add_option("--kernel", mix_kernel, "auto|lazy|plain (auto = lazy iff bipartite)")
        ->check(CLI::IsMember({"auto", "lazy", "plain"}))
        ->capture_default_str();
    mix->add_option("--t-cap", mix_cap, "Give up beyond this t")->capture_default_str();
    mix->add_option("--out", mix_out, "Output file (default stdout)");

    // bounds
    auto* bounds = app.add_subcommand("bounds", "Evaluate a closed-form bound (JSON report)");
    std::string bound_name, bounds_out;
    double b_h_min = 0, b_h_max = 0, b_cover = 0, b_f_val = 0, b_eps = 0.1, b_lambda = 0,
           b_p_c = 0, b_p_h = 0, b_d = 0;
    std::uint64_t b_n = 0, b_t_m = 0;
    std::uint32_t b_k = 1, b_ell = 1, b_dims = 2;
    bounds->add_option("--name", bound_name,
                       "matthews|baby_matthews|kspeed|compose|expander_hit|"
                       "expander_budget|cycle|grid|mixing")
        ->required()
        ->check(CLI::IsMember({"matthews", "baby_matthews", "kspeed", "compose",
                               "expander_hit", "expander_budget", "cycle", "grid",
                               "mixing"}));
    bounds->add_option("--h-min", b_h_min, "Minimum pairwise hitting time");
    bounds->add_option("--h-max", b_h_max, "Maximum pairwise hitting time");
    bounds->add_option("--n", b_n, "Vertex count");
    bounds->add_option("--k", b_k, "Walker count")->capture_default_str();
    bounds->add_option("--cover", b_cover, "Cover time C");
    bounds->add_option("--f-val", b_f_val, "Surrogate f value (default ln(cover/h_max))");
    bounds->add_option("--eps", b_eps, "Surrogate for the (1+o(1)) factor")
        ->capture_default_str();
    bounds->add_option("--lambda", b_lambda, "Second adjacency eigenvalue magnitude");
    bounds->add_option("--d", b_d, "Regular degree (expander bounds)");
    bounds->add_option("--dims", b_dims, "Grid dimensions")->capture_default_str();
    bounds->add_option("--p-c", b_p_c, "Cover probability for compose");
    bounds->add_option("--p-h", b_p_h, "Hit probability for compose");
    bounds->add_option("--ell", b_ell, "Hit-phase repetitions for compose")
        ->capture_default_str();
    bounds->add_option("--t-m", b_t_m, "Mixing time for the mixing bound");
    bounds->add_option("--out", bounds_out, "Output file (default stdout)");

    // compose
    auto* compose = app.add_subcommand(
        "compose", "Empirical composition-inequality check on a graph (JSON report)");
    detail::GraphArgs compose_graph;
    compose_graph.attach(compose, true);
    std::uint64_t compose_tc = 0, compose_th = 0, compose_seed = 0;
    std::uint32_t compose_k = 1, compose_ell = 1, compose_trials = kDefaultTrials;
    std::string compose_out;
    compose->add_option("--tc", compose_tc, "Single-walk cover budget T_c")->required();
    compose->add_option("--th", compose_th, "Per-phase hit budget T_h")->required();
    compose->add_option("--k", compose_k, "Walkers")->capture_default_str();
    compose->add_option("--ell", compose_ell, "Hit-phase repetitions")->capture_default_str();
    compose->add_option("--trials", compose_trials, "Trials per probability")
        ->capture_default_str();
    compose->add_option("--seed", compose_seed, "Seed")->required();
    compose->add_option("--out", compose_out, "Output file (default stdout)");

    // table1
    auto* table1 = app.add_subcommand(
        "table1", "Run the speed-up summary experiment from a JSON config");
    std::string table1_config, table1_out;
    table1->add_option("--config", table1_config, "Experiment config JSON file")->required();
    table1->add_option("--out", table1_out, "Output file (default stdout)");

    // barbell
    auto* barbell = app.add_subcommand(
        "barbell", "Barbell growth-ratio experiment: n vs nearest odd n/2 (JSON report)");
    Vertex barbell_n = 0;
    std::uint32_t barbell_trials = kDefaultTrials;
    std::uint64_t barbell_seed = 0;
    BarbellParams barbell_params;
    std::string barbell_out;
    barbell->add_option("--n", barbell_n, "Odd size >= 21")->required();
    barbell->add_option("--trials", barbell_trials, "Trials per estimate")
        ->capture_default_str();
    barbell->add_option("--seed", barbell_seed, "Seed")->required();
    barbell->add_option("--ratio-lo", barbell_params.ratio_lo, "Quadratic-growth window low")
        ->capture_default_str();
    barbell->add_option("--ratio-hi", barbell_params.ratio_hi, "Quadratic-growth window high")
        ->capture_default_str();
    barbell->add_option("--k-ratio-max", barbell_params.k_ratio_max,
                        "Linear-growth ceiling for the k-walk ratio")
        ->capture_default_str();
    barbell->add_option("--exception-factor", barbell_params.exception_factor,
                        "Speed-up above factor*k flags the conjecture exception")
        ->capture_default_str();
    barbell->add_option("--out", barbell_out, "Output file (default stdout)");

    // scan
    auto* scan = app.add_subcommand(
        "scan", "Conjecture scan: flag speed-ups outside [c_lo ln k, c_up k]");
    std::string scan_config, scan_out;
    scan->add_option("--config", scan_config, "Experiment config JSON file")->required();
    scan->add_option("--out", scan_out, "Output file (default stdout)");

    // Top-level flags (--workers) may appear after the subcommand name.
    for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
        sub->fallthrough();

    try {
        std::vector<const char*> argv;
        argv.reserve(args.size() + 1);
        argv.push_back("kwalk");
        for (const auto& a : args) argv.push_back(a.c_str());
        try {
            app.parse(static_cast<int>(argv.size()), argv.data());
        } catch (const CLI::ParseError& e) {
            // help/version exit with 0; anything else is a usage error
            return app.exit(e, out, err) == 0 ? 0 : 2;
        }

        if (gen->parsed()) {
            detail::GraphArgs ga;
            ga.family = gen_family;
            ga.n = gen_n;
            ga.d = gen_d;
            ga.p = gen_p;
            ga.self_loops = gen_self_loops;
            ga.gen_seed = gen_seed;
            ga.gen_seed_given = gen_seed_given;
            if (ga.stochastic_family() && !gen_seed_given)
                throw UsageError("--seed is required for family '" + gen_family + "'");
            Graph g = ga.build();
            detail::emit(serialize_graph(g), gen_out, out);
            return 0;
        }
        if (cover->parsed()) {
            Graph g = cover_graph.build();
            if (cover_max) {
                auto cands = candidate_starts(g);
                auto [vertex, est] = estimate_cover_max(g, cover_k, cover_trials, cover_seed,
                                                        cands, cover_cap, workers);
                nlohmann::json j{{"vertex", vertex}, {"estimate", est.to_json()}};
                nlohmann::json cj = nlohmann::json::array();
                for (auto c : cands) cj.push_back(c);
                j["candidates"] = cj;
                detail::emit(j.dump(2), cover_out, out);
            } else {
                StartSpec start = detail::parse_start(cover_start, cover_graph);
                Estimate est = estimate_cover(g, start, cover_k, cover_trials, cover_seed,
                                              cover_cap, workers);
                detail::emit(est.to_json().dump(2), cover_out, out);
            }
            return 0;
        }
        if (hit->parsed()) {
            Graph g = hit_graph.build();
            if (hit_exact) {
                HittingMatrix hm = hitting_matrix(g);
                if (hit_all) {
                    std::ostringstream csv;
                    hm.to_csv(csv);
                    detail::emit(csv.str(), hit_out, out);
                } else {
                    if (hit_from >= g.n() || hit_to >= g.n())
                        throw UsageError("--from/--to out of range");
                    nlohmann::json j{{"u", hit_from},
                                     {"v", hit_to},
                                     {"h", hm(hit_from, hit_to)},
                                     {"h_max", hm.h_max},
                                     {"h_min", hm.h_min}};
                    detail::emit(j.dump(2), hit_out, out);
                }
            } else {
                if (hit_all) throw UsageError("--all needs --exact");
                if (!hit_seed_given) throw UsageError("--seed is required unless --exact");
                Estimate est = estimate_hitting(g, hit_from, hit_to, hit_trials, hit_seed,
                                                hit_cap, workers);
                detail::emit(est.to_json().dump(2), hit_out, out);
            }
            return 0;
        }
        if (mix->parsed()) {
            Graph g = mix_graph.build();
            bool lazy = mix_kernel == "lazy" || (mix_kernel == "auto" && g.bipartite());
            MixingResult mr = mixing_time(g, lazy, mix_cap);
            double max_dist = 0.0;
            for (double d : mr.distances) max_dist = std::max(max_dist, d);
            nlohmann::json j{{"t_m", mr.t_m},
                             {"lazy", mr.lazy},
                             {"max_distance", max_dist},
                             {"threshold", std::exp(-1.0)},
                             {"n", g.n()}};
            detail::emit(j.dump(2), mix_out, out);
            return 0;
        }
        if (bounds->parsed()) {
            nlohmann::json j;
            if (bound_name == "matthews") {
                auto [lo, hi] = matthews_bounds(b_h_min, b_h_max, b_n);
                j = {{"name", "matthews"},
                     {"value", lo},
                     {"upper", hi},
                     {"inputs", {{"h_min", b_h_min}, {"h_max", b_h_max}, {"n", b_n}}},
                     {"intermediates", {{"H_n", harmonic_number(b_n)}}}};
            } else if (bound_name == "baby_matthews") {
                j = baby_matthews_upper(b_h_max, b_n, b_k).to_json();
            } else if (bound_name == "kspeed") {
                double f = b_f_val > 0 ? b_f_val : default_f_val(b_cover, b_h_max);
                j = kspeed_upper(b_cover, b_h_max, b_k, f, b_eps).to_json();
            } else if (bound_name == "compose") {
                double v = compose_cover_prob(b_p_c, b_p_h, b_k, b_ell);
                j = {{"name", "compose"},
                     {"value", v},
                     {"inputs",
                      {{"p_c", b_p_c}, {"p_h", b_p_h}, {"k", b_k}, {"ell", b_ell}}}};
            } else if (bound_name == "expander_hit") {
                j = expander_hit_lower(b_n, b_d, b_lambda).to_json();
            } else if (bound_name == "expander_budget") {
                j = expander_walk_budget(b_n, b_d, b_lambda, b_k).to_json();
            } else if (bound_name == "cycle") {
                j = cycle_bounds(b_n, b_k).to_json();
            } else if (bound_name == "grid") {
                j = grid_lower(b_n, b_dims, b_k).to_json();
            } else if (bound_name == "mixing") {
                j = mixing_speedup_lower(b_k, b_t_m, b_n).to_json();
            }
            detail::emit(j.dump(2), bounds_out, out);
            return 0;
        }
        if (compose->parsed()) {
            Graph g = compose_graph.build();
            CompositionReport rep = run_composition_check(
                g, compose_tc, compose_th, compose_k, compose_ell, compose_trials,
                compose_seed, workers);
            detail::emit(rep.to_json().dump(2), compose_out, out);
            return rep.holds ? 0 : 1;
        }
        if (table1->parsed()) {
            auto cfg = ExperimentConfig::from_json(detail::load_json(table1_config));
            ExperimentReport rep = run_table1(cfg, workers);
            if (cfg.format == "json") {
                detail::emit(rep.to_json().dump(2), table1_out, out);
            } else {
                std::ostringstream csv;
                rep.to_csv(csv);
                detail::emit(csv.str(), table1_out, out);
            }
            return rep.all_sound ? 0 : 1;
        }
        if (barbell->parsed()) {
            BarbellReport rep =
                run_barbell(barbell_n, barbell_trials, barbell_seed, barbell_params, workers);
            detail::emit(rep.to_json().dump(2), barbell_out, out);
            return rep.quadratic_ok && rep.linear_ok ? 0 : 1;
        }
        if (scan->parsed()) {
            auto cfg = ExperimentConfig::from_json(detail::load_json(scan_config));
            ScanReport rep = run_conjecture_scan(cfg, workers);
            if (cfg.format == "json") {
                detail::emit(rep.to_json().dump(2), scan_out, out);
            } else {
                std::ostringstream csv;
                rep.to_csv(csv);
                detail::emit(csv.str(), scan_out, out);
            }
            return 0;
        }
        err << "error: no subcommand\n";
        return 2;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ArgError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace kwalk::cli
