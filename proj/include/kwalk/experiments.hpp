#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kwalk/bounds.hpp"
#include "kwalk/estimate.hpp"
#include "kwalk/exact.hpp"
#include "kwalk/generators.hpp"
#include "kwalk/spectral.hpp"

namespace kwalk {

namespace detail {

inline std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

inline std::string fmt_opt(const std::optional<double>& x) {
    return x ? fmt(*x) : std::string();
}

}  // namespace detail

struct Scenario {
    std::string family;
    std::vector<Vertex> sizes;
    std::vector<std::uint32_t> ks;
    std::uint32_t trials = kDefaultTrials;
    std::uint64_t seed = 0;
    std::string start;  // "", "fixed:V", "center", "stationary", "uniform"
    nlohmann::json options = nlohmann::json::object();
};

/// Declarative experiment description, parsed from JSON. Every scenario must
/// carry an explicit seed; wall-clock seeding would break reproducibility.
struct ExperimentConfig {
    std::vector<Scenario> scenarios;
    std::string format = "csv";  // csv | json
    Vertex dense_limit = 256;    // exact hitting/mixing columns up to this n

    static ExperimentConfig from_json(const nlohmann::json& j) {
        static const std::vector<std::string> known_families{
            "cycle", "complete", "torus", "hypercube", "random_regular",
            "barbell", "erdos_renyi"};
        ExperimentConfig cfg;
        if (!j.is_object() || !j.contains("scenarios") || !j["scenarios"].is_array() ||
            j["scenarios"].empty())
            throw ArgError("config needs a non-empty 'scenarios' array");
        cfg.format = j.value("format", std::string("csv"));
        if (cfg.format != "csv" && cfg.format != "json")
            throw ArgError("config format must be 'csv' or 'json'");
        cfg.dense_limit = j.value("dense_limit", 256u);
        for (const auto& js : j["scenarios"]) {
            Scenario s;
            if (!js.contains("family")) throw ArgError("scenario missing 'family'");
            s.family = js["family"].get<std::string>();
            bool known = false;
            for (const auto& f : known_families) known = known || f == s.family;
            if (!known) throw ArgError("unknown family '" + s.family + "'");
            if (!js.contains("sizes") || !js["sizes"].is_array() || js["sizes"].empty())
                throw ArgError("scenario needs a non-empty 'sizes' array");
            for (const auto& v : js["sizes"]) s.sizes.push_back(v.get<Vertex>());
            if (!js.contains("ks") || !js["ks"].is_array() || js["ks"].empty())
                throw ArgError("scenario needs a non-empty 'ks' array");
            for (const auto& v : js["ks"]) {
                auto k = v.get<std::uint32_t>();
                if (k < 1) throw ArgError("scenario k values must be >= 1");
                s.ks.push_back(k);
            }
            s.trials = js.value("trials", kDefaultTrials);
            if (s.trials < 2) throw ArgError("scenario trials must be >= 2");
            if (!js.contains("seed")) throw ArgError("scenario missing explicit 'seed'");
            s.seed = js["seed"].get<std::uint64_t>();
            s.start = js.value("start", std::string());
            if (js.contains("options")) s.options = js["options"];
            cfg.scenarios.push_back(std::move(s));
        }
        return cfg;
    }
};

/// One (family, n, k) line of the report. Optional fields stay empty when
/// the quantity is unavailable (n over the dense limit, assumption failure,
/// or an upstream error recorded in `error`).
struct Table1Row {
    std::string family;
    Vertex n = 0;
    std::uint32_t k = 0;
    std::optional<double> c_hat, c_stderr;
    std::optional<double> ck_hat, ck_stderr;
    std::optional<double> s_hat, s_stderr;
    std::optional<double> h_max, h_min;
    std::optional<std::uint64_t> t_m;
    std::optional<double> lambda;
    std::optional<double> matthews_low, matthews_high;
    std::optional<double> baby_upper_v, kspeed_upper_v;
    std::optional<double> cycle_lower_v, cycle_upper_v;
    std::optional<double> grid_lower_v, mixing_lower_v;
    std::vector<std::string> flags;  // assumption / regime annotations
    bool sound = true;               // all applicable soundness checks passed
    std::string error;

    static std::string csv_header() {
        return "family,n,k,c_hat,c_stderr,ck_hat,ck_stderr,s_hat,s_stderr,h_max,h_min,"
               "t_m,lambda,matthews_low,matthews_high,baby_upper,kspeed_upper,"
               "cycle_lower,cycle_upper,grid_lower,mixing_lower,flags,sound,error";
    }

    void csv_line(std::ostream& out) const {
        using detail::fmt_opt;
        out << family << ',' << n << ',' << k << ',' << fmt_opt(c_hat) << ','
            << fmt_opt(c_stderr) << ',' << fmt_opt(ck_hat) << ',' << fmt_opt(ck_stderr)
            << ',' << fmt_opt(s_hat) << ',' << fmt_opt(s_stderr) << ',' << fmt_opt(h_max)
            << ',' << fmt_opt(h_min) << ',' << (t_m ? std::to_string(*t_m) : std::string())
            << ',' << fmt_opt(lambda) << ',' << fmt_opt(matthews_low) << ','
            << fmt_opt(matthews_high) << ',' << fmt_opt(baby_upper_v) << ','
            << fmt_opt(kspeed_upper_v) << ',' << fmt_opt(cycle_lower_v) << ','
            << fmt_opt(cycle_upper_v) << ',' << fmt_opt(grid_lower_v) << ','
            << fmt_opt(mixing_lower_v) << ',';
        for (std::size_t i = 0; i < flags.size(); ++i) out << (i ? ";" : "") << flags[i];
        out << ',' << (sound ? 1 : 0) << ',' << error << '\n';
    }

    nlohmann::json to_json() const {
        auto opt = [](const std::optional<double>& x) {
            return x ? nlohmann::json(*x) : nlohmann::json();
        };
        nlohmann::json j{{"family", family}, {"n", n}, {"k", k},
                         {"c_hat", opt(c_hat)}, {"c_stderr", opt(c_stderr)},
                         {"ck_hat", opt(ck_hat)}, {"ck_stderr", opt(ck_stderr)},
                         {"s_hat", opt(s_hat)}, {"s_stderr", opt(s_stderr)},
                         {"h_max", opt(h_max)}, {"h_min", opt(h_min)},
                         {"lambda", opt(lambda)},
                         {"matthews_low", opt(matthews_low)},
                         {"matthews_high", opt(matthews_high)},
                         {"baby_upper", opt(baby_upper_v)},
                         {"kspeed_upper", opt(kspeed_upper_v)},
                         {"cycle_lower", opt(cycle_lower_v)},
                         {"cycle_upper", opt(cycle_upper_v)},
                         {"grid_lower", opt(grid_lower_v)},
                         {"mixing_lower", opt(mixing_lower_v)},
                         {"flags", flags}, {"sound", sound}, {"error", error}};
        j["t_m"] = t_m ? nlohmann::json(*t_m) : nlohmann::json();
        return j;
    }
};

struct ExperimentReport {
    std::vector<Table1Row> rows;
    std::map<std::string, std::string> metadata;  // excluded from golden bodies
    std::vector<std::string> notes;
    bool all_sound = true;

    /// '#'-prefixed metadata, then a stable-order CSV body.
    void to_csv(std::ostream& out, bool include_metadata = true) const {
        if (include_metadata) {
            for (const auto& [key, value] : metadata) out << "# " << key << "=" << value << '\n';
            for (const auto& note : notes) out << "# note: " << note << '\n';
        }
        out << Table1Row::csv_header() << '\n';
        for (const auto& row : rows) row.csv_line(out);
    }

    nlohmann::json to_json() const {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& row : rows) rows_json.push_back(row.to_json());
        return {{"metadata", metadata},
                {"notes", notes},
                {"rows", rows_json},
                {"all_sound", all_sound}};
    }
};

namespace detail {

/// Seed index reserved for graph generation within a size; k indices and the
/// single-walk anchor (index 0) stay clear of it.
inline constexpr std::uint64_t kGraphSeedIndex = 0x6b77616c6bULL;

struct BuiltGraph {
    Graph g;
    Vertex center = 0;  // meaningful for barbell only
};

inline BuiltGraph build_family(const Scenario& s, Vertex n, std::uint64_t size_seed) {
    const auto& opt = s.options;
    std::uint64_t gen_seed = mix_seed(size_seed, kGraphSeedIndex);
    if (s.family == "cycle") return {gen_cycle(n), 0};
    if (s.family == "complete") return {gen_complete(n, opt.value("self_loops", true)), 0};
    if (s.family == "torus") {
        std::uint32_t d = opt.value("d", 2u);
        auto side = static_cast<Vertex>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
        std::uint64_t check = 1;
        for (std::uint32_t i = 0; i < d; ++i) check *= side;
        if (check != n) throw ArgError("torus size must be a perfect d-th power");
        return {gen_torus_grid(side, d), 0};
    }
    if (s.family == "hypercube") {
        std::uint32_t dim = 0;
        while ((Vertex{1} << dim) < n && dim < 31) ++dim;
        if ((Vertex{1} << dim) != n) throw ArgError("hypercube size must be a power of two");
        return {gen_hypercube(dim), 0};
    }
    if (s.family == "random_regular")
        return {gen_random_regular(n, opt.value("d", 8u), gen_seed), 0};
    if (s.family == "barbell") {
        auto bg = gen_barbell(n);
        return {std::move(bg.graph), bg.center};
    }
    if (s.family == "erdos_renyi") {
        double p = opt.value("p", 2.0 * std::log(static_cast<double>(n)) / n);
        return {gen_erdos_renyi(n, p, gen_seed), 0};
    }
    throw ArgError("unknown family '" + s.family + "'");
}

inline StartSpec resolve_start(const Scenario& s, const BuiltGraph& bg) {
    const std::string& spec = s.start;
    if (spec.empty())
        return s.family == "barbell" ? StartSpec::fixed(bg.center) : StartSpec::fixed(0);
    if (spec == "center") {
        if (s.family != "barbell") throw ArgError("start 'center' only applies to barbell");
        return StartSpec::fixed(bg.center);
    }
    if (spec == "stationary") return StartSpec::stationary();
    if (spec == "uniform") return StartSpec::uniform();
    if (spec.rfind("fixed:", 0) == 0) {
        auto v = static_cast<Vertex>(std::stoul(spec.substr(6)));
        return StartSpec::fixed(v);
    }
    throw ArgError("unknown start spec '" + spec + "'");
}

/// Everything shared by the rows of one (scenario, n) group.
struct SizeContext {
    std::optional<BuiltGraph> built;
    StartSpec start = StartSpec::fixed(0);
    std::optional<HittingMatrix> hit;
    std::optional<MixingResult> mix;
    std::optional<double> lambda;
    std::optional<Estimate> anchor;  // single-walk cover estimate
    std::vector<std::string> flags;
    std::string error;
};

inline SizeContext prepare_size(const Scenario& s, Vertex n, Vertex dense_limit,
                                unsigned workers) {
    SizeContext ctx;
    std::uint64_t size_seed = mix_seed(s.seed, n);
    try {
        ctx.built = build_family(s, n, size_seed);
        ctx.start = resolve_start(s, *ctx.built);
    } catch (const Error& e) {
        ctx.error = e.what();
        return ctx;
    }
    const Graph& g = ctx.built->g;
    if (n <= dense_limit) {
        try {
            ctx.hit = hitting_matrix(g, dense_limit);
        } catch (const Error& e) {
            ctx.flags.push_back(std::string("exact_hitting_failed:") + e.what());
        }
        try {
            // Bipartite chains are periodic; fall back to the lazy kernel.
            bool lazy = s.options.value("lazy", g.bipartite());
            ctx.mix = mixing_time(g, lazy);
            if (lazy) ctx.flags.push_back("t_m_lazy_kernel");
        } catch (const Error& e) {
            ctx.flags.push_back(std::string("exact_mixing_failed:") + e.what());
        }
    }
    if (s.family == "random_regular") {
        try {
            double lam = second_eigenvalue(g, 1e-9);
            ctx.lambda = lam;
            auto d = static_cast<double>(g.regular_degree());
            if (lam >= d - 1.0) ctx.flags.push_back("non_expander_sample");
        } catch (const Error& e) {
            ctx.flags.push_back(std::string("lambda_failed:") + e.what());
        }
    }
    try {
        ctx.anchor = estimate_cover(g, ctx.start, 1, s.trials, mix_seed(size_seed, 0), 0,
                                    workers);
    } catch (const Error& e) {
        ctx.error = e.what();
    }
    return ctx;
}

void attach_bounds(const Scenario& s, Vertex n, std::uint32_t k, const SizeContext& ctx,
                   double a, double sa, double b, double sb, Table1Row& row);

inline Table1Row make_row(const Scenario& s, Vertex n, std::uint32_t k,
                          const SizeContext& ctx, unsigned workers) {
    Table1Row row;
    row.family = s.family;
    row.n = n;
    row.k = k;
    row.flags = ctx.flags;
    if (!ctx.error.empty()) {
        row.error = ctx.error;
        return row;
    }
    const Graph& g = ctx.built->g;
    std::uint64_t size_seed = mix_seed(s.seed, n);
    row.c_hat = ctx.anchor->mean;
    row.c_stderr = ctx.anchor->std_error;
    if (ctx.hit) {
        row.h_max = ctx.hit->h_max;
        row.h_min = ctx.hit->h_min;
    }
    if (ctx.mix) row.t_m = ctx.mix->t_m;
    row.lambda = ctx.lambda;

    Estimate ck;
    try {
        ck = estimate_cover(g, ctx.start, k, s.trials, mix_seed(size_seed, k), 0, workers);
    } catch (const Error& e) {
        row.error = e.what();
        return row;
    }
    row.ck_hat = ck.mean;
    row.ck_stderr = ck.std_error;
    double a = ctx.anchor->mean, sa = ctx.anchor->std_error;
    double b = ck.mean, sb = ck.std_error;
    if (b > 3.0 * sb) {
        row.s_hat = a / b;
        row.s_stderr = std::sqrt(sa * sa / (b * b) + a * a * sb * sb / (b * b * b * b));
    } else {
        row.flags.push_back("unstable_ratio");
    }

    // Bound columns plus their soundness checks against the measurements.
    try {
        attach_bounds(s, n, k, ctx, a, sa, b, sb, row);
    } catch (const Error& e) {
        row.flags.push_back(std::string("bounds_failed:") + e.what());
    }
    return row;
}

inline void attach_bounds(const Scenario& s, Vertex n, std::uint32_t k,
                          const SizeContext& ctx, double a, double sa, double b,
                          double sb, Table1Row& row) {
    if (ctx.hit) {
        auto [mlow, mhigh] = matthews_bounds(ctx.hit->h_min, ctx.hit->h_max, n);
        row.matthews_low = mlow;
        row.matthews_high = mhigh;
        if (a + 3.0 * sa < mlow || a - 3.0 * sa > mhigh) {
            row.sound = false;
            row.flags.push_back("matthews_violated");
        }
        if (n >= 3) {
            BoundReport baby = baby_matthews_upper(ctx.hit->h_max, n, k);
            row.baby_upper_v = baby.value;
            if (!baby.ok()) {
                row.flags.push_back("baby_regime_exceeded");
            } else if (b - 3.0 * sb > baby.value) {
                row.sound = false;
                row.flags.push_back("baby_violated");
            }
        }
        if (a > ctx.hit->h_max) {
            BoundReport ks =
                kspeed_upper(a, ctx.hit->h_max, k, default_f_val(a, ctx.hit->h_max));
            row.kspeed_upper_v = ks.value;
            if (b - 3.0 * sb > ks.value) {
                row.sound = false;
                row.flags.push_back("kspeed_violated");
            }
        }
    }
    if (s.family == "cycle") {
        BoundReport cb = cycle_bounds(n, k);
        row.cycle_lower_v = cb.value;
        if (b + 3.0 * sb < cb.value) {
            row.sound = false;
            row.flags.push_back("cycle_lower_violated");
        }
        if (cb.upper) {
            row.cycle_upper_v = *cb.upper;
            if (b - 3.0 * sb > *cb.upper) {
                row.sound = false;
                row.flags.push_back("cycle_upper_violated");
            }
        } else {
            row.flags.push_back("cycle_upper_regime_exceeded");
        }
    }
    if (s.family == "torus" && k >= 2) {
        std::uint32_t d = s.options.value("d", 2u);
        BoundReport gl = grid_lower(n, d, k);
        row.grid_lower_v = gl.value;
        if (b + 3.0 * sb < gl.value) {
            row.sound = false;
            row.flags.push_back("grid_lower_violated");
        }
    }
    if (ctx.mix && k <= n) {
        // Order-only reference: recorded, never enforced as a soundness gate.
        row.mixing_lower_v = mixing_speedup_lower(k, ctx.mix->t_m, n).value;
    }
}

}  // namespace detail

/// Desk-scale reproduction of the speed-up summary table: for every
/// (family, n, k) requested, measured single- and k-walk cover times with
/// confidence intervals, exact hitting/mixing columns when n is within the
/// dense limit, and every applicable closed-form bound with its soundness
/// verdict. Rows are keyed and sorted by (family, n, k); failures stay in
/// their row.
inline ExperimentReport run_table1(const ExperimentConfig& cfg, unsigned workers = 1) {
    auto t0 = std::chrono::steady_clock::now();
    ExperimentReport report;
    bool cycle_exact_seen = false;
    for (const auto& s : cfg.scenarios) {
        for (Vertex n : s.sizes) {
            detail::SizeContext ctx = detail::prepare_size(s, n, cfg.dense_limit, workers);
            if (s.family == "cycle" && ctx.hit) cycle_exact_seen = true;
            for (std::uint32_t k : s.ks)
                report.rows.push_back(detail::make_row(s, n, k, ctx, workers));
        }
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const Table1Row& x, const Table1Row& y) {
                  return std::tie(x.family, x.n, x.k) < std::tie(y.family, y.n, y.k);
              });
    for (const auto& row : report.rows) report.all_sound = report.all_sound && row.sound;
    if (cycle_exact_seen)
        report.notes.push_back(
            "cycle rows report the exact h_max = n^2/4 (max of j(n-j)); "
            "summary tables elsewhere sometimes quote n^2/2");
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    report.metadata["version"] = "kwalk 1.0.0";
    report.metadata["runtime_ms"] = std::to_string(ms);
    report.metadata["dense_limit"] = std::to_string(cfg.dense_limit);
    return report;
}

struct BarbellParams {
    double ratio_lo = 3.0;      // quadratic-growth window for C when n doubles
    double ratio_hi = 5.5;
    double k_ratio_max = 2.8;   // linear-growth ceiling for C^k when n doubles
    double exception_factor = 2.0;  // speed-up above factor*k flags the exception
};

struct BarbellReport {
    Vertex n_big = 0, n_small = 0;
    std::uint32_t k_big = 0, k_small = 0;
    Vertex center_big = 0, center_small = 0;
    Estimate c_big, c_small, ck_big, ck_small;
    double c_ratio = 0.0, ck_ratio = 0.0;
    double s_hat = 0.0;  // speed-up at n_big from the center
    BarbellParams params;
    bool quadratic_ok = false, linear_ok = false, exception_flag = false;

    nlohmann::json to_json() const {
        return {{"n_big", n_big},
                {"n_small", n_small},
                {"k_big", k_big},
                {"k_small", k_small},
                {"c_big", c_big.to_json()},
                {"c_small", c_small.to_json()},
                {"ck_big", ck_big.to_json()},
                {"ck_small", ck_small.to_json()},
                {"c_ratio", c_ratio},
                {"ck_ratio", ck_ratio},
                {"s_hat", s_hat},
                {"ratio_window", {params.ratio_lo, params.ratio_hi}},
                {"k_ratio_max", params.k_ratio_max},
                {"exception_factor", params.exception_factor},
                {"quadratic_ok", quadratic_ok},
                {"linear_ok", linear_ok},
                {"exception_flag", exception_flag}};
    }
};

/// Measures the barbell center-start cover times at n and at the nearest odd
/// half size: the single walk should grow like n^2 across the doubling while
/// the ceil(20 ln n)-walk grows linearly, which makes the speed-up exceed
/// any constant multiple of k once n is large enough.
inline BarbellReport run_barbell(Vertex n, std::uint32_t trials, std::uint64_t seed,
                                 const BarbellParams& params = {}, unsigned workers = 1) {
    if (n % 2 == 0) throw ArgError("barbell run needs odd n");
    if (n < 21) throw ArgError("barbell run needs n >= 21");
    Vertex half = n / 2;
    if (half % 2 == 0) ++half;  // nearest odd to n/2 (round up on ties)

    BarbellReport rep;
    rep.params = params;
    rep.n_big = n;
    rep.n_small = half;

    auto measure = [&](Vertex size, Vertex& center_out, std::uint32_t& k_out,
                       Estimate& c_out, Estimate& ck_out) {
        auto bg = gen_barbell(size);
        center_out = bg.center;
        k_out = static_cast<std::uint32_t>(
            std::ceil(20.0 * std::log(static_cast<double>(size))));
        std::uint64_t size_seed = mix_seed(seed, size);
        StartSpec start = StartSpec::fixed(bg.center);
        c_out = estimate_cover(bg.graph, start, 1, trials, mix_seed(size_seed, 0), 0, workers);
        ck_out = estimate_cover(bg.graph, start, k_out, trials, mix_seed(size_seed, k_out),
                                0, workers);
    };
    measure(rep.n_big, rep.center_big, rep.k_big, rep.c_big, rep.ck_big);
    measure(rep.n_small, rep.center_small, rep.k_small, rep.c_small, rep.ck_small);

    rep.c_ratio = rep.c_big.mean / rep.c_small.mean;
    rep.ck_ratio = rep.ck_big.mean / rep.ck_small.mean;
    rep.s_hat = rep.c_big.mean / rep.ck_big.mean;
    rep.quadratic_ok = rep.c_ratio >= params.ratio_lo && rep.c_ratio <= params.ratio_hi;
    rep.linear_ok = rep.ck_ratio <= params.k_ratio_max;
    rep.exception_flag = rep.s_hat > params.exception_factor * rep.k_big;
    return rep;
}

struct CompositionReport {
    std::uint64_t t_c = 0, t_h = 0;
    std::uint32_t k = 0, ell = 0;
    ProportionEstimate p_c;   // worst-start full-length cover probability
    ProportionEstimate p_h;   // worst-pair hit probability within t_h
    Vertex worst_start = 0;
    Vertex worst_pair_u = 0, worst_pair_v = 0;
    bool pairs_exhaustive = true;
    ProportionEstimate lhs;   // measured cover probability of the composed walk
    double rhs = 0.0;         // composition bound at the measured p_c, p_h
    double sigma_joint = 0.0;
    bool holds = false;

    nlohmann::json to_json() const {
        return {{"T_c", t_c},
                {"T_h", t_h},
                {"k", k},
                {"ell", ell},
                {"p_c", p_c.to_json()},
                {"p_h", p_h.to_json()},
                {"worst_start", worst_start},
                {"worst_pair", {worst_pair_u, worst_pair_v}},
                {"pairs_exhaustive", pairs_exhaustive},
                {"lhs", lhs.to_json()},
                {"rhs", rhs},
                {"sigma_joint", sigma_joint},
                {"holds", holds}};
    }
};

namespace detail {

/// P[walk from u hits v within t_h steps], same per-trial seeding as run_hit.
inline ProportionEstimate hit_prob_within(const Graph& g, Vertex u, Vertex v,
                                          std::uint64_t t_h, std::uint32_t trials,
                                          std::uint64_t seed, unsigned workers) {
    auto samples = run_trials(trials, workers, [&](std::uint32_t i) {
        SplitMix64 rng(mix_seed(mix_seed(seed, i), 0));
        Vertex pos = u;
        for (std::uint64_t t = 1; t <= t_h; ++t) {
            pos = step(g, pos, rng);
            if (pos == v) return 1.0;
        }
        return 0.0;
    });
    std::uint32_t successes = 0;
    for (double s : samples) successes += s > 0.5 ? 1 : 0;
    return make_proportion(successes, trials, seed);
}

}  // namespace detail

/// Empirical check of the cover-probability composition: measure p_c (a
/// single length-T_c walk covers from the worst start), p_h (worst-pair hit
/// within T_h), then verify that a k-walk of length T_c/k + ell*T_h covers
/// at least as often as p_c (1 - k (1-p_h)^ell), within a 3 sigma joint
/// margin propagated through the formula.
inline CompositionReport run_composition_check(const Graph& g, std::uint64_t t_c,
                                               std::uint64_t t_h, std::uint32_t k,
                                               std::uint32_t ell, std::uint32_t trials,
                                               std::uint64_t seed, unsigned workers = 1) {
    if (k < 1 || ell < 1) throw ArgError("composition needs k, ell >= 1");
    if (t_c % k != 0) throw ArgError("composition needs T_c divisible by k");
    if (!g.connected()) throw ArgError("composition check needs a connected graph");

    CompositionReport rep;
    rep.t_c = t_c;
    rep.t_h = t_h;
    rep.k = k;
    rep.ell = ell;

    // p_c: minimum over all starts (n is desk-scale here, sweep them all).
    std::uint64_t pc_seed = mix_seed(seed, 1);
    bool have = false;
    for (Vertex u = 0; u < g.n(); ++u) {
        auto est = estimate_cover_prob(g, {u}, t_c, trials, mix_seed(pc_seed, u), workers);
        if (!have || est.p_hat < rep.p_c.p_hat) {
            rep.p_c = est;
            rep.worst_start = u;
            have = true;
        }
    }

    // p_h: minimum over ordered pairs; exhaustive when affordable, sampled
    // (with the pair recorded) otherwise.
    std::uint64_t ph_seed = mix_seed(seed, 2);
    std::uint64_t n64 = g.n();
    const std::uint64_t budget = 64;
    rep.pairs_exhaustive = n64 * (n64 - 1) <= budget * budget;
    have = false;
    auto consider = [&](Vertex u, Vertex v) {
        if (u == v) return;
        auto est = detail::hit_prob_within(g, u, v, t_h, trials,
                                           mix_seed(ph_seed, n64 * u + v), workers);
        if (!have || est.p_hat < rep.p_h.p_hat) {
            rep.p_h = est;
            rep.worst_pair_u = u;
            rep.worst_pair_v = v;
            have = true;
        }
    };
    if (rep.pairs_exhaustive) {
        for (Vertex u = 0; u < g.n(); ++u)
            for (Vertex v = 0; v < g.n(); ++v) consider(u, v);
    } else {
        SplitMix64 pair_rng(mix_seed(ph_seed, n64 * n64));
        for (std::uint64_t i = 0; i < budget; ++i)
            consider(pair_rng.next_below(g.n()), pair_rng.next_below(g.n()));
    }

    // Composed walk: k walkers, all from the worst start, for T_c/k + ell*T_h.
    std::vector<Vertex> starts(k, rep.worst_start);
    std::uint64_t composed_len = t_c / k + static_cast<std::uint64_t>(ell) * t_h;
    rep.lhs = estimate_cover_prob(g, starts, composed_len, trials, mix_seed(seed, 3), workers);

    rep.rhs = compose_cover_prob(rep.p_c.p_hat, rep.p_h.p_hat, k, ell);
    // First-order propagation through p_c (1 - k (1-p_h)^ell).
    double miss = std::pow(1.0 - rep.p_h.p_hat, static_cast<double>(ell));
    double d_pc = 1.0 - k * miss;
    double d_ph = rep.p_c.p_hat * k * ell *
                  std::pow(1.0 - rep.p_h.p_hat, static_cast<double>(ell) - 1.0);
    double var_rhs = d_pc * d_pc * rep.p_c.std_error() * rep.p_c.std_error() +
                     d_ph * d_ph * rep.p_h.std_error() * rep.p_h.std_error();
    rep.sigma_joint = std::sqrt(var_rhs + rep.lhs.std_error() * rep.lhs.std_error());
    rep.holds = rep.lhs.p_hat >= rep.rhs - 3.0 * rep.sigma_joint;
    return rep;
}

struct ScanRow {
    std::string family;
    Vertex n = 0;
    std::uint32_t k = 0;
    std::optional<double> s_hat, s_stderr;
    double c_up = 2.0, c_lo = 0.1;
    bool upper_ok = false, lower_ok = false;
    bool exception_candidate = false;
    std::string error;

    static std::string csv_header() {
        return "family,n,k,s_hat,s_stderr,c_up,c_lo,upper_ok,lower_ok,"
               "exception_candidate,error";
    }

    void csv_line(std::ostream& out) const {
        using detail::fmt;
        using detail::fmt_opt;
        out << family << ',' << n << ',' << k << ',' << fmt_opt(s_hat) << ','
            << fmt_opt(s_stderr) << ',' << fmt(c_up) << ',' << fmt(c_lo) << ','
            << (upper_ok ? 1 : 0) << ',' << (lower_ok ? 1 : 0) << ','
            << (exception_candidate ? 1 : 0) << ',' << error << '\n';
    }

    nlohmann::json to_json() const {
        auto opt = [](const std::optional<double>& x) {
            return x ? nlohmann::json(*x) : nlohmann::json();
        };
        return {{"family", family}, {"n", n},       {"k", k},
                {"s_hat", opt(s_hat)}, {"s_stderr", opt(s_stderr)},
                {"c_up", c_up},      {"c_lo", c_lo}, {"upper_ok", upper_ok},
                {"lower_ok", lower_ok}, {"exception_candidate", exception_candidate},
                {"error", error}};
    }
};

struct ScanReport {
    std::vector<ScanRow> rows;
    std::map<std::string, std::string> metadata;

    void to_csv(std::ostream& out, bool include_metadata = true) const {
        if (include_metadata)
            for (const auto& [key, value] : metadata) out << "# " << key << "=" << value << '\n';
        out << ScanRow::csv_header() << '\n';
        for (const auto& row : rows) row.csv_line(out);
    }

    nlohmann::json to_json() const {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const auto& row : rows) rows_json.push_back(row.to_json());
        return {{"metadata", metadata}, {"rows", rows_json}};
    }
};

/// Empirical sweep of the two speed-up conjectures: for every requested row,
/// flags whether the measured speed-up stays below c_up * k and above
/// c_lo * ln k. Barbell rows started from the center are annotated as the
/// known exception candidate rather than treated as failures.
inline ScanReport run_conjecture_scan(const ExperimentConfig& cfg, unsigned workers = 1) {
    auto t0 = std::chrono::steady_clock::now();
    ScanReport report;
    for (const auto& s : cfg.scenarios) {
        double c_up = s.options.value("c_up", 2.0);
        double c_lo = s.options.value("c_lo", 0.1);
        for (Vertex n : s.sizes) {
            detail::SizeContext ctx = detail::prepare_size(s, n, 0, workers);
            for (std::uint32_t k : s.ks) {
                ScanRow row;
                row.family = s.family;
                row.n = n;
                row.k = k;
                row.c_up = c_up;
                row.c_lo = c_lo;
                row.exception_candidate =
                    s.family == "barbell" && ctx.built &&
                    ctx.start.kind == StartSpec::Kind::Fixed &&
                    ctx.start.fixed_vertex == ctx.built->center;
                if (!ctx.error.empty()) {
                    row.error = ctx.error;
                    report.rows.push_back(row);
                    continue;
                }
                try {
                    Estimate ck = estimate_cover(ctx.built->g, ctx.start, k, s.trials,
                                                 mix_seed(mix_seed(s.seed, n), k), 0, workers);
                    double a = ctx.anchor->mean, sa = ctx.anchor->std_error;
                    double b = ck.mean, sb = ck.std_error;
                    if (b <= 3.0 * sb) throw UnstableRatioError("k-walk mean too close to 0");
                    row.s_hat = a / b;
                    row.s_stderr =
                        std::sqrt(sa * sa / (b * b) + a * a * sb * sb / (b * b * b * b));
                    row.upper_ok = *row.s_hat <= c_up * static_cast<double>(k);
                    row.lower_ok = *row.s_hat >= c_lo * std::log(static_cast<double>(k));
                } catch (const Error& e) {
                    row.error = e.what();
                }
                report.rows.push_back(row);
            }
        }
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const ScanRow& x, const ScanRow& y) {
                  return std::tie(x.family, x.n, x.k) < std::tie(y.family, y.n, y.k);
              });
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    report.metadata["version"] = "kwalk 1.0.0";
    report.metadata["runtime_ms"] = std::to_string(ms);
    return report;
}

}  // namespace kwalk
