#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "kwalk/graph.hpp"
#include "kwalk/rng.hpp"
#include "kwalk/walks.hpp"

namespace kwalk {

inline constexpr std::uint32_t kDefaultTrials = 1000;

/// Monte Carlo point estimate. stderr is the sample standard deviation over
/// sqrt(trials); cap_hits stays 0 because timed-out trials reject the whole
/// estimate instead of biasing the mean.
struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint32_t trials = 0;
    std::uint64_t seed = 0;
    std::uint32_t cap_hits = 0;

    nlohmann::json to_json() const {
        return {{"mean", mean},
                {"stderr", std_error},
                {"trials", trials},
                {"seed", seed},
                {"cap_hits", cap_hits}};
    }
};

struct SpeedupEstimate {
    double s_hat = 0.0;
    double std_error = 0.0;
    std::uint32_t k = 0;
    Estimate numerator;    // single-walk cover estimate
    Estimate denominator;  // k-walk cover estimate

    nlohmann::json to_json() const {
        return {{"s_hat", s_hat},
                {"stderr", std_error},
                {"k", k},
                {"numerator", numerator.to_json()},
                {"denominator", denominator.to_json()}};
    }
};

/// Proportion estimate with a Wilson 95% interval (well-behaved near 0 and 1).
struct ProportionEstimate {
    double p_hat = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
    std::uint32_t successes = 0;
    std::uint32_t trials = 0;
    std::uint64_t seed = 0;

    /// Normal-theory stderr, used for joint margins in composition checks.
    double std_error() const {
        if (trials == 0) return 0.0;
        return std::sqrt(p_hat * (1.0 - p_hat) / trials);
    }

    nlohmann::json to_json() const {
        return {{"p_hat", p_hat},       {"wilson_low", wilson_low},
                {"wilson_high", wilson_high}, {"successes", successes},
                {"trials", trials},     {"seed", seed}};
    }
};

inline ProportionEstimate make_proportion(std::uint32_t successes, std::uint32_t trials,
                                          std::uint64_t seed) {
    if (successes > trials) throw ArgError("successes cannot exceed trials");
    ProportionEstimate p;
    p.successes = successes;
    p.trials = trials;
    p.seed = seed;
    if (trials == 0) return p;
    const double z = 1.959963984540054;  // 97.5% normal quantile
    double n = trials;
    double phat = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (phat + z2 / (2.0 * n)) / denom;
    double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    p.p_hat = phat;
    p.wilson_low = std::max(0.0, center - half);
    p.wilson_high = std::min(1.0, center + half);
    return p;
}

/// How the k start vertices of each trial are chosen.
struct StartSpec {
    enum class Kind { Fixed, Stationary, Uniform, Explicit };

    Kind kind = Kind::Fixed;
    Vertex fixed_vertex = 0;
    std::vector<Vertex> explicit_list;

    static StartSpec fixed(Vertex v) { return {Kind::Fixed, v, {}}; }
    static StartSpec stationary() { return {Kind::Stationary, 0, {}}; }
    static StartSpec uniform() { return {Kind::Uniform, 0, {}}; }
    static StartSpec explicit_starts(std::vector<Vertex> vs) {
        return {Kind::Explicit, 0, std::move(vs)};
    }

    std::string describe() const {
        switch (kind) {
            case Kind::Fixed: return "fixed:" + std::to_string(fixed_vertex);
            case Kind::Stationary: return "stationary";
            case Kind::Uniform: return "uniform";
            case Kind::Explicit: {
                std::string s = "explicit:";
                for (std::size_t i = 0; i < explicit_list.size(); ++i)
                    s += (i ? "," : "") + std::to_string(explicit_list[i]);
                return s;
            }
        }
        return "?";
    }

    /// Draws the k starts for one trial. Degree-proportional sampling walks
    /// the cumulative degree sequence, which is exactly the stationary law.
    std::vector<Vertex> sample(const Graph& g, std::uint32_t k, SplitMix64& rng) const {
        std::vector<Vertex> starts;
        starts.reserve(k);
        switch (kind) {
            case Kind::Fixed:
                if (fixed_vertex >= g.n()) throw ArgError("fixed start vertex out of range");
                starts.assign(k, fixed_vertex);
                break;
            case Kind::Uniform:
                for (std::uint32_t i = 0; i < k; ++i)
                    starts.push_back(rng.next_below(g.n()));
                break;
            case Kind::Stationary: {
                if (g.degree_sum() > UINT32_MAX)
                    throw ArgError("degree sum too large for stationary sampling");
                auto total = static_cast<std::uint32_t>(g.degree_sum());
                for (std::uint32_t i = 0; i < k; ++i) {
                    std::uint32_t r = rng.next_below(total);
                    Vertex v = 0;
                    while (r >= g.degree(v)) {
                        r -= g.degree(v);
                        ++v;
                    }
                    starts.push_back(v);
                }
                break;
            }
            case Kind::Explicit:
                if (explicit_list.size() != k)
                    throw ArgError("explicit start list length must equal k");
                for (Vertex v : explicit_list)
                    if (v >= g.n()) throw ArgError("explicit start vertex out of range");
                starts = explicit_list;
                break;
        }
        return starts;
    }
};

namespace detail {

/// Runs fn(0..trials-1) across `workers` threads. Results land in a
/// per-index slot and are reduced by the caller in index order, so the
/// outcome is bit-identical for any worker count; if several trials throw,
/// the lowest-index exception wins, again independent of scheduling.
template <typename Fn>
std::vector<double> run_trials(std::uint32_t trials, unsigned workers, Fn&& fn) {
    std::vector<double> results(trials);
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, trials);
    if (workers <= 1) {
        for (std::uint32_t i = 0; i < trials; ++i) results[i] = fn(i);
        return results;
    }
    std::vector<std::exception_ptr> errors(trials);
    std::atomic<std::uint32_t> next{0};
    std::atomic<bool> failed{false};
    auto body = [&]() {
        while (true) {
            std::uint32_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= trials) return;
            try {
                results[i] = fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (failed.load())
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    return results;
}

inline std::pair<double, double> mean_and_stderr(const std::vector<double>& xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    double sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0.0;
    return {mean, sd / std::sqrt(static_cast<double>(xs.size()))};
}

}  // namespace detail

/// Mean k-walk cover time over independently seeded trials. Trial i derives
/// everything from mix_seed(seed, i): walker j's stream from index j, the
/// start-sampling stream from index k (one past the walkers).
inline Estimate estimate_cover(const Graph& g, const StartSpec& start, std::uint32_t k,
                               std::uint32_t trials, std::uint64_t seed,
                               std::uint64_t cap = 0, unsigned workers = 1) {
    if (!g.connected()) throw ArgError("cover estimation needs a connected graph");
    if (k < 1) throw ArgError("cover estimation needs k >= 1");
    if (trials < 2) throw ArgError("estimates need trials >= 2");
    auto samples = detail::run_trials(trials, workers, [&](std::uint32_t i) {
        std::uint64_t trial_seed = mix_seed(seed, i);
        SplitMix64 start_rng(mix_seed(trial_seed, k));
        auto starts = start.sample(g, k, start_rng);
        return static_cast<double>(run_cover(g, starts, trial_seed, cap));
    });
    auto [mean, se] = detail::mean_and_stderr(samples);
    return {mean, se, trials, seed, 0};
}

/// estimate_cover from every candidate start; returns the argmax vertex and
/// its estimate (ties break toward the lower vertex). This approximates
/// C^k(G) = max over starts without sweeping all n of them.
inline std::pair<Vertex, Estimate> estimate_cover_max(
    const Graph& g, std::uint32_t k, std::uint32_t trials, std::uint64_t seed,
    const std::vector<Vertex>& candidates, std::uint64_t cap = 0, unsigned workers = 1) {
    if (candidates.empty()) throw ArgError("candidate start set must be non-empty");
    Vertex best_vertex = 0;
    Estimate best;
    bool have = false;
    for (std::size_t j = 0; j < candidates.size(); ++j) {
        Estimate e = estimate_cover(g, StartSpec::fixed(candidates[j]), k, trials,
                                    mix_seed(seed, static_cast<std::uint64_t>(j)), cap, workers);
        bool better = !have || e.mean > best.mean ||
                      (e.mean == best.mean && candidates[j] < best_vertex);
        if (better) {
            best_vertex = candidates[j];
            best = e;
            have = true;
        }
    }
    return {best_vertex, best};
}

/// Paired speed-up estimate S^k = C / C^k from disjoint seed streams, with
/// first-order (delta method) error propagation for the ratio.
inline SpeedupEstimate estimate_speedup(const Graph& g, const StartSpec& start,
                                        std::uint32_t k, std::uint32_t trials,
                                        std::uint64_t seed, std::uint64_t cap = 0,
                                        unsigned workers = 1) {
    SpeedupEstimate s;
    s.k = k;
    s.numerator = estimate_cover(g, start, 1, trials, mix_seed(seed, 1), cap, workers);
    s.denominator = estimate_cover(g, start, k, trials, mix_seed(seed, 2), cap, workers);
    if (s.denominator.mean <= 3.0 * s.denominator.std_error)
        throw UnstableRatioError("k-walk cover mean is not separated from 0 by 3 sigma");
    double a = s.numerator.mean, sa = s.numerator.std_error;
    double b = s.denominator.mean, sb = s.denominator.std_error;
    s.s_hat = a / b;
    s.std_error = std::sqrt(sa * sa / (b * b) + a * a * sb * sb / (b * b * b * b));
    return s;
}

/// Fraction of trials in which a fixed-length k-walk from `starts` covers G.
inline ProportionEstimate estimate_cover_prob(const Graph& g,
                                              const std::vector<Vertex>& starts,
                                              std::uint64_t length, std::uint32_t trials,
                                              std::uint64_t seed, unsigned workers = 1) {
    if (trials < 1) throw ArgError("estimates need trials >= 1");
    auto samples = detail::run_trials(trials, workers, [&](std::uint32_t i) {
        auto run = run_fixed(g, starts, length, mix_seed(seed, i), true);
        return run.covered() ? 1.0 : 0.0;
    });
    std::uint32_t successes = 0;
    for (double s : samples) successes += s > 0.5 ? 1 : 0;
    return make_proportion(successes, trials, seed);
}

/// Mean first-passage time u -> v over seeded trials.
inline Estimate estimate_hitting(const Graph& g, Vertex u, Vertex v, std::uint32_t trials,
                                 std::uint64_t seed, std::uint64_t cap = 0,
                                 unsigned workers = 1) {
    if (trials < 2) throw ArgError("estimates need trials >= 2");
    auto samples = detail::run_trials(trials, workers, [&](std::uint32_t i) {
        return static_cast<double>(run_hit(g, u, v, mix_seed(seed, i), cap));
    });
    auto [mean, se] = detail::mean_and_stderr(samples);
    return {mean, se, trials, seed, 0};
}

/// Heuristic candidate set for the worst cover-time start: the endpoints of
/// a double-BFS diameter approximation, plus the barbell center when the
/// family tags one. Ties in eccentricity break toward the lower vertex.
inline std::vector<Vertex> candidate_starts(const Graph& g) {
    auto farthest = [&](Vertex from) {
        auto dist = g.bfs_distances(from);
        Vertex best = from;
        std::uint32_t best_d = 0;
        for (Vertex v = 0; v < g.n(); ++v)
            if (dist[v] != UINT32_MAX && dist[v] > best_d) {
                best_d = dist[v];
                best = v;
            }
        return best;
    };
    Vertex a = farthest(0);
    Vertex b = farthest(a);
    std::vector<Vertex> out{a, b};
    if (g.family() == "barbell") out.push_back(g.n() - 1);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace kwalk
