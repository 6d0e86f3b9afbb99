#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "kwalk/graph.hpp"
#include "kwalk/rng.hpp"
#include "kwalk/walks.hpp"

namespace kwalk {

inline constexpr Vertex kDenseLimit = 4096;
inline constexpr double kHarmonicResidualTol = 1e-8;

/// pi(v) = delta(v) / sum_u delta(u); self-loops count once in delta.
inline std::vector<double> stationary(const Graph& g) {
    if (!g.connected()) throw ArgError("stationary distribution needs a connected graph");
    std::vector<double> pi(g.n());
    double total = static_cast<double>(g.degree_sum());
    for (Vertex v = 0; v < g.n(); ++v) pi[v] = static_cast<double>(g.degree(v)) / total;
    return pi;
}

/// Row-stochastic transition kernel of the simple random walk.
inline Eigen::MatrixXd transition_matrix(const Graph& g) {
    auto n = static_cast<Eigen::Index>(g.n());
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
    for (Vertex v = 0; v < g.n(); ++v) {
        double p = 1.0 / static_cast<double>(g.degree(v));
        for (Vertex w : g.neighbors(v)) q(v, w) += p;
    }
    return q;
}

/// All-pairs expected first-passage times, h[u][v] = E[steps from u to v].
struct HittingMatrix {
    Eigen::MatrixXd h;
    std::vector<double> pi;
    double h_max = 0.0;
    double h_min = std::numeric_limits<double>::infinity();
    double max_residual = 0.0;

    double operator()(Vertex u, Vertex v) const { return h(u, v); }

    /// CSV, row = source vertex, column = target vertex.
    void to_csv(std::ostream& out) const {
        auto n = h.rows();
        char buf[64];
        for (Eigen::Index u = 0; u < n; ++u) {
            for (Eigen::Index v = 0; v < n; ++v) {
                std::snprintf(buf, sizeof buf, "%.10g", h(u, v));
                out << buf << (v + 1 < n ? ',' : '\n');
            }
        }
    }
};

/// Dense all-pairs hitting times through the fundamental matrix
/// Z = (I - Q + 1 pi^T)^{-1}, h(u,v) = (Z[v][v] - Z[u][v]) / pi(v).
/// One LU factorization covers every pair; the harmonic relation
/// h(u,v) = 1 + mean of h(w,v) over w in N(u) is re-checked as a residual.
inline HittingMatrix hitting_matrix(const Graph& g, Vertex dense_limit = kDenseLimit) {
    if (!g.connected()) throw ArgError("hitting times are infinite on a disconnected graph");
    if (g.n() > dense_limit)
        throw ArgError("graph exceeds the dense solver limit (" +
                       std::to_string(dense_limit) + "); use Monte Carlo estimation");
    auto n = static_cast<Eigen::Index>(g.n());
    HittingMatrix result;
    result.pi = stationary(g);

    Eigen::MatrixXd a = -transition_matrix(g);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) += 1.0;
        for (Eigen::Index j = 0; j < n; ++j) a(i, j) += result.pi[j];
    }
    Eigen::MatrixXd z = a.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));

    result.h.resize(n, n);
    for (Eigen::Index v = 0; v < n; ++v) {
        double zvv = z(v, v);
        double inv_pi = 1.0 / result.pi[v];
        for (Eigen::Index u = 0; u < n; ++u)
            result.h(u, v) = u == v ? 0.0 : (zvv - z(u, v)) * inv_pi;
    }

    for (Eigen::Index v = 0; v < n; ++v)
        for (Eigen::Index u = 0; u < n; ++u) {
            if (u == v) continue;
            double acc = 0.0;
            for (Vertex w : g.neighbors(static_cast<Vertex>(u))) acc += result.h(w, v);
            double residual = std::abs(
                result.h(u, v) - 1.0 - acc / static_cast<double>(g.degree(static_cast<Vertex>(u))));
            result.max_residual = std::max(result.max_residual, residual);
            result.h_max = std::max(result.h_max, result.h(u, v));
            result.h_min = std::min(result.h_min, result.h(u, v));
        }
    if (result.max_residual >= kHarmonicResidualTol)
        throw ConvergenceError(result.max_residual,
                               "hitting-time solve violates the harmonic relation");
    return result;
}

struct MixingResult {
    std::uint64_t t_m = 0;
    std::vector<double> distances;  // per-start L1 deviation at t_m
    bool lazy = false;
    std::vector<double> pi;
};

namespace detail {

inline double max_l1_deviation(const Eigen::MatrixXd& m, const std::vector<double>& pi,
                               std::vector<double>* per_row = nullptr) {
    auto n = m.rows();
    if (per_row) per_row->assign(static_cast<std::size_t>(n), 0.0);
    double worst = 0.0;
    for (Eigen::Index u = 0; u < n; ++u) {
        double dev = 0.0;
        for (Eigen::Index v = 0; v < n; ++v) dev += std::abs(m(u, v) - pi[v]);
        if (per_row) (*per_row)[static_cast<std::size_t>(u)] = dev;
        worst = std::max(worst, dev);
    }
    return worst;
}

}  // namespace detail

/// Smallest t > 0 with max_u sum_v |p^t(u,v) - pi(v)| < 1/e, by evolving all
/// row distributions at once. The deviation is non-increasing in t (the
/// kernel is an L1 contraction toward pi), which the doubling fallback for
/// large t relies on; the crossing is re-verified at t_m - 1 either way.
inline MixingResult mixing_time(const Graph& g, bool lazy, std::uint64_t t_cap = 1u << 20) {
    if (!g.connected()) throw ArgError("mixing time needs a connected graph");
    if (!lazy && g.bipartite())
        throw PeriodicityError(
            "graph is bipartite, so the non-lazy walk never mixes; rerun with the lazy kernel");
    if (t_cap == 0) throw ArgError("mixing needs t_cap >= 1");

    const double threshold = std::exp(-1.0);
    auto n = static_cast<Eigen::Index>(g.n());
    MixingResult result;
    result.lazy = lazy;
    result.pi = stationary(g);

    Eigen::MatrixXd kernel = transition_matrix(g);
    if (lazy) kernel = 0.5 * Eigen::MatrixXd::Identity(n, n) + 0.5 * kernel;

    // Sequential phase: exact repeated application, one kernel multiply per t.
    // Covers every quickly mixing graph before any doubling machinery starts.
    const std::uint64_t seq_limit = std::min<std::uint64_t>(t_cap, 512);
    Eigen::MatrixXd m = kernel;
    double dev = detail::max_l1_deviation(m, result.pi, &result.distances);
    std::uint64_t t = 1;
    while (dev >= threshold && t < seq_limit) {
        m = m * kernel;
        ++t;
        dev = detail::max_l1_deviation(m, result.pi, &result.distances);
    }
    if (dev < threshold) {
        result.t_m = t;
        return result;
    }
    if (t >= t_cap) throw ConvergenceError(dev, "mixing deviation still above 1/e at t_cap");

    // Doubling phase for slowly mixing graphs (long cycles, thin tori):
    // square up to the first power of two with deviation below 1/e, then
    // binary-descend to the exact crossing using the stored squarings.
    std::vector<Eigen::MatrixXd> powers;  // powers[i] = kernel^(2^i)
    powers.push_back(kernel);
    std::uint64_t span = 1;
    while (true) {
        if (span >= t_cap) throw ConvergenceError(dev, "mixing deviation still above 1/e at t_cap");
        const Eigen::MatrixXd& top = powers.back();
        powers.push_back(top * top);
        span *= 2;
        dev = detail::max_l1_deviation(powers.back(), result.pi);
        if (dev < threshold) break;
    }
    // Descent invariant: deviation(lo) >= 1/e and deviation(lo + 2^{i+1}) < 1/e
    // entering step i, so afterwards deviation(lo) >= 1/e > deviation(lo + 1):
    // lo + 1 is exactly t_m and the t_m - 1 condition holds by construction.
    std::uint64_t lo = span / 2;
    Eigen::MatrixXd current = powers[powers.size() - 2];
    for (std::size_t i = powers.size() - 2; i-- > 0;) {
        Eigen::MatrixXd candidate = current * powers[i];
        if (detail::max_l1_deviation(candidate, result.pi) >= threshold) {
            current = std::move(candidate);
            lo += std::uint64_t{1} << i;
        }
    }
    if (lo + 1 > t_cap)
        throw ConvergenceError(detail::max_l1_deviation(current, result.pi),
                               "mixing deviation still above 1/e at t_cap");
    result.t_m = lo + 1;
    current = current * kernel;
    dev = detail::max_l1_deviation(current, result.pi, &result.distances);
    if (dev >= threshold)
        throw ConvergenceError(dev, "doubling search lost the mixing crossing");
    return result;
}

/// Exact expected cover time of K_n by the coupon-collector sum:
/// n * H_{n-1} when every vertex has a self-loop, (n-1) * H_{n-1} without.
/// Harmonic numbers are summed smallest term first for accuracy.
inline double coupon_collector_mean(std::uint64_t n, bool self_loops) {
    if (n < 2) throw ArgError("coupon collector needs n >= 2");
    double harmonic = 0.0;
    for (std::uint64_t i = n - 1; i >= 1; --i) harmonic += 1.0 / static_cast<double>(i);
    return static_cast<double>(self_loops ? n : n - 1) * harmonic;
}

/// Exact harmonic number H_n, summed smallest term first.
inline double harmonic_number(std::uint64_t n) {
    double h = 0.0;
    for (std::uint64_t i = n; i >= 1; --i) h += 1.0 / static_cast<double>(i);
    return h;
}

struct BinomialWindow {
    std::uint64_t n = 0;
    double c = 0.0;
    std::uint64_t lo = 0;  // inclusive window over the number of successes
    std::uint64_t hi = 0;
    double prob = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
};

/// Exact Pr[(c-1) sqrt(n) <= X - n/2 <= c sqrt(n)] for X ~ Bin(n, 1/2), via
/// log-domain summation of the integer window [ceil((c-1) sqrt n), floor(c sqrt n)]
/// shifted by n/2. Requires n even and n >= 16 c^2 (the regime where the
/// closed-form sandwich e^{-3c^2-4} <= prob <= e^{-2(c-1)^2} is claimed).
inline BinomialWindow binomial_window(std::uint64_t n, double c) {
    if (n % 2 != 0) throw ArgError("binomial window needs even n");
    if (!(c >= 2.0)) throw ArgError("binomial window needs c >= 2");
    if (static_cast<double>(n) < 16.0 * c * c)
        throw ArgError("binomial window needs n >= 16 c^2; bounds unproven below that");

    BinomialWindow w;
    w.n = n;
    w.c = c;
    double root = std::sqrt(static_cast<double>(n));
    // Fuzzed rounding so thresholds that are exact integers land inside the
    // window despite floating-point representation of (c-1)*sqrt(n).
    auto lo_off = static_cast<std::uint64_t>(std::ceil((c - 1.0) * root - 1e-9));
    auto hi_off = static_cast<std::uint64_t>(std::floor(c * root + 1e-9));
    w.lo = n / 2 + lo_off;
    w.hi = n / 2 + hi_off;
    w.lower_bound = std::exp(-3.0 * c * c - 4.0);
    w.upper_bound = std::exp(-2.0 * (c - 1.0) * (c - 1.0));
    if (w.lo > w.hi || w.lo > n) {
        w.prob = 0.0;
        return w;
    }
    w.hi = std::min(w.hi, n);

    // log C(n, j) via lgamma; accumulate with log-sum-exp anchored at the
    // largest term (j = lo, closest to the mode).
    double log_n_fact = std::lgamma(static_cast<double>(n) + 1.0);
    auto log_choose = [&](std::uint64_t j) {
        return log_n_fact - std::lgamma(static_cast<double>(j) + 1.0) -
               std::lgamma(static_cast<double>(n - j) + 1.0);
    };
    double anchor = log_choose(w.lo);
    double acc = 0.0;
    for (std::uint64_t j = w.hi + 1; j-- > w.lo;) acc += std::exp(log_choose(j) - anchor);
    double log_prob = anchor + std::log(acc) - static_cast<double>(n) * std::log(2.0);
    w.prob = std::exp(log_prob);
    return w;
}

/// Sample coefficient of variation of the single-walk cover time from
/// `start`, over seeded trials. Near-deterministic cover (cv ~ 0) is the
/// signature of the C >> h_max concentration regime.
inline double concentration_check(const Graph& g, Vertex start, std::uint32_t trials,
                                  std::uint64_t seed) {
    if (!g.connected()) throw ArgError("concentration check needs a connected graph");
    if (start >= g.n()) throw ArgError("start vertex out of range");
    if (trials < 2) throw ArgError("concentration check needs trials >= 2");
    std::vector<double> samples(trials);
    for (std::uint32_t i = 0; i < trials; ++i)
        samples[i] = static_cast<double>(
            run_cover(g, {start}, mix_seed(seed, i)));
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= trials;
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    double sd = std::sqrt(ss / (trials - 1));
    return mean == 0.0 ? 0.0 : sd / mean;
}

}  // namespace kwalk
