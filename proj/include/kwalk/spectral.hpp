#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "kwalk/graph.hpp"
#include "kwalk/rng.hpp"

namespace kwalk {

/// Spectral profile of a d-regular graph: lambda = |second-largest adjacency
/// eigenvalue by algebraic value|, plus the derived walk parameters
/// s = ln(2n) / ln(d/lambda) and b = lambda / (d - lambda).
struct SpectralInfo {
    std::uint32_t d = 0;
    double lambda = 0.0;
    double s = 0.0;
    double b = 0.0;
    double tol = 0.0;
};

/// |lambda_2| of the adjacency matrix of a connected d-regular graph, taken
/// by algebraic value (so a bipartite graph reports |lambda_2|, not the
/// trailing eigenvalue -d).
///
/// Power iteration runs on B = A + dI, whose spectrum is A's shifted into
/// [0, 2d]; ordering by B-magnitude then matches ordering by algebraic value
/// of A. The known top eigenvector (all-ones) is projected out after every
/// multiply, so the iteration converges to lambda_2 + d. Convergence is
/// declared when successive Rayleigh quotients differ by less than tol.
inline double second_eigenvalue(const Graph& g, double tol = 1e-9,
                                int max_iter = 100000) {
    std::uint32_t d = g.regular_degree();
    if (d == 0) throw ArgError("second_eigenvalue needs a regular graph");
    auto n = static_cast<std::size_t>(g.n());
    if (n < 2) throw ArgError("second_eigenvalue needs n >= 2");

    // Deterministic pseudo-random start; orthogonal to all-ones after the
    // first projection.
    SplitMix64 rng(0xA5A5A5A5D00DULL);
    std::vector<double> x(n), y(n);
    for (auto& xi : x) xi = rng.next_unit() - 0.5;

    auto project_and_normalize = [&](std::vector<double>& v) {
        double mean = 0.0;
        for (double vi : v) mean += vi;
        mean /= static_cast<double>(n);
        double norm = 0.0;
        for (double& vi : v) {
            vi -= mean;
            norm += vi * vi;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            // Degenerate restart; can only happen if x collapsed onto ones.
            for (auto& vi : v) vi = rng.next_unit() - 0.5;
            return false;
        }
        for (double& vi : v) vi /= norm;
        return true;
    };
    project_and_normalize(x);

    double prev_rq = 0.0;
    bool have_prev = false;
    double rq = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        // y = (A + dI) x
        for (std::size_t v = 0; v < n; ++v) {
            double acc = static_cast<double>(d) * x[v];
            for (Vertex w : g.neighbors(static_cast<Vertex>(v))) acc += x[w];
            y[v] = acc;
        }
        rq = 0.0;
        for (std::size_t v = 0; v < n; ++v) rq += x[v] * y[v];
        if (have_prev && std::abs(rq - prev_rq) < tol) {
            double lambda = std::abs(rq - static_cast<double>(d));
            return lambda < tol ? 0.0 : lambda;
        }
        prev_rq = rq;
        have_prev = true;
        if (!project_and_normalize(y)) {
            have_prev = false;
            x = y;
            continue;
        }
        std::swap(x, y);
    }
    throw ConvergenceError(std::abs(rq - static_cast<double>(d)),
                           "power iteration did not settle within max_iter");
}

inline SpectralInfo spectral_info(const Graph& g, double tol = 1e-9,
                                  int max_iter = 100000) {
    SpectralInfo info;
    info.d = g.regular_degree();
    info.tol = tol;
    info.lambda = second_eigenvalue(g, tol, max_iter);
    double d = static_cast<double>(info.d);
    if (info.lambda > 0.0 && info.lambda < d) {
        info.s = std::log(2.0 * static_cast<double>(g.n())) / std::log(d / info.lambda);
        info.b = info.lambda / (d - info.lambda);
    } else if (info.lambda == 0.0) {
        info.s = 0.0;
        info.b = 0.0;
    } else {
        throw ArgError("spectral gap is empty (lambda >= d); graph is not an expander");
    }
    return info;
}

}  // namespace kwalk
