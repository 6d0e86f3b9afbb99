#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "kwalk/graph.hpp"
#include "kwalk/rng.hpp"

namespace kwalk {

inline constexpr int kGeneratorRetryBudget = 100;

/// Ring 0-1-...-(n-1)-0.
inline Graph gen_cycle(Vertex n) {
    if (n < 3) throw ArgError("cycle needs n >= 3");
    EdgeList edges;
    edges.reserve(n);
    for (Vertex i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return Graph::from_edges(n, edges, "cycle", false);
}

/// K_n; with self_loops every vertex is additionally adjacent to itself, so
/// delta(v) = n instead of n-1.
inline Graph gen_complete(Vertex n, bool self_loops) {
    if (n < 2) throw ArgError("complete graph needs n >= 2");
    EdgeList edges;
    for (Vertex u = 0; u < n; ++u) {
        if (self_loops) edges.emplace_back(u, u);
        for (Vertex v = u + 1; v < n; ++v) edges.emplace_back(u, v);
    }
    return Graph::from_edges(n, edges, "complete", self_loops);
}

/// d-dimensional torus with `side` vertices per axis; n = side^d, 2d-regular.
inline Graph gen_torus_grid(Vertex side, std::uint32_t d) {
    if (side < 3) throw ArgError("torus needs side >= 3");
    if (d < 1) throw ArgError("torus needs d >= 1");
    std::uint64_t n64 = 1;
    for (std::uint32_t i = 0; i < d; ++i) {
        n64 *= side;
        if (n64 > (1ULL << 31)) throw ArgError("torus size side^d exceeds index range");
    }
    auto n = static_cast<Vertex>(n64);
    EdgeList edges;
    edges.reserve(static_cast<std::size_t>(n) * d);
    std::int64_t stride = 1;
    for (std::uint32_t axis = 0; axis < d; ++axis) {
        for (Vertex v = 0; v < n; ++v) {
            std::int64_t coord = (v / stride) % side;
            std::int64_t next = (coord + 1) % side;
            edges.emplace_back(v, static_cast<Vertex>(v + (next - coord) * stride));
        }
        stride *= side;
    }
    return Graph::from_edges(n, edges, "torus", false);
}

/// Boolean hypercube on 2^dim bit-string vertices; dim-regular.
inline Graph gen_hypercube(std::uint32_t dim) {
    if (dim < 1) throw ArgError("hypercube needs dim >= 1");
    if (dim > 31) throw ArgError("hypercube size 2^dim exceeds index range");
    Vertex n = Vertex{1} << dim;
    EdgeList edges;
    edges.reserve(static_cast<std::size_t>(n) * dim / 2);
    for (Vertex v = 0; v < n; ++v)
        for (std::uint32_t bit = 0; bit < dim; ++bit) {
            Vertex w = v ^ (Vertex{1} << bit);
            if (v < w) edges.emplace_back(v, w);
        }
    return Graph::from_edges(n, edges, "hypercube", false);
}

struct BarbellGraph {
    Graph graph;
    Vertex center;
};

/// Two cliques of size (n-1)/2 ("bells", no self-loops) joined through a
/// degree-2 center: the center is adjacent to exactly one designated vertex
/// in each bell, forming a path of two edges between the bells.
///
/// Layout: bell A = 0..m-1, bell B = m..2m-1, center = n-1; the designated
/// vertices are 0 and m.
inline BarbellGraph gen_barbell(Vertex n) {
    if (n % 2 == 0) throw ArgError("barbell needs odd n");
    if (n < 5) throw ArgError("barbell needs n >= 5 (bells of size >= 2)");
    Vertex m = (n - 1) / 2;
    EdgeList edges;
    for (Vertex u = 0; u < m; ++u)
        for (Vertex v = u + 1; v < m; ++v) {
            edges.emplace_back(u, v);
            edges.emplace_back(m + u, m + v);
        }
    Vertex center = n - 1;
    edges.emplace_back(center, 0);
    edges.emplace_back(center, m);
    return {Graph::from_edges(n, edges, "barbell", false), center};
}

/// G(n,p) conditioned on connectivity: each unordered pair is included
/// independently with probability p; disconnected samples are regenerated
/// with the next sub-seed up to the retry budget.
inline Graph gen_erdos_renyi(Vertex n, double p, std::uint64_t seed) {
    if (n < 2) throw ArgError("erdos-renyi needs n >= 2");
    if (!(p > 0.0) || p > 1.0) throw ArgError("erdos-renyi needs p in (0, 1]");
    for (int attempt = 0; attempt < kGeneratorRetryBudget; ++attempt) {
        SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
        EdgeList edges;
        for (Vertex u = 0; u < n; ++u)
            for (Vertex v = u + 1; v < n; ++v)
                if (rng.next_unit() < p) edges.emplace_back(u, v);
        // Cheap connectivity screen before paying for full construction.
        std::vector<std::vector<Vertex>> adj(n);
        for (auto [u, v] : edges) {
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        std::vector<char> vis(n, 0);
        std::vector<Vertex> stack{0};
        vis[0] = 1;
        Vertex count = 1;
        while (!stack.empty()) {
            Vertex u = stack.back();
            stack.pop_back();
            for (Vertex w : adj[u])
                if (!vis[w]) {
                    vis[w] = 1;
                    ++count;
                    stack.push_back(w);
                }
        }
        if (count != n) continue;
        return Graph::from_edges(n, edges, "er[p=" + std::to_string(p) + ",retries=" +
                                                std::to_string(attempt) + "]",
                                 false);
    }
    throw GenerationError(kGeneratorRetryBudget, "erdos-renyi never came out connected");
}

/// Uniform-ish d-regular simple graph by the pairing (configuration) model:
/// d stubs per vertex, random stubs matched one pair at a time, pairs that
/// would create a self-loop or multi-edge are redrawn, and the whole attempt
/// restarts when it deadlocks or the result is disconnected.
inline Graph gen_random_regular(Vertex n, std::uint32_t d, std::uint64_t seed) {
    if (d < 3 || d >= n) throw ArgError("random regular needs 3 <= d < n");
    if ((static_cast<std::uint64_t>(n) * d) % 2 != 0)
        throw ArgError("random regular needs n*d even");
    for (int attempt = 0; attempt < kGeneratorRetryBudget; ++attempt) {
        SplitMix64 rng(mix_seed(seed, static_cast<std::uint64_t>(attempt)));
        std::vector<Vertex> stubs;
        stubs.reserve(static_cast<std::size_t>(n) * d);
        for (Vertex v = 0; v < n; ++v)
            for (std::uint32_t i = 0; i < d; ++i) stubs.push_back(v);
        std::set<std::pair<Vertex, Vertex>> edge_set;
        bool dead = false;
        while (!stubs.empty()) {
            bool paired = false;
            for (int tries = 0; tries < 1000; ++tries) {
                auto i = rng.next_below(static_cast<std::uint32_t>(stubs.size()));
                auto j = rng.next_below(static_cast<std::uint32_t>(stubs.size()));
                if (i == j) continue;
                Vertex u = stubs[i], v = stubs[j];
                if (u == v) continue;
                auto key = std::minmax(u, v);
                if (edge_set.count({key.first, key.second})) continue;
                edge_set.insert({key.first, key.second});
                if (i < j) std::swap(i, j);
                stubs[i] = stubs.back();
                stubs.pop_back();
                stubs[j] = stubs.back();
                stubs.pop_back();
                paired = true;
                break;
            }
            if (!paired) {
                dead = true;
                break;
            }
        }
        if (dead) continue;
        EdgeList edges(edge_set.begin(), edge_set.end());
        Graph g = Graph::from_edges(n, edges,
                                    "random_regular[d=" + std::to_string(d) + "]", false);
        if (!g.connected()) continue;
        return g;
    }
    throw GenerationError(kGeneratorRetryBudget, "pairing model never produced a connected simple graph");
}

}  // namespace kwalk
