#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <queue>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "kwalk/errors.hpp"

namespace kwalk {

using Vertex = std::uint32_t;
using EdgeList = std::vector<std::pair<Vertex, Vertex>>;

/// Immutable undirected graph in CSR form.
///
/// Multi-edges are forbidden. A self-loop at v is allowed, appears once in
/// N(v), and counts once in both delta(v) and m. The transition kernel of the
/// simple random walk is uniform over N(v), so a self-loop is an ordinary
/// move candidate.
class Graph {
  public:
    /// Build from an undirected edge list. Every (u,v) with u != v inserts u
    /// into N(v) and v into N(u); (v,v) inserts v into N(v) once. Validates
    /// index range, simplicity, and the no-isolated-vertex rule; precomputes
    /// connectivity by BFS.
    static Graph from_edges(Vertex n, const EdgeList& edges, std::string family_tag = "custom",
                            bool self_loops = false) {
        if (n == 0) throw ArgError("graph must have at least one vertex");
        std::vector<std::uint32_t> deg(n, 0);
        for (auto [u, v] : edges) {
            if (u >= n || v >= n)
                throw ArgError("edge endpoint out of range: " + std::to_string(u) + " " +
                               std::to_string(v));
            ++deg[u];
            if (u != v) ++deg[v];
        }
        Graph g;
        g.n_ = n;
        g.m_ = edges.size();
        g.family_ = std::move(family_tag);
        g.self_loops_ = self_loops;
        g.offsets_.assign(n + 1, 0);
        for (Vertex v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
        g.neighbors_.resize(g.offsets_[n]);
        std::vector<std::uint32_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
        for (auto [u, v] : edges) {
            g.neighbors_[fill[u]++] = v;
            if (u != v) g.neighbors_[fill[v]++] = u;
        }
        for (Vertex v = 0; v < n; ++v) {
            auto nb = g.mutable_neighbors(v);
            std::sort(nb.begin(), nb.end());
            if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
                throw ArgError("duplicate edge at vertex " + std::to_string(v));
            if (nb.empty())
                throw ArgError("isolated vertex " + std::to_string(v));
        }
        g.connected_ = g.compute_connected();
        return g;
    }

    Vertex n() const { return n_; }
    std::uint64_t m() const { return m_; }
    const std::string& family() const { return family_; }
    bool self_loops() const { return self_loops_; }
    bool connected() const { return connected_; }

    std::uint32_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
    }

    bool has_edge(Vertex u, Vertex v) const {
        auto nb = neighbors(u);
        return std::binary_search(nb.begin(), nb.end(), v);
    }

    /// Common degree if the graph is regular, 0 otherwise.
    std::uint32_t regular_degree() const {
        std::uint32_t d = degree(0);
        for (Vertex v = 1; v < n_; ++v)
            if (degree(v) != d) return 0;
        return d;
    }

    std::uint64_t degree_sum() const { return neighbors_.size(); }

    /// True iff the graph is bipartite. A connected undirected chain is
    /// aperiodic exactly when the graph is not bipartite (self-loops count
    /// as odd cycles).
    bool bipartite() const {
        std::vector<std::int8_t> color(n_, -1);
        for (Vertex s = 0; s < n_; ++s) {
            if (color[s] != -1) continue;
            color[s] = 0;
            std::queue<Vertex> q;
            q.push(s);
            while (!q.empty()) {
                Vertex u = q.front();
                q.pop();
                for (Vertex w : neighbors(u)) {
                    if (w == u) return false;
                    if (color[w] == -1) {
                        color[w] = static_cast<std::int8_t>(1 - color[u]);
                        q.push(w);
                    } else if (color[w] == color[u]) {
                        return false;
                    }
                }
            }
        }
        return true;
    }

    /// BFS distances from `source` (UINT32_MAX if unreachable).
    std::vector<std::uint32_t> bfs_distances(Vertex source) const {
        std::vector<std::uint32_t> dist(n_, UINT32_MAX);
        dist[source] = 0;
        std::queue<Vertex> q;
        q.push(source);
        while (!q.empty()) {
            Vertex u = q.front();
            q.pop();
            for (Vertex w : neighbors(u))
                if (dist[w] == UINT32_MAX) {
                    dist[w] = dist[u] + 1;
                    q.push(w);
                }
        }
        return dist;
    }

    bool operator==(const Graph& other) const {
        return n_ == other.n_ && offsets_ == other.offsets_ && neighbors_ == other.neighbors_;
    }

  private:
    Graph() = default;

    std::span<Vertex> mutable_neighbors(Vertex v) {
        return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
    }

    bool compute_connected() const {
        auto dist = bfs_distances(0);
        return std::find(dist.begin(), dist.end(), UINT32_MAX) == dist.end();
    }

    Vertex n_ = 0;
    std::uint64_t m_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::vector<Vertex> neighbors_;
    std::string family_;
    bool self_loops_ = false;
    bool connected_ = false;
};

/// Canonical edge list of g: one edge per undirected pair, as (u,v) with
/// u <= v, sorted lexicographically.
inline EdgeList canonical_edges(const Graph& g) {
    EdgeList edges;
    edges.reserve(g.m());
    for (Vertex u = 0; u < g.n(); ++u)
        for (Vertex v : g.neighbors(u))
            if (u <= v) edges.emplace_back(u, v);
    std::sort(edges.begin(), edges.end());
    return edges;
}

/// Edge-list text format: header "n m", then m lines "u v". UTF-8, LF line
/// endings, canonical edge order.
inline std::string serialize_graph(const Graph& g) {
    std::string out = std::to_string(g.n()) + " " + std::to_string(g.m()) + "\n";
    for (auto [u, v] : canonical_edges(g))
        out += std::to_string(u) + " " + std::to_string(v) + "\n";
    return out;
}

inline Graph parse_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;

    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next_line()) throw ParseError(1, "missing header line");
    std::istringstream header(line);
    long long n = -1, m = -1;
    if (!(header >> n >> m) || n <= 0 || m < 0)
        throw ParseError(lineno, "header must be 'n m' with n >= 1");

    EdgeList edges;
    edges.reserve(static_cast<std::size_t>(m));
    std::set<std::pair<Vertex, Vertex>> seen;
    bool any_self = false;
    for (long long i = 0; i < m; ++i) {
        if (!next_line()) throw ParseError(lineno + 1, "unexpected end of document");
        std::istringstream row(line);
        long long u = -1, v = -1;
        std::string extra;
        if (!(row >> u >> v) || (row >> extra))
            throw ParseError(lineno, "expected 'u v'");
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw ParseError(lineno, "vertex index out of range");
        std::pair<Vertex, Vertex> key{static_cast<Vertex>(std::min(u, v)),
                                      static_cast<Vertex>(std::max(u, v))};
        if (!seen.insert(key).second)
            throw ParseError(lineno, "duplicate edge " + std::to_string(key.first) + " " +
                                         std::to_string(key.second));
        if (u == v) any_self = true;
        edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
    }
    if (next_line()) throw ParseError(lineno, "trailing content after edge list");

    return Graph::from_edges(static_cast<Vertex>(n), edges, "file", any_self);
}

inline Graph read_graph_file(std::istream& in) {
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

}  // namespace kwalk
