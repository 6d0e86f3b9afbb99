#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "kwalk/graph.hpp"
#include "kwalk/rng.hpp"

namespace kwalk {

/// Default round cap: worst-case single-walk cover time is Theta(n^3)
/// (lollipop-style graphs), so 64 n^3 leaves a wide safety margin.
inline std::uint64_t default_round_cap(Vertex n) {
    auto n64 = static_cast<std::uint64_t>(n);
    return 64 * n64 * n64 * n64;
}

/// One step of the simple random walk: uniform over N(v).
inline Vertex step(const Graph& g, Vertex v, SplitMix64& rng) {
    auto nbrs = g.neighbors(v);
    return nbrs[rng.next_below(static_cast<std::uint32_t>(nbrs.size()))];
}

/// k walkers advancing in lockstep rounds over a shared immutable graph.
/// Starts count as visited at time 0. Walker j draws from its own stream
/// seeded as mix_seed(seed, j), so trajectories are independent of k and of
/// scheduling order.
class KWalkRun {
  public:
    KWalkRun(const Graph& g, std::vector<Vertex> starts, std::uint64_t seed)
        : g_(&g), positions_(std::move(starts)), visited_(g.n(), 0) {
        if (positions_.empty()) throw ArgError("k-walk needs at least one walker");
        for (Vertex v : positions_) {
            if (v >= g.n()) throw ArgError("start vertex out of range");
            mark(v);
        }
        rngs_.reserve(positions_.size());
        for (std::size_t j = 0; j < positions_.size(); ++j)
            rngs_.emplace_back(mix_seed(seed, static_cast<std::uint64_t>(j)));
    }

    std::size_t k() const { return positions_.size(); }
    std::uint64_t rounds() const { return rounds_; }
    std::uint64_t work() const { return rounds_ * positions_.size(); }
    Vertex visited_count() const { return visited_count_; }
    bool covered() const { return visited_count_ == g_->n(); }
    bool visited(Vertex v) const { return visited_[v] != 0; }
    const std::vector<Vertex>& positions() const { return positions_; }

    std::vector<Vertex> visited_vertices() const {
        std::vector<Vertex> out;
        out.reserve(visited_count_);
        for (Vertex v = 0; v < g_->n(); ++v)
            if (visited_[v]) out.push_back(v);
        return out;
    }

    /// Moves every walker once, in index order; coverage is only observed at
    /// the round boundary, so within-round order never affects timing.
    void advance_round() {
        for (std::size_t j = 0; j < positions_.size(); ++j) {
            positions_[j] = step(*g_, positions_[j], rngs_[j]);
            mark(positions_[j]);
        }
        ++rounds_;
        if (trace_) dump_trace();
    }

    /// One line per round: round index, walker positions, |visited|.
    void set_trace(std::ostream* out) { trace_ = out; }

  private:
    void mark(Vertex v) {
        if (!visited_[v]) {
            visited_[v] = 1;
            ++visited_count_;
        }
    }

    void dump_trace() const {
        *trace_ << "round " << rounds_ << " positions";
        for (Vertex v : positions_) *trace_ << ' ' << v;
        *trace_ << " visited " << visited_count_ << '\n';
    }

    const Graph* g_;
    std::vector<Vertex> positions_;
    std::vector<SplitMix64> rngs_;
    std::vector<char> visited_;
    Vertex visited_count_ = 0;
    std::uint64_t rounds_ = 0;
    std::ostream* trace_ = nullptr;
};

/// First round index at which the union of visited vertices is V.
/// Returns 0 when the starts already cover the graph.
inline std::uint64_t run_cover(const Graph& g, const std::vector<Vertex>& starts,
                               std::uint64_t seed, std::uint64_t cap = 0,
                               std::ostream* trace = nullptr) {
    if (!g.connected()) throw ArgError("cover time is infinite on a disconnected graph");
    if (cap == 0) cap = default_round_cap(g.n());
    KWalkRun run(g, starts, seed);
    run.set_trace(trace);
    while (!run.covered()) {
        if (run.rounds() >= cap)
            throw TimeoutError(run.rounds(), run.visited_count(),
                               "cover run exceeded the round cap");
        run.advance_round();
    }
    return run.rounds();
}

/// First-passage step count from start to target (0 when equal).
inline std::uint64_t run_hit(const Graph& g, Vertex start, Vertex target,
                             std::uint64_t seed, std::uint64_t cap = 0) {
    if (!g.connected()) throw ArgError("hitting time is infinite on a disconnected graph");
    if (start >= g.n() || target >= g.n()) throw ArgError("vertex out of range");
    if (start == target) return 0;
    if (cap == 0) cap = default_round_cap(g.n());
    SplitMix64 rng(mix_seed(seed, 0));
    Vertex v = start;
    for (std::uint64_t t = 1; t <= cap; ++t) {
        v = step(g, v, rng);
        if (v == target) return t;
    }
    throw TimeoutError(cap, 0, "hit run exceeded the step cap");
}

/// State after exactly `length` rounds (or earlier if `stop_when_covered`
/// and the graph is already fully visited).
inline KWalkRun run_fixed(const Graph& g, const std::vector<Vertex>& starts,
                          std::uint64_t length, std::uint64_t seed,
                          bool stop_when_covered = false) {
    KWalkRun run(g, starts, seed);
    while (run.rounds() < length) {
        if (stop_when_covered && run.covered()) break;
        run.advance_round();
    }
    return run;
}

}  // namespace kwalk
