#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <vector>

#include "kwalk/estimate.hpp"
#include "kwalk/exact.hpp"
#include "kwalk/generators.hpp"

using namespace kwalk;

TEST_CASE("start spec sampling", "[estimate]") {
    Graph star = Graph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}});
    SplitMix64 rng(7);
    SECTION("fixed repeats one vertex") {
        auto s = StartSpec::fixed(2).sample(star, 3, rng);
        CHECK(s == std::vector<Vertex>{2, 2, 2});
        CHECK(StartSpec::fixed(2).describe() == "fixed:2");
        CHECK_THROWS_AS(StartSpec::fixed(9).sample(star, 1, rng), ArgError);
    }
    SECTION("explicit list is passed through and length-checked") {
        auto spec = StartSpec::explicit_starts({3, 1});
        CHECK(spec.sample(star, 2, rng) == std::vector<Vertex>{3, 1});
        CHECK(spec.describe() == "explicit:3,1");
        CHECK_THROWS_AS(spec.sample(star, 3, rng), ArgError);
        CHECK_THROWS_AS(StartSpec::explicit_starts({4}).sample(star, 1, rng), ArgError);
    }
    SECTION("stationary sampling is degree proportional") {
        // Star: center has pi = 1/2, each leaf 1/6.
        std::map<Vertex, int> counts;
        const int trials = 30000;
        auto spec = StartSpec::stationary();
        for (int i = 0; i < trials; ++i) counts[spec.sample(star, 1, rng)[0]]++;
        double chi2 = 0.0;
        for (Vertex v = 0; v < 4; ++v) {
            double expected = trials * (v == 0 ? 0.5 : 1.0 / 6.0);
            double diff = counts[v] - expected;
            chi2 += diff * diff / expected;
        }
        CHECK(chi2 < 3.0 + 3.0 * std::sqrt(6.0));
    }
    SECTION("uniform sampling stays in range") {
        auto s = StartSpec::uniform().sample(star, 64, rng);
        for (Vertex v : s) CHECK(v < 4);
    }
}

TEST_CASE("cover estimate on deterministic instances", "[estimate]") {
    Graph g = gen_complete(2, false);
    Estimate e = estimate_cover(g, StartSpec::fixed(0), 1, 50, 1);
    CHECK(e.mean == 1.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.trials == 50);
    CHECK(e.seed == 1);
}

TEST_CASE("cover estimate matches the clique closed form", "[estimate]") {
    // E[C(K_16 with loops)] = 16 H_15.
    Graph g = gen_complete(16, true);
    Estimate e = estimate_cover(g, StartSpec::fixed(0), 1, 1000, 42);
    double exact = coupon_collector_mean(16, true);
    CHECK(exact == Catch::Approx(53.09166389166389).epsilon(1e-13));
    CHECK(std::abs(e.mean - exact) <= 3.0 * e.std_error);
}

TEST_CASE("adding walkers never slows expected cover", "[estimate]") {
    Graph g = gen_complete(16, true);
    Estimate c1 = estimate_cover(g, StartSpec::fixed(0), 1, 600, 5);
    Estimate c2 = estimate_cover(g, StartSpec::fixed(0), 2, 600, 6);
    Estimate c4 = estimate_cover(g, StartSpec::fixed(0), 4, 600, 7);
    double slack1 = 3.0 * std::hypot(c1.std_error, c2.std_error);
    double slack2 = 3.0 * std::hypot(c2.std_error, c4.std_error);
    CHECK(c2.mean <= c1.mean + slack1);
    CHECK(c4.mean <= c2.mean + slack2);
}

TEST_CASE("hitting estimates agree with the exact matrix", "[estimate]") {
    struct Case {
        Graph g;
        Vertex u, v;
    };
    std::vector<Case> cases;
    cases.push_back({gen_cycle(8), 0, 4});
    cases.push_back({gen_complete(4, false), 1, 3});
    cases.push_back({gen_barbell(9).graph, 0, 5});
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto& c = cases[i];
        HittingMatrix hm = hitting_matrix(c.g);
        Estimate e = estimate_hitting(c.g, c.u, c.v, 2000, 100 + i);
        INFO("case " << i << " exact " << hm(c.u, c.v));
        CHECK(std::abs(e.mean - hm(c.u, c.v)) <= 3.0 * e.std_error);
    }
}

TEST_CASE("estimates are bit-identical across worker counts", "[estimate]") {
    Graph g = gen_cycle(24);
    Estimate solo = estimate_cover(g, StartSpec::stationary(), 2, 64, 9, 0, 1);
    Estimate quad = estimate_cover(g, StartSpec::stationary(), 2, 64, 9, 0, 4);
    CHECK(solo.mean == quad.mean);       // bitwise, not approximate
    CHECK(solo.std_error == quad.std_error);
    ProportionEstimate p1 = estimate_cover_prob(g, {0}, 300, 64, 10, 1);
    ProportionEstimate p8 = estimate_cover_prob(g, {0}, 300, 64, 10, 8);
    CHECK(p1.successes == p8.successes);
}

TEST_CASE("trial failures surface deterministically under workers", "[estimate]") {
    Graph g = gen_cycle(32);
    for (unsigned workers : {1u, 4u}) {
        try {
            estimate_cover(g, StartSpec::fixed(0), 1, 32, 11, 2, workers);
            FAIL("no throw");
        } catch (const TimeoutError& e) {
            CHECK(e.rounds == 2);  // every trial hits the 2-round cap
        }
    }
}

TEST_CASE("speedup on the 2-clique is exactly 1", "[estimate]") {
    Graph g = gen_complete(2, false);
    SpeedupEstimate s = estimate_speedup(g, StartSpec::fixed(0), 2, 50, 3);
    CHECK(s.s_hat == 1.0);
    CHECK(s.std_error == 0.0);
    CHECK(s.k == 2);
}

TEST_CASE("degenerate ratio is rejected", "[estimate]") {
    // On a single looped vertex every cover time is 0, so the denominator is
    // not separated from zero and the ratio estimate must refuse.
    Graph g = Graph::from_edges(1, {{0, 0}});
    CHECK_THROWS_AS(estimate_speedup(g, StartSpec::fixed(0), 2, 50, 4),
                    UnstableRatioError);
}

TEST_CASE("cover probability against an exact interval DP", "[estimate]") {
    // On the cycle the visited set is an arc [-a, b]; track (a, b, position)
    // exactly to get P[single walk covers the 8-cycle within 64 steps].
    const int n = 8, T = 64;
    const int span = n - 1;
    // dp[a][b][p + a]: probability of extents (a, b) with walker at offset p.
    std::vector dp(n, std::vector(n, std::vector<double>(2 * n, 0.0)));
    dp[0][0][0] = 1.0;
    double covered = 0.0;
    for (int t = 1; t <= T; ++t) {
        std::vector next(n, std::vector(n, std::vector<double>(2 * n, 0.0)));
        for (int a = 0; a < n; ++a)
            for (int b = 0; a + b < span; ++b)
                for (int p = -a; p <= b; ++p) {
                    double mass = dp[a][b][p + a];
                    if (mass == 0.0) continue;
                    for (int dir : {-1, 1}) {
                        int q = p + dir;
                        int na = std::max(a, -q), nb = std::max(b, q);
                        if (na + nb >= span)
                            covered += 0.5 * mass;
                        else
                            next[na][nb][q + na] += 0.5 * mass;
                    }
                }
        dp.swap(next);
    }
    CHECK(covered == Catch::Approx(0.9670543500344351).epsilon(1e-12));

    Graph g = gen_cycle(n);
    ProportionEstimate est = estimate_cover_prob(g, {0}, T, 2000, 12);
    CHECK(est.p_hat == Catch::Approx(covered).margin(3.0 * est.std_error()));
    CHECK(est.wilson_low < covered);
    CHECK(covered < est.wilson_high);
}

TEST_CASE("wilson interval edge cases", "[estimate]") {
    ProportionEstimate zero = make_proportion(0, 50, 1);
    CHECK(zero.p_hat == 0.0);
    CHECK(zero.wilson_low == Catch::Approx(0.0).margin(1e-12));
    CHECK(zero.wilson_high > 0.0);
    CHECK(zero.wilson_high < 0.15);
    ProportionEstimate all = make_proportion(50, 50, 1);
    CHECK(all.p_hat == 1.0);
    CHECK(all.wilson_high == 1.0);
    CHECK(all.wilson_low > 0.85);
    ProportionEstimate half = make_proportion(25, 50, 1);
    CHECK(half.wilson_low < 0.5);
    CHECK(half.wilson_high > 0.5);
    CHECK_THROWS_AS(make_proportion(5, 4, 1), ArgError);
}

TEST_CASE("candidate starts find diameter endpoints", "[estimate]") {
    auto cyc = candidate_starts(gen_cycle(16));
    CHECK(cyc == std::vector<Vertex>{0, 8});
    auto bb = gen_barbell(13);
    auto cands = candidate_starts(bb.graph);
    CHECK(std::find(cands.begin(), cands.end(), bb.center) != cands.end());
    CHECK(cands.size() <= 3);
}

TEST_CASE("max-over-candidates picks the dominant estimate", "[estimate]") {
    Graph g = gen_cycle(16);
    auto cands = candidate_starts(g);
    auto [vertex, est] = estimate_cover_max(g, 1, 200, 77, cands);
    // Mechanics: the reported estimate must equal an independent rerun of the
    // winning candidate under the same derived seed.
    auto it = std::find(cands.begin(), cands.end(), vertex);
    REQUIRE(it != cands.end());
    auto j = static_cast<std::uint64_t>(it - cands.begin());
    Estimate replay = estimate_cover(g, StartSpec::fixed(vertex), 1, 200, mix_seed(77, j));
    CHECK(est.mean == replay.mean);
    for (std::size_t j2 = 0; j2 < cands.size(); ++j2) {
        Estimate other = estimate_cover(g, StartSpec::fixed(cands[j2]), 1, 200, mix_seed(77, j2));
        CHECK(other.mean <= est.mean);
    }
}

TEST_CASE("stationary starts cover no slower than the worst candidate", "[estimate]") {
    auto bb = gen_barbell(13);
    Estimate pi_start = estimate_cover(bb.graph, StartSpec::stationary(), 2, 400, 21);
    auto [vertex, worst] = estimate_cover_max(bb.graph, 2, 400, 22,
                                              candidate_starts(bb.graph));
    double slack = 3.0 * std::hypot(pi_start.std_error, worst.std_error);
    CHECK(pi_start.mean <= worst.mean + slack);
}

TEST_CASE("estimate parameter validation", "[estimate]") {
    Graph g = gen_cycle(8);
    CHECK_THROWS_AS(estimate_cover(g, StartSpec::fixed(0), 0, 10, 1), ArgError);
    CHECK_THROWS_AS(estimate_cover(g, StartSpec::fixed(0), 1, 1, 1), ArgError);
    CHECK_THROWS_AS(estimate_cover_max(g, 1, 10, 1, {}), ArgError);
    Graph two = Graph::from_edges(4, {{0, 1}, {2, 3}});
    CHECK_THROWS_AS(estimate_cover(two, StartSpec::fixed(0), 1, 10, 1), ArgError);
}

TEST_CASE("estimate JSON shape", "[estimate]") {
    Estimate e{12.5, 0.25, 100, 7, 2};
    auto j = e.to_json();
    CHECK(j["mean"] == 12.5);
    CHECK(j["stderr"] == 0.25);
    CHECK(j["trials"] == 100);
    CHECK(j["seed"] == 7);
    CHECK(j["cap_hits"] == 2);
}
