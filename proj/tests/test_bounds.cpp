#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "kwalk/bounds.hpp"
#include "kwalk/exact.hpp"
#include "kwalk/generators.hpp"
#include "kwalk/rng.hpp"

using namespace kwalk;

TEST_CASE("matthews sandwich values", "[bounds]") {
    auto [lo2, hi2] = matthews_bounds(1.0, 1.0, 2);
    CHECK(lo2 == Catch::Approx(1.5));
    CHECK(hi2 == Catch::Approx(1.5));
    // Exact 8-cycle hitting extremes; true C = 28 must sit inside.
    HittingMatrix h = hitting_matrix(gen_cycle(8));
    auto [lo, hi] = matthews_bounds(h.h_min, h.h_max, 8);
    CHECK(lo == Catch::Approx(7.0 * 2.717857142857143).epsilon(1e-12));
    CHECK(hi == Catch::Approx(16.0 * 2.717857142857143).epsilon(1e-12));
    CHECK(lo < 28.0);
    CHECK(28.0 < hi);
    CHECK_THROWS_AS(matthews_bounds(2.0, 1.0, 8), ArgError);
    CHECK_THROWS_AS(matthews_bounds(1.0, 2.0, 1), ArgError);
}

TEST_CASE("k-walk cover upper bound from the hitting ceiling", "[bounds]") {
    BoundReport r3 = baby_matthews_upper(1.0, 1000, 3);
    CHECK(r3.intermediates.at("r") == 4.0);
    CHECK(r3.value == Catch::Approx(11.257865797883442).epsilon(1e-12));
    CHECK(r3.ok());
    BoundReport r6 = baby_matthews_upper(1.0, 1000, 6);
    CHECK(r6.intermediates.at("r") == 2.0);
    CHECK(r6.value < r3.value);  // more walkers, tighter bound
    // Outside the proof regime the value still computes but is flagged.
    BoundReport wide = baby_matthews_upper(1.0, 1000, 100);
    CHECK_FALSE(wide.ok());
    CHECK(wide.value > 0.0);
    CHECK_THROWS_AS(baby_matthews_upper(1.0, 2, 1), ArgError);
}

TEST_CASE("ceiling slack property of the k-walk upper bound", "[bounds]") {
    // value(k+1) <= value(k) + e*h_max: the ceiling can bounce by at most one.
    const double h_max = 17.0;
    for (std::uint64_t n : {10u, 100u, 1000u}) {
        double ln_n = std::log(static_cast<double>(n));
        auto max_k = static_cast<std::uint32_t>(ln_n);
        for (std::uint32_t k = 1; k + 1 <= std::max(2u, max_k); ++k) {
            double now = baby_matthews_upper(h_max, n, k).value;
            double next = baby_matthews_upper(h_max, n, k + 1).value;
            CHECK(next <= now + std::exp(1.0) * h_max);
        }
    }
}

TEST_CASE("composition probability lower bound", "[bounds]") {
    CHECK(compose_cover_prob(0.8, 1.0, 5, 3) == 0.8);
    CHECK(compose_cover_prob(0.9, 0.5, 4, 3) == Catch::Approx(0.45));
    CHECK(compose_cover_prob(0.5, 0.1, 100, 1) == 0.0);  // clamp at zero
    CHECK_THROWS_AS(compose_cover_prob(1.2, 0.5, 1, 1), ArgError);
    CHECK_THROWS_AS(compose_cover_prob(0.5, 0.5, 0, 1), ArgError);
}

TEST_CASE("composition bound monotonicity", "[bounds]") {
    // Random sweep: non-decreasing in p_c, p_h, ell; non-increasing in k.
    SplitMix64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        double p_c = rng.next_unit();
        double p_h = rng.next_unit();
        std::uint32_t k = 1 + rng.next_below(20);
        std::uint32_t ell = 1 + rng.next_below(10);
        double base = compose_cover_prob(p_c, p_h, k, ell);
        CHECK(compose_cover_prob(std::min(1.0, p_c + 0.05), p_h, k, ell) >= base);
        CHECK(compose_cover_prob(p_c, std::min(1.0, p_h + 0.05), k, ell) >= base);
        CHECK(compose_cover_prob(p_c, p_h, k + 1, ell) <= base);
        CHECK(compose_cover_prob(p_c, p_h, k, ell + 1) >= base);
    }
}

TEST_CASE("k-walk speed-up upper bound", "[bounds]") {
    BoundReport r = kspeed_upper(1000.0, 10.0, 10, 2.0, 0.05);
    CHECK(r.value == Catch::Approx(214.07755278982137).epsilon(1e-12));
    CHECK(r.intermediates.at("g") == Catch::Approx(100.0));
    // k = 1, eps = 0, tiny f_val degenerates to the single-walk cover.
    BoundReport solo = kspeed_upper(1000.0, 10.0, 1, 1e-12, 0.0);
    CHECK(solo.value == Catch::Approx(1000.0).margin(1e-9));
    CHECK(default_f_val(1000.0, 10.0) == Catch::Approx(std::log(100.0)).epsilon(1e-14));
    CHECK_THROWS_AS(kspeed_upper(0.0, 1.0, 1, 1.0), ArgError);
    CHECK_THROWS_AS(kspeed_upper(1.0, 1.0, 1, 1.0, -0.1), ArgError);
}

TEST_CASE("expander short-walk hit probability", "[bounds]") {
    BoundReport r = expander_hit_lower(8, 4.0, 2.0);
    CHECK(r.intermediates.at("s") == Catch::Approx(4.0));
    CHECK(r.intermediates.at("b") == Catch::Approx(1.0));
    CHECK(r.intermediates.at("walk_length") == Catch::Approx(8.0));
    CHECK(r.value == Catch::Approx(0.0625));
    BoundReport big = expander_hit_lower(1024, 8.0, 3.0);
    CHECK(big.intermediates.at("s") == Catch::Approx(7.773645578725661).epsilon(1e-12));
    CHECK(big.intermediates.at("b") == Catch::Approx(0.6));
    CHECK(big.value == Catch::Approx(0.0017135042788706013).epsilon(1e-12));
    CHECK_THROWS_AS(expander_hit_lower(8, 4.0, 4.0), ArgError);
    CHECK_THROWS_AS(expander_hit_lower(8, 4.0, 0.0), ArgError);
}

TEST_CASE("expander per-walk budget", "[bounds]") {
    BoundReport r = expander_walk_budget(1024, 8.0, 3.0, 64);
    CHECK(r.value == Catch::Approx(2839.1308515735363).epsilon(1e-12));
    CHECK(r.intermediates.at("failure_bound") == Catch::Approx(1.0 / (1024.0 * 1024.0)));
    CHECK(r.ok());
    // k so large the budget undercuts one 2s hit window: recorded, not thrown.
    BoundReport tiny = expander_walk_budget(1024, 8.0, 3.0, 1000000);
    CHECK_FALSE(tiny.ok());
    CHECK(tiny.value < 2.0 * tiny.intermediates.at("s"));
}

TEST_CASE("cycle cover bounds", "[bounds]") {
    BoundReport r = cycle_bounds(100, 1000);
    CHECK(r.value == Catch::Approx(69.54337514486126).epsilon(1e-12));
    REQUIRE(r.upper.has_value());
    CHECK(*r.upper == Catch::Approx(2895.2965460216788).epsilon(1e-12));
    CHECK(r.value < *r.upper);
    BoundReport two = cycle_bounds(100, 2);
    CHECK(two.value == Catch::Approx(225.42110013890053).epsilon(1e-12));
    CHECK_FALSE(two.upper.has_value());  // k < 3: upper side out of regime
    CHECK_FALSE(two.ok());
    // k beyond e^{n/4} drops the upper side too.
    BoundReport huge = cycle_bounds(8, 10);
    CHECK_FALSE(huge.upper.has_value());
    CHECK_THROWS_AS(cycle_bounds(2, 4), ArgError);
}

TEST_CASE("torus lower bound by projection", "[bounds]") {
    BoundReport r = grid_lower(1024, 2, 16);
    CHECK(r.intermediates.at("side") == 32.0);
    CHECK(r.value == Catch::Approx(13.190354659556238).epsilon(1e-12));
    // Monotone decreasing in k.
    CHECK(grid_lower(1024, 2, 2).value > r.value);
    CHECK_THROWS_AS(grid_lower(1000, 2, 4), ArgError);  // not a square
    CHECK_THROWS_AS(grid_lower(1024, 1, 4), ArgError);
    CHECK_THROWS_AS(grid_lower(1024, 2, 1), ArgError);
    // Matches the cycle bound on the projected side length.
    CHECK(r.value == Catch::Approx(cycle_bounds(32, 16).value));
}

TEST_CASE("mixing-time speed-up floor", "[bounds]") {
    BoundReport r = mixing_speedup_lower(8, 1, 55);
    CHECK(r.value == Catch::Approx(8.0 / std::log(55.0)).epsilon(1e-12));
    CHECK(r.ok());
    BoundReport wide = mixing_speedup_lower(100, 1, 10);
    CHECK_FALSE(wide.ok());  // k > n regime violation
    CHECK_THROWS_AS(mixing_speedup_lower(4, 0, 10), ArgError);
}

TEST_CASE("bound reports are pure functions of their inputs", "[bounds]") {
    auto replay_baby = [](const BoundReport& r) {
        return baby_matthews_upper(r.inputs.at("h_max"),
                                   static_cast<std::uint64_t>(r.inputs.at("n")),
                                   static_cast<std::uint32_t>(r.inputs.at("k")));
    };
    BoundReport baby = baby_matthews_upper(3.5, 500, 4);
    CHECK(replay_baby(baby).value == baby.value);  // bitwise

    BoundReport budget = expander_walk_budget(512, 6.0, 2.5, 32);
    BoundReport budget2 = expander_walk_budget(
        static_cast<std::uint64_t>(budget.inputs.at("n")), budget.inputs.at("d"),
        budget.inputs.at("lambda"), static_cast<std::uint32_t>(budget.inputs.at("k")));
    CHECK(budget2.value == budget.value);

    BoundReport cyc = cycle_bounds(77, 9);
    BoundReport cyc2 = cycle_bounds(static_cast<std::uint64_t>(cyc.inputs.at("n")),
                                    static_cast<std::uint32_t>(cyc.inputs.at("k")));
    CHECK(cyc2.value == cyc.value);
    CHECK(cyc2.upper == cyc.upper);
}

TEST_CASE("bound report JSON carries the full trail", "[bounds]") {
    BoundReport r = cycle_bounds(100, 1000);
    auto j = r.to_json();
    CHECK(j["name"] == "cycle_bounds");
    CHECK(j["value"] == r.value);
    CHECK(j["upper"] == *r.upper);
    CHECK(j["intermediates"].contains("ln_8k"));
    CHECK(j["notes"].size() == 1);
    BoundReport no_upper = cycle_bounds(100, 2);
    CHECK_FALSE(no_upper.to_json().contains("upper"));
}
