#include "rampflex/analysis.hpp"
#include "rampflex/flex_model.hpp"

#include <doctest.h>

#include <sstream>

using namespace rampflex;

namespace {

Schedule storage_schedule(std::vector<double> x) {
    Schedule s;
    s.decision = std::move(x);
    s.step_cost.assign(s.decision.size(), 0.0);
    return s;
}

}  // namespace

TEST_CASE("arbitrage gain") {
    CHECK(arbitrage_gain(storage_schedule({0, 0, 0})) == 0.0);
    Schedule s = storage_schedule({0.8, -0.8});
    s.step_cost = {0.08, -0.4};
    CHECK(arbitrage_gain(s) == doctest::Approx(0.32));
}

TEST_CASE("equivalent full cycles") {
    StorageParams p;  // usable capacity 0.8
    CHECK(equivalent_full_cycles(storage_schedule({0.8, -0.8}), p) == doctest::Approx(1.0));
    CHECK(equivalent_full_cycles(storage_schedule({0, 0}), p) == 0.0);
    CHECK(equivalent_full_cycles(storage_schedule({0.4, -0.4, 0.4, -0.4}), p) == doctest::Approx(1.0));
    p.b_min = p.b_max;
    CHECK_THROWS_AS(equivalent_full_cycles(storage_schedule({0}), p), ModelError);
}

TEST_CASE("switching count") {
    CHECK(switching_count(storage_schedule({4, 4, 4, 0, 0})) == 2);
    CHECK(switching_count(storage_schedule({0, 0, 0})) == 0);
    CHECK(switching_count(storage_schedule({1, 1 + 1e-9, 1})) == 1);
}

TEST_CASE("ramp-rate sweep") {
    const auto prices = load_price_csv(bundled_sample_day(), 0.25);
    const std::vector<double> fractions{0.05, 0.1, 0.2, 0.5, 1.0};
    const auto sweep = ramp_rate_sweep(StorageParams{}, prices, fractions);
    REQUIRE(sweep.points.size() == fractions.size());
    CHECK(*sweep.points.back().marginal_gain_pct == 100.0);
    for (std::size_t i = 1; i < sweep.points.size(); ++i) {
        CHECK(sweep.points[i].gain >= sweep.points[i - 1].gain - 1e-9);
    }
    for (const auto& p : sweep.points) {
        REQUIRE(p.gain_per_cycle.has_value());
        CHECK(*p.gain_per_cycle == doctest::Approx(p.gain / p.cycles));
    }
    // Independent HiGHS reference at fraction 0.1.
    CHECK(sweep.points[1].gain == doctest::Approx(0.0602476680215).epsilon(1e-9));

    CHECK_THROWS_AS(ramp_rate_sweep(StorageParams{}, prices, {0.5, 0.2}), ModelError);
    CHECK_THROWS_AS(ramp_rate_sweep(StorageParams{}, prices, {0.0, 1.0}), ModelError);
}

TEST_CASE("sweep with zero reference gain reports undefined markers") {
    PriceSignal prices;
    prices.p_buy.assign(8, 0.05);
    prices.p_sell = prices.p_buy;
    prices.h = 0.25;
    const auto sweep = ramp_rate_sweep(StorageParams{}, prices, {0.5, 1.0});
    for (const auto& p : sweep.points) {
        CHECK_FALSE(p.marginal_gain_pct.has_value());
        CHECK_FALSE(p.gain_per_cycle.has_value());
    }
    std::ostringstream csv;
    write_sweep_csv(csv, sweep);
    CHECK(csv.str() == "fraction,gain,marginal_gain_pct,cycles,gain_per_cycle\n0.5,0,NA,0,NA\n1,0,NA,0,NA\n");
    CHECK(sweep_json(sweep).find("null") != std::string::npos);
}

TEST_CASE("xC-yC sweep shape and per-curve monotonicity") {
    const auto prices = synthetic_day(3, 96, 0.25);
    const auto result = xc_yc_sweep(StorageParams{}, prices, {0.5, 1.0}, {0.1, 0.5, 1.0});
    REQUIRE(result.sweeps.size() == 2);
    for (const auto& sweep : result.sweeps) {
        REQUIRE(sweep.points.size() == 3);
        CHECK(*sweep.points.back().marginal_gain_pct == 100.0);
        for (std::size_t i = 1; i < 3; ++i) CHECK(sweep.points[i].gain >= sweep.points[i - 1].gain - 1e-9);
    }
    CHECK_THROWS_AS(xc_yc_sweep(StorageParams{}, prices, {0.0}, {1.0}), ModelError);
}

TEST_CASE("Monte Carlo determinism and aggregation") {
    const PriceGenerator gen = [](std::uint64_t s) { return synthetic_day(s, 48, 0.5); };
    const auto one = monte_carlo_run(StorageParams{}, gen, 12, 7, 1);
    const auto four = monte_carlo_run(StorageParams{}, gen, 12, 7, 4);
    CHECK(mc_json(one, false) == mc_json(four, false));
    CHECK(one.scenarios.size() == 12);
    CHECK(one.failures == 0);
    double total = 0.0;
    for (const auto& sc : one.scenarios) {
        total += sc.gain;
        CHECK(sc.wall_seconds >= 0.0);
    }
    CHECK(one.aggregate_gain == total);

    const auto single = monte_carlo_run(StorageParams{}, gen, 1, 7, 1);
    CHECK(single.aggregate_gain == single.scenarios[0].gain);
    CHECK(single.aggregate_gain == doctest::Approx(-single.scenarios[0].objective));
    CHECK(scenario_seed(7, 0) != scenario_seed(7, 1));
    CHECK(scenario_seed(7, 0) != scenario_seed(8, 0));
}

TEST_CASE("Monte Carlo records failing scenarios and continues") {
    const PriceGenerator gen = [](std::uint64_t s) {
        if (s % 2 == 0) throw std::runtime_error("bad day");
        return synthetic_day(s, 24, 1.0);
    };
    StorageParams p;
    p.delta_min = -0.5;
    p.delta_max = 0.5;
    p.tau_min = -0.5;
    p.tau_max = 0.5;
    const auto report = monte_carlo_run(p, gen, 20, 3, 1);
    std::size_t failed = 0;
    for (const auto& sc : report.scenarios) failed += !sc.error.empty();
    CHECK(report.failures == failed);
    CHECK(report.failures > 0);
    CHECK(report.failures < 20);
}
