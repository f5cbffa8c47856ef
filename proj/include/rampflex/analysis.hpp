#pragma once

#include "rampflex/format.hpp"
#include "rampflex/lp_problem.hpp"
#include "rampflex/prices.hpp"
#include "rampflex/schedule.hpp"
#include "rampflex/storage_model.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rampflex {

/// Storage profit: minus the total transaction cost.
double arbitrage_gain(const Schedule& storage_schedule);

/// Flexibility savings: nominal cost minus optimised cost.
double flex_savings(const Schedule& nominal, const Schedule& optimized);

/// Discharged energy over usable capacity (equivalent 100% DoD cycles).
double equivalent_full_cycles(const Schedule& storage_schedule, const StorageParams& params);

/// Steps where |y_i - y_{i-1}| > tol, with y_0 = 0.
std::size_t switching_count(const Schedule& schedule, double tol = 1e-6);

struct SweepPoint {
    double fraction = 0.0;
    LpStatus status = LpStatus::NumericalFailure;
    double objective = 0.0;
    double gain = 0.0;
    std::optional<double> marginal_gain_pct;  // empty when the unrestricted gain is zero
    double cycles = 0.0;
    std::optional<double> gain_per_cycle;     // empty when cycles <= 1e-9
};

struct SweepResult {
    std::vector<SweepPoint> points;
    double reference_gain = 0.0;  // gain at fraction 1
};

/// Solves the storage model with tau = fraction * (X_min, X_max) for every
/// fraction. Fractions must lie in (0, 1] and be ascending.
SweepResult ramp_rate_sweep(const StorageParams& params, const PriceSignal& prices,
                            const std::vector<double>& fractions);

struct XcYcResult {
    std::vector<double> c_rates;
    std::vector<SweepResult> sweeps;  // one per c-rate
};

/// Symmetric c-rate x: delta_max = -delta_min = x * b_max (kW per kWh of
/// b_max), then a ramp-rate sweep for each.
XcYcResult xc_yc_sweep(const StorageParams& params, const PriceSignal& prices, const std::vector<double>& c_rates,
                       const std::vector<double>& fractions);

using PriceGenerator = std::function<PriceSignal(std::uint64_t scenario_seed)>;

struct McScenario {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    LpStatus status = LpStatus::NumericalFailure;
    double objective = 0.0;
    double gain = 0.0;
    double wall_seconds = 0.0;
    std::string error;
};

struct McReport {
    std::size_t scenario_count = 0;
    std::uint64_t seed = 0;
    std::vector<McScenario> scenarios;  // ordered by index
    double aggregate_gain = 0.0;        // sum over OPTIMAL scenarios
    std::size_t failures = 0;
    double total_wall_seconds = 0.0;
};

/// Seed of scenario `index` derived from the run seed.
std::uint64_t scenario_seed(std::uint64_t seed, std::size_t index);

/// One storage LP per generated day. Scenarios are independent; results are
/// gathered by index so the report does not depend on `workers` (0 selects
/// the hardware concurrency). A failing scenario is recorded and the run
/// continues.
McReport monte_carlo_run(const StorageParams& base_params, const PriceGenerator& generator,
                         std::size_t scenario_count, std::uint64_t seed, unsigned workers = 0);

// Plot-ready output. Undefined values are written as NA in CSV and null in
// JSON.
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
std::string sweep_json(const SweepResult& sweep);
void write_xcyc_csv(std::ostream& out, const XcYcResult& result);
std::string xcyc_json(const XcYcResult& result);
void write_mc_csv(std::ostream& out, const McReport& report);
std::string mc_json(const McReport& report, bool include_timing = true);

}  // namespace rampflex
