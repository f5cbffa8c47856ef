#pragma once

#include "rampflex/prices.hpp"
#include "rampflex/storage_model.hpp"

#include <cstddef>
#include <vector>

namespace rampflex {

struct OracleResult {
    double objective = 0.0;
    std::vector<double> x;    // per-step energy change, kWh
    std::vector<double> soc;  // b_1..b_N
};

struct OracleOptions {
    // Upper bound on grid_points * actions * ramp-window * N transitions.
    double transition_budget = 4e9;
    // Mirrors StorageLpOptions::ramp_rate_rows.
    bool ramp_rate = true;
};

/// Exact optimum of the storage problem restricted to a uniform grid of
/// `grid_points` charge levels on [b_min, b_max], by backward dynamic
/// programming over (level, previous action). Enforces the capacity window,
/// X_min <= x_i <= X_max, and the ramp rate tau_min <= x_i - x_{i-1} <= tau_max
/// for i >= 2 (the first step is only bounded by X, as in the LP).
///
/// b_0 must sit on a grid level. Throws ModelError otherwise, or when the
/// state-action space exceeds the budget, or when the grid admits no path.
OracleResult solve_storage_oracle(const StorageParams& params, const PriceSignal& prices,
                                  std::size_t grid_points, const OracleOptions& options = {});

}  // namespace rampflex
