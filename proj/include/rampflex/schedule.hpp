#pragma once

#include <numeric>
#include <vector>

namespace rampflex {

enum class ScheduleKind { Storage, Flexibility };

/// Optimised per-step trajectory.
///
/// Storage: `decision` is the energy change x_i (kWh), `level` the state of
/// charge after step i (kWh), `grid_power` the power drawn from the grid (kW,
/// negative when injecting).
///
/// Flexibility: `decision` is the consumption y_i (kW), `level` the cumulative
/// energy consumed after step i (kWh), `grid_power` equals `decision`.
struct Schedule {
    ScheduleKind kind = ScheduleKind::Storage;
    std::vector<double> decision;
    std::vector<double> level;
    std::vector<double> grid_power;
    std::vector<double> step_cost;  // currency

    std::size_t size() const { return decision.size(); }
    double total_cost() const { return std::accumulate(step_cost.begin(), step_cost.end(), 0.0); }
};

}  // namespace rampflex
