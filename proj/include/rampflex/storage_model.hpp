#pragma once

#include "rampflex/lp_problem.hpp"
#include "rampflex/model_error.hpp"
#include "rampflex/prices.hpp"
#include "rampflex/schedule.hpp"

#include <string>
#include <vector>

namespace rampflex {

/// Storage asset. Energies in kWh, ramp powers in kW, ramp rates in kWh per
/// step (the same unit as the per-step energy change x_i).
struct StorageParams {
    double b_min = 0.2;
    double b_max = 1.0;
    double b_0 = 0.2;
    double eta_ch = 0.95;
    double eta_dis = 0.95;
    double eta_conv = 1.0;
    double delta_min = -0.5;
    double delta_max = 0.5;
    double tau_min = -0.125;
    double tau_max = 0.125;

    double x_min(double h) const { return delta_min * h; }
    double x_max(double h) const { return delta_max * h; }
    double usable_capacity() const { return b_max - b_min; }
};

struct Efficiencies {
    double charge;
    double discharge;
};

/// Charging/discharging efficiencies seen through the converter.
Efficiencies effective_efficiencies(double eta_ch, double eta_dis, double eta_conv);
Efficiencies effective_efficiencies(const StorageParams& params);

/// Power drawn from the grid (kW) for an energy change x (kWh) over h hours.
double consumed_power(double x, double h, double eta_ch_star, double eta_dis_star);

/// Throws ModelError naming the violated invariant.
void validate(const StorageParams& params, double h);

/// Sets tau to fraction * (X_min, X_max).
StorageParams with_ramp_rate_fraction(StorageParams params, double fraction, double h);

struct StorageLpOptions {
    // Drop the ramp-rate block (rows 5 and 6) entirely. Only used to check
    // that the boundary ramp rate tau = X is a no-op.
    bool ramp_rate_rows = true;
};

/// Builds min sum(t) over X = [x_1..x_N, t_1..t_N] with 6N rows:
/// buy segment, sell segment, upper capacity, lower capacity, ramp-rate up,
/// ramp-rate down.
LpProblem build_storage_lp(const StorageParams& params, const PriceSignal& prices,
                           const StorageLpOptions& options = {});

/// Throws ModelError when the solution is not OPTIMAL.
Schedule extract_storage_schedule(const LpSolution& solution, const StorageParams& params,
                                  const PriceSignal& prices);

/// Lists every violated schedule invariant (state-of-charge recursion, capacity
/// window, ramp limits, ramp rate) at tolerance `tol`. The first step is held
/// to [X_min, X_max] since the device starts at rest.
std::vector<std::string> check_storage_schedule(const Schedule& schedule, const StorageParams& params,
                                                double h, double tol = 1e-6);

/// Per-step transaction cost max(p_buy x / eta_ch*, p_sell eta_dis* x).
double storage_step_cost(double x, double p_buy, double p_sell, const Efficiencies& eta);

}  // namespace rampflex
