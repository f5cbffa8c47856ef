#pragma once

#include "rampflex/lp_problem.hpp"
#include "rampflex/model_error.hpp"
#include "rampflex/prices.hpp"
#include "rampflex/schedule.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace rampflex {

/// Deadline-constrained flexible consumption. Steps are 1-based and the
/// window [t_a, t_d] is inclusive. Powers in kW, energies in kWh, ramp rates
/// in kW per step.
struct FlexParams {
    std::size_t t_a = 1;
    std::size_t t_d = 1;
    double K = 0.0;
    double epsilon = 0.0;
    std::vector<double> y_min;
    std::vector<double> y_max;
    double xi_min = 0.0;
    double xi_max = 0.0;

    /// Uniform power bounds [0, rated] over `steps`, ramp rate
    /// +-xi_fraction * rated, epsilon defaulting to 1e-3 * K when negative.
    static FlexParams uniform(std::size_t steps, std::size_t t_a, std::size_t t_d, double K, double rated,
                              double xi_fraction = 1.0, double epsilon = -1.0);

    std::size_t window_length() const { return t_d - t_a + 1; }
    bool in_window(std::size_t step) const { return step >= t_a && step <= t_d; }  // 1-based
};

inline constexpr double kDefaultEpsilonFraction = 1e-3;

/// Throws ModelError naming the violated invariant, including the necessary
/// feasibility condition on K.
void validate(const FlexParams& params, std::size_t steps, double h);

/// Builds min sum(t) over X = [y_1..y_N, t_1..t_N] with 4N + 2 rows: buy
/// segment, sell segment, deadline upper, deadline lower, windowed ramp-rate
/// up, windowed ramp-rate down. Segment coefficients carry h so the objective
/// is in currency.
LpProblem build_flex_lp(const FlexParams& params, const PriceSignal& prices);

/// Rated-power charging from t_a until K is reached (last step possibly
/// partial). Throws ModelError when K is unreachable inside the window.
Schedule nominal_profile(const FlexParams& params, const PriceSignal& prices);

/// Throws ModelError when the solution is not OPTIMAL.
Schedule extract_flex_schedule(const LpSolution& solution, const FlexParams& params, const PriceSignal& prices);

/// Lists every violated schedule invariant: deadline band, zero consumption
/// outside the window, power bounds, and ramp rate between consecutive
/// in-window steps. The window-entry step is held to [y_min, y_max].
std::vector<std::string> check_flex_schedule(const Schedule& schedule, const FlexParams& params, double h,
                                             double tol = 1e-6);

/// Builds a flexibility schedule (cumulative energy, costs) from a power
/// sequence.
Schedule flex_schedule_from_power(const std::vector<double>& y, const PriceSignal& prices);

}  // namespace rampflex
