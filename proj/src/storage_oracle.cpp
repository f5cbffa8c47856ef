#include "rampflex/storage_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace rampflex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGridTol = 1e-9;

}  // namespace

OracleResult solve_storage_oracle(const StorageParams& params, const PriceSignal& prices,
                                  std::size_t grid_points, const OracleOptions& options) {
    validate(prices);
    validate(params, prices.h);
    if (grid_points < 2) throw ModelError("oracle needs at least two grid points");
    const auto eta = effective_efficiencies(params);
    const int levels = static_cast<int>(grid_points);
    const int steps = static_cast<int>(prices.size());
    const double span = params.usable_capacity();
    if (span <= 0.0) throw ModelError("oracle needs b_max > b_min");
    const double delta = span / (levels - 1);
    const double h = prices.h;

    const double start_pos = (params.b_0 - params.b_min) / delta;
    const int start = static_cast<int>(std::lround(start_pos));
    if (std::abs(start_pos - start) > kGridTol * levels) throw ModelError("b_0 is not on the oracle grid");

    // Actions are level differences a with X_min <= a * delta <= X_max.
    const double tol = kGridTol * delta;
    const int a_lo = std::max(-(levels - 1), static_cast<int>(std::ceil((params.x_min(h) - tol) / delta)));
    const int a_hi = std::min(levels - 1, static_cast<int>(std::floor((params.x_max(h) + tol) / delta)));
    if (a_lo > a_hi) throw ModelError("oracle grid admits no action");
    const int r_lo = static_cast<int>(std::ceil((params.tau_min - tol) / delta));
    const int r_hi = static_cast<int>(std::floor((params.tau_max + tol) / delta));
    const int actions = a_hi - a_lo + 1;
    const int window = options.ramp_rate ? std::min(actions, r_hi - r_lo + 1) : actions;

    const double work = static_cast<double>(levels) * actions * window * steps;
    if (work > options.transition_budget) {
        throw ModelError("oracle state-action space exceeds the configured budget");
    }

    auto state = [actions](int level, int prev) { return static_cast<std::size_t>(level) * actions + prev; };
    const std::size_t states = static_cast<std::size_t>(levels) * actions;

    // value[s] = optimal cost-to-go from state s before the current step.
    std::vector<double> next(states, 0.0);
    std::vector<double> value(states);
    std::vector<std::vector<std::int32_t>> policy(steps, std::vector<std::int32_t>(states, -1));

    for (int i = steps - 1; i >= 0; --i) {
        std::vector<double> cost(actions);
        for (int a = 0; a < actions; ++a) {
            cost[a] = storage_step_cost((a + a_lo) * delta, prices.p_buy[i], prices.p_sell[i], eta);
        }
        for (int level = 0; level < levels; ++level) {
            for (int prev = 0; prev < actions; ++prev) {
                // Step 1 has no ramp-rate row beyond X itself.
                int lo = 0;
                int hi = actions - 1;
                if (i > 0 && options.ramp_rate) {
                    lo = std::max(lo, prev + r_lo);
                    hi = std::min(hi, prev + r_hi);
                }
                lo = std::max(lo, -level - a_lo);
                hi = std::min(hi, levels - 1 - level - a_lo);
                double best = kInf;
                std::int32_t arg = -1;
                for (int a = lo; a <= hi; ++a) {
                    const double v = cost[a] + next[state(level + a + a_lo, a)];
                    if (v < best) {
                        best = v;
                        arg = a;
                    }
                }
                value[state(level, prev)] = best;
                policy[i][state(level, prev)] = arg;
            }
        }
        std::swap(next, value);
    }

    // The previous action at step 1 is irrelevant; use the zero action slot
    // when it exists.
    const int prev0 = std::clamp(-a_lo, 0, actions - 1);
    OracleResult result;
    result.objective = next[state(start, prev0)];
    if (!std::isfinite(result.objective)) throw ModelError("oracle grid admits no feasible schedule");

    int level = start;
    int prev = prev0;
    for (int i = 0; i < steps; ++i) {
        const int a = policy[i][state(level, prev)];
        level += a + a_lo;
        prev = a;
        result.x.push_back((a + a_lo) * delta);
        result.soc.push_back(params.b_min + level * delta);
    }
    return result;
}

}  // namespace rampflex
