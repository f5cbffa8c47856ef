#include "rampflex/flex_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rampflex {

namespace {

void require(bool ok, const std::string& invariant) {
    if (!ok) throw ModelError("flexibility parameters violate: " + invariant);
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

}  // namespace

FlexParams FlexParams::uniform(std::size_t steps, std::size_t t_a, std::size_t t_d, double K, double rated,
                               double xi_fraction, double epsilon) {
    FlexParams p;
    p.t_a = t_a;
    p.t_d = t_d;
    p.K = K;
    p.epsilon = epsilon < 0.0 ? kDefaultEpsilonFraction * K : epsilon;
    p.y_min.assign(steps, 0.0);
    p.y_max.assign(steps, rated);
    p.xi_min = -xi_fraction * rated;
    p.xi_max = xi_fraction * rated;
    return p;
}

void validate(const FlexParams& p, std::size_t steps, double h) {
    require(h > 0.0 && std::isfinite(h), "h > 0");
    require(p.t_a >= 1 && p.t_a <= p.t_d && p.t_d <= steps, "1 <= t_a <= t_d <= N");
    require(p.y_min.size() == steps && p.y_max.size() == steps, "y_min and y_max have length N");
    require(std::isfinite(p.K) && p.K >= 0.0, "K >= 0");
    require(std::isfinite(p.epsilon) && p.epsilon >= 0.0, "epsilon >= 0");
    for (std::size_t i = 0; i < steps; ++i) {
        require(std::isfinite(p.y_min[i]) && std::isfinite(p.y_max[i]), "finite power bounds");
        require(p.y_min[i] >= 0.0, "y_min >= 0 (step " + std::to_string(i + 1) + ")");
        require(p.y_min[i] <= p.y_max[i], "y_min <= y_max (step " + std::to_string(i + 1) + ")");
    }
    const double rated = max_of(p.y_max);
    require(p.xi_min <= 0.0 && p.xi_max >= 0.0, "xi_min <= 0 <= xi_max");
    require(p.xi_min >= -rated, "xi_min >= -max(y_max)");
    require(p.xi_max <= rated, "xi_max <= max(y_max)");

    double lo = 0.0;
    double hi = 0.0;
    for (std::size_t i = p.t_a; i <= p.t_d; ++i) {
        lo += p.y_min[i - 1];
        hi += p.y_max[i - 1];
    }
    require(h * lo <= p.K + p.epsilon, "h * sum(y_min over window) <= K + epsilon");
    require(h * hi >= p.K - p.epsilon, "h * sum(y_max over window) >= K - epsilon");
}

LpProblem build_flex_lp(const FlexParams& params, const PriceSignal& prices) {
    validate(prices);
    const std::size_t steps = prices.size();
    validate(params, steps, prices.h);
    const Eigen::Index n = static_cast<Eigen::Index>(steps);
    const double h = prices.h;
    const auto ta = static_cast<Eigen::Index>(params.t_a) - 1;  // 0-based window
    const auto td = static_cast<Eigen::Index>(params.t_d) - 1;

    LpProblem lp;
    lp.f = Eigen::VectorXd::Zero(2 * n);
    lp.f.tail(n).setOnes();
    lp.A = Eigen::MatrixXd::Zero(4 * n + 2, 2 * n);
    lp.b = Eigen::VectorXd::Zero(4 * n + 2);
    lp.lb.resize(2 * n);
    lp.ub.resize(2 * n);
    lp.lb.tail(n).setConstant(kSentinelMin);
    lp.ub.tail(n).setConstant(kSentinelMax);

    const Eigen::Index deadline = 2 * n;
    const Eigen::Index ramp_up = 2 * n + 2;
    const Eigen::Index ramp_down = 3 * n + 2;
    for (Eigen::Index i = 0; i < n; ++i) {
        const bool inside = i >= ta && i <= td;
        lp.A(i, i) = prices.p_buy[i] * h;
        lp.A(i, n + i) = -1.0;
        lp.A(n + i, i) = prices.p_sell[i] * h;
        lp.A(n + i, n + i) = -1.0;

        lp.lb[i] = inside ? params.y_min[i] : 0.0;
        lp.ub[i] = inside ? params.y_max[i] : 0.0;

        if (inside) {
            lp.A(deadline, i) = h;
            lp.A(deadline + 1, i) = -h;
            lp.A(ramp_up + i, i) = 1.0;
            lp.A(ramp_down + i, i) = -1.0;
            if (i > ta) {
                lp.A(ramp_up + i, i - 1) = -1.0;
                lp.A(ramp_down + i, i - 1) = 1.0;
            }
        }
        // The window-entry row is measured from rest and bounded by the power
        // limits; every other row carries the ramp rate.
        if (i == ta) {
            lp.b(ramp_up + i) = params.y_max[i];
            lp.b(ramp_down + i) = -params.y_min[i];
        } else {
            lp.b(ramp_up + i) = params.xi_max;
            lp.b(ramp_down + i) = -params.xi_min;
        }
    }
    lp.b(deadline) = params.K + params.epsilon;
    lp.b(deadline + 1) = -params.K + params.epsilon;

    auto label = [](const char* name, Eigen::Index i) { return std::string(name) + "[" + std::to_string(i + 1) + "]"; };
    for (Eigen::Index i = 0; i < n; ++i) lp.row_labels.push_back(label("seg_buy", i));
    for (Eigen::Index i = 0; i < n; ++i) lp.row_labels.push_back(label("seg_sell", i));
    lp.row_labels.push_back("deadline_max");
    lp.row_labels.push_back("deadline_min");
    for (Eigen::Index i = 0; i < n; ++i) lp.row_labels.push_back(label("rr_max", i));
    for (Eigen::Index i = 0; i < n; ++i) lp.row_labels.push_back(label("rr_min", i));
    for (Eigen::Index i = 0; i < n; ++i) lp.col_labels.push_back(label("y", i));
    for (Eigen::Index i = 0; i < n; ++i) lp.col_labels.push_back(label("t", i));
    return lp;
}

Schedule flex_schedule_from_power(const std::vector<double>& y, const PriceSignal& prices) {
    Schedule s;
    s.kind = ScheduleKind::Flexibility;
    double energy = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        energy += prices.h * y[i];
        s.decision.push_back(y[i]);
        s.level.push_back(energy);
        s.grid_power.push_back(y[i]);
        s.step_cost.push_back(prices.p_buy[i] * y[i] * prices.h);
    }
    return s;
}

Schedule nominal_profile(const FlexParams& params, const PriceSignal& prices) {
    validate(prices);
    validate(params, prices.size(), prices.h);
    const double h = prices.h;
    std::vector<double> y(prices.size(), 0.0);
    double remaining = params.K;
    for (std::size_t i = params.t_a; i <= params.t_d && remaining > 1e-12 * std::max(1.0, params.K); ++i) {
        const double rated = params.y_max[i - 1];
        const double energy = std::min(rated * h, remaining);
        y[i - 1] = energy / h;
        remaining -= energy;
    }
    if (remaining > 1e-9 * std::max(1.0, params.K)) {
        throw ModelError("K is unreachable at rated power inside the window");
    }
    return flex_schedule_from_power(y, prices);
}

Schedule extract_flex_schedule(const LpSolution& solution, const FlexParams& params, const PriceSignal& prices) {
    if (!solution.optimal()) {
        throw ModelError("cannot extract a schedule from a " + to_string(solution.status) + " solution");
    }
    const std::size_t n = prices.size();
    if (static_cast<std::size_t>(solution.x.size()) != 2 * n) {
        throw ModelError("solution length does not match the price signal");
    }
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = params.in_window(i + 1) ? solution.x[static_cast<Eigen::Index>(i)] : 0.0;
    }
    return flex_schedule_from_power(y, prices);
}

std::vector<std::string> check_flex_schedule(const Schedule& s, const FlexParams& p, double h, double tol) {
    std::vector<std::string> out;
    auto fail = [&out](std::size_t step, const std::string& what) {
        out.push_back("step " + std::to_string(step) + ": " + what);
    };
    const std::size_t n = s.size();
    if (p.y_min.size() != n || p.y_max.size() != n || p.t_d > n) {
        out.push_back("schedule length does not match the parameters");
        return out;
    }
    double energy = 0.0;
    for (std::size_t step = 1; step <= n; ++step) {
        const double y = s.decision[step - 1];
        energy += h * y;
        if (!p.in_window(step)) {
            if (y != 0.0) fail(step, "consumption outside the window");
            continue;
        }
        if (y < p.y_min[step - 1] - tol || y > p.y_max[step - 1] + tol) fail(step, "power outside [y_min, y_max]");
        if (step > p.t_a) {
            const double change = y - s.decision[step - 2];
            if (change < p.xi_min - tol || change > p.xi_max + tol) fail(step, "ramp rate outside [xi_min, xi_max]");
        }
    }
    if (energy < p.K - p.epsilon - tol || energy > p.K + p.epsilon + tol) {
        std::ostringstream msg;
        msg << "delivered energy " << energy << " outside [K - eps, K + eps]";
        out.push_back(msg.str());
    }
    return out;
}

}  // namespace rampflex
