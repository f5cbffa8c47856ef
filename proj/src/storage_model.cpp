#include "rampflex/storage_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace rampflex {

namespace {

void require(bool ok, const std::string& invariant) {
    if (!ok) throw ModelError("storage parameters violate: " + invariant);
}

bool in_unit_interval(double eta) { return eta > 0.0 && eta <= 1.0; }

// Fraction products such as 0.1 * X_max may land one ulp outside X.
constexpr double kBoundSlack = 1e-12;

}  // namespace

Efficiencies effective_efficiencies(double eta_ch, double eta_dis, double eta_conv) {
    if (!in_unit_interval(eta_ch) || !in_unit_interval(eta_dis) || !in_unit_interval(eta_conv)) {
        throw ModelError("efficiencies must lie in (0, 1]");
    }
    return {eta_ch * eta_conv, eta_dis * eta_conv};
}

Efficiencies effective_efficiencies(const StorageParams& p) {
    return effective_efficiencies(p.eta_ch, p.eta_dis, p.eta_conv);
}

double consumed_power(double x, double h, double eta_ch_star, double eta_dis_star) {
    return std::max(0.0, x) / (h * eta_ch_star) - eta_dis_star * std::max(0.0, -x) / h;
}

double storage_step_cost(double x, double p_buy, double p_sell, const Efficiencies& eta) {
    return std::max(p_buy * x / eta.charge, p_sell * eta.discharge * x);
}

void validate(const StorageParams& p, double h) {
    for (double v : {p.b_min, p.b_max, p.b_0, p.eta_ch, p.eta_dis, p.eta_conv, p.delta_min, p.delta_max,
                     p.tau_min, p.tau_max, h}) {
        require(std::isfinite(v), "all parameters finite");
    }
    require(h > 0.0, "h > 0");
    require(p.b_min >= 0.0, "0 <= b_min");
    require(p.b_min <= p.b_0, "b_min <= b_0");
    require(p.b_0 <= p.b_max, "b_0 <= b_max");
    require(in_unit_interval(p.eta_ch), "eta_ch in (0, 1]");
    require(in_unit_interval(p.eta_dis), "eta_dis in (0, 1]");
    require(in_unit_interval(p.eta_conv), "eta_conv in (0, 1]");
    require(p.delta_min <= 0.0 && p.delta_max >= 0.0, "delta_min <= 0 <= delta_max");
    require(p.tau_min <= 0.0 && p.tau_max >= 0.0, "tau_min <= 0 <= tau_max");
    const double slack = kBoundSlack * std::max(1.0, std::abs(p.x_max(h)) + std::abs(p.x_min(h)));
    require(p.tau_min >= p.x_min(h) - slack, "tau_min >= X_min");
    require(p.tau_max <= p.x_max(h) + slack, "tau_max <= X_max");
}

StorageParams with_ramp_rate_fraction(StorageParams p, double fraction, double h) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw ModelError("ramp-rate fraction must lie in (0, 1]");
    p.tau_min = fraction * p.x_min(h);
    p.tau_max = fraction * p.x_max(h);
    return p;
}

LpProblem build_storage_lp(const StorageParams& params, const PriceSignal& prices,
                           const StorageLpOptions& options) {
    validate(prices);
    validate(params, prices.h);
    const auto eta = effective_efficiencies(params);
    const Eigen::Index n = static_cast<Eigen::Index>(prices.size());
    const double h = prices.h;
    const double x_min = params.x_min(h);
    const double x_max = params.x_max(h);
    const Eigen::Index blocks = options.ramp_rate_rows ? 6 : 4;

    LpProblem lp;
    lp.f = Eigen::VectorXd::Zero(2 * n);
    lp.f.tail(n).setOnes();
    lp.A = Eigen::MatrixXd::Zero(blocks * n, 2 * n);
    lp.b = Eigen::VectorXd::Zero(blocks * n);
    lp.lb.resize(2 * n);
    lp.ub.resize(2 * n);
    lp.lb.head(n).setConstant(x_min);
    lp.ub.head(n).setConstant(x_max);
    lp.lb.tail(n).setConstant(kSentinelMin);
    lp.ub.tail(n).setConstant(kSentinelMax);

    for (Eigen::Index i = 0; i < n; ++i) {
        // segments
        lp.A(i, i) = prices.p_buy[i] / eta.charge;
        lp.A(i, n + i) = -1.0;
        lp.A(n + i, i) = prices.p_sell[i] * eta.discharge;
        lp.A(n + i, n + i) = -1.0;
        // capacity: lower-triangular cumulative sums
        for (Eigen::Index j = 0; j <= i; ++j) {
            lp.A(2 * n + i, j) = 1.0;
            lp.A(3 * n + i, j) = -1.0;
        }
        lp.b(2 * n + i) = params.b_max - params.b_0;
        lp.b(3 * n + i) = params.b_0 - params.b_min;
    }
    if (options.ramp_rate_rows) {
        for (Eigen::Index i = 0; i < n; ++i) {
            lp.A(4 * n + i, i) = 1.0;
            lp.A(5 * n + i, i) = -1.0;
            if (i > 0) {
                lp.A(4 * n + i, i - 1) = -1.0;
                lp.A(5 * n + i, i - 1) = 1.0;
            }
            lp.b(4 * n + i) = i == 0 ? x_max : params.tau_max;
            lp.b(5 * n + i) = i == 0 ? -x_min : -params.tau_min;
        }
    }

    static constexpr const char* kRowNames[] = {"seg_buy", "seg_sell", "cap_max", "cap_min", "rr_max", "rr_min"};
    for (Eigen::Index blk = 0; blk < blocks; ++blk) {
        for (Eigen::Index i = 0; i < n; ++i) {
            lp.row_labels.push_back(std::string(kRowNames[blk]) + "[" + std::to_string(i + 1) + "]");
        }
    }
    for (const char* name : {"x", "t"}) {
        for (Eigen::Index i = 0; i < n; ++i) {
            lp.col_labels.push_back(std::string(name) + "[" + std::to_string(i + 1) + "]");
        }
    }
    return lp;
}

Schedule extract_storage_schedule(const LpSolution& solution, const StorageParams& params,
                                  const PriceSignal& prices) {
    if (!solution.optimal()) {
        throw ModelError("cannot extract a schedule from a " + to_string(solution.status) + " solution");
    }
    const std::size_t n = prices.size();
    if (static_cast<std::size_t>(solution.x.size()) != 2 * n) {
        throw ModelError("solution length does not match the price signal");
    }
    const auto eta = effective_efficiencies(params);
    Schedule s;
    s.kind = ScheduleKind::Storage;
    double soc = params.b_0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = solution.x[static_cast<Eigen::Index>(i)];
        soc += x;
        s.decision.push_back(x);
        s.level.push_back(soc);
        s.grid_power.push_back(consumed_power(x, prices.h, eta.charge, eta.discharge));
        s.step_cost.push_back(storage_step_cost(x, prices.p_buy[i], prices.p_sell[i], eta));
    }
    return s;
}

std::vector<std::string> check_storage_schedule(const Schedule& s, const StorageParams& p, double h, double tol) {
    std::vector<std::string> out;
    auto fail = [&out](std::size_t i, const std::string& what) {
        out.push_back("step " + std::to_string(i + 1) + ": " + what);
    };
    double soc = p.b_0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double x = s.decision[i];
        soc += x;
        if (std::abs(s.level[i] - soc) > tol) fail(i, "state of charge does not follow b_i = b_{i-1} + x_i");
        if (soc < p.b_min - tol || soc > p.b_max + tol) fail(i, "state of charge outside [b_min, b_max]");
        if (x < p.x_min(h) - tol || x > p.x_max(h) + tol) fail(i, "energy change outside [X_min, X_max]");
        if (i > 0) {
            const double change = x - s.decision[i - 1];
            if (change < p.tau_min - tol || change > p.tau_max + tol) fail(i, "ramp rate outside [tau_min, tau_max]");
        }
    }
    return out;
}

}  // namespace rampflex
