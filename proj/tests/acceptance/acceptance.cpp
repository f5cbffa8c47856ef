// One PASS/FAIL line per acceptance criterion. Exit status is non-zero when
// any criterion fails.

#include "instances.hpp"

#include "rampflex/analysis.hpp"
#include "rampflex/flex_model.hpp"
#include "rampflex/format.hpp"
#include "rampflex/run.hpp"
#include "rampflex/simplex.hpp"
#include "rampflex/storage_oracle.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

using namespace rampflex;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

int failures = 0;

void report(const char* id, const char* title, const Verdict& v, const std::string& summary) {
    if (!v.pass) ++failures;
    std::printf("%s criterion %s (%s): %s%s%s\n", v.pass ? "PASS" : "FAIL", id, title, summary.c_str(),
                v.detail.empty() ? "" : " | ", v.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Tolerances and sizes pinned from the criteria.
constexpr int kOracleInstances = 50;
constexpr std::size_t kOracleGrid = 201;
constexpr double kOracleSeconds = 10.0;
constexpr int kBoundaryInstances = 20;
constexpr double kBoundaryTol = 1e-6;
constexpr double kBandLow = 50.0;
constexpr double kBandHigh = 100.0;
constexpr double kSavingsShare = 0.70;
constexpr std::size_t kMcCount = 1000;
constexpr std::size_t kMcSteps = 96;
constexpr double kMcSeconds = 60.0;
constexpr double kMcPerDay = 0.06;
constexpr int kFuzzRuns = 200;
constexpr double kInvariantTol = 1e-6;

void oracle_equivalence() {
    Verdict v;
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (int k = 0; k < kOracleInstances; ++k) {
        const auto inst = testing::random_small_instance(1000 + k, 2 + k % 5);
        const auto lp = solve_lp(build_storage_lp(inst.params, inst.prices));
        if (!lp.optimal()) {
            v.require(false, "instance " + std::to_string(k) + " " + to_string(lp.status));
            continue;
        }
        const auto oracle = solve_storage_oracle(inst.params, inst.prices, kOracleGrid);
        const double bound = 2.0 * inst.params.usable_capacity() / 200.0 * inst.prices.max_price();
        const double gap = oracle.objective - lp.objective;
        v.require(gap >= -1e-9, "instance " + std::to_string(k) + " LP above oracle by " + fmt(-gap));
        v.require(gap <= bound, "instance " + std::to_string(k) + " gap " + fmt(gap) + " > " + fmt(bound));
        worst = std::max(worst, gap / bound);
    }
    const double elapsed = seconds_since(t0);
    v.require(elapsed < kOracleSeconds, "runtime " + fmt(elapsed) + " s");
    report("1", "oracle equivalence", v,
           std::to_string(kOracleInstances) + " instances, worst gap/bound " + fmt(worst) + ", " + fmt(elapsed, 3) +
               " s");
}

void ramp_rate_boundary() {
    Verdict v;
    int mismatches = 0;
    double worst = 0.0;
    for (int k = 0; k < kBoundaryInstances; ++k) {
        auto inst = testing::random_small_instance(5000 + k, 2 + k % 5);
        inst.params = with_ramp_rate_fraction(inst.params, 1.0, inst.prices.h);
        const auto with = solve_lp(build_storage_lp(inst.params, inst.prices));
        const auto without = solve_lp(build_storage_lp(inst.params, inst.prices, {false}));
        if (!with.optimal() || !without.optimal()) {
            v.require(false, "instance " + std::to_string(k) + " not optimal");
            continue;
        }
        const double diff = std::abs(with.objective - without.objective);
        worst = std::max(worst, diff);
        if (diff > kBoundaryTol) ++mismatches;
    }
    v.require(mismatches == 0, std::to_string(mismatches) + " of " + std::to_string(kBoundaryInstances) +
                                   " instances differ (a swing from X_max to X_min needs tau = X_max - X_min)");
    report("2", "ramp-rate boundary", v, "max |difference| " + fmt(worst));
}

void marginal_gain_curve() {
    Verdict v;
    const auto prices = load_price_csv(bundled_sample_day(), 0.25);
    const std::vector<double> fractions{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::string summary;
    for (const char* start : {"b_min", "b_max"}) {
        StorageParams p;  // eta* 0.95, [0.2, 1.0] kWh, 0.5 kW
        p.b_0 = std::string(start) == "b_min" ? p.b_min : p.b_max;
        const auto sweep = ramp_rate_sweep(p, prices, fractions);
        double previous = -1e300;
        double at_tenth = -1.0;
        for (const auto& point : sweep.points) {
            if (!point.marginal_gain_pct) {
                v.require(false, std::string(start) + ": undefined marginal gain at " + fmt(point.fraction));
                continue;
            }
            const double pct = *point.marginal_gain_pct;
            v.require(pct >= previous - 1e-9, std::string(start) + ": not monotone at " + fmt(point.fraction));
            previous = pct;
            if (point.fraction == 0.1) at_tenth = pct;
        }
        const auto& last = sweep.points.back().marginal_gain_pct;
        v.require(last && *last == 100.0, std::string(start) + ": not 100% at fraction 1");
        v.require(at_tenth >= kBandLow && at_tenth <= kBandHigh,
                  std::string(start) + ": " + fmt(at_tenth) + "% at fraction 0.1");
        summary += (summary.empty() ? "" : ", ") + std::string("b_0=") + start + " " + fmt(at_tenth, 3) + "% at 0.1";
    }
    report("3", "marginal-gain curve", v, summary);
}

void ev_case() {
    const auto prices = load_price_csv(bundled_sample_day(), 0.25);
    FlexSettings settings;  // 06:00-18:00, 25 kWh, 4 kW
    const auto free = settings.resolve(prices.size(), prices.h);
    settings.xi_fraction = 0.1;
    const auto limited = settings.resolve(prices.size(), prices.h);

    const auto nominal = nominal_profile(free, prices);
    std::size_t charging = 0;
    for (double y : nominal.decision) charging += y > 0.0;
    {
        Verdict v;
        v.require(static_cast<double>(charging) * prices.h == 6.25,
                  std::to_string(charging) + " steps = " + fmt(static_cast<double>(charging) * prices.h) + " h");
        report("4a", "EV nominal duration", v, std::to_string(charging) + " quarter-hours at rated power");
    }

    auto solve = [&](const FlexParams& p) {
        const auto sol = solve_lp(build_flex_lp(p, prices));
        return sol.optimal() ? extract_flex_schedule(sol, p, prices) : Schedule{};
    };
    const auto s_free = solve(free);
    const auto s_limited = solve(limited);
    const bool solved = !s_free.decision.empty() && !s_limited.decision.empty();
    {
        Verdict v;
        v.require(solved, "solver did not return OPTIMAL");
        v.require(free.epsilon == 1e-3 * 25.0, "epsilon " + fmt(free.epsilon));
        for (const auto* s : {&s_free, &s_limited}) {
            if (s->level.empty()) continue;
            const double e = s->level.back();
            v.require(e >= 25.0 - free.epsilon - kInvariantTol && e <= 25.0 + free.epsilon + kInvariantTol,
                      "delivered " + fmt(e, 10) + " kWh");
        }
        report("4b", "EV deadline band", v,
               solved ? "delivered " + fmt(s_free.level.back(), 8) + " / " + fmt(s_limited.level.back(), 8) +
                            " kWh, band 25 +- " + fmt(free.epsilon)
                      : "no schedule");
    }
    if (!solved) {
        report("4c", "EV switching reduction", Verdict{false, "no schedule"}, "");
        report("4d", "EV savings share", Verdict{false, "no schedule"}, "");
        return;
    }
    {
        Verdict v;
        const auto sw_free = switching_count(s_free);
        const auto sw_limited = switching_count(s_limited);
        v.require(sw_limited < sw_free, "limited " + std::to_string(sw_limited) + " >= unconstrained " +
                                            std::to_string(sw_free) +
                                            " (each ramp step counts as a change at tol 1e-6)");
        // Informative only: number of off-to-on transitions.
        auto starts = [](const Schedule& s) {
            std::size_t n = 0;
            double prev = 0.0;
            for (double y : s.decision) {
                n += prev <= 1e-6 && y > 1e-6;
                prev = y;
            }
            return n;
        };
        report("4c", "EV switching reduction", v,
               "switches " + std::to_string(sw_limited) + " (xi 10%) vs " + std::to_string(sw_free) +
                   " (unconstrained); charging starts " + std::to_string(starts(s_limited)) + " vs " +
                   std::to_string(starts(s_free)));
    }
    {
        Verdict v;
        const double save_free = flex_savings(nominal, s_free);
        const double save_limited = flex_savings(nominal, s_limited);
        const double share = save_limited / save_free;
        v.require(save_free > 0.0 && share >= kSavingsShare, "share " + fmt(share));
        report("4d", "EV savings share", v,
               "savings " + fmt(save_limited) + " vs " + fmt(save_free) + " = " + fmt(100.0 * share, 3) + "%");
    }
}

void monte_carlo_runtime() {
    Verdict v;
    RunConfig config;
    config.mode = Mode::MonteCarlo;
    config.mc_count = kMcCount;
    config.mc_steps = kMcSteps;
    config.out_dir = std::filesystem::temp_directory_path() / "rampflex_acceptance";
    const auto t0 = Clock::now();
    const auto outcome = run(config);
    const double elapsed = seconds_since(t0);
    const double per_day = elapsed / static_cast<double>(kMcCount);
    v.require(outcome.exit_code == kExitOk, "exit code " + std::to_string(outcome.exit_code));
    v.require(elapsed <= kMcSeconds, "total " + fmt(elapsed) + " s");
    v.require(per_day <= kMcPerDay, "per day " + fmt(per_day) + " s");
    report("5", "Monte Carlo runtime", v,
           std::to_string(kMcCount) + " x " + std::to_string(kMcSteps) + " steps in " + fmt(elapsed, 3) + " s, " +
               fmt(per_day, 3) + " s per day");
}

Eigen::MatrixXd golden(const char* name) {
    std::ifstream in(std::string(RAMPFLEX_GOLDEN_DIR) + "/" + name);
    return read_matrix(in);
}

void matrix_fidelity() {
    Verdict v;
    PriceSignal storage_prices;
    storage_prices.p_buy = {0.1, 0.2, 0.3};
    storage_prices.p_sell = {0.08, 0.2, 0.15};
    storage_prices.h = 0.25;
    StorageParams sp;
    sp.eta_ch = 0.8;
    sp.eta_dis = 0.5;
    sp.eta_conv = 1.0;
    const auto a_bat = build_storage_lp(sp, storage_prices).A;
    const auto g_bat = golden("a_bat_n3.txt");
    v.require(a_bat.rows() == 18 && a_bat.cols() == 6, "A_bat is " + std::to_string(a_bat.rows()) + "x" +
                                                           std::to_string(a_bat.cols()));
    v.require(g_bat.rows() == a_bat.rows() && g_bat.cols() == a_bat.cols() &&
                  (a_bat - g_bat).cwiseAbs().maxCoeff() <= 1e-15,
              "A_bat differs from golden");

    PriceSignal flex_prices;
    flex_prices.p_buy = {0.1, 0.2, 0.3};
    flex_prices.p_sell = {0.05, 0.1, 0.15};
    flex_prices.h = 0.5;
    const auto a_flex = build_flex_lp(FlexParams::uniform(3, 2, 3, 1.0, 2.0, 0.5, 0.01), flex_prices).A;
    const auto g_flex = golden("a_flex_n3.txt");
    v.require(g_flex.rows() == a_flex.rows() && g_flex.cols() == a_flex.cols() &&
                  (a_flex - g_flex).cwiseAbs().maxCoeff() <= 1e-15,
              "A_flex differs from golden");
    report("6", "matrix fidelity", v,
           "A_bat " + std::to_string(a_bat.rows()) + "x" + std::to_string(a_bat.cols()) + ", A_flex " +
               std::to_string(a_flex.rows()) + "x" + std::to_string(a_flex.cols()) + " (2-step window)");
}

StorageParams fuzz_storage(std::mt19937_64& rng, double h) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    StorageParams p;
    p.b_min = 0.5 * u(rng);
    p.b_max = p.b_min + 0.2 + 2.0 * u(rng);
    p.b_0 = p.b_min + u(rng) * (p.b_max - p.b_min);
    p.eta_ch = 0.8 + 0.2 * u(rng);
    p.eta_dis = 0.8 + 0.2 * u(rng);
    p.eta_conv = 0.9 + 0.1 * u(rng);
    p.delta_max = 0.1 + 2.0 * u(rng);
    p.delta_min = -(0.1 + 2.0 * u(rng));
    p.tau_max = u(rng) * p.x_max(h);
    p.tau_min = u(rng) * p.x_min(h);
    return p;
}

void invariant_suite() {
    Verdict v;
    std::mt19937_64 rng(20240501);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int storage_runs = 0;
    int flex_runs = 0;
    double worst_tight = 0.0;
    for (int k = 0; k < kFuzzRuns; ++k) {
        const std::size_t n = 1 + rng() % 48;
        const double h = 24.0 / static_cast<double>(n);
        ShapeParams shape;
        shape.kappa = u(rng);
        const auto prices = synthetic_day(rng(), n, h, shape);
        const std::string tag = "run " + std::to_string(k);
        LpProblem lp;
        Schedule schedule;
        std::vector<std::string> violations;
        if (k % 2 == 0) {
            const auto params = fuzz_storage(rng, h);
            lp = build_storage_lp(params, prices);
            const auto sol = solve_lp(lp);
            if (!sol.optimal()) {
                v.require(false, tag + " storage " + to_string(sol.status));
                continue;
            }
            schedule = extract_storage_schedule(sol, params, prices);
            violations = check_storage_schedule(schedule, params, h, kInvariantTol);
            for (std::size_t i = 0; i < n; ++i) {
                const double t = sol.x(static_cast<Eigen::Index>(n + i));
                worst_tight = std::max(worst_tight, std::abs(t - schedule.step_cost[i]));
            }
            ++storage_runs;
        } else {
            const std::size_t t_a = 1 + rng() % n;
            const std::size_t t_d = t_a + rng() % (n - t_a + 1);
            const double rated = 1.0 + 10.0 * u(rng);
            const double capacity = rated * h * static_cast<double>(t_d - t_a + 1);
            const auto params = FlexParams::uniform(n, t_a, t_d, u(rng) * capacity, rated, 0.05 + 0.95 * u(rng));
            lp = build_flex_lp(params, prices);
            const auto sol = solve_lp(lp);
            if (!sol.optimal()) {
                v.require(false, tag + " flex " + to_string(sol.status));
                continue;
            }
            schedule = extract_flex_schedule(sol, params, prices);
            violations = check_flex_schedule(schedule, params, h, kInvariantTol);
            for (std::size_t i = 0; i < n; ++i) {
                const double y = schedule.decision[i];
                const double segments = std::max(prices.p_buy[i] * h * y, prices.p_sell[i] * h * y);
                const double t = sol.x(static_cast<Eigen::Index>(n + i));
                worst_tight = std::max(worst_tight, std::abs(t - segments));
            }
            ++flex_runs;
        }
        if (!violations.empty()) v.require(false, tag + ": " + violations.front());
    }
    v.require(worst_tight <= kInvariantTol, "epigraph slack " + fmt(worst_tight));
    report("7", "invariant suite", v,
           std::to_string(storage_runs) + " storage + " + std::to_string(flex_runs) +
               " flex schedules, max epigraph slack " + fmt(worst_tight));
}

}  // namespace

int main() {
    oracle_equivalence();
    ramp_rate_boundary();
    marginal_gain_curve();
    ev_case();
    monte_carlo_runtime();
    matrix_fidelity();
    invariant_suite();
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
