#include "rampflex/analysis.hpp"

#include "rampflex/simplex.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <thread>

namespace rampflex {

double arbitrage_gain(const Schedule& s) { return -s.total_cost(); }

double flex_savings(const Schedule& nominal, const Schedule& optimized) {
    return nominal.total_cost() - optimized.total_cost();
}

double equivalent_full_cycles(const Schedule& s, const StorageParams& params) {
    const double capacity = params.usable_capacity();
    if (!(capacity > 0.0)) throw ModelError("cycle count needs b_max > b_min");
    double discharged = 0.0;
    for (double x : s.decision) discharged += std::max(0.0, -x);
    return discharged / capacity;
}

std::size_t switching_count(const Schedule& s, double tol) {
    std::size_t count = 0;
    double prev = 0.0;
    for (double y : s.decision) {
        if (std::abs(y - prev) > tol) ++count;
        prev = y;
    }
    return count;
}

namespace {

struct StorageRun {
    LpStatus status;
    double objective = 0.0;
    double gain = 0.0;
    double cycles = 0.0;
};

StorageRun run_storage(const StorageParams& params, const PriceSignal& prices) {
    const auto solution = solve_lp(build_storage_lp(params, prices));
    StorageRun run{solution.status};
    if (solution.optimal()) {
        const auto schedule = extract_storage_schedule(solution, params, prices);
        run.objective = solution.objective;
        run.gain = arbitrage_gain(schedule);
        run.cycles = equivalent_full_cycles(schedule, params);
    }
    return run;
}

constexpr double kCycleFloor = 1e-9;
constexpr double kGainFloor = 1e-12;

}  // namespace

SweepResult ramp_rate_sweep(const StorageParams& params, const PriceSignal& prices,
                            const std::vector<double>& fractions) {
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) throw ModelError("sweep fractions must lie in (0, 1]");
        if (i > 0 && !(fractions[i] > fractions[i - 1])) throw ModelError("sweep fractions must be ascending");
    }
    SweepResult result;
    for (double fraction : fractions) {
        const auto run = run_storage(with_ramp_rate_fraction(params, fraction, prices.h), prices);
        SweepPoint point;
        point.fraction = fraction;
        point.status = run.status;
        point.objective = run.objective;
        point.gain = run.gain;
        point.cycles = run.cycles;
        if (run.status == LpStatus::Optimal && run.cycles > kCycleFloor) point.gain_per_cycle = run.gain / run.cycles;
        result.points.push_back(point);
    }

    std::optional<double> reference;
    if (!fractions.empty() && fractions.back() == 1.0 && result.points.back().status == LpStatus::Optimal) {
        reference = result.points.back().gain;
    } else {
        const auto run = run_storage(with_ramp_rate_fraction(params, 1.0, prices.h), prices);
        if (run.status == LpStatus::Optimal) reference = run.gain;
    }
    result.reference_gain = reference.value_or(0.0);
    if (reference && std::abs(*reference) > kGainFloor) {
        for (auto& point : result.points) {
            if (point.status != LpStatus::Optimal) continue;
            point.marginal_gain_pct = point.fraction == 1.0 ? 100.0 : 100.0 * point.gain / *reference;
        }
    }
    return result;
}

XcYcResult xc_yc_sweep(const StorageParams& params, const PriceSignal& prices, const std::vector<double>& c_rates,
                       const std::vector<double>& fractions) {
    XcYcResult result;
    for (double c : c_rates) {
        if (!(c > 0.0) || !std::isfinite(c)) throw ModelError("c-rates must be positive");
        StorageParams p = params;
        p.delta_max = c * params.b_max;
        p.delta_min = -c * params.b_max;
        p = with_ramp_rate_fraction(p, 1.0, prices.h);
        result.c_rates.push_back(c);
        result.sweeps.push_back(ramp_rate_sweep(p, prices, fractions));
    }
    return result;
}

std::uint64_t scenario_seed(std::uint64_t seed, std::size_t index) {
    // splitmix64 finaliser over (seed, index)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

McReport monte_carlo_run(const StorageParams& base_params, const PriceGenerator& generator,
                         std::size_t scenario_count, std::uint64_t seed, unsigned workers) {
    if (scenario_count == 0) throw ModelError("Monte Carlo run needs at least one scenario");
    const auto start = std::chrono::steady_clock::now();
    McReport report;
    report.scenario_count = scenario_count;
    report.seed = seed;
    report.scenarios.resize(scenario_count);

    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < scenario_count; i = next++) {
            auto& sc = report.scenarios[i];
            sc.index = i;
            sc.seed = scenario_seed(seed, i);
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const auto prices = generator(sc.seed);
                const auto run = run_storage(base_params, prices);
                sc.status = run.status;
                sc.objective = run.objective;
                sc.gain = run.gain;
            } catch (const std::exception& e) {
                sc.status = LpStatus::NumericalFailure;
                sc.error = e.what();
            }
            sc.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
    };

    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, scenario_count));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    for (const auto& sc : report.scenarios) {
        if (sc.status == LpStatus::Optimal) {
            report.aggregate_gain += sc.gain;
        } else {
            ++report.failures;
        }
    }
    report.total_wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

namespace {

std::string csv_optional(const std::optional<double>& v) { return v ? format_number(*v) : "NA"; }

nlohmann::json json_optional(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); }

nlohmann::json sweep_to_json(const SweepResult& sweep) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : sweep.points) {
        points.push_back({{"fraction", p.fraction},
                          {"status", to_string(p.status)},
                          {"objective", p.objective},
                          {"gain", p.gain},
                          {"marginal_gain_pct", json_optional(p.marginal_gain_pct)},
                          {"cycles", p.cycles},
                          {"gain_per_cycle", json_optional(p.gain_per_cycle)}});
    }
    return {{"reference_gain", sweep.reference_gain}, {"points", points}};
}

void write_sweep_rows(std::ostream& out, const SweepResult& sweep, const std::string& prefix) {
    for (const auto& p : sweep.points) {
        out << prefix << format_number(p.fraction) << ',' << format_number(p.gain) << ','
            << csv_optional(p.marginal_gain_pct) << ',' << format_number(p.cycles) << ','
            << csv_optional(p.gain_per_cycle) << '\n';
    }
}

}  // namespace

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
    out << "fraction,gain,marginal_gain_pct,cycles,gain_per_cycle\n";
    write_sweep_rows(out, sweep, "");
}

std::string sweep_json(const SweepResult& sweep) { return sweep_to_json(sweep).dump(2); }

void write_xcyc_csv(std::ostream& out, const XcYcResult& result) {
    out << "c_rate,fraction,gain,marginal_gain_pct,cycles,gain_per_cycle\n";
    for (std::size_t i = 0; i < result.c_rates.size(); ++i) {
        write_sweep_rows(out, result.sweeps[i], format_number(result.c_rates[i]) + ",");
    }
}

std::string xcyc_json(const XcYcResult& result) {
    nlohmann::json curves = nlohmann::json::array();
    for (std::size_t i = 0; i < result.c_rates.size(); ++i) {
        auto curve = sweep_to_json(result.sweeps[i]);
        curve["c_rate"] = result.c_rates[i];
        curves.push_back(std::move(curve));
    }
    return nlohmann::json{{"curves", curves}}.dump(2);
}

void write_mc_csv(std::ostream& out, const McReport& report) {
    out << "scenario,seed,status,objective,gain\n";
    for (const auto& sc : report.scenarios) {
        out << sc.index << ',' << sc.seed << ',' << to_string(sc.status) << ',' << format_number(sc.objective) << ','
            << format_number(sc.gain) << '\n';
    }
}

std::string mc_json(const McReport& report, bool include_timing) {
    nlohmann::json scenarios = nlohmann::json::array();
    for (const auto& sc : report.scenarios) {
        nlohmann::json j{{"index", sc.index},
                         {"seed", sc.seed},
                         {"status", to_string(sc.status)},
                         {"objective", sc.objective},
                         {"gain", sc.gain}};
        if (!sc.error.empty()) j["error"] = sc.error;
        if (include_timing) j["wall_seconds"] = sc.wall_seconds;
        scenarios.push_back(std::move(j));
    }
    nlohmann::json j{{"scenario_count", report.scenario_count},
                     {"seed", report.seed},
                     {"aggregate_gain", report.aggregate_gain},
                     {"failures", report.failures},
                     {"scenarios", scenarios}};
    if (include_timing) {
        j["total_wall_seconds"] = report.total_wall_seconds;
        j["mean_wall_seconds"] = report.total_wall_seconds / static_cast<double>(report.scenario_count);
    }
    return j.dump(2);
}

}  // namespace rampflex
