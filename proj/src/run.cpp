#include "rampflex/run.hpp"

#include "rampflex/analysis.hpp"
#include "rampflex/format.hpp"
#include "rampflex/simplex.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace rampflex {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Mode mode) {
    switch (mode) {
    case Mode::Storage: return "storage";
    case Mode::Flex: return "flex";
    case Mode::Sweep: return "sweep";
    case Mode::XcYc: return "xcyc";
    case Mode::MonteCarlo: return "mc";
    case Mode::Validate: return "validate";
    }
    return "unknown";
}

Mode parse_mode(const std::string& text) {
    for (Mode m : {Mode::Storage, Mode::Flex, Mode::Sweep, Mode::XcYc, Mode::MonteCarlo, Mode::Validate}) {
        if (text == to_string(m)) return m;
    }
    throw ConfigError("unknown mode '" + text + "'");
}

OutputFormat parse_format(const std::string& text) {
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    if (text == "both") return OutputFormat::Both;
    throw ConfigError("unknown format '" + text + "' (expected csv, json or both)");
}

FlexParams FlexSettings::resolve(std::size_t steps, double h) const {
    const auto t_a_step = t_a.value_or(static_cast<std::size_t>(std::lround(arrival_hour / h)) + 1);
    const auto t_d_step = t_d.value_or(static_cast<std::size_t>(std::lround(departure_hour / h)));
    return FlexParams::uniform(steps, t_a_step, t_d_step, K, rated, xi_fraction, epsilon.value_or(-1.0));
}

StorageParams RunConfig::resolved_storage(double step_h) const {
    return ramp_rate_fraction ? with_ramp_rate_fraction(storage, *ramp_rate_fraction, step_h) : storage;
}

namespace {

double parse_double(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw ConfigError("key '" + key + "': '" + text + "' is not a finite number");
    }
    return v;
}

std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
        throw ConfigError("key '" + key + "': '" + text + "' is not a non-negative integer");
    }
    return std::stoull(text);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto first = item.find_first_not_of(" \t");
        const auto last = item.find_last_not_of(" \t");
        if (first == std::string::npos) throw ConfigError("key '" + key + "': empty list entry");
        out.push_back(parse_double(key, item.substr(first, last - first + 1)));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

template <typename T>
Setter number(T RunConfig::*member) {
    return [member](RunConfig& c, const std::string& key, const std::string& v) {
        if constexpr (std::is_floating_point_v<T>) {
            c.*member = parse_double(key, v);
        } else {
            c.*member = static_cast<T>(parse_unsigned(key, v));
        }
    };
}

Setter storage_field(double StorageParams::*member) {
    return [member](RunConfig& c, const std::string& key, const std::string& v) {
        c.storage.*member = parse_double(key, v);
    };
}

Setter flex_field(double FlexSettings::*member) {
    return [member](RunConfig& c, const std::string& key, const std::string& v) {
        c.flex.*member = parse_double(key, v);
    };
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"run.mode", [](RunConfig& c, const std::string&, const std::string& v) { c.mode = parse_mode(v); }},
        {"run.name", [](RunConfig& c, const std::string&, const std::string& v) { c.name = v; }},
        {"run.prices", [](RunConfig& c, const std::string&, const std::string& v) { c.prices = v; }},
        {"run.h", number(&RunConfig::h)},
        {"run.kappa", [](RunConfig& c, const std::string& k, const std::string& v) { c.kappa = parse_double(k, v); }},
        {"run.out", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
        {"run.format", [](RunConfig& c, const std::string&, const std::string& v) { c.format = parse_format(v); }},
        {"run.seed", number(&RunConfig::seed)},
        {"run.timing",
         [](RunConfig& c, const std::string& k, const std::string& v) {
             if (v != "true" && v != "false") throw ConfigError("key '" + k + "' must be true or false");
             c.timing = v == "true";
         }},
        {"storage.b_min", storage_field(&StorageParams::b_min)},
        {"storage.b_max", storage_field(&StorageParams::b_max)},
        {"storage.b_0", storage_field(&StorageParams::b_0)},
        {"storage.eta_ch", storage_field(&StorageParams::eta_ch)},
        {"storage.eta_dis", storage_field(&StorageParams::eta_dis)},
        {"storage.eta_conv", storage_field(&StorageParams::eta_conv)},
        {"storage.delta_min", storage_field(&StorageParams::delta_min)},
        {"storage.delta_max", storage_field(&StorageParams::delta_max)},
        {"storage.tau_min", storage_field(&StorageParams::tau_min)},
        {"storage.tau_max", storage_field(&StorageParams::tau_max)},
        {"storage.ramp_rate_fraction",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.ramp_rate_fraction = parse_double(k, v); }},
        {"flex.arrival_hour", flex_field(&FlexSettings::arrival_hour)},
        {"flex.departure_hour", flex_field(&FlexSettings::departure_hour)},
        {"flex.t_a", [](RunConfig& c, const std::string& k, const std::string& v) { c.flex.t_a = parse_unsigned(k, v); }},
        {"flex.t_d", [](RunConfig& c, const std::string& k, const std::string& v) { c.flex.t_d = parse_unsigned(k, v); }},
        {"flex.K", flex_field(&FlexSettings::K)},
        {"flex.rated", flex_field(&FlexSettings::rated)},
        {"flex.xi_fraction", flex_field(&FlexSettings::xi_fraction)},
        {"flex.epsilon",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.flex.epsilon = parse_double(k, v); }},
        {"sweep.fractions",
         [](RunConfig& c, const std::string& k, const std::string& v) { c.fractions = parse_list(k, v); }},
        {"sweep.c_rates", [](RunConfig& c, const std::string& k, const std::string& v) { c.c_rates = parse_list(k, v); }},
        {"mc.count", number(&RunConfig::mc_count)},
        {"mc.steps", number(&RunConfig::mc_steps)},
        {"mc.workers", number(&RunConfig::workers)},
    };
    return table;
}

}  // namespace

RunConfig parse_config(std::istream& in, RunConfig config) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    for (const auto& [section, keys] : tree) {
        if (keys.empty()) throw ConfigError("key '" + section + "' must sit inside a section");
        for (const auto& [key, value] : keys) {
            const auto full = section + "." + key;
            const auto it = setters().find(full);
            if (it == setters().end()) throw ConfigError("unknown config key '" + full + "'");
            it->second(config, full, value.get_value<std::string>());
        }
    }
    return config;
}

RunConfig load_config(const fs::path& path, RunConfig base) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    return parse_config(in, std::move(base));
}

std::string error_json(const std::string& kind, const std::string& message, int exit_code) {
    return json{{"error", {{"kind", kind}, {"message", message}, {"exit_code", exit_code}}}}.dump();
}

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void write_text(const fs::path& path, const std::string& text) {
    auto out = open_output(path);
    out << text << '\n';
    if (!out) throw IoError("write failed for " + path.string());
}

bool want_csv(OutputFormat f) { return f != OutputFormat::Json; }
bool want_json(OutputFormat f) { return f != OutputFormat::Csv; }

PriceSignal load_prices(const RunConfig& config) {
    if (!fs::exists(config.prices)) throw ConfigError("price file not found: " + config.prices.string());
    PriceSignal prices;
    try {
        prices = load_price_csv(config.prices, config.h);
        if (config.kappa) {
            prices.p_sell = derive_sell_prices(prices.p_buy, *config.kappa);
            validate(prices);
        }
    } catch (const PriceError& e) {
        if (e.kind() == PriceErrorKind::Io) throw IoError(e.what());
        throw ConfigError(std::string("price data (") + to_string(e.kind()) + "): " + e.what());
    }
    return prices;
}

LpSolution solve_or_throw(const LpProblem& lp) {
    auto solution = solve_lp(lp);
    if (!solution.optimal()) throw SolverError("solver returned " + to_string(solution.status));
    return solution;
}

void write_schedule(const RunConfig& config, const Schedule& s, const Schedule* nominal) {
    const bool storage = s.kind == ScheduleKind::Storage;
    if (want_csv(config.format)) {
        auto out = open_output(config.run_dir() / "schedule.csv");
        out << (storage ? "step,x_kwh,soc_kwh,grid_power_kw,cost" : "step,y_kw,energy_kwh,grid_power_kw,cost");
        out << (nominal ? ",nominal_y_kw\n" : "\n");
        for (std::size_t i = 0; i < s.size(); ++i) {
            out << i + 1 << ',' << format_number(s.decision[i]) << ',' << format_number(s.level[i]) << ','
                << format_number(s.grid_power[i]) << ',' << format_number(s.step_cost[i]);
            if (nominal) out << ',' << format_number(nominal->decision[i]);
            out << '\n';
        }
    }
    if (want_json(config.format)) {
        json j{{"kind", storage ? "storage" : "flex"},
               {storage ? "x_kwh" : "y_kw", s.decision},
               {storage ? "soc_kwh" : "energy_kwh", s.level},
               {"grid_power_kw", s.grid_power},
               {"cost", s.step_cost}};
        if (nominal) j["nominal_y_kw"] = nominal->decision;
        write_text(config.run_dir() / "schedule.json", j.dump(2));
    }
}

json timing_json(const LpSolution& solution) {
    return {{"wall_seconds", solution.stats.wall_seconds}, {"iterations", solution.stats.iterations}};
}

json storage_params_json(const StorageParams& p) {
    return {{"b_min", p.b_min},     {"b_max", p.b_max},         {"b_0", p.b_0},
            {"eta_ch", p.eta_ch},   {"eta_dis", p.eta_dis},     {"eta_conv", p.eta_conv},
            {"delta_min", p.delta_min}, {"delta_max", p.delta_max}, {"tau_min", p.tau_min},
            {"tau_max", p.tau_max}};
}

json run_storage(const RunConfig& config) {
    const auto prices = load_prices(config);
    const auto params = config.resolved_storage(prices.h);
    const auto solution = solve_or_throw(build_storage_lp(params, prices));
    const auto schedule = extract_storage_schedule(solution, params, prices);
    write_schedule(config, schedule, nullptr);
    json summary{{"mode", "storage"},
                 {"status", to_string(solution.status)},
                 {"steps", prices.size()},
                 {"h_hours", prices.h},
                 {"params", storage_params_json(params)},
                 {"objective", solution.objective},
                 {"gain", arbitrage_gain(schedule)},
                 {"cycles", equivalent_full_cycles(schedule, params)},
                 {"switching_count", switching_count(schedule)}};
    if (config.timing) summary["timing"] = timing_json(solution);
    return summary;
}

json run_flex(const RunConfig& config) {
    const auto prices = load_prices(config);
    const auto params = config.flex.resolve(prices.size(), prices.h);
    const auto solution = solve_or_throw(build_flex_lp(params, prices));
    const auto schedule = extract_flex_schedule(solution, params, prices);
    const auto nominal = nominal_profile(params, prices);
    write_schedule(config, schedule, &nominal);
    std::size_t nominal_steps = 0;
    for (double y : nominal.decision) nominal_steps += y > 0.0;
    json summary{{"mode", "flex"},
                 {"status", to_string(solution.status)},
                 {"steps", prices.size()},
                 {"h_hours", prices.h},
                 {"t_a", params.t_a},
                 {"t_d", params.t_d},
                 {"K_kwh", params.K},
                 {"epsilon_kwh", params.epsilon},
                 {"xi_max_kw", params.xi_max},
                 {"objective", solution.objective},
                 {"optimized_cost", schedule.total_cost()},
                 {"nominal_cost", nominal.total_cost()},
                 {"gain", flex_savings(nominal, schedule)},
                 {"delivered_energy_kwh", schedule.level.back()},
                 {"nominal_charging_steps", nominal_steps},
                 {"nominal_charging_hours", static_cast<double>(nominal_steps) * prices.h},
                 {"switching_count", switching_count(schedule)},
                 {"nominal_switching_count", switching_count(nominal)}};
    if (config.timing) summary["timing"] = timing_json(solution);
    return summary;
}

void check_sweep(const SweepResult& sweep) {
    for (const auto& p : sweep.points) {
        if (p.status != LpStatus::Optimal) {
            throw SolverError("sweep point " + format_number(p.fraction) + " returned " + to_string(p.status));
        }
    }
}

json run_sweep(const RunConfig& config) {
    const auto prices = load_prices(config);
    const auto params = config.storage;
    validate(params, prices.h);
    const auto sweep = ramp_rate_sweep(params, prices, config.fractions);
    check_sweep(sweep);
    if (want_csv(config.format)) {
        auto out = open_output(config.run_dir() / "sweep.csv");
        write_sweep_csv(out, sweep);
    }
    if (want_json(config.format)) write_text(config.run_dir() / "sweep.json", sweep_json(sweep));
    return {{"mode", "sweep"},
            {"steps", prices.size()},
            {"points", sweep.points.size()},
            {"reference_gain", sweep.reference_gain},
            {"params", storage_params_json(params)}};
}

json run_xcyc(const RunConfig& config) {
    const auto prices = load_prices(config);
    validate(config.storage, prices.h);
    const auto result = xc_yc_sweep(config.storage, prices, config.c_rates, config.fractions);
    for (const auto& sweep : result.sweeps) check_sweep(sweep);
    if (want_csv(config.format)) {
        auto out = open_output(config.run_dir() / "sweep.csv");
        write_xcyc_csv(out, result);
    }
    if (want_json(config.format)) write_text(config.run_dir() / "sweep.json", xcyc_json(result));
    return {{"mode", "xcyc"}, {"c_rates", result.c_rates}, {"fractions", config.fractions}};
}

json run_mc(const RunConfig& config) {
    if (config.mc_count == 0 || config.mc_steps == 0) throw ConfigError("mc needs count >= 1 and steps >= 1");
    const double h = 24.0 / static_cast<double>(config.mc_steps);
    const auto params = config.resolved_storage(h);
    validate(params, h);
    ShapeParams shape;
    if (config.kappa) {
        if (!(*config.kappa >= 0.0 && *config.kappa <= 1.0)) throw ConfigError("kappa must lie in [0, 1]");
        shape.kappa = *config.kappa;
    }
    const auto steps = config.mc_steps;
    const auto report = monte_carlo_run(
        params, [&](std::uint64_t s) { return synthetic_day(s, steps, h, shape); }, config.mc_count, config.seed,
        config.workers);
    if (want_csv(config.format)) {
        auto out = open_output(config.run_dir() / "mc.csv");
        write_mc_csv(out, report);
    }
    if (want_json(config.format)) write_text(config.run_dir() / "mc.json", mc_json(report, config.timing));
    json summary{{"mode", "mc"},
                 {"scenario_count", report.scenario_count},
                 {"steps", steps},
                 {"h_hours", h},
                 {"seed", report.seed},
                 {"aggregate_gain", report.aggregate_gain},
                 {"failures", report.failures}};
    if (config.timing) {
        summary["timing"] = {{"total_wall_seconds", report.total_wall_seconds},
                             {"mean_wall_seconds", report.total_wall_seconds / static_cast<double>(report.scenario_count)}};
    }
    if (report.failures > 0) throw SolverError(std::to_string(report.failures) + " Monte Carlo scenarios failed");
    return summary;
}

json run_validate(const RunConfig& config) {
    const auto prices = load_prices(config);
    const auto params = config.resolved_storage(prices.h);
    const auto flex = config.flex.resolve(prices.size(), prices.h);
    json diagnostics = json::array();
    auto check = [&](const char* model, const LpProblem& lp, const char* dump_name) {
        for (const auto& d : validate_lp(lp)) diagnostics.push_back({{"model", model}, {"message", d.message}});
        auto out = open_output(config.run_dir() / dump_name);
        write_lp_dump(out, lp);
        return json{{"rows", lp.num_rows()}, {"cols", lp.num_cols()}};
    };
    json summary{{"mode", "validate"}, {"steps", prices.size()}};
    try {
        summary["storage_lp"] = check("storage", build_storage_lp(params, prices), "storage_lp.txt");
        summary["flex_lp"] = check("flex", build_flex_lp(flex, prices), "flex_lp.txt");
    } catch (const ModelError& e) {
        throw ConfigError(e.what());
    }
    summary["diagnostics"] = diagnostics;
    if (!diagnostics.empty()) throw ConfigError("LP validation reported " + std::to_string(diagnostics.size()) + " issues");
    return summary;
}

}  // namespace

RunOutcome run(const RunConfig& config) {
    RunOutcome outcome;
    try {
        std::error_code ec;
        fs::create_directories(config.run_dir(), ec);
        if (ec) throw IoError("cannot create " + config.run_dir().string() + ": " + ec.message());
        json summary;
        try {
            switch (config.mode) {
            case Mode::Storage: summary = run_storage(config); break;
            case Mode::Flex: summary = run_flex(config); break;
            case Mode::Sweep: summary = run_sweep(config); break;
            case Mode::XcYc: summary = run_xcyc(config); break;
            case Mode::MonteCarlo: summary = run_mc(config); break;
            case Mode::Validate: summary = run_validate(config); break;
            }
        } catch (const ModelError& e) {
            throw ConfigError(e.what());
        }
        outcome.summary = summary.dump(2);
        write_text(config.run_dir() / "summary.json", outcome.summary);
    } catch (const ConfigError& e) {
        outcome = {kExitConfig, error_json("config", e.what(), kExitConfig)};
    } catch (const SolverError& e) {
        outcome = {kExitSolver, error_json("solver", e.what(), kExitSolver)};
    } catch (const IoError& e) {
        outcome = {kExitIo, error_json("io", e.what(), kExitIo)};
    }
    return outcome;
}

Schedule read_schedule_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    Schedule s;
    if (line.rfind("step,x_kwh,", 0) == 0) {
        s.kind = ScheduleKind::Storage;
    } else if (line.rfind("step,y_kw,", 0) == 0) {
        s.kind = ScheduleKind::Flexibility;
    } else {
        throw std::runtime_error("unrecognised schedule header in " + path.string());
    }
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string cell;
        std::vector<double> cells;
        while (std::getline(row, cell, ',')) cells.push_back(std::stod(cell));
        if (cells.size() < 5) throw std::runtime_error("short schedule row in " + path.string());
        s.decision.push_back(cells[1]);
        s.level.push_back(cells[2]);
        s.grid_power.push_back(cells[3]);
        s.step_cost.push_back(cells[4]);
    }
    return s;
}

}  // namespace rampflex
