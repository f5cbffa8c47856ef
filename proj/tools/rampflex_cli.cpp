#include "rampflex/run.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace rampflex;

namespace {

struct Flags {
    std::string config;
    std::string prices;
    std::string out;
    std::string format;
    std::string name;
    std::optional<double> h;
    std::optional<double> kappa;
    std::optional<double> ramp_rate_fraction;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> count;
    std::optional<std::size_t> steps;
    std::optional<unsigned> workers;
    bool no_timing = false;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config, "INI config file");
    cmd->add_option("--prices", f.prices, "price CSV (index,p_buy,p_sell)");
    cmd->add_option("--h", f.h, "step length in hours");
    cmd->add_option("--kappa", f.kappa, "derive p_sell = kappa * p_buy");
    cmd->add_option("--out", f.out, "output root directory");
    cmd->add_option("--name", f.name, "run name (output subdirectory)");
    cmd->add_option("--format", f.format, "csv, json or both");
    cmd->add_option("--ramp-rate-fraction", f.ramp_rate_fraction, "tau as a fraction of the power bounds");
    cmd->add_option("--seed", f.seed, "run seed");
    cmd->add_flag("--no-timing", f.no_timing, "omit wall-clock fields from the outputs");
}

RunConfig build_config(Mode mode, const Flags& f) {
    RunConfig c;
    c.mode = mode;
    if (!f.config.empty()) c = load_config(f.config, c);
    c.mode = mode;
    if (!f.prices.empty()) c.prices = f.prices;
    if (f.h) c.h = *f.h;
    if (f.kappa) c.kappa = f.kappa;
    if (!f.out.empty()) c.out_dir = f.out;
    if (!f.name.empty()) c.name = f.name;
    if (!f.format.empty()) c.format = parse_format(f.format);
    if (f.ramp_rate_fraction) c.ramp_rate_fraction = f.ramp_rate_fraction;
    if (f.seed) c.seed = *f.seed;
    if (f.count) c.mc_count = *f.count;
    if (f.steps) c.mc_steps = *f.steps;
    if (f.workers) c.workers = *f.workers;
    if (f.no_timing) c.timing = false;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Storage and flexible-load scheduling under ramp-rate limits"};
    app.set_help_flag("--help", "print this help and exit");
    app.require_subcommand(1);
    Flags flags;

    const std::vector<std::pair<Mode, std::string>> modes = {
        {Mode::Storage, "optimal storage schedule for one price day"},
        {Mode::Flex, "optimal deadline-constrained flexible load schedule"},
        {Mode::Sweep, "ramp-rate sensitivity sweep of the storage gain"},
        {Mode::XcYc, "ramp-rate sweep for several c-rates"},
        {Mode::MonteCarlo, "storage gain over generated price days"},
        {Mode::Validate, "build both LPs and dump them without solving"},
    };
    std::vector<std::pair<CLI::App*, Mode>> commands;
    for (const auto& [mode, help] : modes) {
        auto* cmd = app.add_subcommand(to_string(mode), help);
        add_common(cmd, flags);
        if (mode == Mode::MonteCarlo) {
            cmd->add_option("--count", flags.count, "number of scenarios");
            cmd->add_option("--steps", flags.steps, "steps per day");
            cmd->add_option("--workers", flags.workers, "worker threads (0 = all cores)");
        }
        commands.emplace_back(cmd, mode);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << error_json("config", e.what(), kExitConfig) << '\n';
        return kExitConfig;
    }

    Mode mode = Mode::Storage;
    for (const auto& [cmd, m] : commands) {
        if (cmd->parsed()) mode = m;
    }

    RunConfig config;
    try {
        config = build_config(mode, flags);
    } catch (const ConfigError& e) {
        std::cerr << error_json("config", e.what(), kExitConfig) << '\n';
        return kExitConfig;
    }

    const auto outcome = run(config);
    if (outcome.exit_code == kExitOk) {
        std::cout << outcome.summary << '\n';
    } else {
        std::cerr << outcome.summary << '\n';
    }
    return outcome.exit_code;
}
