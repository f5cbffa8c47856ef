#pragma once

#include "rampflex/flex_model.hpp"
#include "rampflex/prices.hpp"
#include "rampflex/schedule.hpp"
#include "rampflex/storage_model.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rampflex {

enum class Mode { Storage, Flex, Sweep, XcYc, MonteCarlo, Validate };
enum class OutputFormat { Csv, Json, Both };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);
OutputFormat parse_format(const std::string& text);

/// Flexible-load settings in user terms. Steps, when given, override hours.
struct FlexSettings {
    double arrival_hour = 6.0;
    double departure_hour = 18.0;
    std::optional<std::size_t> t_a;
    std::optional<std::size_t> t_d;
    double K = 25.0;
    double rated = 4.0;
    double xi_fraction = 1.0;
    std::optional<double> epsilon;  // default 1e-3 * K

    FlexParams resolve(std::size_t steps, double h) const;
};

struct RunConfig {
    Mode mode = Mode::Storage;
    std::string name;  // output subdirectory, defaults to the mode name
    std::filesystem::path prices = bundled_sample_day();
    double h = 0.25;
    std::optional<double> kappa;  // replaces the file's p_sell with kappa * p_buy
    std::filesystem::path out_dir = "out";
    OutputFormat format = OutputFormat::Both;
    std::uint64_t seed = 7;
    bool timing = true;

    StorageParams storage;
    std::optional<double> ramp_rate_fraction;  // overrides tau when set
    FlexSettings flex;

    std::vector<double> fractions{0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<double> c_rates{0.25, 0.5, 1.0, 2.0};

    std::size_t mc_count = 1000;
    std::size_t mc_steps = 96;
    unsigned workers = 0;

    std::filesystem::path run_dir() const { return out_dir / (name.empty() ? to_string(mode) : name); }
    StorageParams resolved_storage(double h) const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat INI text with [run], [storage], [flex], [sweep] and [mc] sections.
/// Unknown sections or keys are errors. Keys absent from the text keep the
/// values already in `base`.
RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;
inline constexpr int kExitIo = 4;

struct RunOutcome {
    int exit_code = kExitOk;
    std::string summary;  // summary.json content on success, error JSON otherwise
};

/// Executes one run and writes its artifacts under config.run_dir().
RunOutcome run(const RunConfig& config);

/// Error document printed on failure.
std::string error_json(const std::string& kind, const std::string& message, int exit_code);

/// Reads a schedule.csv written by `run`.
Schedule read_schedule_csv(const std::filesystem::path& path);

}  // namespace rampflex
