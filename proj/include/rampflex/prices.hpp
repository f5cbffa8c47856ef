#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace rampflex {

/// Per-step buy and sell prices ($/kWh) sampled every h hours.
struct PriceSignal {
    std::vector<double> p_buy;
    std::vector<double> p_sell;
    double h = 0.25;
    std::vector<std::string> labels;  // optional, empty or one per step

    std::size_t size() const { return p_buy.size(); }
    double max_price() const;
};

enum class PriceErrorKind {
    EmptySignal,
    LengthMismatch,
    NonPositivePeriod,
    NonFinite,
    Negative,
    KappaViolation,
    MissingColumn,
    NonNumericCell,
    BadKappa,
    Io,
};

std::string to_string(PriceErrorKind kind);

class PriceError : public std::runtime_error {
public:
    PriceError(PriceErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    PriceErrorKind kind() const { return kind_; }

private:
    PriceErrorKind kind_;
};

/// Throws PriceError naming the first violated invariant (N >= 1, h > 0,
/// finite non-negative prices, p_sell <= p_buy per step).
void validate(const PriceSignal& prices);

/// CSV with header `index,p_buy,p_sell`. Extra columns are ignored; the
/// `index` column becomes the labels. h is not stored in the file.
PriceSignal read_price_csv(std::istream& in, double h);
PriceSignal load_price_csv(const std::filesystem::path& path, double h);
void write_price_csv(std::ostream& out, const PriceSignal& prices);
void save_price_csv(const std::filesystem::path& path, const PriceSignal& prices);

/// JSON mirror: {"h_hours": h, "p_buy": [...], "p_sell": [...]}.
std::string price_json(const PriceSignal& prices);
PriceSignal parse_price_json(const std::string& text);

/// p_sell = kappa * p_buy; kappa must lie in [0, 1].
std::vector<double> derive_sell_prices(const std::vector<double>& p_buy, double kappa);

/// Daily two-peak price shape with multiplicative lognormal noise. Hours are
/// clock hours of the peaks; levels are $/kWh.
struct ShapeParams {
    double base = 0.030;
    double morning_peak = 0.035;
    double morning_hour = 8.0;
    double morning_width = 1.8;
    double evening_peak = 0.060;
    double evening_hour = 18.5;
    double evening_width = 2.2;
    double night_dip = 0.010;    // depth of the pre-dawn trough
    double peak_jitter = 0.25;   // relative day-to-day spread of peak heights
    double hour_jitter = 0.75;   // hours, day-to-day shift of peak times
    double noise_sigma = 0.08;   // lognormal sigma of per-step noise
    double kappa = 1.0;
};

PriceSignal synthetic_day(std::uint64_t seed, std::size_t steps, double h,
                          const ShapeParams& shape = {});

/// Bundled 96-step sample day (15-minute resolution, synthetic).
std::filesystem::path bundled_sample_day();

}  // namespace rampflex
