#include "rampflex/prices.hpp"

#include "rampflex/format.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace rampflex {

std::string to_string(PriceErrorKind kind) {
    switch (kind) {
    case PriceErrorKind::EmptySignal: return "empty-signal";
    case PriceErrorKind::LengthMismatch: return "length-mismatch";
    case PriceErrorKind::NonPositivePeriod: return "non-positive-period";
    case PriceErrorKind::NonFinite: return "non-finite";
    case PriceErrorKind::Negative: return "negative-price";
    case PriceErrorKind::KappaViolation: return "kappa-violation";
    case PriceErrorKind::MissingColumn: return "missing-column";
    case PriceErrorKind::NonNumericCell: return "non-numeric-cell";
    case PriceErrorKind::BadKappa: return "bad-kappa";
    case PriceErrorKind::Io: return "io";
    }
    return "unknown";
}

double PriceSignal::max_price() const {
    double m = 0.0;
    for (double p : p_buy) m = std::max(m, p);
    for (double p : p_sell) m = std::max(m, p);
    return m;
}

void validate(const PriceSignal& s) {
    if (s.p_buy.empty()) throw PriceError(PriceErrorKind::EmptySignal, "price signal has no steps");
    if (s.p_sell.size() != s.p_buy.size()) {
        throw PriceError(PriceErrorKind::LengthMismatch, "p_buy and p_sell lengths differ");
    }
    if (!s.labels.empty() && s.labels.size() != s.p_buy.size()) {
        throw PriceError(PriceErrorKind::LengthMismatch, "labels length differs from prices");
    }
    if (!(s.h > 0.0) || !std::isfinite(s.h)) {
        throw PriceError(PriceErrorKind::NonPositivePeriod, "sampling period h must be positive");
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto step = std::to_string(i + 1);
        if (!std::isfinite(s.p_buy[i]) || !std::isfinite(s.p_sell[i])) {
            throw PriceError(PriceErrorKind::NonFinite, "non-finite price at step " + step);
        }
        if (s.p_buy[i] < 0.0 || s.p_sell[i] < 0.0) {
            throw PriceError(PriceErrorKind::Negative, "negative price at step " + step);
        }
        if (s.p_sell[i] > s.p_buy[i]) {
            throw PriceError(PriceErrorKind::KappaViolation,
                             "p_sell exceeds p_buy (kappa > 1) at step " + step);
        }
    }
}

namespace {

std::string trim(std::string_view v) {
    const auto first = v.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = v.find_last_not_of(" \t\r");
    return std::string(v.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string_view rest(line);
    while (true) {
        const auto comma = rest.find(',');
        cells.push_back(trim(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no, const char* column) {
    double v = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, v);
    if (cell.empty() || ec != std::errc{} || ptr != end) {
        throw PriceError(PriceErrorKind::NonNumericCell, "line " + std::to_string(line_no) + ": column " +
                                                             column + " value '" + cell + "' is not numeric");
    }
    return v;
}

}  // namespace

PriceSignal read_price_csv(std::istream& in, double h) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw PriceError(PriceErrorKind::EmptySignal, "price file is empty");

    const auto header = split_csv(line);
    auto column = [&](const char* name) -> std::ptrdiff_t {
        const auto it = std::find(header.begin(), header.end(), name);
        return it == header.end() ? -1 : it - header.begin();
    };
    const auto buy_col = column("p_buy");
    const auto sell_col = column("p_sell");
    const auto index_col = column("index");
    for (auto [col, name] : {std::pair{index_col, "index"}, {buy_col, "p_buy"}, {sell_col, "p_sell"}}) {
        if (col < 0) throw PriceError(PriceErrorKind::MissingColumn, std::string("missing column '") + name + "'");
    }

    PriceSignal s;
    s.h = h;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        const auto need = static_cast<std::size_t>(std::max({buy_col, sell_col, index_col})) + 1;
        if (cells.size() < need) {
            throw PriceError(PriceErrorKind::MissingColumn,
                             "line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                                 " cells, expected at least " + std::to_string(need));
        }
        s.labels.push_back(cells[index_col]);
        s.p_buy.push_back(parse_cell(cells[buy_col], line_no, "p_buy"));
        s.p_sell.push_back(parse_cell(cells[sell_col], line_no, "p_sell"));
    }
    if (s.p_buy.empty()) throw PriceError(PriceErrorKind::EmptySignal, "price file has a header but no rows");
    validate(s);
    return s;
}

PriceSignal load_price_csv(const std::filesystem::path& path, double h) {
    std::ifstream in(path);
    if (!in) throw PriceError(PriceErrorKind::Io, "cannot open price file " + path.string());
    return read_price_csv(in, h);
}

void write_price_csv(std::ostream& out, const PriceSignal& s) {
    out << "index,p_buy,p_sell\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
        out << (s.labels.empty() ? std::to_string(i + 1) : s.labels[i]) << ',' << format_number(s.p_buy[i])
            << ',' << format_number(s.p_sell[i]) << '\n';
    }
}

void save_price_csv(const std::filesystem::path& path, const PriceSignal& s) {
    std::ofstream out(path);
    if (!out) throw PriceError(PriceErrorKind::Io, "cannot write price file " + path.string());
    write_price_csv(out, s);
}

std::string price_json(const PriceSignal& s) {
    nlohmann::json j;
    j["h_hours"] = s.h;
    j["p_buy"] = s.p_buy;
    j["p_sell"] = s.p_sell;
    return j.dump(2);
}

PriceSignal parse_price_json(const std::string& text) {
    PriceSignal s;
    try {
        const auto j = nlohmann::json::parse(text);
        for (const char* key : {"h_hours", "p_buy", "p_sell"}) {
            if (!j.contains(key)) {
                throw PriceError(PriceErrorKind::MissingColumn, std::string("missing field '") + key + "'");
            }
        }
        s.h = j.at("h_hours").get<double>();
        s.p_buy = j.at("p_buy").get<std::vector<double>>();
        s.p_sell = j.at("p_sell").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw PriceError(PriceErrorKind::NonNumericCell, std::string("malformed price JSON: ") + e.what());
    }
    validate(s);
    return s;
}

std::vector<double> derive_sell_prices(const std::vector<double>& p_buy, double kappa) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) {
        throw PriceError(PriceErrorKind::BadKappa, "kappa must lie in [0, 1], got " + format_number(kappa));
    }
    std::vector<double> out(p_buy.size());
    std::transform(p_buy.begin(), p_buy.end(), out.begin(), [kappa](double p) { return kappa * p; });
    return out;
}

PriceSignal synthetic_day(std::uint64_t seed, std::size_t steps, double h, const ShapeParams& shape) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);

    const double morning = shape.morning_peak * std::max(0.0, 1.0 + shape.peak_jitter * unit(rng));
    const double evening = shape.evening_peak * std::max(0.0, 1.0 + shape.peak_jitter * unit(rng));
    const double morning_at = shape.morning_hour + shape.hour_jitter * unit(rng);
    const double evening_at = shape.evening_hour + shape.hour_jitter * unit(rng);
    auto bump = [](double t, double at, double width) {
        const double z = (t - at) / width;
        return std::exp(-0.5 * z * z);
    };

    PriceSignal s;
    s.h = h;
    s.p_buy.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        const double hour = std::fmod((static_cast<double>(i) + 0.5) * h, 24.0);
        const double level = shape.base + morning * bump(hour, morning_at, shape.morning_width) +
                             evening * bump(hour, evening_at, shape.evening_width) -
                             shape.night_dip * bump(hour, 4.0, 1.5);
        const double noise = std::exp(shape.noise_sigma * unit(rng) - 0.5 * shape.noise_sigma * shape.noise_sigma);
        s.p_buy[i] = std::max(0.0, level) * noise;
    }
    s.p_sell = derive_sell_prices(s.p_buy, shape.kappa);
    return s;
}

std::filesystem::path bundled_sample_day() {
    return std::filesystem::path(RAMPFLEX_DATA_DIR) / "sample_day.csv";
}

}  // namespace rampflex
