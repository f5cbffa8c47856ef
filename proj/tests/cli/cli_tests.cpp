#include "rampflex/run.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace rampflex;
namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "rampflex_cli_tests";

int cli(const std::string& args) {
    const std::string command = std::string(RAMPFLEX_CLI) + " " + args + " > " + (kRoot / "stdout.txt").string() +
                                " 2> " + (kRoot / "stderr.txt").string();
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void fresh() {
    fs::remove_all(kRoot);
    fs::create_directories(kRoot);
}

}  // namespace

TEST_CASE("storage run is reproducible byte for byte") {
    fresh();
    const std::string out = "--out " + (kRoot / "out").string() + " --no-timing";
    REQUIRE(cli("storage " + out) == 0);
    const auto dir = kRoot / "out" / "storage";
    const auto schedule = slurp(dir / "schedule.csv");
    const auto summary = slurp(dir / "summary.json");
    CHECK(summary.find("\"status\": \"OPTIMAL\"") != std::string::npos);
    REQUIRE(cli("storage " + out) == 0);
    CHECK(slurp(dir / "schedule.csv") == schedule);
    CHECK(slurp(dir / "summary.json") == summary);

    const auto s = read_schedule_csv(dir / "schedule.csv");
    CHECK(check_storage_schedule(s, StorageParams{}, 0.25).empty());
}

TEST_CASE("EV flex run satisfies the deadline band after reload") {
    fresh();
    std::ofstream(kRoot / "ev.ini") << "[run]\nname = ev\n\n[flex]\narrival_hour = 6\ndeparture_hour = 18\n"
                                       "K = 25\nrated = 4\nxi_fraction = 0.1\n";
    REQUIRE(cli("flex --config " + (kRoot / "ev.ini").string() + " --out " + (kRoot / "out").string()) == 0);
    const auto s = read_schedule_csv(kRoot / "out" / "ev" / "schedule.csv");
    FlexSettings settings;
    settings.xi_fraction = 0.1;
    CHECK(check_flex_schedule(s, settings.resolve(96, 0.25), 0.25).empty());
    CHECK(slurp(kRoot / "out" / "ev" / "summary.json").find("\"wall_seconds\"") != std::string::npos);
}

TEST_CASE("sweep, xcyc, mc and validate write their artifacts") {
    fresh();
    const std::string out = " --out " + (kRoot / "out").string() + " --no-timing";
    CHECK(cli("sweep --format csv" + out) == 0);
    CHECK(fs::exists(kRoot / "out" / "sweep" / "sweep.csv"));
    CHECK_FALSE(fs::exists(kRoot / "out" / "sweep" / "sweep.json"));
    CHECK(cli("xcyc --format json" + out) == 0);
    CHECK(fs::exists(kRoot / "out" / "xcyc" / "sweep.json"));
    CHECK(cli("mc --count 20 --steps 48 --seed 3 --workers 2" + out) == 0);
    const auto first = slurp(kRoot / "out" / "mc" / "mc.json");
    CHECK(cli("mc --count 20 --steps 48 --seed 3 --workers 1" + out) == 0);
    CHECK(slurp(kRoot / "out" / "mc" / "mc.json") == first);
    CHECK(cli("validate" + out) == 0);
    CHECK(fs::exists(kRoot / "out" / "validate" / "storage_lp.txt"));
}

TEST_CASE("flags override config keys") {
    fresh();
    std::ofstream(kRoot / "run.ini") << "[run]\nformat = json\nname = from_config\n";
    REQUIRE(cli("storage --config " + (kRoot / "run.ini").string() + " --format csv --out " +
                (kRoot / "out").string()) == 0);
    CHECK(fs::exists(kRoot / "out" / "from_config" / "schedule.csv"));
    CHECK_FALSE(fs::exists(kRoot / "out" / "from_config" / "schedule.json"));
}

TEST_CASE("exit codes and error JSON") {
    fresh();
    CHECK(cli("storage --prices " + (kRoot / "missing.csv").string()) == kExitConfig);
    CHECK(slurp(kRoot / "stderr.txt").find("\"kind\":\"config\"") != std::string::npos);

    std::ofstream(kRoot / "bad.csv") << "index,p_buy,p_sell\n1,0.1,0.2\n";
    CHECK(cli("storage --prices " + (kRoot / "bad.csv").string() + " --out " + (kRoot / "out").string()) ==
          kExitConfig);
    CHECK(slurp(kRoot / "stderr.txt").find("kappa") != std::string::npos);

    std::ofstream(kRoot / "unknown.ini") << "[storage]\nsize = 3\n";
    CHECK(cli("storage --config " + (kRoot / "unknown.ini").string()) == kExitConfig);
    CHECK(cli("storage --format xml") == kExitConfig);
    CHECK(cli("") == kExitConfig);

    std::ofstream(kRoot / "blocker") << "x";
    CHECK(cli("storage --out " + (kRoot / "blocker").string()) == kExitIo);
    CHECK(slurp(kRoot / "stderr.txt").find("\"kind\":\"io\"") != std::string::npos);
}
