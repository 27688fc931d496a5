#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const char* cli_path() { return RYGATE_CLI_PATH; }

int run_cli(const std::string& args, const fs::path& stdout_file = {}) {
    std::string cmd = std::string("RYGATE_THREADS=1 ") + cli_path() + " " + args;
    if (!stdout_file.empty())
        cmd += " > " + stdout_file.string() + " 2>/dev/null";
    else
        cmd += " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
}

fs::path fresh_dir(const char* leaf) {
    const fs::path dir = fs::temp_directory_path() / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    REQUIRE(out.good());
    out << text;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    return lines;
}

// Small, fast job shared by the optimize-flavored tests.
std::string tiny_optimize_config(const fs::path& out_dir) {
    return std::string(R"({
  "mode": "optimize",
  "out_dir": ")") + out_dir.string() + R"(",
  "store_stride": 10,
  "grid": {"n_r": 16, "extent_um": 0.2},
  "time": {"duration_ns": 4.0, "dt_ns": 0.1},
  "optimization": {"alpha": 2.0, "max_iterations": 3, "stop_error": 0.0, "threads": 1}
})";
}

}  // namespace

TEST_CASE("noise budget mode writes the aggregated report") {
    const auto dir = fresh_dir("rygate_cli_noise");
    write_file(dir / "cfg.json",
               std::string(R"({"mode": "noise-budget", "out_dir": ")") + dir.string() + R"("})");
    CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --quiet") == 0);

    const auto j = nlohmann::json::parse(slurp(dir / "noise_budget.json"));
    CHECK(j["impurity_field_v_m"].get<double>() == doctest::Approx(1.52399e-4).epsilon(1e-3));
    CHECK(j["lifetime_chip_us"].get<double>() == doctest::Approx(18.151).epsilon(1e-3));
}

TEST_CASE("propagate mode stores populations with the documented header") {
    const auto dir = fresh_dir("rygate_cli_prop");
    write_file(dir / "cfg.json", std::string(R"({
  "mode": "propagate",
  "out_dir": ")") + dir.string() + R"(",
  "store_stride": 10,
  "grid": {"n_r": 32, "extent_um": 0.2},
  "time": {"duration_ns": 4.0, "dt_ns": 0.05},
  "propagate": {"initial_state": "11"}
})");
    CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --quiet") == 0);

    const auto pops = lines_of(slurp(dir / "populations.csv"));
    REQUIRE(pops.size() >= 2);
    CHECK(pops[0] ==
          "t_ns,p00,p01,p0i,p0r,p10,p11,p1i,p1r,pi0,pi1,pii,pir,pr0,pr1,pri,prr");
    CHECK(pops.size() == 1 + 9);  // samples at every 10th of 80 steps, plus t = 0

    // |11> is inert under the couplings, so its population column stays 1.
    for (std::size_t k = 1; k < pops.size(); ++k) {
        std::stringstream ss(pops[k]);
        std::string cell;
        for (int col = 0; col <= 6; ++col) std::getline(ss, cell, ',');
        CHECK(std::stod(cell) == doctest::Approx(1.0).epsilon(1e-9));
    }

    CHECK(fs::exists(dir / "fields.csv"));
}

TEST_CASE("identical optimize runs produce identical outputs") {
    const auto dir_a = fresh_dir("rygate_cli_det_a");
    const auto dir_b = fresh_dir("rygate_cli_det_b");
    write_file(dir_a / "cfg.json", tiny_optimize_config(dir_a));
    write_file(dir_b / "cfg.json", tiny_optimize_config(dir_b));

    CHECK(run_cli("--config " + (dir_a / "cfg.json").string() + " --quiet") == 0);
    CHECK(run_cli("--config " + (dir_b / "cfg.json").string() + " --quiet") == 0);

    CHECK(slurp(dir_a / "convergence.csv") == slurp(dir_b / "convergence.csv"));
    CHECK(slurp(dir_a / "fields.csv") == slurp(dir_b / "fields.csv"));
    CHECK(slurp(dir_a / "spectrum.csv") == slurp(dir_b / "spectrum.csv"));
    CHECK(slurp(dir_a / "populations.csv") == slurp(dir_b / "populations.csv"));

    auto ja = nlohmann::json::parse(slurp(dir_a / "result.json"));
    auto jb = nlohmann::json::parse(slurp(dir_b / "result.json"));
    CHECK(ja["wall_time"].is_number());
    ja.erase("wall_time");
    jb.erase("wall_time");
    CHECK(ja.dump() == jb.dump());
    CHECK(ja["iterations"].get<int>() == 3);
}

TEST_CASE("mode and output overrides take precedence over the config") {
    const auto dir = fresh_dir("rygate_cli_override");
    const auto out = dir / "moved";
    write_file(dir / "cfg.json", tiny_optimize_config(dir));
    CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --mode noise-budget --out " +
                  out.string() + " --quiet") == 0);
    CHECK(fs::exists(out / "noise_budget.json"));
    CHECK_FALSE(fs::exists(dir / "result.json"));
}

TEST_CASE("quiet flag silences normal progress output") {
    const auto dir = fresh_dir("rygate_cli_quiet");
    write_file(dir / "cfg.json",
               std::string(R"({"mode": "noise-budget", "out_dir": ")") + dir.string() + R"("})");

    const auto chatty = dir / "stdout_chatty.txt";
    CHECK(run_cli("--config " + (dir / "cfg.json").string(), chatty) == 0);
    CHECK(fs::file_size(chatty) > 0);

    const auto silent = dir / "stdout_quiet.txt";
    CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --quiet", silent) == 0);
    CHECK(fs::file_size(silent) == 0);
}

TEST_CASE("configuration problems exit with code 2") {
    const auto dir = fresh_dir("rygate_cli_badcfg");

    SUBCASE("unknown key") {
        write_file(dir / "cfg.json", R"({"modee": "optimize"})");
        CHECK(run_cli("--config " + (dir / "cfg.json").string()) == 2);
    }
    SUBCASE("missing file") {
        CHECK(run_cli("--config " + (dir / "absent.json").string()) == 2);
    }
    SUBCASE("invalid mode override") {
        write_file(dir / "cfg.json", "{}");
        CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --mode optimise") == 2);
    }
}

TEST_CASE("an unreachable polynomial order exits with code 3") {
    const auto dir = fresh_dir("rygate_cli_numeric");
    write_file(dir / "cfg.json", std::string(R"({
  "mode": "propagate",
  "out_dir": ")") + dir.string() + R"(",
  "grid": {"n_r": 64, "extent_um": 0.3},
  "time": {"duration_ns": 20000.0, "dt_ns": 10000.0}
})");
    CHECK(run_cli("--config " + (dir / "cfg.json").string() + " --quiet") == 3);
}
