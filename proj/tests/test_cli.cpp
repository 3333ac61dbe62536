#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "bifbm/report.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "bifbm_test_cli";

// Runs the CLI with the given arguments; output goes to <name>.log in the work directory.
int run_cli(const std::string& name, const std::string& args) {
    fs::create_directories(kWork);
    const std::string cmd = std::string("\"") + BIFBM_CLI_PATH + "\" " + args + " > \"" +
                            (kWork / (name + ".log")).string() + "\" 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string log_of(const std::string& name) {
    return bifbm::read_text_file(kWork / (name + ".log"));
}

}  // namespace

TEST(Cli, EmptyGridIsAConfigError) {
    EXPECT_EQ(run_cli("empty_grid", "simulate --grid-n 0 --out \"" + (kWork / "empty").string() + "\""), 2);
    EXPECT_NE(log_of("empty_grid").find("grid must be nonempty"), std::string::npos);
}

TEST(Cli, InvalidExponentIsAConfigError) {
    EXPECT_EQ(run_cli("bad_h", "simulate --h 1.5 --out \"" + (kWork / "bad_h").string() + "\""), 2);
}

TEST(Cli, UnknownSubcommandIsRejected) {
    EXPECT_EQ(run_cli("bogus", "bogus"), 2);
}

TEST(Cli, VerifyBrownianMotionPasses) {
    const fs::path out = kWork / "verify_bm";
    EXPECT_EQ(run_cli("verify_bm", "verify --h 0.5 --k 1 --out \"" + out.string() + "\""), 0);
    const auto report = bifbm::report_from_json(bifbm::read_text_file(out / "report.json"));
    EXPECT_FALSE(report.records.empty());
    EXPECT_TRUE(report.all_pass());
}

TEST(Cli, FlagsOverrideConfigFile) {
    const fs::path cfg = kWork / "config.json";
    fs::create_directories(kWork);
    std::ofstream(cfg) << R"({"h": 0.25, "k": 0.4, "seed": 11})";
    const fs::path out = kWork / "verify_cfg";
    EXPECT_EQ(run_cli("verify_cfg", "verify --config \"" + cfg.string() + "\" --k 0.8 --out \"" + out.string() + "\""),
              0);
    const auto doc = nlohmann::json::parse(bifbm::read_text_file(out / "report.json"));
    const auto& point = doc.at("config").at("points").at(0);
    EXPECT_EQ(point.at("h").get<double>(), 0.25);
    EXPECT_EQ(point.at("k").get<double>(), 0.8);
    EXPECT_EQ(doc.at("config").at("seed").get<std::uint64_t>(), 11u);
}

TEST(Cli, MissingConfigFileIsAConfigError) {
    EXPECT_EQ(run_cli("no_cfg", "verify --config \"" + (kWork / "missing.json").string() + "\""), 2);
}

TEST(Cli, SimulateWritesPaths) {
    const fs::path out = kWork / "sim";
    EXPECT_EQ(run_cli("sim", "simulate --h 0.6 --k 0.5 --grid-n 32 --paths 2 --out \"" + out.string() + "\""), 0);
    EXPECT_TRUE(fs::exists(out / "report.json"));
}
