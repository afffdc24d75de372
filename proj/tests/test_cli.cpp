#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "macflow/io.hpp"

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(MACFLOW_BIN) + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

fs::path write_cfg(const std::string& name, const std::string& body) {
    const fs::path dir = fs::temp_directory_path() / "macflow_cli_tests";
    fs::create_directories(dir);
    const fs::path p = dir / name;
    macflow::write_text(p, body);
    return p;
}

} // namespace

TEST_CASE("cli exit codes") {
    const fs::path out = fs::temp_directory_path() / "macflow_cli_tests" / "out";

    // Smoke run: exit 0 and summary exists.
    const fs::path ok = write_cfg("ok.json",
                                  R"({"eps": 0.2, "N": 1, "r_max": 3.0, "n_cells": 128,
                                      "profile": "interface:1.0", "t_end": 0.05})");
    CHECK(run_cli("run --config " + ok.string() + " --output " + out.string()) == 0);
    CHECK(fs::exists(out / "summary.json"));

    // Validation failures exit 1.
    const fs::path bad_key = write_cfg("bad_key.json",
                                       R"({"eps": 0.2, "r_max": 3.0, "n_cells": 128,
                                           "profile": "interface:1.0", "typo_key": 1})");
    CHECK(run_cli("run --config " + bad_key.string()) == 1);
    const fs::path bad_level = write_cfg("bad_level.json",
                                         R"({"eps": 0.2, "N": 1, "r_max": 3.0, "n_cells": 128,
                                             "profile": "constant:1.5"})");
    CHECK(run_cli("run --config " + bad_level.string()) == 1);

    // A deliberately unstable dt: run has the max-principle guard on, so the
    // blow-up is intercepted as a violation (exit 2) on its way to non-finite;
    // verify-energy runs unguarded and surfaces the NonFiniteState (exit 3).
    const fs::path unstable = write_cfg("unstable.json",
                                        R"({"eps": 0.05, "N": 1, "r_max": 3.0, "n_cells": 256,
                                            "profile": "interface:1.0", "dt": 0.0625,
                                            "t_end": 0.5})");
    CHECK(run_cli("run --config " + unstable.string() + " --output " + out.string()) == 2);
    CHECK(run_cli("verify-energy --config " + unstable.string() + " --output " +
                  out.string()) == 3);

    // Unknown subcommand: usage error, exit 1.
    CHECK(run_cli("verify-bogus") == 1);

    // sweep needs at least three eps values.
    const fs::path two = write_cfg("two.json",
                                   R"({"eps": [0.3, 0.2], "N": 1, "r_max": 3.0, "n_cells": 64,
                                       "profile": "constant:1.0"})");
    CHECK(run_cli("sweep --config " + two.string()) == 1);
}

TEST_CASE("cli env fallback for output dir") {
    const fs::path dir = fs::temp_directory_path() / "macflow_cli_tests" / "envout";
    fs::remove_all(dir);
    const fs::path ok = write_cfg("env.json",
                                  R"({"eps": 0.2, "N": 1, "r_max": 3.0, "n_cells": 128,
                                      "profile": "interface:1.0", "t_end": 0.02})");
    const std::string cmd = "MACFLOW_OUTPUT_DIR=" + dir.string() + " " + MACFLOW_BIN +
                            " run --config " + ok.string() + " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir / "summary.json"));
}
