#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "helpers.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunOutcome {
    int exit_code = -1;
    std::string stdout_text;
};

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "fp3d_cli_test";
    fs::create_directories(dir);
    return dir;
}

RunOutcome run_cli(const std::string& args) {
    const fs::path out = temp_dir() / "stdout.txt";
    const std::string cmd =
        std::string(FP3D_CLI_PATH) + " " + args + " > " + out.string() + " 2> /dev/null";
    const int rc = std::system(cmd.c_str());
    RunOutcome outcome;
    outcome.exit_code = WEXITSTATUS(rc);
    std::ifstream in(out);
    std::ostringstream ss;
    ss << in.rdbuf();
    outcome.stdout_text = ss.str();
    return outcome;
}

std::string fixture(const std::string& name) { return fp3d_test::fixture(name); }

}  // namespace

TEST_CASE("stats prints the stats JSON and exits 0") {
    const RunOutcome r = run_cli("stats " + fixture("grid9.yal"));
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.stdout_text);
    CHECK(j["blocks"] == 9);
    CHECK(j["nets"] == 1);
    CHECK(j["neighbors"]["min"] == 8);
    CHECK(j["neighbors"]["max"] == 8);
    CHECK(j["neighbors"]["avg"] == 8);
}

TEST_CASE("missing input file exits 2") {
    CHECK(run_cli("stats /nonexistent/missing.yal").exit_code == 2);
}

TEST_CASE("bad usage exits 1") {
    CHECK(run_cli("stats").exit_code == 1);
    CHECK(run_cli("nonsense-subcommand").exit_code == 1);
}

TEST_CASE("runtime errors exit 3") {
    // grid too small for 9 components
    CHECK(run_cli("place " + fixture("synth9.yal") + " --grid 2,2,1").exit_code == 3);
}

TEST_CASE("pads-only netlist is an input error") {
    CHECK(run_cli("stats " + fixture("padsonly.yal")).exit_code == 2);
}

TEST_CASE("place emits a valid grid placement") {
    const RunOutcome r = run_cli("place " + fixture("synth9.yal") + " --grid 3,3,1 --seeds 5");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.stdout_text);
    CHECK(j["shape"] == json::array({3, 3, 1}));
    CHECK(j["cells"].size() == 9);
    CHECK(j["fitness"].is_number());
}

TEST_CASE("pipeline is byte-identical across reruns of the same seed list") {
    const std::string args = "pipeline " + fixture("synth9.yal") + " --grid 3,3,1 --seeds 7,8";
    const RunOutcome a = run_cli(args);
    const RunOutcome b = run_cli(args);
    REQUIRE(a.exit_code == 0);
    CHECK(a.stdout_text == b.stdout_text);

    const json j = json::parse(a.stdout_text);
    CHECK(j["layout"]["boxes"].size() == 9);
    CHECK(j["runs"].size() == 2);
    CHECK(j["wirelength"]["total"].get<double>() > 0);
}

TEST_CASE("pipeline place->squeeze->wirelength stages agree with the composed run") {
    const fs::path grid_json = temp_dir() / "grid.json";
    const fs::path geo_json = temp_dir() / "geo.json";

    REQUIRE(run_cli("place " + fixture("synth9.yal") + " --grid 3,3,1 --seeds 3 --out " +
                    grid_json.string())
                .exit_code == 0);
    REQUIRE(run_cli("squeeze " + grid_json.string() + " --yal " + fixture("synth9.yal") +
                    " --seeds 3 --out " + geo_json.string())
                .exit_code == 0);
    const RunOutcome wl =
        run_cli("wirelength " + fixture("synth9.yal") + " " + geo_json.string() + " --per-net");
    REQUIRE(wl.exit_code == 0);
    const json j = json::parse(wl.stdout_text);
    CHECK(j["total"].get<double>() > 0);
    CHECK(j["per_net"].size() == 12);
    CHECK(j["die_height"] == 1.0);
}

TEST_CASE("render produces an SVG with one group per layer") {
    const fs::path layout = temp_dir() / "layout.json";
    REQUIRE(run_cli("pipeline " + fixture("synth9.yal") + " --grid 3,2,2 --seeds 2 --out " +
                    layout.string())
                .exit_code == 0);
    const json doc = json::parse(std::ifstream(layout));
    const fs::path layout_only = temp_dir() / "geo_only.json";
    std::ofstream(layout_only) << doc["layout"].dump();

    const RunOutcome r = run_cli("render " + layout_only.string());
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("<svg") != std::string::npos);
    CHECK(r.stdout_text.find("id=\"layer0\"") != std::string::npos);
    CHECK(r.stdout_text.find("id=\"layer1\"") != std::string::npos);
    // every component name appears as a label
    for (int b = 1; b <= 9; ++b) {
        CHECK(r.stdout_text.find(">b" + std::to_string(b) + "<") != std::string::npos);
    }
}

TEST_CASE("bench reports rows with reference columns for known instances") {
    const RunOutcome r =
        run_cli("bench " + fixture("synth9.yal") + " --grid 3,3,1 --seeds 2");
    REQUIRE(r.exit_code == 0);
    const json j = json::parse(r.stdout_text);
    REQUIRE(j["instances"].size() == 1);
    const json& row = j["instances"][0];
    CHECK(row["name"] == "synth9");
    CHECK(row["wirelength_best"].get<double>() > 0);
    CHECK(row["wirelength_mean"].get<double>() >= row["wirelength_best"].get<double>());
    CHECK_FALSE(row.contains("reference_wirelength"));  // synth9 is not a known instance
}

TEST_CASE("bench keeps going when one instance fails") {
    const RunOutcome r = run_cli("bench /nonexistent/broken.yal " + fixture("pair.yal") +
                                 " --grid 2,1,1 --seeds 1");
    REQUIRE(r.exit_code == 0);  // pair.yal still produced a row
    const json j = json::parse(r.stdout_text);
    CHECK(j["instances"].size() == 1);
}

TEST_CASE("config file fills defaults, flags override it") {
    const fs::path cfg = temp_dir() / "run.json";
    std::ofstream(cfg) << R"({"grid":[3,3,1],"seeds":[4,5],"tau":1.6})";

    const RunOutcome from_cfg =
        run_cli("pipeline " + fixture("synth9.yal") + " --config " + cfg.string());
    REQUIRE(from_cfg.exit_code == 0);
    const json a = json::parse(from_cfg.stdout_text);
    CHECK(a["grid"] == json::array({3, 3, 1}));
    REQUIRE(a["runs"].size() == 2);
    CHECK(a["runs"][0]["seed"] == 4);

    const RunOutcome overridden = run_cli("pipeline " + fixture("synth9.yal") + " --config " +
                                          cfg.string() + " --seeds 7 --grid 3,2,2");
    REQUIRE(overridden.exit_code == 0);
    const json b = json::parse(overridden.stdout_text);
    CHECK(b["grid"] == json::array({3, 2, 2}));
    CHECK(b["runs"].size() == 7);
}

TEST_CASE("svg flag writes the rendered best layout") {
    const fs::path svg = temp_dir() / "best.svg";
    REQUIRE(run_cli("pipeline " + fixture("pair.yal") + " --grid 2,1,1 --seeds 1 --svg " +
                    svg.string() + " --out /dev/null")
                .exit_code == 0);
    std::ifstream in(svg);
    std::ostringstream ss;
    ss << in.rdbuf();
    CHECK(ss.str().find("</svg>") != std::string::npos);
}
