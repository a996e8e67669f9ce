#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "corpus_fixture.hpp"
#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string output;
};

/// Runs a full shell command, capturing stdout (and stderr when merged).
RunResult run_shell(const std::string& command, bool merge_stderr = true) {
  std::string line = command + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(line.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult result;
  char buffer[4096];
  std::size_t n = 0;
  while ((n = fread(buffer, 1, sizeof buffer, pipe)) > 0) result.output.append(buffer, n);
  int rc = pclose(pipe);
  REQUIRE(rc != -1);
  REQUIRE(WIFEXITED(rc));
  result.status = WEXITSTATUS(rc);
  return result;
}

/// Runs the engine binary with the shipped corpus preselected.
RunResult run_cli(const std::string& args, bool merge_stderr = true) {
  return run_shell(std::string(JANUS_CLI_PATH) + " " + args + " --corpus " +
                       janus::testing::corpus_dir(),
                   merge_stderr);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir() {
  fs::path dir = fs::temp_directory_path() / "janus_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("check validates the shipped corpus and reports its size") {
  auto ok = run_shell(std::string(JANUS_CLI_PATH) + " check " + janus::testing::corpus_dir());
  CHECK(ok.status == 0);
  CHECK(ok.output == "ok: 8 files, 3 domains, 4 scenes\n");
}

TEST_CASE("check surfaces diagnostics with file, line, and code") {
  fs::path bad = scratch_dir() / "broken.domain";
  std::ofstream(bad) << "domain broken {\n  concept {\n}\n";
  auto failed = run_shell(std::string(JANUS_CLI_PATH) + " check " + bad.string());
  CHECK(failed.status == 1);
  CHECK(failed.output.find("broken.domain:2") != std::string::npos);
  CHECK(failed.output.find("error DSL-") != std::string::npos);

  auto missing = run_shell(std::string(JANUS_CLI_PATH) + " check /no/such/path.domain");
  CHECK(missing.status == 2);
  CHECK(missing.output.find("IO-READ") != std::string::npos);
}

TEST_CASE("interpret exits zero despite violations and matches the text fixture") {
  auto text = run_cli("interpret battery_bulb --output text", false);
  CHECK(text.status == 0);
  CHECK(text.output == slurp(fs::path(JANUS_GOLDEN_DIR) / "battery_bulb.text"));
}

TEST_CASE("interpret rejects out-of-range thresholds with exit two") {
  auto bad = run_cli("interpret battery_bulb --janus-threshold 1.01");
  CHECK(bad.status == 2);
  CHECK(bad.output.find("CONFIG") != std::string::npos);

  auto unknown = run_cli("interpret no_such_scene");
  CHECK(unknown.status == 1);
  CHECK(unknown.output.find("no scene `no_such_scene`") != std::string::npos);
}

TEST_CASE("repair exit codes name the outcome") {
  CHECK(run_cli("repair battery_bulb -o /dev/null").status == 0);
  CHECK(run_cli("repair two_batteries -o /dev/null").status == 3);
  CHECK(run_cli("repair battery_bulb --budget 1 -o /dev/null").status == 4);
}

TEST_CASE("identical invocations write byte-identical traces") {
  fs::path a = scratch_dir() / "first.json";
  fs::path b = scratch_dir() / "second.json";
  REQUIRE(run_cli("repair weight_generator -o " + a.string()).status == 0);
  REQUIRE(run_cli("repair weight_generator -o " + b.string()).status == 0);
  std::string first = slurp(a);
  CHECK(first == slurp(b));
  CHECK_FALSE(first.empty());
}

TEST_CASE("config file applies beneath explicit flags") {
  fs::path cfg = scratch_dir() / "sweep.cfg";
  std::ofstream(cfg) << "# corpus sweep profile\nbudget 1\noutput json\n";

  // File alone: budget 1 exhausts on the battery scene.
  CHECK(run_cli("repair battery_bulb --config " + cfg.string() + " -o /dev/null").status == 4);
  // An explicit flag wins over the file.
  CHECK(run_cli("repair battery_bulb --config " + cfg.string() +
                " --budget 16 -o /dev/null")
            .status == 0);

  fs::path bad = scratch_dir() / "bad.cfg";
  std::ofstream(bad) << "cadence weekly\n";
  auto rejected = run_cli("repair battery_bulb --config " + bad.string());
  CHECK(rejected.status == 2);
  CHECK(rejected.output.find("unknown configuration key `cadence`") != std::string::npos);
}

TEST_CASE("explain walks a violation back to its provenance") {
  fs::path trace = scratch_dir() / "bb.json";
  REQUIRE(run_cli("interpret battery_bulb -o " + trace.string()).status == 0);

  auto v1 = run_shell(std::string(JANUS_CLI_PATH) + " explain " + trace.string() + " v1");
  CHECK(v1.status == 0);
  CHECK(v1.output.find("v1 integrity energy.DistinctEndpoints") != std::string::npos);
  CHECK(v1.output.find("janus:Transfer~electrical current") != std::string::npos);
  CHECK(v1.output.find("implicated:") != std::string::npos);

  auto gone = run_shell(std::string(JANUS_CLI_PATH) + " explain " + trace.string() + " v9");
  CHECK(gone.status == 1);

  auto not_a_trace = run_shell(std::string(JANUS_CLI_PATH) + " explain " +
                               janus::testing::corpus_path("battery_bulb.scene") + " v1");
  CHECK(not_a_trace.status == 2);
}

TEST_CASE("the environment variable supplies the default corpus root") {
  auto env = run_shell("JANUS_CORPUS=" + janus::testing::corpus_dir() + " " +
                       JANUS_CLI_PATH + " check");
  CHECK(env.status == 0);
  CHECK(env.output.find("ok: 8 files") != std::string::npos);
}

TEST_CASE("update-golden regenerates the shipped reference files bit for bit") {
  fs::path dir = scratch_dir() / "golden";
  fs::remove_all(dir);
  auto interpret = run_cli("interpret battery_bulb -o /dev/null --update-golden" +
                           std::string(" --golden-dir ") + dir.string());
  REQUIRE(interpret.status == 0);
  CHECK(interpret.output.find("WARNING: regenerating golden reference files") !=
        std::string::npos);
  auto repair = run_cli("repair battery_bulb -o /dev/null --update-golden --golden-dir " +
                        dir.string());
  REQUIRE(repair.status == 0);

  for (const std::string name : {"fig5b.json", "fig2_target.json", "battery_bulb.text"})
    CHECK(slurp(dir / name) == slurp(fs::path(JANUS_GOLDEN_DIR) / name));

  // Scenes without a registered reference cannot overwrite anything.
  auto stray = run_cli("repair tank_heater -o /dev/null --update-golden --golden-dir " +
                       dir.string());
  CHECK(stray.status == 2);
}
