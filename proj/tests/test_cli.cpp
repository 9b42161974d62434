#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "vexp/errors.hpp"
#include "vexp/experiment.hpp"

using namespace vexp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vexp_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(VEXP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

constexpr const char* kDiagonalConfig = R"({
  "seed": 1,
  "grid": {"dim": 1, "L": 8, "N": 128, "mode": "box"},
  "exponent": {"kind": "constant", "value": 3},
  "experiments": [
    {"type": "diagonal", "p0": 2, "delta": 0.5}
  ]
})";

}  // namespace

TEST_CASE("empty experiment list") {
  const fs::path out = scratch("empty");
  const auto outcome = run_config(parse_config(R"({"experiments": []})"), {.out_dir = out});
  CHECK(outcome.exit_code == 0);
  CHECK(outcome.rows == 0);
  CHECK(slurp(out / "report.csv") == std::string(kReportHeader) + "\n");
}

TEST_CASE("diagonal check through the driver") {
  const fs::path out = scratch("diagonal");
  const auto outcome = run_config(parse_config(kDiagonalConfig), {.out_dir = out});
  CHECK(outcome.exit_code == 0);
  const auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  REQUIRE(summary["rows"].size() == 1);
  CHECK(summary["rows"][0]["verdict"] == "HYPOTHESES_MET");
  CHECK(summary["rows"][0]["witnesses"]["upper"] == 4.0);

  // The config hash appears in every output file.
  const std::string hash = outcome.config_hash;
  CHECK(summary["config_hash"] == hash);
  CHECK(slurp(out / "report.csv").find(hash) != std::string::npos);
  const std::string fields = slurp(out / "fields.bin");
  REQUIRE(fields.size() >= 8);
  std::uint64_t stored = 0;
  for (int i = 7; i >= 0; --i) stored = (stored << 8) | static_cast<unsigned char>(fields[i]);
  CHECK(format_hash(stored) == hash);
}

TEST_CASE("config errors name a line") {
  const std::string text = "{\n  \"grid\": {\"dim\": 1, \"L\": 8, \"N\": 128},\n  \"experiments\": [\n"
                           "    {\"type\": \"no_such_check\"}\n  ]\n}\n";
  try {
    run_config(parse_config(text), {.out_dir = scratch("bad")});
    FAIL("expected a config error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 4") != std::string::npos);
  }
  try {
    parse_config("{\n  \"seed\": 1,\n  \"grid\": [\n}\n");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("config hash ignores formatting") {
  const auto a = parse_config(R"({"seed": 1, "experiments": []})");
  const auto b = parse_config("{\n  \"experiments\" : [ ],\n  \"seed\":1\n}");
  CHECK(config_hash(a.root) == config_hash(b.root));
  CHECK(config_hash(a.root) != config_hash(parse_config(R"({"seed": 2, "experiments": []})").root));
}

TEST_CASE("presets") {
  const auto& all = presets();
  CHECK(all.size() == 7);
  std::set<std::string> names;
  for (const auto& p : all) {
    names.insert(p.name);
    CHECK_NOTHROW(parse_config(p.config));
  }
  for (const char* n : {"rough-a", "rough-b", "rough-c", "strongly-singular", "spherical", "bochner-riesz",
                        "rubio-certificate"}) {
    CHECK(names.count(n) == 1);
  }
  CHECK_THROWS_AS(find_preset("nope"), ConfigError);
}

TEST_CASE("repeated runs are byte-identical") {
  const auto doc = parse_config(find_preset("rubio-certificate").config);
  const fs::path a = scratch("repeat_a");
  const fs::path b = scratch("repeat_b");
  run_config(doc, {.out_dir = a});
  run_config(doc, {.out_dir = b, .threads = 2});
  CHECK(slurp(a / "report.csv") == slurp(b / "report.csv"));
  CHECK(slurp(a / "fields.bin") == slurp(b / "fields.bin"));
}

TEST_CASE("command line exit codes") {
  const fs::path dir = scratch("exe");
  {
    std::ofstream(dir / "ok.json") << kDiagonalConfig;
    std::ofstream(dir / "bad.json") << "{\n  \"experiments\": [\n    {\"type\": 7}\n  ]\n}\n";
  }
  CHECK(run_cli("run " + (dir / "ok.json").string() + " --out " + (dir / "o1").string()) == 0);
  CHECK(fs::exists(dir / "o1" / "report.csv"));
  CHECK(run_cli("run " + (dir / "bad.json").string() + " --out " + (dir / "o2").string()) == 1);
  CHECK(run_cli("run " + (dir / "missing.json").string()) == 1);
  CHECK(run_cli("run --preset nope") == 1);
  CHECK(run_cli("list-presets") == 0);
}
