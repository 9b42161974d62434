#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace vexp {

/// A parsed JSON config together with the source line of every value, keyed
/// by JSON pointer, so validation errors can name a line.
struct ConfigDocument {
  nlohmann::json root;
  std::map<std::string, int> lines;
  std::string source;

  /// Line of the value at `pointer`, falling back to the nearest enclosing value.
  int line_of(std::string pointer) const;
};

/// Throws ConfigError (with a line number) on malformed JSON.
ConfigDocument parse_config(std::string_view text, std::string source = "<config>");
ConfigDocument load_config(const std::filesystem::path& path);

/// Source line of every value in well-formed JSON text, keyed by JSON pointer.
std::map<std::string, int> json_line_index(std::string_view text);

/// FNV-1a 64-bit hash of the canonical (sorted-key, compact) serialisation.
std::uint64_t config_hash(const nlohmann::json& config);
std::string format_hash(std::uint64_t hash);

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool verbose = false;
};

struct RunOutcome {
  /// 0 success, 2 when any row failed at run time.
  int exit_code = 0;
  std::string config_hash;
  std::size_t rows = 0;
  std::size_t failed_rows = 0;
};

/// Validates every experiment (throwing ConfigError before anything runs),
/// executes them in order and writes report.csv, fields.bin and summary.json
/// into `options.out_dir`.
RunOutcome run_config(const ConfigDocument& doc, const RunOptions& options);

/// Column header of report.csv.
inline constexpr std::string_view kReportHeader =
    "config_hash,index,experiment,check,verdict,primary_metric,primary_value,witnesses,notes";

struct Preset {
  std::string name;
  std::string description;
  /// JSON config text.
  std::string config;
};

const std::vector<Preset>& presets();
/// Throws ConfigError for an unknown name.
const Preset& find_preset(std::string_view name);

}  // namespace vexp
