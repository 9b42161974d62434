#include <cstdio>
#include <exception>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "vexp/errors.hpp"
#include "vexp/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Variable-exponent extrapolation experiments"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment config or a preset");
  std::string config_path;
  std::string preset;
  vexp::RunOptions options;
  std::uint64_t seed = 0;
  run->add_option("config", config_path, "JSON config file");
  run->add_option("--preset", preset, "built-in scenario (see list-presets)");
  run->add_option("--out", options.out_dir, "output directory")->capture_default_str();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--threads", options.threads, "worker threads")->check(CLI::NonNegativeNumber);
  run->add_flag("--verbose", options.verbose, "progress on stderr");

  auto* list = app.add_subcommand("list-presets", "print the built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  if (list->parsed()) {
    for (const auto& p : vexp::presets()) fmt::print("{:<20} {}\n", p.name, p.description);
    return 0;
  }

  if (config_path.empty() == preset.empty()) {
    fmt::print(stderr, "config error: give exactly one of a config file or --preset\n");
    return 1;
  }
  if (*seed_opt) options.seed = seed;

  std::string source = preset.empty() ? config_path : "preset " + preset;
  try {
    const vexp::ConfigDocument doc = preset.empty() ? vexp::load_config(config_path)
                                                    : vexp::parse_config(vexp::find_preset(preset).config, source);
    const vexp::RunOutcome outcome = vexp::run_config(doc, options);
    fmt::print("{} rows, {} failed, config {} -> {}\n", outcome.rows, outcome.failed_rows, outcome.config_hash,
               options.out_dir.string());
    return outcome.exit_code;
  } catch (const vexp::ConfigError& e) {
    fmt::print(stderr, "config error: {}: {}\n", source, e.what());
    return 1;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 2;
  }
}
