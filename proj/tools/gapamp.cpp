#include "gapamp/experiments.hpp"
#include "gapamp/io.hpp"
#include "gapamp/report.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"gapamp: spectral gap amplification experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Run the experiment described by a JSON config");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--set", overrides, "Override a scalar param, key=value (repeatable)");

  std::string dir;
  std::string output;
  auto* report = app.add_subcommand("report", "Summarize the CSV artifacts in a directory as JSON");
  report->add_option("dir", dir, "Results directory")->required();
  report->add_option("-o,--output", output, "Also write the summary to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (*run) {
    gapamp::ExperimentConfig cfg;
    try {
      cfg = gapamp::parse_config(gapamp::read_text(config_path), overrides);
    } catch (const std::exception& e) {
      std::cerr << "gapamp: invalid config: " << e.what() << '\n';
      return 2;
    }
    try {
      const gapamp::RunOutcome out = gapamp::run_experiment(cfg);
      for (const auto& a : out.artifacts) std::cout << a.string() << '\n';
      if (!out.ok()) {
        std::cerr << "gapamp: " << out.failures.size() << " invariant failure(s):\n";
        for (const auto& f : out.failures) std::cerr << "  " << f << '\n';
        return 1;
      }
    } catch (const gapamp::ConfigError& e) {
      std::cerr << "gapamp: invalid config: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "gapamp: " << cfg.experiment << " failed: " << e.what() << '\n';
      return 1;
    }
    return 0;
  }

  const std::string text = gapamp::build_report(dir).dump(2) + "\n";
  std::cout << text;
  if (!output.empty()) gapamp::write_text_atomic(output, text);
  return 0;
}
