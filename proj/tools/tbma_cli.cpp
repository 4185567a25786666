// Experiment runner for TBMA/MFSK over-the-air federated learning.
//
//   tbma run  <config.json> [--out-dir DIR] [--threads T] [--quiet]
//   tbma papr <config.json> [--out-dir DIR]

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "tbma/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"TBMA/MFSK over-the-air federated learning simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  bool quiet = false;

  auto* run = app.add_subcommand("run", "Sweep the configured grid and write metrics.csv");
  run->add_option("config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--out-dir", out_dir, "Override output_dir from the config");
  run->add_option("--threads", threads, "Grid points run in parallel")->check(CLI::PositiveNumber);
  run->add_flag("--quiet", quiet, "Only report failed trials");

  auto* papr = app.add_subcommand("papr", "Measure MFSK and DSB envelope PAPR");
  papr->add_option("config", config_path, "JSON experiment config")->required()->check(CLI::ExistingFile);
  papr->add_option("--out-dir", out_dir, "Override output_dir from the config");

  CLI11_PARSE(app, argc, argv);

  try {
    auto config = tbma::parse_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (*run) return tbma::run_experiment(config, {threads, quiet});
    return tbma::run_papr(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
