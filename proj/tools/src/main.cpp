#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "harness.hpp"

namespace fs = std::filesystem;
namespace h = boundstate::harness;

int main(int argc, char** argv) {
  CLI::App app{"Bound-state integral equation solver"};
  app.require_subcommand(1);

  fs::path out_dir = ".";
  std::uint64_t seed = 0;
  bool paper_box = false;
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random initial guesses");
  app.add_flag("--paper-box", paper_box, "Use a 100 Bohr box");

  fs::path config;
  auto* run_cmd = app.add_subcommand("run", "Run one config");
  run_cmd->add_option("config", config, "Config file")->required();

  fs::path suite_dir;
  auto* suite_cmd = app.add_subcommand("suite", "Run every *.cfg in a directory");
  suite_cmd->add_option("dir", suite_dir, "Config directory")->required();

  app.add_subcommand("verify", "Run the quick property checks");

  CLI11_PARSE(app, argc, argv);

  h::Overrides overrides;
  if (*seed_opt) overrides.seed = seed;
  overrides.paper_box = paper_box;

  if (*run_cmd) {
    h::RunConfig cfg;
    try {
      cfg = h::load_config(config);
    } catch (const std::exception& e) {
      std::cerr << e.what() << '\n';
      return h::kError;
    }
    h::apply_overrides(cfg, overrides);
    const auto rep = h::run(cfg, out_dir);
    if (rep.exit_status == h::kError) {
      std::cerr << "error: " << rep.message << '\n';
    } else {
      std::cout << rep.name << ": " << rep.message << " after " << rep.iterations << " iterations, energy "
                << rep.energy << ", lambda " << rep.lambda << '\n';
    }
    return rep.exit_status;
  }

  if (*suite_cmd) {
    try {
      const auto rep = h::run_suite(h::suite_configs(suite_dir), out_dir, overrides);
      h::write_suite_summary(std::cout, rep);
      std::ostringstream table;
      h::write_suite_summary(table, rep);
      h::write_atomic(out_dir / "suite_summary.csv", table.str());
      return rep.exit_status;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return h::kError;
    }
  }

  return h::verify_properties(std::cout) ? 0 : 1;
}
