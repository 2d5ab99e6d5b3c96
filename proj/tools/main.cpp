#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "spma/config.hpp"
#include "spma/experiment.hpp"
#include "spma/report.hpp"
#include "spma/verify.hpp"

namespace {

struct CommonOpts {
  std::string output_dir;
  int threads = 1;
  bool no_svg = false;
  std::uint64_t seed_offset = 0;
};

int execute_cells(const std::string& config_path, const CommonOpts& opts, bool grid) {
  spma::ExperimentConfig cfg = spma::load_config_file(config_path);
  if (!grid) {
    // `run` executes one cell per method; the sweep dimensions must be
    // singletons so the config pins the run completely.
    if (cfg.eta_grid.size() != 1) throw spma::ConfigError("run: eta_grid must have one entry");
    if (cfg.seeds.size() != 1) throw spma::ConfigError("run: seeds must have one entry");
    if (cfg.parameterization.linear && cfg.inner_m.size() != 1)
      throw spma::ConfigError("run: inner_m must have one entry");
  }
  if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;

  const spma::ExperimentResult result =
      spma::run_experiment(cfg, opts.threads, opts.seed_offset);
  spma::write_results(result, cfg.output_dir, !opts.no_svg);

  int failed = 0;
  for (const auto& cell : result.cells) {
    if (cell.failed()) {
      std::fprintf(stderr, "cell %d (%s, eta=%g, m=%d, seed=%llu) failed: %s\n",
                   cell.spec.index, spma::method_name(cell.spec.method), cell.spec.eta_raw,
                   cell.spec.inner_m, static_cast<unsigned long long>(cell.spec.seed),
                   cell.error.c_str());
      ++failed;
    }
  }
  std::printf("%zu cells -> %s (%d failed)\n", result.cells.size(), cfg.output_dir.c_str(),
              failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy-optimization lab: softmax policy mirror ascent and baselines"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts opts;
  app.add_option("--output-dir", opts.output_dir, "Override the config's output directory");
  app.add_option("--threads", opts.threads, "Worker threads for independent cells (0 = auto)");
  app.add_flag("--no-svg", opts.no_svg, "Skip SVG chart emission");
  app.add_option("--seed-offset", opts.seed_offset, "Offset added to every run seed");

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Execute a single-cell config");
  run_cmd->add_option("config", config_path, "Config file (JSON)")->required();

  auto* grid_cmd = app.add_subcommand("grid", "Execute the full method x eta x m x seed grid");
  grid_cmd->add_option("config", config_path, "Config file (JSON)")->required();

  std::string suite = "all";
  auto* verify_cmd = app.add_subcommand("verify", "Run the acceptance checks");
  verify_cmd->add_option("suite", suite, "bandit | tabular | fa | all");

  std::string results_dir;
  auto* report_cmd = app.add_subcommand("report", "Regenerate summary and charts from CSVs");
  report_cmd->add_option("results-dir", results_dir, "Directory with manifest.json")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return execute_cells(config_path, opts, false);
    if (grid_cmd->parsed()) return execute_cells(config_path, opts, true);
    if (verify_cmd->parsed()) {
      const auto results = spma::run_acceptance_suite(suite);
      for (const auto& r : results) std::printf("%s\n", spma::format_criterion_line(r).c_str());
      return spma::all_passed(results) ? 0 : 1;
    }
    if (report_cmd->parsed()) {
      spma::ExperimentResult result = spma::read_results(results_dir);
      const std::string out = opts.output_dir.empty() ? results_dir : opts.output_dir;
      spma::write_results(result, out, !opts.no_svg);
      std::printf("report regenerated in %s\n", out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
