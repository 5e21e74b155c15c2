// roadflow: offline expressway traffic analytics.
//
// Subcommands map onto pipeline stages (simulate, track, params, preprocess,
// train, predict, warn, evaluate, report); `run --stages a,b,c` chains them.
// Exit codes: 0 success, 1 data error, 2 configuration error.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roadflow/config.hpp"
#include "roadflow/errors.hpp"
#include "roadflow/pipeline.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path,
                  "Site configuration JSON (omit for the built-in synthetic "
                  "demo site)");
  cmd->add_option("--out", opts.out_dir, "Output directory")
      ->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Override the config's root seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
}

int run_stages(const CommonOptions& opts, const std::string& stage_list) {
  roadflow::SiteConfig cfg = opts.config_path.empty()
                                 ? roadflow::SiteConfig::synthetic_demo()
                                 : roadflow::SiteConfig::load(opts.config_path);
  if (opts.seed_set) {
    cfg.seed = opts.seed;
  }
  const auto stages = roadflow::parse_stages(stage_list);
  // Keep a copy of the effective config next to the artifacts.
  std::filesystem::create_directories(opts.out_dir);
  cfg.save(std::filesystem::path(opts.out_dir) / "config.json");

  const roadflow::RunReport report =
      roadflow::run_pipeline(cfg, opts.out_dir, stages);
  for (const roadflow::StageReport& s : report.stages) {
    std::cout << "stage " << s.name << ": "
              << (s.reused ? "reused" : "completed") << " ("
              << static_cast<long>(s.elapsed_ms) << " ms)\n";
  }
  for (const auto& [point, m] : report.tracking) {
    std::cout << "tracking " << point << ": MOTA " << m.mota << ", "
              << m.id_switches << " id switches\n";
  }
  for (const auto& [model, m] : report.classification) {
    std::cout << "classification " << model << ": accuracy " << m.accuracy
              << ", rmse " << m.rmse << '\n';
  }
  if (report.has_warning_eval) {
    std::cout << "warnings: accuracy " << report.warning_eval.warning_accuracy
              << ", mean lead error "
              << report.warning_eval.mean_lead_error_minutes << " min\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expressway traffic analytics: detection-to-warning pipeline"};
  app.require_subcommand(1);

  const std::vector<std::string> stage_names = {
      "simulate", "track",   "params",   "preprocess", "train",
      "predict",  "warn",    "evaluate", "report"};

  CommonOptions common;
  std::string stages_arg = "all";
  std::function<int()> action;

  for (const std::string& name : stage_names) {
    CLI::App* cmd = app.add_subcommand(name, "Run the " + name + " stage");
    add_common(cmd, common);
    cmd->callback([&action, &common, name] {
      action = [&common, name] { return run_stages(common, name); };
    });
  }

  CLI::App* run_cmd =
      app.add_subcommand("run", "Run a stage chain (default: all stages)");
  add_common(run_cmd, common);
  run_cmd->add_option("--stages", stages_arg,
                      "Comma-separated stage list or 'all'")
      ->capture_default_str();
  run_cmd->callback([&action, &common, &stages_arg] {
    action = [&common, &stages_arg] { return run_stages(common, stages_arg); };
  });

  CLI11_PARSE(app, argc, argv);
  if (!action) {
    return 2;
  }
  try {
    return action();
  } catch (const roadflow::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const roadflow::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
