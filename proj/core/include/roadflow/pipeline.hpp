#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "roadflow/config.hpp"
#include "roadflow/congestion.hpp"
#include "roadflow/mot_metrics.hpp"
#include "roadflow/neural/metrics.hpp"

namespace roadflow {

enum class Stage {
  simulate,
  track,
  params,
  preprocess,
  train,
  predict,
  warn,
  evaluate,
  report,
};

const char* to_string(Stage stage);

/// Parses a comma-separated stage list ("track,params"); "all" expands to the
/// full chain. Stages always execute in canonical order.
std::vector<Stage> parse_stages(const std::string& list);

struct StageReport {
  std::string name;
  bool reused = false;  // outputs already existed; stage skipped
  double elapsed_ms = 0.0;
};

struct RunReport {
  std::vector<StageReport> stages;
  long outliers_removed = 0;
  long gaps_filled = 0;
  long rejected_rows = 0;
  std::map<std::string, TrackingMetrics> tracking;  // per observation point
  std::map<std::string, neural::ClassificationMetrics> classification;
  WarningEvaluation warning_eval;
  bool has_warning_eval = false;
  std::vector<std::string> artifacts;  // paths relative to the output dir

  /// include_timings=false produces the content compared by determinism
  /// checks (wall-clock timings necessarily differ between runs).
  std::string to_json(bool include_timings = true) const;
};

/// Executes the requested stages in order against one output directory.
/// Every stage persists its outputs so later invocations can resume: a data
/// stage whose outputs all exist is skipped and marked reused (evaluate and
/// report recompute from the persisted artifacts so the returned RunReport
/// is always populated). Artifact layout:
///
///   detections/<point>.csv   ground_truth/<point>.csv    (simulate)
///   series/<point>.csv       labels/<point>.csv          (simulate)
///   tracks/<point>.csv                                   (track)
///   params/<point>.csv                                   (params)
///   preprocessed/<point>.csv preprocessed/normalizer.json(preprocess)
///   checkpoints/<model>.json                             (train)
///   predictions/<model>.csv                              (predict)
///   warnings/warnings.csv    warnings/episodes.csv       (warn)
///   evaluation/warning_table.csv                         (evaluate)
///   plots/*.csv              report.json                 (report)
RunReport run_pipeline(const SiteConfig& config,
                       const std::filesystem::path& out_dir,
                       const std::vector<Stage>& stages);

/// Contiguous runs of 1-flags as (start, end) sample index pairs.
std::vector<std::pair<long, long>> episodes_from_flags(
    const std::vector<std::uint8_t>& flags);

}  // namespace roadflow
