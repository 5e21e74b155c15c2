#pragma once

#include <cmath>
#include <vector>

namespace roadflow {

/// Warning policy: congestion index constants, the sustained-congestion rule
/// and the warning lead time.
struct CongestionConfig {
  double k_c = 2200.0;          // road design capacity, vehicles/h (2 lanes)
  double v_f_free = 120.0;      // free-flow speed, km/h
  double rho_threshold = 0.016; // congested when rho exceeds this (strict)
  double sustained_fraction = 0.8;
  double sustained_window_minutes = 30.0;
  double warning_lead_minutes = 10.0;
  double match_tolerance_minutes = 1.0;
  /// Consecutive over-threshold probabilities before a warning is emitted.
  int warning_debounce_samples = 3;
};

struct CongestionEpisode {
  long start = 0;  // sample index of the first congested sample
  long end = 0;    // one past the last congested sample
  double peak_rho = 0.0;
};

/// rho = (k_a / k_c) (1 - v_a / v_f); clamped to 0 when v_a exceeds v_f.
double congestion_index(double k_a, double v_a, const CongestionConfig& cfg);

/// Strict threshold: rho > cfg.rho_threshold.
bool is_congested(double rho, const CongestionConfig& cfg);

/// Finds sustained-congestion episodes in a regularly sampled rho series:
/// a sliding window of sustained_window_minutes qualifies when its congested
/// fraction reaches sustained_fraction; overlapping qualifying windows merge.
/// Episode bounds snap to the first/last congested sample of the merged span.
std::vector<CongestionEpisode> sustained_congestion(
    const std::vector<double>& rho_series, const CongestionConfig& cfg,
    double samples_per_minute = 60.0);

/// Turns a probability series into warning sample indices: a warning fires at
/// the n-th consecutive sample with probability > threshold and re-arms only
/// after n consecutive samples at or below it (symmetric hysteresis, so
/// single-sample flicker neither fires nor re-arms).
std::vector<long> emit_warnings(const std::vector<double>& probabilities,
                                double threshold = 0.5, int debounce = 3);

struct WarningRow {
  int event_id = 0;
  double actual_start_minutes = 0.0;
  double warning_minutes = std::nan("");    // NaN when the episode was missed
  double lead_error_minutes = std::nan(""); // |actual lead - configured lead|
};

struct WarningEvaluation {
  double warning_accuracy = 0.0;       // matched episodes / total episodes
  double mean_lead_error_minutes = 0.0;
  double missed_rate = 0.0;
  double false_rate = 0.0;             // unmatched warnings / total warnings
  std::vector<WarningRow> table;
};

/// Matches warnings to episode starts: a warning belongs to an episode when
/// it falls in [start - lead - tolerance, start]; earliest warning wins. All
/// times in minutes.
WarningEvaluation evaluate_warnings(
    const std::vector<double>& warning_minutes,
    const std::vector<double>& episode_start_minutes,
    const CongestionConfig& cfg);

}  // namespace roadflow
