#include "roadflow/congestion.hpp"

#include <algorithm>

#include "roadflow/errors.hpp"

namespace roadflow {

double congestion_index(double k_a, double v_a, const CongestionConfig& cfg) {
  const double rho = (k_a / cfg.k_c) * (1.0 - v_a / cfg.v_f_free);
  return std::max(rho, 0.0);
}

bool is_congested(double rho, const CongestionConfig& cfg) {
  return rho > cfg.rho_threshold;
}

std::vector<CongestionEpisode> sustained_congestion(
    const std::vector<double>& rho_series, const CongestionConfig& cfg,
    double samples_per_minute) {
  const long n = static_cast<long>(rho_series.size());
  const long window = static_cast<long>(
      cfg.sustained_window_minutes * samples_per_minute + 0.5);
  std::vector<CongestionEpisode> episodes;
  if (window < 1 || n < window) {
    return episodes;
  }

  std::vector<char> congested(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    congested[static_cast<std::size_t>(i)] =
        is_congested(rho_series[static_cast<std::size_t>(i)], cfg);
  }

  // Rolling congested count over windows starting at t.
  long count = 0;
  for (long i = 0; i < window; ++i) {
    count += congested[static_cast<std::size_t>(i)];
  }
  const double needed = cfg.sustained_fraction * static_cast<double>(window);
  std::vector<long> qualifying;
  for (long t = 0; t + window <= n; ++t) {
    if (static_cast<double>(count) >= needed) {
      qualifying.push_back(t);
    }
    if (t + window < n) {
      count -= congested[static_cast<std::size_t>(t)];
      count += congested[static_cast<std::size_t>(t + window)];
    }
  }
  if (qualifying.empty()) {
    return episodes;
  }

  // Merge qualifying windows that overlap (starts closer than one window).
  std::size_t group_begin = 0;
  for (std::size_t i = 1; i <= qualifying.size(); ++i) {
    const bool closes_group =
        i == qualifying.size() ||
        qualifying[i] - qualifying[i - 1] >= window;
    if (!closes_group) {
      continue;
    }
    const long span_begin = qualifying[group_begin];
    const long span_end = std::min(qualifying[i - 1] + window, n);
    CongestionEpisode ep;
    ep.start = -1;
    for (long s = span_begin; s < span_end; ++s) {
      if (!congested[static_cast<std::size_t>(s)]) {
        continue;
      }
      if (ep.start < 0) {
        ep.start = s;
      }
      ep.end = s + 1;
      ep.peak_rho = std::max(ep.peak_rho, rho_series[static_cast<std::size_t>(s)]);
    }
    if (ep.start >= 0) {
      episodes.push_back(ep);
    }
    group_begin = i;
  }
  return episodes;
}

std::vector<long> emit_warnings(const std::vector<double>& probabilities,
                                double threshold, int debounce) {
  std::vector<long> warnings;
  int above_streak = 0;
  int below_streak = 0;
  bool armed = true;
  for (long i = 0; i < static_cast<long>(probabilities.size()); ++i) {
    if (probabilities[static_cast<std::size_t>(i)] > threshold) {
      above_streak += 1;
      below_streak = 0;
      if (armed && above_streak >= debounce) {
        warnings.push_back(i);
        armed = false;
      }
    } else {
      above_streak = 0;
      below_streak += 1;
      // Symmetric hysteresis: a momentary dip must persist as long as the
      // firing streak before the emitter re-arms.
      if (below_streak >= debounce) {
        armed = true;
      }
    }
  }
  return warnings;
}

WarningEvaluation evaluate_warnings(
    const std::vector<double>& warning_minutes,
    const std::vector<double>& episode_start_minutes,
    const CongestionConfig& cfg) {
  WarningEvaluation eval;
  std::vector<char> warning_used(warning_minutes.size(), false);

  int matched = 0;
  double lead_error_sum = 0.0;
  for (std::size_t e = 0; e < episode_start_minutes.size(); ++e) {
    const double start = episode_start_minutes[e];
    const double earliest =
        start - cfg.warning_lead_minutes - cfg.match_tolerance_minutes;
    WarningRow row;
    row.event_id = static_cast<int>(e) + 1;
    row.actual_start_minutes = start;

    int best = -1;
    for (std::size_t w = 0; w < warning_minutes.size(); ++w) {
      if (warning_used[w]) {
        continue;
      }
      const double t = warning_minutes[w];
      if (t < earliest || t > start) {
        continue;
      }
      if (best < 0 || t < warning_minutes[static_cast<std::size_t>(best)]) {
        best = static_cast<int>(w);
      }
    }
    if (best >= 0) {
      warning_used[static_cast<std::size_t>(best)] = true;
      const double t = warning_minutes[static_cast<std::size_t>(best)];
      row.warning_minutes = t;
      row.lead_error_minutes =
          std::abs((start - t) - cfg.warning_lead_minutes);
      lead_error_sum += row.lead_error_minutes;
      matched += 1;
    }
    eval.table.push_back(row);
  }

  const std::size_t total_episodes = episode_start_minutes.size();
  const std::size_t total_warnings = warning_minutes.size();
  const std::size_t false_warnings =
      total_warnings -
      static_cast<std::size_t>(
          std::count(warning_used.begin(), warning_used.end(), true));

  eval.warning_accuracy =
      total_episodes == 0
          ? 1.0
          : static_cast<double>(matched) / static_cast<double>(total_episodes);
  eval.missed_rate =
      total_episodes == 0
          ? 0.0
          : static_cast<double>(total_episodes - matched) /
                static_cast<double>(total_episodes);
  eval.false_rate = total_warnings == 0
                        ? 0.0
                        : static_cast<double>(false_warnings) /
                              static_cast<double>(total_warnings);
  eval.mean_lead_error_minutes =
      matched == 0 ? std::nan("") : lead_error_sum / matched;
  return eval;
}

}  // namespace roadflow
