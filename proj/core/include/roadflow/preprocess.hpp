#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "roadflow/records.hpp"

namespace roadflow {

struct CleanBounds {
  /// Hard validity range for speed; values outside are always outliers.
  double speed_min = 60.0;
  double speed_max = 140.0;
  /// Multiples of the per-feature standard deviation for the second stage.
  double sigma_k = 3.0;
};

struct Removal {
  std::size_t index = 0;
  int feature = 0;
  std::string reason;
};

struct CleanResult {
  /// Input series with removed values replaced by NaN.
  std::vector<ParameterSample> series;
  std::vector<Removal> report;
};

/// Two-stage outlier removal: hard speed bounds first, then a per-feature
/// k-sigma rule with statistics computed on the values that survived stage
/// one (so gross outliers cannot inflate sigma). Surviving values are never
/// altered.
CleanResult clean(const std::vector<ParameterSample>& series,
                  const CleanBounds& bounds = {});

/// Fills NaN gaps per feature by linear interpolation between the nearest
/// present neighbours; leading/trailing gaps copy the nearest present value.
/// Throws DataError when a feature has no present value at all.
std::vector<ParameterSample> interpolate(
    const std::vector<ParameterSample>& series);

/// Per-feature mean/std transform fitted on the training split only.
class Normalizer {
 public:
  /// Throws ConfigError when a feature is degenerate (zero variance).
  static Normalizer fit(const std::vector<ParameterSample>& training);

  std::vector<ParameterSample> apply(
      const std::vector<ParameterSample>& series) const;
  std::vector<ParameterSample> invert(
      const std::vector<ParameterSample>& series) const;

  Eigen::Vector3d mean() const { return mu_; }
  Eigen::Vector3d stddev() const { return sigma_; }

  std::string to_json() const;
  static Normalizer from_json(const std::string& text);

 private:
  Normalizer() = default;
  Eigen::Vector3d mu_ = Eigen::Vector3d::Zero();
  Eigen::Vector3d sigma_ = Eigen::Vector3d::Ones();
};

/// Supervised sequence sample: seq_len consecutive normalized parameter
/// triples plus the binary "congestion ahead" label.
struct WindowedSample {
  Eigen::MatrixXd sequence;  // seq_len x 3, rows ordered oldest first
  int label = 0;
};

/// Slides a length-seq_len window over the series. The label is 1 iff a
/// congestion episode onset (0->1 transition in flags, evaluated on sample
/// indices) lies within (last, last + horizon_samples] of the window's last
/// index. Series shorter than seq_len yield no samples.
std::vector<WindowedSample> make_windows(
    const std::vector<ParameterSample>& normalized,
    const std::vector<std::uint8_t>& congestion_flags, int seq_len,
    long horizon_samples);

}  // namespace roadflow
