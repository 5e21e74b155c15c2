#pragma once

#include <vector>

#include "roadflow/records.hpp"

namespace roadflow {

/// CLEAR-MOT style evaluation counts.
struct TrackingMetrics {
  double mota = 0.0;
  int id_switches = 0;
  int fragmentations = 0;
  int false_positives = 0;
  int misses = 0;
  int total_gt = 0;
  /// Fraction of ground-truth trajectories matched over >= 80% of their
  /// lifetime ("mostly tracked").
  double tracking_stability = 0.0;
};

/// Frame-by-frame matching at IoU >= iou_threshold with carry-over of the
/// previous frame's correspondences, optimal assignment on the rest. An ID
/// switch is counted whenever a ground-truth identity's matched hypothesis id
/// changes. Throws DataError on empty ground truth.
TrackingMetrics evaluate_tracking(const std::vector<TrackRecord>& ground_truth,
                                  const std::vector<TrackRecord>& hypotheses,
                                  double iou_threshold = 0.5);

}  // namespace roadflow
