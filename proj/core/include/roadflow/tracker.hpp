#pragma once

#include <Eigen/Core>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "roadflow/geometry.hpp"
#include "roadflow/kalman.hpp"

namespace roadflow {

/// One detector output: a box plus an optional unit-norm appearance vector.
struct Detection {
  BoundingBox box;
  std::optional<Eigen::VectorXd> embedding;
};

enum class TrackStatus { tentative, confirmed, deleted };

const char* to_string(TrackStatus status);

struct Track {
  int id = 0;
  TrackState state;
  std::deque<Eigen::VectorXd> gallery;
  int hits = 0;    // consecutive matched frames
  int misses = 0;  // consecutive missed frames
  TrackStatus status = TrackStatus::tentative;

  BoundingBox box() const { return state_to_box(state); }
};

enum class CostMode { iou_only, fused };

struct TrackerConfig {
  CostMode mode = CostMode::fused;
  /// Weight of the motion term in the fused cost.
  double lambda = 0.7;
  int min_hits = 3;
  int max_misses = 30;
  std::size_t gallery_capacity = 100;
  /// IoU-only mode: matches with IoU below this are forbidden.
  double iou_threshold = 0.3;
  /// 95% chi-square quantile for the 4-dim box measurement; squashes and
  /// gates the Mahalanobis term.
  double chi2_gate = 9.487729036781154;
  MotionNoiseConfig noise;
};

/// Per-frame lifecycle events.
struct FrameEvents {
  long frame = 0;
  std::vector<int> born;
  std::vector<int> died;
  std::vector<std::pair<int, int>> matches;  // (track id, detection index)
};

/// Squared Mahalanobis distance between the track's predicted measurement and
/// the detection's box.
double mahalanobis_distance(const Track& track, const Detection& det,
                            const KalmanModel& model);

/// Smallest cosine distance (1 - <g, e>) between the detection embedding and
/// the track's gallery. Requires a non-empty gallery and an embedding.
double cosine_distance(const Track& track, const Detection& det);

/// c = lambda * h1 + (1 - lambda) * h2.
double fused_cost(double h1, double h2, double lambda);

/// Tracking-by-detection with a constant-velocity Kalman model, optimal
/// assignment and a tentative/confirmed/deleted lifecycle. CostMode::iou_only
/// reproduces the motion-only baseline; CostMode::fused adds appearance.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config = {});

  /// Advances one frame: predicts, associates, updates, spawns and retires.
  FrameEvents step(const std::vector<Detection>& detections);

  /// Live tracks (tentative + confirmed), in creation order.
  const std::vector<Track>& tracks() const { return tracks_; }

  long frame() const { return frame_; }

 private:
  Eigen::MatrixXd build_cost_matrix(const std::vector<Detection>& detections,
                                    double* gate) const;

  TrackerConfig config_;
  std::vector<Track> tracks_;
  int next_id_ = 1;
  long frame_ = 0;
  bool warned_missing_embeddings_ = false;
};

}  // namespace roadflow
