#include "roadflow/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "roadflow/assignment.hpp"
#include "roadflow/errors.hpp"

namespace roadflow {

namespace {

constexpr double kForbidden = 1e9;

}  // namespace

const char* to_string(TrackStatus status) {
  switch (status) {
    case TrackStatus::tentative:
      return "tentative";
    case TrackStatus::confirmed:
      return "confirmed";
    case TrackStatus::deleted:
      return "deleted";
  }
  return "unknown";
}

double mahalanobis_distance(const Track& track, const Detection& det,
                            const KalmanModel& model) {
  return mahalanobis_squared(track.state, box_to_measurement(det.box), model);
}

double cosine_distance(const Track& track, const Detection& det) {
  if (!det.embedding.has_value()) {
    throw DataError("cosine_distance: detection has no embedding");
  }
  if (track.gallery.empty()) {
    throw DataError("cosine_distance: track gallery is empty");
  }
  double best = std::numeric_limits<double>::infinity();
  for (const Eigen::VectorXd& g : track.gallery) {
    best = std::min(best, 1.0 - g.dot(*det.embedding));
  }
  return best;
}

double fused_cost(double h1, double h2, double lambda) {
  return lambda * h1 + (1.0 - lambda) * h2;
}

Tracker::Tracker(TrackerConfig config) : config_(std::move(config)) {
  if (config_.lambda < 0.0 || config_.lambda > 1.0) {
    throw ConfigError("TrackerConfig: lambda must be in [0, 1]");
  }
  if (config_.min_hits < 1 || config_.max_misses < 1) {
    throw ConfigError("TrackerConfig: min_hits and max_misses must be >= 1");
  }
}

Eigen::MatrixXd Tracker::build_cost_matrix(
    const std::vector<Detection>& detections, double* gate) const {
  const int n = static_cast<int>(tracks_.size());
  const int m = static_cast<int>(detections.size());
  Eigen::MatrixXd cost(n, m);

  if (config_.mode == CostMode::iou_only) {
    *gate = 1.0 - config_.iou_threshold;
    for (int i = 0; i < n; ++i) {
      const BoundingBox predicted = tracks_[i].box();
      for (int j = 0; j < m; ++j) {
        cost(i, j) = 1.0 - iou(predicted, detections[j].box);
      }
    }
    return cost;
  }

  *gate = kForbidden / 2.0;
  for (int i = 0; i < n; ++i) {
    const Track& track = tracks_[i];
    const KalmanModel model =
        make_box_motion_model(track.box().h, config_.noise);
    for (int j = 0; j < m; ++j) {
      const double d2 = mahalanobis_distance(track, detections[j], model);
      const double motion = std::min(d2 / config_.chi2_gate, 1.0);
      if (motion >= 1.0) {
        cost(i, j) = kForbidden;  // outside the chi-square gate
        continue;
      }
      if (detections[j].embedding.has_value() && !track.gallery.empty()) {
        cost(i, j) = fused_cost(motion, cosine_distance(track, detections[j]),
                                config_.lambda);
      } else {
        cost(i, j) = motion;
      }
    }
  }
  return cost;
}

FrameEvents Tracker::step(const std::vector<Detection>& detections) {
  ++frame_;
  FrameEvents events;
  events.frame = frame_;

  if (config_.mode == CostMode::fused && !warned_missing_embeddings_ &&
      !detections.empty() &&
      std::none_of(detections.begin(), detections.end(),
                   [](const Detection& d) { return d.embedding.has_value(); })) {
    std::cerr << "[tracker] detections carry no embeddings; "
                 "falling back to motion-only cost\n";
    warned_missing_embeddings_ = true;
  }

  // Predict every live track to the current frame.
  for (Track& track : tracks_) {
    const KalmanModel model =
        make_box_motion_model(track.box().h, config_.noise);
    track.state = kalman_predict(track.state, model);
  }

  // Associate.
  std::vector<char> det_matched(detections.size(), false);
  std::vector<char> track_matched(tracks_.size(), false);
  if (!tracks_.empty() && !detections.empty()) {
    double gate = 0.0;
    const Eigen::MatrixXd cost = build_cost_matrix(detections, &gate);
    const Assignment assignment = hungarian_assign(cost, gate);
    for (const auto& [row, col] : assignment.pairs) {
      Track& track = tracks_[row];
      const Detection& det = detections[col];
      const KalmanModel model =
          make_box_motion_model(track.box().h, config_.noise);
      track.state =
          kalman_update(track.state, box_to_measurement(det.box), model);
      if (det.embedding.has_value()) {
        track.gallery.push_back(*det.embedding);
        while (track.gallery.size() > config_.gallery_capacity) {
          track.gallery.pop_front();
        }
      }
      track.hits += 1;
      track.misses = 0;
      if (track.status == TrackStatus::tentative &&
          track.hits >= config_.min_hits) {
        track.status = TrackStatus::confirmed;
      }
      track_matched[row] = true;
      det_matched[col] = true;
      events.matches.emplace_back(track.id, col);
    }
  }

  // Unmatched tracks accrue misses and eventually retire.
  for (std::size_t i = 0; i < tracks_.size(); ++i) {
    if (track_matched[i]) {
      continue;
    }
    Track& track = tracks_[i];
    track.misses += 1;
    track.hits = 0;
    if (track.misses > config_.max_misses) {
      track.status = TrackStatus::deleted;
      events.died.push_back(track.id);
    }
  }
  std::erase_if(tracks_, [](const Track& t) {
    return t.status == TrackStatus::deleted;
  });

  // Unmatched detections spawn tentative tracks.
  for (std::size_t j = 0; j < detections.size(); ++j) {
    if (det_matched[j]) {
      continue;
    }
    Track track;
    track.id = next_id_++;
    track.state = init_box_state(detections[j].box, config_.noise);
    if (detections[j].embedding.has_value()) {
      track.gallery.push_back(*detections[j].embedding);
    }
    track.hits = 1;
    track.status = track.hits >= config_.min_hits ? TrackStatus::confirmed
                                                  : TrackStatus::tentative;
    events.born.push_back(track.id);
    tracks_.push_back(std::move(track));
  }

  return events;
}

}  // namespace roadflow
