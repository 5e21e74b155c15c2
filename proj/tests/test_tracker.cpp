#include <doctest.h>

#include <set>

#include "roadflow/errors.hpp"
#include "roadflow/mot_metrics.hpp"
#include "roadflow/scenario.hpp"
#include "roadflow/tracker.hpp"

using namespace roadflow;

namespace {

Detection det_at(double cx, double cy, double w = 40, double h = 30) {
  Detection d;
  d.box = {cx, cy, w, h, 0.9, 0};
  return d;
}

Eigen::VectorXd axis_vector(int dim, int axis, double sign = 1.0) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
  v(axis) = sign;
  return v;
}

std::vector<TrackRecord> confirmed_records(const Tracker& tracker,
                                           long frame) {
  std::vector<TrackRecord> records;
  for (const Track& t : tracker.tracks()) {
    if (t.status == TrackStatus::confirmed) {
      const BoundingBox b = t.box();
      records.push_back({frame, t.id, b.cx, b.cy, b.w, b.h, "confirmed"});
    }
  }
  return records;
}

}  // namespace

TEST_CASE("mahalanobis distance is zero at the predicted position") {
  const MotionNoiseConfig noise;
  Track track;
  track.state = init_box_state({100, 100, 40, 30, 1, 0}, noise);
  const KalmanModel model = make_box_motion_model(30, noise);
  CHECK(mahalanobis_distance(track, det_at(100, 100), model) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("mahalanobis matches the scalar hand oracle") {
  // Scalar case: S = P + R = 4, residual 2 -> 2 * (1/4) * 2 = 1.
  KalmanModel m;
  m.F = m.H = Eigen::MatrixXd::Identity(1, 1);
  m.Q = Eigen::MatrixXd::Zero(1, 1);
  m.R = 1.0 * Eigen::MatrixXd::Identity(1, 1);
  TrackState s{Eigen::VectorXd::Zero(1),
               3.0 * Eigen::MatrixXd::Identity(1, 1)};
  Eigen::VectorXd z(1);
  z << 2.0;
  CHECK(mahalanobis_squared(s, z, m) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("mahalanobis invariant under joint rescaling") {
  KalmanModel m;
  m.F = m.H = Eigen::MatrixXd::Identity(2, 2);
  m.Q = Eigen::MatrixXd::Zero(2, 2);
  m.R = Eigen::MatrixXd::Identity(2, 2);
  TrackState s{Eigen::Vector2d::Zero(), 2.0 * Eigen::MatrixXd::Identity(2, 2)};
  Eigen::VectorXd z(2);
  z << 1.5, -0.5;
  const double base = mahalanobis_squared(s, z, m);

  const double c = 3.7;
  KalmanModel scaled = m;
  scaled.R *= c * c;
  TrackState s2{s.x, s.P * c * c};
  CHECK(mahalanobis_squared(s2, c * z, scaled) ==
        doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("cosine distance over the gallery") {
  Track track;
  Detection det = det_at(0, 0);

  det.embedding = axis_vector(4, 0);
  track.gallery.push_back(axis_vector(4, 0));
  CHECK(cosine_distance(track, det) == doctest::Approx(0.0));

  det.embedding = axis_vector(4, 1);  // orthogonal
  CHECK(cosine_distance(track, det) == doctest::Approx(1.0));

  // Gallery {e, -e}: min rule picks the aligned entry.
  track.gallery.push_back(axis_vector(4, 0, -1.0));
  det.embedding = axis_vector(4, 0);
  CHECK(cosine_distance(track, det) == doctest::Approx(0.0));

  Detection no_embedding = det_at(0, 0);
  CHECK_THROWS_AS(cosine_distance(track, no_embedding), DataError);
}

TEST_CASE("fused cost arithmetic") {
  CHECK(fused_cost(1.0, 1.0, 0.7) == doctest::Approx(1.0));
  CHECK(fused_cost(0.0, 1.0, 0.7) == doctest::Approx(0.3));
  CHECK(fused_cost(0.42, 99.0, 1.0) == doctest::Approx(0.42));
  // Convexity keeps the result between the two terms.
  for (double lambda = 0.0; lambda <= 1.0; lambda += 0.1) {
    const double c = fused_cost(0.2, 0.8, lambda);
    CHECK(c >= 0.2 - 1e-12);
    CHECK(c <= 0.8 + 1e-12);
  }
}

TEST_CASE("cold start spawns tentative tracks") {
  Tracker tracker;
  const FrameEvents events =
      tracker.step({det_at(100, 100), det_at(400, 100), det_at(700, 100)});
  CHECK(events.born.size() == 3);
  CHECK(tracker.tracks().size() == 3);
  for (const Track& t : tracker.tracks()) {
    CHECK(t.status == TrackStatus::tentative);
  }
}

TEST_CASE("stationary detection matches and confirms") {
  TrackerConfig cfg;
  cfg.min_hits = 3;
  Tracker tracker(cfg);
  tracker.step({det_at(100, 100)});
  for (int i = 0; i < 2; ++i) {
    const FrameEvents events = tracker.step({det_at(100, 100)});
    CHECK(events.matches.size() == 1);
  }
  REQUIRE(tracker.tracks().size() == 1);
  CHECK(tracker.tracks()[0].status == TrackStatus::confirmed);
  CHECK(tracker.tracks()[0].hits == 3);
}

TEST_CASE("missed tracks retire after max_misses") {
  TrackerConfig cfg;
  cfg.min_hits = 1;
  cfg.max_misses = 3;
  Tracker tracker(cfg);
  tracker.step({det_at(100, 100)});
  FrameEvents last;
  for (int i = 0; i < 4; ++i) {
    last = tracker.step({});
  }
  CHECK(tracker.tracks().empty());
  CHECK(last.died.size() == 1);
}

TEST_CASE("track ids strictly increase and never coexist") {
  TrackerConfig cfg;
  cfg.min_hits = 1;
  cfg.max_misses = 1;
  Tracker tracker(cfg);
  int max_seen = 0;
  for (int frame = 0; frame < 20; ++frame) {
    // Alternate detections so tracks die and new ones spawn.
    std::vector<Detection> dets;
    if (frame % 3 != 2) {
      dets.push_back(det_at(100 + 5 * frame, 100));
      dets.push_back(det_at(100 + 5 * frame, 600));
    }
    tracker.step(dets);
    std::set<int> live;
    for (const Track& t : tracker.tracks()) {
      CHECK(live.insert(t.id).second);  // no duplicate ids among live tracks
      CHECK(t.id >= max_seen - 1);
      max_seen = std::max(max_seen, t.id);
    }
  }
}

TEST_CASE("fused and iou-only agree on well-separated targets") {
  TrajectoryScenario scenario;
  scenario.seed = 11;
  scenario.frame_count = 120;
  scenario.detection_noise_sigma = 0.0;
  scenario.dropout_probability = 0.0;
  scenario.vehicles.push_back({0, 100, 100, 6, 0, 80, 56, {}});
  scenario.vehicles.push_back({0, 100, 400, 8, 0, 80, 56, {}});
  scenario.vehicles.push_back({0, 100, 700, 5, 0, 80, 56, {}});
  const TrajectoryData data = generate_trajectories(scenario);

  TrackerConfig fused_cfg;
  fused_cfg.mode = CostMode::fused;
  TrackerConfig iou_cfg;
  iou_cfg.mode = CostMode::iou_only;
  Tracker fused(fused_cfg), iou(iou_cfg);

  std::vector<TrackRecord> fused_records, iou_records;
  for (std::size_t f = 1; f < data.detections.size(); ++f) {
    fused.step(data.detections[f]);
    iou.step(data.detections[f]);
    const auto fr = confirmed_records(fused, static_cast<long>(f));
    const auto ir = confirmed_records(iou, static_cast<long>(f));
    fused_records.insert(fused_records.end(), fr.begin(), fr.end());
    iou_records.insert(iou_records.end(), ir.begin(), ir.end());
  }
  REQUIRE(fused_records.size() == iou_records.size());
  for (std::size_t i = 0; i < fused_records.size(); ++i) {
    CHECK(fused_records[i].track_id == iou_records[i].track_id);
    CHECK(fused_records[i].cx == doctest::Approx(iou_records[i].cx));
  }
}

TEST_CASE("fused mode preserves identities through a crossing occlusion") {
  const TrajectoryScenario scenario = TrajectoryScenario::crossing_pair(3);
  const TrajectoryData data = generate_trajectories(scenario);

  TrackerConfig cfg;
  cfg.mode = CostMode::fused;
  Tracker tracker(cfg);
  std::vector<TrackRecord> records;
  for (std::size_t f = 1; f < data.detections.size(); ++f) {
    tracker.step(data.detections[f]);
    const auto r = confirmed_records(tracker, static_cast<long>(f));
    records.insert(records.end(), r.begin(), r.end());
  }
  const TrackingMetrics metrics = evaluate_tracking(data.ground_truth, records);
  CHECK(metrics.id_switches == 0);
  CHECK(metrics.mota > 0.9);
}

TEST_CASE("tracker without embeddings degrades to motion-only") {
  TrackerConfig cfg;
  cfg.mode = CostMode::fused;
  cfg.min_hits = 1;
  Tracker tracker(cfg);
  tracker.step({det_at(100, 100)});
  const FrameEvents events = tracker.step({det_at(102, 100)});
  CHECK(events.matches.size() == 1);  // motion-only cost still matches
}
