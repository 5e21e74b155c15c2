#include <doctest.h>

#include <sstream>

#include "roadflow/errors.hpp"
#include "roadflow/mot_metrics.hpp"
#include "roadflow/scenario.hpp"
#include "test_support.hpp"

using namespace roadflow;

namespace {

std::string serialize(const TrajectoryData& data) {
  std::ostringstream out;
  for (const TrackRecord& r : data.ground_truth) {
    out << r.frame << ' ' << r.track_id << ' ' << r.cx << ' ' << r.cy << '\n';
  }
  for (const auto& frame : data.detections) {
    for (const Detection& d : frame) {
      out << d.box.cx << ' ' << d.box.cy << ' ' << d.box.w << ' ';
      if (d.embedding.has_value()) {
        out << d.embedding->sum();
      }
      out << '\n';
    }
  }
  return out.str();
}

std::string serialize(const ParameterData& data) {
  std::ostringstream out;
  for (const ParameterSample& s : data.series) {
    out << s.frame << ' ' << s.flow << ' ' << s.density << ' ' << s.speed
        << '\n';
  }
  for (const std::uint8_t l : data.labels) {
    out << static_cast<int>(l);
  }
  return out.str();
}

TrajectoryScenario parallel_traffic(std::uint64_t seed) {
  TrajectoryScenario s;
  s.seed = seed;
  s.frame_count = 200;
  s.detection_noise_sigma = 0.0;
  s.dropout_probability = 0.0;
  for (int v = 0; v < 6; ++v) {
    s.vehicles.push_back({0, 50.0 + 30.0 * v, 100.0 + 120.0 * v,
                          5.0 + 0.7 * v, 0.0, 80.0, 56.0, {}});
  }
  return s;
}

}  // namespace

TEST_CASE("trajectory generation is deterministic under the seed") {
  TrajectoryScenario s = TrajectoryScenario::occlusion_benchmark(10, 3, 77);
  s.detection_noise_sigma = 1.0;
  s.dropout_probability = 0.1;
  const std::string a = serialize(generate_trajectories(s));
  const std::string b = serialize(generate_trajectories(s));
  CHECK(a == b);
  s.seed = 78;
  CHECK(serialize(generate_trajectories(s)) != a);
}

TEST_CASE("zero noise and no occlusion reproduce ground truth boxes") {
  const TrajectoryScenario s = parallel_traffic(5);
  const TrajectoryData data = generate_trajectories(s);
  std::size_t detection_count = 0;
  for (const auto& frame : data.detections) {
    detection_count += frame.size();
  }
  CHECK(detection_count == data.ground_truth.size());

  std::size_t i = 0;
  for (long frame = 1; frame < static_cast<long>(data.detections.size());
       ++frame) {
    for (const Detection& d : data.detections[static_cast<std::size_t>(frame)]) {
      const TrackRecord& gt = data.ground_truth[i++];
      CHECK(gt.frame == frame);
      CHECK(d.box.cx == gt.cx);
      CHECK(d.box.cy == gt.cy);
      CHECK(d.box.w == gt.w);
    }
  }
}

TEST_CASE("full dropout keeps ground truth but no detections") {
  TrajectoryScenario s = parallel_traffic(6);
  s.dropout_probability = 1.0;
  const TrajectoryData data = generate_trajectories(s);
  CHECK(!data.ground_truth.empty());
  for (const auto& frame : data.detections) {
    CHECK(frame.empty());
  }
}

TEST_CASE("embeddings are unit norm and identity-correlated") {
  TrajectoryScenario s = parallel_traffic(7);
  s.embedding_noise_sigma = 0.05;
  const TrajectoryData data = generate_trajectories(s);
  // Collect one embedding per vehicle from two different frames.
  const auto& f10 = data.detections[10];
  const auto& f50 = data.detections[50];
  REQUIRE(f10.size() == 6);
  REQUIRE(f50.size() == 6);
  for (std::size_t v = 0; v < 6; ++v) {
    CHECK(f10[v].embedding->norm() == doctest::Approx(1.0).epsilon(1e-9));
    const double same = f10[v].embedding->dot(*f50[v].embedding);
    CHECK(same > 0.6);  // same identity stays aligned
    const double other = f10[v].embedding->dot(*f50[(v + 1) % 6].embedding);
    CHECK(other < 0.4);
  }
}

TEST_CASE("clean detections track perfectly") {
  const TrajectoryScenario s = parallel_traffic(8);
  const TrajectoryData data = generate_trajectories(s);

  TrackerConfig cfg;
  cfg.min_hits = 1;  // emit from the first frame so no ground truth is missed
  Tracker tracker(cfg);
  std::vector<TrackRecord> records;
  for (std::size_t f = 1; f < data.detections.size(); ++f) {
    tracker.step(data.detections[f]);
    for (const Track& t : tracker.tracks()) {
      if (t.status == TrackStatus::confirmed) {
        const BoundingBox b = t.box();
        records.push_back({static_cast<long>(f), t.id, b.cx, b.cy, b.w, b.h,
                           "confirmed"});
      }
    }
  }
  const TrackingMetrics m = evaluate_tracking(data.ground_truth, records);
  CHECK(m.mota == doctest::Approx(1.0));
  CHECK(m.id_switches == 0);
}

TEST_CASE("parameter series generation is deterministic and labelled") {
  CongestionScenario s = CongestionScenario::training_set(160.0, 42);
  const SpeedModelParams speed;
  const CongestionConfig congestion;
  const ParameterData a = generate_parameter_series(s, speed, congestion);
  const ParameterData b = generate_parameter_series(s, speed, congestion);
  CHECK(serialize(a) == serialize(b));

  CHECK(a.series.size() == 160 * 60);
  CHECK(a.labels.size() == a.series.size());
  REQUIRE(!a.episodes.empty());
  // Labels mark exactly the episode spans.
  for (const CongestionEpisode& ep : a.episodes) {
    CHECK(a.labels[static_cast<std::size_t>(ep.start)] == 1);
    CHECK(a.labels[static_cast<std::size_t>(ep.end) - 1] == 1);
    if (ep.start > 0) {
      CHECK(a.labels[static_cast<std::size_t>(ep.start) - 1] == 0);
    }
  }
}

TEST_CASE("event-free scenarios carry no labels") {
  CongestionScenario s = CongestionScenario::diagram_demo(1);
  const ParameterData data =
      generate_parameter_series(s, SpeedModelParams{}, CongestionConfig{});
  CHECK(data.episodes.empty());
  for (const std::uint8_t l : data.labels) {
    CHECK(l == 0);
  }
}

TEST_CASE("one sustained event produces exactly one labelled episode") {
  CongestionScenario s;
  s.duration_minutes = 150.0;
  s.seed = 9;
  s.events.push_back({60.0, 30.0, 60.0});
  const ParameterData data =
      generate_parameter_series(s, SpeedModelParams{}, CongestionConfig{});
  REQUIRE(data.episodes.size() == 1);
  // Onset lands at the severity surge, within a minute of the nominal time.
  CHECK(std::abs(data.episodes[0].start / 60.0 - 60.0) < 1.0);
}

TEST_CASE("noiseless series respects the fundamental diagram") {
  CongestionScenario s = CongestionScenario::diagram_demo(11);
  const ParameterData data =
      generate_parameter_series(s, SpeedModelParams{}, CongestionConfig{});
  std::vector<double> ks, vs;
  for (const ParameterSample& p : data.series) {
    ks.push_back(p.density);
    vs.push_back(p.speed);
  }
  CHECK(test_support::pearson(ks, vs) <= -0.95);
  // Flow follows q = k v within rounding.
  for (std::size_t i = 0; i < data.series.size(); i += 500) {
    const ParameterSample& p = data.series[i];
    CHECK(p.flow ==
          doctest::Approx(p.density * p.speed / 3600.0).epsilon(1e-9));
  }
}

TEST_CASE("density stays within the physical band under noise") {
  CongestionScenario s = CongestionScenario::training_set(160.0, 13);
  s.density_noise_sigma = 5.0;
  const ParameterData data =
      generate_parameter_series(s, SpeedModelParams{}, CongestionConfig{});
  for (const ParameterSample& p : data.series) {
    CHECK(p.density > 0.0);
    CHECK(p.density < 180.0);
    CHECK(p.speed > 0.0);
    CHECK(p.flow >= 0.0);
  }
}

TEST_CASE("overlapping events are rejected") {
  CongestionScenario s;
  s.duration_minutes = 200.0;
  s.events.push_back({60.0, 30.0, 60.0});
  s.events.push_back({80.0, 30.0, 60.0});
  CHECK_THROWS_AS(s.validate(), ConfigError);
}
