#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "roadflow/congestion.hpp"
#include "roadflow/flow_params.hpp"
#include "roadflow/preprocess.hpp"
#include "roadflow/scenario.hpp"
#include "roadflow/tracker.hpp"

namespace roadflow {

enum class SplitRole { train, test };

/// One camera: its counting lines, density region and dataset role.
struct ObservationPoint {
  std::string id;
  SplitRole split = SplitRole::train;
  DetectionLinePair detection_lines;
  /// Image region whose confirmed tracks count toward density.
  double region_x1 = 0.0, region_y1 = 0.0;
  double region_x2 = 1920.0, region_y2 = 1080.0;
  double pixels_per_meter = 12.0;  // diagnostic speed estimator only
};

struct Segment {
  std::string upstream;
  std::string downstream;
  double length_km = 1.0;
  int lanes = 2;
};

enum class FlowUnit { per_second, per_minute };

struct FlowConfig {
  double window_seconds = 60.0;
  FlowUnit unit = FlowUnit::per_second;
};

struct WindowingConfig {
  int seq_len = 10;
  double horizon_minutes = 30.0;
};

struct TrainStageConfig {
  int epochs = 300;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;
  int early_stop_patience = 10;
  int hidden_dim = 64;
  int attention_dim = 32;
  /// Chronological tail of each training point's windows used for
  /// validation.
  double val_fraction = 0.3;
  /// Keep every n-th training window (1 = all); evaluation always runs on
  /// the full window set.
  int window_stride = 1;
  std::vector<std::string> models = {"gru", "gru_attention", "logistic"};
};

struct ScenarioConfig {
  int trajectory_vehicles = 20;
  int trajectory_pairs = 6;
  double congestion_duration_minutes = 160.0;
  /// Minutes between episode onsets in generated series.
  double event_spacing_minutes = 80.0;
  double first_onset_minute = 45.0;
  double ramp_minutes = 30.0;
  double severity_density = 60.0;
};

/// Everything one run needs: site topology, stage parameters and the root
/// seed. Parsed from a JSON document; every violated invariant reports its
/// field path.
struct SiteConfig {
  std::uint64_t seed = 42;
  int fps = 25;
  FlowConfig flow;
  SpeedModelParams speed_model;
  CongestionConfig congestion;
  CleanBounds clean;
  WindowingConfig windowing;
  TrackerConfig tracker;
  TrainStageConfig train;
  ScenarioConfig scenario;
  std::vector<ObservationPoint> observation_points;
  std::vector<Segment> segments;

  /// The four-point synthetic layout used by the demos and tests: three
  /// training points, one test point, a 3 km segment ahead of the test
  /// point, and clean bounds wide enough for congested-speed series.
  static SiteConfig synthetic_demo();

  std::string to_json() const;
  static SiteConfig from_json(const std::string& text);
  static SiteConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// Throws ConfigError with a field path on the first violated invariant.
  void validate() const;

  const ObservationPoint* find_point(const std::string& id) const;
  /// Segment whose upstream is the given point, if any.
  const Segment* segment_from(const std::string& point_id) const;
  /// Segment ending at the given point, if any.
  const Segment* segment_to(const std::string& point_id) const;
};

}  // namespace roadflow
