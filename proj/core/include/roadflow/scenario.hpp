#pragma once

#include <cstdint>
#include <vector>

#include "roadflow/congestion.hpp"
#include "roadflow/flow_params.hpp"
#include "roadflow/records.hpp"
#include "roadflow/tracker.hpp"

namespace roadflow {

// ---------------------------------------------------------------------------
// Trajectory scenarios: per-frame detections with exact ground truth, for
// tracker evaluation. Stands in for the unavailable camera footage.
// ---------------------------------------------------------------------------

/// Velocity change taking effect at the given frame.
struct SpeedChange {
  int frame = 0;
  double vx = 0.0;
  double vy = 0.0;
};

struct VehicleProfile {
  int enter_frame = 0;
  double x0 = 0.0;
  double y0 = 0.0;
  double vx = 0.0;  // px/frame
  double vy = 0.0;
  double w = 80.0;
  double h = 56.0;
  /// Piecewise-constant speed profile, sorted by frame.
  std::vector<SpeedChange> changes;
};

/// Detections of vehicle `hidden` are suppressed while `by` passes in front.
struct OcclusionWindow {
  int hidden = 0;  // vehicle index
  int by = 0;
  int start_frame = 0;
  int end_frame = 0;  // inclusive
};

struct TrajectoryScenario {
  int frame_count = 500;
  int fps = 25;
  double image_w = 1920.0;
  double image_h = 1080.0;
  std::vector<double> lane_y;
  std::vector<VehicleProfile> vehicles;
  std::vector<OcclusionWindow> occlusions;
  double detection_noise_sigma = 0.0;  // px, on box center and size
  double dropout_probability = 0.0;
  double embedding_noise_sigma = 0.05;
  int embedding_dim = 128;
  std::uint64_t seed = 0;

  /// Two vehicles in adjacent lanes, the faster one overtaking through a
  /// 5-frame occlusion of the slower one.
  static TrajectoryScenario crossing_pair(std::uint64_t seed);

  /// The tracking benchmark: n_pairs overtakes with occlusions plus
  /// well-separated background traffic (2 vehicles per pair_count pairs +
  /// singles up to n_vehicles).
  static TrajectoryScenario occlusion_benchmark(int n_vehicles, int n_pairs,
                                                std::uint64_t seed);
};

struct TrajectoryData {
  std::vector<TrackRecord> ground_truth;
  /// detections[f] holds frame f's detections (frame numbers start at 1 to
  /// match the tracker's frame counter).
  std::vector<std::vector<Detection>> detections;
};

TrajectoryData generate_trajectories(const TrajectoryScenario& scenario);

// ---------------------------------------------------------------------------
// Congestion scenarios: hour-scale parameter series whose speed follows the
// Greenberg relation, with labelled sustained-congestion episodes.
// ---------------------------------------------------------------------------

struct CongestionEvent {
  double onset_minute = 60.0;
  double ramp_minutes = 30.0;      // precursor build-up before onset
  double severity_density = 60.0;  // vehicles/km during the episode
};

struct CongestionScenario {
  double duration_minutes = 240.0;
  double base_density = 8.0;       // vehicles/km between events
  double base_density_end = 8.0;   // linear drift target (diagram demos)
  double precursor_density = 45.0; // sub-critical level the ramp builds to
  double precursor_jump_fraction = 0.3;
  double hold_minutes = 32.0;      // severity plateau, keeps episodes >= 30 min
  double clear_minutes = 1.0;      // fast drop after the plateau
  double clear_density = 6.0;      // brief under-shoot while the jam drains
  double recover_minutes = 5.0;
  std::vector<CongestionEvent> events;
  double flow_noise_sigma = 0.05;
  double density_noise_sigma = 0.5;
  double speed_noise_sigma = 1.0;
  std::uint64_t seed = 0;

  /// Event cadence tuned for 30-50% positive windows with a 30-minute
  /// horizon.
  static CongestionScenario training_set(double duration_minutes,
                                         std::uint64_t seed);

  /// No events, density drifting 12 -> 7 vehicles/km: the fundamental-diagram
  /// demo series.
  static CongestionScenario diagram_demo(std::uint64_t seed);

  /// Noiseless density level at a given minute.
  double density_at(double minute) const;

  void validate() const;  // throws ConfigError on overlapping events etc.
};

struct ParameterData {
  std::vector<ParameterSample> series;
  /// 1 for samples inside a sustained-congestion episode of the noiseless
  /// rho series.
  std::vector<std::uint8_t> labels;
  std::vector<CongestionEpisode> episodes;
};

/// Samples the scenario at 1 Hz. Speed follows greenberg(density) plus noise,
/// flow follows q = k v (converted to vehicles/second); labels come from
/// applying the congestion rules to the noiseless series.
ParameterData generate_parameter_series(const CongestionScenario& scenario,
                                        const SpeedModelParams& speed_params,
                                        const CongestionConfig& congestion_cfg);

}  // namespace roadflow
