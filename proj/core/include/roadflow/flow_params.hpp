#pragma once

#include <string>
#include <vector>

#include "roadflow/records.hpp"

namespace roadflow {

struct Line {
  double x1 = 0.0, y1 = 0.0;
  double x2 = 0.0, y2 = 0.0;
};

/// Two parallel virtual detection lines, nominally 50 pixels apart. A vehicle
/// is counted once per pass: it must change side of line a and then of line b
/// within max_gap_frames.
struct DetectionLinePair {
  Line a;
  Line b;
  int max_gap_frames = 100;

  void validate() const;  // throws ConfigError
};

struct SegmentGeometry {
  double length_km = 1.0;
  int lanes = 2;
  std::string upstream_point;
  std::string downstream_point;
};

enum class SpeedModel { greenshields, greenberg, automatic };

struct SpeedModelParams {
  SpeedModel model = SpeedModel::automatic;
  double v_f = 35.0;   // km/h
  double k_j = 180.0;  // vehicles/km
  /// Densities at or above this use Greenberg when model selection is
  /// automatic.
  double density_switch_threshold = 10.0;
};

/// Signed 2D cross product of (line direction) x (line start -> point).
/// Positive on one side, negative on the other, zero on the line.
double side_of_line(double x, double y, const Line& line);

struct CrossingEvent {
  long frame = 0;
  int track_id = 0;
  int direction = 0;  // sign of the side change at line a
};

/// Scans one track's frame-ordered centroids for full passes over the line
/// pair. Oscillation across a single line never counts.
std::vector<CrossingEvent> detect_crossings(
    const std::vector<TrackRecord>& track_positions,
    const DetectionLinePair& lines);

/// Convenience: runs detect_crossings per track id over a mixed record set
/// and returns all events sorted by frame.
std::vector<CrossingEvent> detect_crossings_all(
    const std::vector<TrackRecord>& records, const DetectionLinePair& lines);

/// Event counts per tumbling window of window_frames, covering
/// [0, total_frames).
std::vector<int> flow_series(const std::vector<CrossingEvent>& events,
                             long window_frames, long total_frames);

/// vehicles per km: count / segment length.
double density(int vehicle_count, const SegmentGeometry& segment);

/// v_f (1 - k / k_j); densities above k_j clamp to zero.
double greenshields_speed(double k, const SpeedModelParams& p);

/// v_f ln(k_j / k). Throws DataError for k <= 0.
double greenberg_speed(double k, const SpeedModelParams& p);

/// Greenberg at or above the density switch threshold, Greenshields below.
SpeedModel select_speed_model(double k, const SpeedModelParams& p);

/// Model-based speed with the spec'd fallbacks: k <= 0 -> free flow (v_f of
/// the selected model at zero density), k > k_j -> 0.
double model_speed(double k, const SpeedModelParams& p);

/// Diagnostic cross-check only: mean per-frame centroid displacement of the
/// given records converted to km/h through the camera's scale factor. The
/// headline pipeline uses model_speed.
double displacement_speed_kmh(const std::vector<TrackRecord>& records,
                              double fps, double pixels_per_meter);

}  // namespace roadflow
