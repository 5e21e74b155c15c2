#include "roadflow/flow_params.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "roadflow/errors.hpp"

namespace roadflow {

namespace {

bool segments_intersect(const Line& p, const Line& q) {
  const auto orient = [](double ax, double ay, double bx, double by,
                         double cx, double cy) {
    const double v = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
  };
  const int o1 = orient(p.x1, p.y1, p.x2, p.y2, q.x1, q.y1);
  const int o2 = orient(p.x1, p.y1, p.x2, p.y2, q.x2, q.y2);
  const int o3 = orient(q.x1, q.y1, q.x2, q.y2, p.x1, p.y1);
  const int o4 = orient(q.x1, q.y1, q.x2, q.y2, p.x2, p.y2);
  return o1 != o2 && o3 != o4 && o1 != 0 && o2 != 0;
}

}  // namespace

void DetectionLinePair::validate() const {
  const auto degenerate = [](const Line& l) {
    return l.x1 == l.x2 && l.y1 == l.y2;
  };
  if (degenerate(a) || degenerate(b)) {
    throw ConfigError("DetectionLinePair: line endpoints must be distinct");
  }
  if (segments_intersect(a, b)) {
    throw ConfigError("DetectionLinePair: lines must not cross inside the "
                      "frame");
  }
  if (max_gap_frames < 1) {
    throw ConfigError("DetectionLinePair: max_gap_frames must be >= 1");
  }
}

double side_of_line(double x, double y, const Line& line) {
  return (line.x2 - line.x1) * (y - line.y1) -
         (line.y2 - line.y1) * (x - line.x1);
}

namespace {

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

/// Tracks the last known nonzero side so a sample exactly on the line does
/// not produce a spurious double crossing.
struct SideTracker {
  int last = 0;

  // Returns -1/+1 when the point moved to the opposite side, 0 otherwise.
  int observe(double value) {
    const int s = sign_of(value);
    if (s == 0) {
      return 0;
    }
    const int crossed = (last != 0 && s != last) ? s : 0;
    last = s;
    return crossed;
  }
};

}  // namespace

std::vector<CrossingEvent> detect_crossings(
    const std::vector<TrackRecord>& track_positions,
    const DetectionLinePair& lines) {
  lines.validate();
  std::vector<CrossingEvent> events;
  SideTracker side_a, side_b;
  bool armed = false;  // saw line a, waiting for line b
  long armed_frame = 0;
  int armed_direction = 0;

  for (const TrackRecord& r : track_positions) {
    const int crossed_a = side_a.observe(side_of_line(r.cx, r.cy, lines.a));
    const int crossed_b = side_b.observe(side_of_line(r.cx, r.cy, lines.b));

    if (crossed_a != 0) {
      armed = true;
      armed_frame = r.frame;
      armed_direction = crossed_a;
    }
    if (crossed_b != 0 && armed) {
      if (r.frame - armed_frame <= lines.max_gap_frames) {
        events.push_back({r.frame, r.track_id, armed_direction});
      }
      armed = false;  // a new pass must cross line a again first
    }
  }
  return events;
}

std::vector<CrossingEvent> detect_crossings_all(
    const std::vector<TrackRecord>& records, const DetectionLinePair& lines) {
  std::map<int, std::vector<TrackRecord>> by_track;
  for (const TrackRecord& r : records) {
    by_track[r.track_id].push_back(r);
  }
  std::vector<CrossingEvent> events;
  for (auto& [id, positions] : by_track) {
    std::stable_sort(positions.begin(), positions.end(),
                     [](const TrackRecord& a, const TrackRecord& b) {
                       return a.frame < b.frame;
                     });
    const auto track_events = detect_crossings(positions, lines);
    events.insert(events.end(), track_events.begin(), track_events.end());
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const CrossingEvent& a, const CrossingEvent& b) {
                     return a.frame < b.frame;
                   });
  return events;
}

std::vector<int> flow_series(const std::vector<CrossingEvent>& events,
                             long window_frames, long total_frames) {
  if (window_frames < 1) {
    throw ConfigError("flow_series: window_frames must be >= 1");
  }
  const long windows = total_frames <= 0
                           ? 0
                           : (total_frames + window_frames - 1) / window_frames;
  std::vector<int> counts(static_cast<std::size_t>(windows), 0);
  for (const CrossingEvent& e : events) {
    if (e.frame < 0 || e.frame >= total_frames) {
      continue;
    }
    counts[static_cast<std::size_t>(e.frame / window_frames)] += 1;
  }
  return counts;
}

double density(int vehicle_count, const SegmentGeometry& segment) {
  if (segment.length_km <= 0.0) {
    throw ConfigError("density: segment length must be positive");
  }
  return static_cast<double>(vehicle_count) / segment.length_km;
}

double greenshields_speed(double k, const SpeedModelParams& p) {
  if (k > p.k_j) {
    return 0.0;  // beyond jam density; callers may log a data-quality warning
  }
  return p.v_f * (1.0 - k / p.k_j);
}

double greenberg_speed(double k, const SpeedModelParams& p) {
  if (k <= 0.0) {
    throw DataError("greenberg_speed: density must be positive");
  }
  return p.v_f * std::log(p.k_j / k);
}

SpeedModel select_speed_model(double k, const SpeedModelParams& p) {
  return k >= p.density_switch_threshold ? SpeedModel::greenberg
                                         : SpeedModel::greenshields;
}

double model_speed(double k, const SpeedModelParams& p) {
  if (k <= 0.0) {
    return p.v_f;  // free-flow fallback
  }
  if (k > p.k_j) {
    return 0.0;
  }
  const SpeedModel chosen =
      p.model == SpeedModel::automatic ? select_speed_model(k, p) : p.model;
  return chosen == SpeedModel::greenberg ? greenberg_speed(k, p)
                                         : greenshields_speed(k, p);
}

double displacement_speed_kmh(const std::vector<TrackRecord>& records,
                              double fps, double pixels_per_meter) {
  if (fps <= 0.0 || pixels_per_meter <= 0.0) {
    throw ConfigError("displacement_speed_kmh: fps and scale must be positive");
  }
  std::map<int, std::vector<TrackRecord>> by_track;
  for (const TrackRecord& r : records) {
    by_track[r.track_id].push_back(r);
  }
  double px_per_frame_sum = 0.0;
  long pairs = 0;
  for (auto& [id, positions] : by_track) {
    std::stable_sort(positions.begin(), positions.end(),
                     [](const TrackRecord& a, const TrackRecord& b) {
                       return a.frame < b.frame;
                     });
    for (std::size_t i = 1; i < positions.size(); ++i) {
      const long df = positions[i].frame - positions[i - 1].frame;
      if (df <= 0) {
        continue;
      }
      const double dx = positions[i].cx - positions[i - 1].cx;
      const double dy = positions[i].cy - positions[i - 1].cy;
      px_per_frame_sum += std::sqrt(dx * dx + dy * dy) / static_cast<double>(df);
      pairs += 1;
    }
  }
  if (pairs == 0) {
    return 0.0;
  }
  const double px_per_frame = px_per_frame_sum / static_cast<double>(pairs);
  const double meters_per_second = px_per_frame * fps / pixels_per_meter;
  return meters_per_second * 3.6;
}

}  // namespace roadflow
