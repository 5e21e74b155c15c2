#include "roadflow/scenario.hpp"

#include <algorithm>
#include <cmath>

#include "roadflow/errors.hpp"
#include "roadflow/rng.hpp"

namespace roadflow {

namespace {

Eigen::VectorXd identity_embedding(std::uint64_t seed, int vehicle,
                                   int dimension) {
  Rng rng = Rng::for_stream(seed, "embedding-identity",
                            static_cast<std::uint64_t>(vehicle));
  Eigen::VectorXd e(dimension);
  for (int i = 0; i < dimension; ++i) {
    e(i) = rng.normal();
  }
  e.normalize();
  return e;
}

}  // namespace

TrajectoryScenario TrajectoryScenario::crossing_pair(std::uint64_t seed) {
  TrajectoryScenario s;
  s.seed = seed;
  s.frame_count = 260;
  s.lane_y = {500.0, 540.0};
  // Slow vehicle ahead, fast one overtakes at frame (400 - 80) / 3 ~ 107.
  s.vehicles.push_back({0, 400.0, 500.0, 6.0, 0.0, 80.0, 56.0, {}});
  s.vehicles.push_back({0, 80.0, 540.0, 9.0, 0.0, 80.0, 56.0, {}});
  const int pass = 107;
  s.occlusions.push_back({0, 1, pass - 2, pass + 2});
  return s;
}

TrajectoryScenario TrajectoryScenario::occlusion_benchmark(int n_vehicles,
                                                           int n_pairs,
                                                           std::uint64_t seed) {
  if (n_vehicles < 2 * n_pairs) {
    throw ConfigError("occlusion_benchmark: need two vehicles per pair");
  }
  TrajectoryScenario s;
  s.seed = seed;
  s.frame_count = 400;
  s.detection_noise_sigma = 0.6;
  s.embedding_noise_sigma = 0.03;

  Rng rng = Rng::for_stream(seed, "benchmark-layout");
  // Each pair drives in one lane: the rear vehicle closes in, the detector
  // loses both boxes for five frames around the pass, and the two converge
  // to a common platoon speed while hidden. A motion-only matcher sees each
  // coasting prediction land nearer the other vehicle's reappearance.
  double lane = 80.0;
  for (int p = 0; p < n_pairs; ++p) {
    s.lane_y.push_back(lane);

    const double v_front = rng.uniform(4.6, 5.4);
    const double v_rear = v_front + rng.uniform(3.6, 4.4);
    const double v_platoon = 0.5 * (v_front + v_rear);
    const int pass_frame = static_cast<int>(rng.uniform(150.0, 260.0));
    const double x_pass = rng.uniform(700.0, 1100.0);
    const int hide_from = pass_frame - 2;
    const int hide_to = pass_frame + 2;

    VehicleProfile front{0, x_pass - v_front * pass_frame, lane, v_front,
                         0.0, 80.0, 56.0, {}};
    front.changes.push_back({hide_from, v_platoon, 0.0});
    front.changes.push_back({hide_to + 12, v_rear, 0.0});  // pulls away ahead
    VehicleProfile rear{0, x_pass - v_rear * pass_frame, lane, v_rear, 0.0,
                        80.0, 56.0, {}};
    rear.changes.push_back({hide_from, v_platoon, 0.0});
    rear.changes.push_back({hide_to + 12, v_front, 0.0});

    const int front_idx = static_cast<int>(s.vehicles.size());
    s.vehicles.push_back(front);
    s.vehicles.push_back(rear);
    s.occlusions.push_back({front_idx, front_idx + 1, hide_from, hide_to});
    s.occlusions.push_back({front_idx + 1, front_idx, hide_from, hide_to});
    lane += 110.0;
  }
  // Background traffic in their own lanes, never interacting.
  for (int v = 2 * n_pairs; v < n_vehicles; ++v) {
    lane += 90.0;
    s.lane_y.push_back(lane);
    const double speed = rng.uniform(4.0, 8.0);
    const double x0 = rng.uniform(-400.0, 300.0);
    s.vehicles.push_back({0, x0, lane, speed, 0.0, 80.0, 56.0, {}});
  }
  return s;
}

TrajectoryData generate_trajectories(const TrajectoryScenario& scenario) {
  TrajectoryData data;
  data.detections.resize(static_cast<std::size_t>(scenario.frame_count) + 1);

  std::vector<Eigen::VectorXd> identities;
  identities.reserve(scenario.vehicles.size());
  for (std::size_t v = 0; v < scenario.vehicles.size(); ++v) {
    identities.push_back(identity_embedding(scenario.seed, static_cast<int>(v),
                                            scenario.embedding_dim));
  }

  // Integrate each vehicle's piecewise-constant speed profile.
  std::vector<std::vector<std::pair<double, double>>> positions(
      scenario.vehicles.size());
  for (std::size_t v = 0; v < scenario.vehicles.size(); ++v) {
    const VehicleProfile& veh = scenario.vehicles[v];
    auto& track = positions[v];
    track.resize(static_cast<std::size_t>(scenario.frame_count) + 1,
                 {veh.x0, veh.y0});
    double x = veh.x0, y = veh.y0;
    double vx = veh.vx, vy = veh.vy;
    std::size_t next_change = 0;
    for (int frame = veh.enter_frame; frame <= scenario.frame_count; ++frame) {
      // A change at frame c affects the steps leaving c, not the arrival.
      while (next_change < veh.changes.size() &&
             veh.changes[next_change].frame < frame) {
        vx = veh.changes[next_change].vx;
        vy = veh.changes[next_change].vy;
        ++next_change;
      }
      if (frame >= 0 && frame > veh.enter_frame) {
        x += vx;
        y += vy;
      }
      if (frame >= 0) {
        track[static_cast<std::size_t>(frame)] = {x, y};
      }
    }
  }

  Rng noise = Rng::for_stream(scenario.seed, "detection-noise");
  for (int frame = 1; frame <= scenario.frame_count; ++frame) {
    for (std::size_t v = 0; v < scenario.vehicles.size(); ++v) {
      const VehicleProfile& veh = scenario.vehicles[v];
      if (frame < veh.enter_frame) {
        continue;
      }
      const auto [cx, cy] = positions[v][static_cast<std::size_t>(frame)];
      if (cx < 0.0 || cx > scenario.image_w || cy < 0.0 ||
          cy > scenario.image_h) {
        continue;
      }

      TrackRecord gt;
      gt.frame = frame;
      gt.track_id = static_cast<int>(v);
      gt.cx = cx;
      gt.cy = cy;
      gt.w = veh.w;
      gt.h = veh.h;
      data.ground_truth.push_back(gt);

      const bool occluded = std::any_of(
          scenario.occlusions.begin(), scenario.occlusions.end(),
          [&](const OcclusionWindow& o) {
            return o.hidden == static_cast<int>(v) && frame >= o.start_frame &&
                   frame <= o.end_frame;
          });
      if (occluded) {
        continue;
      }
      // Draws happen for every candidate detection regardless of dropout so
      // toggling dropout does not shift later draws within the frame.
      const bool dropped = noise.bernoulli(scenario.dropout_probability);
      const double nx = noise.normal(0.0, 1.0);
      const double ny = noise.normal(0.0, 1.0);
      const double nw = noise.normal(0.0, 1.0);
      const double nh = noise.normal(0.0, 1.0);
      if (dropped) {
        continue;
      }

      Detection det;
      det.box.cx = cx + scenario.detection_noise_sigma * nx;
      det.box.cy = cy + scenario.detection_noise_sigma * ny;
      det.box.w =
          std::max(4.0, veh.w + scenario.detection_noise_sigma * nw);
      det.box.h =
          std::max(4.0, veh.h + scenario.detection_noise_sigma * nh);
      det.box.confidence = 0.9;

      Eigen::VectorXd e = identities[v];
      if (scenario.embedding_noise_sigma > 0.0) {
        for (int i = 0; i < e.size(); ++i) {
          e(i) += noise.normal(0.0, scenario.embedding_noise_sigma);
        }
        e.normalize();
      }
      det.embedding = std::move(e);
      data.detections[static_cast<std::size_t>(frame)].push_back(
          std::move(det));
    }
  }
  return data;
}

// ---------------------------------------------------------------------------

CongestionScenario CongestionScenario::training_set(double duration_minutes,
                                                    std::uint64_t seed) {
  CongestionScenario s;
  s.seed = seed;
  s.duration_minutes = duration_minutes;
  // One event every ~80 minutes: a 30-minute precursor ramp feeding a
  // 32-minute plateau leaves roughly 35-40% of windows labelled positive.
  double onset = 45.0;
  while (onset + s.hold_minutes + s.clear_minutes + s.recover_minutes + 5.0 <
         duration_minutes) {
    s.events.push_back({onset, 30.0, 60.0});
    onset += 80.0;
  }
  return s;
}

CongestionScenario CongestionScenario::diagram_demo(std::uint64_t seed) {
  CongestionScenario s;
  s.seed = seed;
  s.duration_minutes = 60.0;
  s.base_density = 12.0;
  s.base_density_end = 7.0;
  s.flow_noise_sigma = 0.0;
  s.density_noise_sigma = 0.0;
  s.speed_noise_sigma = 0.0;
  return s;
}

void CongestionScenario::validate() const {
  if (duration_minutes <= 0.0 || base_density <= 0.0) {
    throw ConfigError("CongestionScenario: duration and base density must be "
                      "positive");
  }
  double previous_end = -1e9;
  for (const CongestionEvent& e : events) {
    const double begin = e.onset_minute - e.ramp_minutes;
    if (begin < 0.0) {
      throw ConfigError("CongestionScenario: event ramp starts before 0");
    }
    if (begin < previous_end) {
      throw ConfigError("CongestionScenario: events overlap");
    }
    previous_end =
        e.onset_minute + hold_minutes + clear_minutes + recover_minutes;
  }
}

double CongestionScenario::density_at(double minute) const {
  const double drift =
      duration_minutes > 0.0
          ? base_density +
                (base_density_end - base_density) * (minute / duration_minutes)
          : base_density;
  for (const CongestionEvent& e : events) {
    const double ramp_start = e.onset_minute - e.ramp_minutes;
    const double hold_end = e.onset_minute + hold_minutes;
    const double clear_end = hold_end + clear_minutes;
    const double recover_end = clear_end + recover_minutes;
    if (minute < ramp_start || minute >= recover_end) {
      continue;
    }
    if (minute < e.onset_minute) {
      const double u = (minute - ramp_start) / e.ramp_minutes;
      const double level = precursor_jump_fraction +
                           (1.0 - precursor_jump_fraction) * u;
      return drift + (precursor_density - drift) * level;
    }
    if (minute < hold_end) {
      return e.severity_density;
    }
    if (minute < clear_end) {
      const double u = (minute - hold_end) / clear_minutes;
      return e.severity_density + (clear_density - e.severity_density) * u;
    }
    const double u = (minute - clear_end) / recover_minutes;
    return clear_density + (drift - clear_density) * u;
  }
  return drift;
}

ParameterData generate_parameter_series(const CongestionScenario& scenario,
                                        const SpeedModelParams& speed_params,
                                        const CongestionConfig& congestion_cfg) {
  scenario.validate();
  const long n = static_cast<long>(scenario.duration_minutes * 60.0);
  Rng noise = Rng::for_stream(scenario.seed, "parameter-noise");

  ParameterData data;
  data.series.reserve(static_cast<std::size_t>(n));
  std::vector<double> rho_clean(static_cast<std::size_t>(n));

  SpeedModelParams greenberg = speed_params;
  greenberg.model = SpeedModel::greenberg;

  for (long i = 0; i < n; ++i) {
    const double minute = static_cast<double>(i) / 60.0;
    const double k_clean = scenario.density_at(minute);
    const double v_clean = greenberg_speed(k_clean, greenberg);
    const double q_clean = k_clean * v_clean / 3600.0;  // vehicles/second
    rho_clean[static_cast<std::size_t>(i)] =
        congestion_index(k_clean, v_clean, congestion_cfg);

    ParameterSample sample;
    sample.frame = i * 25;  // one sample every 25 frames at 25 fps
    sample.density = std::clamp(
        k_clean + noise.normal(0.0, scenario.density_noise_sigma), 0.1,
        greenberg.k_j - 1.0);
    sample.speed =
        std::max(0.1, v_clean + noise.normal(0.0, scenario.speed_noise_sigma));
    sample.flow =
        std::max(0.0, q_clean + noise.normal(0.0, scenario.flow_noise_sigma));
    data.series.push_back(sample);
  }

  data.episodes = sustained_congestion(rho_clean, congestion_cfg, 60.0);
  data.labels.assign(static_cast<std::size_t>(n), 0);
  for (const CongestionEpisode& ep : data.episodes) {
    for (long i = ep.start; i < ep.end; ++i) {
      data.labels[static_cast<std::size_t>(i)] = 1;
    }
  }
  return data;
}

}  // namespace roadflow
