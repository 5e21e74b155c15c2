#include "roadflow/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "roadflow/errors.hpp"

namespace roadflow {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

template <typename T>
T get_or(const json& obj, const std::string& path, const char* key,
         T fallback) {
  if (!obj.contains(key)) {
    return fallback;
  }
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail(path + "." + key, "has the wrong type");
  }
}

const json& child(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) {
    fail(path, std::string("missing required field '") + key + "'");
  }
  return obj.at(key);
}

Line parse_line(const json& obj, const std::string& path) {
  Line l;
  l.x1 = get_or(obj, path, "x1", 0.0);
  l.y1 = get_or(obj, path, "y1", 0.0);
  l.x2 = get_or(obj, path, "x2", 0.0);
  l.y2 = get_or(obj, path, "y2", 0.0);
  return l;
}

json line_to_json(const Line& l) {
  return {{"x1", l.x1}, {"y1", l.y1}, {"x2", l.x2}, {"y2", l.y2}};
}

}  // namespace

SiteConfig SiteConfig::synthetic_demo() {
  SiteConfig cfg;
  cfg.seed = 42;

  const char* ids[] = {"32.31.250.107", "32.31.250.105", "32.31.250.108",
                       "32.31.250.103"};
  for (int i = 0; i < 4; ++i) {
    ObservationPoint p;
    p.id = ids[i];
    p.split = i == 3 ? SplitRole::test : SplitRole::train;
    p.detection_lines.a = {900.0, 0.0, 900.0, 1080.0};
    p.detection_lines.b = {950.0, 0.0, 950.0, 1080.0};
    cfg.observation_points.push_back(std::move(p));
  }
  cfg.segments.push_back({"32.31.250.107", "32.31.250.105", 1.0, 2});
  cfg.segments.push_back({"32.31.250.105", "32.31.250.108", 1.0, 2});
  cfg.segments.push_back({"32.31.250.108", "32.31.250.103", 3.0, 2});

  // Congested synthetic series carry speeds far below the free-flow band the
  // default 60-140 km/h rule expects, so the demo widens the hard bounds and
  // relies on the sigma rule.
  cfg.clean.speed_min = 0.0;
  cfg.clean.speed_max = 200.0;
  cfg.clean.sigma_k = 4.0;

  cfg.scenario.congestion_duration_minutes = 175.0;
  cfg.train.hidden_dim = 32;
  cfg.train.window_stride = 4;
  cfg.train.epochs = 100;

  // With 30-minute precursors the probability rises a full horizon ahead of
  // onset, so the demo's lead target matches the horizon.
  cfg.congestion.warning_lead_minutes = 30.0;
  cfg.congestion.match_tolerance_minutes = 2.0;
  return cfg;
}

void SiteConfig::validate() const {
  if (fps < 1) {
    fail("fps", "must be >= 1");
  }
  if (flow.window_seconds <= 0.0) {
    fail("flow.window_seconds", "must be positive");
  }
  if (speed_model.v_f <= 0.0) {
    fail("speed_model.v_f", "must be positive");
  }
  if (speed_model.k_j <= 0.0) {
    fail("speed_model.k_j", "must be positive");
  }
  if (congestion.k_c <= 0.0) {
    fail("congestion.k_c", "must be positive");
  }
  if (congestion.v_f_free <= 0.0) {
    fail("congestion.v_f_free", "must be positive");
  }
  if (congestion.sustained_fraction <= 0.0 ||
      congestion.sustained_fraction > 1.0) {
    fail("congestion.sustained_fraction", "must be in (0, 1]");
  }
  if (congestion.sustained_window_minutes <= 0.0) {
    fail("congestion.sustained_window_minutes", "must be positive");
  }
  if (windowing.seq_len < 1) {
    fail("windowing.seq_len", "must be >= 1");
  }
  if (windowing.horizon_minutes <= 0.0) {
    fail("windowing.horizon_minutes", "must be positive");
  }
  if (tracker.lambda < 0.0 || tracker.lambda > 1.0) {
    fail("tracker.lambda", "must be in [0, 1]");
  }
  if (train.val_fraction <= 0.0 || train.val_fraction >= 1.0) {
    fail("train.val_fraction", "must be in (0, 1)");
  }
  if (train.window_stride < 1) {
    fail("train.window_stride", "must be >= 1");
  }
  for (const std::string& m : train.models) {
    if (m != "gru" && m != "gru_attention" && m != "logistic") {
      fail("train.models", "unknown model '" + m + "'");
    }
  }
  if (observation_points.empty()) {
    fail("observation_points", "must not be empty");
  }
  for (std::size_t i = 0; i < observation_points.size(); ++i) {
    const ObservationPoint& p = observation_points[i];
    const std::string path = "observation_points[" + std::to_string(i) + "]";
    if (p.id.empty()) {
      fail(path + ".id", "must not be empty");
    }
    try {
      p.detection_lines.validate();
    } catch (const ConfigError& e) {
      fail(path + ".detection_lines", e.what());
    }
    if (p.pixels_per_meter <= 0.0) {
      fail(path + ".pixels_per_meter", "must be positive");
    }
  }
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const Segment& s = segments[i];
    const std::string path = "segments[" + std::to_string(i) + "]";
    if (s.length_km <= 0.0) {
      fail(path + ".length_km", "must be positive");
    }
    if (s.lanes < 1) {
      fail(path + ".lanes", "must be >= 1");
    }
    if (find_point(s.upstream) == nullptr) {
      fail(path + ".upstream", "references undefined point '" + s.upstream +
                                   "'");
    }
    if (find_point(s.downstream) == nullptr) {
      fail(path + ".downstream", "references undefined point '" +
                                     s.downstream + "'");
    }
  }
}

const ObservationPoint* SiteConfig::find_point(const std::string& id) const {
  for (const ObservationPoint& p : observation_points) {
    if (p.id == id) {
      return &p;
    }
  }
  return nullptr;
}

const Segment* SiteConfig::segment_from(const std::string& point_id) const {
  for (const Segment& s : segments) {
    if (s.upstream == point_id) {
      return &s;
    }
  }
  return nullptr;
}

const Segment* SiteConfig::segment_to(const std::string& point_id) const {
  for (const Segment& s : segments) {
    if (s.downstream == point_id) {
      return &s;
    }
  }
  return nullptr;
}

std::string SiteConfig::to_json() const {
  json doc;
  doc["seed"] = seed;
  doc["fps"] = fps;
  doc["flow"] = {
      {"window_seconds", flow.window_seconds},
      {"unit", flow.unit == FlowUnit::per_second ? "per_second" : "per_minute"},
  };
  const char* model_name = speed_model.model == SpeedModel::automatic
                               ? "auto"
                               : (speed_model.model == SpeedModel::greenberg
                                      ? "greenberg"
                                      : "greenshields");
  doc["speed_model"] = {
      {"model", model_name},
      {"v_f", speed_model.v_f},
      {"k_j", speed_model.k_j},
      {"density_switch_threshold", speed_model.density_switch_threshold},
  };
  doc["congestion"] = {
      {"k_c", congestion.k_c},
      {"v_f_free", congestion.v_f_free},
      {"rho_threshold", congestion.rho_threshold},
      {"sustained_fraction", congestion.sustained_fraction},
      {"sustained_window_minutes", congestion.sustained_window_minutes},
      {"warning_lead_minutes", congestion.warning_lead_minutes},
      {"match_tolerance_minutes", congestion.match_tolerance_minutes},
      {"warning_debounce_samples", congestion.warning_debounce_samples},
  };
  doc["clean"] = {
      {"speed_min", clean.speed_min},
      {"speed_max", clean.speed_max},
      {"sigma_k", clean.sigma_k},
  };
  doc["windowing"] = {
      {"seq_len", windowing.seq_len},
      {"horizon_minutes", windowing.horizon_minutes},
  };
  doc["tracker"] = {
      {"mode", tracker.mode == CostMode::fused ? "fused" : "iou_only"},
      {"lambda", tracker.lambda},
      {"min_hits", tracker.min_hits},
      {"max_misses", tracker.max_misses},
      {"gallery_capacity", tracker.gallery_capacity},
      {"iou_threshold", tracker.iou_threshold},
  };
  doc["train"] = {
      {"epochs", train.epochs},
      {"batch_size", train.batch_size},
      {"learning_rate", train.learning_rate},
      {"weight_decay", train.weight_decay},
      {"early_stop_patience", train.early_stop_patience},
      {"hidden_dim", train.hidden_dim},
      {"attention_dim", train.attention_dim},
      {"val_fraction", train.val_fraction},
      {"window_stride", train.window_stride},
      {"models", train.models},
  };
  doc["scenario"] = {
      {"trajectory_vehicles", scenario.trajectory_vehicles},
      {"trajectory_pairs", scenario.trajectory_pairs},
      {"congestion_duration_minutes", scenario.congestion_duration_minutes},
      {"event_spacing_minutes", scenario.event_spacing_minutes},
      {"first_onset_minute", scenario.first_onset_minute},
      {"ramp_minutes", scenario.ramp_minutes},
      {"severity_density", scenario.severity_density},
  };
  doc["observation_points"] = json::array();
  for (const ObservationPoint& p : observation_points) {
    doc["observation_points"].push_back({
        {"id", p.id},
        {"split", p.split == SplitRole::test ? "test" : "train"},
        {"detection_lines",
         {{"a", line_to_json(p.detection_lines.a)},
          {"b", line_to_json(p.detection_lines.b)},
          {"max_gap_frames", p.detection_lines.max_gap_frames}}},
        {"region",
         {{"x1", p.region_x1},
          {"y1", p.region_y1},
          {"x2", p.region_x2},
          {"y2", p.region_y2}}},
        {"pixels_per_meter", p.pixels_per_meter},
    });
  }
  doc["segments"] = json::array();
  for (const Segment& s : segments) {
    doc["segments"].push_back({
        {"upstream", s.upstream},
        {"downstream", s.downstream},
        {"length_km", s.length_km},
        {"lanes", s.lanes},
    });
  }
  return doc.dump(2);
}

SiteConfig SiteConfig::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }

  SiteConfig cfg;
  cfg.seed = get_or(doc, "", "seed", cfg.seed);
  cfg.fps = get_or(doc, "", "fps", cfg.fps);

  if (doc.contains("flow")) {
    const json& f = doc["flow"];
    cfg.flow.window_seconds =
        get_or(f, "flow", "window_seconds", cfg.flow.window_seconds);
    const std::string unit =
        get_or<std::string>(f, "flow", "unit", "per_second");
    if (unit == "per_second") {
      cfg.flow.unit = FlowUnit::per_second;
    } else if (unit == "per_minute") {
      cfg.flow.unit = FlowUnit::per_minute;
    } else {
      fail("flow.unit", "must be 'per_second' or 'per_minute'");
    }
  }
  if (doc.contains("speed_model")) {
    const json& s = doc["speed_model"];
    const std::string model = get_or<std::string>(s, "speed_model", "model",
                                                  "auto");
    if (model == "auto") {
      cfg.speed_model.model = SpeedModel::automatic;
    } else if (model == "greenberg") {
      cfg.speed_model.model = SpeedModel::greenberg;
    } else if (model == "greenshields") {
      cfg.speed_model.model = SpeedModel::greenshields;
    } else {
      fail("speed_model.model", "must be auto|greenberg|greenshields");
    }
    cfg.speed_model.v_f = get_or(s, "speed_model", "v_f", cfg.speed_model.v_f);
    cfg.speed_model.k_j = get_or(s, "speed_model", "k_j", cfg.speed_model.k_j);
    cfg.speed_model.density_switch_threshold =
        get_or(s, "speed_model", "density_switch_threshold",
               cfg.speed_model.density_switch_threshold);
  }
  if (doc.contains("congestion")) {
    const json& c = doc["congestion"];
    auto& cc = cfg.congestion;
    cc.k_c = get_or(c, "congestion", "k_c", cc.k_c);
    cc.v_f_free = get_or(c, "congestion", "v_f_free", cc.v_f_free);
    cc.rho_threshold = get_or(c, "congestion", "rho_threshold",
                              cc.rho_threshold);
    cc.sustained_fraction =
        get_or(c, "congestion", "sustained_fraction", cc.sustained_fraction);
    cc.sustained_window_minutes = get_or(c, "congestion",
                                         "sustained_window_minutes",
                                         cc.sustained_window_minutes);
    cc.warning_lead_minutes = get_or(c, "congestion", "warning_lead_minutes",
                                     cc.warning_lead_minutes);
    cc.match_tolerance_minutes =
        get_or(c, "congestion", "match_tolerance_minutes",
               cc.match_tolerance_minutes);
    cc.warning_debounce_samples =
        get_or(c, "congestion", "warning_debounce_samples",
               cc.warning_debounce_samples);
  }
  if (doc.contains("clean")) {
    const json& c = doc["clean"];
    cfg.clean.speed_min = get_or(c, "clean", "speed_min", cfg.clean.speed_min);
    cfg.clean.speed_max = get_or(c, "clean", "speed_max", cfg.clean.speed_max);
    cfg.clean.sigma_k = get_or(c, "clean", "sigma_k", cfg.clean.sigma_k);
  }
  if (doc.contains("windowing")) {
    const json& w = doc["windowing"];
    cfg.windowing.seq_len =
        get_or(w, "windowing", "seq_len", cfg.windowing.seq_len);
    cfg.windowing.horizon_minutes =
        get_or(w, "windowing", "horizon_minutes",
               cfg.windowing.horizon_minutes);
  }
  if (doc.contains("tracker")) {
    const json& t = doc["tracker"];
    const std::string mode = get_or<std::string>(t, "tracker", "mode",
                                                 "fused");
    if (mode == "fused") {
      cfg.tracker.mode = CostMode::fused;
    } else if (mode == "iou_only") {
      cfg.tracker.mode = CostMode::iou_only;
    } else {
      fail("tracker.mode", "must be 'fused' or 'iou_only'");
    }
    cfg.tracker.lambda = get_or(t, "tracker", "lambda", cfg.tracker.lambda);
    cfg.tracker.min_hits =
        get_or(t, "tracker", "min_hits", cfg.tracker.min_hits);
    cfg.tracker.max_misses =
        get_or(t, "tracker", "max_misses", cfg.tracker.max_misses);
    cfg.tracker.gallery_capacity = get_or(
        t, "tracker", "gallery_capacity", cfg.tracker.gallery_capacity);
    cfg.tracker.iou_threshold =
        get_or(t, "tracker", "iou_threshold", cfg.tracker.iou_threshold);
  }
  if (doc.contains("train")) {
    const json& t = doc["train"];
    auto& tr = cfg.train;
    tr.epochs = get_or(t, "train", "epochs", tr.epochs);
    tr.batch_size = get_or(t, "train", "batch_size", tr.batch_size);
    tr.learning_rate = get_or(t, "train", "learning_rate", tr.learning_rate);
    tr.weight_decay = get_or(t, "train", "weight_decay", tr.weight_decay);
    tr.early_stop_patience =
        get_or(t, "train", "early_stop_patience", tr.early_stop_patience);
    tr.hidden_dim = get_or(t, "train", "hidden_dim", tr.hidden_dim);
    tr.attention_dim = get_or(t, "train", "attention_dim", tr.attention_dim);
    tr.val_fraction = get_or(t, "train", "val_fraction", tr.val_fraction);
    tr.window_stride = get_or(t, "train", "window_stride", tr.window_stride);
    tr.models = get_or(t, "train", "models", tr.models);
  }
  if (doc.contains("scenario")) {
    const json& s = doc["scenario"];
    auto& sc = cfg.scenario;
    sc.trajectory_vehicles =
        get_or(s, "scenario", "trajectory_vehicles", sc.trajectory_vehicles);
    sc.trajectory_pairs =
        get_or(s, "scenario", "trajectory_pairs", sc.trajectory_pairs);
    sc.congestion_duration_minutes =
        get_or(s, "scenario", "congestion_duration_minutes",
               sc.congestion_duration_minutes);
    sc.event_spacing_minutes = get_or(s, "scenario", "event_spacing_minutes",
                                      sc.event_spacing_minutes);
    sc.first_onset_minute =
        get_or(s, "scenario", "first_onset_minute", sc.first_onset_minute);
    sc.ramp_minutes = get_or(s, "scenario", "ramp_minutes", sc.ramp_minutes);
    sc.severity_density =
        get_or(s, "scenario", "severity_density", sc.severity_density);
  }

  if (doc.contains("observation_points")) {
    const json& points = doc["observation_points"];
    if (!points.is_array()) {
      fail("observation_points", "must be an array");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::string path = "observation_points[" + std::to_string(i) + "]";
      const json& pj = points[i];
      ObservationPoint p;
      p.id = get_or<std::string>(pj, path, "id", "");
      const std::string split = get_or<std::string>(pj, path, "split",
                                                    "train");
      if (split == "train") {
        p.split = SplitRole::train;
      } else if (split == "test") {
        p.split = SplitRole::test;
      } else {
        fail(path + ".split", "must be 'train' or 'test'");
      }
      if (pj.contains("detection_lines")) {
        const json& dl = child(pj, path, "detection_lines");
        p.detection_lines.a =
            parse_line(child(dl, path + ".detection_lines", "a"),
                       path + ".detection_lines.a");
        p.detection_lines.b =
            parse_line(child(dl, path + ".detection_lines", "b"),
                       path + ".detection_lines.b");
        p.detection_lines.max_gap_frames =
            get_or(dl, path + ".detection_lines", "max_gap_frames",
                   p.detection_lines.max_gap_frames);
      }
      if (pj.contains("region")) {
        const json& r = pj["region"];
        p.region_x1 = get_or(r, path + ".region", "x1", p.region_x1);
        p.region_y1 = get_or(r, path + ".region", "y1", p.region_y1);
        p.region_x2 = get_or(r, path + ".region", "x2", p.region_x2);
        p.region_y2 = get_or(r, path + ".region", "y2", p.region_y2);
      }
      p.pixels_per_meter =
          get_or(pj, path, "pixels_per_meter", p.pixels_per_meter);
      cfg.observation_points.push_back(std::move(p));
    }
  }
  if (doc.contains("segments")) {
    const json& segments = doc["segments"];
    if (!segments.is_array()) {
      fail("segments", "must be an array");
    }
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const std::string path = "segments[" + std::to_string(i) + "]";
      const json& sj = segments[i];
      Segment s;
      s.upstream = get_or<std::string>(sj, path, "upstream", "");
      s.downstream = get_or<std::string>(sj, path, "downstream", "");
      s.length_km = get_or(sj, path, "length_km", s.length_km);
      s.lanes = get_or(sj, path, "lanes", s.lanes);
      cfg.segments.push_back(std::move(s));
    }
  }

  cfg.validate();
  return cfg;
}

SiteConfig SiteConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("config: cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

void SiteConfig::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw ConfigError("config: cannot open '" + path.string() +
                      "' for writing");
  }
  out << to_json() << '\n';
}

}  // namespace roadflow
