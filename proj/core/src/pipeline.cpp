#include "roadflow/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "roadflow/errors.hpp"
#include "roadflow/io.hpp"
#include "roadflow/neural/checkpoint.hpp"
#include "roadflow/neural/logistic.hpp"
#include "roadflow/neural/train.hpp"
#include "roadflow/preprocess.hpp"
#include "roadflow/rng.hpp"
#include "roadflow/scenario.hpp"

namespace roadflow {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::simulate: return "simulate";
    case Stage::track: return "track";
    case Stage::params: return "params";
    case Stage::preprocess: return "preprocess";
    case Stage::train: return "train";
    case Stage::predict: return "predict";
    case Stage::warn: return "warn";
    case Stage::evaluate: return "evaluate";
    case Stage::report: return "report";
  }
  return "unknown";
}

std::vector<Stage> parse_stages(const std::string& list) {
  static const std::vector<std::pair<std::string, Stage>> kStages = {
      {"simulate", Stage::simulate}, {"track", Stage::track},
      {"params", Stage::params},     {"preprocess", Stage::preprocess},
      {"train", Stage::train},       {"predict", Stage::predict},
      {"warn", Stage::warn},         {"evaluate", Stage::evaluate},
      {"report", Stage::report},
  };
  std::vector<Stage> wanted;
  std::istringstream stream(list);
  std::string token;
  while (std::getline(stream, token, ',')) {
    if (token.empty()) {
      continue;
    }
    if (token == "all") {
      for (const auto& [_, stage] : kStages) {
        wanted.push_back(stage);
      }
      continue;
    }
    bool found = false;
    for (const auto& [name, stage] : kStages) {
      if (name == token) {
        wanted.push_back(stage);
        found = true;
        break;
      }
    }
    if (!found) {
      throw ConfigError("unknown stage '" + token + "'");
    }
  }
  // Canonical order, no duplicates.
  std::vector<Stage> ordered;
  for (const auto& [_, stage] : kStages) {
    if (std::find(wanted.begin(), wanted.end(), stage) != wanted.end()) {
      ordered.push_back(stage);
    }
  }
  if (ordered.empty()) {
    throw ConfigError("no stages selected");
  }
  return ordered;
}

std::vector<std::pair<long, long>> episodes_from_flags(
    const std::vector<std::uint8_t>& flags) {
  std::vector<std::pair<long, long>> episodes;
  long start = -1;
  for (long i = 0; i < static_cast<long>(flags.size()); ++i) {
    const bool on = flags[static_cast<std::size_t>(i)] != 0;
    if (on && start < 0) {
      start = i;
    } else if (!on && start >= 0) {
      episodes.emplace_back(start, i);
      start = -1;
    }
  }
  if (start >= 0) {
    episodes.emplace_back(start, static_cast<long>(flags.size()));
  }
  return episodes;
}

namespace {

class PipelineRun {
 public:
  PipelineRun(const SiteConfig& config, fs::path out_dir)
      : cfg_(config), out_(std::move(out_dir)) {
    cfg_.validate();
    fs::create_directories(out_);
  }

  RunReport run(const std::vector<Stage>& stages) {
    for (const Stage stage : stages) {
      const auto begin = std::chrono::steady_clock::now();
      StageReport sr;
      sr.name = to_string(stage);
      switch (stage) {
        case Stage::simulate: sr.reused = simulate(); break;
        case Stage::track: sr.reused = track(); break;
        case Stage::params: sr.reused = params(); break;
        case Stage::preprocess: sr.reused = preprocess(); break;
        case Stage::train: sr.reused = train(); break;
        case Stage::predict: sr.reused = predict(); break;
        case Stage::warn: sr.reused = warn(); break;
        case Stage::evaluate: sr.reused = evaluate(); break;
        case Stage::report: sr.reused = report(); break;
      }
      sr.elapsed_ms =
          std::chrono::duration<double, std::milli>(
              std::chrono::steady_clock::now() - begin)
              .count();
      report_.stages.push_back(std::move(sr));
    }
    // Anything recorded as an artifact must exist.
    for (const std::string& rel : report_.artifacts) {
      if (!fs::exists(out_ / rel)) {
        throw DataError("pipeline: artifact '" + rel +
                        "' missing after run");
      }
    }
    return report_;
  }

 private:
  fs::path path_of(const std::string& rel) const { return out_ / rel; }

  void record(const std::string& rel) { report_.artifacts.push_back(rel); }

  bool all_exist(const std::vector<std::string>& rels) const {
    return std::all_of(rels.begin(), rels.end(), [&](const std::string& r) {
      return fs::exists(out_ / r);
    });
  }

  static std::string point_file(const std::string& dir,
                                const ObservationPoint& p) {
    return dir + "/" + p.id + ".csv";
  }

  // ---- simulate -----------------------------------------------------------

  bool simulate() {
    std::vector<std::string> outputs;
    for (const ObservationPoint& p : cfg_.observation_points) {
      outputs.push_back(point_file("detections", p));
      outputs.push_back(point_file("ground_truth", p));
      outputs.push_back(point_file("series", p));
      outputs.push_back(point_file("labels", p));
    }
    const bool reused = all_exist(outputs);
    if (!reused) {
      for (std::size_t i = 0; i < cfg_.observation_points.size(); ++i) {
        simulate_point(static_cast<int>(i));
      }
    }
    for (const std::string& o : outputs) {
      record(o);
    }
    return reused;
  }

  void simulate_point(int index) {
    const ObservationPoint& p =
        cfg_.observation_points[static_cast<std::size_t>(index)];

    // Trajectories for the vision chain.
    TrajectoryScenario traj = TrajectoryScenario::occlusion_benchmark(
        cfg_.scenario.trajectory_vehicles, cfg_.scenario.trajectory_pairs,
        Rng::for_stream(cfg_.seed, "trajectory",
                        static_cast<std::uint64_t>(index))
            .next_u64());
    traj.fps = cfg_.fps;
    const TrajectoryData data = generate_trajectories(traj);

    std::vector<io::DetectionRow> rows;
    for (long frame = 1; frame < static_cast<long>(data.detections.size());
         ++frame) {
      for (const Detection& det :
           data.detections[static_cast<std::size_t>(frame)]) {
        io::DetectionRow row;
        row.frame = frame;
        row.id_hint = -1;  // the tracker must not see identities
        row.box = det.box;
        row.embedding = det.embedding;
        rows.push_back(std::move(row));
      }
    }
    io::write_detections_csv(path_of(point_file("detections", p)), rows);
    io::write_track_records_csv(path_of(point_file("ground_truth", p)),
                                data.ground_truth);

    // Hour-scale parameter series for the prediction chain.
    CongestionScenario cs;
    cs.duration_minutes = cfg_.scenario.congestion_duration_minutes;
    cs.seed = Rng::for_stream(cfg_.seed, "congestion",
                              static_cast<std::uint64_t>(index))
                  .next_u64();
    double onset = cfg_.scenario.first_onset_minute;
    const double tail = cs.hold_minutes + cs.clear_minutes +
                        cs.recover_minutes + 5.0;
    while (onset + tail < cs.duration_minutes) {
      cs.events.push_back(
          {onset, cfg_.scenario.ramp_minutes, cfg_.scenario.severity_density});
      onset += cfg_.scenario.event_spacing_minutes;
    }
    const ParameterData series =
        generate_parameter_series(cs, cfg_.speed_model, cfg_.congestion);
    io::write_parameter_csv(path_of(point_file("series", p)), series.series);
    std::vector<long> frames;
    frames.reserve(series.series.size());
    for (const ParameterSample& s : series.series) {
      frames.push_back(s.frame);
    }
    io::write_labels_csv(path_of(point_file("labels", p)), frames,
                         series.labels);
  }

  // ---- track --------------------------------------------------------------

  bool track() {
    std::vector<std::string> outputs;
    for (const ObservationPoint& p : cfg_.observation_points) {
      outputs.push_back(point_file("tracks", p));
    }
    const bool reused = all_exist(outputs);
    for (const ObservationPoint& p : cfg_.observation_points) {
      const fs::path tracks_path = path_of(point_file("tracks", p));
      std::vector<TrackRecord> records;
      if (!reused) {
        const io::DetectionIngest ingest =
            io::read_detections_csv(path_of(point_file("detections", p)));
        report_.rejected_rows += static_cast<long>(ingest.rejected.size());
        const auto frames = io::group_detections_by_frame(ingest.rows);
        Tracker tracker(cfg_.tracker);
        for (std::size_t f = 1; f < frames.size(); ++f) {
          tracker.step(frames[f]);
          for (const Track& t : tracker.tracks()) {
            if (t.status != TrackStatus::confirmed) {
              continue;
            }
            const BoundingBox box = t.box();
            records.push_back({static_cast<long>(f), t.id, box.cx, box.cy,
                               box.w, box.h, to_string(t.status)});
          }
        }
        io::write_track_records_csv(tracks_path, records);
      } else {
        records = io::read_track_records_csv(tracks_path);
      }

      const fs::path gt_path = path_of(point_file("ground_truth", p));
      if (fs::exists(gt_path)) {
        const auto gt = io::read_track_records_csv(gt_path);
        if (!gt.empty()) {
          report_.tracking[p.id] = evaluate_tracking(gt, records);
        }
      }
    }
    for (const std::string& o : outputs) {
      record(o);
    }
    return reused;
  }

  // ---- params -------------------------------------------------------------

  bool params() {
    std::vector<std::string> outputs;
    for (const ObservationPoint& p : cfg_.observation_points) {
      outputs.push_back(point_file("params", p));
    }
    const bool reused = all_exist(outputs);
    if (!reused) {
      for (const ObservationPoint& p : cfg_.observation_points) {
        params_point(p);
      }
    }
    for (const std::string& o : outputs) {
      record(o);
    }
    return reused;
  }

  void params_point(const ObservationPoint& p) {
    const auto records =
        io::read_track_records_csv(path_of(point_file("tracks", p)));
    // Density uses the segment ahead of the camera; the last point falls
    // back to the segment feeding it.
    const Segment* segment = cfg_.segment_from(p.id);
    if (segment == nullptr) {
      segment = cfg_.segment_to(p.id);
    }
    if (segment == nullptr) {
      throw ConfigError("params: no segment touches point '" + p.id + "'");
    }
    SegmentGeometry geometry{segment->length_km, segment->lanes,
                             segment->upstream, segment->downstream};

    long max_frame = 0;
    std::map<long, int> region_count;
    for (const TrackRecord& r : records) {
      max_frame = std::max(max_frame, r.frame);
      if (r.cx >= p.region_x1 && r.cx <= p.region_x2 && r.cy >= p.region_y1 &&
          r.cy <= p.region_y2 && r.status == "confirmed") {
        region_count[r.frame] += 1;
      }
    }

    const auto events = detect_crossings_all(records, p.detection_lines);
    const long window_frames = std::max<long>(
        1, static_cast<long>(cfg_.flow.window_seconds * cfg_.fps + 0.5));
    const std::vector<int> counts =
        flow_series(events, window_frames, max_frame + 1);
    const double unit_scale = cfg_.flow.unit == FlowUnit::per_second
                                  ? 1.0 / cfg_.flow.window_seconds
                                  : 60.0 / cfg_.flow.window_seconds;

    std::vector<ParameterSample> series;
    for (long frame = cfg_.fps; frame <= max_frame; frame += cfg_.fps) {
      ParameterSample s;
      s.frame = frame;
      const long completed = frame / window_frames;  // windows fully behind us
      s.flow = completed > 0
                   ? counts[static_cast<std::size_t>(completed - 1)] *
                         unit_scale
                   : 0.0;
      const auto it = region_count.find(frame);
      s.density = density(it == region_count.end() ? 0 : it->second, geometry);
      s.speed = model_speed(s.density, cfg_.speed_model);
      series.push_back(s);
    }
    io::write_parameter_csv(path_of(point_file("params", p)), series);
  }

  // ---- preprocess ---------------------------------------------------------

  bool preprocess() {
    std::vector<std::string> outputs = {"preprocessed/normalizer.json"};
    for (const ObservationPoint& p : cfg_.observation_points) {
      outputs.push_back(point_file("preprocessed", p));
    }
    const bool reused = all_exist(outputs);
    if (!reused) {
      std::vector<ParameterSample> normalizer_source;
      for (const ObservationPoint& p : cfg_.observation_points) {
        const auto raw =
            io::read_parameter_csv(path_of(point_file("series", p)));
        const CleanResult cleaned = clean(raw, cfg_.clean);
        report_.outliers_removed += static_cast<long>(cleaned.report.size());
        const auto filled = interpolate(cleaned.series);
        report_.gaps_filled += static_cast<long>(cleaned.report.size());
        io::write_parameter_csv(path_of(point_file("preprocessed", p)),
                                filled);
        if (p.split == SplitRole::train) {
          // Only the chronological training portion feeds the statistics.
          const std::size_t train_len = static_cast<std::size_t>(
              static_cast<double>(filled.size()) *
              (1.0 - cfg_.train.val_fraction));
          normalizer_source.insert(normalizer_source.end(), filled.begin(),
                                   filled.begin() +
                                       static_cast<long>(train_len));
        }
      }
      if (normalizer_source.empty()) {
        throw DataError("preprocess: no training-split points");
      }
      const Normalizer norm = Normalizer::fit(normalizer_source);
      std::ofstream out(path_of("preprocessed/normalizer.json"));
      out << norm.to_json() << '\n';
    }
    for (const std::string& o : outputs) {
      record(o);
    }
    return reused;
  }

  // ---- shared helpers for the learning stages ------------------------------

  Normalizer load_normalizer() const {
    std::ifstream in(path_of("preprocessed/normalizer.json"));
    if (!in) {
      throw DataError("missing preprocessed/normalizer.json (run preprocess)");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return Normalizer::from_json(buf.str());
  }

  long horizon_samples() const {
    return static_cast<long>(cfg_.windowing.horizon_minutes * 60.0 + 0.5);
  }

  std::vector<WindowedSample> windows_for_point(
      const ObservationPoint& p, const Normalizer& norm) const {
    const auto series =
        io::read_parameter_csv(path_of(point_file("preprocessed", p)));
    const auto labels = io::read_labels_csv(path_of(point_file("labels", p)));
    if (labels.size() != series.size()) {
      throw DataError("preprocessed series and labels misalign for point " +
                      p.id);
    }
    return make_windows(norm.apply(series), labels, cfg_.windowing.seq_len,
                        horizon_samples());
  }

  const ObservationPoint& test_point() const {
    for (const ObservationPoint& p : cfg_.observation_points) {
      if (p.split == SplitRole::test) {
        return p;
      }
    }
    throw ConfigError("no observation point has split 'test'");
  }

  // ---- train --------------------------------------------------------------

  bool train() {
    std::vector<std::string> outputs;
    for (const std::string& model : cfg_.train.models) {
      outputs.push_back("checkpoints/" + model + ".json");
    }
    const bool reused = all_exist(outputs);
    if (reused) {
      for (const std::string& o : outputs) {
        record(o);
      }
      return true;
    }

    const Normalizer norm = load_normalizer();
    std::vector<WindowedSample> train_pool, val_pool;
    for (const ObservationPoint& p : cfg_.observation_points) {
      if (p.split != SplitRole::train) {
        continue;
      }
      const auto windows = windows_for_point(p, norm);
      const std::size_t split = static_cast<std::size_t>(
          static_cast<double>(windows.size()) *
          (1.0 - cfg_.train.val_fraction));
      const auto stride = static_cast<std::size_t>(cfg_.train.window_stride);
      for (std::size_t i = 0; i < windows.size(); ++i) {
        if (i % stride != 0) {
          continue;  // consecutive windows overlap by seq_len - 1 samples
        }
        (i < split ? train_pool : val_pool).push_back(windows[i]);
      }
    }
    if (train_pool.empty() || val_pool.empty()) {
      throw DataError("train: empty train or validation pool");
    }

    fs::create_directories(path_of("checkpoints"));
    int model_index = 0;
    for (const std::string& model : cfg_.train.models) {
      const std::uint64_t model_seed =
          Rng::for_stream(cfg_.seed, "train",
                          static_cast<std::uint64_t>(model_index++))
              .next_u64();
      if (model == "logistic") {
        train_logistic(train_pool);
        continue;
      }
      neural::ModelConfig mc;
      mc.kind = neural::model_kind_from_string(model);
      mc.hidden_dim = cfg_.train.hidden_dim;
      mc.attention_dim = cfg_.train.attention_dim;
      neural::TrainConfig tc;
      tc.epochs = cfg_.train.epochs;
      tc.batch_size = cfg_.train.batch_size;
      tc.learning_rate = cfg_.train.learning_rate;
      tc.weight_decay = cfg_.train.weight_decay;
      tc.early_stop_patience = cfg_.train.early_stop_patience;
      tc.seed = model_seed;
      const neural::TrainResult result =
          neural::train(mc, train_pool, val_pool, tc);

      neural::Checkpoint ckpt;
      ckpt.params = result.best;
      ckpt.train_config = tc;
      ckpt.training_log = result.log;
      ckpt.normalizer_ref = "../preprocessed/normalizer.json";
      ckpt.save(path_of("checkpoints/" + model + ".json").string());
    }
    for (const std::string& o : outputs) {
      record(o);
    }
    return false;
  }

  void train_logistic(const std::vector<WindowedSample>& pool) {
    std::vector<neural::LogisticSample> samples;
    samples.reserve(pool.size());
    for (const WindowedSample& w : pool) {
      neural::LogisticSample s;
      s.x = w.sequence.row(w.sequence.rows() - 1).transpose();
      s.label = w.label;
      samples.push_back(s);
    }
    const neural::LogisticParams params = neural::logistic_fit(samples);
    json doc;
    doc["model"] = "logistic";
    doc["beta0"] = params.beta0;
    doc["beta"] = {params.beta(0), params.beta(1), params.beta(2)};
    doc["normalizer_ref"] = "../preprocessed/normalizer.json";
    std::ofstream out(path_of("checkpoints/logistic.json"));
    out << doc.dump(2) << '\n';
  }

  neural::LogisticParams load_logistic() const {
    std::ifstream in(path_of("checkpoints/logistic.json"));
    if (!in) {
      throw DataError("missing checkpoints/logistic.json (run train)");
    }
    json doc = json::parse(in);
    neural::LogisticParams params;
    params.beta0 = doc.at("beta0").get<double>();
    for (int i = 0; i < 3; ++i) {
      params.beta(i) = doc.at("beta")[static_cast<std::size_t>(i)]
                           .get<double>();
    }
    return params;
  }

  // ---- predict ------------------------------------------------------------

  bool predict() {
    std::vector<std::string> outputs;
    for (const std::string& model : cfg_.train.models) {
      outputs.push_back("predictions/" + model + ".csv");
    }
    const bool reused = all_exist(outputs);
    if (reused) {
      for (const std::string& o : outputs) {
        record(o);
      }
      return true;
    }

    const Normalizer norm = load_normalizer();
    const ObservationPoint& test = test_point();
    const auto windows = windows_for_point(test, norm);
    fs::create_directories(path_of("predictions"));

    for (const std::string& model : cfg_.train.models) {
      std::vector<double> probs(windows.size());
      if (model == "logistic") {
        const neural::LogisticParams params = load_logistic();
        for (std::size_t i = 0; i < windows.size(); ++i) {
          probs[i] = neural::logistic_predict(
              params,
              windows[i].sequence.row(windows[i].sequence.rows() - 1)
                  .transpose());
        }
      } else {
        const neural::Checkpoint ckpt = neural::Checkpoint::load(
            path_of("checkpoints/" + model + ".json").string());
        for (std::size_t i = 0; i < windows.size(); ++i) {
          probs[i] = neural::model_forward(ckpt.params, windows[i].sequence);
        }
      }
      std::ofstream out(path_of("predictions/" + model + ".csv"));
      out << "index,minute,probability,label\n";
      for (std::size_t i = 0; i < windows.size(); ++i) {
        const double minute =
            static_cast<double>(i + static_cast<std::size_t>(
                                        cfg_.windowing.seq_len) -
                                1) /
            60.0;
        out << i << ',' << io::format_double(minute) << ','
            << io::format_double(probs[i]) << ',' << windows[i].label << '\n';
      }
    }
    for (const std::string& o : outputs) {
      record(o);
    }
    return false;
  }

  struct PredictionFile {
    std::vector<double> minutes;
    std::vector<double> probabilities;
    std::vector<int> labels;
  };

  PredictionFile read_predictions(const std::string& model) const {
    const fs::path path = path_of("predictions/" + model + ".csv");
    std::ifstream in(path);
    if (!in) {
      throw DataError("missing " + path.string() + " (run predict)");
    }
    PredictionFile pf;
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) {
        continue;
      }
      std::istringstream row(line);
      std::string field;
      std::getline(row, field, ',');  // index
      std::getline(row, field, ',');
      pf.minutes.push_back(std::stod(field));
      std::getline(row, field, ',');
      pf.probabilities.push_back(std::stod(field));
      std::getline(row, field, ',');
      pf.labels.push_back(std::stoi(field));
    }
    return pf;
  }

  std::string primary_model() const {
    for (const std::string& m : cfg_.train.models) {
      if (m == "gru_attention") {
        return m;
      }
    }
    return cfg_.train.models.front();
  }

  // ---- warn ---------------------------------------------------------------

  bool warn() {
    const std::vector<std::string> outputs = {"warnings/warnings.csv",
                                              "warnings/episodes.csv"};
    const bool reused = all_exist(outputs);
    if (!reused) {
      const PredictionFile pf = read_predictions(primary_model());
      const std::vector<long> indices =
          emit_warnings(pf.probabilities, 0.5,
                        cfg_.congestion.warning_debounce_samples);
      fs::create_directories(path_of("warnings"));
      {
        std::ofstream out(path_of("warnings/warnings.csv"));
        out << "warning_minute\n";
        for (const long i : indices) {
          out << io::format_double(pf.minutes[static_cast<std::size_t>(i)])
              << '\n';
        }
      }
      const auto labels =
          io::read_labels_csv(path_of(point_file("labels", test_point())));
      const auto episodes = episodes_from_flags(labels);
      {
        std::ofstream out(path_of("warnings/episodes.csv"));
        out << "event_id,start_minute,end_minute\n";
        int id = 1;
        for (const auto& [start, end] : episodes) {
          out << id++ << ',' << io::format_double(start / 60.0) << ','
              << io::format_double(end / 60.0) << '\n';
        }
      }
    }
    for (const std::string& o : outputs) {
      record(o);
    }
    return reused;
  }

  std::vector<double> read_warning_minutes() const {
    std::ifstream in(path_of("warnings/warnings.csv"));
    if (!in) {
      throw DataError("missing warnings/warnings.csv (run warn)");
    }
    std::vector<double> minutes;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (!line.empty()) {
        minutes.push_back(std::stod(line));
      }
    }
    return minutes;
  }

  std::vector<double> read_episode_starts() const {
    std::ifstream in(path_of("warnings/episodes.csv"));
    if (!in) {
      throw DataError("missing warnings/episodes.csv (run warn)");
    }
    std::vector<double> starts;
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
      if (line.empty()) {
        continue;
      }
      std::istringstream row(line);
      std::string field;
      std::getline(row, field, ',');
      std::getline(row, field, ',');
      starts.push_back(std::stod(field));
    }
    return starts;
  }

  // ---- evaluate -----------------------------------------------------------

  bool evaluate() {
    const std::vector<std::string> outputs = {"evaluation/warning_table.csv"};
    for (const std::string& model : cfg_.train.models) {
      const PredictionFile pf = read_predictions(model);
      report_.classification[model] =
          neural::classification_metrics(pf.probabilities, pf.labels);
    }
    report_.warning_eval = evaluate_warnings(
        read_warning_minutes(), read_episode_starts(), cfg_.congestion);
    report_.has_warning_eval = true;
    io::write_warning_table_csv(path_of("evaluation/warning_table.csv"),
                                report_.warning_eval.table);
    for (const std::string& o : outputs) {
      record(o);
    }
    return false;
  }

  // ---- report -------------------------------------------------------------

  bool report() {
    // Speed/density trend per point.
    for (const ObservationPoint& p : cfg_.observation_points) {
      const fs::path src = path_of(point_file("preprocessed", p));
      if (!fs::exists(src)) {
        continue;
      }
      const auto series = io::read_parameter_csv(src);
      std::vector<io::PlotRow> rows;
      rows.reserve(series.size() * 2);
      std::vector<io::PlotRow> rho_rows;
      for (const ParameterSample& s : series) {
        const double x = static_cast<double>(s.frame);
        rows.push_back({x, "speed", s.speed});
        rows.push_back({x, "density", s.density});
        rho_rows.push_back(
            {x, "rho", congestion_index(s.density, s.speed, cfg_.congestion)});
      }
      const std::string trend = "plots/speed_density_" + p.id + ".csv";
      io::write_plot_csv(path_of(trend), rows);
      record(trend);
      const std::string rho = "plots/rho_" + p.id + ".csv";
      io::write_plot_csv(path_of(rho), rho_rows,
                         {{"rho_threshold", cfg_.congestion.rho_threshold}});
      record(rho);
    }
    // Prediction-vs-truth curves.
    for (const std::string& model : cfg_.train.models) {
      const fs::path src = path_of("predictions/" + model + ".csv");
      if (!fs::exists(src)) {
        continue;
      }
      const PredictionFile pf = read_predictions(model);
      std::vector<io::PlotRow> rows;
      rows.reserve(pf.minutes.size() * 2);
      for (std::size_t i = 0; i < pf.minutes.size(); ++i) {
        rows.push_back({pf.minutes[i], "predicted", pf.probabilities[i]});
        rows.push_back(
            {pf.minutes[i], "actual", static_cast<double>(pf.labels[i])});
      }
      const std::string rel = "plots/prediction_" + model + ".csv";
      io::write_plot_csv(path_of(rel), rows);
      record(rel);
    }

    std::ofstream out(path_of("report.json"));
    out << report_.to_json() << '\n';
    record("report.json");
    return false;
  }

  SiteConfig cfg_;
  fs::path out_;
  RunReport report_;
};

}  // namespace

std::string RunReport::to_json(bool include_timings) const {
  json doc;
  doc["stages"] = json::array();
  for (const StageReport& s : stages) {
    json stage = {{"name", s.name}, {"reused", s.reused}};
    if (include_timings) {
      stage["elapsed_ms"] = s.elapsed_ms;
    }
    doc["stages"].push_back(std::move(stage));
  }
  doc["data_quality"] = {
      {"outliers_removed", outliers_removed},
      {"gaps_filled", gaps_filled},
      {"rejected_rows", rejected_rows},
  };
  doc["tracking"] = json::object();
  for (const auto& [point, m] : tracking) {
    doc["tracking"][point] = {
        {"mota", m.mota},
        {"id_switches", m.id_switches},
        {"fragmentations", m.fragmentations},
        {"false_positives", m.false_positives},
        {"misses", m.misses},
        {"total_gt", m.total_gt},
        {"tracking_stability", m.tracking_stability},
    };
  }
  doc["classification"] = json::object();
  for (const auto& [model, m] : classification) {
    doc["classification"][model] = {
        {"accuracy", m.accuracy}, {"recall", m.recall},
        {"precision", m.precision}, {"f1", m.f1},
        {"rmse", m.rmse},
    };
  }
  if (has_warning_eval) {
    doc["warnings"] = {
        {"warning_accuracy", warning_eval.warning_accuracy},
        {"mean_lead_error_minutes",
         std::isnan(warning_eval.mean_lead_error_minutes)
             ? json(nullptr)
             : json(warning_eval.mean_lead_error_minutes)},
        {"missed_rate", warning_eval.missed_rate},
        {"false_rate", warning_eval.false_rate},
    };
  }
  doc["artifacts"] = artifacts;
  return doc.dump(2);
}

RunReport run_pipeline(const SiteConfig& config,
                       const std::filesystem::path& out_dir,
                       const std::vector<Stage>& stages) {
  PipelineRun run(config, out_dir);
  return run.run(stages);
}

}  // namespace roadflow
