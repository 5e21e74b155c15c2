#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "roadflow/errors.hpp"
#include "roadflow/io.hpp"
#include "roadflow/neural/checkpoint.hpp"
#include "roadflow/rng.hpp"

using namespace roadflow;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("roadflow_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("detections round-trip through CSV") {
  TempDir tmp;
  Rng rng(1);
  std::vector<io::DetectionRow> rows;
  for (int i = 0; i < 40; ++i) {
    io::DetectionRow r;
    r.frame = i / 4 + 1;
    r.id_hint = i % 4;
    r.box = {rng.uniform(0, 1900), rng.uniform(0, 1000), rng.uniform(10, 100),
             rng.uniform(10, 100), rng.uniform(), 0};
    Eigen::VectorXd e(8);
    for (int k = 0; k < 8; ++k) {
      e(k) = rng.normal();
    }
    e.normalize();
    r.embedding = e;
    rows.push_back(std::move(r));
  }
  const fs::path path = tmp.path / "dets.csv";
  io::write_detections_csv(path, rows);
  const io::DetectionIngest back = io::read_detections_csv(path);
  CHECK(back.rejected.empty());
  REQUIRE(back.rows.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back.rows[i].frame == rows[i].frame);
    CHECK(back.rows[i].box.cx == rows[i].box.cx);  // exact round trip
    CHECK(back.rows[i].box.confidence == rows[i].box.confidence);
    CHECK((*back.rows[i].embedding - *rows[i].embedding).norm() == 0.0);
  }
}

TEST_CASE("empty detection file reads as an empty stream") {
  TempDir tmp;
  const fs::path path = tmp.path / "empty.csv";
  std::ofstream(path).close();
  const io::DetectionIngest ingest = io::read_detections_csv(path);
  CHECK(ingest.rows.empty());
  CHECK(ingest.rejected.empty());
}

TEST_CASE("invariant violations are rejected row by row") {
  TempDir tmp;
  const fs::path path = tmp.path / "bad.csv";
  {
    std::ofstream out(path);
    out << "frame,id_hint,cx,cy,w,h,confidence,class\n";
    out << "1,-1,10,10,40,30,0.9,0\n";
    out << "2,-1,10,10,-4,30,0.9,0\n";   // bad width
    out << "3,-1,10,10,40,30,1.7,0\n";   // bad confidence
    out << "4,-1,10,10,40,30,0.8,0\n";
  }
  const io::DetectionIngest ingest = io::read_detections_csv(path);
  CHECK(ingest.rows.size() == 2);
  REQUIRE(ingest.rejected.size() == 2);
  CHECK(ingest.rejected[0].line == 3);
  CHECK(ingest.rejected[0].reason.find("width") != std::string::npos);
  CHECK(ingest.rejected[1].line == 4);
}

TEST_CASE("parse errors carry line and column diagnostics") {
  TempDir tmp;
  const fs::path path = tmp.path / "parse.csv";
  {
    std::ofstream out(path);
    out << "frame,id_hint,cx,cy,w,h,confidence,class\n";
    out << "1,-1,ten,10,40,30,0.9,0\n";
  }
  try {
    io::read_detections_csv(path);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find(":2:3") != std::string::npos);  // line 2, column 3
  }
}

TEST_CASE("non-unit embeddings are rejected") {
  TempDir tmp;
  const fs::path path = tmp.path / "emb.csv";
  {
    std::ofstream out(path);
    out << "frame,id_hint,cx,cy,w,h,confidence,class,e0,e1\n";
    out << "1,-1,10,10,40,30,0.9,0,1,0\n";
    out << "2,-1,10,10,40,30,0.9,0,2,0\n";  // norm 2
  }
  const io::DetectionIngest ingest = io::read_detections_csv(path);
  CHECK(ingest.rows.size() == 1);
  REQUIRE(ingest.rejected.size() == 1);
  CHECK(ingest.rejected[0].reason.find("unit norm") != std::string::npos);
}

TEST_CASE("track records round-trip") {
  TempDir tmp;
  const std::vector<TrackRecord> records = {
      {1, 3, 10.25, 20.5, 40, 30, "confirmed"},
      {2, 3, 11.125, 20.5, 40, 30, "tentative"},
  };
  const fs::path path = tmp.path / "tracks.csv";
  io::write_track_records_csv(path, records);
  const auto back = io::read_track_records_csv(path);
  REQUIRE(back.size() == 2);
  CHECK(back[0].cx == 10.25);
  CHECK(back[1].status == "tentative");
}

TEST_CASE("parameter series round-trip exactly") {
  TempDir tmp;
  Rng rng(2);
  std::vector<ParameterSample> series;
  for (int i = 0; i < 200; ++i) {
    series.push_back({i * 25L, rng.uniform(0, 9), rng.uniform(0, 40),
                      rng.uniform(0, 130)});
  }
  const fs::path path = tmp.path / "params.csv";
  io::write_parameter_csv(path, series);
  const auto back = io::read_parameter_csv(path);
  REQUIRE(back.size() == series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    CHECK(back[i].flow == series[i].flow);
    CHECK(back[i].density == series[i].density);
    CHECK(back[i].speed == series[i].speed);
  }
}

TEST_CASE("labels round-trip") {
  TempDir tmp;
  const std::vector<long> frames = {0, 25, 50, 75};
  const std::vector<std::uint8_t> labels = {0, 1, 1, 0};
  const fs::path path = tmp.path / "labels.csv";
  io::write_labels_csv(path, frames, labels);
  CHECK(io::read_labels_csv(path) == labels);
}

TEST_CASE("plot CSV carries metadata comments") {
  TempDir tmp;
  const fs::path path = tmp.path / "plot.csv";
  io::write_plot_csv(path, {{0.0, "rho", 0.01}, {1.0, "rho", 0.02}},
                     {{"rho_threshold", 0.016}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# rho_threshold=0.016");
  std::getline(in, line);
  CHECK(line == "x,series_name,y");
}

TEST_CASE("empty plot series writes a header-only file") {
  TempDir tmp;
  const fs::path path = tmp.path / "empty_plot.csv";
  io::write_plot_csv(path, {});
  std::ifstream in(path);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "x,series_name,y");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("checkpoints round-trip bit exactly") {
  TempDir tmp;
  Rng rng(3);
  neural::Checkpoint ckpt;
  ckpt.params =
      neural::ModelParams::init({neural::ModelKind::gru_attention, 3, 8, 4},
                                rng);
  ckpt.train_config.seed = 1234;
  ckpt.training_log = {{1, 0.7, 0.69}, {2, 0.5, 0.52}};
  ckpt.normalizer_ref = "normalizer.json";

  const fs::path path = tmp.path / "model.json";
  ckpt.save(path.string());
  const neural::Checkpoint back = neural::Checkpoint::load(path.string());

  CHECK(back.params.config.kind == ckpt.params.config.kind);
  CHECK(back.params.gru.w_r == ckpt.params.gru.w_r);  // bitwise
  CHECK(back.params.attention.v == ckpt.params.attention.v);
  CHECK(back.params.head.w == ckpt.params.head.w);
  CHECK(back.params.head.bias == ckpt.params.head.bias);
  CHECK(back.normalizer_ref == "normalizer.json");
  REQUIRE(back.training_log.size() == 2);
  CHECK(back.training_log[1].val_loss == 0.52);

  // Saving the loaded copy reproduces the same bytes.
  const fs::path again = tmp.path / "model2.json";
  back.save(again.string());
  CHECK(io::file_hash(path) == io::file_hash(again));
}

TEST_CASE("file hash distinguishes different content") {
  TempDir tmp;
  const fs::path a = tmp.path / "a.txt";
  const fs::path b = tmp.path / "b.txt";
  std::ofstream(a) << "hello";
  std::ofstream(b) << "hellp";
  CHECK(io::file_hash(a) != io::file_hash(b));
}
