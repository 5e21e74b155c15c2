#include "roadflow/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "roadflow/errors.hpp"

namespace roadflow::io {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) {
    fields.push_back(field);
  }
  if (!line.empty() && line.back() == ',') {
    fields.emplace_back();
  }
  return fields;
}

[[noreturn]] void parse_fail(const std::filesystem::path& path, long line,
                             std::size_t column, const std::string& what) {
  std::ostringstream msg;
  msg << path.string() << ":" << line << ":" << (column + 1) << ": " << what;
  throw DataError(msg.str());
}

double parse_double(const std::string& text, const std::filesystem::path& path,
                    long line, std::size_t column) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    parse_fail(path, line, column, "expected a number, got '" + text + "'");
  }
  return value;
}

long parse_long(const std::string& text, const std::filesystem::path& path,
                long line, std::size_t column) {
  long value = 0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    parse_fail(path, line, column, "expected an integer, got '" + text + "'");
  }
  return value;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path);
  if (!out) {
    throw DataError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open '" + path.string() + "'");
  }
  return in;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

void write_detections_csv(const std::filesystem::path& path,
                          const std::vector<DetectionRow>& rows) {
  long embedding_dim = 0;
  for (const DetectionRow& r : rows) {
    if (r.embedding.has_value()) {
      embedding_dim = r.embedding->size();
      break;
    }
  }

  std::ofstream out = open_out(path);
  out << "frame,id_hint,cx,cy,w,h,confidence,class";
  for (long i = 0; i < embedding_dim; ++i) {
    out << ",e" << i;
  }
  out << '\n';
  for (const DetectionRow& r : rows) {
    out << r.frame << ',' << r.id_hint << ',' << format_double(r.box.cx) << ','
        << format_double(r.box.cy) << ',' << format_double(r.box.w) << ','
        << format_double(r.box.h) << ',' << format_double(r.box.confidence)
        << ',' << r.box.class_id;
    if (embedding_dim > 0) {
      if (!r.embedding.has_value() || r.embedding->size() != embedding_dim) {
        throw DataError("write_detections_csv: inconsistent embedding "
                        "dimensions across rows");
      }
      for (long i = 0; i < embedding_dim; ++i) {
        out << ',' << format_double((*r.embedding)(i));
      }
    }
    out << '\n';
  }
}

DetectionIngest read_detections_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  DetectionIngest result;

  std::string line;
  if (!std::getline(in, line)) {
    return result;  // empty file -> empty stream
  }
  const std::vector<std::string> header = split_csv(line);
  constexpr std::size_t kFixed = 8;
  if (header.size() < kFixed || header[0] != "frame" ||
      header[2] != "cx") {
    parse_fail(path, 1, 0, "unrecognized detections header");
  }
  const long embedding_dim = static_cast<long>(header.size() - kFixed);

  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != header.size()) {
      parse_fail(path, line_no, 0,
                 "expected " + std::to_string(header.size()) + " fields, got " +
                     std::to_string(fields.size()));
    }
    DetectionRow row;
    row.frame = parse_long(fields[0], path, line_no, 0);
    row.id_hint = static_cast<int>(parse_long(fields[1], path, line_no, 1));
    row.box.cx = parse_double(fields[2], path, line_no, 2);
    row.box.cy = parse_double(fields[3], path, line_no, 3);
    row.box.w = parse_double(fields[4], path, line_no, 4);
    row.box.h = parse_double(fields[5], path, line_no, 5);
    row.box.confidence = parse_double(fields[6], path, line_no, 6);
    row.box.class_id = static_cast<int>(parse_long(fields[7], path, line_no, 7));

    if (embedding_dim > 0) {
      Eigen::VectorXd e(embedding_dim);
      for (long i = 0; i < embedding_dim; ++i) {
        e(i) = parse_double(fields[kFixed + static_cast<std::size_t>(i)], path,
                            line_no, kFixed + static_cast<std::size_t>(i));
      }
      row.embedding = std::move(e);
    }

    // Invariant checks reject the row but keep reading.
    if (!row.box.valid()) {
      result.rejected.push_back({line_no, "box width/height must be positive"});
      continue;
    }
    if (row.box.confidence < 0.0 || row.box.confidence > 1.0) {
      result.rejected.push_back({line_no, "confidence outside [0, 1]"});
      continue;
    }
    if (row.embedding.has_value() &&
        std::abs(row.embedding->norm() - 1.0) > 1e-6) {
      result.rejected.push_back({line_no, "embedding is not unit norm"});
      continue;
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

std::vector<std::vector<Detection>> group_detections_by_frame(
    const std::vector<DetectionRow>& rows) {
  long max_frame = 0;
  for (const DetectionRow& r : rows) {
    max_frame = std::max(max_frame, r.frame);
  }
  std::vector<std::vector<Detection>> frames(
      static_cast<std::size_t>(max_frame) + 1);
  for (const DetectionRow& r : rows) {
    if (r.frame < 1) {
      continue;
    }
    Detection det;
    det.box = r.box;
    det.embedding = r.embedding;
    frames[static_cast<std::size_t>(r.frame)].push_back(std::move(det));
  }
  return frames;
}

void write_track_records_csv(const std::filesystem::path& path,
                             const std::vector<TrackRecord>& records) {
  std::ofstream out = open_out(path);
  out << "frame,track_id,cx,cy,w,h,status\n";
  for (const TrackRecord& r : records) {
    out << r.frame << ',' << r.track_id << ',' << format_double(r.cx) << ','
        << format_double(r.cy) << ',' << format_double(r.w) << ','
        << format_double(r.h) << ',' << r.status << '\n';
  }
}

std::vector<TrackRecord> read_track_records_csv(
    const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<TrackRecord> records;
  std::string line;
  if (!std::getline(in, line)) {
    return records;
  }
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 7) {
      parse_fail(path, line_no, 0, "expected 7 fields");
    }
    TrackRecord r;
    r.frame = parse_long(fields[0], path, line_no, 0);
    r.track_id = static_cast<int>(parse_long(fields[1], path, line_no, 1));
    r.cx = parse_double(fields[2], path, line_no, 2);
    r.cy = parse_double(fields[3], path, line_no, 3);
    r.w = parse_double(fields[4], path, line_no, 4);
    r.h = parse_double(fields[5], path, line_no, 5);
    r.status = fields[6];
    records.push_back(std::move(r));
  }
  return records;
}

void write_parameter_csv(const std::filesystem::path& path,
                         const std::vector<ParameterSample>& series) {
  std::ofstream out = open_out(path);
  out << "frame,flow,density,speed\n";
  for (const ParameterSample& s : series) {
    out << s.frame << ',' << format_double(s.flow) << ','
        << format_double(s.density) << ',' << format_double(s.speed) << '\n';
  }
}

std::vector<ParameterSample> read_parameter_csv(
    const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<ParameterSample> series;
  std::string line;
  if (!std::getline(in, line)) {
    return series;
  }
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 4) {
      parse_fail(path, line_no, 0, "expected 4 fields");
    }
    ParameterSample s;
    s.frame = parse_long(fields[0], path, line_no, 0);
    s.flow = parse_double(fields[1], path, line_no, 1);
    s.density = parse_double(fields[2], path, line_no, 2);
    s.speed = parse_double(fields[3], path, line_no, 3);
    series.push_back(s);
  }
  return series;
}

void write_labels_csv(const std::filesystem::path& path,
                      const std::vector<long>& frames,
                      const std::vector<std::uint8_t>& labels) {
  if (frames.size() != labels.size()) {
    throw DataError("write_labels_csv: frames and labels must align");
  }
  std::ofstream out = open_out(path);
  out << "frame,label\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << frames[i] << ',' << static_cast<int>(labels[i]) << '\n';
  }
}

std::vector<std::uint8_t> read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in = open_in(path);
  std::vector<std::uint8_t> labels;
  std::string line;
  if (!std::getline(in, line)) {
    return labels;
  }
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> fields = split_csv(line);
    if (fields.size() != 2) {
      parse_fail(path, line_no, 0, "expected 2 fields");
    }
    labels.push_back(
        static_cast<std::uint8_t>(parse_long(fields[1], path, line_no, 1)));
  }
  return labels;
}

void write_plot_csv(const std::filesystem::path& path,
                    const std::vector<PlotRow>& rows,
                    const std::map<std::string, double>& metadata) {
  std::ofstream out = open_out(path);
  for (const auto& [key, value] : metadata) {
    out << "# " << key << '=' << format_double(value) << '\n';
  }
  out << "x,series_name,y\n";
  for (const PlotRow& r : rows) {
    out << format_double(r.x) << ',' << r.series << ',' << format_double(r.y)
        << '\n';
  }
}

void write_warning_table_csv(const std::filesystem::path& path,
                             const std::vector<WarningRow>& table) {
  std::ofstream out = open_out(path);
  out << "event_id,actual_start,warning_time,lead_error_minutes\n";
  for (const WarningRow& r : table) {
    out << r.event_id << ',' << format_double(r.actual_start_minutes) << ',';
    if (std::isnan(r.warning_minutes)) {
      out << "missed,";
    } else {
      out << format_double(r.warning_minutes) << ',';
    }
    if (std::isnan(r.lead_error_minutes)) {
      out << "missed";
    } else {
      out << format_double(r.lead_error_minutes);
    }
    out << '\n';
  }
}

std::uint64_t file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw DataError("file_hash: cannot open '" + path.string() + "'");
  }
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[4096];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

}  // namespace roadflow::io
