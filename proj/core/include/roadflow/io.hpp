#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "roadflow/congestion.hpp"
#include "roadflow/records.hpp"
#include "roadflow/tracker.hpp"

namespace roadflow::io {

/// One row of a detection file. id_hint carries the ground-truth identity in
/// synthetic exports; the tracker never reads it.
struct DetectionRow {
  long frame = 0;
  int id_hint = -1;
  BoundingBox box;
  std::optional<Eigen::VectorXd> embedding;
};

struct RejectedRow {
  long line = 0;
  std::string reason;
};

struct DetectionIngest {
  std::vector<DetectionRow> rows;
  /// Rows whose values parse but violate invariants (w <= 0, bad embedding
  /// norm, ...). Parse failures throw DataError instead.
  std::vector<RejectedRow> rejected;
};

/// Header: frame,id_hint,cx,cy,w,h,confidence,class[,e0..eD-1]
void write_detections_csv(const std::filesystem::path& path,
                          const std::vector<DetectionRow>& rows);
DetectionIngest read_detections_csv(const std::filesystem::path& path);

/// Splits rows into per-frame detection lists, indexed 1..max_frame.
std::vector<std::vector<Detection>> group_detections_by_frame(
    const std::vector<DetectionRow>& rows);

/// Header: frame,track_id,cx,cy,w,h,status
void write_track_records_csv(const std::filesystem::path& path,
                             const std::vector<TrackRecord>& records);
std::vector<TrackRecord> read_track_records_csv(
    const std::filesystem::path& path);

/// Header: frame,flow,density,speed
void write_parameter_csv(const std::filesystem::path& path,
                         const std::vector<ParameterSample>& series);
std::vector<ParameterSample> read_parameter_csv(
    const std::filesystem::path& path);

/// Header: frame,label
void write_labels_csv(const std::filesystem::path& path,
                      const std::vector<long>& frames,
                      const std::vector<std::uint8_t>& labels);
std::vector<std::uint8_t> read_labels_csv(const std::filesystem::path& path);

/// Tidy plot export: one (x, series_name, y) row per point, metadata as
/// leading '# key=value' comment lines.
struct PlotRow {
  double x = 0.0;
  std::string series;
  double y = 0.0;
};
void write_plot_csv(const std::filesystem::path& path,
                    const std::vector<PlotRow>& rows,
                    const std::map<std::string, double>& metadata = {});

/// Header: event_id,actual_start,warning_time,lead_error_minutes
void write_warning_table_csv(const std::filesystem::path& path,
                             const std::vector<WarningRow>& table);

/// Shortest round-trip decimal form of a double (to_chars).
std::string format_double(double value);

/// FNV-1a over the file bytes; used by determinism and resume checks.
std::uint64_t file_hash(const std::filesystem::path& path);

}  // namespace roadflow::io
