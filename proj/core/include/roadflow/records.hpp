#pragma once

#include <string>
#include <vector>

#include "roadflow/geometry.hpp"

namespace roadflow {

/// One tracked box at one frame; the row format shared by the tracker output,
/// the ground-truth files and the evaluators.
struct TrackRecord {
  long frame = 0;
  int track_id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
  std::string status = "confirmed";

  BoundingBox box() const { return {cx, cy, w, h, 1.0, 0}; }
};

/// One traffic-parameter observation: the bridge between the vision stages
/// and the predictors. Missing values are NaN until interpolation fills them.
struct ParameterSample {
  long frame = 0;
  double flow = 0.0;     // vehicles per unit time (config: per second/minute)
  double density = 0.0;  // vehicles per km
  double speed = 0.0;    // km/h
};

constexpr int kParameterFeatureCount = 3;
const char* parameter_feature_name(int feature);  // 0=flow 1=density 2=speed
double get_feature(const ParameterSample& s, int feature);
void set_feature(ParameterSample& s, int feature, double value);

}  // namespace roadflow
