#include "roadflow/records.hpp"

namespace roadflow {

const char* parameter_feature_name(int feature) {
  switch (feature) {
    case 0:
      return "flow";
    case 1:
      return "density";
    case 2:
      return "speed";
    default:
      return "unknown";
  }
}

double get_feature(const ParameterSample& s, int feature) {
  switch (feature) {
    case 0:
      return s.flow;
    case 1:
      return s.density;
    default:
      return s.speed;
  }
}

void set_feature(ParameterSample& s, int feature, double value) {
  switch (feature) {
    case 0:
      s.flow = value;
      break;
    case 1:
      s.density = value;
      break;
    default:
      s.speed = value;
      break;
  }
}

}  // namespace roadflow
