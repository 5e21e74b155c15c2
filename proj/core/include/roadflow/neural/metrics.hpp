#pragma once

#include <vector>

namespace roadflow::neural {

struct ClassificationMetrics {
  double accuracy = 0.0;
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  double rmse = 0.0;  // on raw probabilities vs labels
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

/// Thresholded accuracy/recall/F1 plus RMSE on the raw probabilities.
/// Throws DataError when inputs misalign or no positive labels exist
/// (recall undefined).
ClassificationMetrics classification_metrics(
    const std::vector<double>& predictions, const std::vector<int>& labels,
    double threshold = 0.5);

}  // namespace roadflow::neural
